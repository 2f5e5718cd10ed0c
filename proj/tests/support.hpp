#pragma once
// Shared test helpers: explicit matrix-backed complexes, random elementary
// complexes with known reductions, and random unimodular conjugation used
// to manufacture "generic" inputs with known answers.

#include <random>

#include "catk/hpt.hpp"

namespace catk::testing {

inline Gen mat_gen(int n, int i) {
  return Gen::list_of(Gen::sym("g"), Gen::num(n), Gen::num(i));
}

// Effective complex from explicit boundary matrices.  dims[n] is the rank
// in degree n; d[n] (for n >= 1) maps degree n to degree n-1 and must have
// shape dims[n-1] x dims[n].
inline CxPtr matrix_complex(const std::string& name,
                            const std::vector<int>& dims,
                            const std::vector<IntMatrix>& d) {
  auto in_range = [dims](int n, const Gen& g) {
    if (n < 0 || n >= static_cast<int>(dims.size())) return false;
    if (!g.is_list() || g.items().size() != 3) return false;
    long long i = g.items()[2].num_value();
    return g.items()[1].num_value() == n && i >= 0 && i < dims[n];
  };
  auto diff = [dims, d](int n, const Gen& g) {
    Combination out(n - 1);
    if (n <= 0 || n >= static_cast<int>(dims.size())) return out;
    int j = static_cast<int>(g.items()[2].num_value());
    std::vector<Combination::Term> terms;
    if (n < static_cast<int>(d.size()))
      for (int i = 0; i < dims[n - 1]; ++i)
        if (d[n].get(i, j) != 0)
          terms.emplace_back(d[n].get(i, j), mat_gen(n - 1, i));
    return Combination::make(n - 1, std::move(terms));
  };
  auto basis = [dims](int n) {
    std::vector<Gen> out;
    if (n >= 0 && n < static_cast<int>(dims.size()))
      for (int i = 0; i < dims[n]; ++i) out.push_back(mat_gen(n, i));
    return out;
  };
  return make_complex(name, in_range, diff, basis);
}

inline IntMatrix random_unimodular(int n, Rng& rng) {
  IntMatrix u = IntMatrix::identity(n);
  if (n <= 1) return u;
  std::uniform_int_distribution<int> idx(0, n - 1);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int step = 0; step < 2 * n; ++step) {
    int i = idx(rng), j = idx(rng);
    if (i == j) continue;
    Int c = coef(rng);
    // row i += c * row j keeps the determinant at +-1
    for (int k = 0; k < n; ++k, void()) {
      Int v = u.get(i, k) + c * u.get(j, k);
      u.set(i, k, v);
    }
  }
  return u;
}

inline IntMatrix inverse_unimodular(const IntMatrix& u) {
  SNFResult s = smith_normal_form(u);
  // u = Pinv S Qinv with S = I, so u^-1 = Q P.
  for (int i = 0; i < u.rows(); ++i)
    if (s.S.get(i, i) != 1) throw std::runtime_error("matrix not unimodular");
  return s.Q * s.P;
}

// An "elementary" structure: per degree the indices are split into free
// generators, sources and targets; each source maps to a distinct target
// one degree down with a unit coefficient (so the pairs admit an exact
// reduction) unless unit_only is false (arbitrary coefficient, for
// perturbation material).
struct ElementaryData {
  std::vector<int> dims;
  std::vector<IntMatrix> d;           // d[n]: dims[n-1] x dims[n]
  std::vector<std::vector<int>> role; // 0 free, 1 source, 2 target
  std::vector<std::vector<int>> mate; // source index -> target index below
  std::vector<std::vector<Int>> coef; // source index -> coefficient
};

inline ElementaryData random_elementary(const std::vector<int>& dims, Rng& rng,
                                        bool unit_only, double pair_prob) {
  ElementaryData e;
  e.dims = dims;
  int D = static_cast<int>(dims.size());
  e.d.resize(D);
  e.role.resize(D);
  e.mate.resize(D);
  e.coef.resize(D);
  for (int n = 0; n < D; ++n) {
    e.role[n].assign(dims[n], 0);
    e.mate[n].assign(dims[n], -1);
    e.coef[n].assign(dims[n], 0);
  }
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> cdist(1, 3);
  for (int n = D - 1; n >= 1; --n) {
    e.d[n] = IntMatrix(dims[n - 1], dims[n]);
    std::vector<int> avail;
    for (int i = 0; i < dims[n - 1]; ++i)
      if (e.role[n - 1][i] == 0) avail.push_back(i);
    std::shuffle(avail.begin(), avail.end(), rng);
    for (int j = 0; j < dims[n] && !avail.empty(); ++j) {
      if (e.role[n][j] != 0 || u(rng) >= pair_prob) continue;
      int t = avail.back();
      avail.pop_back();
      Int c = unit_only ? Int(u(rng) < 0.5 ? 1 : -1) : Int(cdist(rng));
      if (!unit_only && u(rng) < 0.5) c = -c;
      e.role[n][j] = 1;
      e.role[n - 1][t] = 2;
      e.mate[n][j] = t;
      e.coef[n][j] = c;
      e.d[n].set(t, j, c);
    }
  }
  return e;
}

// Deterministic elementary data whose free part has exactly the given
// ranks: per degree the first free_dims[n] indices are free, followed by
// `pairs` targets (hit from one degree up) and `pairs` sources.
inline ElementaryData padded_elementary(const std::vector<int>& free_dims,
                                        int pairs) {
  ElementaryData e;
  int D = static_cast<int>(free_dims.size());
  e.dims.resize(D);
  e.d.resize(D);
  e.role.resize(D);
  e.mate.resize(D);
  e.coef.resize(D);
  auto t_of = [&](int n) { return n < D - 1 ? pairs : 0; };
  auto s_of = [&](int n) { return n >= 1 ? pairs : 0; };
  for (int n = 0; n < D; ++n) {
    e.dims[n] = free_dims[n] + t_of(n) + s_of(n);
    e.role[n].assign(e.dims[n], 0);
    e.mate[n].assign(e.dims[n], -1);
    e.coef[n].assign(e.dims[n], 0);
    for (int k = 0; k < t_of(n); ++k) e.role[n][free_dims[n] + k] = 2;
    for (int k = 0; k < s_of(n); ++k)
      e.role[n][free_dims[n] + t_of(n) + k] = 1;
  }
  for (int n = 1; n < D; ++n) {
    e.d[n] = IntMatrix(e.dims[n - 1], e.dims[n]);
    for (int k = 0; k < s_of(n); ++k) {
      int src = free_dims[n] + t_of(n) + k;
      int tgt = free_dims[n - 1] + k;
      Int c = (k % 2 == 0) ? 1 : -1;
      e.mate[n][src] = tgt;
      e.coef[n][src] = c;
      e.d[n].set(tgt, src, c);
    }
  }
  return e;
}

// Complex with differential U_{n-1} d_n U_n^{-1} for random unimodular U,
// i.e. the elementary complex in a disguised basis, plus the exact
// reduction onto its free part (requires unit_only pairs).
struct DisguisedComplex {
  CxPtr top;      // disguised complex
  CxPtr bottom;   // free-part complex, zero differential
  Reduction red;  // top => bottom
};

inline DisguisedComplex disguised_elementary(const ElementaryData& e,
                                             Rng& rng,
                                             const std::string& name) {
  int D = static_cast<int>(e.dims.size());
  std::vector<IntMatrix> U(D), Uinv(D);
  for (int n = 0; n < D; ++n) {
    U[n] = random_unimodular(e.dims[n], rng);
    Uinv[n] = inverse_unimodular(U[n]);
  }
  std::vector<IntMatrix> dd(D);
  for (int n = 1; n < D; ++n) dd[n] = U[n - 1] * (e.d[n] * Uinv[n]);
  CxPtr top = matrix_complex(name, e.dims, dd);

  // Bottom: free indices, renumbered densely per degree.
  std::vector<int> bdims(D, 0);
  std::vector<std::vector<int>> free_of(D), pos_of(D);
  for (int n = 0; n < D; ++n) {
    pos_of[n].assign(e.dims[n], -1);
    for (int i = 0; i < e.dims[n]; ++i)
      if (e.role[n][i] == 0) {
        pos_of[n][i] = bdims[n]++;
        free_of[n].push_back(i);
      }
  }
  CxPtr bottom = matrix_complex(name + "-free", bdims,
                                std::vector<IntMatrix>(D));

  // In the undisguised basis: f0 = projection to free part, g0 inclusion,
  // h0(target) = coef^{-1} * source (coef is a unit).  Conjugate by U.
  auto f_fn = [e, Uinv, pos_of, D](int n, const Gen& g) {
    Combination out(n);
    if (n < 0 || n >= D) return out;
    int j = static_cast<int>(g.items()[2].num_value());
    std::vector<Combination::Term> terms;
    for (int i = 0; i < e.dims[n]; ++i) {
      if (e.role[n][i] != 0) continue;
      Int v = Uinv[n].get(i, j);
      if (v != 0) terms.emplace_back(v, mat_gen(n, pos_of[n][i]));
    }
    return Combination::make(n, std::move(terms));
  };
  auto g_fn = [e, U, free_of, D](int n, const Gen& g) {
    Combination out(n);
    if (n < 0 || n >= D) return out;
    int j = free_of[n][static_cast<int>(g.items()[2].num_value())];
    std::vector<Combination::Term> terms;
    for (int i = 0; i < e.dims[n]; ++i) {
      Int v = U[n].get(i, j);
      if (v != 0) terms.emplace_back(v, mat_gen(n, i));
    }
    return Combination::make(n, std::move(terms));
  };
  auto h_fn = [e, U, Uinv, D](int n, const Gen& g) {
    Combination out(n + 1);
    if (n < 0 || n + 1 >= D) return out;
    int j = static_cast<int>(g.items()[2].num_value());
    std::vector<Combination::Term> terms;
    // Uinv[n] column j gives coordinates in the undisguised basis; send
    // target t to coef^{-1} * source, then back through U[n+1].
    for (int t = 0; t < e.dims[n]; ++t) {
      Int v = Uinv[n].get(t, j);
      if (v == 0 || e.role[n][t] != 2) continue;
      // find the source paired with t
      for (int s = 0; s < e.dims[n + 1]; ++s)
        if (e.mate[n + 1][s] == t) {
          Int c = e.coef[n + 1][s];  // +-1
          for (int i = 0; i < e.dims[n + 1]; ++i) {
            Int w = U[n + 1].get(i, s);
            if (w != 0) terms.emplace_back(v * c * w, mat_gen(n + 1, i));
          }
        }
    }
    return Combination::make(n + 1, std::move(terms));
  };
  Reduction red{top, bottom, Morphism(top, bottom, 0, f_fn),
                Morphism(bottom, top, 0, g_fn), Morphism(top, top, 1, h_fn)};
  return DisguisedComplex{top, bottom, red};
}

}  // namespace catk::testing
