// Simplicial sets as locally effective objects: canonical simplex encoding,
// normalized chains, standard space constructors, cartesian products, the
// Eilenberg-Zilber reduction and cell attachment.
//
// A simplex is stored in canonical Eilenberg-Zilber form: a strictly
// decreasing list of degeneracy indices over a nondegenerate base simplex.
// Face operators are pushed through the degeneracy list with the simplicial
// identities and only hit the space's own face algorithm on nondegenerate
// bases.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "catk/chains.hpp"
#include "catk/hpt.hpp"
#include "catk/registry.hpp"

namespace catk {

// --------------------------------------------------------------------------
// Canonical simplex terms.
// --------------------------------------------------------------------------

struct Simplex {
  std::vector<int> dgs;  // strictly decreasing degeneracy indices
  Gen base;              // name of a nondegenerate simplex

  bool degenerate() const { return !dgs.empty(); }
  bool operator==(const Simplex& o) const {
    return dgs == o.dgs && base == o.base;
  }
};

// Compose s_j with a canonical degeneracy list: s_i s_j = s_{j+1} s_i (i<=j).
inline std::vector<int> degen_insert(std::vector<int> L, int j) {
  std::size_t k = 0;
  while (k < L.size() && j <= L[k]) {
    ++L[k];
    ++k;
  }
  L.insert(L.begin() + static_cast<std::ptrdiff_t>(k), j);
  return L;
}

// Factor s_j out of a canonical list containing j: inverse of degen_insert.
inline std::vector<int> degen_extract(const std::vector<int>& L, int j) {
  std::vector<int> out;
  out.reserve(L.size() - 1);
  for (int a : L) {
    if (a == j) continue;
    out.push_back(a > j ? a - 1 : a);
  }
  return out;
}

inline Gen simplex_gen(const Simplex& s) {
  if (s.dgs.empty()) return s.base;
  std::vector<Gen> is;
  is.reserve(s.dgs.size());
  for (int j : s.dgs) is.push_back(Gen::num(j));
  return Gen::list_of(Gen::sym("dgn"), Gen::list(std::move(is)), s.base);
}

inline Simplex gen_simplex(const Gen& g) {
  if (g.kind() == 2 && g.items().size() == 3 && g.items()[0].is_sym("dgn")) {
    std::vector<int> dgs;
    for (const Gen& j : g.items()[1].items())
      dgs.push_back(static_cast<int>(j.num_value()));
    return Simplex{std::move(dgs), g.items()[2]};
  }
  return Simplex{{}, g};
}

// --------------------------------------------------------------------------
// Simplicial sets.
// --------------------------------------------------------------------------

class SimplicialSet {
 public:
  // face(i, n, base): i-th face of the nondegenerate n-simplex `base`.
  using FaceFn = std::function<Simplex(int, int, const Gen&)>;
  using MemberFn = std::function<bool(int, const Gen&)>;
  using BasisFn = std::function<std::vector<Gen>(int)>;
  using SampleFn = std::function<std::vector<Gen>(int, int, Rng&)>;

  SimplicialSet(std::string kind, MemberFn member, FaceFn face, BasisFn basis,
                Gen base_point, SampleFn sampler = nullptr)
      : id_(registry_enroll(kind)),
        kind_(std::move(kind)),
        member_(std::move(member)),
        face_(std::move(face)),
        basis_(std::move(basis)),
        sampler_(std::move(sampler)),
        base_point_(std::move(base_point)) {}

  int id() const { return id_; }
  const std::string& kind() const { return kind_; }
  const Gen& base_point() const { return base_point_; }
  bool has_basis() const { return static_cast<bool>(basis_); }
  std::vector<Gen> basis(int n) const {
    if (!basis_)
      throw std::runtime_error("nondegenerate basis not available on " +
                               registry_label(id_));
    return n < 0 ? std::vector<Gen>{} : basis_(n);
  }
  bool member_nondeg(int n, const Gen& base) const {
    return n >= 0 && member_(n, base);
  }
  Simplex face_nondeg(int i, int n, const Gen& base) const {
    return face_(i, n, base);
  }
  bool has_sampler() const { return static_cast<bool>(sampler_); }
  std::vector<Gen> sample_nondeg(int n, int count, Rng& rng) const {
    if (sampler_) return sampler_(n, count, rng);
    std::vector<Gen> b = basis(n);
    std::vector<Gen> out;
    for (int k = 0; k < count && !b.empty(); ++k)
      out.push_back(b[rng() % b.size()]);
    return out;
  }

 private:
  int id_;
  std::string kind_;
  MemberFn member_;
  FaceFn face_;
  BasisFn basis_;
  SampleFn sampler_;
  Gen base_point_;
};

using SsPtr = std::shared_ptr<const SimplicialSet>;

inline SsPtr make_sset(std::string kind, SimplicialSet::MemberFn member,
                       SimplicialSet::FaceFn face,
                       SimplicialSet::BasisFn basis, Gen base_point,
                       SimplicialSet::SampleFn sampler = nullptr) {
  return std::make_shared<SimplicialSet>(std::move(kind), std::move(member),
                                         std::move(face), std::move(basis),
                                         std::move(base_point),
                                         std::move(sampler));
}

inline bool sset_member(const SsPtr& X, int n, const Simplex& s) {
  int bd = n - static_cast<int>(s.dgs.size());
  if (bd < 0) return false;
  for (std::size_t k = 0; k + 1 < s.dgs.size(); ++k)
    if (s.dgs[k] <= s.dgs[k + 1]) return false;
  if (!s.dgs.empty() && (s.dgs.front() > n - 1 || s.dgs.back() < 0))
    return false;
  return X->member_nondeg(bd, s.base);
}

// The unique n-fold degeneracy of a vertex.
inline Simplex point_simplex(const Gen& v, int n) {
  std::vector<int> dgs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) dgs[static_cast<std::size_t>(k)] = n - 1 - k;
  return Simplex{std::move(dgs), v};
}

// d_i of an n-simplex in canonical form, commuting past the degeneracies.
inline Simplex apply_face(const SsPtr& X, int i, int n, const Simplex& s) {
  if (i < 0 || i > n) throw std::out_of_range("apply_face: index");
  int fi = i;
  std::vector<int> outer;  // outermost first
  for (std::size_t k = 0; k < s.dgs.size(); ++k) {
    int j = s.dgs[k];
    if (fi < j) {
      outer.push_back(j - 1);
    } else if (fi == j || fi == j + 1) {
      // d_i s_j = id: drop s_j, keep the remaining inner degeneracies.
      std::vector<int> dgs(s.dgs.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                           s.dgs.end());
      for (auto it = outer.rbegin(); it != outer.rend(); ++it)
        dgs = degen_insert(dgs, *it);
      return Simplex{std::move(dgs), s.base};
    } else {
      outer.push_back(j);
      --fi;
    }
  }
  int bd = n - static_cast<int>(s.dgs.size());
  Simplex r = X->face_nondeg(fi, bd, s.base);
  for (auto it = outer.rbegin(); it != outer.rend(); ++it)
    r.dgs = degen_insert(r.dgs, *it);
  return r;
}

inline Simplex apply_degen(int j, const Simplex& s) {
  return Simplex{degen_insert(s.dgs, j), s.base};
}

// All n-simplices, degenerate ones included: every canonical degeneracy
// operator from dimension d to n is a strictly decreasing subset of
// {0,...,n-1} of size n-d.
inline std::vector<Simplex> all_simplices(const SsPtr& X, int n) {
  std::vector<Simplex> out;
  for (int d = 0; d <= n; ++d) {
    int k = n - d;
    std::vector<int> subset(static_cast<std::size_t>(k));
    // iterate over k-subsets of {0..n-1} in decreasing order per subset
    std::function<void(int, int)> rec = [&](int next, int slot) {
      if (slot == k) {
        for (const Gen& b : X->basis(d)) out.push_back(Simplex{subset, b});
        return;
      }
      // values still to place: k - slot, all below next+1
      for (int j = next; j >= k - slot - 1; --j) {
        subset[static_cast<std::size_t>(slot)] = j;
        rec(j - 1, slot + 1);
      }
    };
    rec(n - 1, 0);
  }
  return out;
}

// --------------------------------------------------------------------------
// Normalized chains.
// --------------------------------------------------------------------------

inline CxPtr nchains(const SsPtr& X) {
  ChainComplex::MemberFn member = [X](int n, const Gen& g) {
    return X->member_nondeg(n, g);
  };
  ChainComplex::DiffFn diff = [X](int n, const Gen& g) {
    std::vector<Combination::Term> terms;
    if (n == 0) return Combination::make(-1, std::move(terms));
    for (int i = 0; i <= n; ++i) {
      Simplex f = apply_face(X, i, n, Simplex{{}, g});
      if (f.degenerate()) continue;
      terms.emplace_back((i % 2 == 0) ? 1 : -1, f.base);
    }
    return Combination::make(n - 1, std::move(terms));
  };
  ChainComplex::BasisFn basis = nullptr;
  if (X->has_basis())
    basis = [X](int n) { return X->basis(n); };
  ChainComplex::SampleFn sampler = nullptr;
  if (X->has_sampler())
    sampler = [X](int n, int count, Rng& rng) {
      return X->sample_nondeg(n, count, rng);
    };
  return make_complex("Nchains[" + X->kind() + "]", member, diff, basis,
                      sampler);
}

// Bundle used by the space constructors: the simplicial model together with
// its effective-homology equivalence (canonical side = nchains of the model).
struct SpaceEq {
  SsPtr space;
  Equivalence eq;
};

inline SpaceEq finite_space(const SsPtr& X) {
  return SpaceEq{X, trivial_equivalence(nchains(X))};
}

// --------------------------------------------------------------------------
// Standard spaces.
// --------------------------------------------------------------------------

// The standard n-simplex: nondegenerate simplices are the strictly
// increasing vertex subsets of {0..n}.
inline SpaceEq delta_space(int n) {
  if (n < 0) throw std::invalid_argument("delta: n must be >= 0");
  auto decode_ok = [n](int d, const Gen& g) {
    if (g.kind() != 2 || static_cast<int>(g.items().size()) != d + 1)
      return false;
    long prev = -1;
    for (const Gen& v : g.items()) {
      if (v.kind() != 1) return false;
      long x = v.num_value();
      if (x <= prev || x > n) return false;
      prev = x;
    }
    return true;
  };
  SimplicialSet::FaceFn face = [](int i, int, const Gen& g) {
    std::vector<Gen> vs = g.items();
    vs.erase(vs.begin() + i);
    return Simplex{{}, Gen::list(std::move(vs))};
  };
  SimplicialSet::BasisFn basis = [n](int d) {
    std::vector<Gen> out;
    std::vector<int> idx(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) idx[static_cast<std::size_t>(k)] = k;
    if (d > n) return out;
    for (;;) {
      std::vector<Gen> vs;
      for (int v : idx) vs.push_back(Gen::num(v));
      out.push_back(Gen::list(std::move(vs)));
      int k = d;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - (d - k)) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (int t = k + 1; t <= d; ++t)
        idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
    }
    return out;
  };
  return finite_space(make_sset("Delta[" + std::to_string(n) + "]", decode_ok,
                                face, basis, Gen::list_of(Gen::num(0))));
}

// Minimal sphere: a base point and a single nondegenerate n-cell all of
// whose faces are degeneracies of the point.
inline SpaceEq sphere_space(int n) {
  if (n < 1) throw std::invalid_argument("sphere: n must be >= 1");
  Gen pt = Gen::sym("*");
  Gen cell = Gen::sym("s" + std::to_string(n));
  auto member = [n, pt, cell](int d, const Gen& g) {
    return (d == 0 && g == pt) || (d == n && g == cell);
  };
  SimplicialSet::FaceFn face = [n, pt](int, int, const Gen&) {
    return point_simplex(pt, n - 1);
  };
  SimplicialSet::BasisFn basis = [n, pt, cell](int d) {
    std::vector<Gen> out;
    if (d == 0) out.push_back(pt);
    if (d == n) out.push_back(cell);
    return out;
  };
  return finite_space(make_sset("Sphere-" + std::to_string(n), member, face,
                                basis, pt));
}

// Reduced pseudo-projective plane: one vertex, loops a, e_1..e_{m-1} and m
// triangles t_i with faces (a, e_{i+1}, e_i), where e_0 and e_m denote the
// degenerate loop at the vertex.  H_1 = Z/m.
inline SpaceEq pseudo_projective_space(int m) {
  if (m < 2) throw std::invalid_argument("pseudo projective plane: m >= 2");
  Gen pt = Gen::sym("*");
  auto edge = [](int i) { return Gen::list_of(Gen::sym("e"), Gen::num(i)); };
  Gen a = Gen::sym("a");
  auto member = [m, pt, a](int d, const Gen& g) {
    if (d == 0) return g == pt;
    if (d == 1) {
      if (g == a) return true;
      if (g.kind() == 2 && g.items().size() == 2 && g.items()[0].is_sym("e")) {
        long i = g.items()[1].num_value();
        return 1 <= i && i <= m - 1;
      }
      return false;
    }
    if (d == 2 && g.kind() == 2 && g.items().size() == 2 &&
        g.items()[0].is_sym("t")) {
      long i = g.items()[1].num_value();
      return 0 <= i && i <= m - 1;
    }
    return false;
  };
  SimplicialSet::FaceFn face = [m, pt, a, edge](int i, int n, const Gen& g) {
    if (n == 1) return Simplex{{}, pt};
    int t = static_cast<int>(g.items()[1].num_value());
    int e = (i == 0) ? -1 : (i == 1 ? t + 1 : t);
    if (i == 0) return Simplex{{}, a};
    if (e == 0 || e == m) return point_simplex(pt, 1);
    return Simplex{{}, edge(e)};
  };
  SimplicialSet::BasisFn basis = [m, pt, a, edge](int d) {
    std::vector<Gen> out;
    if (d == 0) out.push_back(pt);
    if (d == 1) {
      out.push_back(a);
      for (int i = 1; i <= m - 1; ++i) out.push_back(edge(i));
    }
    if (d == 2)
      for (int i = 0; i <= m - 1; ++i)
        out.push_back(Gen::list_of(Gen::sym("t"), Gen::num(i)));
    return out;
  };
  return finite_space(make_sset("Pseudo-Projective-" + std::to_string(m),
                                member, face, basis, pt));
}

// Kan suspension of a reduced simplicial set: one new base point, and the
// lift x^ (dimension raised by one) of every nondegenerate x of positive
// dimension.  d_0(x^) is base-point degenerate and d_i(x^) = (d_{i-1}x)^,
// where the lift of a degenerate simplex shifts its degeneracy indices up
// and collapses base-point bases with an extra s_0.
inline SpaceEq suspension_space(const SpaceEq& Xe) {
  SsPtr X = Xe.space;
  Gen pt = Gen::sym("*");
  Gen bp = X->base_point();
  auto lift_cell = [](const Gen& x) { return Gen::list_of(Gen::sym("sus"), x); };
  auto lift = [pt, bp, lift_cell](const Simplex& s) {
    std::vector<int> dgs;
    dgs.reserve(s.dgs.size() + 1);
    for (int j : s.dgs) dgs.push_back(j + 1);
    if (s.base == bp) {
      dgs.push_back(0);
      return Simplex{std::move(dgs), pt};
    }
    return Simplex{std::move(dgs), lift_cell(s.base)};
  };
  auto member = [X, pt, bp](int d, const Gen& g) {
    if (d == 0) return g == pt;
    if (g.kind() != 2 || g.items().size() != 2 || !g.items()[0].is_sym("sus"))
      return false;
    const Gen& x = g.items()[1];
    return x != bp && X->member_nondeg(d - 1, x);
  };
  SimplicialSet::FaceFn face = [X, pt, lift](int i, int n, const Gen& g) {
    const Gen& x = g.items()[1];
    if (i == 0) return point_simplex(pt, n - 1);
    if (n - 1 == 0) return Simplex{{}, pt};
    return lift(apply_face(X, i - 1, n - 1, Simplex{{}, x}));
  };
  SimplicialSet::BasisFn basis = nullptr;
  if (X->has_basis())
    basis = [X, pt, bp, lift_cell](int d) {
      std::vector<Gen> out;
      if (d == 0) {
        out.push_back(pt);
        return out;
      }
      for (const Gen& x : X->basis(d - 1))
        if (x != bp) out.push_back(lift_cell(x));
      return out;
    };
  return finite_space(make_sset("Suspension[" + X->kind() + "]", member, face,
                                basis, pt));
}

// Moore space M(Z/m, n).  When the first m even face indices fit into
// {0..n+1} a three-cell model is used: a point, an n-cell sigma and an
// (n+1)-cell tau whose faces with even index < 2m are sigma, so that
// d(tau) = m sigma.  Otherwise the space is the (n-1)-fold Kan suspension of
// the pseudo-projective plane.
inline SpaceEq moore_space(int m, int n) {
  if (m < 2 || n < 2) throw std::invalid_argument("moore: need m>=2, n>=2");
  if (2 * (m - 1) <= n + 1) {
    Gen pt = Gen::sym("*");
    Gen sg = Gen::sym("sgm");
    Gen ta = Gen::sym("tau");
    auto member = [n, pt, sg, ta](int d, const Gen& g) {
      return (d == 0 && g == pt) || (d == n && g == sg) ||
             (d == n + 1 && g == ta);
    };
    SimplicialSet::FaceFn face = [m, n, pt, sg](int i, int d, const Gen&) {
      if (d == n) return point_simplex(pt, n - 1);
      if (i % 2 == 0 && i < 2 * m) return Simplex{{}, sg};
      return point_simplex(pt, n);
    };
    SimplicialSet::BasisFn basis = [n, pt, sg, ta](int d) {
      std::vector<Gen> out;
      if (d == 0) out.push_back(pt);
      if (d == n) out.push_back(sg);
      if (d == n + 1) out.push_back(ta);
      return out;
    };
    return finite_space(make_sset(
        "Moore-" + std::to_string(m) + "-" + std::to_string(n), member, face,
        basis, pt));
  }
  SpaceEq s = pseudo_projective_space(m);
  for (int k = 1; k < n; ++k) s = suspension_space(s);
  return s;
}

// P^inf(R) / P^{k-1}(R): one nondegenerate simplex x_d in every dimension
// d >= k plus the base point; faces as in the standard model of P^inf(R)
// with everything below dimension k collapsed to the point.
inline SpaceEq r_proj_space(int k) {
  if (k < 1) throw std::invalid_argument("r_proj_space: k must be >= 1");
  Gen pt = Gen::sym("*");
  auto cell = [](int d) { return Gen::list_of(Gen::sym("rp"), Gen::num(d)); };
  auto member = [k, pt](int d, const Gen& g) {
    if (d == 0) return g == pt;
    if (d < k || g.kind() != 2 || g.items().size() != 2 ||
        !g.items()[0].is_sym("rp"))
      return false;
    return g.items()[1].num_value() == d;
  };
  SimplicialSet::FaceFn face = [k, pt, cell](int i, int n, const Gen&) {
    if (i == 0 || i == n) {
      if (n - 1 < k) return point_simplex(pt, n - 1);
      return Simplex{{}, cell(n - 1)};
    }
    if (n - 2 < k) return point_simplex(pt, n - 1);
    return Simplex{{i - 1}, cell(n - 2)};
  };
  SimplicialSet::BasisFn basis = [k, pt, cell](int d) {
    std::vector<Gen> out;
    if (d == 0) out.push_back(pt);
    if (d >= k) out.push_back(cell(d));
    return out;
  };
  SsPtr X = make_sset("R-Proj-Space-" + std::to_string(k), member, face,
                      basis, pt);
  return finite_space(X);
}

// --------------------------------------------------------------------------
// Cartesian products.
// --------------------------------------------------------------------------

// A nondegenerate q-simplex of X x Y is a pair of q-simplices whose
// degeneracy index sets are disjoint.
inline Gen crpr_gen(const Simplex& sx, const Simplex& sy) {
  return Gen::list_of(Gen::sym("crpr"), simplex_gen(sx), simplex_gen(sy));
}

inline bool is_crpr_gen(const Gen& g) {
  return g.kind() == 2 && g.items().size() == 3 && g.items()[0].is_sym("crpr");
}

inline Simplex crpr_left(const Gen& g) { return gen_simplex(g.items()[1]); }
inline Simplex crpr_right(const Gen& g) { return gen_simplex(g.items()[2]); }

// Factor out the common degeneracies of a pair; the returned simplex is
// degenerate exactly when the two sides share a degeneracy direction.
inline Simplex canonical_pair(const Simplex& sx, const Simplex& sy) {
  std::vector<int> common;
  for (int a : sx.dgs)
    if (std::find(sy.dgs.begin(), sy.dgs.end(), a) != sy.dgs.end())
      common.push_back(a);  // both lists decreasing, so common is too
  Simplex ax = sx, ay = sy;
  for (int j : common) {
    ax.dgs = degen_extract(ax.dgs, j);
    ay.dgs = degen_extract(ay.dgs, j);
  }
  return Simplex{std::move(common), crpr_gen(ax, ay)};
}

inline SsPtr product_space(const SsPtr& X, const SsPtr& Y) {
  auto member = [X, Y](int n, const Gen& g) {
    if (!is_crpr_gen(g)) return false;
    Simplex sx = crpr_left(g), sy = crpr_right(g);
    for (int a : sx.dgs)
      if (std::find(sy.dgs.begin(), sy.dgs.end(), a) != sy.dgs.end())
        return false;
    return sset_member(X, n, sx) && sset_member(Y, n, sy);
  };
  SimplicialSet::FaceFn face = [X, Y](int i, int n, const Gen& g) {
    Simplex fx = apply_face(X, i, n, crpr_left(g));
    Simplex fy = apply_face(Y, i, n, crpr_right(g));
    return canonical_pair(fx, fy);
  };
  SimplicialSet::BasisFn basis = nullptr;
  if (X->has_basis() && Y->has_basis()) {
    basis = [X, Y](int q) {
      std::vector<Gen> out;
      // choose the degeneracy sets A (on the X side) and B (on the Y side)
      // as disjoint subsets of {0..q-1}
      for (int p = 0; p <= q; ++p) {
        std::vector<Gen> xs = X->basis(p);
        if (xs.empty()) continue;
        // A: q-p indices out of q
        std::vector<int> A(static_cast<std::size_t>(q - p));
        std::function<void(int, int)> pick_a = [&](int start, int need) {
          if (need == 0) {
            for (int r = 0; r <= q; ++r) {
              std::vector<Gen> ys = Y->basis(r);
              if (ys.empty()) continue;
              std::vector<int> rest;
              for (int t = 0; t < q; ++t)
                if (std::find(A.begin(), A.end(), t) == A.end())
                  rest.push_back(t);
              if (q - r > static_cast<int>(rest.size())) continue;
              std::vector<int> B(static_cast<std::size_t>(q - r));
              std::function<void(int, int)> pick_b = [&](int s2, int need2) {
                if (need2 == 0) {
                  std::vector<int> da(A.rbegin(), A.rend());
                  std::vector<int> db(B.rbegin(), B.rend());
                  for (const Gen& x : xs)
                    for (const Gen& y : Y->basis(r))
                      out.push_back(crpr_gen(Simplex{da, x}, Simplex{db, y}));
                  return;
                }
                for (int t = s2; t < static_cast<int>(rest.size()); ++t) {
                  B[static_cast<std::size_t>(q - r - need2)] = rest[t];
                  pick_b(t + 1, need2 - 1);
                }
              };
              pick_b(0, q - r);
            }
            return;
          }
          for (int t = start; t < q; ++t) {
            A[static_cast<std::size_t>(q - p - need)] = t;
            pick_a(t + 1, need - 1);
          }
        };
        pick_a(0, q - p);
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    };
  }
  SimplicialSet::SampleFn sampler = [X, Y](int q, int count, Rng& rng) {
    std::vector<Gen> out;
    for (int attempt = 0; attempt < 16 * count; ++attempt) {
      if (static_cast<int>(out.size()) >= count) break;
      // random disjoint degeneracy sets, then random nondegenerate bases
      std::vector<int> da, db;
      for (int t = q - 1; t >= 0; --t) {
        unsigned r = static_cast<unsigned>(rng() % 3);
        if (r == 0) da.push_back(t);
        if (r == 1) db.push_back(t);
      }
      int p = q - static_cast<int>(da.size());
      int r = q - static_cast<int>(db.size());
      std::vector<Gen> xs = X->sample_nondeg(p, 1, rng);
      std::vector<Gen> ys = Y->sample_nondeg(r, 1, rng);
      if (xs.empty() || ys.empty()) continue;
      out.push_back(crpr_gen(Simplex{da, xs[0]}, Simplex{db, ys[0]}));
    }
    return out;
  };
  return make_sset("Product[" + X->kind() + "," + Y->kind() + "]", member,
                   face, basis,
                   crpr_gen(Simplex{{}, X->base_point()},
                            Simplex{{}, Y->base_point()}),
                   sampler);
}

// --------------------------------------------------------------------------
// Eilenberg-Zilber.
// --------------------------------------------------------------------------

// Alexander-Whitney: f(x,y) = sum_p front_p(x) (x) back_{n-p}(y).
inline Morphism aw_morphism(const SsPtr& X, const SsPtr& Y, const CxPtr& top,
                            const CxPtr& bottom) {
  return Morphism(top, bottom, 0, [X, Y](int n, const Gen& g) {
    std::vector<Combination::Term> terms;
    Simplex front = crpr_left(g);
    for (int p = n; p >= 0; --p) {
      // front is now d_{p+1} ... d_n of the left factor
      if (!front.degenerate()) {
        Simplex back = crpr_right(g);
        for (int t = 0; t < p; ++t)
          back = apply_face(Y, 0, n - t, back);
        if (!back.degenerate())
          terms.emplace_back(1, tensor_gen(p, front.base, back.base));
      }
      if (p > 0) front = apply_face(X, p, p, front);
    }
    return Combination::make(n, std::move(terms));
  });
}

// Eilenberg-MacLane shuffle map: g(x (x) y) = sum over (p,q)-shuffles.
inline Morphism shuffle_morphism(const SsPtr& X, const SsPtr& Y,
                                 const CxPtr& bottom, const CxPtr& top) {
  return Morphism(bottom, top, 0, [](int n, const Gen& g) {
    int p = tensor_left_degree(g);
    int q = n - p;
    const Gen& x = tensor_left(g);
    const Gen& y = tensor_right(g);
    std::vector<Combination::Term> terms;
    // choose B (the q indices degenerating x); A = complement goes to y
    std::vector<int> B(static_cast<std::size_t>(q));
    std::function<void(int, int)> rec = [&](int start, int need) {
      if (need == 0) {
        std::vector<int> A;
        for (int t = 0; t < n; ++t)
          if (std::find(B.begin(), B.end(), t) == B.end()) A.push_back(t);
        long inv = 0;
        for (int a : A)
          for (int b : B)
            if (a > b) ++inv;
        std::vector<int> db(B.rbegin(), B.rend());
        std::vector<int> da(A.rbegin(), A.rend());
        terms.emplace_back((inv % 2 == 0) ? 1 : -1,
                           crpr_gen(Simplex{db, x}, Simplex{da, y}));
        return;
      }
      for (int t = start; t < n; ++t) {
        B[static_cast<std::size_t>(q - need)] = t;
        rec(t + 1, need - 1);
      }
    };
    rec(0, q);
    return Combination::make(n, std::move(terms));
  });
}

// Expand a canonical simplex over a standard-simplex base into its full
// (weakly increasing) vertex list.
inline std::vector<int> delta_vertex_list(const Simplex& s) {
  std::vector<int> v;
  for (const Gen& t : s.base.items())
    v.push_back(static_cast<int>(t.num_value()));
  for (auto it = s.dgs.rbegin(); it != s.dgs.rend(); ++it)
    v.insert(v.begin() + *it, v[static_cast<std::size_t>(*it)]);
  return v;
}

// Canonical form of a weakly increasing vertex list: degeneracies at the
// repeat positions over the strictly increasing support.
inline Simplex delta_from_vertex_list(const std::vector<int>& v) {
  std::vector<int> dgs, support;
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (t + 1 < v.size() && v[t] == v[t + 1])
      dgs.push_back(static_cast<int>(t));
    if (t == 0 || v[t] != v[t - 1]) support.push_back(v[t]);
  }
  std::reverse(dgs.begin(), dgs.end());
  std::vector<Gen> vs;
  for (int w : support) vs.push_back(Gen::num(w));
  return Simplex{std::move(dgs), Gen::list(std::move(vs))};
}

// sigma . phi for the monotone map phi given by its value list: faces at the
// missed values (descending) followed by degeneracies at the repeat
// positions.
inline Simplex simplicial_operator(const SsPtr& X, Simplex s, int n,
                                   const std::vector<int>& values) {
  std::vector<bool> hit(static_cast<std::size_t>(n) + 1, false);
  for (int v : values) hit[static_cast<std::size_t>(v)] = true;
  int dim = n;
  for (int v = n; v >= 0; --v)
    if (!hit[static_cast<std::size_t>(v)]) {
      s = apply_face(X, v, dim, s);
      --dim;
    }
  for (std::size_t t = 0; t + 1 < values.size(); ++t)
    if (values[t] == values[t + 1])
      s.dgs = degen_insert(s.dgs, static_cast<int>(t));
  return s;
}

namespace detail {

// Universal Eilenberg-Zilber data on Delta[m] x Delta[m]: the contracting
// homotopy is transported from the chain H_m on the universal model via the
// classifying maps of the two factors.
struct EzUniversal {
  SsPtr dm;        // Delta[m]
  SsPtr prod;      // Delta[m] x Delta[m]
  CxPtr top;       // nchains of the product
  CxPtr bottom;    // tensor square
  Morphism f, g;
  Combination H;   // degree m+1 chain

  EzUniversal() : H(0) {}
};

inline Combination ez_h_apply(const SsPtr& X, const SsPtr& Y, int n,
                              const Gen& g);

inline const EzUniversal& ez_universal(int m) {
  static std::map<int, EzUniversal> store;
  auto it = store.find(m);
  if (it != store.end()) return it->second;
  EzUniversal u;
  u.dm = delta_space(m).space;
  u.prod = product_space(u.dm, u.dm);
  u.top = nchains(u.prod);
  CxPtr nd = nchains(u.dm);
  u.bottom = tensor_complex(nd, nd);
  u.f = aw_morphism(u.dm, u.dm, u.top, u.bottom);
  u.g = shuffle_morphism(u.dm, u.dm, u.bottom, u.top);

  std::vector<Gen> iv;
  for (int v = 0; v <= m; ++v) iv.push_back(Gen::num(v));
  Gen iota = Gen::list(iv);
  Gen diag = crpr_gen(Simplex{{}, iota}, Simplex{{}, iota});
  Combination z(m, diag);
  Combination w = cmb_sub(z, u.g(u.f(z)));
  if (m >= 1) {
    Combination dz = u.top->diff(z);
    for (const auto& t : dz.terms())
      w = cmb_combine(1, w, -t.first, ez_h_apply(u.dm, u.dm, m - 1, t.second));
  }
  // cone contraction towards the apex (m,m): k[V] = (-1)^{|V|} [V, apex]
  std::vector<Combination::Term> ht;
  for (const auto& t : w.terms()) {
    std::vector<int> vx = delta_vertex_list(crpr_left(t.second));
    std::vector<int> vy = delta_vertex_list(crpr_right(t.second));
    if (vx.back() == m && vy.back() == m) continue;
    vx.push_back(m);
    vy.push_back(m);
    Simplex cx = delta_from_vertex_list(vx);
    Simplex cy = delta_from_vertex_list(vy);
    Int sign = (m % 2 == 0) ? 1 : -1;  // (-1)^{m+1}
    ht.emplace_back(-sign * t.first, crpr_gen(cx, cy));
  }
  u.H = Combination::make(m + 1, std::move(ht));
  return store.emplace(m, std::move(u)).first->second;
}

// Transport of the universal chain H_n along the pair of classifying maps of
// an n-simplex of X x Y.
inline Combination ez_h_apply(const SsPtr& X, const SsPtr& Y, int n,
                              const Gen& g) {
  const EzUniversal& u = ez_universal(n);
  Simplex sx = crpr_left(g), sy = crpr_right(g);
  std::vector<Combination::Term> terms;
  for (const auto& t : u.H.terms()) {
    std::vector<int> vx = delta_vertex_list(crpr_left(t.second));
    std::vector<int> vy = delta_vertex_list(crpr_right(t.second));
    Simplex px = simplicial_operator(X, sx, n, vx);
    Simplex py = simplicial_operator(Y, sy, n, vy);
    Simplex pair = canonical_pair(px, py);
    if (pair.degenerate()) continue;
    terms.emplace_back(t.first, pair.base);
  }
  return Combination::make(n + 1, std::move(terms));
}

}  // namespace detail

// C(X x Y) ==> C(X) (x) C(Y) with the Alexander-Whitney projection, the
// shuffle inclusion, and a homotopy transported from a universal model and
// normalized so that the full identity suite holds.
inline Reduction ez_reduction(const SsPtr& X, const SsPtr& Y) {
  CxPtr top = nchains(product_space(X, Y));
  CxPtr bottom = tensor_complex(nchains(X), nchains(Y));
  Morphism f = aw_morphism(X, Y, top, bottom);
  Morphism g = shuffle_morphism(X, Y, bottom, top);
  Morphism h(top, top, 1, [X, Y](int n, const Gen& gg) {
    return detail::ez_h_apply(X, Y, n, gg);
  }, homotopy_cache_budget());
  return normalize_contraction(top, bottom, f, g, h);
}

// --------------------------------------------------------------------------
// Cell attachment.
// --------------------------------------------------------------------------

inline SpaceEq disk_pasting(const SpaceEq& Xe, int n,
                            const std::vector<Simplex>& faces,
                            const std::string& name) {
  SsPtr X = Xe.space;
  if (static_cast<int>(faces.size()) != n + 1)
    throw std::invalid_argument("disk_pasting: need exactly n+1 faces");
  for (int i = 0; i <= n; ++i)
    if (!sset_member(X, n - 1, faces[static_cast<std::size_t>(i)]))
      throw std::invalid_argument("disk_pasting: face " + std::to_string(i) +
                                  " is not an (n-1)-simplex of the space");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      Simplex lhs = apply_face(X, i, n - 1, faces[static_cast<std::size_t>(j)]);
      Simplex rhs =
          apply_face(X, j - 1, n - 1, faces[static_cast<std::size_t>(i)]);
      if (!(lhs == rhs))
        throw std::invalid_argument(
            "disk_pasting: incompatible faces, d_" + std::to_string(i) +
            " d_" + std::to_string(j) + " != d_" + std::to_string(j - 1) +
            " d_" + std::to_string(i));
    }

  Gen cell = Gen::list_of(Gen::sym("disk"), Gen::sym(name));
  auto member = [X, n, cell](int d, const Gen& g) {
    if (d == n && g == cell) return true;
    return X->member_nondeg(d, g);
  };
  SimplicialSet::FaceFn face = [X, n, cell, faces](int i, int d,
                                                   const Gen& g) {
    if (d == n && g == cell) return faces[static_cast<std::size_t>(i)];
    return X->face_nondeg(i, d, g);
  };
  SimplicialSet::BasisFn basis = nullptr;
  if (X->has_basis())
    basis = [X, n, cell](int d) {
      std::vector<Gen> out = X->basis(d);
      if (d == n) out.push_back(cell);
      return out;
    };
  SsPtr Xp = make_sset(X->kind() + "+" + name, member, face, basis,
                       X->base_point());

  // Effective homology: C(X') is the cone of the attaching chain map
  // Z[n-1] -> C(X) sending the disk boundary generator to d(cell).
  std::vector<Combination::Term> zt;
  for (int i = 0; i <= n; ++i) {
    const Simplex& fi = faces[static_cast<std::size_t>(i)];
    if (fi.degenerate()) continue;
    zt.emplace_back((i % 2 == 0) ? 1 : -1, fi.base);
  }
  Combination z = Combination::make(n - 1, std::move(zt));
  CxPtr CX = Xe.eq.canonical();
  if (!CX->diff(z).empty())
    throw std::invalid_argument("disk_pasting: attaching chain is not a cycle");

  Gen w = Gen::sym("bnd");
  CxPtr A = make_complex(
      "Disk-Boundary",
      [n, w](int d, const Gen& g) { return d == n - 1 && g == w; },
      [n](int d, const Gen&) { return Combination(d - 1); },
      [n, w](int d) {
        std::vector<Gen> out;
        if (d == n - 1) out.push_back(w);
        return out;
      });
  Morphism phi(A, CX, 0, [z](int, const Gen&) { return z; });
  Equivalence ce = cone_equivalence(phi, trivial_equivalence(A), Xe.eq);

  // Relabelling isomorphism C(X') ~ Cone(phi), packaged as a reduction.
  CxPtr NXp = nchains(Xp);
  CxPtr CN = ce.canonical();
  Morphism fi(NXp, CN, 0, [n, cell, w](int d, const Gen& g) {
    if (d == n && g == cell) return Combination(d, cone_src_gen(w));
    return Combination(d, cone_btm_gen(g));
  });
  Morphism gi(CN, NXp, 0, [n, cell, w](int d, const Gen& g) {
    if (is_cone_gen(g) && cone_is_src(g)) return Combination(d, cell);
    return Combination(d, cone_inner(g));
  });
  Reduction iso{NXp, CN, fi, gi, zero_morphism(NXp, NXp, 1)};
  return SpaceEq{Xp, reduction_then_equivalence(iso, ce)};
}

}  // namespace catk
