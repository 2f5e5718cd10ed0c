#pragma once
// The Whitehead tower: Hurewicz detection of the first nontrivial homology,
// fundamental cocycles read off the effective complex, the principal
// fibration killing one cyclic summand of the bottom homotopy group, and the
// iterated computation of homotopy groups.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "catk/em.hpp"
#include "catk/fib.hpp"

namespace catk {

// A cyclic-valued simplicial cocycle concentrated in one degree: eval is an
// algorithm on the level-simplices of the space, zero on degenerate ones,
// with values in Z (modulus 0) or Z/modulus.
struct Cocycle {
  SsPtr space;
  long long modulus = 0;
  int level = 0;
  std::function<long long(const Simplex&)> eval;
};

// One floor of the tower: a space with effective homology whose homology
// vanishes in degrees 1..killed_below, plus the groups recorded on the way.
struct TowerStage {
  SpaceEq space;
  int killed_below = 1;
  std::vector<std::pair<int, AbGroupFT>> history;
};

// Smallest degree >= 2 with nonzero homology, scanned on the effective
// complex; nullopt means contractible through the requested range.
inline std::optional<std::pair<int, AbGroupFT>> first_nontrivial(
    const SpaceEq& Xe, int max_degree) {
  CxPtr E = Xe.eq.effective();
  for (int n = 2; n <= max_degree; ++n) {
    AbGroupFT g = homology(E, n);
    if (!g.trivial()) return std::make_pair(n, g);
  }
  return std::nullopt;
}

namespace detail {

inline long long cyc_norm(long long m, long long a) {
  if (m == 0) return a;
  long long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace detail

// A cocycle representing the projection of n-th homology onto one declared
// cyclic summand (modulus 0 for a free factor, m >= 2 for a Z/m factor).
// The chain is mapped through the equivalence into the effective complex;
// there a functional built from the Smith decompositions of the two
// boundary matrices picks the homology coordinate of the summand and
// vanishes on boundaries, hence the coboundary of the pullback vanishes.
inline Cocycle fundamental_cocycle(const SpaceEq& Xe, int n,
                                   long long modulus) {
  CxPtr E = Xe.eq.effective();
  IntMatrix d_out = boundary_matrix(E, n);
  IntMatrix d_in = boundary_matrix(E, n + 1);
  SNFResult s = smith_normal_form(d_out);
  const int cols = d_out.cols();
  const int k = cols - s.rank;  // rank of the cycle lattice
  IntMatrix K = kernel_basis(s, cols);

  // express the boundary lattice in kernel coordinates and diagonalize
  SNFResult ks = smith_normal_form(K);
  IntMatrix X(k, d_in.cols());
  for (int j = 0; j < d_in.cols(); ++j) {
    std::vector<Int> col(d_in.rows(), 0);
    for (int i = 0; i < d_in.rows(); ++i) col[i] = d_in.get(i, j);
    auto x = solve_linear(ks, col);
    if (!x)
      throw std::runtime_error(
          "fundamental_cocycle: boundary outside the cycle lattice");
    for (int i = 0; i < k; ++i)
      if ((*x)[i] != 0) X.set(i, j, (*x)[i]);
  }
  SNFResult xs = smith_normal_form(X);

  // locate the requested summand among the invariant factors
  int pick = -1;
  if (modulus == 0) {
    if (xs.rank < k) pick = xs.rank;
  } else {
    for (int i = 0; i < xs.rank; ++i)
      if (xs.S.get(i, i) == modulus) {
        pick = i;
        break;
      }
  }
  if (pick < 0)
    throw std::invalid_argument(
        "fundamental_cocycle: H_" + std::to_string(n) + " has no " +
        (modulus == 0 ? std::string("Z") : "Z/" + std::to_string(modulus) +
                                               "Z") +
        " summand");

  // functional on E_n: project onto kernel coordinates (rows >= rank of the
  // column transform inverse), then take the picked row of xs.P
  std::vector<Gen> basis = E->basis(n);
  auto lam = std::make_shared<std::map<Gen, long long>>();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    Int v = 0;
    for (int t = 0; t < k; ++t)
      v += xs.P.get(pick, t) * s.Qinv.get(s.rank + t, static_cast<int>(j));
    if (modulus != 0) v %= Int(modulus);
    long long val = detail::cyc_norm(modulus, static_cast<long long>(v));
    if (val != 0) (*lam)[basis[j]] = val;
  }

  Equivalence eq = Xe.eq;
  long long m = modulus;
  auto eval = [eq, lam, m, n](const Simplex& x) -> long long {
    if (x.degenerate()) return 0;
    Combination cx(n, x.base);
    Combination top = eq.left.g(cx);
    Combination ce = eq.right.f(top);
    long long acc = 0;
    for (const auto& t : ce.terms()) {
      auto it = lam->find(t.second);
      if (it == lam->end()) continue;
      acc = detail::cyc_norm(
          m, acc + static_cast<long long>(t.first) * it->second);
    }
    return detail::cyc_norm(m, acc);
  };
  return Cocycle{Xe.space, modulus, n, std::move(eval)};
}

namespace detail {

// The simplicial map into K(pi, n) classified by an n-cocycle, computed one
// bar level at a time.  at(m, q, x) is the component of the image of a
// q-simplex x in K(pi, m); it lives in dimension q - (n - m).  The top
// component of a W-bar simplex is the next level down on the same simplex,
// the remaining components are forced by the d_0-face identity, which reads
// off an alternating face sum in the abelian group.
struct CocycleMap {
  SsPtr X;
  std::vector<SGrpPtr> groups;  // groups[j] = K(pi, j+1)
  long long modulus = 0;
  int n = 0;
  std::function<long long(const Simplex&)> zeta;
  std::map<std::tuple<int, int, Gen>, Simplex> memo;

  Simplex at(int m, int q, const Simplex& x) {
    const int d = q - (n - m);
    const SGrpPtr& G = groups[static_cast<std::size_t>(m) - 1];
    if (d <= 0) return G->neutral(0);
    auto key = std::make_tuple(m, q, simplex_gen(x));
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const int r = n - m;
    Simplex out{{}, Gen::sym("nil")};
    if (m == 1) {
      std::vector<long long> tuple;
      if (d == 1) {
        tuple.push_back(cyc_norm(modulus, zeta(x)));
      } else {
        Simplex pre = at(1, q - 1, apply_face(X, q, q, x));
        tuple = em_expand(pre);
        long long last = 0;
        for (int i = 0; i <= r; ++i) {
          Simplex fi = at(1, q - 1, apply_face(X, i, q, x));
          std::vector<long long> ti = em_expand(fi);
          long long v = ti.empty() ? 0 : ti.back();
          last += ((i + r) % 2 == 0) ? v : -v;
        }
        tuple.push_back(cyc_norm(modulus, last));
      }
      out = em_canonical(tuple);
    } else {
      const SimplicialGroup& H = *groups[static_cast<std::size_t>(m) - 2];
      Simplex first = at(m - 1, q, x);
      Simplex acc = G->neutral(d - 1);
      for (int i = 0; i <= r; ++i) {
        Simplex fi = at(m, q - 1, apply_face(X, i, q, x));
        if ((i + r) % 2 != 0) fi = G->inv(d - 1, fi);
        acc = G->mul(d - 1, acc, fi);
      }
      std::vector<Simplex> comps;
      comps.push_back(first);
      std::vector<Simplex> tail = wbar_expand(H, d - 1, acc);
      comps.insert(comps.end(), tail.begin(), tail.end());
      out = wbar_canonical(H, comps);
    }
    memo.emplace(std::move(key), out);
    return out;
  }
};

}  // namespace detail

// The twisting operator of the principal fibration classified by an
// n-cocycle: the pullback of the path fibration over K(pi, n) is the
// twisted product of the base with the fiber K(pi, n-1), twisted by the top
// bar component of the classifying map.  The returned fiber group carries
// its effective homology in the second slot.
inline std::pair<TwistingOperator, GroupEq> cocycle_twisting(
    const Cocycle& z) {
  if (z.level < 2)
    throw std::invalid_argument("cocycle_twisting: level must be >= 2");
  const int n = z.level;
  GroupEq geq = k_space_1(z.modulus);
  std::vector<SGrpPtr> groups{geq.grp};
  for (int j = 2; j <= n - 1; ++j) {
    geq = classifying_space_effective_homology(geq);
    groups.push_back(geq.grp);
  }
  auto cmap = std::make_shared<detail::CocycleMap>();
  cmap->X = z.space;
  cmap->groups = groups;
  cmap->modulus = z.modulus;
  cmap->n = n;
  cmap->zeta = z.eval;
  auto tau = [cmap, n](int q, const Simplex& b) {
    return cmap->at(n - 1, q, b);
  };
  return {TwistingOperator{z.space, groups.back(), tau}, geq};
}

inline TowerStage whitehead_fibration(const SpaceEq& Xe, const Cocycle& z) {
  auto [t, geq] = cocycle_twisting(z);
  const int n = z.level;
  Equivalence e = total_space_effective_homology(t, Xe.eq, geq.eq);
  TowerStage stage;
  stage.space = SpaceEq{twisted_product(t), e};
  stage.killed_below = n - 1;
  return stage;
}

// Homotopy groups via the tower: by Hurewicz, pi_n of a stage whose
// homology vanishes below n is H_n of that stage; each fibration kills one
// cyclic summand, free factors first, then torsion in invariant-factor
// order, until the degree is exhausted.
inline std::vector<std::pair<int, AbGroupFT>> homotopy_groups(
    const SpaceEq& Xe, int n_max, TowerStage* final_stage = nullptr) {
  TowerStage stage;
  stage.space = Xe;
  std::vector<std::pair<int, AbGroupFT>> out;
  for (int n = 2; n <= n_max; ++n) {
    AbGroupFT g = homology(stage.space.eq.effective(), n);
    out.emplace_back(n, g);
    stage.history.emplace_back(n, g);
    if (n == n_max) break;
    AbGroupFT cur = g;
    while (!cur.trivial()) {
      long long m = cur.free_rank > 0
                        ? 0
                        : static_cast<long long>(cur.torsion.front());
      Cocycle z = fundamental_cocycle(stage.space, n, m);
      TowerStage next = whitehead_fibration(stage.space, z);
      next.history = stage.history;
      stage = std::move(next);
      cur = homology(stage.space.eq.effective(), n);
    }
    stage.killed_below = n;
  }
  if (final_stage) *final_stage = stage;
  return out;
}

}  // namespace catk
