// Eilenberg-MacLane spaces for cyclic groups, their effective homology via
// discrete vector fields, the bar construction, and the classifying space.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "catk/fib.hpp"
#include "catk/sgrp.hpp"

namespace catk {

// --------------------------------------------------------------------------
// Discrete vector fields.
// --------------------------------------------------------------------------

// An admissible discrete vector field on a chain complex: every generator is
// critical, a source, or a target; each target t is matched with a source
// one degree up whose differential contains t with a unit coefficient.
struct VectorField {
  std::function<int(int, const Gen&)> role;  // 0 critical, 1 source, 2 target
  std::function<Gen(int, const Gen&)> source_of;  // target -> matched source
};

// Reduction onto the critical complex.  The homotopy follows the gradient
// paths of the field: h(t) = u - h(d u - t) with u the unit-normalized
// matched source of t, and h = 0 on sources and critical generators.
inline Reduction dvf_reduction(const CxPtr& C, const VectorField& vf,
                               ChainComplex::BasisFn critical_basis,
                               ChainComplex::SampleFn critical_sampler =
                                   nullptr) {
  auto role = vf.role;
  auto source_of = vf.source_of;

  // unit-normalized source: coefficient of t in d(matched source) is +-1
  auto matched = [C, source_of](int n, const Gen& t) {
    Gen s = source_of(n, t);
    Int k = C->diff_gen(n + 1, s).coefficient(t);
    if (k != 1 && k != -1)
      throw std::runtime_error(
          "dvf_reduction: non-unit incidence between a matched pair");
    return std::make_pair(k, s);
  };

  Morphism h(C, C, 1, [C, role, matched](int n, const Gen& g) -> Combination {
    if (role(n, g) != 2) return Combination(n + 1);
    // iterative gradient-path expansion of h(g)
    Combination acc(n + 1);
    Combination pending(n, g);
    while (!pending.empty()) {
      Combination next(n);
      for (const auto& t : pending.terms()) {
        if (role(n, t.second) != 2) continue;
        auto [k, s] = matched(n, t.second);
        Int c = t.first * k;
        acc = cmb_combine(1, acc, c, Combination(n + 1, s));
        // remaining targets of d(u) beyond t itself, with the sign flipped
        Combination du = cmb_scale(k, C->diff_gen(n + 1, s));
        next = cmb_combine(1, next, -t.first,
                           cmb_sub(du, Combination(n, t.second)));
      }
      pending = next;
    }
    return acc;
  }, homotopy_cache_budget());

  auto pi = [C, h](const Combination& x) {
    // 1 - d h - h d
    Combination y = cmb_sub(x, C->diff(h(x)));
    return cmb_sub(y, h(C->diff(x)));
  };

  Morphism f_raw(C, C, 0, [role, pi](int n, const Gen& g) {
    Combination p = pi(Combination(n, g));
    std::vector<Combination::Term> terms;
    for (const auto& t : p.terms())
      if (role(n, t.second) == 0) terms.emplace_back(t.first, t.second);
    return Combination::make(n, std::move(terms));
  });

  CxPtr bottom = make_complex(
      C->kind() + "/dvf",
      [role](int n, const Gen& g) { return role(n, g) == 0; },
      [C, f_raw](int n, const Gen& g) { return f_raw(C->diff_gen(n, g)); },
      std::move(critical_basis), std::move(critical_sampler));

  Morphism f(C, bottom, 0,
             [f_raw](int n, const Gen& g) { return f_raw(n, g); });
  Morphism g(bottom, C, 0, [pi](int n, const Gen& x) {
    return pi(Combination(n, x));
  });
  return Reduction{C, bottom, f, g, h};
}

// --------------------------------------------------------------------------
// Bar-model K(pi,1) for cyclic pi.
// --------------------------------------------------------------------------

namespace detail {

inline Gen em_tuple_gen(const std::vector<long long>& t) {
  std::vector<Gen> is;
  is.reserve(t.size() + 1);
  is.push_back(Gen::sym("em"));
  for (long long a : t) is.push_back(Gen::num(a));
  return Gen::list(std::move(is));
}

inline bool is_em_tuple(const Gen& g) {
  return g.kind() == 2 && !g.items().empty() && g.items()[0].is_sym("em");
}

inline std::vector<long long> em_tuple(const Gen& g) {
  std::vector<long long> t;
  for (std::size_t k = 1; k < g.items().size(); ++k)
    t.push_back(g.items()[k].num_value());
  return t;
}

// Canonical form of an arbitrary tuple: zero entries become degeneracies.
inline Simplex em_canonical(const std::vector<long long>& t) {
  std::vector<int> dgs;
  std::vector<long long> base;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] != 0) base.push_back(t[k]);
  for (int k = static_cast<int>(t.size()) - 1; k >= 0; --k)
    if (t[static_cast<std::size_t>(k)] == 0) dgs.push_back(k);
  std::sort(dgs.rbegin(), dgs.rend());
  return Simplex{std::move(dgs), em_tuple_gen(base)};
}

// Full tuple of a (possibly degenerate) simplex of the bar model.
inline std::vector<long long> em_expand(const Simplex& s) {
  std::vector<long long> t = em_tuple(s.base);
  for (auto it = s.dgs.rbegin(); it != s.dgs.rend(); ++it)
    t.insert(t.begin() + *it, 0);
  return t;
}

}  // namespace detail

// K(pi,1) for pi = Z (m == 0) or Z/m (m >= 2): q-simplices are q-tuples of
// group elements, d_0/d_q drop an end, inner faces add adjacent entries,
// degeneracies insert the neutral element.
inline SGrpPtr em_group_1(long long m) {
  using namespace detail;
  if (m == 1 || m < 0)
    throw std::invalid_argument("k_space: modulus must be 0 (Z) or >= 2");
  auto norm = [m](long long a) {
    if (m == 0) return a;
    long long r = a % m;
    return r < 0 ? r + m : r;
  };
  auto member = [m, norm](int q, const Gen& g) {
    if (!is_em_tuple(g)) return false;
    std::vector<long long> t = em_tuple(g);
    if (static_cast<int>(t.size()) != q) return false;
    for (long long a : t)
      if (a == 0 || norm(a) != a || (m != 0 && (a < 1 || a > m - 1)))
        return false;
    return true;
  };
  SimplicialSet::FaceFn face = [norm](int i, int q, const Gen& g) {
    std::vector<long long> t = em_tuple(g);
    if (i == 0) {
      t.erase(t.begin());
    } else if (i == q) {
      t.pop_back();
    } else {
      t[static_cast<std::size_t>(i) - 1] =
          norm(t[static_cast<std::size_t>(i) - 1] +
               t[static_cast<std::size_t>(i)]);
      t.erase(t.begin() + i);
    }
    return em_canonical(t);
  };
  SimplicialSet::BasisFn basis = nullptr;
  if (m != 0)
    basis = [m](int q) {
      std::vector<Gen> out;
      std::vector<long long> t(static_cast<std::size_t>(q), 1);
      if (q == 0) {
        out.push_back(em_tuple_gen(t));
        return out;
      }
      for (;;) {
        out.push_back(em_tuple_gen(t));
        int k = q - 1;
        while (k >= 0 && t[static_cast<std::size_t>(k)] == m - 1) --k;
        if (k < 0) break;
        ++t[static_cast<std::size_t>(k)];
        for (int j = k + 1; j < q; ++j) t[static_cast<std::size_t>(j)] = 1;
      }
      return out;
    };
  SimplicialSet::SampleFn sampler = [m](int q, int count, Rng& rng) {
    std::vector<Gen> out;
    for (int c = 0; c < count; ++c) {
      std::vector<long long> t;
      for (int k = 0; k < q; ++k) {
        long long a;
        if (m == 0) {
          a = static_cast<long long>(rng() % 7) - 3;
          if (a == 0) a = 1;
        } else {
          a = 1 + static_cast<long long>(rng() % static_cast<unsigned>(m - 1));
        }
        t.push_back(a);
      }
      out.push_back(em_tuple_gen(t));
    }
    return out;
  };
  std::string kind = (m == 0) ? "K-Z-1" : "K-Z" + std::to_string(m) + "-1";
  SsPtr set = make_sset(kind, member, face, basis, em_tuple_gen({}), sampler);

  auto grp = std::make_shared<SimplicialGroup>();
  grp->set = set;
  grp->mul = [norm](int q, const Simplex& a, const Simplex& b) {
    std::vector<long long> ta = em_expand(a), tb = em_expand(b);
    for (int k = 0; k < q; ++k)
      ta[static_cast<std::size_t>(k)] =
          norm(ta[static_cast<std::size_t>(k)] + tb[static_cast<std::size_t>(k)]);
    return em_canonical(ta);
  };
  grp->inv = [norm](int, const Simplex& a) {
    std::vector<long long> t = em_expand(a);
    for (long long& x : t) x = norm(-x);
    return em_canonical(t);
  };
  return grp;
}

// Discrete vector field reducing the bar model of K(Z,1) to the circle
// complex (generators [] and (1), zero differential): tuples starting with
// an entry 1 are sources, all other nonempty tuples besides (1) are targets.
inline VectorField em_z_field() {
  using namespace detail;
  VectorField vf;
  vf.role = [](int n, const Gen& g) {
    std::vector<long long> t = em_tuple(g);
    if (n == 0) return 0;
    if (t[0] == 1) return (n == 1) ? 0 : 1;
    return 2;
  };
  vf.source_of = [](int, const Gen& g) {
    std::vector<long long> t = em_tuple(g);
    std::vector<long long> s;
    s.push_back(1);
    if (t[0] >= 2) {
      s.push_back(t[0] - 1);
    } else {
      s.push_back(t[0]);
    }
    s.insert(s.end(), t.begin() + 1, t.end());
    return em_tuple_gen(s);
  };
  return vf;
}

// For K(Z/m,1): scan the maximal prefix of the periodic pattern
// (1, m-1, 1, m-1, ...); full-pattern tuples are critical (one per
// dimension), tuples breaking the pattern at an odd position are sources and
// at an even position targets.
inline VectorField em_zm_field(long long m) {
  using namespace detail;
  auto prefix_len = [m](const std::vector<long long>& t) {
    std::size_t k = 0;
    while (k < t.size() && t[k] == ((k % 2 == 0) ? 1 : m - 1)) ++k;
    return k;
  };
  VectorField vf;
  vf.role = [prefix_len](int n, const Gen& g) {
    std::vector<long long> t = em_tuple(g);
    std::size_t k = prefix_len(t);
    if (k == static_cast<std::size_t>(n)) return 0;
    return (k % 2 == 1) ? 1 : 2;
  };
  vf.source_of = [prefix_len](int, const Gen& g) {
    std::vector<long long> t = em_tuple(g);
    std::size_t k = prefix_len(t);
    std::vector<long long> s(t.begin(), t.begin() + static_cast<long>(k));
    s.push_back(1);
    s.push_back(t[k] - 1);
    s.insert(s.end(), t.begin() + static_cast<long>(k) + 1, t.end());
    return em_tuple_gen(s);
  };
  return vf;
}

inline GroupEq k_space_1(long long m) {
  using namespace detail;
  SGrpPtr grp = em_group_1(m);
  CxPtr C = nchains(grp->set);
  VectorField vf = (m == 0) ? em_z_field() : em_zm_field(m);
  ChainComplex::BasisFn crit;
  if (m == 0) {
    crit = [](int n) {
      std::vector<Gen> out;
      if (n == 0) out.push_back(em_tuple_gen({}));
      if (n == 1) out.push_back(em_tuple_gen({1}));
      return out;
    };
  } else {
    crit = [m](int n) {
      std::vector<long long> t;
      for (int k = 0; k < n; ++k) t.push_back(k % 2 == 0 ? 1 : m - 1);
      return std::vector<Gen>{em_tuple_gen(t)};
    };
  }
  Reduction r = dvf_reduction(C, vf, crit);
  return GroupEq{grp, equivalence_from_right_reduction(r)};
}

// --------------------------------------------------------------------------
// Bar words.
// --------------------------------------------------------------------------

namespace detail {

// A bar word [a_1|...|a_k]: letters are generators of degree >= 1 of the
// underlying complex; the letter (d, x) contributes d+1 to the word degree.
inline Gen word_gen(const std::vector<std::pair<int, Gen>>& letters) {
  std::vector<Gen> items;
  items.reserve(letters.size() + 1);
  items.push_back(Gen::sym("bw"));
  for (const auto& [d, x] : letters)
    items.push_back(Gen::list_of(Gen::num(d), x));
  return Gen::list(std::move(items));
}

inline bool is_word_gen(const Gen& g) {
  return g.kind() == 2 && !g.items().empty() && g.items()[0].is_sym("bw");
}

inline std::vector<std::pair<int, Gen>> word_letters(const Gen& g) {
  std::vector<std::pair<int, Gen>> out;
  for (std::size_t k = 1; k < g.items().size(); ++k) {
    const Gen& l = g.items()[k];
    out.emplace_back(static_cast<int>(l.items()[0].num_value()),
                     l.items()[1]);
  }
  return out;
}

inline int word_degree(const std::vector<std::pair<int, Gen>>& ls) {
  int n = 0;
  for (const auto& l : ls) n += l.first + 1;
  return n;
}

// Internal part of the bar differential: the letter differential with the
// suspension sign, - (-1)^{w_<i} [..|da_i|..].
inline Combination words_internal_diff(const CxPtr& C, int n, const Gen& g) {
  std::vector<std::pair<int, Gen>> ls = word_letters(g);
  std::vector<Combination::Term> terms;
  int before = 0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    auto [d, x] = ls[i];
    if (d >= 2) {
      Int sign = (before % 2 == 0) ? -1 : 1;
      const Combination& dx = C->diff_gen(d, x);
      for (const auto& t : dx.terms()) {
        std::vector<std::pair<int, Gen>> nl = ls;
        nl[i] = {d - 1, t.second};
        terms.emplace_back(sign * t.first, word_gen(nl));
      }
    }
    before += d + 1;
  }
  return Combination::make(n - 1, std::move(terms));
}

// Concatenation part: (-1)^{w_<=i} [..|a_i a_{i+1}|..].
using ProductFn = std::function<Combination(int, const Gen&, int, const Gen&)>;

inline Combination words_merge_diff(const ProductFn& mul, int n,
                                    const Gen& g) {
  std::vector<std::pair<int, Gen>> ls = word_letters(g);
  std::vector<Combination::Term> terms;
  int upto = 0;
  for (std::size_t i = 0; i + 1 < ls.size(); ++i) {
    auto [d1, x1] = ls[i];
    auto [d2, x2] = ls[i + 1];
    upto += d1 + 1;
    Int sign = (upto % 2 == 0) ? 1 : -1;
    Combination prod = mul(d1, x1, d2, x2);
    for (const auto& t : prod.terms()) {
      std::vector<std::pair<int, Gen>> nl;
      nl.insert(nl.end(), ls.begin(), ls.begin() + static_cast<long>(i));
      nl.emplace_back(d1 + d2, t.second);
      nl.insert(nl.end(), ls.begin() + static_cast<long>(i) + 2, ls.end());
      terms.emplace_back(sign * t.first, word_gen(nl));
    }
  }
  return Combination::make(n - 1, std::move(terms));
}

inline bool words_member(const CxPtr& C, int n, const Gen& g) {
  if (!is_word_gen(g)) return false;
  int total = 0;
  for (std::size_t k = 1; k < g.items().size(); ++k) {
    const Gen& l = g.items()[k];
    if (l.kind() != 2 || l.items().size() != 2) return false;
    int d = static_cast<int>(l.items()[0].num_value());
    if (d < 1 || !C->member(d, l.items()[1])) return false;
    total += d + 1;
  }
  return total == n;
}

inline std::vector<Gen> words_basis(const CxPtr& C, int n) {
  std::vector<Gen> out;
  std::vector<std::pair<int, Gen>> cur;
  std::function<void(int)> rec = [&](int rem) {
    if (rem == 0) {
      out.push_back(word_gen(cur));
      return;
    }
    for (int w = 2; w <= rem; ++w) {
      if (rem - w == 1) continue;  // no letter of weight 1 can finish
      for (const Gen& x : C->basis(w - 1)) {
        cur.emplace_back(w - 1, x);
        rec(rem - w);
        cur.pop_back();
      }
    }
  };
  if (n >= 0) rec(n);
  return out;
}

inline std::vector<Gen> words_sample(const CxPtr& C, int n, int count,
                                     Rng& rng) {
  std::vector<Gen> out;
  for (int c = 0; c < count; ++c) {
    std::vector<std::pair<int, Gen>> ls;
    int rem = n;
    bool ok = true;
    while (rem > 0) {
      if (rem == 1) { ok = false; break; }
      int w = 2 + static_cast<int>(rng() % static_cast<unsigned>(rem - 1));
      if (rem - w == 1) w = rem;
      std::vector<Gen> xs = C->sample(w - 1, 1, rng);
      if (xs.empty()) { ok = false; break; }
      ls.emplace_back(w - 1, xs[0]);
      rem -= w;
    }
    if (ok) out.push_back(word_gen(ls));
  }
  return out;
}

}  // namespace detail

// The underlying complex of bar words over C with the internal differential
// only (no products): the tensor "cofree" part shared by the bar
// construction and its perturbed variants.
inline CxPtr words_complex(const CxPtr& C, const std::string& tag) {
  using namespace detail;
  ChainComplex::BasisFn basis = nullptr;
  if (C->effective())
    basis = [C](int n) { return words_basis(C, n); };
  ChainComplex::SampleFn sampler = nullptr;
  if (C->has_sampler() || C->effective())
    sampler = [C](int n, int count, Rng& rng) {
      return words_sample(C, n, count, rng);
    };
  return make_complex(
      tag, [C](int n, const Gen& g) { return words_member(C, n, g); },
      [C](int n, const Gen& g) { return words_internal_diff(C, n, g); },
      std::move(basis), std::move(sampler));
}

// Reduced bar construction of a connected algebra: words over the degree
// >= 1 part, differential = internal part + concatenation via the product.
inline CxPtr bar_construction(const CxPtr& A, const detail::ProductFn& mul) {
  using namespace detail;
  ChainComplex::BasisFn basis = nullptr;
  if (A->effective())
    basis = [A](int n) { return words_basis(A, n); };
  ChainComplex::SampleFn sampler = nullptr;
  if (A->has_sampler() || A->effective())
    sampler = [A](int n, int count, Rng& rng) {
      return words_sample(A, n, count, rng);
    };
  return make_complex(
      "Bar(" + A->kind() + ")",
      [A](int n, const Gen& g) { return words_member(A, n, g); },
      [A, mul](int n, const Gen& g) {
        return cmb_add(words_internal_diff(A, n, g),
                       words_merge_diff(mul, n, g));
      },
      std::move(basis), std::move(sampler));
}

namespace detail {

// Distribute per-letter images over a word: the letters are replaced by all
// combinations of terms of `imgs`, degrees taken from the images.
inline Combination words_distribute(
    int out_degree, const std::vector<std::pair<int, Combination>>& imgs) {
  std::vector<Combination::Term> terms;
  std::vector<std::pair<int, Gen>> cur(imgs.size(), {0, Gen::num(0)});
  std::function<void(std::size_t, Int)> rec = [&](std::size_t i, Int coef) {
    if (i == imgs.size()) {
      terms.emplace_back(coef, word_gen(cur));
      return;
    }
    for (const auto& t : imgs[i].second.terms()) {
      cur[i] = {imgs[i].first, t.second};
      rec(i + 1, coef * t.first);
    }
  };
  rec(0, 1);
  return Combination::make(out_degree, std::move(terms));
}

}  // namespace detail

// Letter-wise tensor power of a reduction, acting word by word: f and g map
// every letter, h replaces one letter by its homotopy image and the letters
// before it by their g f images, with the suspension Koszul sign.
inline Reduction words_reduction(const Reduction& rho, const CxPtr& topW,
                                 const CxPtr& bottomW) {
  using namespace detail;
  Reduction r = rho;
  auto map_all = [](const Morphism& m, int n, const Gen& g) {
    std::vector<std::pair<int, Combination>> imgs;
    for (const auto& [d, x] : word_letters(g))
      imgs.emplace_back(d, m(d, Gen(x)));
    return words_distribute(n, imgs);
  };
  Morphism f(topW, bottomW, 0, [r, map_all](int n, const Gen& g) {
    return map_all(r.f, n, g);
  });
  Morphism g(bottomW, topW, 0, [r, map_all](int n, const Gen& g_) {
    return map_all(r.g, n, g_);
  });
  Morphism h(topW, topW, 1, [r](int n, const Gen& g_) {
    std::vector<std::pair<int, Gen>> ls = word_letters(g_);
    Combination acc(n + 1);
    int before = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      std::vector<std::pair<int, Combination>> imgs;
      for (std::size_t j = 0; j < i; ++j) {
        Combination fx = r.f(ls[j].first, ls[j].second);
        imgs.emplace_back(ls[j].first, r.g(fx));
      }
      imgs.emplace_back(ls[i].first + 1, r.h(ls[i].first, ls[i].second));
      for (std::size_t j = i + 1; j < ls.size(); ++j)
        imgs.emplace_back(ls[j].first, Combination(ls[j].first, ls[j].second));
      // the letters carry the negated (suspended) differential, so the
      // letter homotopy is negated as well
      Int sign = (before % 2 == 0) ? -1 : 1;
      acc = cmb_combine(1, acc, sign, words_distribute(n + 1, imgs));
      before += ls[i].first + 1;
    }
    return acc;
  }, homotopy_cache_budget());
  return Reduction{topW, bottomW, f, g, h};
}

// --------------------------------------------------------------------------
// The classifying space W-bar of a simplicial abelian group.
// --------------------------------------------------------------------------

namespace detail {

// A q-simplex of Wbar(G) is a tuple (g_{q-1}, ..., g_0) with g_j in G_j,
// stored top component first.
inline Gen wbar_gen(const std::vector<Simplex>& comps) {
  std::vector<Gen> items;
  items.reserve(comps.size() + 1);
  items.push_back(Gen::sym("wbar"));
  for (const Simplex& c : comps) items.push_back(simplex_gen(c));
  return Gen::list(std::move(items));
}

inline bool is_wbar_gen(const Gen& g) {
  return g.kind() == 2 && !g.items().empty() && g.items()[0].is_sym("wbar");
}

inline std::vector<Simplex> wbar_comps(const Gen& g) {
  std::vector<Simplex> out;
  for (std::size_t k = 1; k < g.items().size(); ++k)
    out.push_back(gen_simplex(g.items()[k]));
  return out;
}

// d_i on a full tuple: shift faces above the cut, multiply across it.
inline std::vector<Simplex> wbar_face_comps(const SimplicialGroup& G, int i,
                                            const std::vector<Simplex>& c) {
  const SsPtr& S = G.set;
  int q = static_cast<int>(c.size());
  std::vector<Simplex> out;
  if (i == 0) {
    out.assign(c.begin() + 1, c.end());
    return out;
  }
  if (i == q) {
    for (int k = 0; k + 1 < q; ++k)
      out.push_back(apply_face(S, q - 1 - k, q - 1 - k,
                               c[static_cast<std::size_t>(k)]));
    return out;
  }
  for (int k = 0; k <= i - 2; ++k)
    out.push_back(apply_face(S, i - 1 - k, q - 1 - k,
                             c[static_cast<std::size_t>(k)]));
  Simplex front = apply_face(S, 0, q - i, c[static_cast<std::size_t>(i) - 1]);
  out.push_back(G.mul(q - 1 - i, front, c[static_cast<std::size_t>(i)]));
  out.insert(out.end(), c.begin() + i + 1, c.end());
  return out;
}

// s_i on a full tuple: degenerate above the cut, insert a neutral element.
inline std::vector<Simplex> wbar_degen_comps(const SimplicialGroup& G, int i,
                                             const std::vector<Simplex>& c) {
  int q = static_cast<int>(c.size());
  std::vector<Simplex> out;
  for (int k = 0; k < i; ++k)
    out.push_back(apply_degen(i - 1 - k, c[static_cast<std::size_t>(k)]));
  out.push_back(G.neutral(q - i));
  out.insert(out.end(), c.begin() + i, c.end());
  return out;
}

// Canonical form of a tuple: strip degeneracies with the Eilenberg-Zilber
// criterion x = s_i d_i x, outermost first.
inline Simplex wbar_canonical(const SimplicialGroup& G,
                              std::vector<Simplex> c) {
  std::vector<int> ops;
  bool found = true;
  while (found) {
    found = false;
    int q = static_cast<int>(c.size());
    for (int i = q - 1; i >= 0; --i) {
      std::vector<Simplex> y = wbar_face_comps(G, i, c);
      if (wbar_degen_comps(G, i, y) == c) {
        c = std::move(y);
        ops.push_back(i);
        found = true;
        break;
      }
    }
  }
  std::vector<int> dgs;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it)
    dgs = degen_insert(dgs, *it);
  return Simplex{std::move(dgs), wbar_gen(c)};
}

inline std::vector<Simplex> wbar_expand(const SimplicialGroup& G, int,
                                        const Simplex& s) {
  std::vector<Simplex> c = wbar_comps(s.base);
  for (auto it = s.dgs.rbegin(); it != s.dgs.rend(); ++it)
    c = wbar_degen_comps(G, *it, c);
  return c;
}

}  // namespace detail

// The classifying space of an abelian simplicial group, again an abelian
// simplicial group; tau (first component) twists the contractible total
// space WG = WbarG x_tau G.
inline SGrpPtr wbar_group(const SGrpPtr& Gp) {
  using namespace detail;
  const SsPtr S = Gp->set;
  auto member = [Gp, S](int q, const Gen& g) {
    if (!is_wbar_gen(g) ||
        static_cast<int>(g.items().size()) != q + 1)
      return false;
    std::vector<Simplex> c = wbar_comps(g);
    for (int k = 0; k < q; ++k)
      if (!sset_member(S, q - 1 - k, c[static_cast<std::size_t>(k)]))
        return false;
    for (int i = 0; i < q; ++i)
      if (wbar_degen_comps(*Gp, i, wbar_face_comps(*Gp, i, c)) == c)
        return false;
    return true;
  };
  SimplicialSet::FaceFn face = [Gp](int i, int, const Gen& g) {
    return wbar_canonical(*Gp, wbar_face_comps(*Gp, i, wbar_comps(g)));
  };
  SimplicialSet::BasisFn basis = nullptr;
  if (S->has_basis()) {
    basis = [Gp, S](int q) {
      std::vector<Gen> out;
      std::vector<Simplex> cur;
      std::function<void(int)> rec = [&](int k) {
        if (k == q) {
          Gen g = detail::wbar_gen(cur);
          bool nondeg = true;
          for (int i = 0; i < q && nondeg; ++i)
            if (detail::wbar_degen_comps(
                    *Gp, i, detail::wbar_face_comps(*Gp, i, cur)) == cur)
              nondeg = false;
          if (nondeg) out.push_back(g);
          return;
        }
        for (const Simplex& s : all_simplices(S, q - 1 - k)) {
          cur.push_back(s);
          rec(k + 1);
          cur.pop_back();
        }
      };
      rec(0);
      return out;
    };
  }
  SimplicialSet::SampleFn sampler = nullptr;
  if (S->has_sampler() || S->has_basis()) {
    sampler = [Gp, S](int q, int count, Rng& rng) {
      std::vector<Gen> out;
      for (int c = 0; c < count; ++c) {
        std::vector<Simplex> comps;
        for (int k = 0; k < q; ++k) {
          int dd = q - 1 - k;
          int bd = static_cast<int>(rng() % static_cast<unsigned>(dd + 1));
          std::vector<Gen> xs = S->sample_nondeg(bd, 1, rng);
          Simplex s = xs.empty() ? point_simplex(S->base_point(), dd)
                                 : Simplex{{}, xs[0]};
          // lift to dimension dd with a random decreasing degeneracy subset
          std::vector<int> dgs;
          int need = dd - bd;
          for (int v = dd - 1; v >= 0 && need > 0; --v)
            if (static_cast<int>(rng() % static_cast<unsigned>(v + 1)) <
                need) {
              dgs.push_back(v);
              --need;
            }
          s.dgs = dgs;
          comps.push_back(s);
        }
        Simplex w = detail::wbar_canonical(*Gp, comps);
        if (!w.degenerate()) out.push_back(w.base);
      }
      return out;
    };
  }
  SsPtr set = make_sset("Wbar(" + S->kind() + ")", member, face,
                        std::move(basis), detail::wbar_gen({}),
                        std::move(sampler));
  auto grp = std::make_shared<SimplicialGroup>();
  grp->set = set;
  grp->mul = [Gp](int q, const Simplex& a, const Simplex& b) {
    std::vector<Simplex> ca = detail::wbar_expand(*Gp, q, a);
    std::vector<Simplex> cb = detail::wbar_expand(*Gp, q, b);
    for (int k = 0; k < q; ++k)
      ca[static_cast<std::size_t>(k)] =
          Gp->mul(q - 1 - k, ca[static_cast<std::size_t>(k)],
                  cb[static_cast<std::size_t>(k)]);
    return detail::wbar_canonical(*Gp, ca);
  };
  grp->inv = [Gp](int q, const Simplex& a) {
    std::vector<Simplex> c = detail::wbar_expand(*Gp, q, a);
    for (int k = 0; k < q; ++k)
      c[static_cast<std::size_t>(k)] =
          Gp->inv(q - 1 - k, c[static_cast<std::size_t>(k)]);
    return detail::wbar_canonical(*Gp, c);
  };
  return grp;
}

// The universal twisting of the principal fibration G -> WG -> WbarG.
inline TwistingOperator wbar_twist(const SGrpPtr& Gp, const SsPtr& wbar_set) {
  return TwistingOperator{
      wbar_set, Gp, [Gp](int q, const Simplex& b) {
        return detail::wbar_expand(*Gp, q, b)[0];
      }};
}

// The Pontryagin product on the normalized chains of a simplicial group:
// shuffle into the product, then multiply.
inline detail::ProductFn pontryagin_product(const SGrpPtr& Gp) {
  return [Gp](int p, const Gen& a, int q, const Gen& b) {
    int n = p + q;
    std::vector<Combination::Term> terms;
    std::vector<int> B(static_cast<std::size_t>(q));
    std::function<void(int, int)> rec = [&](int start, int need) {
      if (need == 0) {
        std::vector<int> A;
        for (int t = 0; t < n; ++t)
          if (std::find(B.begin(), B.end(), t) == B.end()) A.push_back(t);
        long inv = 0;
        for (int x : A)
          for (int y : B)
            if (x > y) ++inv;
        std::vector<int> db(B.rbegin(), B.rend());
        std::vector<int> da(A.rbegin(), A.rend());
        Simplex m = Gp->mul(n, Simplex{db, a}, Simplex{da, b});
        if (!m.degenerate())
          terms.emplace_back((inv % 2 == 0) ? 1 : -1, m.base);
        return;
      }
      for (int t = start; t < n; ++t) {
        B[static_cast<std::size_t>(q - need)] = t;
        rec(t + 1, need - 1);
      }
    };
    rec(0, q);
    return Combination::make(n, std::move(terms));
  };
}

// --------------------------------------------------------------------------
// Effective homology of the classifying space.
// --------------------------------------------------------------------------

// The complex with a single generator in degree zero.
inline CxPtr point_complex() {
  return make_complex(
      "Point", [](int n, const Gen& g) { return n == 0 && g.is_sym("pt"); },
      [](int n, const Gen&) { return Combination(n - 1); },
      [](int n) {
        std::vector<Gen> out;
        if (n == 0) out.push_back(Gen::sym("pt"));
        return out;
      });
}

namespace detail {

// A generator of the bar complex over the Pontryagin algebra A = C(G) with
// coefficients in the twisted tensor product M1 = C(WbarG) (x)_t A:
// (clw p w r a word) is (w (x) a) (x) [word], degree p + r + |word|.
inline Gen clw_gen(int p, const Gen& w, int r, const Gen& a,
                   const Gen& word) {
  return Gen::list_of(Gen::sym("clw"), Gen::num(p), w, Gen::num(r), a, word);
}

inline bool is_clw_gen(const Gen& g) {
  return g.kind() == 2 && g.items().size() == 6 && g.items()[0].is_sym("clw");
}

struct ClwParts {
  int p;
  Gen w;
  int r;
  Gen a;
  Gen word;
};

inline ClwParts clw_parts(const Gen& g) {
  return ClwParts{static_cast<int>(g.items()[1].num_value()), g.items()[2],
                  static_cast<int>(g.items()[3].num_value()), g.items()[4],
                  g.items()[5]};
}

// Bar part of the differential: internal and merging terms inside the word
// plus the cap term multiplying the coefficient by the first letter, all
// with the Koszul sign of the coefficient degree p + r in front.
inline Combination clw_bar_diff(const CxPtr& A, const ProductFn& mul, int n,
                                const ClwParts& c) {
  int W = n - c.p - c.r;
  Int s = ((c.p + c.r) % 2 == 0) ? 1 : -1;
  std::vector<Combination::Term> terms;
  Combination dw = cmb_add(words_internal_diff(A, W, c.word),
                           words_merge_diff(mul, W, c.word));
  for (const auto& t : dw.terms())
    terms.emplace_back(s * t.first, clw_gen(c.p, c.w, c.r, c.a, t.second));
  std::vector<std::pair<int, Gen>> ls = word_letters(c.word);
  if (!ls.empty()) {
    Combination prod = mul(c.r, c.a, ls[0].first, ls[0].second);
    Gen rest = word_gen({ls.begin() + 1, ls.end()});
    for (const auto& t : prod.terms())
      terms.emplace_back(s * t.first,
                         clw_gen(c.p, c.w, c.r + ls[0].first, t.second, rest));
  }
  return Combination::make(n - 1, std::move(terms));
}

}  // namespace detail

// Effective homology of the classifying space of a 0-reduced abelian
// simplicial group given with its own effective homology.  The bar complex
// over the Pontryagin algebra A = C(G) with coefficients in the twisted
// tensor product M1 = C(WbarG) (x)_t A carries two reductions: collapsing
// the acyclic coefficient-free bar part gives C(WbarG); collapsing the
// contractible M1 (chains of the total space WG) gives the reduced bar
// construction of A, which is then made effective letter by letter.
inline GroupEq classifying_space_effective_homology(const GroupEq& geq) {
  using namespace detail;
  const SGrpPtr& G = geq.grp;
  const Equivalence& eG = geq.eq;
  SGrpPtr WB = wbar_group(G);
  SsPtr Ws = WB->set;
  CxPtr CW = nchains(Ws);
  CxPtr A = eG.canonical();
  ProductFn mul = pontryagin_product(G);

  // twisted Eilenberg-Zilber for the universal bundle G -> WG -> WbarG
  Reduction tez = twisted_ez_reduction(wbar_twist(G, Ws));
  CxPtr CWG = tez.top;
  CxPtr M1 = tez.bottom;

  Gen e0 = G->set->base_point();
  Gen empty_word = word_gen({});
  auto member = [CW, A](int n, const Gen& g) {
    if (!is_clw_gen(g)) return false;
    ClwParts c = clw_parts(g);
    int W = n - c.p - c.r;
    if (c.p < 0 || c.r < 0 || W < 0) return false;
    return CW->member(c.p, c.w) && A->member(c.r, c.a) &&
           words_member(A, W, c.word);
  };
  auto diff_full = [A, M1, mul](int n, const Gen& g) {
    ClwParts c = clw_parts(g);
    Combination out = clw_bar_diff(A, mul, n, c);
    Combination dm = M1->diff_gen(c.p + c.r, tensor_gen(c.p, c.w, c.a));
    std::vector<Combination::Term> terms;
    for (const auto& t : dm.terms()) {
      int pp = tensor_left_degree(t.second);
      terms.emplace_back(t.first,
                         clw_gen(pp, tensor_left(t.second),
                                 c.p + c.r - 1 - pp, tensor_right(t.second),
                                 c.word));
    }
    return cmb_add(out, Combination::make(n - 1, std::move(terms)));
  };
  ChainComplex::SampleFn sampler = nullptr;
  if (CW->has_sampler() && A->has_sampler())
    sampler = [CW, A](int n, int count, Rng& rng) {
      std::vector<Gen> out;
      for (int k = 0; k < count; ++k) {
        int p = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
        int r = static_cast<int>(rng() % static_cast<unsigned>(n - p + 1));
        int W = n - p - r;
        if (W == 1) continue;
        std::vector<Gen> ws = CW->sample(p, 1, rng);
        std::vector<Gen> as = A->sample(r, 1, rng);
        if (ws.empty() || as.empty()) continue;
        Gen word = word_gen({});
        if (W > 0) {
          std::vector<Gen> wd = words_sample(A, W, 1, rng);
          if (wd.empty()) continue;
          word = wd[0];
        }
        out.push_back(clw_gen(p, ws[0], r, as[0], word));
      }
      return out;
    };
  CxPtr D = make_complex("ClBar[" + Ws->kind() + "]", member, diff_full,
                         nullptr, std::move(sampler));

  // First reduction: forget the twist on M1, contract the acyclic bar part
  // onto C(WbarG), then perturb back.  The perturbation lowers the base
  // degree by at least two (G is 0-reduced), the contraction preserves it,
  // and the induced bottom perturbation vanishes for the same reason.
  auto diff_base1 = [CW, A, mul](int n, const Gen& g) {
    ClwParts c = clw_parts(g);
    Combination out = clw_bar_diff(A, mul, n, c);
    std::vector<Combination::Term> terms;
    Combination dw = CW->diff_gen(c.p, c.w);
    for (const auto& t : dw.terms())
      terms.emplace_back(t.first,
                         clw_gen(c.p - 1, t.second, c.r, c.a, c.word));
    Int sp = (c.p % 2 == 0) ? 1 : -1;
    Combination da = A->diff_gen(c.r, c.a);
    for (const auto& t : da.terms())
      terms.emplace_back(sp * t.first,
                         clw_gen(c.p, c.w, c.r - 1, t.second, c.word));
    return cmb_add(out, Combination::make(n - 1, std::move(terms)));
  };
  CxPtr base1 = derived_complex(D, D->kind() + "/u", diff_base1);
  Morphism f1(base1, CW, 0, [](int n, const Gen& g) {
    ClwParts c = clw_parts(g);
    if (c.r != 0 || c.word.items().size() > 1) return Combination(n);
    return Combination(n, c.w);
  });
  Morphism g1(CW, base1, 0, [e0, empty_word](int n, const Gen& w) {
    return Combination(n, clw_gen(n, w, 0, e0, empty_word));
  });
  Morphism h1(base1, base1, 1, [e0](int n, const Gen& g) {
    ClwParts c = clw_parts(g);
    if (c.r == 0) return Combination(n + 1);
    std::vector<std::pair<int, Gen>> ls = word_letters(c.word);
    ls.insert(ls.begin(), {c.r, c.a});
    Int sp = (c.p % 2 == 0) ? 1 : -1;
    return Combination::make(
        n + 1, {{sp, clw_gen(c.p, c.w, 0, e0, word_gen(ls))}});
  });
  Morphism delta1(base1, base1, -1, [D, base1](int n, const Gen& g) {
    return cmb_sub(D->diff_gen(n, g), base1->diff_gen(n, g));
  });
  Reduction rho1 =
      basic_perturbation(Reduction{base1, CW, f1, g1, h1}, delta1);
  Reduction R1 = rebase_reduction(rho1, D, CW);

  // Contraction of M1 onto the point, transported from the chains of the
  // contractible WG where the extra-degeneracy homotopy is explicit.
  CxPtr P = point_complex();
  Gen pt = Gen::sym("pt");
  Morphism f0(CWG, P, 0, [pt](int n, const Gen&) {
    return n == 0 ? Combination(0, pt) : Combination(n);
  });
  Simplex v0 = canonical_pair(Simplex{{}, Ws->base_point()},
                              Simplex{{}, G->set->base_point()});
  Morphism g0(P, CWG, 0,
              [v0](int, const Gen&) { return Combination(0, v0.base); });
  Morphism hS(CWG, CWG, 1,
              [G](int n, const Gen& g) {
                Simplex b = crpr_left(g);
                Simplex phi = crpr_right(g);
                std::vector<Simplex> comps = wbar_expand(*G, n, b);
                comps.insert(comps.begin(), phi);
                Simplex wp = wbar_canonical(*G, comps);
                Simplex pr = canonical_pair(
                    wp, point_simplex(G->set->base_point(), n + 1));
                if (pr.degenerate()) return Combination(n + 1);
                return Combination(n + 1, pr.base);
              },
              homotopy_cache_budget());
  Reduction rhoM = normalize_contraction(
      M1, P, compose(f0, tez.g), compose(tez.f, g0),
      compose(tez.f, compose(hS, tez.g)));

  // Second reduction: keep the M1 differential and the internal letter
  // differentials, contract M1 onto the point, then perturb back the
  // merging and cap terms, which shorten the word.
  auto diff_base2 = [A, M1](int n, const Gen& g) {
    ClwParts c = clw_parts(g);
    int W = n - c.p - c.r;
    Int s = ((c.p + c.r) % 2 == 0) ? 1 : -1;
    std::vector<Combination::Term> terms;
    Combination dwd = words_internal_diff(A, W, c.word);
    for (const auto& t : dwd.terms())
      terms.emplace_back(s * t.first,
                         clw_gen(c.p, c.w, c.r, c.a, t.second));
    Combination dm = M1->diff_gen(c.p + c.r, tensor_gen(c.p, c.w, c.a));
    for (const auto& t : dm.terms()) {
      int pp = tensor_left_degree(t.second);
      terms.emplace_back(t.first,
                         clw_gen(pp, tensor_left(t.second),
                                 c.p + c.r - 1 - pp, tensor_right(t.second),
                                 c.word));
    }
    return Combination::make(n - 1, std::move(terms));
  };
  CxPtr base2 = derived_complex(D, D->kind() + "/m", diff_base2);
  CxPtr Wint = words_complex(A, "T[" + A->kind() + "]");
  Morphism f2(base2, Wint, 0, [rhoM](int n, const Gen& g) {
    ClwParts c = clw_parts(g);
    if (c.p + c.r != 0) return Combination(n);
    Combination fm = rhoM.f(0, tensor_gen(0, c.w, c.a));
    Combination out(n);
    for (const auto& t : fm.terms())
      out = cmb_combine(1, out, t.first, Combination(n, c.word));
    return out;
  });
  Morphism g2(Wint, base2, 0, [rhoM, pt](int n, const Gen& wd) {
    Combination gm = rhoM.g(0, pt);
    std::vector<Combination::Term> terms;
    for (const auto& t : gm.terms())
      terms.emplace_back(t.first,
                         clw_gen(0, tensor_left(t.second), 0,
                                 tensor_right(t.second), wd));
    return Combination::make(n, std::move(terms));
  });
  Morphism h2(base2, base2, 1,
              [rhoM](int n, const Gen& g) {
                ClwParts c = clw_parts(g);
                Combination hm =
                    rhoM.h(c.p + c.r, tensor_gen(c.p, c.w, c.a));
                std::vector<Combination::Term> terms;
                for (const auto& t : hm.terms()) {
                  int pp = tensor_left_degree(t.second);
                  terms.emplace_back(
                      t.first, clw_gen(pp, tensor_left(t.second),
                                       c.p + c.r + 1 - pp,
                                       tensor_right(t.second), c.word));
                }
                return Combination::make(n + 1, std::move(terms));
              },
              homotopy_cache_budget());
  Morphism delta2(base2, base2, -1, [D, base2](int n, const Gen& g) {
    return cmb_sub(D->diff_gen(n, g), base2->diff_gen(n, g));
  });
  Reduction rho2 =
      basic_perturbation(Reduction{base2, Wint, f2, g2, h2}, delta2);
  CxPtr pBar = rho2.bottom;  // bar words over A with the induced differential
  Reduction R2 = rebase_reduction(rho2, D, pBar);

  // Make the word complex effective letter by letter: carry the equivalence
  // of A across words, then perturb the induced word-shortening terms.
  CxPtr WDG = words_complex(eG.top(), "T[" + eG.top()->kind() + "]");
  CxPtr WE = words_complex(eG.effective(), "T[" + eG.effective()->kind() + "]");
  Reduction Tl = words_reduction(eG.left, WDG, Wint);
  Morphism deltaW(Wint, Wint, -1, [pBar, Wint](int n, const Gen& g) {
    return cmb_sub(pBar->diff_gen(n, g), Wint->diff_gen(n, g));
  });
  Reduction lw = easy_perturbation(Tl, deltaW);
  Reduction lwr = rebase_reduction(lw, lw.top, pBar);
  Reduction Tr = words_reduction(eG.right, WDG, WE);
  Morphism deltaT(lw.top, lw.top, -1,
                  [lwt = lw.top, WDG](int n, const Gen& g) {
                    return cmb_sub(lwt->diff_gen(n, g), WDG->diff_gen(n, g));
                  });
  Reduction rw =
      basic_perturbation(rebase_reduction(Tr, lw.top, WE), deltaT);
  rw = rebase_reduction(rw, lw.top, rw.bottom);
  return GroupEq{WB, compose_equivalences(Equivalence{R1, R2},
                                          Equivalence{lwr, rw})};
}

// The Eilenberg-MacLane space K(Z, n) (m == 0) or K(Z/m, n) as an iterated
// classifying space of the simplicial circle model in dimension one.
inline GroupEq k_space(long long m, int n) {
  GroupEq geq = k_space_1(m);
  for (int i = 1; i < n; ++i)
    geq = classifying_space_effective_homology(geq);
  return geq;
}

}  // namespace catk
