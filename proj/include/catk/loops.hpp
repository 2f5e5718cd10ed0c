// Kan loop groups, the cobar construction and the effective homology of
// iterated loop spaces of reduced simplicial sets.
#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "catk/fib.hpp"
#include "catk/em.hpp"

namespace catk {

// --------------------------------------------------------------------------
// The Kan loop group G(X) of a reduced simplicial set.
// --------------------------------------------------------------------------

namespace detail {

// A q-simplex of G(X) is a reduced word whose letters are (q+1)-simplices
// of X not of the form s_0 y, each with a nonzero exponent; adjacent
// letters are distinct.  s_0-images of X-simplices are the trivial letters.
using LoopWord = std::vector<std::pair<Simplex, long long>>;

inline Gen lword_gen(const LoopWord& ls) {
  std::vector<Gen> items;
  items.reserve(ls.size() + 1);
  items.push_back(Gen::sym("lw"));
  for (const auto& [s, e] : ls)
    items.push_back(Gen::list_of(simplex_gen(s), Gen::num(e)));
  return Gen::list(std::move(items));
}

inline bool is_lword_gen(const Gen& g) {
  return g.kind() == 2 && !g.items().empty() && g.items()[0].is_sym("lw");
}

inline LoopWord lword_letters(const Gen& g) {
  LoopWord out;
  for (std::size_t k = 1; k < g.items().size(); ++k) {
    const Gen& l = g.items()[k];
    out.emplace_back(gen_simplex(l.items()[0]),
                     static_cast<long long>(l.items()[1].num_value()));
  }
  return out;
}

inline bool lword_trivial_letter(const Simplex& s) {
  return std::find(s.dgs.begin(), s.dgs.end(), 0) != s.dgs.end();
}

// Free-group reduction: drop trivial letters and zero exponents, merge
// adjacent equal letters (cascading through a stack).
inline LoopWord lword_reduce(const LoopWord& ls) {
  LoopWord out;
  for (const auto& le : ls) {
    if (le.second == 0 || lword_trivial_letter(le.first)) continue;
    if (!out.empty() && out.back().first == le.first) {
      out.back().second += le.second;
      if (out.back().second == 0) out.pop_back();
    } else {
      out.push_back(le);
    }
  }
  return out;
}

inline LoopWord lword_inverse(const LoopWord& ls) {
  LoopWord out;
  for (auto it = ls.rbegin(); it != ls.rend(); ++it)
    out.emplace_back(it->first, -it->second);
  return out;
}

// d_i on a full word of dimension q (letters have dimension q+1).  All
// faces are homomorphisms; d_0 sends a letter x to (d_0 x)^-1 (d_1 x).
inline LoopWord lword_face(const SsPtr& X, int i, int q, const LoopWord& ls) {
  LoopWord out;
  for (const auto& [s, e] : ls) {
    if (i == 0) {
      Simplex a = apply_face(X, 0, q + 1, s);
      Simplex b = apply_face(X, 1, q + 1, s);
      long long n = e < 0 ? -e : e;
      for (long long k = 0; k < n; ++k) {
        if (e > 0) {
          out.emplace_back(a, -1);
          out.emplace_back(b, 1);
        } else {
          out.emplace_back(b, -1);
          out.emplace_back(a, 1);
        }
      }
    } else {
      out.emplace_back(apply_face(X, i + 1, q + 1, s), e);
    }
  }
  return lword_reduce(out);
}

inline LoopWord lword_degen(int j, const LoopWord& ls) {
  LoopWord out;
  for (const auto& [s, e] : ls) out.emplace_back(apply_degen(j + 1, s), e);
  return lword_reduce(out);
}

// Canonical simplex form of a word of dimension q: strip degeneracies
// (highest index first) while the word is an s_i-image.
inline Simplex gx_canonical(const SsPtr& X, int q, const LoopWord& ls0) {
  LoopWord ls = lword_reduce(ls0);
  std::vector<int> ops;
  bool found = true;
  while (found && q > 0) {
    found = false;
    for (int i = q - 1; i >= 0; --i) {
      LoopWord y = lword_face(X, i, q, ls);
      if (lword_degen(i, y) == ls) {
        ls = y;
        ops.push_back(i);
        --q;
        found = true;
        break;
      }
    }
  }
  std::vector<int> dgs;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it)
    dgs = degen_insert(dgs, *it);
  return Simplex{std::move(dgs), lword_gen(ls)};
}

// Expand a canonical simplex of G(X) back into a full word of dimension q.
inline LoopWord gx_expand(const SsPtr& X, int q, const Simplex& s) {
  LoopWord ls = lword_letters(s.base);
  (void)q;
  for (auto it = s.dgs.rbegin(); it != s.dgs.rend(); ++it)
    ls = lword_degen(*it, ls);
  return ls;
}

}  // namespace detail

// The Kan loop group of a reduced simplicial set X: a free simplicial
// group whose classifying fibration has total space contractible over X,
// realizing the loop space of X.
inline SGrpPtr g_construction(const SsPtr& X) {
  using namespace detail;
  if (X->has_basis() && X->basis(0).size() != 1)
    throw std::runtime_error(
        "g_construction: the base simplicial set must be reduced");
  auto member = [X](int q, const Gen& g) {
    if (!is_lword_gen(g)) return false;
    LoopWord ls = lword_letters(g);
    for (std::size_t k = 0; k < ls.size(); ++k) {
      const auto& [s, e] = ls[k];
      if (e == 0 || lword_trivial_letter(s)) return false;
      if (!sset_member(X, q + 1, s)) return false;
      if (k > 0 && ls[k - 1].first == s) return false;
    }
    if (ls.empty() && q > 0) return false;
    for (int i = 0; i < q; ++i)
      if (lword_degen(i, lword_face(X, i, q, ls)) == ls) return false;
    return true;
  };
  SimplicialSet::FaceFn face = [X](int i, int q, const Gen& g) {
    return gx_canonical(X, q - 1,
                        lword_face(X, i, q, lword_letters(g)));
  };
  SimplicialSet::SampleFn sampler = nullptr;
  if (X->has_sampler() || X->has_basis()) {
    sampler = [X](int q, int count, Rng& rng) {
      std::vector<Gen> out;
      for (int c = 0; c < count; ++c) {
        if (q == 0 && rng() % 4 == 0) {
          out.push_back(detail::lword_gen({}));
          continue;
        }
        int len = 1 + static_cast<int>(rng() % 2);
        LoopWord ls;
        bool ok = true;
        for (int t = 0; t < len; ++t) {
          // random (q+1)-simplex of X whose degeneracies avoid index 0
          int bd = 1 + static_cast<int>(rng() % static_cast<unsigned>(q + 1));
          std::vector<Gen> xs = X->sample_nondeg(bd, 1, rng);
          if (xs.empty()) { ok = false; break; }
          Simplex s{{}, xs[0]};
          int need = q + 1 - bd;
          for (int v = q; v >= 1 && need > 0; --v)
            if (static_cast<int>(rng() % static_cast<unsigned>(v)) < need) {
              s.dgs.push_back(v);
              --need;
            }
          if (need > 0) { ok = false; break; }
          long long e = 1 + static_cast<long long>(rng() % 2);
          if (rng() % 2) e = -e;
          ls.emplace_back(s, e);
        }
        if (!ok) continue;
        Simplex w = gx_canonical(X, q, ls);
        if (!w.degenerate()) out.push_back(w.base);
      }
      return out;
    };
  }
  SsPtr set = make_sset("G(" + X->kind() + ")", member, face, nullptr,
                        detail::lword_gen({}), std::move(sampler));
  auto grp = std::make_shared<SimplicialGroup>();
  grp->set = set;
  grp->mul = [X](int q, const Simplex& a, const Simplex& b) {
    LoopWord la = gx_expand(X, q, a);
    LoopWord lb = gx_expand(X, q, b);
    la.insert(la.end(), lb.begin(), lb.end());
    return gx_canonical(X, q, la);
  };
  grp->inv = [X](int q, const Simplex& a) {
    return gx_canonical(X, q, lword_inverse(gx_expand(X, q, a)));
  };
  return grp;
}

// The universal twisting operator for the loop-group fibration
// G(X) -> X x_t G(X) -> X: a q-simplex of the base becomes the one-letter
// word it spells in dimension q-1.
inline TwistingOperator loop_twist(const SsPtr& X, const SGrpPtr& G) {
  return TwistingOperator{X, G, [X](int q, const Simplex& b) {
    return detail::gx_canonical(X, q - 1, {{b, 1}});
  }};
}

// --------------------------------------------------------------------------
// Leveled enumeration of loop-group simplices.  G(X) is a free group, so
// its chain complex is locally effective only; the contraction solver
// below still needs an exhaustive enumeration of candidate generators,
// graded by a level so every simplex appears at some finite level.
// --------------------------------------------------------------------------

using LevelEnum = std::function<std::vector<Simplex>(int, int)>;

// For a set with a finite basis every simplex is already enumerable; the
// level is ignored.
inline LevelEnum basis_level_enum(const SsPtr& X) {
  return [X](int dim, int) { return all_simplices(X, dim); };
}

// Simplices of G(X) of a given dimension: words of at most `level` letters
// taken from the (leveled) simplices of X one dimension up, exponents
// bounded by the level.  Degenerate simplices are included.
inline LevelEnum loop_level_enum(const SsPtr& X, const LevelEnum& ex) {
  return [X, ex](int q, int level) {
    using namespace detail;
    // Letters are weighted by the first enumeration level that produces
    // them; a word costs the sum over its letters of weight + |exp| - 1.
    // Binding the total cost by the level keeps successive windows growing
    // gradually instead of multiplying out full letter alphabets.
    std::vector<std::pair<Simplex, int>> letters;
    std::set<Gen> seen_letter;
    for (int l = 1; l <= level; ++l)
      for (const Simplex& s : ex(q + 1, l))
        if (!lword_trivial_letter(s) &&
            seen_letter.insert(simplex_gen(s)).second)
          letters.emplace_back(s, l);
    std::vector<Simplex> out;
    std::set<Gen> seen;
    LoopWord cur;
    auto emit = [&]() {
      Simplex w = gx_canonical(X, q, cur);
      Gen key = Gen::list_of(simplex_gen(w), Gen::num(0));
      if (seen.insert(key).second) out.push_back(w);
    };
    // past this size a window is unusable anyway; abort the walk instead
    // of materializing millions of words
    const std::size_t cap = 30001;
    std::function<void(int)> rec = [&](int budget) {
      if (out.size() >= cap) return;
      emit();
      for (const auto& [s, weight] : letters) {
        if (out.size() >= cap) return;
        if (!cur.empty() && cur.back().first == s) continue;
        for (long long e = 1; weight + e - 1 <= budget; ++e) {
          int rest = budget - (weight + static_cast<int>(e) - 1);
          cur.emplace_back(s, e);
          rec(rest);
          cur.back().second = -e;
          rec(rest);
          cur.pop_back();
        }
      }
    };
    rec(level);
    return out;
  };
}

// --------------------------------------------------------------------------
// Contraction solver.  An acyclic complex augmented over the point is
// contracted degreewise: h(z) solves d(u) = z - g f(z) - h(d z) by exact
// integer linear algebra over a window of candidate generators that grows
// level by level until the system becomes solvable.
// --------------------------------------------------------------------------

// Optional structural guesses for the solver: given a generator of degree
// n appearing in a right-hand side, propose degree-(n+1) generators whose
// boundary may reach it.  Tried before the enumerated windows, which stay
// as the exhaustive fallback.
using NeighborFn = std::function<std::vector<Gen>(int, const Gen&)>;

inline Reduction point_contraction(
    const CxPtr& C, const Gen& unit,
    std::function<std::vector<Gen>(int, int)> candidates,
    NeighborFn neighbors = nullptr, int max_level = 6) {
  CxPtr P = point_complex();
  Gen pt = Gen::sym("pt");
  Morphism f(C, P, 0, [pt](int n, const Gen&) {
    return n == 0 ? Combination(0, pt) : Combination(n);
  });
  Morphism g(P, C, 0,
             [unit](int, const Gen&) { return Combination(0, unit); });

  struct Solver {
    CxPtr C;
    Gen unit;
    std::function<std::vector<Gen>(int, int)> candidates;
    NeighborFn neighbors;
    int max_level;
    std::map<std::pair<int, Gen>, Combination> memo;

    Combination apply(int n, const Combination& z) {
      Combination acc(n + 1);
      for (const auto& t : z.terms())
        acc = cmb_combine(1, acc, t.first, gen(n, t.second));
      return acc;
    }

    Combination gen(int n, const Gen& z) {
      if (n < 0) return Combination(n + 1);
      auto it = memo.find({n, z});
      if (it != memo.end()) return it->second;
      Combination c(n, z);
      if (n == 0) c = cmb_sub(c, Combination(0, unit));
      c = cmb_sub(c, apply(n - 1, C->diff_gen(n, z)));
      Combination u = solve(n, c);
      memo.emplace(std::make_pair(n, z), u);
      return u;
    }

    // One window of candidates, with the Smith decomposition of its
    // boundary matrix computed once and reused for every right-hand side
    // in the same degree.
    struct Window {
      std::vector<Gen> us;
      std::vector<Combination> dus;  // kept only when too big for a
                                     // shared Smith decomposition
      std::map<Gen, int> row;
      SNFResult snf;
      bool big = false;
    };
    std::map<std::pair<int, int>, Window> windows;

    const Window& window(int deg, int lvl) {
      auto it = windows.find({deg, lvl});
      if (it != windows.end()) return it->second;
      static const bool log = std::getenv("CATK_SOLVER_LOG") != nullptr;
      Window w;
      w.us = candidates(deg, lvl);
      if (log)
        std::fprintf(stderr, "[solver %s] deg=%d lvl=%d enum=%zu\n",
                     C->kind().c_str(), deg, lvl, w.us.size());
      if (w.us.size() > 30000) {
        // enumerating differentials for a window this size is already
        // out of budget; mark it unusable
        w.big = true;
        w.us.clear();
        return windows.emplace(std::make_pair(deg, lvl), std::move(w))
            .first->second;
      }
      w.dus.reserve(w.us.size());
      for (const Gen& u : w.us) {
        w.dus.push_back(C->diff_gen(deg, u));
        for (const auto& t : w.dus.back().terms())
          w.row.emplace(t.second, static_cast<int>(w.row.size()));
      }
      w.big = w.us.size() > 3000;
      if (w.big) {
        // too many columns for one dense Smith decomposition; keep the
        // differentials and solve per right-hand side on the pruned
        // incidence component instead
        return windows.emplace(std::make_pair(deg, lvl), std::move(w))
            .first->second;
      }
      IntMatrix A(static_cast<int>(w.row.size()),
                  static_cast<int>(w.us.size()));
      for (std::size_t j = 0; j < w.us.size(); ++j)
        for (const auto& t : w.dus[j].terms())
          A.add(w.row.at(t.second), static_cast<int>(j), t.first);
      if (log)
        std::fprintf(stderr, "[solver %s] deg=%d lvl=%d window=%zu rows=%zu\n",
                     C->kind().c_str(), deg, lvl, w.us.size(), w.row.size());
      w.snf = smith_normal_form(A);
      // only P, S, Q enter the solving; drop the inverse transforms
      w.snf.Pinv = IntMatrix(0, 0);
      w.snf.Qinv = IntMatrix(0, 0);
      w.dus.clear();
      w.dus.shrink_to_fit();
      return windows.emplace(std::make_pair(deg, lvl), std::move(w))
          .first->second;
    }

    // Solve d u = c over an explicit candidate list, restricted to the
    // incidence component of the right-hand side; nullopt if unsolvable.
    std::optional<Combination> attempt(int n, const std::vector<Gen>& all,
                                       const std::vector<Combination>& dall,
                                       const Combination& c) {
      std::set<Gen> reach;
      for (const auto& t : c.terms()) reach.insert(t.second);
      std::vector<bool> used(all.size(), false);
      bool grew = true;
      while (grew) {
        grew = false;
        for (std::size_t j = 0; j < all.size(); ++j) {
          if (used[j]) continue;
          bool hit = false;
          for (const auto& t : dall[j].terms())
            if (reach.count(t.second)) {
              hit = true;
              break;
            }
          if (!hit) continue;
          used[j] = true;
          grew = true;
          for (const auto& t : dall[j].terms()) reach.insert(t.second);
        }
      }
      std::size_t pruned = 0;
      for (std::size_t j = 0; j < all.size(); ++j)
        if (used[j]) ++pruned;
      static const bool log = std::getenv("CATK_SOLVER_LOG") != nullptr;
      if (log)
        std::fprintf(stderr, "[solver %s] deg=%d attempt pruned=%zu of %zu\n",
                     C->kind().c_str(), n + 1, pruned, all.size());
      // a dense Smith decomposition on a component this large would not
      // fit in memory; report failure rather than attempt it
      if (pruned > 2500) return std::nullopt;
      std::vector<const Gen*> us;
      std::map<Gen, int> row;
      for (const auto& t : c.terms())
        row.emplace(t.second, static_cast<int>(row.size()));
      std::vector<const Combination*> dus;
      for (std::size_t j = 0; j < all.size(); ++j)
        if (used[j]) {
          us.push_back(&all[j]);
          dus.push_back(&dall[j]);
          for (const auto& t : dall[j].terms())
            row.emplace(t.second, static_cast<int>(row.size()));
        }
      IntMatrix A(static_cast<int>(row.size()), static_cast<int>(us.size()));
      for (std::size_t j = 0; j < us.size(); ++j)
        for (const auto& t : dus[j]->terms())
          A.add(row.at(t.second), static_cast<int>(j), t.first);
      std::vector<Int> b(row.size(), 0);
      for (const auto& t : c.terms()) b[row.at(t.second)] = t.first;
      std::optional<std::vector<Int>> x = solve_linear(A, b);
      if (!x) return std::nullopt;
      std::vector<Combination::Term> terms;
      for (std::size_t j = 0; j < us.size(); ++j)
        if ((*x)[j] != 0) terms.emplace_back((*x)[j], *us[j]);
      return Combination::make(n + 1, std::move(terms));
    }

    // Find u of degree n+1 with d u = c by solving over a growing window.
    Combination solve(int n, const Combination& c) {
      if (c.terms().empty()) return Combination(n + 1);
      static const bool log = std::getenv("CATK_SOLVER_LOG") != nullptr;
      for (int lvl = 1; lvl <= max_level; ++lvl) {
        const Window& w = window(n + 1, lvl);
        if (w.big) {
          if (w.us.empty()) break;  // past the enumeration budget
          if (auto u = attempt(n, w.us, w.dus, c)) return *u;
          continue;
        }
        bool covered = true;
        for (const auto& t : c.terms())
          if (!w.row.count(t.second)) {
            covered = false;
            break;
          }
        if (!covered) continue;
        std::vector<Int> b(w.row.size(), 0);
        for (const auto& t : c.terms()) b[w.row.at(t.second)] = t.first;
        std::optional<std::vector<Int>> x = solve_linear(w.snf, b);
        if (!x) continue;
        std::vector<Combination::Term> terms;
        for (std::size_t j = 0; j < w.us.size(); ++j)
          if ((*x)[j] != 0) terms.emplace_back((*x)[j], w.us[j]);
        return Combination::make(n + 1, std::move(terms));
      }
      // rescue path: a pool of candidates proposed from the shape of the
      // right-hand side, for degrees where enumeration is out of budget
      if (neighbors) {
        std::set<Gen> pool;
        for (const auto& t : c.terms())
          for (const Gen& u : neighbors(n, t.second)) pool.insert(u);
        for (const Gen& u : candidates(n + 1, 1)) pool.insert(u);
        std::vector<Gen> us(pool.begin(), pool.end());
        if (log)
          std::fprintf(stderr, "[solver %s] deg=%d adaptive pool=%zu rhs=%zu\n",
                       C->kind().c_str(), n + 1, us.size(), c.terms().size());
        std::vector<Combination> dus;
        dus.reserve(us.size());
        for (const Gen& u : us) dus.push_back(C->diff_gen(n + 1, u));
        if (auto u = attempt(n, us, dus, c)) return *u;
        if (log) {
          std::fprintf(stderr, "[solver %s] deg=%d adaptive pool failed\n",
                       C->kind().c_str(), n + 1);
          for (const auto& t : c.terms())
            std::fprintf(stderr, "  rhs %s * %s\n", t.first.str().c_str(),
                         t.second.str().c_str());
        }
      }
      throw std::runtime_error(
          "point_contraction: candidate window exhausted in degree " +
          std::to_string(n + 1));
    }
  };
  auto solver = std::make_shared<Solver>();
  solver->C = C;
  solver->unit = unit;
  solver->candidates = std::move(candidates);
  solver->neighbors = std::move(neighbors);
  solver->max_level = max_level;
  Morphism h(C, C, 1, [solver](int n, const Gen& z) {
    return solver->gen(n, z);
  });
  // the recursion gives f g = 1, f h = 0, h g = 0 and the homotopy
  // equation on the nose; h h = 0 is enforced by normalization
  return normalize_contraction(C, P, f, g, h);
}

// --------------------------------------------------------------------------
// Cobar words.
// --------------------------------------------------------------------------

namespace detail {

// A cobar word <x_1|...|x_k>: letters are generators of degree >= 2 of the
// underlying complex; the letter (d, x) contributes d-1 to the word degree
// (desuspension).
inline Gen cword_gen(const std::vector<std::pair<int, Gen>>& letters) {
  std::vector<Gen> items;
  items.reserve(letters.size() + 1);
  items.push_back(Gen::sym("cw"));
  for (const auto& [d, x] : letters)
    items.push_back(Gen::list_of(Gen::num(d), x));
  return Gen::list(std::move(items));
}

inline bool is_cword_gen(const Gen& g) {
  return g.kind() == 2 && !g.items().empty() && g.items()[0].is_sym("cw");
}

inline std::vector<std::pair<int, Gen>> cword_letters(const Gen& g) {
  std::vector<std::pair<int, Gen>> out;
  for (std::size_t k = 1; k < g.items().size(); ++k) {
    const Gen& l = g.items()[k];
    out.emplace_back(static_cast<int>(l.items()[0].num_value()),
                     l.items()[1]);
  }
  return out;
}

inline int cword_degree(const std::vector<std::pair<int, Gen>>& ls) {
  int n = 0;
  for (const auto& l : ls) n += l.first - 1;
  return n;
}

// Internal part of the cobar differential: the letter differential with
// the desuspension sign, - (-1)^{w_<i} <..|dx_i|..>.
inline Combination cwords_internal_diff(const CxPtr& C, int n,
                                        const Gen& g) {
  std::vector<std::pair<int, Gen>> ls = cword_letters(g);
  std::vector<Combination::Term> terms;
  int before = 0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    auto [d, x] = ls[i];
    if (d >= 3) {
      Int sign = (before % 2 == 0) ? -1 : 1;
      const Combination& dx = C->diff_gen(d, x);
      for (const auto& t : dx.terms()) {
        std::vector<std::pair<int, Gen>> nl = ls;
        nl[i] = {d - 1, t.second};
        terms.emplace_back(sign * t.first, cword_gen(nl));
      }
    }
    before += d - 1;
  }
  return Combination::make(n - 1, std::move(terms));
}

}  // namespace detail

// A coproduct on a chain complex, with values in combinations of tensor
// generators; only the components with both factors of degree >= 2 are
// consumed by the cobar construction.
using CoproductFn = std::function<Combination(int, const Gen&)>;

namespace detail {

// Splitting part: (-1)^{w_<i} (-1)^{p} <..|x'|x''|..> over the coproduct
// components x' (x) x'' of the letter x_i with both factors letters.
inline Combination cwords_split_diff(const CoproductFn& cop, int n,
                                     const Gen& g) {
  std::vector<std::pair<int, Gen>> ls = cword_letters(g);
  std::vector<Combination::Term> terms;
  int before = 0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    auto [d, x] = ls[i];
    Combination parts = cop(d, x);
    for (const auto& t : parts.terms()) {
      int p = tensor_left_degree(t.second);
      if (p < 2 || d - p < 2) continue;
      Int sign = ((before + p) % 2 == 0) ? 1 : -1;
      std::vector<std::pair<int, Gen>> nl;
      nl.insert(nl.end(), ls.begin(), ls.begin() + static_cast<long>(i));
      nl.emplace_back(p, tensor_left(t.second));
      nl.emplace_back(d - p, tensor_right(t.second));
      nl.insert(nl.end(), ls.begin() + static_cast<long>(i) + 1, ls.end());
      terms.emplace_back(sign * t.first, cword_gen(nl));
    }
    before += d - 1;
  }
  return Combination::make(n - 1, std::move(terms));
}

inline bool cwords_member(const CxPtr& C, int n, const Gen& g) {
  if (!is_cword_gen(g)) return false;
  int total = 0;
  for (std::size_t k = 1; k < g.items().size(); ++k) {
    const Gen& l = g.items()[k];
    if (l.kind() != 2 || l.items().size() != 2) return false;
    int d = static_cast<int>(l.items()[0].num_value());
    if (d < 2 || !C->member(d, l.items()[1])) return false;
    total += d - 1;
  }
  return total == n;
}

inline std::vector<Gen> cwords_basis(const CxPtr& C, int n) {
  std::vector<Gen> out;
  std::vector<std::pair<int, Gen>> cur;
  std::function<void(int)> rec = [&](int rem) {
    if (rem == 0) {
      out.push_back(cword_gen(cur));
      return;
    }
    for (int w = 1; w <= rem; ++w) {
      for (const Gen& x : C->basis(w + 1)) {
        cur.emplace_back(w + 1, x);
        rec(rem - w);
        cur.pop_back();
      }
    }
  };
  if (n >= 0) rec(n);
  return out;
}

inline std::vector<Gen> cwords_sample(const CxPtr& C, int n, int count,
                                      Rng& rng) {
  std::vector<Gen> out;
  for (int c = 0; c < count; ++c) {
    std::vector<std::pair<int, Gen>> ls;
    int rem = n;
    bool ok = true;
    while (rem > 0) {
      int w = 1 + static_cast<int>(rng() % static_cast<unsigned>(rem));
      std::vector<Gen> xs = C->sample(w + 1, 1, rng);
      if (xs.empty()) { ok = false; break; }
      ls.emplace_back(w + 1, xs[0]);
      rem -= w;
    }
    if (ok) out.push_back(cword_gen(ls));
  }
  return out;
}

// Distribute per-letter images over a cobar word: the letters are replaced
// by all combinations of terms of `imgs`, degrees taken from the images.
inline Combination cwords_distribute(
    int out_degree, const std::vector<std::pair<int, Combination>>& imgs) {
  std::vector<Combination::Term> terms;
  std::vector<std::pair<int, Gen>> cur(imgs.size(), {0, Gen::num(0)});
  std::function<void(std::size_t, Int)> rec = [&](std::size_t i, Int coef) {
    if (i == imgs.size()) {
      terms.emplace_back(coef, cword_gen(cur));
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

// The complex of cobar words over C with the internal differential only:
// the cofree part shared by the cobar construction and its perturbations.
inline CxPtr cwords_complex(const CxPtr& C, const std::string& tag) {
  using namespace detail;
  ChainComplex::BasisFn basis = nullptr;
  if (C->effective())
    basis = [C](int n) { return cwords_basis(C, n); };
  ChainComplex::SampleFn sampler = nullptr;
  if (C->has_sampler() || C->effective())
    sampler = [C](int n, int count, Rng& rng) {
      return cwords_sample(C, n, count, rng);
    };
  return make_complex(
      tag, [C](int n, const Gen& g) { return cwords_member(C, n, g); },
      [C](int n, const Gen& g) { return cwords_internal_diff(C, n, g); },
      std::move(basis), std::move(sampler));
}

// Reduced cobar construction of a 1-reduced coalgebra: words over the
// degree >= 2 part, differential = internal part + letter splitting via
// the coproduct.
inline CxPtr cobar_construction(const CxPtr& E, const CoproductFn& cop) {
  using namespace detail;
  if (E->effective() && !E->basis(1).empty())
    throw std::runtime_error(
        "cobar_construction: the coalgebra must be 1-reduced");
  ChainComplex::BasisFn basis = nullptr;
  if (E->effective())
    basis = [E](int n) { return cwords_basis(E, n); };
  ChainComplex::SampleFn sampler = nullptr;
  if (E->has_sampler() || E->effective())
    sampler = [E](int n, int count, Rng& rng) {
      return cwords_sample(E, n, count, rng);
    };
  return make_complex(
      "Cobar(" + E->kind() + ")",
      [E](int n, const Gen& g) { return cwords_member(E, n, g); },
      [E, cop](int n, const Gen& g) {
        return cmb_add(cwords_internal_diff(E, n, g),
                       cwords_split_diff(cop, n, g));
      },
      std::move(basis), std::move(sampler));
}

// The Alexander-Whitney coproduct on the normalized chains of a simplicial
// set, in its reduced form (both factors of positive degree).
namespace detail {

inline std::pair<Simplex, Simplex> aw_front_back(const SsPtr& X, int j,
                                                 int p, const Gen& x) {
  Simplex front{{}, x};
  for (int i = p; i > j; --i) front = apply_face(X, i, i, front);
  Simplex back{{}, x};
  for (int i = 0; i < j; ++i) back = apply_face(X, 0, p - i, back);
  return {front, back};
}

}  // namespace detail

inline CoproductFn aw_coproduct(const SsPtr& X) {
  return [X](int p, const Gen& x) {
    std::vector<Combination::Term> terms;
    for (int j = 1; j < p; ++j) {
      auto [f, b] = detail::aw_front_back(X, j, p, x);
      if (f.degenerate() || b.degenerate()) continue;
      terms.emplace_back(1, tensor_gen(j, f.base, b.base));
    }
    return Combination::make(p, std::move(terms));
  };
}

// The Alexander-Whitney coproduct carried onto the effective complex of a
// space through its equivalence: map a generator down to the canonical
// chains, split it there, and bring the factors back.
inline CoproductFn transported_coproduct(const SpaceEq& Xe) {
  SsPtr X = Xe.space;
  Equivalence e = Xe.eq;
  return [X, e](int n, const Gen& x) {
    Combination can = e.left.f(e.right.g(n, Gen(x)));
    std::vector<Combination::Term> terms;
    for (const auto& t : can.terms()) {
      for (int j = 1; j < n; ++j) {
        auto [fr, bk] = detail::aw_front_back(X, j, n, t.second);
        if (fr.degenerate() || bk.degenerate()) continue;
        Combination ef = e.right.f(e.left.g(Combination(j, fr.base)));
        Combination eb = e.right.f(e.left.g(Combination(n - j, bk.base)));
        for (const auto& a : ef.terms())
          for (const auto& b : eb.terms())
            terms.emplace_back(t.first * a.first * b.first,
                               tensor_gen(j, a.second, b.second));
      }
    }
    return Combination::make(n, std::move(terms));
  };
}

// Letter-wise tensor power of a reduction on cobar words, the desuspended
// mirror of the bar-word version: f and g map every letter, h replaces one
// letter by its homotopy image and the letters before it by their g f
// images.
inline Reduction cwords_reduction(const Reduction& rho, const CxPtr& topW,
                                  const CxPtr& bottomW) {
  using namespace detail;
  Reduction r = rho;
  auto map_all = [](const Morphism& m, int n, const Gen& g) {
    std::vector<std::pair<int, Combination>> imgs;
    for (const auto& [d, x] : cword_letters(g))
      imgs.emplace_back(d, m(d, Gen(x)));
    return cwords_distribute(n, imgs);
  };
  Morphism f(topW, bottomW, 0, [r, map_all](int n, const Gen& g) {
    return map_all(r.f, n, g);
  });
  Morphism g(bottomW, topW, 0, [r, map_all](int n, const Gen& g_) {
    return map_all(r.g, n, g_);
  });
  Morphism h(topW, topW, 1, [r](int n, const Gen& g_) {
    std::vector<std::pair<int, Gen>> ls = cword_letters(g_);
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
        imgs.emplace_back(ls[j].first,
                          Combination(ls[j].first, ls[j].second));
      // the letters carry the negated (desuspended) differential, so the
      // letter homotopy is negated as well
      Int sign = (before % 2 == 0) ? -1 : 1;
      acc = cmb_combine(1, acc, sign, cwords_distribute(n + 1, imgs));
      before += ls[i].first - 1;
    }
    return acc;
  }, homotopy_cache_budget());
  return Reduction{topW, bottomW, f, g, h};
}

// --------------------------------------------------------------------------
// Effective homology of the loop space.  The cobar complex over C(X) with
// coefficients in the twisted tensor product M1 = C(X) (x)_t C(G(X))
// carries two reductions: collapsing the acyclic coefficient resolution
// gives C(G(X)); collapsing the contractible M1 gives the cobar
// construction of C(X), which is then made effective letter by letter.
// --------------------------------------------------------------------------

namespace detail {

// A generator of the big complex: a cobar word over C(X) followed by a
// coefficient in M1, written (word, p, x, r, a) with x a p-simplex of X
// and a an r-simplex of G(X).
inline Gen cow_gen(const Gen& word, int p, const Gen& x, int r,
                   const Gen& a) {
  return Gen::list_of(Gen::sym("cow"), word, Gen::num(p), x, Gen::num(r),
                      a);
}

inline bool is_cow_gen(const Gen& g) {
  return g.kind() == 2 && g.items().size() == 6 &&
         g.items()[0].is_sym("cow");
}

struct CowParts {
  Gen word;
  int p;
  Gen x;
  int r;
  Gen a;
};

inline CowParts cow_parts(const Gen& g) {
  return CowParts{g.items()[1],
                  static_cast<int>(g.items()[2].num_value()), g.items()[3],
                  static_cast<int>(g.items()[4].num_value()), g.items()[5]};
}

// The word-only part of the differential (internal + splits), leaving the
// coefficient untouched; the word is the leftmost factor, so no sign.
inline Combination cow_word_diff(const CxPtr& CX, const CoproductFn& cop,
                                 int n, const CowParts& c) {
  int W = n - c.p - c.r;
  std::vector<Combination::Term> terms;
  Combination dw = cmb_add(cwords_internal_diff(CX, W, c.word),
                           cwords_split_diff(cop, W, c.word));
  for (const auto& t : dw.terms())
    terms.emplace_back(t.first,
                       cow_gen(t.second, c.p, c.x, c.r, c.a));
  return Combination::make(n - 1, std::move(terms));
}

// The coupling: split the base simplex of the coefficient by the full
// Alexander-Whitney coproduct, moving the front face in as a new last
// letter next to the coefficient; the back face may be the final vertex.
inline Combination cow_coupling(const SsPtr& Xs, int n, const CowParts& c) {
  int W = n - c.p - c.r;
  Int s = (W % 2 == 0) ? 1 : -1;
  std::vector<std::pair<int, Gen>> ls = cword_letters(c.word);
  std::vector<Combination::Term> terms;
  for (int j = 2; j <= c.p; ++j) {
    auto [f, b] = aw_front_back(Xs, j, c.p, c.x);
    if (f.degenerate() || b.degenerate()) continue;
    std::vector<std::pair<int, Gen>> nl = ls;
    nl.emplace_back(j, f.base);
    terms.emplace_back(s, cow_gen(cword_gen(nl), c.p - j, b.base, c.r,
                                  c.a));
  }
  return Combination::make(n - 1, std::move(terms));
}

}  // namespace detail

// One loop-group delooping of a reduced simplicial set with effective
// homology; `ex` enumerates the simplices of Xs level by level.
inline GroupEq loop_space_once(const SsPtr& Xs, const Equivalence& eX,
                               const LevelEnum& ex) {
  using namespace detail;
  SGrpPtr G = g_construction(Xs);
  CxPtr CGX = nchains(G->set);
  CxPtr CX = eX.canonical();
  CoproductFn cop = aw_coproduct(Xs);

  // twisted Eilenberg-Zilber for the loop fibration G(X) -> E -> X
  Reduction tez = twisted_ez_reduction(loop_twist(Xs, G));
  CxPtr M1 = tez.bottom;

  Gen vx = Xs->base_point();
  Gen e0 = G->set->base_point();
  Gen empty_word = cword_gen({});
  auto member = [CX, CGX](int n, const Gen& g) {
    if (!is_cow_gen(g)) return false;
    CowParts c = cow_parts(g);
    int W = n - c.p - c.r;
    if (c.p < 0 || c.r < 0 || W < 0) return false;
    return CX->member(c.p, c.x) && CGX->member(c.r, c.a) &&
           cwords_member(CX, W, c.word);
  };
  auto diff_full = [Xs, CX, M1, cop](int n, const Gen& g) {
    CowParts c = cow_parts(g);
    int W = n - c.p - c.r;
    Combination out = cmb_add(cow_word_diff(CX, cop, n, c),
                              cow_coupling(Xs, n, c));
    Int s = (W % 2 == 0) ? 1 : -1;
    Combination dm = M1->diff_gen(c.p + c.r, tensor_gen(c.p, c.x, c.a));
    std::vector<Combination::Term> terms;
    for (const auto& t : dm.terms()) {
      int pp = tensor_left_degree(t.second);
      terms.emplace_back(s * t.first,
                         cow_gen(c.word, pp, tensor_left(t.second),
                                 c.p + c.r - 1 - pp,
                                 tensor_right(t.second)));
    }
    return cmb_add(out, Combination::make(n - 1, std::move(terms)));
  };
  ChainComplex::SampleFn sampler = nullptr;
  if (CX->has_sampler() && CGX->has_sampler())
    sampler = [CX, CGX, empty_word](int n, int count, Rng& rng) {
      std::vector<Gen> out;
      for (int k = 0; k < count; ++k) {
        int p = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
        int r = static_cast<int>(rng() % static_cast<unsigned>(n - p + 1));
        int W = n - p - r;
        std::vector<Gen> xs = CX->sample(p, 1, rng);
        std::vector<Gen> as = CGX->sample(r, 1, rng);
        if (xs.empty() || as.empty()) continue;
        Gen word = empty_word;
        if (W > 0) {
          std::vector<Gen> wd = cwords_sample(CX, W, 1, rng);
          if (wd.empty()) continue;
          word = wd[0];
        }
        out.push_back(cow_gen(word, p, xs[0], r, as[0]));
      }
      return out;
    };
  CxPtr D = make_complex("Cow[" + Xs->kind() + "]", member, diff_full,
                         nullptr, std::move(sampler));

  // First reduction: forget the twist on M1 and contract the acyclic
  // cobar resolution onto C(G(X)) by popping the last letter into the
  // base coefficient; the perturbation lowers the base degree by at least
  // two while the contraction preserves the word length, and the induced
  // bottom perturbation vanishes because the base degree cannot drop
  // below zero.
  auto diff_base1 = [Xs, CX, CGX, cop](int n, const Gen& g) {
    CowParts c = cow_parts(g);
    int W = n - c.p - c.r;
    Combination out = cmb_add(cow_word_diff(CX, cop, n, c),
                              cow_coupling(Xs, n, c));
    Int s = (W % 2 == 0) ? 1 : -1;
    std::vector<Combination::Term> terms;
    Combination dx = CX->diff_gen(c.p, c.x);
    for (const auto& t : dx.terms())
      terms.emplace_back(s * t.first,
                         cow_gen(c.word, c.p - 1, t.second, c.r, c.a));
    Int sp = (c.p % 2 == 0) ? s : -s;
    Combination da = CGX->diff_gen(c.r, c.a);
    for (const auto& t : da.terms())
      terms.emplace_back(sp * t.first,
                         cow_gen(c.word, c.p, c.x, c.r - 1, t.second));
    return cmb_add(out, Combination::make(n - 1, std::move(terms)));
  };
  CxPtr base1 = derived_complex(D, D->kind() + "/u", diff_base1);
  Morphism f1(base1, CGX, 0, [](int n, const Gen& g) {
    CowParts c = cow_parts(g);
    if (c.p != 0 || c.word.items().size() > 1) return Combination(n);
    return Combination(n, c.a);
  });
  Morphism g1(CGX, base1, 0, [vx, empty_word](int n, const Gen& a) {
    return Combination(n, detail::cow_gen(empty_word, 0, vx, n, a));
  });
  Morphism h1(base1, base1, 1, [](int n, const Gen& g) {
    CowParts c = cow_parts(g);
    if (c.p != 0) return Combination(n + 1);
    std::vector<std::pair<int, Gen>> ls = cword_letters(c.word);
    if (ls.empty()) return Combination(n + 1);
    auto [d, x] = ls.back();
    ls.pop_back();
    Int sign = (cword_degree(ls) % 2 == 0) ? 1 : -1;
    return Combination::make(
        n + 1, {{sign, cow_gen(cword_gen(ls), d, x, c.r, c.a)}});
  });
  Morphism delta1(base1, base1, -1, [D, base1](int n, const Gen& g) {
    return cmb_sub(D->diff_gen(n, g), base1->diff_gen(n, g));
  });
  Reduction rho1 =
      basic_perturbation(Reduction{base1, CGX, f1, g1, h1}, delta1);
  Reduction R1 = rebase_reduction(rho1, D, CGX);

  // Contraction of M1 onto the point: the chains of the total space of
  // the universal loop fibration are acyclic, and the contraction is
  // computed degreewise by the exact solver over the leveled enumeration
  // of tensor generators.
  // Tensor candidates are budgeted across the two factors: a pair drawn
  // from levels (a, b) costs a + b - 1, so the window at a given level only
  // admits one factor to deepen at a time.
  LevelEnum gxe = loop_level_enum(Xs, ex);
  auto cands = [ex, gxe](int m, int lvl) {
    std::vector<Gen> out;
    std::set<Gen> seen;
    const std::size_t cap = 30001;
    for (int a = 1; a <= lvl && out.size() < cap; ++a) {
      int b = lvl + 1 - a;
      for (int p = 0; p <= m && out.size() < cap; ++p) {
        std::vector<Gen> xs;
        for (const Simplex& s : ex(p, a))
          if (!s.degenerate()) xs.push_back(s.base);
        if (xs.empty()) continue;
        for (const Simplex& w : gxe(m - p, b)) {
          if (out.size() >= cap) break;
          if (w.degenerate()) continue;
          for (const Gen& x : xs) {
            Gen t = tensor_gen(p, x, w.base);
            if (seen.insert(t).second) out.push_back(t);
          }
        }
      }
    }
    return out;
  };
  // Structural proposals for the solver: a right-hand-side generator can
  // be reached by raising one degeneracy index in either tensor factor.
  // Raising every letter of a loop-group word by the same index is a
  // degeneracy of the word, so only the mixed raisings j_l in {i, i+1}
  // matter; validity goes through the membership predicates.
  SsPtr GXs = G->set;
  auto raise_word = [](int d, const Gen& wg) {
    using namespace detail;
    std::vector<Gen> out;
    if (!is_lword_gen(wg)) return out;
    LoopWord ls = lword_letters(wg);
    if (ls.empty()) return out;
    std::set<Gen> seen;
    const int k = static_cast<int>(ls.size());
    if (k > 20) return out;
    for (int i = 0; i <= d + 1; ++i)
      for (unsigned mask = 0; mask < (1u << k); ++mask) {
        LoopWord w;
        bool ok = true;
        for (int l = 0; l < k; ++l) {
          int j = i + static_cast<int>((mask >> l) & 1u);
          if (j < 1 || j > d + 1) {
            ok = false;
            break;
          }
          w.emplace_back(apply_degen(j, ls[static_cast<std::size_t>(l)].first),
                         ls[static_cast<std::size_t>(l)].second);
        }
        if (!ok) continue;
        Gen g = lword_gen(w);
        if (seen.insert(g).second) out.push_back(g);
      }
    return out;
  };
  NeighborFn neighbors = [Xs, GXs, ex, raise_word](int m, const Gen& t) {
    std::vector<Gen> out;
    int p = tensor_left_degree(t);
    Gen xg = tensor_left(t);
    Gen wg = tensor_right(t);
    int d = m - p;
    for (const Gen& w : raise_word(d, wg))
      if (GXs->member_nondeg(d + 1, w)) out.push_back(tensor_gen(p, xg, w));
    if (detail::is_lword_gen(xg)) {
      for (const Gen& x : raise_word(p, xg))
        if (Xs->member_nondeg(p + 1, x))
          out.push_back(tensor_gen(p + 1, x, wg));
    } else {
      for (const Simplex& s : ex(p + 1, 1))
        if (!s.degenerate()) out.push_back(tensor_gen(p + 1, s.base, wg));
    }
    return out;
  };
  Reduction rhoM =
      point_contraction(M1, tensor_gen(0, vx, e0), cands, neighbors);
  Gen pt = Gen::sym("pt");

  // Second reduction: keep the full word differential and the M1
  // differential, contract M1 onto the point, then perturb back the
  // coupling, which lowers the coefficient degree by at least two.
  auto diff_base2 = [CX, M1, cop](int n, const Gen& g) {
    CowParts c = cow_parts(g);
    int W = n - c.p - c.r;
    Combination out = cow_word_diff(CX, cop, n, c);
    Int s = (W % 2 == 0) ? 1 : -1;
    Combination dm = M1->diff_gen(c.p + c.r, tensor_gen(c.p, c.x, c.a));
    std::vector<Combination::Term> terms;
    for (const auto& t : dm.terms()) {
      int pp = tensor_left_degree(t.second);
      terms.emplace_back(s * t.first,
                         cow_gen(c.word, pp, tensor_left(t.second),
                                 c.p + c.r - 1 - pp,
                                 tensor_right(t.second)));
    }
    return cmb_add(out, Combination::make(n - 1, std::move(terms)));
  };
  CxPtr base2 = derived_complex(D, D->kind() + "/m", diff_base2);
  CxPtr Wcob = cobar_construction(CX, cop);
  Morphism f2(base2, Wcob, 0, [rhoM](int n, const Gen& g) {
    CowParts c = cow_parts(g);
    if (c.p + c.r != 0) return Combination(n);
    Combination fm = rhoM.f(0, tensor_gen(0, c.x, c.a));
    Combination out(n);
    for (const auto& t : fm.terms())
      out = cmb_combine(1, out, t.first, Combination(n, c.word));
    return out;
  });
  Morphism g2(Wcob, base2, 0, [rhoM, pt](int n, const Gen& wd) {
    Combination gm = rhoM.g(0, pt);
    std::vector<Combination::Term> terms;
    for (const auto& t : gm.terms())
      terms.emplace_back(t.first,
                         cow_gen(wd, tensor_left_degree(t.second),
                                 tensor_left(t.second), 0,
                                 tensor_right(t.second)));
    return Combination::make(n, std::move(terms));
  });
  Morphism h2(base2, base2, 1,
              [rhoM](int n, const Gen& g) {
                CowParts c = cow_parts(g);
                int W = n - c.p - c.r;
                Int s = (W % 2 == 0) ? 1 : -1;
                Combination hm =
                    rhoM.h(c.p + c.r, tensor_gen(c.p, c.x, c.a));
                std::vector<Combination::Term> terms;
                for (const auto& t : hm.terms()) {
                  int pp = tensor_left_degree(t.second);
                  terms.emplace_back(
                      s * t.first,
                      cow_gen(c.word, pp, tensor_left(t.second),
                              c.p + c.r + 1 - pp, tensor_right(t.second)));
                }
                return Combination::make(n + 1, std::move(terms));
              },
              homotopy_cache_budget());
  Morphism delta2(base2, base2, -1, [D, base2](int n, const Gen& g) {
    return cmb_sub(D->diff_gen(n, g), base2->diff_gen(n, g));
  });
  Reduction rho2 =
      basic_perturbation(Reduction{base2, Wcob, f2, g2, h2}, delta2);
  CxPtr pCobar = rho2.bottom;  // cobar words with the induced differential
  Reduction R2 = rebase_reduction(rho2, D, pCobar);

  // Make the word complex effective letter by letter: carry the
  // equivalence of C(X) across words, then perturb the induced splitting
  // terms, which lengthen the word but lower the letter degrees.
  CxPtr Wint = cwords_complex(CX, "O[" + CX->kind() + "]");
  CxPtr WDG = cwords_complex(eX.top(), "O[" + eX.top()->kind() + "]");
  CxPtr WE =
      cwords_complex(eX.effective(), "O[" + eX.effective()->kind() + "]");
  Reduction Tl = cwords_reduction(eX.left, WDG, Wint);
  Morphism deltaW(Wint, Wint, -1, [pCobar, Wint](int n, const Gen& g) {
    return cmb_sub(pCobar->diff_gen(n, g), Wint->diff_gen(n, g));
  });
  Reduction lw = easy_perturbation(Tl, deltaW);
  Reduction lwr = rebase_reduction(lw, lw.top, pCobar);
  Reduction Tr = cwords_reduction(eX.right, WDG, WE);
  Morphism deltaT(lw.top, lw.top, -1,
                  [lwt = lw.top, WDG](int n, const Gen& g) {
                    return cmb_sub(lwt->diff_gen(n, g),
                                   WDG->diff_gen(n, g));
                  });
  Reduction rw =
      basic_perturbation(rebase_reduction(Tr, lw.top, WE), deltaT);
  rw = rebase_reduction(rw, lw.top, rw.bottom);
  return GroupEq{G, compose_equivalences(Equivalence{R1, R2},
                                         Equivalence{lwr, rw})};
}

// The k-fold loop space of a k-reduced simplicial set with effective
// homology, as an iterated Kan loop group with effective homology.
inline GroupEq loop_space(const SpaceEq& Xe, int k) {
  if (k < 1) throw std::invalid_argument("loop_space: k must be positive");
  if (Xe.space->has_basis()) {
    if (Xe.space->basis(0).size() != 1)
      throw std::runtime_error("loop_space: the space must be reduced");
    for (int d = 1; d <= k; ++d)
      if (!Xe.space->basis(d).empty())
        throw std::runtime_error("loop_space: the space must be " +
                                 std::to_string(k) +
                                 "-reduced to loop " + std::to_string(k) +
                                 " times");
  }
  SsPtr Xs = Xe.space;
  Equivalence eq = Xe.eq;
  LevelEnum ex = basis_level_enum(Xs);
  GroupEq out;
  for (int i = 0; i < k; ++i) {
    out = loop_space_once(Xs, eq, ex);
    ex = loop_level_enum(Xs, ex);
    Xs = out.grp->set;
    eq = out.eq;
  }
  return out;
}

}  // namespace catk
