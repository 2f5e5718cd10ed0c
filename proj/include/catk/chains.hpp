#pragma once
// Chain complexes carried by algorithms.  A complex stores a membership
// predicate and a pointwise differential; effective complexes additionally
// enumerate a finite basis per degree.  Morphisms are pointwise algorithms
// extended by linearity, with per-generator memoization.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <list>
#include <memory>
#include <random>
#include <unordered_map>

#include "catk/combination.hpp"
#include "catk/intlin.hpp"
#include "catk/registry.hpp"

namespace catk {

using Rng = std::mt19937_64;

class ChainComplex;
using CxPtr = std::shared_ptr<const ChainComplex>;

// Bounded LRU cache for (degree, generator) -> Combination maps.  A budget
// of 0 means unbounded.  Fills are idempotent, so a duplicated computation
// is harmless.
class GenCache {
 public:
  explicit GenCache(std::size_t budget = 0) : budget_(budget) {}

  const Combination* find(int n, const Gen& g) const {
    auto it = map_.find(key(n, g));
    if (it == map_.end()) return nullptr;
    if (budget_) order_.splice(order_.begin(), order_, it->second.second);
    return &it->second.first;
  }
  const Combination& store(int n, const Gen& g, Combination value) const {
    auto k = key(n, g);
    auto [it, fresh] = map_.try_emplace(k, std::move(value),
                                        std::list<Key>::iterator{});
    if (fresh && budget_) {
      order_.push_front(k);
      it->second.second = order_.begin();
      if (map_.size() > budget_) {
        map_.erase(order_.back());
        order_.pop_back();
      }
    }
    return it->second.first;
  }

 private:
  using Key = std::pair<int, Gen>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return k.second.hash() * 31 + static_cast<std::size_t>(k.first);
    }
  };
  static Key key(int n, const Gen& g) { return {n, g}; }
  std::size_t budget_;
  mutable std::unordered_map<Key, std::pair<Combination, std::list<Key>::iterator>,
                             KeyHash>
      map_;
  mutable std::list<Key> order_;
};

// Environment-configurable budget for homotopy-operator caches.
inline std::size_t homotopy_cache_budget() {
  static std::size_t budget = [] {
    if (const char* s = std::getenv("CATK_CACHE_BUDGET")) {
      long v = std::atol(s);
      if (v > 0) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(1 << 20);
  }();
  return budget;
}

class ChainComplex : public std::enable_shared_from_this<ChainComplex> {
 public:
  using MemberFn = std::function<bool(int, const Gen&)>;
  using DiffFn = std::function<Combination(int, const Gen&)>;
  using BasisFn = std::function<std::vector<Gen>(int)>;
  using SampleFn = std::function<std::vector<Gen>(int, int, Rng&)>;

  ChainComplex(std::string kind, MemberFn member, DiffFn diff, BasisFn basis,
               SampleFn sampler = nullptr)
      : id_(registry_enroll(kind)),
        kind_(std::move(kind)),
        member_(std::move(member)),
        diff_(std::move(diff)),
        basis_(std::move(basis)),
        sampler_(std::move(sampler)) {}

  int id() const { return id_; }
  const std::string& kind() const { return kind_; }
  bool effective() const { return static_cast<bool>(basis_); }

  bool member(int n, const Gen& g) const {
    return member_ ? member_(n, g) : true;
  }
  std::vector<Gen> basis(int n) const {
    if (!basis_)
      throw std::runtime_error("basis requested on locally effective complex [K" +
                               std::to_string(id_) + " " + kind_ + "]");
    return basis_(n);
  }

  // Differential of a single generator, memoized.
  const Combination& diff_gen(int n, const Gen& g) const {
    if (const Combination* hit = cache_.find(n, g)) return *hit;
    return cache_.store(n, g, diff_(n, g));
  }

  Combination diff(const Combination& c) const {
    Combination acc(c.degree() - 1);
    for (const auto& t : c.terms()) {
      if (member_ && !member_(c.degree(), t.second))
        throw std::invalid_argument("diff: generator not in complex: " +
                                    t.second.str());
      acc = cmb_combine(1, acc, t.first, diff_gen(c.degree(), t.second));
    }
    return acc;
  }

  // Random generators for property tests.  Effective complexes sample from
  // the basis; locally effective ones must provide a sampler.
  std::vector<Gen> sample(int n, int count, Rng& rng) const {
    if (sampler_) return sampler_(n, count, rng);
    if (!basis_) return {};
    std::vector<Gen> b = basis_(n);
    if (b.empty()) return {};
    std::vector<Gen> out;
    std::uniform_int_distribution<std::size_t> pick(0, b.size() - 1);
    for (int i = 0; i < count; ++i) out.push_back(b[pick(rng)]);
    return out;
  }
  bool has_sampler() const { return static_cast<bool>(sampler_) || effective(); }

 private:
  int id_;
  std::string kind_;
  MemberFn member_;
  DiffFn diff_;
  BasisFn basis_;
  SampleFn sampler_;
  mutable GenCache cache_;  // unbounded: differentials are reused heavily
};

inline CxPtr make_complex(std::string kind, ChainComplex::MemberFn member,
                          ChainComplex::DiffFn diff,
                          ChainComplex::BasisFn basis,
                          ChainComplex::SampleFn sampler = nullptr) {
  return std::make_shared<ChainComplex>(std::move(kind), std::move(member),
                                        std::move(diff), std::move(basis),
                                        std::move(sampler));
}

// A degree-shifting graded map extended by linearity.  Shift 0 maps are
// chain maps; shift +1 maps are homotopy operators and only satisfy the
// reduction equations, not d f = f d.
class Morphism {
 public:
  using ApplyFn = std::function<Combination(int, const Gen&)>;

  Morphism() = default;
  Morphism(CxPtr src, CxPtr dst, int shift, ApplyFn apply,
           std::size_t cache_budget = 0)
      : src_(std::move(src)),
        dst_(std::move(dst)),
        shift_(shift),
        apply_(std::make_shared<ApplyFn>(std::move(apply))),
        cache_(std::make_shared<GenCache>(cache_budget)) {}

  const CxPtr& source() const { return src_; }
  const CxPtr& target() const { return dst_; }
  int shift() const { return shift_; }
  bool valid() const { return apply_ && *apply_; }

  const Combination& apply_gen(int n, const Gen& g) const {
    if (const Combination* hit = cache_->find(n, g)) return *hit;
    return cache_->store(n, g, (*apply_)(n, g));
  }

  Combination operator()(const Combination& c) const {
    Combination acc(c.degree() + shift_);
    for (const auto& t : c.terms())
      acc = cmb_combine(1, acc, t.first, apply_gen(c.degree(), t.second));
    return acc;
  }
  Combination operator()(int n, const Gen& g) const {
    return apply_gen(n, g);
  }

 private:
  CxPtr src_, dst_;
  int shift_ = 0;
  // shared so copying a morphism (and lambdas capturing one) stays O(1)
  std::shared_ptr<const ApplyFn> apply_;
  std::shared_ptr<GenCache> cache_;
};

inline Morphism identity_morphism(const CxPtr& c) {
  return Morphism(c, c, 0,
                  [](int n, const Gen& g) { return Combination(n, g); });
}

inline Morphism zero_morphism(const CxPtr& src, const CxPtr& dst, int shift) {
  return Morphism(src, dst, shift, [shift](int n, const Gen&) {
    return Combination(n + shift);
  });
}

inline Morphism diff_morphism(const CxPtr& c) {
  return Morphism(c, c, -1,
                  [c](int n, const Gen& g) { return c->diff_gen(n, g); });
}

// g after f.
inline Morphism compose(const Morphism& g, const Morphism& f) {
  int shift = f.shift() + g.shift();
  return Morphism(f.source(), g.target(), shift,
                  [g, f](int n, const Gen& x) { return g(f(n, x)); });
}

inline Morphism add(const Morphism& a, const Morphism& b) {
  if (a.shift() != b.shift())
    throw std::invalid_argument("Morphism add: shift mismatch");
  int shift = a.shift();
  return Morphism(a.source(), a.target(), shift,
                  [a, b](int n, const Gen& x) {
                    return cmb_add(a(n, x), b(n, x));
                  });
}

inline Morphism sub(const Morphism& a, const Morphism& b) {
  if (a.shift() != b.shift())
    throw std::invalid_argument("Morphism sub: shift mismatch");
  return Morphism(a.source(), a.target(), a.shift(),
                  [a, b](int n, const Gen& x) {
                    return cmb_sub(a(n, x), b(n, x));
                  });
}

inline Morphism scale(const Int& c, const Morphism& a) {
  return Morphism(a.source(), a.target(), a.shift(),
                  [c, a](int n, const Gen& x) { return cmb_scale(c, a(n, x)); });
}

// ---------------------------------------------------------------------------
// Tensor product of complexes.  Generators are tagged triples
// (tnpr p a b) where p is the degree of the left factor; the Koszul rule
// d(a⊗b) = da⊗b + (-1)^p a⊗db fixes the signs.

inline Gen tensor_gen(int p, const Gen& a, const Gen& b) {
  return Gen::list_of(Gen::sym("tnpr"), Gen::num(p), a, b);
}
inline bool is_tensor_gen(const Gen& g) {
  return g.is_list() && g.items().size() == 4 && g.items()[0].is_sym() &&
         g.items()[0].sym_value() == "tnpr";
}
inline int tensor_left_degree(const Gen& g) {
  return static_cast<int>(g.items()[1].num_value());
}
inline const Gen& tensor_left(const Gen& g) { return g.items()[2]; }
inline const Gen& tensor_right(const Gen& g) { return g.items()[3]; }

inline CxPtr tensor_complex(const CxPtr& A, const CxPtr& B) {
  auto member = [A, B](int n, const Gen& g) {
    if (!is_tensor_gen(g)) return false;
    int p = tensor_left_degree(g);
    return p >= 0 && p <= n && A->member(p, tensor_left(g)) &&
           B->member(n - p, tensor_right(g));
  };
  auto diff = [A, B](int n, const Gen& g) {
    int p = tensor_left_degree(g);
    const Gen& a = tensor_left(g);
    const Gen& b = tensor_right(g);
    std::vector<Combination::Term> terms;
    for (const auto& t : A->diff_gen(p, a).terms())
      terms.emplace_back(t.first, tensor_gen(p - 1, t.second, b));
    Int sign = (p % 2 == 0) ? 1 : -1;
    for (const auto& t : B->diff_gen(n - p, b).terms())
      terms.emplace_back(sign * t.first, tensor_gen(p, a, t.second));
    return Combination::make(n - 1, std::move(terms));
  };
  ChainComplex::BasisFn basis = nullptr;
  if (A->effective() && B->effective()) {
    basis = [A, B](int n) {
      std::vector<Gen> out;
      for (int p = 0; p <= n; ++p)
        for (const Gen& a : A->basis(p))
          for (const Gen& b : B->basis(n - p)) out.push_back(tensor_gen(p, a, b));
      return out;
    };
  }
  ChainComplex::SampleFn sampler = nullptr;
  if (A->has_sampler() && B->has_sampler()) {
    sampler = [A, B](int n, int count, Rng& rng) {
      std::vector<Gen> out;
      std::uniform_int_distribution<int> split(0, n);
      for (int i = 0; i < 4 * count && static_cast<int>(out.size()) < count;
           ++i) {
        int p = split(rng);
        auto as = A->sample(p, 1, rng);
        auto bs = B->sample(n - p, 1, rng);
        if (!as.empty() && !bs.empty())
          out.push_back(tensor_gen(p, as[0], bs[0]));
      }
      return out;
    };
  }
  return make_complex("Tensor-Complex", member, diff, basis, sampler);
}

// Tensor of morphisms with the Koszul sign: (F⊗G)(a⊗b) =
// (-1)^{|G||a|} F(a) ⊗ G(b).
inline Morphism tensor_morphism(const CxPtr& src, const CxPtr& dst,
                                const Morphism& F, const Morphism& G) {
  int shift = F.shift() + G.shift();
  return Morphism(src, dst, shift, [F, G](int n, const Gen& g) {
    int p = tensor_left_degree(g);
    Combination fa = F(Combination(p, tensor_left(g)));
    Combination gb = G(Combination(n - p, tensor_right(g)));
    Int sign = (G.shift() * p) % 2 == 0 ? 1 : -1;
    std::vector<Combination::Term> terms;
    for (const auto& ta : fa.terms())
      for (const auto& tb : gb.terms())
        terms.emplace_back(sign * ta.first * tb.first,
                           tensor_gen(fa.degree(), ta.second, tb.second));
    return Combination::make(n + F.shift() + G.shift(), std::move(terms));
  });
}

// ---------------------------------------------------------------------------
// Cone of a chain map f : A -> B.  Cone(f)_n = B_n ⊕ A_{n-1}, with
// d(b,a) = (db + f a, -da).  Generators are tagged (cone btm b) and
// (cone src a).

inline Gen cone_btm_gen(const Gen& b) {
  return Gen::list_of(Gen::sym("cone"), Gen::sym("btm"), b);
}
inline Gen cone_src_gen(const Gen& a) {
  return Gen::list_of(Gen::sym("cone"), Gen::sym("src"), a);
}
inline bool is_cone_gen(const Gen& g) {
  return g.is_list() && g.items().size() == 3 && g.items()[0].is_sym() &&
         g.items()[0].sym_value() == "cone";
}
inline bool cone_is_src(const Gen& g) {
  return g.items()[1].sym_value() == "src";
}
inline const Gen& cone_inner(const Gen& g) { return g.items()[2]; }

inline CxPtr cone_complex(const Morphism& f) {
  CxPtr A = f.source(), B = f.target();
  auto member = [A, B](int n, const Gen& g) {
    if (!is_cone_gen(g)) return false;
    return cone_is_src(g) ? A->member(n - 1, cone_inner(g))
                          : B->member(n, cone_inner(g));
  };
  auto diff = [A, B, f](int n, const Gen& g) {
    std::vector<Combination::Term> terms;
    if (cone_is_src(g)) {
      const Gen& a = cone_inner(g);
      for (const auto& t : A->diff_gen(n - 1, a).terms())
        terms.emplace_back(-t.first, cone_src_gen(t.second));
      Combination fa = f(n - 1, a);
      for (const auto& t : fa.terms())
        terms.emplace_back(t.first, cone_btm_gen(t.second));
    } else {
      for (const auto& t : B->diff_gen(n, cone_inner(g)).terms())
        terms.emplace_back(t.first, cone_btm_gen(t.second));
    }
    return Combination::make(n - 1, std::move(terms));
  };
  ChainComplex::BasisFn basis = nullptr;
  if (A->effective() && B->effective()) {
    basis = [A, B](int n) {
      std::vector<Gen> out;
      for (const Gen& b : B->basis(n)) out.push_back(cone_btm_gen(b));
      if (n >= 1)
        for (const Gen& a : A->basis(n - 1)) out.push_back(cone_src_gen(a));
      return out;
    };
  }
  ChainComplex::SampleFn sampler = nullptr;
  if (A->has_sampler() && B->has_sampler()) {
    sampler = [A, B](int n, int count, Rng& rng) {
      std::vector<Gen> out;
      for (const Gen& b : B->sample(n, (count + 1) / 2, rng))
        out.push_back(cone_btm_gen(b));
      if (n >= 1)
        for (const Gen& a : A->sample(n - 1, count / 2, rng))
          out.push_back(cone_src_gen(a));
      return out;
    };
  }
  return make_complex("Cone-Complex", member, diff, basis, sampler);
}

// ---------------------------------------------------------------------------
// Homology of an effective complex via Smith normal form.

inline IntMatrix boundary_matrix(const CxPtr& C, int n) {
  std::vector<Gen> src = C->basis(n);
  std::vector<Gen> dst = n >= 1 ? C->basis(n - 1) : std::vector<Gen>{};
  std::unordered_map<Gen, int, GenHash> index;
  for (std::size_t i = 0; i < dst.size(); ++i)
    index[dst[i]] = static_cast<int>(i);
  IntMatrix m(static_cast<int>(dst.size()), static_cast<int>(src.size()));
  for (std::size_t j = 0; j < src.size(); ++j)
    for (const auto& t : C->diff_gen(n, src[j]).terms()) {
      auto it = index.find(t.second);
      if (it == index.end())
        throw std::runtime_error("boundary_matrix: differential leaves basis: " +
                                 t.second.str());
      m.set(it->second, static_cast<int>(j), t.first);
    }
  return m;
}

inline AbGroupFT homology(const CxPtr& C, int n) {
  if (!C->effective())
    throw std::runtime_error(
        "homology not computable on locally effective complex [K" +
        std::to_string(C->id()) + " " + C->kind() + "]");
  if (n < 0) return AbGroupFT{};
  IntMatrix d_out = boundary_matrix(C, n);
  IntMatrix d_in = boundary_matrix(C, n + 1);
  return homology_of_matrices(d_out, d_in);
}

}  // namespace catk
