#pragma once
// Combination: a finite formal integer linear combination of generator
// terms in a single degree.  Terms are kept strictly sorted by generator
// with nonzero arbitrary-precision coefficients, giving a canonical form.

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

#include "catk/gen.hpp"

namespace catk {

using Int = boost::multiprecision::cpp_int;

class Combination {
 public:
  using Term = std::pair<Int, Gen>;

  Combination() = default;
  explicit Combination(int degree) : degree_(degree) {}
  Combination(int degree, const Gen& g, Int coeff = 1) : degree_(degree) {
    if (coeff != 0) terms_.emplace_back(std::move(coeff), g);
  }

  int degree() const { return degree_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }

  Int coefficient(const Gen& g) const {
    auto it = std::lower_bound(
        terms_.begin(), terms_.end(), g,
        [](const Term& t, const Gen& x) { return t.second < x; });
    if (it != terms_.end() && it->second == g) return it->first;
    return 0;
  }

  friend bool operator==(const Combination& a, const Combination& b) {
    return (a.empty() && b.empty()) ||
           (a.degree_ == b.degree_ && a.terms_ == b.terms_);
  }

  std::string str() const {
    std::ostringstream os;
    os << "{deg " << degree_;
    for (const Term& t : terms_) os << ' ' << t.first << '*' << t.second;
    os << '}';
    return os.str();
  }

  // Construct from an unsorted, possibly repeating term list.
  static Combination make(int degree, std::vector<Term> raw) {
    std::sort(raw.begin(), raw.end(), [](const Term& a, const Term& b) {
      return a.second < b.second;
    });
    Combination r(degree);
    for (auto& t : raw) {
      if (!r.terms_.empty() && r.terms_.back().second == t.second)
        r.terms_.back().first += t.first;
      else
        r.terms_.push_back(std::move(t));
      if (!r.terms_.empty() && r.terms_.back().first == 0) r.terms_.pop_back();
    }
    // A middle term may have cancelled to zero only at back-merge time,
    // handled above; re-filter defensively.
    std::erase_if(r.terms_, [](const Term& t) { return t.first == 0; });
    return r;
  }

 private:
  int degree_ = 0;
  std::vector<Term> terms_;  // strictly increasing generators, coeff != 0

  friend Combination cmb_combine(const Int&, const Combination&, const Int&,
                                 const Combination&);
  friend Combination cmb_scale(const Int&, const Combination&);
};

// coeff_a * a + coeff_b * b, canonical form.
inline Combination cmb_combine(const Int& ca, const Combination& a,
                               const Int& cb, const Combination& b) {
  if (!a.empty() && !b.empty() && a.degree() != b.degree())
    throw std::invalid_argument("cmb_combine: degree mismatch");
  Combination r(a.empty() ? b.degree() : a.degree());
  const auto& ta = a.terms_;
  const auto& tb = b.terms_;
  std::size_t i = 0, j = 0;
  while (i < ta.size() || j < tb.size()) {
    if (j == tb.size() || (i < ta.size() && ta[i].second < tb[j].second)) {
      Int c = ca * ta[i].first;
      if (c != 0) r.terms_.emplace_back(std::move(c), ta[i].second);
      ++i;
    } else if (i == ta.size() || tb[j].second < ta[i].second) {
      Int c = cb * tb[j].first;
      if (c != 0) r.terms_.emplace_back(std::move(c), tb[j].second);
      ++j;
    } else {
      Int c = ca * ta[i].first + cb * tb[j].first;
      if (c != 0) r.terms_.emplace_back(std::move(c), ta[i].second);
      ++i;
      ++j;
    }
  }
  return r;
}

inline Combination cmb_add(const Combination& a, const Combination& b) {
  return cmb_combine(1, a, 1, b);
}

inline Combination cmb_sub(const Combination& a, const Combination& b) {
  return cmb_combine(1, a, -1, b);
}

inline Combination cmb_scale(const Int& c, const Combination& a) {
  Combination r(a.degree());
  if (c == 0) return r;
  r.terms_ = a.terms_;
  if (c != 1)
    for (auto& t : r.terms_) t.first *= c;
  return r;
}

// Linear extension of a per-generator map.  `out_degree` names the degree
// of the (possibly empty) result.
inline Combination cmb_map(
    const Combination& c, int out_degree,
    const std::function<Combination(const Int&, const Gen&)>& f) {
  Combination acc(out_degree);
  for (const auto& t : c.terms()) acc = cmb_add(acc, f(t.first, t.second));
  return acc;
}

}  // namespace catk
