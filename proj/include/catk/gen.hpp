#pragma once
// Generator terms: small immutable trees (symbol / integer / list) used to
// name basis elements everywhere in the kernel.  They carry a total
// structural order and a canonical text form so combinations can be kept
// sorted and serialized stably.

#include <compare>
#include <cstdint>
#include <memory>
#include <algorithm>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace catk {

class Gen;

namespace detail {

struct GenNode {
  // kind: 0 = symbol, 1 = integer, 2 = list
  int kind = 0;
  std::string sym;
  long long num = 0;
  std::vector<Gen> items;
  std::size_t hash = 0;
};

}  // namespace detail

class Gen {
 public:
  Gen() : Gen(sym_tag{}, "nil") {}

  static Gen sym(std::string s) { return Gen(sym_tag{}, std::move(s)); }
  static Gen num(long long v) {
    auto n = std::make_shared<detail::GenNode>();
    n->kind = 1;
    n->num = v;
    n->hash = finish(combine(combine(seed(), 1), static_cast<std::size_t>(v)));
    return Gen(std::move(n));
  }
  static Gen list(std::vector<Gen> items) {
    auto n = std::make_shared<detail::GenNode>();
    n->kind = 2;
    n->items = std::move(items);
    std::size_t h = combine(seed(), 2);
    for (const Gen& g : n->items) h = combine(h, g.hash());
    n->hash = finish(h);
    return Gen(std::move(n));
  }
  template <class... Ts>
  static Gen list_of(Ts&&... ts) {
    std::vector<Gen> v;
    (v.push_back(std::forward<Ts>(ts)), ...);
    return list(std::move(v));
  }

  int kind() const { return node_->kind; }
  bool is_sym() const { return node_->kind == 0; }
  bool is_sym(std::string_view s) const {
    return node_->kind == 0 && node_->sym == s;
  }
  bool is_num() const { return node_->kind == 1; }
  bool is_list() const { return node_->kind == 2; }
  const std::string& sym_value() const { return node_->sym; }
  long long num_value() const { return node_->num; }
  const std::vector<Gen>& items() const { return node_->items; }
  std::size_t hash() const { return node_->hash; }

  friend bool operator==(const Gen& a, const Gen& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case 0: return a.sym_value() == b.sym_value();
      case 1: return a.num_value() == b.num_value();
      default: return a.items() == b.items();
    }
  }
  friend bool operator!=(const Gen& a, const Gen& b) { return !(a == b); }

  // Total structural order: symbols < integers < lists, then by content.
  friend std::strong_ordering operator<=>(const Gen& a, const Gen& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    switch (a.kind()) {
      case 0: return a.sym_value() <=> b.sym_value();
      case 1: return a.num_value() <=> b.num_value();
      default: {
        const auto& x = a.items();
        const auto& y = b.items();
        std::size_t n = std::min(x.size(), y.size());
        for (std::size_t i = 0; i < n; ++i)
          if (auto c = x[i] <=> y[i]; c != 0) return c;
        return x.size() <=> y.size();
      }
    }
  }

  std::string str() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }
  void print(std::ostream& os) const {
    switch (kind()) {
      case 0: os << sym_value(); break;
      case 1: os << num_value(); break;
      default: {
        os << '(';
        bool first = true;
        for (const Gen& g : items()) {
          if (!first) os << ' ';
          first = false;
          g.print(os);
        }
        os << ')';
      }
    }
  }
  friend std::ostream& operator<<(std::ostream& os, const Gen& g) {
    g.print(os);
    return os;
  }

 private:
  struct sym_tag {};
  Gen(sym_tag, std::string s) {
    auto n = std::make_shared<detail::GenNode>();
    n->kind = 0;
    n->sym = std::move(s);
    std::size_t h = combine(seed(), 0);
    for (char c : n->sym) h = combine(h, static_cast<unsigned char>(c));
    n->hash = finish(h);
    node_ = std::move(n);
  }
  explicit Gen(std::shared_ptr<detail::GenNode> n) : node_(std::move(n)) {}

  static std::size_t seed() { return 0x9e3779b97f4a7c15ull; }
  static std::size_t combine(std::size_t h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
  static std::size_t finish(std::size_t h) {
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return h;
  }

  std::shared_ptr<const detail::GenNode> node_;
};

struct GenHash {
  std::size_t operator()(const Gen& g) const { return g.hash(); }
};

}  // namespace catk
