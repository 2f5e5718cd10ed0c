#pragma once
// Exact integer linear algebra: sparse matrices, Smith normal form with
// unimodular transforms, linear solving over the integers, and invariant
// factors of quotients of free abelian groups.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace catk {

using Int = boost::multiprecision::cpp_int;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  const Int& get(int r, int c) const {
    static const Int zero = 0;
    auto it = entries_.find({r, c});
    return it == entries_.end() ? zero : it->second;
  }
  void set(int r, int c, Int v) {
    check_bounds(r, c);
    if (v == 0)
      entries_.erase({r, c});
    else
      entries_[{r, c}] = std::move(v);
  }
  void add(int r, int c, const Int& v) { set(r, c, get(r, c) + v); }

  const std::map<std::pair<int, int>, Int>& entries() const {
    return entries_;
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.entries_ == b.entries_;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_)
      throw std::invalid_argument("IntMatrix: dimension mismatch in product");
    IntMatrix r(a.rows_, b.cols_);
    // Group b's entries by row for sparse traversal.
    for (const auto& [rc, v] : a.entries_) {
      auto it = b.entries_.lower_bound({rc.second, 0});
      for (; it != b.entries_.end() && it->first.first == rc.second; ++it)
        r.add(rc.first, it->first.second, v * it->second);
    }
    return r;
  }

  std::vector<Int> apply(const std::vector<Int>& x) const {
    if (static_cast<int>(x.size()) != cols_)
      throw std::invalid_argument("IntMatrix: vector length mismatch");
    std::vector<Int> y(rows_, 0);
    for (const auto& [rc, v] : entries_) y[rc.first] += v * x[rc.second];
    return y;
  }

  std::vector<std::vector<Int>> dense() const {
    std::vector<std::vector<Int>> d(rows_, std::vector<Int>(cols_, 0));
    for (const auto& [rc, v] : entries_) d[rc.first][rc.second] = v;
    return d;
  }
  static IntMatrix from_dense(const std::vector<std::vector<Int>>& d) {
    int r = static_cast<int>(d.size());
    int c = r == 0 ? 0 : static_cast<int>(d[0].size());
    IntMatrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        if (d[i][j] != 0) m.set(i, j, d[i][j]);
    return m;
  }

 private:
  void check_bounds(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
      throw std::out_of_range("IntMatrix: index out of range");
  }
  int rows_ = 0, cols_ = 0;
  std::map<std::pair<int, int>, Int> entries_;  // sorted coordinates, no zeros
};

struct SNFResult {
  IntMatrix S;              // diagonal, d1 | d2 | ..., all >= 0
  IntMatrix P, Pinv;        // P * A * Q = S, P*Pinv = I, Q*Qinv = I
  IntMatrix Q, Qinv;
  int rank = 0;             // number of nonzero diagonal entries
};

struct AbGroupFT {
  int free_rank = 0;
  std::vector<Int> torsion;  // invariant factors, each >= 2, d_i | d_{i+1}

  bool trivial() const { return free_rank == 0 && torsion.empty(); }
  friend bool operator==(const AbGroupFT& a, const AbGroupFT& b) {
    return a.free_rank == b.free_rank && a.torsion == b.torsion;
  }
  std::string str() const {
    if (trivial()) return "0";
    std::string s;
    for (int i = 0; i < free_rank; ++i) s += (s.empty() ? "Z" : " + Z");
    for (const Int& d : torsion)
      s += (s.empty() ? "Z/" : " + Z/") + d.str() + "Z";
    return s;
  }
};

namespace detail {

// Dense working state for SNF.  The transforms are updated alongside the
// elementary operations so P*A*Q = S holds throughout.
struct SnfWork {
  std::vector<std::vector<Int>> a, p, pinv, q, qinv;
  int r, c;

  explicit SnfWork(const IntMatrix& m) : r(m.rows()), c(m.cols()) {
    a = m.dense();
    auto eye = [](int n) {
      std::vector<std::vector<Int>> e(n, std::vector<Int>(n, 0));
      for (int i = 0; i < n; ++i) e[i][i] = 1;
      return e;
    };
    p = eye(r);
    pinv = eye(r);
    q = eye(c);
    qinv = eye(c);
  }

  // row i1 += k * row i2  (on A and P); Pinv gets the inverse column op.
  void row_add(int i1, int i2, const Int& k) {
    for (int j = 0; j < c; ++j) a[i1][j] += k * a[i2][j];
    for (int j = 0; j < r; ++j) p[i1][j] += k * p[i2][j];
    for (int i = 0; i < r; ++i) pinv[i][i2] -= k * pinv[i][i1];
  }
  void row_swap(int i1, int i2) {
    if (i1 == i2) return;
    a[i1].swap(a[i2]);
    p[i1].swap(p[i2]);
    for (int i = 0; i < r; ++i) std::swap(pinv[i][i1], pinv[i][i2]);
  }
  void row_negate(int i1) {
    for (int j = 0; j < c; ++j) a[i1][j] = -a[i1][j];
    for (int j = 0; j < r; ++j) p[i1][j] = -p[i1][j];
    for (int i = 0; i < r; ++i) pinv[i][i1] = -pinv[i][i1];
  }
  // col j1 += k * col j2  (on A and Q); Qinv gets the inverse row op.
  void col_add(int j1, int j2, const Int& k) {
    for (int i = 0; i < this->r; ++i) a[i][j1] += k * a[i][j2];
    for (int i = 0; i < c; ++i) q[i][j1] += k * q[i][j2];
    for (int j = 0; j < c; ++j) qinv[j2][j] -= k * qinv[j1][j];
  }
  void col_swap(int j1, int j2) {
    if (j1 == j2) return;
    for (int i = 0; i < this->r; ++i) std::swap(a[i][j1], a[i][j2]);
    for (int i = 0; i < c; ++i) std::swap(q[i][j1], q[i][j2]);
    qinv[j1].swap(qinv[j2]);
  }
};

inline Int int_abs(const Int& v) { return v < 0 ? Int(-v) : v; }

// Quotient rounded toward nearest; keeps remainders small during reduction.
inline Int round_div(const Int& a, const Int& b) {
  Int q = a / b;
  Int rem = a - q * b;
  Int half = int_abs(b);
  if (2 * int_abs(rem) > half) q += (rem < 0) == (b < 0) ? 1 : -1;
  return q;
}

}  // namespace detail

inline SNFResult smith_normal_form(const IntMatrix& A) {
  detail::SnfWork w(A);
  const int n = std::min(w.r, w.c);
  int t = 0;
  for (; t < n; ++t) {
    bool done_all = false;
    for (;;) {
      // Re-select the smallest-magnitude nonzero pivot in the trailing
      // submatrix on every pass; this keeps intermediate entries small.
      int pi = -1, pj = -1;
      for (int i = t; i < w.r; ++i)
        for (int j = t; j < w.c; ++j)
          if (w.a[i][j] != 0 &&
              (pi < 0 ||
               detail::int_abs(w.a[i][j]) < detail::int_abs(w.a[pi][pj]))) {
            pi = i;
            pj = j;
          }
      if (pi < 0) {
        done_all = true;
        break;
      }
      w.row_swap(t, pi);
      w.col_swap(t, pj);
      bool changed = false;
      for (int i = t + 1; i < w.r; ++i)
        if (w.a[i][t] != 0) {
          Int k = detail::round_div(w.a[i][t], w.a[t][t]);
          if (k != 0) w.row_add(i, t, -k);
          if (w.a[i][t] != 0) changed = true;  // remainder: re-pivot
        }
      for (int j = t + 1; j < w.c; ++j)
        if (w.a[t][j] != 0) {
          Int k = detail::round_div(w.a[t][j], w.a[t][t]);
          if (k != 0) w.col_add(j, t, -k);
          if (w.a[t][j] != 0) changed = true;
        }
      if (changed) continue;
      // Enforce that the pivot divides the remaining submatrix, which
      // makes the final diagonal an invariant-factor chain.
      bool fixed = false;
      for (int i = t + 1; i < w.r && !fixed; ++i)
        for (int j = t + 1; j < w.c && !fixed; ++j)
          if (w.a[i][j] % w.a[t][t] != 0) {
            w.row_add(t, i, 1);
            fixed = true;
          }
      if (!fixed) break;
    }
    if (done_all) break;
    if (w.a[t][t] < 0) w.row_negate(t);
  }
  SNFResult res;
  res.rank = t;
  res.S = IntMatrix::from_dense(w.a);
  res.P = IntMatrix::from_dense(w.p);
  res.Pinv = IntMatrix::from_dense(w.pinv);
  res.Q = IntMatrix::from_dense(w.q);
  res.Qinv = IntMatrix::from_dense(w.qinv);
  return res;
}

// Solve A x = b exactly; empty optional means no integer solution.
inline std::optional<std::vector<Int>> solve_linear(const SNFResult& snf,
                                                    const std::vector<Int>& b) {
  const int r = snf.P.rows(), c = snf.Q.rows();
  if (static_cast<int>(b.size()) != r)
    throw std::invalid_argument("solve_linear: vector length mismatch");
  std::vector<Int> y = snf.P.apply(b);
  std::vector<Int> z(c, 0);
  for (int i = 0; i < r; ++i) {
    Int d = (i < std::min(r, c)) ? snf.S.get(i, i) : Int(0);
    if (d == 0) {
      if (y[i] != 0) return std::nullopt;
    } else {
      if (y[i] % d != 0) return std::nullopt;
      z[i] = y[i] / d;
    }
  }
  return snf.Q.apply(z);
}

inline std::optional<std::vector<Int>> solve_linear(const IntMatrix& A,
                                                    const std::vector<Int>& b) {
  return solve_linear(smith_normal_form(A), b);
}

// Columns spanning ker(A), read off the SNF column transform.
inline IntMatrix kernel_basis(const SNFResult& snf, int cols) {
  std::vector<int> keep;
  for (int j = 0; j < cols; ++j)
    if (j >= snf.rank) keep.push_back(j);
  IntMatrix k(cols, static_cast<int>(keep.size()));
  for (int idx = 0; idx < static_cast<int>(keep.size()); ++idx)
    for (int i = 0; i < cols; ++i)
      if (snf.Q.get(i, keep[idx]) != 0) k.set(i, idx, snf.Q.get(i, keep[idx]));
  return k;
}

// Invariant factors of (column span of ker_basis) / (column span of
// im_basis).  The image columns must lie in the kernel span.
inline AbGroupFT quotient_invariants(const IntMatrix& ker_basis,
                                     const IntMatrix& im_basis) {
  if (im_basis.cols() > 0 && ker_basis.rows() != im_basis.rows())
    throw std::invalid_argument("quotient_invariants: row count mismatch");
  const int k = ker_basis.cols();
  SNFResult ks = smith_normal_form(ker_basis);
  IntMatrix X(k, im_basis.cols());
  for (int j = 0; j < im_basis.cols(); ++j) {
    std::vector<Int> col(im_basis.rows(), 0);
    for (int i = 0; i < im_basis.rows(); ++i) col[i] = im_basis.get(i, j);
    auto x = solve_linear(ks, col);
    if (!x)
      throw std::runtime_error(
          "quotient_invariants: image not contained in kernel span "
          "(broken differential, d∘d != 0 upstream)");
    for (int i = 0; i < k; ++i)
      if ((*x)[i] != 0) X.set(i, j, (*x)[i]);
  }
  SNFResult xs = smith_normal_form(X);
  AbGroupFT g;
  g.free_rank = k - xs.rank;
  for (int i = 0; i < xs.rank; ++i) {
    Int d = xs.S.get(i, i);
    if (d >= 2) g.torsion.push_back(d);
  }
  return g;
}

// Homology of ...--d_in--> C_n --d_out--> ... : ker(d_out)/im(d_in).
inline AbGroupFT homology_of_matrices(const IntMatrix& d_out,
                                      const IntMatrix& d_in) {
  SNFResult s = smith_normal_form(d_out);
  IntMatrix ker = kernel_basis(s, d_out.cols());
  return quotient_invariants(ker, d_in);
}

}  // namespace catk
