// Shared helpers for simplicial-set tests.
#pragma once

#include <doctest.h>

#include "catk/simp.hpp"
#include "support.hpp"

namespace catk {

// Random simplex of X (possibly degenerate) of the requested dimension.
inline Simplex random_simplex(const SsPtr& X, int n, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    int bd = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
    std::vector<Gen> b = X->sample_nondeg(bd, 1, rng);
    if (b.empty()) continue;
    Simplex s{{}, b[0]};
    for (int d = bd; d < n; ++d)
      s = apply_degen(static_cast<int>(rng() % static_cast<unsigned>(d + 1)),
                      s);
    return s;
  }
  return point_simplex(X->base_point(), n);
}

inline void check_simplicial_identities(const SsPtr& X, int max_dim,
                                        int trials, Rng& rng) {
  for (int t = 0; t < trials; ++t) {
    int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_dim - 1));
    Simplex s = random_simplex(X, n, rng);
    REQUIRE(sset_member(X, n, s));
    int j = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    int i = static_cast<int>(rng() % static_cast<unsigned>(j));
    Simplex lhs = apply_face(X, i, n - 1, apply_face(X, j, n, s));
    Simplex rhs = apply_face(X, j - 1, n - 1, apply_face(X, i, n, s));
    CAPTURE(X->kind());
    CAPTURE(n);
    CAPTURE(i);
    CAPTURE(j);
    REQUIRE(lhs == rhs);
    Simplex f = apply_face(X, i, n, s);
    REQUIRE(sset_member(X, n - 1, f));
  }
}

}  // namespace catk
