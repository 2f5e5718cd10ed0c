// Simplicial groups: a simplicial set together with dimensionwise group
// operations for which all faces and degeneracies are homomorphisms.
#pragma once

#include <functional>
#include <memory>

#include "catk/simp.hpp"

namespace catk {

struct SimplicialGroup {
  SsPtr set;
  std::function<Simplex(int, const Simplex&, const Simplex&)> mul;
  std::function<Simplex(int, const Simplex&)> inv;

  Simplex neutral(int n) const {
    return point_simplex(set->base_point(), n);
  }
};

using SGrpPtr = std::shared_ptr<const SimplicialGroup>;

// A simplicial group together with the effective homology of its chains.
struct GroupEq {
  SGrpPtr grp;
  Equivalence eq;
};

}  // namespace catk
