// Twisted cartesian products and the effective-homology machinery for total
// spaces of principal fibrations F -> B x_tau F -> B.
#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "catk/sgrp.hpp"

namespace catk {

// tau sends a q-simplex of the base to a (q-1)-element of the fiber group;
// the twisted product differs from the cartesian product only in d_0:
// d_0(b, phi) = (d_0 b, tau(b) . d_0 phi)  (left action).
struct TwistingOperator {
  SsPtr base;
  SGrpPtr fiber;
  std::function<Simplex(int, const Simplex&)> tau;
};

// The four twisting-function identities, checked on one simplex.
inline bool twisting_identities_ok(const TwistingOperator& t, int q,
                                   const Simplex& b, std::string* why) {
  const SsPtr& B = t.base;
  const SsPtr& F = t.fiber->set;
  auto fail = [why](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  Simplex tb = t.tau(q, b);
  for (int i = 1; i <= q - 1; ++i) {
    if (!(apply_face(F, i, q - 1, tb) == t.tau(q - 1, apply_face(B, i + 1, q, b))))
      return fail("d_i tau != tau d_{i+1} at i=" + std::to_string(i));
  }
  if (q >= 2) {
    Simplex lhs = apply_face(F, 0, q - 1, tb);
    Simplex rhs = t.fiber->mul(
        q - 2, t.fiber->inv(q - 2, t.tau(q - 1, apply_face(B, 0, q, b))),
        t.tau(q - 1, apply_face(B, 1, q, b)));
    if (!(lhs == rhs)) return fail("d_0 tau != tau(d_0)^-1 tau(d_1)");
  }
  for (int i = 0; i <= q - 1; ++i) {
    if (!(apply_degen(i, tb) == t.tau(q + 1, apply_degen(i + 1, b))))
      return fail("s_i tau != tau s_{i+1} at i=" + std::to_string(i));
  }
  if (!(t.tau(q + 1, apply_degen(0, b)) == t.fiber->neutral(q)))
    return fail("tau(s_0 b) != neutral");
  return true;
}

inline SsPtr twisted_product(const TwistingOperator& t) {
  SsPtr B = t.base;
  SsPtr F = t.fiber->set;
  SsPtr plain = product_space(B, F);
  auto tau = t.tau;
  SGrpPtr fib = t.fiber;
  auto member = [plain](int n, const Gen& g) {
    return plain->member_nondeg(n, g);
  };
  SimplicialSet::FaceFn face = [B, F, fib, tau](int i, int n, const Gen& g) {
    Simplex sb = crpr_left(g), sf = crpr_right(g);
    Simplex fb = apply_face(B, i, n, sb);
    Simplex ff = apply_face(F, i, n, sf);
    if (i == 0) ff = fib->mul(n - 1, tau(n, sb), ff);
    return canonical_pair(fb, ff);
  };
  SimplicialSet::BasisFn basis = nullptr;
  if (plain->has_basis()) basis = [plain](int n) { return plain->basis(n); };
  SimplicialSet::SampleFn sampler = [plain](int n, int count, Rng& rng) {
    return plain->sample_nondeg(n, count, rng);
  };
  return make_sset("Twisted[" + B->kind() + "," + F->kind() + "]", member,
                   face, basis, plain->base_point(), sampler);
}

// Re-wrap a reduction between complexes with identical generators and
// differentials (used to tie derived complexes back to named ones).
inline Reduction rebase_reduction(const Reduction& r, const CxPtr& top,
                                  const CxPtr& bottom) {
  Morphism f(top, bottom, 0, [r](int n, const Gen& g) { return r.f(n, g); });
  Morphism g(bottom, top, 0, [r](int n, const Gen& x) { return r.g(n, x); });
  Morphism h(top, top, 1, [r](int n, const Gen& x) { return r.h(n, x); });
  return Reduction{top, bottom, f, g, h};
}

// Twisted Eilenberg-Zilber: the normalized chains of the twisted product
// reduce onto the twisted tensor product C(B) (x)_t C(F), obtained by
// perturbing the plain Eilenberg-Zilber reduction with the difference of the
// two differentials.  The top is rebased onto nchains(twisted_product(t)).
inline Reduction twisted_ez_reduction(const TwistingOperator& t) {
  SsPtr B = t.base;
  SsPtr F = t.fiber->set;
  Reduction ez = ez_reduction(B, F);
  CxPtr CT = nchains(twisted_product(t));
  CxPtr untw = ez.top;

  Morphism delta(untw, untw, -1, [CT, untw](int n, const Gen& g) {
    return cmb_sub(CT->diff_gen(n, g), untw->diff_gen(n, g));
  });
  Reduction rho1;
  try {
    rho1 = basic_perturbation(ez, delta);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string(e.what()) +
                             " (twist over base " + B->kind() + ")");
  }
  return rebase_reduction(rho1, CT, rho1.bottom);
}

// Effective homology of the total space of a twisted product with reduced
// base: twisted Eilenberg-Zilber on one side, the base/fiber equivalences
// carried across by the easy and basic perturbation lemmas on the other.
inline Equivalence total_space_effective_homology(const TwistingOperator& t,
                                                  const Equivalence& eB,
                                                  const Equivalence& eF) {
  SsPtr B = t.base;
  SsPtr F = t.fiber->set;
  Reduction rho1t = twisted_ez_reduction(t);
  CxPtr CT = rho1t.top;
  Reduction ez = ez_reduction(B, F);
  CxPtr Ct = rho1t.bottom;  // twisted tensor product C(B) (x)_t C(F)
  CxPtr CBF = ez.bottom;

  Morphism delta_c(CBF, CBF, -1, [Ct, CBF](int n, const Gen& g) {
    return cmb_sub(Ct->diff_gen(n, g), CBF->diff_gen(n, g));
  });
  // the tensor of the canonical complexes has the same generators and
  // differential as the EZ bottom; tie it to the shared complex object
  Reduction lred0 = tensor_reductions(eB.left, eF.left);
  Reduction lred = rebase_reduction(lred0, lred0.top, CBF);
  Reduction rred = tensor_reductions(eB.right, eF.right);
  Reduction lp = easy_perturbation(lred, delta_c);
  Reduction lpt = rebase_reduction(lp, lp.top, Ct);

  Morphism delta_d(lp.top, lp.top, -1,
                   [lp, lred](int n, const Gen& g) {
                     return cmb_sub(lp.top->diff_gen(n, g),
                                    lred.top->diff_gen(n, g));
                   });
  Reduction rp;
  try {
    rp = basic_perturbation(rebase_reduction(rred, lp.top, rred.bottom),
                            delta_d);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string(e.what()) +
                             " (twist over base " + B->kind() + ")");
  }
  // the perturbed top has the same differential as lp.top; share the object
  rp = rebase_reduction(rp, lp.top, rp.bottom);
  Equivalence eps{lpt, rp};
  return reduction_then_equivalence(rho1t, eps);
}

}  // namespace catk
