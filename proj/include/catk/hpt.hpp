#pragma once
// Reductions, equivalences, and the perturbation calculus: the easy
// perturbation lemma, the basic perturbation lemma with pointwise series
// evaluation, composition and tensoring of reductions, the zig-zag merge
// used to compose equivalences, and cones of equivalences.

#include "catk/chains.hpp"

namespace catk {

// A reduction rho = (f,g,h) exhibiting `bottom` as a deformation retract
// of `top`:  f g = 1,  g f + d h + h d = 1,  f h = 0,  h g = 0,  h h = 0.
struct Reduction {
  CxPtr top, bottom;
  Morphism f;  // top -> bottom, shift 0
  Morphism g;  // bottom -> top, shift 0
  Morphism h;  // top -> top, shift +1
};

// A pair of reductions from a common top: left lands on the canonical
// complex of an object, right on an effective complex.
struct Equivalence {
  Reduction left;   // top => C (canonical)
  Reduction right;  // top => E (effective)

  const CxPtr& top() const { return left.top; }
  const CxPtr& canonical() const { return left.bottom; }
  const CxPtr& effective() const { return right.bottom; }
};

// Same underlying algorithms as `base`, with a replaced differential.
inline CxPtr derived_complex(const CxPtr& base, std::string kind,
                             ChainComplex::DiffFn diff) {
  ChainComplex::BasisFn b = nullptr;
  if (base->effective()) b = [base](int n) { return base->basis(n); };
  ChainComplex::SampleFn s = nullptr;
  if (base->has_sampler())
    s = [base](int n, int c, Rng& r) { return base->sample(n, c, r); };
  return make_complex(
      std::move(kind),
      [base](int n, const Gen& g) { return base->member(n, g); },
      std::move(diff), std::move(b), std::move(s));
}

inline Reduction trivial_reduction(const CxPtr& C) {
  return Reduction{C, C, identity_morphism(C), identity_morphism(C),
                   zero_morphism(C, C, 1)};
}

inline Equivalence trivial_equivalence(const CxPtr& C) {
  return Equivalence{trivial_reduction(C), trivial_reduction(C)};
}

// Equivalence whose canonical side is the top itself: C <= C => E.
inline Equivalence equivalence_from_right_reduction(const Reduction& rho) {
  return Equivalence{trivial_reduction(rho.top), rho};
}

// rho1: D => C, rho2: C => B  -->  D => B.
inline Reduction compose_reductions(const Reduction& rho1,
                                    const Reduction& rho2) {
  if (rho1.bottom != rho2.top)
    throw std::invalid_argument(
        "compose_reductions: bottom of first != top of second");
  Morphism f = compose(rho2.f, rho1.f);
  Morphism g = compose(rho1.g, rho2.g);
  Morphism h = add(rho1.h, compose(rho1.g, compose(rho2.h, rho1.f)));
  return Reduction{rho1.top, rho2.bottom, f, g, h};
}

// --------------------------------------------------------------------------
// Perturbation lemmas.

// delta is a perturbation of the bottom differential; the top differential
// becomes d + g delta f while f, g, h are untouched.
inline Reduction easy_perturbation(const Reduction& rho,
                                   const Morphism& delta) {
  CxPtr C = rho.bottom, D = rho.top;
  Morphism f = rho.f, g = rho.g, h = rho.h;
  CxPtr Cp = derived_complex(C, C->kind() + "'", [C, delta](int n, const Gen& x) {
    return cmb_add(C->diff_gen(n, x), delta(Combination(n, x)));
  });
  CxPtr Dp = derived_complex(D, D->kind() + "'",
                             [D, f, g, delta](int n, const Gen& x) {
                               Combination c(n, x);
                               return cmb_add(D->diff_gen(n, x), g(delta(f(c))));
                             });
  return Reduction{
      Dp, Cp,
      Morphism(Dp, Cp, 0, [f](int n, const Gen& x) { return f(n, x); }),
      Morphism(Cp, Dp, 0, [g](int n, const Gen& x) { return g(n, x); }),
      Morphism(Dp, Dp, 1, [h](int n, const Gen& x) { return h(n, x); })};
}

// The basic perturbation lemma.  delta perturbs the top differential;
// h∘delta must be pointwise nilpotent.  The series
//   phi = sum_i (-1)^i (h delta)^i h
// is evaluated lazily per element, with max_iter as the nilpotency guard.
inline Reduction basic_perturbation(const Reduction& rho,
                                    const Morphism& delta,
                                    long max_iter = 1L << 16) {
  CxPtr C = rho.bottom, D = rho.top;
  Morphism f = rho.f, g = rho.g, h = rho.h;

  // series(x) = sum_i (-1)^i (h delta)^i x
  auto series = [h, delta, max_iter](Combination x) {
    Combination acc = x;
    Combination term = std::move(x);
    long iter = 0;
    while (!term.empty()) {
      if (++iter > max_iter)
        throw std::runtime_error(
            "basic_perturbation: nilpotency violated (series did not "
            "terminate; base space not sufficiently reduced?)");
      term = cmb_scale(-1, h(delta(term)));
      acc = cmb_add(acc, term);
    }
    return acc;
  };

  CxPtr Dp = derived_complex(D, D->kind() + "'",
                             [D, delta](int n, const Gen& x) {
                               return cmb_add(D->diff_gen(n, x),
                                              delta(Combination(n, x)));
                             });
  // delta_C = f delta (1 - phi delta) g = f delta series(g ·)
  CxPtr Cp = derived_complex(
      C, C->kind() + "'", [C, f, g, delta, series](int n, const Gen& x) {
        return cmb_add(C->diff_gen(n, x),
                       f(delta(series(g(Combination(n, x))))));
      });

  Morphism fp(Dp, Cp, 0, [f, delta, h, series](int n, const Gen& x) {
    // f' = f (1 - delta phi)
    Combination c(n, x);
    return f(cmb_sub(c, delta(series(h(c)))));
  });
  Morphism gp(Cp, Dp, 0, [g, series](int n, const Gen& x) {
    return series(g(Combination(n, x)));
  });
  Morphism hp(Dp, Dp, 1,
              [h, series](int n, const Gen& x) {
                return series(h(Combination(n, x)));
              },
              homotopy_cache_budget());
  return Reduction{Dp, Cp, fp, gp, hp};
}

// --------------------------------------------------------------------------
// Homotopy normalization: upgrade a weak contraction (f g = 1 and
// d h + h d = 1 - g f, with f, g chain maps) to a genuine reduction.
// First h1 = (1-gf) h (1-gf) gains f h = 0 and h g = 0; then h2 = h1 d h1
// additionally gains h h = 0, keeping the homotopy identity.
inline Reduction normalize_contraction(const CxPtr& top, const CxPtr& bottom,
                                       const Morphism& f, const Morphism& g,
                                       const Morphism& h) {
  auto pi = [f, g](const Combination& x) {
    return cmb_sub(x, g(f(x)));  // 1 - g f
  };
  Morphism h1(top, top, 1, [pi, h](int n, const Gen& x) {
    return pi(h(pi(Combination(n, x))));
  });
  Morphism h2(top, top, 1,
              [h1, top](int n, const Gen& x) {
                return h1(top->diff(h1(Combination(n, x))));
              },
              homotopy_cache_budget());
  return Reduction{top, bottom, f, g, h2};
}

// --------------------------------------------------------------------------
// Tensor product of reductions.  The homotopy favors the left factor:
// h = hA ⊗ 1 + (gA fA) ⊗ hB.
inline Reduction tensor_reductions(const Reduction& rA, const Reduction& rB) {
  CxPtr top = tensor_complex(rA.top, rB.top);
  CxPtr bottom = tensor_complex(rA.bottom, rB.bottom);
  Morphism f = tensor_morphism(top, bottom, rA.f, rB.f);
  Morphism g = tensor_morphism(bottom, top, rA.g, rB.g);
  Morphism idB = identity_morphism(rB.top);
  Morphism gafa = compose(rA.g, rA.f);
  Morphism h = add(tensor_morphism(top, top, rA.h, idB),
                   tensor_morphism(top, top, gafa, rB.h));
  return Reduction{top, bottom, f, g,
                   Morphism(top, top, 1,
                            [h](int n, const Gen& x) { return h(n, x); },
                            homotopy_cache_budget())};
}

inline Equivalence tensor_equivalences(const Equivalence& eA,
                                       const Equivalence& eB) {
  return Equivalence{tensor_reductions(eA.left, eB.left),
                     tensor_reductions(eA.right, eB.right)};
}

// --------------------------------------------------------------------------
// Zig-zag merge: from rho_a : D1 => E and rho_b : D2 => E over the same
// bottom E, build Dhat = D1 ⊕ D2 ⊕ E[shift] with
//   dhat(x,y,e) = (dx, dy, -de + f1 x - f2 y)
// (the e-slot of degree n holds E-generators of degree n+1) together with
// reductions Dhat => D1 and Dhat => D2.  Each is obtained from an exact
// one-coupling reduction by a 2-nilpotent BPL step whose computed bottom
// perturbation vanishes.

namespace detail {

inline Gen mrg_gen(int slot, const Gen& inner) {
  return Gen::list_of(Gen::sym("mrg"), Gen::num(slot), inner);
}
inline bool is_mrg_gen(const Gen& g) {
  return g.is_list() && g.items().size() == 3 && g.items()[0].is_sym() &&
         g.items()[0].sym_value() == "mrg";
}
inline int mrg_slot(const Gen& g) {
  return static_cast<int>(g.items()[1].num_value());
}
inline const Gen& mrg_inner(const Gen& g) { return g.items()[2]; }

// Pick out one slot of a merge combination as a plain combination in the
// inner complex's degree.
inline Combination mrg_part(const Combination& c, int slot, int inner_degree) {
  std::vector<Combination::Term> terms;
  for (const auto& t : c.terms())
    if (mrg_slot(t.second) == slot)
      terms.emplace_back(t.first, mrg_inner(t.second));
  return Combination::make(inner_degree, std::move(terms));
}
inline Combination mrg_embed(const Combination& c, int slot, int out_degree) {
  std::vector<Combination::Term> terms;
  for (const auto& t : c.terms())
    terms.emplace_back(t.first, mrg_gen(slot, t.second));
  return Combination::make(out_degree, std::move(terms));
}

}  // namespace detail

struct MergeResult {
  CxPtr top;           // Dhat
  Reduction to_first;  // Dhat => D1
  Reduction to_second; // Dhat => D2
};

inline MergeResult merge_reductions(const Reduction& ra, const Reduction& rb) {
  using namespace detail;
  if (ra.bottom != rb.bottom)
    throw std::invalid_argument("merge_reductions: bottoms differ");
  CxPtr D1 = ra.top, D2 = rb.top, E = ra.bottom;
  Morphism f1 = ra.f, g1 = ra.g, h1 = ra.h;
  Morphism f2 = rb.f, g2 = rb.g, h2 = rb.h;

  auto member = [D1, D2, E](int n, const Gen& g) {
    if (!is_mrg_gen(g)) return false;
    switch (mrg_slot(g)) {
      case 0: return D1->member(n, mrg_inner(g));
      case 1: return D2->member(n, mrg_inner(g));
      default: return E->member(n + 1, mrg_inner(g));
    }
  };
  // Base differential for the Dhat => D1 direction: couples only -f2.
  auto base_diff = [D1, D2, E, f2](int n, const Gen& g) {
    Combination out(n - 1);
    switch (mrg_slot(g)) {
      case 0:
        return mrg_embed(D1->diff_gen(n, mrg_inner(g)), 0, n - 1);
      case 1: {
        Combination y(n, mrg_inner(g));
        out = mrg_embed(D2->diff_gen(n, mrg_inner(g)), 1, n - 1);
        return cmb_add(out, mrg_embed(cmb_scale(-1, f2(y)), 2, n - 1));
      }
      default:
        return mrg_embed(cmb_scale(-1, E->diff_gen(n + 1, mrg_inner(g))), 2,
                         n - 1);
    }
  };
  ChainComplex::BasisFn basis = nullptr;
  if (D1->effective() && D2->effective() && E->effective()) {
    basis = [D1, D2, E](int n) {
      std::vector<Gen> out;
      for (const Gen& x : D1->basis(n)) out.push_back(mrg_gen(0, x));
      for (const Gen& y : D2->basis(n)) out.push_back(mrg_gen(1, y));
      for (const Gen& e : E->basis(n + 1)) out.push_back(mrg_gen(2, e));
      return out;
    };
  }
  ChainComplex::SampleFn sampler = nullptr;
  if (D1->has_sampler() && D2->has_sampler() && E->has_sampler()) {
    sampler = [D1, D2, E](int n, int count, Rng& rng) {
      std::vector<Gen> out;
      for (const Gen& x : D1->sample(n, (count + 2) / 3, rng))
        out.push_back(mrg_gen(0, x));
      for (const Gen& y : D2->sample(n, (count + 2) / 3, rng))
        out.push_back(mrg_gen(1, y));
      for (const Gen& e : E->sample(n + 1, count / 3, rng))
        out.push_back(mrg_gen(2, e));
      return out;
    };
  }
  CxPtr base1 = make_complex("Merge-Base", member, base_diff, basis, sampler);

  // Exact reduction base1 => D1.
  Morphism F1(base1, D1, 0, [](int n, const Gen& g) {
    return mrg_slot(g) == 0 ? Combination(n, mrg_inner(g)) : Combination(n);
  });
  Morphism G1(D1, base1, 0, [](int n, const Gen& g) {
    return Combination(n, mrg_gen(0, g));
  });
  Morphism H1(base1, base1, 1, [h2, g2](int n, const Gen& g) {
    switch (mrg_slot(g)) {
      case 0: return Combination(n + 1);
      case 1:
        return mrg_embed(h2(Combination(n, mrg_inner(g))), 1, n + 1);
      default:
        return mrg_embed(cmb_scale(-1, g2(Combination(n + 1, mrg_inner(g)))),
                         1, n + 1);
    }
  });
  // Perturb by the missing +f1 coupling (2-nilpotent).
  Morphism delta1(base1, base1, -1, [f1](int n, const Gen& g) {
    if (mrg_slot(g) != 0) return Combination(n - 1);
    return mrg_embed(f1(Combination(n, mrg_inner(g))), 2, n - 1);
  });
  Reduction red1 = basic_perturbation(Reduction{base1, D1, F1, G1, H1},
                                      delta1, 8);
  CxPtr Dhat = red1.top;
  // The computed bottom perturbation vanishes, so rebind the bottom to D1
  // itself to keep object identity for later compositions.
  red1.bottom = D1;
  {
    Morphism f = red1.f, g = red1.g;
    red1.f = Morphism(Dhat, D1, 0,
                      [f](int n, const Gen& x) { return f(n, x); });
    red1.g = Morphism(D1, Dhat, 0,
                      [g](int n, const Gen& x) { return g(n, x); });
  }

  // Second direction, sharing the SAME top Dhat.  Base couples only +f1;
  // the full differential of Dhat equals base + delta with delta = -f2.
  Morphism F2(Dhat, D2, 0, [](int n, const Gen& g) {
    return mrg_slot(g) == 1 ? Combination(n, mrg_inner(g)) : Combination(n);
  });
  Morphism G2(D2, Dhat, 0, [](int n, const Gen& g) {
    return Combination(n, mrg_gen(1, g));
  });
  Morphism H2base(Dhat, Dhat, 1, [h1, g1](int n, const Gen& g) {
    switch (mrg_slot(g)) {
      case 0:
        return mrg_embed(h1(Combination(n, mrg_inner(g))), 0, n + 1);
      case 1: return Combination(n + 1);
      default:
        return mrg_embed(g1(Combination(n + 1, mrg_inner(g))), 0, n + 1);
    }
  });
  Morphism delta2(Dhat, Dhat, -1, [f2](int n, const Gen& g) {
    if (mrg_slot(g) != 1) return Combination(n - 1);
    return mrg_embed(cmb_scale(-1, f2(Combination(n, mrg_inner(g)))), 2,
                     n - 1);
  });
  // Build the base2 reduction on a complex that *is* Dhat minus delta2;
  // BPL on it reproduces Dhat's differential.  We construct base2 as a
  // derived complex and then rebind the perturbed top to Dhat.
  CxPtr base2 = derived_complex(
      Dhat, "Merge-Base", [Dhat, delta2](int n, const Gen& g) {
        return cmb_sub(Dhat->diff_gen(n, g), delta2(Combination(n, g)));
      });
  Morphism F2b(base2, D2, 0, [F2](int n, const Gen& x) { return F2(n, x); });
  Morphism G2b(D2, base2, 0, [G2](int n, const Gen& x) { return G2(n, x); });
  Morphism H2b(base2, base2, 1,
               [H2base](int n, const Gen& x) { return H2base(n, x); });
  Reduction red2 = basic_perturbation(Reduction{base2, D2, F2b, G2b, H2b},
                                      delta2, 8);
  red2.top = Dhat;
  red2.bottom = D2;
  {
    Morphism f = red2.f, g = red2.g, h = red2.h;
    red2.f = Morphism(Dhat, D2, 0,
                      [f](int n, const Gen& x) { return f(n, x); });
    red2.g = Morphism(D2, Dhat, 0,
                      [g](int n, const Gen& x) { return g(n, x); });
    red2.h = Morphism(Dhat, Dhat, 1,
                      [h](int n, const Gen& x) { return h(n, x); },
                      homotopy_cache_budget());
  }
  return MergeResult{Dhat, red1, red2};
}

// e1: C <= D1 => E, e2: E <= D2 => F  -->  C <= Dhat => F.
inline Equivalence compose_equivalences(const Equivalence& e1,
                                        const Equivalence& e2) {
  if (e1.effective() != e2.canonical())
    throw std::invalid_argument(
        "compose_equivalences: middle complexes differ");
  MergeResult m = merge_reductions(e1.right, e2.left);
  return Equivalence{compose_reductions(m.to_first, e1.left),
                     compose_reductions(m.to_second, e2.right)};
}

// rho: A => C plus e: C <= D => E  -->  A <= Dhat => E.
inline Equivalence reduction_then_equivalence(const Reduction& rho,
                                              const Equivalence& e) {
  if (rho.bottom != e.canonical())
    throw std::invalid_argument(
        "reduction_then_equivalence: complexes differ");
  MergeResult m = merge_reductions(rho, e.left);
  return Equivalence{m.to_first, compose_reductions(m.to_second, e.right)};
}

// --------------------------------------------------------------------------
// Identity suite: checks the five reduction identities plus the chain-map
// conditions on sampled generators.

struct IdentityReport {
  bool ok = true;
  std::string detail;
  void fail(const std::string& what) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

inline IdentityReport check_reduction(const Reduction& r, int min_deg,
                                      int max_deg, int per_degree, Rng& rng) {
  IdentityReport rep;
  for (int n = min_deg; n <= max_deg && rep.ok; ++n) {
    for (const Gen& x : r.top->sample(n, per_degree, rng)) {
      Combination c(n, x);
      Combination dc = r.top->diff(c);
      if (!r.top->diff(dc).empty()) rep.fail("top d d != 0 @deg " + std::to_string(n) + " on " + x.str());
      Combination lhs = cmb_add(r.g(r.f(c)),
                                cmb_add(r.top->diff(r.h(c)), r.h(dc)));
      if (!(lhs == c)) rep.fail("gf+dh+hd != 1 @deg " + std::to_string(n) + " on " + x.str());
      if (!r.f(r.h(c)).empty()) rep.fail("f h != 0 @deg " + std::to_string(n));
      if (!r.h(r.h(c)).empty()) rep.fail("h h != 0 @deg " + std::to_string(n));
      if (!(cmb_sub(r.bottom->diff(r.f(c)), r.f(dc)).empty()))
        rep.fail("f not chain @deg " + std::to_string(n));
      if (!rep.ok) break;
    }
    for (const Gen& y : r.bottom->sample(n, per_degree, rng)) {
      Combination c(n, y);
      Combination dc = r.bottom->diff(c);
      if (!r.bottom->diff(dc).empty()) rep.fail("bottom d d != 0 @deg " + std::to_string(n));
      if (!(r.f(r.g(c)) == c)) rep.fail("f g != 1 @deg " + std::to_string(n) + " on " + y.str());
      if (!r.h(r.g(c)).empty()) rep.fail("h g != 0 @deg " + std::to_string(n));
      if (!(cmb_sub(r.top->diff(r.g(c)), r.g(dc)).empty()))
        rep.fail("g not chain @deg " + std::to_string(n));
      if (!rep.ok) break;
    }
  }
  return rep;
}

inline IdentityReport check_equivalence(const Equivalence& e, int min_deg,
                                        int max_deg, int per_degree,
                                        Rng& rng) {
  IdentityReport rep = check_reduction(e.left, min_deg, max_deg, per_degree, rng);
  if (!rep.ok) { rep.detail = "left: " + rep.detail; return rep; }
  rep = check_reduction(e.right, min_deg, max_deg, per_degree, rng);
  if (!rep.ok) rep.detail = "right: " + rep.detail;
  return rep;
}

// --------------------------------------------------------------------------
// Cone of an equivalence along a chain map between canonical complexes.
// Produces an equivalence for Cone(f) whose effective side is a
// (perturbed) cone of effective complexes.

inline Equivalence cone_equivalence(const Morphism& f, const Equivalence& eA,
                                    const Equivalence& eB) {
  if (f.source() != eA.canonical() || f.target() != eB.canonical())
    throw std::invalid_argument("cone_equivalence: f endpoints mismatch");
  CxPtr DA = eA.top(), DB = eB.top();
  // Lift f to the tops: fhat = gB . f . fA  (strictly compatible with the
  // left reductions).
  Morphism fhat = compose(eB.left.g, compose(f, eA.left.f));
  Morphism fhat_m(DA, DB, 0,
                  [fhat](int n, const Gen& x) { return fhat(n, x); });
  CxPtr top = cone_complex(fhat_m);
  CxPtr bottom_can = cone_complex(f);

  // Left reduction Cone(fhat) => Cone(f): diagonal of the left reductions
  // with a sign flip on the source homotopy; all identities are exact.
  Morphism fBl = eB.left.f, gBl = eB.left.g, hBl = eB.left.h;
  Morphism fAl = eA.left.f, gAl = eA.left.g, hAl = eA.left.h;
  auto cone_diag = [](const Morphism& onB, const Morphism& onA, int shift,
                      Int a_sign) {
    return [onB, onA, shift, a_sign](int n, const Gen& g) {
      if (cone_is_src(g)) {
        Combination r = onA(Combination(n - 1, cone_inner(g)));
        std::vector<Combination::Term> terms;
        for (const auto& t : r.terms())
          terms.emplace_back(a_sign * t.first, cone_src_gen(t.second));
        return Combination::make(n + shift, std::move(terms));
      }
      Combination r = onB(Combination(n, cone_inner(g)));
      std::vector<Combination::Term> terms;
      for (const auto& t : r.terms())
        terms.emplace_back(t.first, cone_btm_gen(t.second));
      return Combination::make(n + shift, std::move(terms));
    };
  };
  Reduction left{top, bottom_can,
                 Morphism(top, bottom_can, 0, cone_diag(fBl, fAl, 0, 1)),
                 Morphism(bottom_can, top, 0, cone_diag(gBl, gAl, 0, 1)),
                 Morphism(top, top, 1, cone_diag(hBl, hAl, 1, -1),
                          homotopy_cache_budget())};

  // Right reduction: diagonal reduction of the *uncoupled* block sum onto
  // EB ⊕ EA[1], then BPL with the 2-nilpotent coupling (b,a) -> (fhat a, 0).
  Morphism fBr = eB.right.f, gBr = eB.right.g, hBr = eB.right.h;
  Morphism fAr = eA.right.f, gAr = eA.right.g, hAr = eA.right.h;
  Morphism zero_m = zero_morphism(DA, DB, 0);
  CxPtr top_base = cone_complex(zero_m);
  CxPtr bottom_eff = cone_complex(
      Morphism(eA.effective(), eB.effective(), 0,
               [](int n, const Gen&) { return Combination(n); }));
  Reduction base{top_base, bottom_eff,
                 Morphism(top_base, bottom_eff, 0, cone_diag(fBr, fAr, 0, 1)),
                 Morphism(bottom_eff, top_base, 0, cone_diag(gBr, gAr, 0, 1)),
                 Morphism(top_base, top_base, 1, cone_diag(hBr, hAr, 1, -1),
                          homotopy_cache_budget())};
  Morphism delta(top_base, top_base, -1, [fhat](int n, const Gen& g) {
    if (!cone_is_src(g)) return Combination(n - 1);
    Combination r = fhat(Combination(n - 1, cone_inner(g)));
    std::vector<Combination::Term> terms;
    for (const auto& t : r.terms())
      terms.emplace_back(t.first, cone_btm_gen(t.second));
    return Combination::make(n - 1, std::move(terms));
  });
  Reduction right = basic_perturbation(base, delta, 8);
  // The perturbed base top has the same differential as Cone(fhat);
  // rebind so both reductions share the identical top object.
  right.top = top;
  {
    Morphism rf = right.f, rg = right.g, rh = right.h;
    CxPtr eff = right.bottom;
    right.f = Morphism(top, eff, 0,
                       [rf](int n, const Gen& x) { return rf(n, x); });
    right.g = Morphism(eff, top, 0,
                       [rg](int n, const Gen& x) { return rg(n, x); });
    right.h = Morphism(top, top, 1,
                       [rh](int n, const Gen& x) { return rh(n, x); },
                       homotopy_cache_budget());
  }
  return Equivalence{left, right};
}

}  // namespace catk
