#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace catk;
using namespace catk::testing;

namespace {

void require_identities(const Reduction& r, int max_deg, Rng& rng,
                        int per_degree = 25) {
  IdentityReport rep = check_reduction(r, 0, max_deg, per_degree, rng);
  INFO(rep.detail);
  CHECK(rep.ok);
}

DisguisedComplex random_reduction(Rng& rng, std::vector<int> dims = {3, 5, 5,
                                                                     4, 3}) {
  ElementaryData e = random_elementary(dims, rng, true, 0.7);
  return disguised_elementary(e, rng, "rand");
}

}  // namespace

TEST_CASE("trivial reduction") {
  Rng rng(1);
  DisguisedComplex d = random_reduction(rng);
  Reduction t = trivial_reduction(d.top);
  require_identities(t, 4, rng);
  for (const Gen& g : d.top->sample(2, 10, rng)) {
    Combination c(2, g);
    CHECK(t.f(t.g(c)) == c);
    CHECK(t.h(c).empty());
  }
}

TEST_CASE("disguised elementary reductions satisfy the identity suite") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    DisguisedComplex d = random_reduction(rng);
    require_identities(d.red, 4, rng);
  }
}

TEST_CASE("compose_reductions") {
  Rng rng(3);
  DisguisedComplex d = random_reduction(rng);
  SUBCASE("identity laws") {
    Reduction left = compose_reductions(trivial_reduction(d.top), d.red);
    Reduction right = compose_reductions(d.red, trivial_reduction(d.bottom));
    require_identities(left, 4, rng);
    require_identities(right, 4, rng);
    for (const Gen& g : d.top->sample(2, 10, rng)) {
      Combination c(2, g);
      CHECK(left.f(c) == d.red.f(c));
      CHECK(right.f(c) == d.red.f(c));
      CHECK(left.h(c) == d.red.h(c));
      CHECK(right.h(c) == d.red.h(c));
    }
  }
  SUBCASE("mismatched complexes error") {
    CHECK_THROWS(compose_reductions(d.red, d.red));
  }
  SUBCASE("chained with a second reduction; associativity on samples") {
    // Build a reduction on the bottom (free) complex and compose.
    Rng rng2(4);
    ElementaryData e2 = random_elementary(
        {d.bottom->basis(0).empty() ? 0 : (int)d.bottom->basis(0).size(),
         (int)d.bottom->basis(1).size(), (int)d.bottom->basis(2).size(),
         (int)d.bottom->basis(3).size(), (int)d.bottom->basis(4).size()},
        rng2, true, 0.0);
    // pair_prob 0: the second reduction is trivial-shaped but disguised.
    DisguisedComplex d2 = disguised_elementary(e2, rng2, "bot");
    // Rebind d2's top to d.bottom: same dims, same zero differential.
    Reduction rho2{d.bottom, d2.bottom,
                   Morphism(d.bottom, d2.bottom, 0,
                            [f = d2.red.f](int n, const Gen& g) { return f(n, g); }),
                   Morphism(d2.bottom, d.bottom, 0,
                            [g2 = d2.red.g](int n, const Gen& g) { return g2(n, g); }),
                   Morphism(d.bottom, d.bottom, 1,
                            [h = d2.red.h](int n, const Gen& g) { return h(n, g); })};
    Reduction comp = compose_reductions(d.red, rho2);
    require_identities(comp, 4, rng);
  }
}

TEST_CASE("easy perturbation") {
  Rng rng(5);
  DisguisedComplex d = random_reduction(rng);
  SUBCASE("zero perturbation leaves values unchanged") {
    Reduction r = easy_perturbation(d.red, zero_morphism(d.bottom, d.bottom, -1));
    for (int n = 0; n <= 4; ++n)
      for (const Gen& g : d.top->sample(n, 5, rng)) {
        CHECK(r.top->diff_gen(n, g) == d.top->diff_gen(n, g));
        CHECK(r.h(n, g) == d.red.h(n, g));
      }
  }
  SUBCASE("valid bottom perturbation") {
    // Any differential works on the zero-differential bottom; pick a random
    // elementary one on the same ranks.
    std::vector<int> bdims;
    for (int n = 0; n <= 4; ++n)
      bdims.push_back(static_cast<int>(d.bottom->basis(n).size()));
    Rng rng2(6);
    ElementaryData pe = random_elementary(bdims, rng2, false, 0.8);
    Morphism delta(d.bottom, d.bottom, -1, [pe](int n, const Gen& g) {
      Combination out(n - 1);
      if (n < 1 || n >= static_cast<int>(pe.dims.size())) return out;
      int j = static_cast<int>(g.items()[2].num_value());
      std::vector<Combination::Term> terms;
      for (int i = 0; i < pe.dims[n - 1]; ++i)
        if (pe.d[n].get(i, j) != 0)
          terms.emplace_back(pe.d[n].get(i, j), mat_gen(n - 1, i));
      return Combination::make(n - 1, std::move(terms));
    });
    Reduction r = easy_perturbation(d.red, delta);
    require_identities(r, 4, rng);
    // Top and bottom homology agree after the perturbation.
    for (int n = 0; n <= 3; ++n) CHECK(homology(r.top, n) == homology(r.bottom, n));
  }
  SUBCASE("trivial reduction: both differentials become d + delta") {
    Reduction t = trivial_reduction(d.bottom);
    Morphism delta(d.bottom, d.bottom, -1, [](int n, const Gen&) {
      return Combination(n - 1);
    });
    Reduction r = easy_perturbation(t, delta);
    for (const Gen& g : d.bottom->sample(2, 5, rng))
      CHECK(r.top->diff_gen(2, g) == r.bottom->diff_gen(2, g));
  }
}

TEST_CASE("basic perturbation: documented 4-generator example") {
  // D = C ⊕ E with C = Z e1' (d = 0), E = (e2 -> e1), h(e1) = e2,
  // delta(e2) = e1'.  The computed bottom perturbation is zero and the
  // perturbed top has H1 = Z.
  std::vector<int> dims = {0, 2, 1};  // deg1: e1, e1'; deg2: e2
  std::vector<IntMatrix> d(3);
  d[2] = IntMatrix(2, 1);
  d[2].set(0, 0, 1);  // d e2 = e1
  CxPtr D = matrix_complex("D", dims, d);
  CxPtr C = matrix_complex("C", {0, 1}, std::vector<IntMatrix>(2));
  Gen e1 = mat_gen(1, 0), e1p = mat_gen(1, 1), e2 = mat_gen(2, 0);
  Gen c1 = mat_gen(1, 0);
  Morphism f(D, C, 0, [e1p, c1](int n, const Gen& g) {
    if (n == 1 && g == e1p) return Combination(1, c1);
    return Combination(n);
  });
  Morphism g(C, D, 0, [e1p](int n, const Gen&) { return Combination(1, e1p); });
  Morphism h(D, D, 1, [e1, e2](int n, const Gen& x) {
    if (n == 1 && x == e1) return Combination(2, e2);
    return Combination(n + 1);
  });
  Reduction rho{D, C, f, g, h};
  Rng rng(7);
  require_identities(rho, 2, rng);

  Morphism delta(D, D, -1, [e2, e1p](int n, const Gen& x) {
    if (n == 2 && x == e2) return Combination(1, e1p, -1);
    return Combination(n - 1);
  });
  // (d + delta)^2 = 0 since both land in degree <= 1 with d = 0 there.
  Reduction r = basic_perturbation(rho, delta);
  require_identities(r, 2, rng);
  CHECK(r.bottom->diff_gen(1, c1).empty());  // computed delta_C = 0
  CHECK(homology(r.top, 1).str() == "Z");
  CHECK(homology(r.bottom, 1).str() == "Z");
}

TEST_CASE("basic perturbation: nilpotency violation detected") {
  // Acyclic pair e1 -> e0, bottom 0, h(e0) = e1, delta(e1) = e0 gives
  // h delta (e1) = e1: the series cannot terminate.
  std::vector<IntMatrix> d(2);
  d[1] = IntMatrix(1, 1);
  d[1].set(0, 0, 1);
  CxPtr D = matrix_complex("pair", {1, 1}, d);
  CxPtr zero = matrix_complex("0", {0, 0}, {});
  Gen e0 = mat_gen(0, 0), e1 = mat_gen(1, 0);
  Morphism f(D, zero, 0, [](int n, const Gen&) { return Combination(n); });
  Morphism g(zero, D, 0, [](int n, const Gen&) { return Combination(n); });
  Morphism h(D, D, 1, [e0, e1](int n, const Gen& x) {
    if (n == 0 && x == e0) return Combination(1, e1);
    return Combination(n + 1);
  });
  Morphism delta(D, D, -1, [e0, e1](int n, const Gen& x) {
    if (n == 1 && x == e1) return Combination(0, e0, -1);
    return Combination(n - 1);
  });
  Reduction rho{D, zero, f, g, h};
  Reduction r = basic_perturbation(rho, delta, 100);
  CHECK_THROWS_WITH_AS(r.top->diff(r.h(Combination(0, e0))),
                       doctest::Contains("nilpotency"), std::runtime_error);
}

TEST_CASE("BPL oracle: bottom homology equals perturbed top homology") {
  // The perturbation is built as the horizontal differential of a random
  // bigraded complex whose vertical part is the reduction's differential.
  // The reduction homotopy preserves the horizontal degree while the
  // perturbation strictly lowers it, so the nilpotency hypothesis holds by
  // construction and the perturbed homology has an independent oracle: the
  // tensor product of the two factors computed directly from its boundary
  // matrices.
  Rng rng(20260826);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> adims = {1, 2, 1};
    std::vector<int> bdims = {2, 3, 2};
    ElementaryData ae = random_elementary(adims, rng, false, 0.8);
    DisguisedComplex b = random_reduction(rng, bdims);

    std::vector<IntMatrix> azero(adims.size());
    CxPtr a0 = matrix_complex("bplA0", adims, azero);
    CxPtr top = tensor_complex(a0, b.top);
    Reduction rho = tensor_reductions(trivial_reduction(a0), b.red);

    const std::vector<IntMatrix> ad = ae.d;
    Morphism delta(top, top, -1, [top, ad, adims](int n, const Gen& g) {
      int p = tensor_left_degree(g);
      const Gen& a = tensor_left(g);
      const Gen& bg = tensor_right(g);
      std::vector<Combination::Term> terms;
      if (p >= 1 && p < static_cast<int>(adims.size())) {
        int j = static_cast<int>(a.items()[2].num_value());
        for (int i = 0; i < adims[p - 1]; ++i)
          if (ad[p].get(i, j) != 0)
            terms.emplace_back(ad[p].get(i, j),
                               tensor_gen(p - 1, mat_gen(p - 1, i), bg));
      }
      return Combination::make(n - 1, std::move(terms));
    });

    Reduction r = basic_perturbation(rho, delta, 64);
    IdentityReport rep = check_reduction(r, 0, 4, 12, rng);
    INFO(rep.detail);
    REQUIRE(rep.ok);

    // Independent oracle: the genuinely tensored complex with both factors
    // carrying their real differentials.
    CxPtr areal = matrix_complex("bplAreal", adims, ae.d);
    CxPtr honest = tensor_complex(areal, b.top);
    for (int n = 0; n <= 4; ++n) {
      AbGroupFT want = homology(honest, n);
      CHECK(homology(r.top, n) == want);
      CHECK(homology(r.bottom, n) == want);
    }
  }
}

TEST_CASE("tensor_reductions") {
  Rng rng(9);
  SUBCASE("tensor of trivial reductions acts as trivial") {
    DisguisedComplex a = random_reduction(rng, {2, 3, 2});
    DisguisedComplex b = random_reduction(rng, {2, 2, 2});
    Reduction t = tensor_reductions(trivial_reduction(a.top),
                                    trivial_reduction(b.top));
    require_identities(t, 3, rng);
    for (const Gen& g : t.top->sample(2, 10, rng)) {
      Combination c(2, g);
      CHECK(t.f(c) == c);
      CHECK(t.h(c).empty());
    }
  }
  SUBCASE("identities and homology transfer") {
    DisguisedComplex a = random_reduction(rng, {2, 3, 3, 2});
    DisguisedComplex b = random_reduction(rng, {2, 3, 2});
    Reduction t = tensor_reductions(a.red, b.red);
    require_identities(t, 4, rng);
    for (int n = 0; n <= 4; ++n)
      CHECK(homology(t.top, n) == homology(t.bottom, n));
  }
}

TEST_CASE("merge and compose_equivalences") {
  Rng rng(10);
  DisguisedComplex d = random_reduction(rng);
  Equivalence e1 = equivalence_from_right_reduction(d.red);

  SUBCASE("compose with identity equivalence of the effective complex") {
    Equivalence id_e = trivial_equivalence(d.bottom);
    Equivalence c = compose_equivalences(e1, id_e);
    IdentityReport rep = check_equivalence(c, 0, 4, 20, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
    for (int n = 0; n <= 4; ++n) {
      CHECK(homology(c.effective(), n) == homology(d.bottom, n));
    }
  }
  SUBCASE("two genuine equivalences chained preserve homology") {
    // Second equivalence: from a reduction whose *canonical* side is
    // d.bottom.  Pad d.bottom's ranks with exact pairs so the disguised
    // complex retracts onto a free part with exactly d.bottom's ranks.
    std::vector<int> bdims;
    for (int n = 0; n <= 4; ++n)
      bdims.push_back(static_cast<int>(d.bottom->basis(n).size()));
    ElementaryData e = padded_elementary(bdims, 2);
    DisguisedComplex d2 = disguised_elementary(e, rng, "mid");
    for (int n = 0; n <= 4; ++n)
      REQUIRE(d2.bottom->basis(n).size() == d.bottom->basis(n).size());
    Reduction lifted{d2.top, d.bottom,
                     Morphism(d2.top, d.bottom, 0,
                              [f = d2.red.f](int n, const Gen& g) { return f(n, g); }),
                     Morphism(d.bottom, d2.top, 0,
                              [g2 = d2.red.g](int n, const Gen& g) { return g2(n, g); }),
                     d2.red.h};
    Equivalence e2{lifted, trivial_reduction(d2.top)};
    Equivalence c = compose_equivalences(e1, e2);
    IdentityReport rep = check_equivalence(c, 0, 4, 20, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
    for (int n = 0; n <= 4; ++n)
      CHECK(homology(c.effective(), n) == homology(d.top, n));
  }
  SUBCASE("middle mismatch rejected") {
    Equivalence other = trivial_equivalence(d.top);
    CHECK_THROWS(compose_equivalences(e1, other));
  }
}

TEST_CASE("reduction_then_equivalence") {
  Rng rng(12);
  DisguisedComplex d = random_reduction(rng);
  // rho: top => bottom; equivalence of bottom: trivial.
  Equivalence e = trivial_equivalence(d.bottom);
  Equivalence c = reduction_then_equivalence(d.red, e);
  IdentityReport rep = check_equivalence(c, 0, 4, 20, rng);
  INFO(rep.detail);
  CHECK(rep.ok);
  CHECK(c.canonical() == d.top);
  for (int n = 0; n <= 4; ++n)
    CHECK(homology(c.effective(), n) == homology(d.top, n));
}

TEST_CASE("normalize_contraction") {
  Rng rng(13);
  DisguisedComplex d = random_reduction(rng);
  // Spoil the homotopy: h' = h + g f h g f ... simplest spoil keeping
  // d h' + h' d = 1 - g f is h' = h + (chain homotopy-compatible junk)?
  // Instead, start from a *weak* contraction: h_w = h + g q f where q is
  // any degree +1 map of the bottom (bottom differential is zero, so
  // d h_w + h_w d = 1 - g f still holds, but f h_w and h_w g are nonzero).
  std::vector<int> bdims;
  for (int n = 0; n <= 4; ++n)
    bdims.push_back(static_cast<int>(d.bottom->basis(n).size()));
  Morphism q(d.bottom, d.bottom, 1, [bdims](int n, const Gen&) {
    if (n + 1 > 4 || bdims[n + 1] == 0) return Combination(n + 1);
    return Combination(n + 1, mat_gen(n + 1, 0), 3);
  });
  Morphism hw = add(d.red.h, compose(d.red.g, compose(q, d.red.f)));
  Reduction norm = normalize_contraction(d.top, d.bottom, d.red.f, d.red.g, hw);
  require_identities(norm, 4, rng);
}

TEST_CASE("cone_equivalence") {
  Rng rng(14);
  SUBCASE("zero map: direct sum with shift") {
    DisguisedComplex a = random_reduction(rng, {2, 3, 2});
    DisguisedComplex b = random_reduction(rng, {2, 2, 3});
    Equivalence eA = equivalence_from_right_reduction(a.red);
    Equivalence eB = equivalence_from_right_reduction(b.red);
    Morphism zero = zero_morphism(eA.canonical(), eB.canonical(), 0);
    Equivalence c = cone_equivalence(zero, eA, eB);
    IdentityReport rep = check_equivalence(c, 0, 3, 20, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
    for (int n = 0; n <= 3; ++n) {
      AbGroupFT hb = homology(b.top, n);
      AbGroupFT ha = n >= 1 ? homology(a.top, n - 1) : AbGroupFT{};
      AbGroupFT got = homology(c.effective(), n);
      CHECK(got.free_rank == hb.free_rank + ha.free_rank);
    }
  }
  SUBCASE("multiplication by 2 on a sphere gives a Moore space") {
    std::vector<int> dims(3, 0);
    dims[0] = 1;
    dims[2] = 1;
    CxPtr s2 = matrix_complex("S2", dims, std::vector<IntMatrix>(3));
    Equivalence eA = trivial_equivalence(s2);
    Equivalence eB = trivial_equivalence(s2);
    Morphism times2(s2, s2, 0, [](int n, const Gen& g) {
      return Combination(n, g, n == 2 ? 2 : 0);
    });
    Equivalence c = cone_equivalence(times2, eA, eB);
    IdentityReport rep = check_equivalence(c, 0, 3, 10, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
    CHECK(homology(c.effective(), 2).str() == "Z/2Z");
  }
}
