#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <numeric>

#include "support.hpp"

using namespace catk;
using namespace catk::testing;

TEST_CASE("combination canonical form") {
  Gen g1 = Gen::sym("a"), g2 = Gen::sym("b");
  Combination c1(3, g1, 2);
  Combination c2(3, g1, -2);
  CHECK(cmb_add(c1, c2).empty());

  Combination s = cmb_add(Combination(1, g2), Combination(1, g1));
  REQUIRE(s.size() == 2);
  CHECK(s.terms()[0].second == g1);  // sorted
  CHECK(s.terms()[1].second == g2);

  // 3*(2 g1 + g2) - g2 = 6 g1 + 2 g2
  Combination t = cmb_add(Combination(2, g1, 2), Combination(2, g2, 1));
  Combination r = cmb_combine(3, t, -1, Combination(2, g2, 1));
  CHECK(r.coefficient(g1) == 6);
  CHECK(r.coefficient(g2) == 2);
  CHECK_THROWS(cmb_combine(1, Combination(1, g1), 1, Combination(2, g2)));
}

TEST_CASE("cmb_combine associativity and commutativity on random inputs") {
  Rng rng(5);
  std::uniform_int_distribution<int> gen_idx(0, 5), coeff(-4, 4);
  auto random_comb = [&] {
    std::vector<Combination::Term> terms;
    for (int i = 0; i < 4; ++i)
      terms.emplace_back(coeff(rng), Gen::num(gen_idx(rng)));
    return Combination::make(0, std::move(terms));
  };
  for (int t = 0; t < 100; ++t) {
    Combination a = random_comb(), b = random_comb(), c = random_comb();
    CHECK(cmb_add(a, b) == cmb_add(b, a));
    CHECK(cmb_add(cmb_add(a, b), c) == cmb_add(a, cmb_add(b, c)));
  }
}

TEST_CASE("gen serialization round trip via ordering") {
  Gen a = Gen::list_of(Gen::sym("x"), Gen::num(3));
  Gen b = Gen::list_of(Gen::sym("x"), Gen::num(3));
  CHECK(a == b);
  CHECK(a.str() == "(x 3)");
  CHECK(a.str() == b.str());
  CHECK((a <=> b) == std::strong_ordering::equal);
}

namespace {

// Minimal sphere model chain complex: Z in degrees 0 and n.
CxPtr sphere_chains(int n) {
  std::vector<int> dims(n + 1, 0);
  dims[0] = 1;
  dims[n] = 1;
  return matrix_complex("S" + std::to_string(n), dims,
                        std::vector<IntMatrix>(n + 1));
}

}  // namespace

TEST_CASE("diff_apply basics") {
  CxPtr s2 = sphere_chains(2);
  CHECK(s2->diff(Combination(2)).empty());
  CHECK(s2->diff(Combination(2, mat_gen(2, 0))).empty());
  CHECK_THROWS(s2->diff(Combination(1, Gen::sym("nope"))));
}

TEST_CASE("moore model differential") {
  // Z --2--> Z in degrees 5 -> 4 (the minimal Moore(Z/2,4) chain level).
  std::vector<int> dims(6, 0);
  dims[0] = dims[4] = dims[5] = 1;
  std::vector<IntMatrix> d(6);
  d[5] = IntMatrix(1, 1);
  d[5].set(0, 0, 2);
  CxPtr m = matrix_complex("Moore", dims, d);
  Combination dd = m->diff(Combination(5, mat_gen(5, 0)));
  CHECK(dd.coefficient(mat_gen(4, 0)) == 2);
  CHECK(homology(m, 4).str() == "Z/2Z");
  CHECK(homology(m, 5).trivial());
}

TEST_CASE("tensor complex Kunneth for spheres") {
  CxPtr t = tensor_complex(sphere_chains(2), sphere_chains(2));
  CHECK(homology(t, 0).str() == "Z");
  CHECK(homology(t, 1).trivial());
  CHECK(homology(t, 2).str() == "Z + Z");
  CHECK(homology(t, 3).trivial());
  CHECK(homology(t, 4).str() == "Z");
}

TEST_CASE("tensor with zero complex") {
  CxPtr z = matrix_complex("zero", {0, 0, 0}, {});
  CxPtr t = tensor_complex(sphere_chains(2), z);
  for (int n = 0; n <= 4; ++n) CHECK(t->basis(n).empty());
}

TEST_CASE("tensor Koszul sign gives d d = 0") {
  Rng rng(11);
  ElementaryData e = random_elementary({3, 4, 4, 3}, rng, false, 0.7);
  CxPtr a = matrix_complex("A", e.dims, e.d);
  ElementaryData e2 = random_elementary({2, 3, 3}, rng, false, 0.7);
  CxPtr b = matrix_complex("B", e2.dims, e2.d);
  CxPtr t = tensor_complex(a, b);
  for (int n = 0; n <= 6; ++n)
    for (const Gen& g : t->sample(n, 30, rng)) {
      Combination c(n, g);
      CHECK(t->diff(t->diff(c)).empty());
    }
}

TEST_CASE("cone complex") {
  CxPtr s2 = sphere_chains(2);
  SUBCASE("cone of identity is acyclic") {
    CxPtr c = cone_complex(identity_morphism(s2));
    for (int n = 0; n <= 4; ++n) CHECK(homology(c, n).trivial());
  }
  SUBCASE("cone of zero map shifts the source") {
    CxPtr c = cone_complex(zero_morphism(s2, s2, 0));
    CHECK(homology(c, 3).str() == "Z");  // source degree 2 shifted up
    CHECK(homology(c, 2).str() == "Z");  // target part
    CHECK(homology(c, 1).str() == "Z");  // source degree 0 shifted
  }
  SUBCASE("cone of multiplication by 2 is a Moore space") {
    Morphism times2(s2, s2, 0, [](int n, const Gen& g) {
      return Combination(n, g, n == 2 ? 2 : 1);
    });
    // times2 is *not* a chain map in degree 0 scaling, so restrict to the
    // honest chain map: multiply degree-2 part by 2, identity elsewhere is
    // fine here because all differentials vanish.
    CxPtr c = cone_complex(times2);
    CHECK(homology(c, 2).str() == "Z/2Z");
  }
}

TEST_CASE("d d = 0 on random generators of every constructed complex") {
  Rng rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    ElementaryData e = random_elementary({3, 4, 5, 4, 3}, rng, false, 0.6);
    CxPtr c = matrix_complex("rand", e.dims, e.d);
    for (int n = 0; n <= 4; ++n)
      for (const Gen& g : c->sample(n, 25, rng))
        CHECK(c->diff(c->diff(Combination(n, g))).empty());
  }
}

TEST_CASE("homology invariant under basis permutation") {
  Rng rng(31);
  ElementaryData e = random_elementary({4, 5, 5, 4}, rng, false, 0.7);
  CxPtr c = matrix_complex("perm-base", e.dims, e.d);
  std::vector<AbGroupFT> want;
  for (int n = 0; n <= 3; ++n) want.push_back(homology(c, n));

  // Shuffle each degree's basis with a permutation-conjugated differential.
  std::vector<std::vector<int>> perm(4), inv(4);
  for (int n = 0; n <= 3; ++n) {
    perm[n].resize(e.dims[n]);
    std::iota(perm[n].begin(), perm[n].end(), 0);
    std::shuffle(perm[n].begin(), perm[n].end(), rng);
    inv[n].resize(e.dims[n]);
    for (int i = 0; i < e.dims[n]; ++i) inv[n][perm[n][i]] = i;
  }
  std::vector<IntMatrix> d2(4);
  for (int n = 1; n <= 3; ++n) {
    d2[n] = IntMatrix(e.dims[n - 1], e.dims[n]);
    for (const auto& [rc, v] : e.d[n].entries())
      d2[n].set(inv[n - 1][rc.first], inv[n][rc.second], v);
  }
  CxPtr cp = matrix_complex("perm", e.dims, d2);
  for (int n = 0; n <= 3; ++n) CHECK(homology(cp, n) == want[static_cast<std::size_t>(n)]);
}

TEST_CASE("homology refuses locally effective complexes") {
  CxPtr c = make_complex("loc", nullptr,
                         [](int n, const Gen&) { return Combination(n - 1); },
                         nullptr);
  CHECK_THROWS_WITH_AS(homology(c, 1), doctest::Contains("locally effective"),
                       std::runtime_error);
}

TEST_CASE("registry labels") {
  CxPtr c = make_complex("Chain-Complex", nullptr,
                         [](int n, const Gen&) { return Combination(n - 1); },
                         nullptr);
  CHECK(registry_label(c->id()) ==
        "[K" + std::to_string(c->id()) + " Chain-Complex]");
}
