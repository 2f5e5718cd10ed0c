#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <vector>

#include "catk/simp.hpp"
#include "support.hpp"
#include "support_simp.hpp"

using namespace catk;

namespace {

AbGroupFT space_h(const SpaceEq& se, int n) {
  return homology(se.eq.effective(), n);
}

}  // namespace

TEST_CASE("degeneracy list algebra") {
  std::vector<int> L;
  L = degen_insert(L, 0);        // s_0
  L = degen_insert(L, 0);        // s_0 s_0 = s_1 s_0
  CHECK(L == std::vector<int>{1, 0});
  L = degen_insert(L, 1);        // s_1 s_1 s_0 = s_2 s_1 s_0
  CHECK(L == std::vector<int>{2, 1, 0});
  CHECK(degen_extract(L, 1) == std::vector<int>{1, 0});
  // insert/extract round-trip
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> M;
    for (int k = 0; k < 5; ++k)
      M = degen_insert(M, static_cast<int>(rng() % static_cast<unsigned>(k + 3)));
    for (std::size_t k = 0; k + 1 < M.size(); ++k) CHECK(M[k] > M[k + 1]);
    int j = M[rng() % M.size()];
    CHECK(degen_insert(degen_extract(M, j), j) == M);
  }
}

TEST_CASE("apply_face basics") {
  SpaceEq s1 = sphere_space(1);
  Gen pt = s1.space->base_point();
  Simplex s0pt = apply_degen(0, Simplex{{}, pt});
  CHECK(apply_face(s1.space, 0, 1, s0pt) == Simplex{{}, pt});
  CHECK(apply_face(s1.space, 1, 1, s0pt) == Simplex{{}, pt});

  SpaceEq d2 = delta_space(2);
  Gen top = Gen::list_of(Gen::num(0), Gen::num(1), Gen::num(2));
  Simplex e02 = apply_face(d2.space, 1, 2, Simplex{{}, top});
  CHECK(e02 == (Simplex{{}, Gen::list_of(Gen::num(0), Gen::num(2))}));
  CHECK_THROWS(apply_face(d2.space, 3, 2, Simplex{{}, top}));
}

TEST_CASE("simplicial identities on all constructed spaces") {
  Rng rng(77);
  check_simplicial_identities(delta_space(3).space, 4, 60, rng);
  check_simplicial_identities(sphere_space(3).space, 5, 60, rng);
  check_simplicial_identities(moore_space(2, 4).space, 6, 60, rng);
  check_simplicial_identities(moore_space(3, 2).space, 4, 60, rng);
  check_simplicial_identities(pseudo_projective_space(4).space, 4, 60, rng);
  check_simplicial_identities(r_proj_space(4).space, 8, 80, rng);
  SsPtr prod = product_space(delta_space(2).space, delta_space(1).space);
  check_simplicial_identities(prod, 4, 80, rng);
}

TEST_CASE("nchains") {
  SUBCASE("sphere basis") {
    CxPtr c = nchains(sphere_space(2).space);
    CHECK(c->basis(0).size() == 1);
    CHECK(c->basis(1).size() == 0);
    CHECK(c->basis(2).size() == 1);
  }
  SUBCASE("delta(1) edge differential") {
    CxPtr c = nchains(delta_space(1).space);
    Gen e01 = Gen::list_of(Gen::num(0), Gen::num(1));
    Combination d = c->diff(Combination(1, e01));
    Combination want =
        cmb_sub(Combination(0, Gen::list_of(Gen::num(1))),
                Combination(0, Gen::list_of(Gen::num(0))));
    CHECK(d == want);
  }
  SUBCASE("d d = 0 on delta(3)") {
    CxPtr c = nchains(delta_space(3).space);
    for (int n = 1; n <= 3; ++n)
      for (const Gen& g : c->basis(n))
        CHECK(c->diff(c->diff(Combination(n, g))).empty());
  }
}

TEST_CASE("space homology") {
  SUBCASE("sphere(3)") {
    SpaceEq s = sphere_space(3);
    CHECK(space_h(s, 0).str() == "Z");
    CHECK(space_h(s, 1).str() == "0");
    CHECK(space_h(s, 2).str() == "0");
    CHECK(space_h(s, 3).str() == "Z");
  }
  SUBCASE("moore(2,4)") {
    SpaceEq s = moore_space(2, 4);
    CHECK(space_h(s, 0).str() == "Z");
    CHECK(space_h(s, 4).str() == "Z/2Z");
    CHECK(space_h(s, 5).str() == "0");
  }
  SUBCASE("moore(5,2) via suspension") {
    SpaceEq s = moore_space(5, 2);
    CHECK(space_h(s, 0).str() == "Z");
    CHECK(space_h(s, 1).str() == "0");
    CHECK(space_h(s, 2).str() == "Z/5Z");
    CHECK(space_h(s, 3).str() == "0");
  }
  SUBCASE("pseudo projective plane") {
    SpaceEq s = pseudo_projective_space(3);
    CHECK(space_h(s, 0).str() == "Z");
    CHECK(space_h(s, 1).str() == "Z/3Z");
    CHECK(space_h(s, 2).str() == "0");
  }
  SUBCASE("suspension of a sphere") {
    SpaceEq s = suspension_space(sphere_space(2));
    for (int n = 0; n <= 3; ++n)
      CHECK(space_h(s, n).str() == space_h(sphere_space(3), n).str());
  }
  SUBCASE("r_proj_space(4) degrees 4..7") {
    SpaceEq s = r_proj_space(4);
    CHECK(space_h(s, 0).str() == "Z");
    CHECK(space_h(s, 4).str() == "Z");
    CHECK(space_h(s, 5).str() == "Z/2Z");
    CHECK(space_h(s, 6).str() == "0");
    CHECK(space_h(s, 7).str() == "Z/2Z");
  }
  SUBCASE("r_proj_space(1) is P^inf(R)") {
    SpaceEq s = r_proj_space(1);
    CHECK(space_h(s, 1).str() == "Z/2Z");
    CHECK(space_h(s, 2).str() == "0");
    CHECK(space_h(s, 3).str() == "Z/2Z");
  }
}

TEST_CASE("products") {
  SUBCASE("square has two nondegenerate 2-simplices") {
    SsPtr sq = product_space(delta_space(1).space, delta_space(1).space);
    CHECK(sq->basis(2).size() == 2);
    CHECK(sq->basis(0).size() == 4);
    CHECK(sq->basis(1).size() == 5);
  }
  SUBCASE("base point is the pair of base points") {
    SsPtr p = product_space(sphere_space(1).space, sphere_space(2).space);
    Simplex l = crpr_left(p->base_point());
    Simplex r = crpr_right(p->base_point());
    CHECK(l.base == sphere_space(1).space->base_point());
    CHECK(r.base == sphere_space(2).space->base_point());
  }
  SUBCASE("Kuenneth for S2 x S2") {
    CxPtr c = nchains(product_space(sphere_space(2).space,
                                    sphere_space(2).space));
    CHECK(homology(c, 0).str() == "Z");
    CHECK(homology(c, 1).str() == "0");
    CHECK(homology(c, 2).str() == "Z + Z");
    CHECK(homology(c, 3).str() == "0");
    CHECK(homology(c, 4).str() == "Z");
  }
}

TEST_CASE("ez_reduction") {
  Rng rng(404);
  SUBCASE("square: f g = id and the shuffle image") {
    SsPtr d1 = delta_space(1).space;
    Reduction r = ez_reduction(d1, d1);
    Gen e1 = Gen::list_of(Gen::num(0), Gen::num(1));
    Gen t = tensor_gen(1, e1, e1);
    Combination c(2, t);
    CHECK(r.f(r.g(c)) == c);
    Combination gc = r.g(c);
    CHECK(gc.terms().size() == 2);
    Int coefsum = 0;
    for (const auto& tt : gc.terms()) coefsum += tt.first * tt.first;
    CHECK(coefsum == 2);  // both shuffles appear with unit coefficients
    IdentityReport rep = check_reduction(r, 0, 2, 12, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
  }
  SUBCASE("identity suite on Delta[2] x Delta[2]") {
    SsPtr d2 = delta_space(2).space;
    Reduction r = ez_reduction(d2, d2);
    IdentityReport rep = check_reduction(r, 0, 4, 25, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
  }
  SUBCASE("identity suite on a twisted-looking product") {
    Reduction r = ez_reduction(sphere_space(2).space, moore_space(2, 2).space);
    IdentityReport rep = check_reduction(r, 0, 5, 10, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
  }
  SUBCASE("bottom homology equals direct product homology") {
    std::vector<std::pair<SsPtr, SsPtr>> cases = {
        {delta_space(1).space, delta_space(1).space},
        {delta_space(2).space, delta_space(1).space},
        {sphere_space(2).space, sphere_space(2).space}};
    for (auto& [X, Y] : cases) {
      Reduction r = ez_reduction(X, Y);
      CxPtr direct = nchains(product_space(X, Y));
      for (int n = 0; n <= 4; ++n)
        CHECK(homology(r.bottom, n) == homology(direct, n));
    }
  }
}

TEST_CASE("disk_pasting") {
  Rng rng(505);
  SUBCASE("2-cell along constant faces adds a free H2 class") {
    SpaceEq s1 = sphere_space(1);
    std::vector<Simplex> faces(3, point_simplex(s1.space->base_point(), 1));
    SpaceEq glued = disk_pasting(s1, 2, faces, "bubble");
    CHECK(space_h(glued, 1).str() == "Z");
    CHECK(space_h(glued, 2).str() == "Z");
    IdentityReport rep = check_equivalence(glued.eq, 0, 3, 10, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
  }
  SUBCASE("3-cell on S2 by degree 2 gives a Moore space") {
    SpaceEq s2 = sphere_space(2);
    Gen cell = Gen::sym("s2");
    Simplex sig{{}, cell};
    Simplex dpt = point_simplex(s2.space->base_point(), 2);
    SpaceEq glued = disk_pasting(s2, 3, {sig, dpt, sig, dpt}, "m2");
    CHECK(space_h(glued, 2).str() == "Z/2Z");
    CHECK(space_h(glued, 3).str() == "0");
    IdentityReport rep = check_equivalence(glued.eq, 0, 4, 10, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
    check_simplicial_identities(glued.space, 5, 60, rng);
  }
  SUBCASE("incompatible faces are rejected with the violated identity") {
    SpaceEq d1 = delta_space(1);
    Gen e01 = Gen::list_of(Gen::num(0), Gen::num(1));
    Simplex e{{}, e01};
    Simplex s0v{{0}, Gen::list_of(Gen::num(0))};
    // d_0 f_1 = (0) but d_0 f_0 = (1): the identity d_0 d_1 = d_0 d_0 fails
    CHECK_THROWS_WITH_AS(disk_pasting(d1, 2, {e, s0v, e}, "bad"),
                         doctest::Contains("incompatible faces"),
                         std::invalid_argument);
    CHECK_THROWS_AS(disk_pasting(d1, 2, {e, e}, "short"),
                    std::invalid_argument);
  }
}
