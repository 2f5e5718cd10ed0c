#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <string>
#include <vector>

#include "catk/em.hpp"
#include "catk/fib.hpp"
#include "support.hpp"
#include "support_simp.hpp"

using namespace catk;
using catk::detail::em_tuple_gen;

namespace {

// The Hopf twisting operator on the minimal S^2: the fundamental 2-simplex
// maps to the generator of K(Z,1), everything else is forced by the
// twisting-function identities.
std::function<Simplex(int, const Simplex&)> hopf_tau(const SGrpPtr& fib,
                                                     const Gen& pt,
                                                     const Gen& cell) {
  auto self = std::make_shared<std::function<Simplex(int, const Simplex&)>>();
  *self = [fib, pt, cell, self](int q, const Simplex& b) -> Simplex {
    if (b.base == pt) return fib->neutral(q - 1);
    if (b.dgs.empty()) return Simplex{{}, em_tuple_gen({1})};
    int j = b.dgs.front();
    if (j == 0) return fib->neutral(q - 1);
    Simplex rest{std::vector<int>(b.dgs.begin() + 1, b.dgs.end()), b.base};
    return apply_degen(j - 1, (*self)(q - 1, rest));
  };
  return *self;
}

std::function<Simplex(int, const Simplex&)> trivial_tau(const SGrpPtr& fib) {
  return [fib](int q, const Simplex&) { return fib->neutral(q - 1); };
}

}  // namespace

TEST_CASE("twisted product with trivial twist") {
  Rng rng(41);
  GroupEq kz = k_space_1(0);
  SpaceEq s2 = sphere_space(2);
  TwistingOperator t{s2.space, kz.grp, trivial_tau(kz.grp)};

  SUBCASE("twisting identities hold") {
    for (int trial = 0; trial < 60; ++trial) {
      int q = 1 + static_cast<int>(rng() % 4);
      Simplex b = random_simplex(s2.space, q, rng);
      std::string why;
      CAPTURE(why);
      CHECK(twisting_identities_ok(t, q, b, &why));
    }
  }
  SUBCASE("base point lifts to base point") {
    SsPtr tot = twisted_product(t);
    CHECK(crpr_left(tot->base_point()).base == s2.space->base_point());
    CHECK(crpr_right(tot->base_point()).base == kz.grp->set->base_point());
  }
  SUBCASE("total space homology equals the Kuenneth values") {
    Equivalence e = total_space_effective_homology(t, s2.eq, kz.eq);
    // S^2 x S^1
    CHECK(homology(e.effective(), 0).str() == "Z");
    CHECK(homology(e.effective(), 1).str() == "Z");
    CHECK(homology(e.effective(), 2).str() == "Z");
    CHECK(homology(e.effective(), 3).str() == "Z");
    CHECK(homology(e.effective(), 4).str() == "0");
    IdentityReport rep = check_equivalence(e, 0, 3, 8, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
  }
}

TEST_CASE("Hopf fibration") {
  Rng rng(42);
  GroupEq kz = k_space_1(0);
  SpaceEq s2 = sphere_space(2);
  TwistingOperator t{s2.space, kz.grp,
                     hopf_tau(kz.grp, s2.space->base_point(),
                              Gen::sym("s2"))};

  SUBCASE("twisting identities on 200 random simplices") {
    for (int trial = 0; trial < 200; ++trial) {
      int q = 1 + static_cast<int>(rng() % 5);
      Simplex b = random_simplex(s2.space, q, rng);
      std::string why;
      CAPTURE(why);
      REQUIRE(twisting_identities_ok(t, q, b, &why));
    }
  }
  SUBCASE("simplicial identities of the twisted product") {
    SsPtr tot = twisted_product(t);
    check_simplicial_identities(tot, 5, 200, rng);
  }
  SUBCASE("the total space is a 3-sphere") {
    Equivalence e = total_space_effective_homology(t, s2.eq, kz.eq);
    CHECK(homology(e.effective(), 0).str() == "Z");
    CHECK(homology(e.effective(), 1).str() == "0");
    CHECK(homology(e.effective(), 2).str() == "0");
    CHECK(homology(e.effective(), 3).str() == "Z");
    CHECK(homology(e.effective(), 4).str() == "0");
    IdentityReport rep = check_equivalence(e, 0, 3, 8, rng);
    INFO(rep.detail);
    CHECK(rep.ok);
  }
}

TEST_CASE("twisted product over a Moore base with torsion fiber") {
  Rng rng(43);
  GroupEq k2 = k_space_1(2);
  SpaceEq m22 = moore_space(2, 2);
  TwistingOperator t{m22.space, k2.grp, trivial_tau(k2.grp)};
  Equivalence e = total_space_effective_homology(t, m22.eq, k2.eq);
  // Kuenneth for M(Z/2,2) x K(Z/2,1)
  CHECK(homology(e.effective(), 0).str() == "Z");
  CHECK(homology(e.effective(), 1).str() == "Z/2Z");
  CHECK(homology(e.effective(), 2).str() == "Z/2Z");
  CHECK(homology(e.effective(), 3).str() == "Z/2Z + Z/2Z");
  IdentityReport rep = check_equivalence(e, 0, 3, 6, rng);
  INFO(rep.detail);
  CHECK(rep.ok);
}
