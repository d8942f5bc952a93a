#include <random>

#include "doctest.h"
#include "linevo/errors.hpp"
#include "linevo/model.hpp"
#include "linevo/symkernel.hpp"

using namespace linevo;

namespace {
Expr P_(const char* s) { return parse_expr(s, SymbolTable{"c", "s"}); }
const Expr t = Expr::symbol("t");
const Expr x = Expr::symbol("x");
using VF = VectorField;
}  // namespace

TEST_CASE("bracket relations") {
  CHECK(lie_bracket(VF::D(1), VF::D(t), 3) == VF::D(1));
  CHECK(lie_bracket(VF::D(t), VF::P(1), 3) == VF::P(Expr::rational(-1, 3)));
  CHECK(lie_bracket(VF::D(t), VF::P(1), 5) == VF::P(Expr::rational(-1, 5)));
  CHECK(lie_bracket(VF::I(t), VF::I(P_("exp(t)")), 3).is_zero());
  CHECK(lie_bracket(VF::D(t * t), VF::I(t), 4) == VF::I(t * t));
  CHECK(lie_bracket(VF::P(t), VF::Z(x * x), 3) == VF::Z(Expr(2) * t * x));
  CHECK(lie_bracket(VF::I(t), VF::Z(x), 3) == VF::Z(-t * x));
  CHECK(lie_bracket(VF::D(t), VF::Z(x), 3) == VF::Z(x / Expr(3)));
  VF b = lie_bracket(VF::D(1), VF::P(t), 3);
  CHECK(b == VF::P(1));
  CHECK(!b.eta0);
}

TEST_CASE("bracket antisymmetry and Jacobi") {
  std::mt19937 rng(3);
  const char* fn[] = {"1", "t", "t^2", "exp(t)", "t*exp(-t)", "3/2", "t^3 - t"};
  std::uniform_int_distribution<int> pick(0, 6), coin(0, 3);
  auto rnd = [&]() {
    VF q = VF::D(P_(fn[pick(rng)])) + VF::P(P_(fn[pick(rng)])) + VF::I(P_(fn[pick(rng)]));
    if (coin(rng) == 0) q = q + VF::Z(P_("exp(x + t)") * P_(fn[pick(rng)]));
    return q;
  };
  for (int i = 0; i < 25; ++i) {
    int r = 3 + i % 3;
    VF a = rnd(), b = rnd(), c = rnd();
    CHECK((lie_bracket(a, b, r) + lie_bracket(b, a, r)).is_zero());
    VF j = lie_bracket(a, lie_bracket(b, c, r), r) + lie_bracket(b, lie_bracket(c, a, r), r) +
           lie_bracket(c, lie_bracket(a, b, r), r);
    CHECK(j.is_zero());
    VF ess = lie_bracket(a.essential(), b.essential(), r);
    CHECK(!ess.eta0);
    VF zz = lie_bracket(a, VF::Z(P_("x^2*exp(t)")), r);
    CHECK((zz.tau.is_zero() && zz.chi.is_zero() && zz.phi.is_zero()));
  }
}

TEST_CASE("printing") {
  CHECK((VF::P(1) + VF::I(t)).str() == "P(1) + I(t)");
  CHECK(VF::D(1).str() == "D(1)");
  CHECK(VF{}.str() == "0");
  CHECK(VF::D(t).xi(3) == x / Expr(3));
}

TEST_CASE("signatures") {
  CHECK(algebra_signature({VF::I(1), VF::D(1), VF::D(t), VF::P(1)}) == Signature{1, 1, 2});
  CHECK(algebra_signature({VF::I(1)}) == Signature{1, 0, 0});
  CHECK(algebra_signature({VF::I(1), VF::D(1), VF::P(1) + VF::I(t)}) == Signature{1, 1, 1});
  CHECK(algebra_signature({VF::I(1), VF::D(1), VF::P(P_("exp(t)")) + VF::I(P_("exp(t)"))}) == Signature{1, 1, 1});
  CHECK(algebra_signature({VF::I(1), VF::P(1) + VF::I(t * t / Expr(2))}) == Signature{1, 1, 0});
  CHECK(algebra_signature({VF::I(1), VF::D(1) + VF::P(t)}) == Signature{1, 0, 1});
  // dependent fields do not count
  CHECK(algebra_signature({VF::I(1), VF::I(2), VF::D(1)}).dim() == 2);
  CHECK_THROWS_AS(algebra_signature({VF::I(Expr::symbol("c"))}), UnsupportedError);
  // monotonicity under removal
  std::vector<VF> basis{VF::I(1), VF::D(1), VF::D(t), VF::P(1)};
  Signature full = algebra_signature(basis);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    auto b = basis;
    b.erase(b.begin() + i);
    Signature s = algebra_signature(b);
    CHECK(s.k0 <= full.k0);
    CHECK(s.k1 <= full.k1);
    CHECK(s.k2 <= full.k2);
  }
}

TEST_CASE("equation embedding") {
  auto e = embed_reduced({3, {Expr(), Expr()}});
  REQUIRE(e.A.size() == 4);
  CHECK(e.A[3].is_one());
  CHECK(e.A[2].is_zero());
  CHECK(e.B.is_zero());
  auto f = embed_reduced({4, {x, Expr(), Expr(5)}});
  CHECK(f.A[0] == x);
  CHECK(f.A[2] == Expr(5));
  CHECK(f.A[3].is_zero());
  CHECK(f.A[4].is_one());
  auto g = embed_reduced({3, {P_("x^(-3)"), P_("x^(-2)")}});
  CHECK(as_reduced(g)->A[1] == P_("x^(-2)"));
  CHECK_THROWS_AS(embed_reduced({3, {x}}), InputError);
  CHECK_THROWS_AS((EvolutionEquation{3, {x, x, x, Expr()}, Expr()}.validate()), InputError);
  CHECK(!as_reduced(EvolutionEquation{3, {x, x, x, Expr(2)}, Expr()}));
}
