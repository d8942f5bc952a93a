#include <algorithm>
#include <random>

#include "../fixtures/table1.hpp"
#include "doctest.h"
#include "linevo/equivalence.hpp"
#include "linevo/errors.hpp"
#include "linevo/symmetry.hpp"

using namespace linevo;

namespace {
Expr P_(const char* s) { return parse_expr(s, SymbolTable{"c", "s"}); }
const Expr t = Expr::symbol("t");
const Expr x = Expr::symbol("x");
using VF = VectorField;

AnsatzSpace space(int kmax, std::vector<Rational> rates) {
  AnsatzSpace s;
  s.kmax = kmax;
  s.rates = std::move(rates);
  return s;
}

// Same span as an explicit list of fields.
bool same_span(const SymmetryAlgebra& alg, const std::vector<VF>& expected) {
  if (alg.dim() != expected.size()) return false;
  for (const auto& q : expected)
    if (!express_in_span(alg.basis, q)) return false;
  return true;
}

bool has_field(const SymmetryAlgebra& alg, const VF& q) {
  return std::any_of(alg.basis.begin(), alg.basis.end(), [&](const VF& b) { return b == q; });
}
}  // namespace

TEST_CASE("classifying residuals") {
  ReducedEquation zero{3, {Expr(), Expr()}};
  auto r0 = classifying_residuals(zero, t, Expr(), Expr());
  REQUIRE(r0.R.size() == 2);
  CHECK(r0.R[0].is_zero());
  CHECK(r0.R[1].is_zero());
  CHECK(!r0.lin);

  ReducedEquation c2{3, {P_("x^(-3)"), P_("x^(-2)")}};
  auto r2 = classifying_residuals(c2, t, Expr(), Expr());
  CHECK(r2.R[0].is_zero());
  CHECK(r2.R[1].is_zero());

  ReducedEquation c4{3, {x, Expr()}};
  auto r4 = classifying_residuals(c4, t, Expr(), Expr());
  CHECK(r4.R[0] == Expr::rational(4, 3) * x);
  CHECK(r4.R[1].is_zero());

  // the j >= 2 pattern and the chi_t term
  ReducedEquation e4{4, {Expr(), Expr(), x}};
  auto r = classifying_residuals(e4, t * t, t, Expr());
  CHECK(r.R[2] == t * t * Expr(0) + (Expr(2) * t * x / Expr(4) + t) + Expr(2) / Expr(4) * Expr(2) * t * x);
  CHECK(r.R[1] == Expr(2) * x / Expr(4) + Expr(1));

  CHECK_THROWS_AS(classifying_residuals(zero, x, Expr(), Expr()), InputError);
  CHECK_THROWS_AS(classifying_residuals(zero, Expr(), Expr(), t * x), InputError);
}

TEST_CASE("verify symmetry") {
  ReducedEquation zero{3, {Expr(), Expr()}};
  CHECK(verify_symmetry(zero, VF::P(1)).holds == Holds::Yes);
  CHECK(verify_symmetry({3, {x, Expr()}}, VF::P(1) + VF::I(t)).holds == Holds::Yes);
  CHECK(verify_symmetry({3, {x, Expr()}}, VF::D(t)).holds == Holds::No);
  auto z = verify_symmetry(zero, VF::Z(P_("exp(x + t)")));
  CHECK(z.holds == Holds::Yes);
  REQUIRE(z.residuals.lin);
  CHECK(z.residuals.lin->is_zero());
  CHECK(verify_symmetry(zero, VF::Z(P_("exp(x + 2*t)"))).holds == Holds::No);
  // symbolic parameters are fine here
  CHECK(verify_symmetry({3, {P_("s*x"), Expr()}}, VF::P(1) + VF::I(P_("s*t"))).holds == Holds::Yes);
  CHECK(holds_name(Holds::Unknown) == "unknown");
}

TEST_CASE("ansatz space") {
  AnsatzSpace s = space(2, {Rational(1)});
  auto f = s.functions();
  CHECK(f.size() == 6);  // 0 is added to the rates
  CHECK(f[0] == Expr(1));
  CHECK(f[5] == t * t * P_("exp(t)"));
  CHECK(AnsatzSpace{}.functions().size() == 12);

  // extra functions, duplicates dropped
  AnsatzSpace e = space(1, {Rational(0)});
  e.extra = {pow(t, Ratio(1, 3)), t, pow(t, Ratio(1, 3))};
  CHECK(e.functions().size() == 3);
  CHECK(e.str() == "Kmax=1, rates={0}, extra={t^(1/3),t,t^(1/3)}");
  e.extra = {x};
  CHECK_THROWS_AS(e.functions(), InputError);
}

TEST_CASE("power ansatz after an exponential time change") {
  // u_t = u_3 + x u - x u_x under t -> -exp(-3t)
  ReducedEquation eq{3, {x, -x}};
  EquivTransformation tr;
  tr.T = -exp(Expr(-3) * t);
  auto img = pushforward_reduced(eq, tr);
  AnsatzSpace sp = space(1, {Rational(0)});
  for (int j : {-2, -1, 1, 2}) sp.extra.push_back(pow(Expr(3), Ratio(-1, 3)) * pow(t, Ratio(j, 3)));
  auto c = classify(img, sp);
  CHECK(c.algebra.case_label == "4b");
  // the default ansatz misses the shift part
  CHECK(classify(img).algebra.dim() == 2);
}

TEST_CASE("solve symmetries, worked examples") {
  SUBCASE("all coefficients zero") {
    auto alg = solve_symmetries({3, {Expr(), Expr()}}, space(2, {Rational(0)}));
    CHECK(alg.signature == Signature{1, 1, 2});
    CHECK(same_span(alg, {VF::I(1), VF::P(1), VF::D(1), VF::D(t)}));
    REQUIRE(alg.dim() == 4);
    CHECK(alg.basis[0] == VF::I(1));
    CHECK(alg.basis[1] == VF::D(1));
    CHECK(alg.basis[2] == VF::D(t));
    CHECK(alg.basis[3] == VF::P(1));
  }
  SUBCASE("A0 = x") {
    auto alg = solve_symmetries({3, {x, Expr()}}, space(2, {Rational(0)}));
    CHECK(alg.signature == Signature{1, 1, 1});
    CHECK(same_span(alg, {VF::I(1), VF::D(1), VF::P(1) + VF::I(t)}));
    CHECK(has_field(alg, VF::P(1) + VF::I(t)));
  }
  SUBCASE("A1 = -x, A0 = x") {
    auto alg = solve_symmetries({3, {x, -x}}, space(2, {Rational(0), Rational(1)}));
    CHECK(alg.signature == Signature{1, 1, 1});
    Expr e = P_("exp(t)");
    CHECK(same_span(alg, {VF::I(1), VF::D(1), VF::P(e) + VF::I(e)}));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(solve_symmetries({3, {P_("c*x"), Expr()}}), UnsupportedError);
    AnsatzSpace big = space(50, {Rational(0), Rational(1), Rational(-1), Rational(2), Rational(3)});
    CHECK_THROWS_AS(solve_symmetries({3, {Expr(), Expr()}}, big), UnsupportedError);
  }
}

TEST_CASE("classify, worked examples") {
  auto c2 = classify({4, {P_("x^(-4)"), P_("x^(-3)"), P_("x^(-2)")}});
  CHECK(c2.algebra.case_label == "2");
  CHECK(same_span(c2.algebra, {VF::I(1), VF::D(1), VF::D(t)}));

  auto c3 = classify({3, {t * x, Expr()}});
  CHECK(c3.algebra.case_label == "3");
  CHECK(same_span(c3.algebra, {VF::I(1), VF::P(1) + VF::I(t * t / Expr(2))}));

  auto c5 = classify({3, {Expr(), Expr()}});
  CHECK(c5.algebra.case_label == "5");
  REQUIRE(!c5.caveats.empty());
  CHECK(c5.caveats[0].find("Kmax=3") != std::string::npos);

  auto c1 = classify({3, {x * x, x * x * x}});
  CHECK(c1.algebra.case_label == "1");
  CHECK(c1.caveats.size() == 2);
}

TEST_CASE("classification table, r = 3, 4, 5") {
  for (int r = 3; r <= 5; ++r)
    for (const auto& fx : fixtures::table1(r)) {
      CAPTURE(r);
      CAPTURE(fx.label);
      auto c = classify(fx.eq);
      CHECK(c.algebra.signature == fx.signature);
      CHECK(c.algebra.case_label == fx.label);
      CHECK(signature_bounds_check(c.algebra).ok);
      // soundness, kernel, closure
      CHECK(c.algebra.basis.front() == VF::I(1));
      for (const auto& q : c.algebra.basis) CHECK(verify_symmetry(fx.eq, q).holds == Holds::Yes);
      for (const auto& a : c.algebra.basis)
        for (const auto& b : c.algebra.basis) CHECK(express_in_span(c.algebra.basis, lie_bracket(a, b, r)));
    }
}

TEST_CASE("monotonicity in the ansatz") {
  ReducedEquation eq{3, {x, -x}};
  auto small = solve_symmetries(eq, space(1, {Rational(0)}));
  auto mid = solve_symmetries(eq, space(2, {Rational(0)}));
  auto big = solve_symmetries(eq, space(3, {Rational(0), Rational(1), Rational(-1)}));
  CHECK(small.dim() <= mid.dim());
  CHECK(mid.dim() <= big.dim());
  for (const auto& q : small.basis) CHECK(express_in_span(big.basis, q));
  for (const auto& q : mid.basis) CHECK(express_in_span(big.basis, q));
}

TEST_CASE("classification is invariant under equivalence") {
  std::vector<EquivTransformation> trs;
  {
    EquivTransformation a;
    a.T = t + Expr(1);
    a.X0 = Expr(2);
    trs.push_back(a);
    EquivTransformation b;
    // time scalings move exponential rates out of the default ansatz
    b.T = t - Expr(3);
    b.X0 = t * t / Expr(2);
    trs.push_back(b);
    EquivTransformation c;
    c.X0 = t;
    c.U1 = P_("exp(t)");
    trs.push_back(c);
  }
  for (const auto& fx : fixtures::table1(3)) {
    auto base = classify(fx.eq);
    for (const auto& tr : trs) {
      CAPTURE(fx.label);
      auto img = pushforward_reduced(fx.eq, tr);
      auto c = classify(img);
      CHECK(c.algebra.case_label == base.algebra.case_label);
      CHECK(c.algebra.signature == base.algebra.signature);
    }
  }
}

TEST_CASE("time scaling keeps the case when the ansatz is closed under it") {
  EquivTransformation sc;
  sc.T = Expr(8) * t;
  for (const auto& fx : fixtures::table1(3)) {
    if (fx.label == "4b") continue;
    CAPTURE(fx.label);
    CHECK(classify(pushforward_reduced(fx.eq, sc)).algebra.case_label == fx.label);
  }
}

TEST_CASE("signature bounds") {
  auto c5 = solve_symmetries({3, {Expr(), Expr()}});
  CHECK(signature_bounds_check(c5).ok);
  auto c0 = solve_symmetries(fixtures::table1(3)[0].eq);
  CHECK(signature_bounds_check(c0).ok);
  CHECK(c0.signature == Signature{1, 0, 0});

  SymmetryAlgebra bad;
  bad.basis = {VF::I(1), VF::D(1), VF::D(t), VF::P(1), VF::P(t)};
  bad.signature = algebra_signature(bad.basis);
  auto v = signature_bounds_check(bad);
  CHECK(!v.ok);
  CHECK(v.violations.size() >= 2);

  // random polynomial tuples
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coef(-2, 2), deg(0, 2);
  for (int i = 0; i < 12; ++i) {
    int r = 3 + i % 3;
    std::vector<Expr> A;
    for (int l = 0; l <= r - 2; ++l) {
      Expr a;
      for (int k = 0; k < 2; ++k)
        a += Expr(coef(rng)) * pow(t, static_cast<long>(deg(rng))) * pow(x, static_cast<long>(deg(rng)));
      A.push_back(a);
    }
    ReducedEquation eq{r, A};
    CAPTURE(r);
    auto alg = solve_symmetries(eq);
    auto verdict = signature_bounds_check(alg);
    CHECK(verdict.ok);
  }
}
