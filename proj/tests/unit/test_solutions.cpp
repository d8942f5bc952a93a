#include <cmath>

#include "doctest.h"
#include "linevo/errors.hpp"
#include "linevo/linalg.hpp"
#include "linevo/solutions.hpp"
#include "linevo/symkernel.hpp"
#include "linevo/symmetry.hpp"

using namespace linevo;

namespace {
Expr P_(const char* s) { return parse_expr(s, SymbolTable{"c0", "k", "w"}); }
bool same(const Expr& a, const Expr& b) { return is_zero(a - b) == ZeroVerdict::Zero; }
bool zero_res(const ReducedEquation& eq, const Expr& u) { return is_zero(residual_symbolic(eq, u)) == ZeroVerdict::Zero; }
const ReducedEquation kAiry{3, {Expr(), Expr()}};

Solution sym(const Expr& e) {
  Solution s;
  s.expr = e;
  s.fn = as_function(e);
  s.exact = true;
  return s;
}

// the set of expressions spans the same Q-space as the expected list
bool spans(const std::vector<Solution>& got, const std::vector<Expr>& want) {
  std::vector<Expr> all;
  for (const auto& s : got) all.push_back(s.expr);
  std::size_t g = rank(collect_coordinates(all));
  for (const auto& w : want) all.push_back(w);
  return g == want.size() && rank(collect_coordinates(all)) == g;
}
}  // namespace

TEST_CASE("reduce_D1 examples") {
  auto o = reduce_D1(kAiry);
  CHECK(o.order == 3);
  CHECK(o.coeffs[0].is_zero());
  CHECK(o.coeffs[1].is_zero());
  auto o2 = reduce_D1({3, {P_("x^(-3)"), P_("x^(-2)")}});
  CHECK(same(o2.coeffs[0], P_("x^(-3)")));
  CHECK(same(o2.coeffs[1], P_("x^(-2)")));
  CHECK(o2.str() == "v''' + (" + P_("x^(-2)").str() + ")*v' + (" + P_("x^(-3)").str() + ")*v = 0");
  auto o3 = reduce_D1({4, {Expr(1), Expr(), Expr()}});
  CHECK(o3.order == 4);
  CHECK(o3.coeffs[0].is_one());
  CHECK(o3.str() == "v^(4) + v = 0");
  CHECK_THROWS_AS(reduce_D1({3, {P_("t*x"), Expr()}}), InputError);
}

TEST_CASE("solve_const_ode examples") {
  LinearODE a{3, {Expr(), Expr(), Expr()}, Expr(), "x"};
  auto s = solve_const_ode(a);
  REQUIRE(s.size() == 3);
  CHECK(spans(s, {Expr(1), P_("x"), P_("x^2")}));
  for (const auto& b : s) CHECK(b.exact);

  LinearODE c{3, {Expr(-1), Expr(), Expr()}, Expr(), "x"};
  auto s2 = solve_const_ode(c);
  REQUIRE(s2.size() == 3);
  CHECK(spans(s2, {P_("exp(x)"), P_("exp(-x/2)*cos(3^(1/2)*x/2)"), P_("exp(-x/2)*sin(3^(1/2)*x/2)")}));
  for (const auto& b : s2) {
    CHECK(b.exact);
    CHECK(b.kind == Solution::Kind::Symbolic);
  }

  LinearODE d{1, {Expr(-2)}, Expr(), "w"};
  auto s3 = solve_const_ode(d);
  REQUIRE(s3.size() == 1);
  CHECK(same(s3[0].expr, P_("exp(2*w)")));

  // repeated and irrational roots: (y^2-2)^2
  LinearODE e{4, {Expr(4), Expr(), Expr(-4), Expr()}, Expr(), "x"};
  auto s4 = solve_const_ode(e);
  REQUIRE(s4.size() == 4);
  for (const auto& b : s4) CHECK(b.exact);
  CHECK(spans(s4, {P_("exp(2^(1/2)*x)"), P_("x*exp(2^(1/2)*x)"), P_("exp(-2^(1/2)*x)"), P_("x*exp(-2^(1/2)*x)")}));

  // y^5 - y - 1 has no closed form; numeric basis with tiny residuals
  LinearODE f{5, {Expr(-1), Expr(-1), Expr(), Expr(), Expr()}, Expr(), "x"};
  auto s5 = solve_const_ode(f);
  REQUIRE(s5.size() == 5);
  for (const auto& b : s5) {
    CHECK(b.kind == Solution::Kind::Numeric);
    CHECK(b.max_residual < 1e-9);
  }
  CHECK_THROWS_AS(solve_const_ode(LinearODE{3, {P_("x"), Expr(), Expr()}, Expr(), "x"}), InputError);
}

TEST_CASE("reduce_P1Iphi examples") {
  ReducedEquation e1{3, {P_("x"), Expr()}};
  auto s = reduce_P1Iphi(e1, Rational(0));
  CHECK(s.exact);
  CHECK(same(s.expr, P_("c0*exp(t*x + t^4/4)")));
  auto s0 = reduce_P1Iphi(e1);
  CHECK(s0.exact);
  CHECK(std::find(s0.parameters.begin(), s0.parameters.end(), "k") != s0.parameters.end());

  auto s2 = reduce_P1Iphi(kAiry);
  CHECK(s2.exact);
  CHECK(same(s2.expr, P_("c0*exp(k*x + k^3*t)")));

  ReducedEquation e3{4, {Expr(), Expr(), Expr(1)}};
  auto s3 = reduce_P1Iphi(e3);
  CHECK(s3.exact);
  CHECK(same(s3.expr, P_("c0*exp(k*x + (k^4 + k^2)*t)")));

  CHECK_THROWS_AS(reduce_P1Iphi({3, {P_("x^2"), Expr()}}), InputError);
  CHECK_THROWS_AS(reduce_P1Iphi({3, {P_("x"), Expr(1)}}), InputError);
}

TEST_CASE("lie_reduction rejects I(1) and I(t)") {
  CHECK_THROWS_AS(lie_reduction(kAiry, VectorField::I(Expr(1))), UnsupportedError);
  try {
    lie_reduction(kAiry, VectorField::I(Expr(1)));
  } catch (const UnsupportedError& e) {
    CHECK(std::string(e.what()).find("cannot be used for Lie reductions") != std::string::npos);
  }
  try {
    lie_reduction(kAiry, VectorField::I(P_("t")));
    FAIL("expected rejection");
  } catch (const UnsupportedError& e) {
    CHECK(std::string(e.what()).find("is not a Lie symmetry generator") != std::string::npos);
  }
  auto d = lie_reduction(kAiry, VectorField::D(Expr(1)));
  CHECK(d.solutions.size() == 3);
  for (const auto& s : d.solutions) CHECK(s.exact);
  auto p = lie_reduction({3, {P_("x"), Expr()}}, VectorField::P(Expr(1)) + VectorField::I(P_("t")));
  REQUIRE(p.solutions.size() == 1);
  CHECK(p.solutions[0].exact);
  CHECK_THROWS_AS(lie_reduction({3, {P_("x"), Expr()}}, VectorField::P(Expr(1)) + VectorField::I(P_("t^2"))),
                  InputError);
}

TEST_CASE("act_symmetry examples") {
  auto a = act_symmetry(VectorField::D(Expr(1)), sym(P_("exp(x+t)")), kAiry);
  CHECK(a.exact);
  CHECK(same(a.expr, P_("-exp(x+t)")));
  auto b = act_symmetry(VectorField::I(Expr(1)), sym(P_("exp(x+t)")), kAiry);
  CHECK(same(b.expr, P_("exp(x+t)")));
  auto c = act_symmetry(VectorField::P(Expr(1)), sym(P_("x")), kAiry);
  CHECK(same(c.expr, Expr(-1)));
  CHECK(c.exact);
  Solution bad = sym(P_("x^3"));
  bad.exact = false;
  CHECK_THROWS_AS(act_symmetry(VectorField::P(Expr(1)), bad, kAiry), InputError);
  CHECK_THROWS_AS(act_symmetry(VectorField::D(P_("t")), sym(P_("x")), {3, {P_("x^2"), Expr()}}), InputError);
}

TEST_CASE("polynomial in t") {
  auto u = polynomial_t_solution(kAiry, 1, P_("x^2"));
  CHECK(u.exact);
  // t x^2 + x^5/60 up to homogeneous layers
  Expr diff = u.expr - P_("t*x^2 + x^5/60");
  CHECK(zero_res(kAiry, diff));
  CHECK(same(differentiate(diff, "t"), Expr()));
  CHECK(poly_coefficients(differentiate(diff, "x", 3), "x").size() <= 1);

  ReducedEquation q{4, {Expr(), Expr(), Expr()}};
  auto u4 = polynomial_t_solution(q, 1, Expr(1));
  CHECK(u4.exact);
  CHECK(zero_res(q, u4.expr - P_("t + x^4/24")));
  CHECK(same(differentiate(u4.expr, "t"), Expr(1)));

  auto fam0 = polynomial_t_solutions(kAiry, 0);
  auto d = lie_reduction(kAiry, VectorField::D(Expr(1)));
  CHECK(spans(fam0.basis, {Expr(1), P_("x"), P_("x^2")}));
  CHECK(fam0.basis.size() == d.solutions.size());
  REQUIRE(fam0.general);
  CHECK(fam0.general->exact);
  CHECK(fam0.constants.size() == 3);

  auto fam2 = polynomial_t_solutions(kAiry, 2);
  CHECK(fam2.basis.size() == 9);
  for (const auto& s : fam2.basis) CHECK(s.exact);

  CHECK_THROWS_AS(polynomial_t_solution(kAiry, 1, P_("x^3")), InputError);
  CHECK_THROWS_AS(polynomial_t_solutions({3, {P_("x"), Expr()}}, 1), UnsupportedError);
  CHECK_THROWS_AS(polynomial_t_solutions({3, {P_("t"), Expr()}}, 1), InputError);
}

TEST_CASE("polynomial in t with numeric fallback") {
  ReducedEquation e{3, {Expr(), P_("x^(-2)")}};
  auto fam = polynomial_t_solutions(e, 1, true);
  REQUIRE(fam.basis.size() == 1);
  const auto& s = fam.basis[0];
  CHECK(s.kind == Solution::Kind::Numeric);
  CHECK(s.max_residual < 1e-6);
  CHECK(std::fabs(s.slope - 4) < 0.5);
  CHECK(!fam.general);
  // the RK4 member satisfies the equation on a grid away from x = 0
  GridSpec g;
  g.x0 = 1;
  g.x1 = 1.5;
  g.singular_x = {0};
  auto r = residual_numeric(e, s.fn, g);
  CHECK(r.max_residual < 1e-5);
}

TEST_CASE("nonlocal generation") {
  ReducedEquation e1{3, {P_("x"), Expr()}};
  NonlocalOptions opt;
  opt.v0 = 1;
  auto z = generate_nonlocal(e1, sym(Expr()), opt);
  auto ref = as_function(P_("exp(t*x + t^4/4)"));
  for (long double t : {0.1L, 0.5L, 0.9L})
    for (long double x : {0.2L, 0.7L}) CHECK(std::fabs(z.fn(t, x) - ref(t, x)) < 1e-12);
  CHECK(z.max_residual < 1e-6);

  opt.v0 = 0;
  auto n = generate_nonlocal(e1, sym(P_("exp(t*x + t^4/4)")), opt);
  CHECK(n.kind == Solution::Kind::Numeric);
  CHECK(n.max_residual < 1e-6);
  CHECK(std::fabs(n.slope - 6) < 0.5);
  // not a multiple of h
  CHECK(std::fabs(n.fn(0.5, 0.5) / ref(0.5, 0.5) - n.fn(0.9, 0.2) / ref(0.9, 0.2)) > 1e-3);

  NonlocalOptions o2;
  o2.v0 = 1;
  o2.t0 = 0.25;
  o2.phi_shift = 2;
  auto k = generate_nonlocal(kAiry, sym(Expr()), o2);
  auto kr = as_function(P_("exp(2*x + 8*(t - 1/4))"));
  for (long double t : {0.1L, 0.6L}) CHECK(std::fabs(k.fn(t, 0.3L) - kr(t, 0.3L)) < 1e-12);

  CHECK_THROWS_AS(generate_nonlocal({3, {P_("x^2"), Expr()}}, sym(Expr())), InputError);
  Solution bad = sym(P_("x^3"));
  bad.exact = false;
  CHECK_THROWS_AS(generate_nonlocal(e1, bad), InputError);
}

TEST_CASE("generalized reductions D family") {
  ReductionSpec sp;
  sp.N = 1;
  auto g = generalized_reduction(kAiry, sp);
  auto fam = polynomial_t_solutions(kAiry, 1);
  REQUIRE(g.solutions.size() == fam.basis.size());
  for (std::size_t i = 0; i < g.solutions.size(); ++i) CHECK(same(g.solutions[i].expr, fam.basis[i].expr));
  CHECK(g.system.size() == 2);
  CHECK(g.v[0].size() == 2);

  sp.N = 0;
  sp.lambda = 1;
  auto g1 = generalized_reduction(kAiry, sp);
  CHECK(g1.system.size() == 1);
  CHECK(g1.condition == "(Q + 1)^1 u = 0");
  for (const auto& s : g1.solutions) CHECK(s.exact);
  CHECK(spans(g1.solutions, {P_("exp(x+t)"), P_("exp(t - x/2)*cos(3^(1/2)*x/2)"), P_("exp(t - x/2)*sin(3^(1/2)*x/2)")}));

  ReductionSpec cs;
  cs.complex_pair = true;
  cs.mu = 0;
  cs.nu = 1;
  cs.N = 1;
  auto gc = generalized_reduction(kAiry, cs);
  CHECK(gc.system.size() == 4);
  CHECK(gc.solutions.size() == 12);
  for (std::size_t i = 0; i < gc.solutions.size(); ++i) {
    CHECK(gc.solutions[i].exact);
    // u = (v^s cos t + w^s sin t) t^s
    Expr u;
    for (int s = 0; s <= 1; ++s)
      u += (gc.v[i][s] * cos(P_("t")) + gc.w[i][s] * sin(P_("t"))) * pow(P_("t"), static_cast<long>(s));
    CHECK(same(u, gc.solutions[i].expr));
  }

  cs.nu = 0;
  CHECK_THROWS_AS(generalized_reduction(kAiry, cs), InputError);
  CHECK_THROWS_AS(generalized_reduction({3, {P_("t"), Expr()}}, sp), InputError);
}

TEST_CASE("generalized reductions P family") {
  ReductionSpec cs;
  cs.family = ReductionSpec::Family::P;
  cs.complex_pair = true;
  auto g = generalized_reduction(kAiry, cs);
  CHECK(g.system.size() == 2);
  REQUIRE(g.solutions.size() == 2);
  for (const auto& s : g.solutions) CHECK(s.exact);
  // cos(x - t) and sin(t - x), in product form
  CHECK(spans(g.solutions, {P_("cos(x)*cos(t) + sin(x)*sin(t)"), P_("sin(t)*cos(x) - cos(t)*sin(x)")}));
  auto ref = as_function(P_("cos(x - t)"));
  for (long double t : {0.1L, 0.8L}) CHECK(std::fabs(g.solutions[0].fn(t, 0.3L) - ref(t, 0.3L)) < 1e-15);
  CHECK(!zero_res(kAiry, P_("cos(x + t)")));

  // reduced system holds for the printed layers: v_t = -w, w_t = v for u_t = u3
  REQUIRE(g.system[0].rhs.size() == 2);
  CHECK(same(g.system[0].rhs[0].first, Expr()));
  CHECK(same(g.system[0].rhs[1].first, Expr(-1)));
  for (std::size_t i = 0; i < g.solutions.size(); ++i) {
    CHECK(same(differentiate(g.v[i][0], "t"), -g.w[i][0]));
    CHECK(same(differentiate(g.w[i][0], "t"), g.v[i][0]));
  }

  ReductionSpec rs;
  rs.family = ReductionSpec::Family::P;
  rs.lambda = 1;
  rs.N = 2;
  ReducedEquation e1{3, {P_("x"), Expr()}};
  auto gr = generalized_reduction(e1, rs);
  CHECK(gr.system.size() == 3);
  CHECK(gr.solutions.size() == 3);
  for (const auto& s : gr.solutions) CHECK(s.exact);

  ReductionSpec cc = cs;
  cc.N = 1;
  cc.mu = 1;
  cc.nu = 2;
  auto g4 = generalized_reduction(ReducedEquation{4, {P_("2*x"), Expr(), P_("t")}}, cc);
  CHECK(g4.system.size() == 4);
  for (const auto& s : g4.solutions) CHECK(s.exact);

  CHECK_THROWS_AS(generalized_reduction({3, {P_("x^2"), Expr()}}, rs), InputError);
}

TEST_CASE("P family numeric fallback") {
  // exp(t^2) weights give no closed-form quadrature
  ReducedEquation e{4, {P_("x"), Expr(), P_("exp(t^2)")}};
  ReductionSpec rs;
  rs.family = ReductionSpec::Family::P;
  rs.N = 1;
  rs.base_point = 0;
  auto g = generalized_reduction(e, rs);
  for (const auto& s : g.solutions) {
    if (s.kind == Solution::Kind::Numeric) {
      CHECK(s.max_residual < 1e-6);
      CHECK(std::fabs(s.slope - 4) < 0.5);
    } else {
      CHECK(s.exact);
    }
  }
}

TEST_CASE("superposition and closure") {
  struct Item {
    ReducedEquation eq;
    std::vector<Solution> seeds;
  };
  std::vector<Item> items;
  for (int r = 3; r <= 5; ++r) {
    ReducedEquation zero{r, std::vector<Expr>(r - 1)};
    items.push_back({zero, polynomial_t_solutions(zero, 1).basis});
  }
  for (const ReducedEquation& e : {ReducedEquation{3, {P_("x"), Expr()}}, ReducedEquation{4, {P_("x"), Expr(), Expr(1)}},
                                   ReducedEquation{5, {P_("t*x"), Expr(), Expr(), Expr()}}}) {
    std::vector<Solution> seeds;
    for (int k = -1; k <= 2; ++k) seeds.push_back(reduce_P1Iphi(e, Rational(k)));
    items.push_back({e, seeds});
  }
  for (const auto& it : items) {
    Expr comb;
    int i = 1;
    for (const auto& s : it.seeds) {
      REQUIRE(s.exact);
      comb += Expr::rational(i, 7) * substitute(s.expr, {{"c0", Expr(1)}});
      ++i;
    }
    CHECK(zero_res(it.eq, comb));
    auto alg = solve_symmetries(it.eq);
    for (const auto& q : alg.basis)
      for (std::size_t j = 0; j < std::min<std::size_t>(it.seeds.size(), 4); ++j) {
        auto a = act_symmetry(q, it.seeds[j], it.eq);
        CHECK_MESSAGE(a.exact, q.str());
      }
  }
}
