#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "linevo/model.hpp"
#include "linevo/verify.hpp"

namespace linevo {

/// y^(order) + coeffs[k] y^(k) = rhs, in the variable var.
struct LinearODE {
  int order = 1;
  std::vector<Expr> coeffs;  // k = 0 .. order-1
  Expr rhs;
  std::string var = "x";

  bool constant_coefficients() const;
  std::string str(const std::string& unknown = "v") const;
};

/// A solution of a reduced equation (or of an ODE, for solve_const_ode).
struct Solution {
  enum class Kind { Symbolic, Numeric };
  Kind kind = Kind::Symbolic;
  /// Exact expression; for roots found only numerically a rational
  /// approximation, so it stays printable.
  Expr expr;
  /// Evaluator in (t, x); always set.
  RealFn fn;
  /// Free constants appearing in expr.
  std::vector<std::string> parameters;
  std::string method;
  /// Residual is canonically zero.
  bool exact = false;
  double max_residual = 0;
  double slope = std::numeric_limits<double>::quiet_NaN();
  /// Grid of the finite-difference certificate, when one was used.
  std::optional<GridSpec> grid;

  std::string certificate() const { return exact ? "zero-residual" : "numeric"; }
};

/// Ansatz u = v(x) for D(1); A must not depend on t.
LinearODE reduce_D1(const ReducedEquation& eq);

/// Real basis of the homogeneous ODE with rational constant coefficients.
/// Rational and quadratic-surd roots are exact; the rest are numeric.
std::vector<Solution> solve_const_ode(const LinearODE& ode);

/// u = c0 exp(phi x + int(phi^r + A^j phi^j) dt) for A0 = f(t) x, A1 = 0,
/// A^j = A^j(t). phi = int f dt + k; k is the free symbol "k" unless given.
Solution reduce_P1Iphi(const ReducedEquation& eq, std::optional<Rational> phi_shift = std::nullopt);

/// Lie reduction by D(1) or P(1) + I(phi). I(1) and I(t) are rejected.
struct LieReduction {
  VectorField field;
  std::string ansatz;
  LinearODE ode;
  std::vector<Solution> solutions;
};
LieReduction lie_reduction(const ReducedEquation& eq, const VectorField& q);

/// Q[h] = phi h + eta0 - tau h_t - xi h_x.
Solution act_symmetry(const VectorField& q, const Solution& h, const ReducedEquation& eq);

struct SolutionFamily {
  std::vector<Solution> basis;
  /// sum c_i basis_i with the constants named in `constants`; symbolic only.
  std::optional<Solution> general;
  std::vector<std::string> constants;
};

/// u = sum_{s<=N} v^s(x) t^s. Constant A is solved exactly; x-dependent A needs
/// numeric_fallback (RK4 from x = 1) and yields one numeric member.
SolutionFamily polynomial_t_solutions(const ReducedEquation& eq, int N, bool numeric_fallback = false);

/// The member of the family whose top layer v^N is the given expression.
Solution polynomial_t_solution(const ReducedEquation& eq, int N, const Expr& top);

struct NonlocalOptions {
  double x0 = 0, t0 = 0, v0 = 0;
  Rational phi_shift = 0;
  GridSpec grid = default_grid();

  static GridSpec default_grid() {
    GridSpec g;
    g.ht = g.hx = 0.025;
    return g;
  }
};

/// New solution from a known symbolic one h for P(1) + I(phi) shaped
/// equations, by the double-integral formula evaluated with quadrature.
Solution generate_nonlocal(const ReducedEquation& eq, const Solution& h, const NonlocalOptions& opt = {});

struct ReductionSpec {
  enum class Family { D, P };
  Family family = Family::D;
  bool complex_pair = false;
  Rational lambda = 0;        // real root
  Rational mu = 0, nu = 1;    // complex pair, nu > 0
  int N = 0;
  Rational phi_shift = 0;     // P-family: constant added to int f dt
  bool numeric_fallback = true;
  double base_point = 1;      // x0 (D) or t0 (P) of the numeric integrator
  double step = 0.05;
};

/// One equation of a reduced system: lhs(unknown) = sum coeff * other.
struct CoupledODE {
  std::string unknown;
  LinearODE lhs;  // rhs field unused
  std::vector<std::pair<Expr, std::string>> rhs;

  std::string str() const;
};

struct GeneralizedReduction {
  ReductionSpec spec;
  VectorField field;
  std::string recursion_operator;
  std::string condition;
  std::string ansatz;
  std::vector<CoupledODE> system;
  std::vector<Solution> solutions;
  /// Layers v^s, w^s of each symbolic solution (w empty for real families).
  std::vector<std::vector<Expr>> v, w;
};

GeneralizedReduction generalized_reduction(const ReducedEquation& eq, const ReductionSpec& spec);

/// Certifies a symbolic solution in place (exact flag and residual).
void certify(Solution& s, const ReducedEquation& eq);

}  // namespace linevo
