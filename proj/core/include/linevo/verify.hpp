#pragma once

#include <functional>
#include <vector>

#include "linevo/model.hpp"
#include "linevo/rational.hpp"

namespace linevo {

/// Rectangular grid for finite-difference residuals. Points closer to the
/// edges than the stencil half-width are dropped, so u is only evaluated
/// inside the box.
struct GridSpec {
  double t0 = 0, t1 = 1, x0 = 0, x1 = 1;
  double ht = 0.05, hx = 0.05;
  int order = 6;  // accuracy order of the central stencils, even
  /// x values where coefficients are singular; the x-range must keep away.
  std::vector<double> singular_x;
  /// At most this many sample points per axis (evenly strided).
  int max_samples = 12;
  /// Relative precision of the sampled values, for the rounding floor; 0
  /// means extended precision. Tabulated doubles need DBL_EPSILON.
  double value_eps = 0;

  void validate(int r) const;
};

/// Weights w_{-m..m} of the central difference for the k-th derivative with
/// accuracy order p, exact over Q.
std::vector<Rational> central_stencil(int k, int p);

using RealFn = std::function<long double(long double t, long double x)>;

struct NumericResidual {
  double max_residual = 0;  // at the given steps
  /// Empirical order from the finest halving that stays above the rounding
  /// floor and drops by at least 4, else from the coarse pair; NaN when even
  /// that is at the floor.
  double slope = 0;
  /// The coarse level is already at the floor, or refining makes it worse.
  bool at_roundoff = false;
  double max_abs_u = 0;
  std::vector<double> levels;  // residual at h, h/2, h/4
};

/// u_t - A^k u_k - B, canonical.
Expr residual_symbolic(const EvolutionEquation& eq, const Expr& u);
Expr residual_symbolic(const ReducedEquation& eq, const Expr& u);

NumericResidual residual_numeric(const EvolutionEquation& eq, const RealFn& u, const GridSpec& g);
NumericResidual residual_numeric(const ReducedEquation& eq, const RealFn& u, const GridSpec& g);
NumericResidual residual_numeric(const EvolutionEquation& eq, const Expr& u, const GridSpec& g);
NumericResidual residual_numeric(const ReducedEquation& eq, const Expr& u, const GridSpec& g);

/// Extended-precision evaluator for an expression in (t, x).
RealFn as_function(const Expr& u);

}  // namespace linevo
