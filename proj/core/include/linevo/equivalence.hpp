#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linevo/model.hpp"
#include "linevo/symkernel.hpp"

namespace linevo {

/// Closed-form invertible time maps: affine, Moebius, a*exp(b*t)+c,
/// a*ln(t)+b and a*t^q+c.
struct CatalogEntry {
  std::string kind;
  Expr T;
  Expr inverse;  // in t, read as the new time variable
  std::string domain;
};

std::optional<CatalogEntry> catalog_lookup(const Expr& T);
/// Throws UnsupportedError when T is not a catalog map.
CatalogEntry catalog_entry(const Expr& T);

/// t~ = T(t), x~ = X1(t) x + X0(t), u~ = U1(t) u + U0(t,x), X1 = eps*(T_t)^(1/r).
struct EquivTransformation {
  Expr T = Expr::symbol("t");
  Expr X0;
  int eps = 1;
  Expr U1 = Expr(1);
  Expr U0;

  Expr X1(int r) const;
  static EquivTransformation identity() { return {}; }
};

/// Point transformation t~ = T(t), x~ = X(t,x), u~ = U1(t,x) u + U0(t,x).
/// X must be affine in x for the inverse map.
struct GeneralTransformation {
  Expr T = Expr::symbol("t");
  Expr X = Expr::symbol("x");
  Expr U1 = Expr(1);
  Expr U0;
};

GeneralTransformation to_general(const EquivTransformation& tr, int r);

/// Rewrite a function of (t,x) in the new variables by substituting the
/// inverse of (T, X).
Expr in_new_variables(const Expr& e, const GeneralTransformation& tr);

/// Coefficients of the image equation, computed by conjugating the
/// derivative operators and reading off the jet coefficients.
EvolutionEquation pushforward_equation(const EvolutionEquation& eq, const GeneralTransformation& tr);
EvolutionEquation pushforward_equation(const EvolutionEquation& eq, const EquivTransformation& tr);
/// Same, for a reduced equation and a group element (U0 = 0); the image is reduced again.
ReducedEquation pushforward_reduced(const ReducedEquation& eq, const EquivTransformation& tr);

/// Closed-form transformation rule for equations with A^r = 1, A^{r-1} = 0.
EvolutionEquation transform_explicit(const EvolutionEquation& eq, const EquivTransformation& tr);

/// The solution h of the source equation, as a solution of the image: U1 h + U0
/// in the new variables.
Expr transport_solution(const Expr& h, const GeneralTransformation& tr);

/// tr2 after tr1.
EquivTransformation compose(const EquivTransformation& tr1, const EquivTransformation& tr2, int r);
EquivTransformation invert(const EquivTransformation& tr, int r);

enum class TargetForm { LeadingNormalized, ReducedInhomogeneous, ReducedHomogeneous };
std::string target_form_name(TargetForm f);

struct GaugeReport {
  std::vector<GeneralTransformation> chain;
  std::vector<std::string> steps;  // one label per chain entry
  TargetForm target = TargetForm::LeadingNormalized;
  std::vector<ZeroVerdict> residual_checks;
};

/// A^r -> 1 by T = int A^r dt (A^r depending on t only).
std::pair<EvolutionEquation, GaugeReport> gauge_leading(const EvolutionEquation& eq);
/// A^{r-1} -> 0 by U1 = exp(s/r int A^{r-1} dx), sign chosen by checking the result.
std::pair<EvolutionEquation, GaugeReport> gauge_subleading(const EvolutionEquation& eq);
/// B -> 0 by U0 = -w for a particular solution w.
std::pair<ReducedEquation, GaugeReport> gauge_inhomogeneity(const EvolutionEquation& eq, const Expr& w);
/// Polynomial particular solution of bidegree <= (dt, dx), if one exists.
std::optional<Expr> find_particular_solution(const EvolutionEquation& eq, int dt, int dx);

/// All three steps. Without w, a particular solution is searched for up to
/// the given bidegree.
std::pair<ReducedEquation, GaugeReport> gauge_to_reduced(const EvolutionEquation& eq,
                                                        const std::optional<Expr>& w = std::nullopt,
                                                        int dt = 2, int dx = 6);

/// Generators of the equivalence algebra of the reduced class.
struct EquivGenerator {
  enum Kind { D, P, I } kind;
  Expr f;  // tau, chi or phi, functions of t
};

/// Coefficient directions dA^0 .. dA^{r-2}: the derivative in the group
/// parameter at 0 of the transformed coefficients, at a fixed point.
std::vector<Expr> infinitesimal_action(const EquivGenerator& g, const ReducedEquation& eq);

/// The group element exp(eps*g). D supports tau = a + b t and tau = c t^2.
EquivTransformation one_parameter_flow(const EquivGenerator& g, const Rational& eps);

/// Elementary transformations D(T), P(X0), I(U1) and the reflection X (r even).
struct Elementary {
  enum Kind { D, P, I, X } kind;
  Expr f;

  static Elementary Dt(const Expr& T) { return {D, T}; }
  static Elementary Px(const Expr& X0) { return {P, X0}; }
  static Elementary Iu(const Expr& U1) { return {I, U1}; }
  static Elementary Xr() { return {X, Expr()}; }
  EquivTransformation as_transformation() const;
  std::string str() const;
};

VectorField adjoint_pushforward(const VectorField& q, const Elementary& e, int r);
/// Pushforward by a group element, factored into elementary steps.
VectorField adjoint_pushforward(const VectorField& q, const EquivTransformation& tr, int r);
/// Factorization used above: D(T), then X when eps = -1, then P, then I.
std::vector<Elementary> factor_elementary(const EquivTransformation& tr, int r);

struct Canonical1D {
  VectorField field;  // D(1), P(1)+I(phi), I(1) or I(t)
  Expr scale;         // chain applied to Q equals scale * field
  std::vector<Elementary> chain;
};

Canonical1D canonicalize_1d(const VectorField& q, int r);

}  // namespace linevo
