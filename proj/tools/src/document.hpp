#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "linevo/equivalence.hpp"
#include "linevo/model.hpp"
#include "linevo/solutions.hpp"
#include "linevo/symkernel.hpp"
#include "linevo/verify.hpp"

namespace linevo::cli {

using json = nlohmann::ordered_json;

enum class Form { General, ReducedInhomogeneous, Reduced };
std::string form_name(Form f);

/// An equation as read from a document, with parameters applied.
struct EquationDoc {
  Form form = Form::Reduced;
  EvolutionEquation general;  // always set
  std::optional<ReducedEquation> reduced;
  SymbolTable symbols;   // declared parameter names
  Bindings values;       // rational parameter values
  json parameters = json::object();
  json domain;           // null when absent

  int r() const { return general.r; }
  /// The reduced equation or an InputError naming the command.
  const ReducedEquation& need_reduced(const std::string& cmd) const;
  /// Box from the domain field, else [0,1]^2.
  GridSpec default_grid() const;
};

Rational read_rational(const json& j);
std::string rational_json(const Rational& q);

EquationDoc read_equation(const json& j);
/// Reduced form when the equation is reduced, general otherwise.
json write_equation(const EvolutionEquation& eq, const EquationDoc& like);
json write_reduced(const ReducedEquation& eq, const EquationDoc& like);

Expr read_expr(const json& j, const SymbolTable& syms, const Bindings& values);

/// {"T","X0","U1","U0","eps","parameters"}.
EquivTransformation read_transformation(const json& j, const EquationDoc& doc);
json write_transformation(const GeneralTransformation& tr);

/// {"tau","chi","phi","eta0"} or compact text such as "D(1) + P(t) + I(t)".
VectorField read_field(const json& j, const EquationDoc& doc);
json write_field(const VectorField& q);

/// {"t":[a,b],"x":[c,d],"ht":..,"hx":..,"order":p}; missing keys keep `base`.
GridSpec read_grid(const json& j, GridSpec base);
json write_grid(const GridSpec& g);

/// Numeric solutions are sampled on the grid refined by this factor.
constexpr int kRefinement = 4;

json write_solution(const Solution& s, const GridSpec& grid);

}  // namespace linevo::cli
