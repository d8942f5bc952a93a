#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "linevo/expr.hpp"

namespace linevo {

/// Names an expression may mention. t and x are always present.
class SymbolTable {
 public:
  SymbolTable() = default;
  SymbolTable(std::initializer_list<std::string> names) {
    for (const auto& n : names) declare(n);
  }
  void declare(const std::string& name) { names_.insert(name); }
  bool has(std::string_view name) const {
    return name == "t" || name == "x" || names_.count(std::string(name)) > 0;
  }
  const std::set<std::string>& declared() const { return names_; }

 private:
  std::set<std::string> names_;
};

/// Infix grammar with exp, ln, sin, cos, abs, sgn. Throws ParseError.
Expr parse_expr(std::string_view text, const SymbolTable& symbols = {});

Expr differentiate(const Expr& e, std::string_view var, unsigned n = 1);

using Bindings = std::map<std::string, Expr>;

/// Simultaneous substitution: every occurrence is replaced by the original
/// binding, so {t -> 2*t, x -> t} is well defined.
Expr substitute(const Expr& e, const Bindings& b);

/// Apply bindings repeatedly until no bound symbol remains. Throws
/// InputError on cyclic bindings.
Expr substitute_recursive(const Expr& e, const Bindings& b);

/// Antiderivative in var for polynomials, rational functions whose
/// denominator splits over Q, and p(var)*exp(a*var + b); absent otherwise.
std::optional<Expr> integrate(const Expr& e, std::string_view var);

using Point = std::map<std::string, double>;

/// Double evaluation. Throws DomainError outside the domain and InputError
/// for unbound symbols.
double eval_numeric(const Expr& e, const Point& p);
/// Same in extended precision, for finite-difference work.
long double eval_numeric_ld(const Expr& e, const std::map<std::string, long double>& p);

enum class ZeroVerdict { Zero, NonZero, Unknown };

struct ZeroOptions {
  int probes = 8;
  double tolerance = 1e-9;
  std::uint64_t seed = 12345;
};

ZeroVerdict is_zero(const Expr& e, const ZeroOptions& opt = {});
inline bool is_zero_exact(const Expr& e) { return e.is_zero(); }

/// Expressions are canonical on construction; kept for callers that want
/// the explicit step.
inline Expr normalize(const Expr& e) { return e; }

/// Optional rewrite exp(q*ln(a)) -> a^q (not applied by default).
Expr expand_exp_log(const Expr& e);

enum class Sign { Positive, Negative };

/// Rewrite abs(s) and sgn(s) under the assumption that s has the given sign.
Expr apply_sign_assumption(const Expr& e, std::string_view symbol, Sign sign);

/// Generic rebuild: f sees every generator power bottom up (arguments
/// already rebuilt) and may return a replacement for generator^exponent.
struct GenView {
  enum Kind { Symbol, Radical, Exp, Ln, Sin, Cos, Abs, Sgn, Pow } kind;
  std::string name;  // Symbol
  Expr arg;          // rebuilt argument; the base for Radical and Pow
  Ratio exponent;
};
Expr transform_generators(const Expr& e, const std::function<std::optional<Expr>(const GenView&)>& f);

/// Degree of e as a polynomial in var, or nullopt when e is not polynomial in var.
std::optional<int> poly_degree(const Expr& e, std::string_view var);
/// Coefficients c_0..c_d of e as a polynomial in var (throws UnsupportedError otherwise).
std::vector<Expr> poly_coefficients(const Expr& e, std::string_view var);

/// Terms of the numerator as separate expressions divided by the denominator.
std::vector<Expr> expand_terms(const Expr& e);

}  // namespace linevo
