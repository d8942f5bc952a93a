#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linevo/rational.hpp"

namespace linevo {

namespace detail {
struct Generator;
struct RatFun;
}  // namespace detail

/// Exact symbolic expression in t, x and declared parameters.
///
/// An Expr is an immutable handle to a canonical rational function whose
/// numerator and denominator are polynomials over Q in a set of generators:
/// symbols, prime radicals (2^(1/3)), and the atoms exp, ln, sin, cos, abs,
/// sgn and fractional powers of polynomials. Every arithmetic operation
/// returns a canonical value, so two rational-fragment expressions are equal
/// exactly when their handles compare equal.
class Expr {
 public:
  Expr();
  Expr(int v);
  Expr(long v);
  Expr(long long v);
  explicit Expr(const Rational& q);
  explicit Expr(std::shared_ptr<const detail::RatFun> rep);

  static Expr symbol(std::string_view name);
  static Expr rational(long num, long den);

  /// Structurally zero. See `is_zero(const Expr&)` for the semantic test.
  bool is_zero() const;
  bool is_one() const;
  /// No symbols and no transcendental atoms (radicals allowed).
  bool is_constant() const;
  std::optional<Rational> as_rational() const;
  bool depends_on(std::string_view symbol) const;
  std::vector<std::string> free_symbols() const;
  /// Denominator is exactly 1.
  bool is_polynomial() const;
  /// Any generator other than a symbol or a prime radical.
  bool has_atoms() const;

  Expr numerator() const;
  Expr denominator() const;

  /// Parseable canonical text.
  std::string str() const;

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr& operator/=(const Expr& o);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
  friend bool operator<(const Expr& a, const Expr& b);

  std::size_t hash() const;
  /// Domain restrictions collected while building this value: each note is
  /// an expression the value assumes nonzero (cancelled factors, arguments
  /// of abs, sgn and ln).
  const std::vector<Expr>& domain_notes() const;

  const detail::RatFun& rep() const { return *rep_; }
  const std::shared_ptr<const detail::RatFun>& rep_ptr() const { return rep_; }

 private:
  std::shared_ptr<const detail::RatFun> rep_;
};

/// Total order consistent with ==; negative, zero or positive.
int compare(const Expr& a, const Expr& b);

std::ostream& operator<<(std::ostream& os, const Expr& e);

Expr pow(const Expr& base, const Ratio& exponent);
Expr pow(const Expr& base, long exponent);
/// The exponent must be a rational constant.
Expr pow(const Expr& base, const Expr& exponent);

Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr abs(const Expr& e);
Expr sgn(const Expr& e);

inline Expr sq(const Expr& e) { return e * e; }

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

}  // namespace linevo
