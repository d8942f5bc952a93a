#pragma once

// Internal representation behind Expr. Exposed so kernel translation units can
// share it; not part of the stable interface.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "linevo/expr.hpp"
#include "linevo/rational.hpp"

namespace linevo::detail {

// Declaration order is the canonical generator order.
enum class GenKind : std::uint8_t { Symbol, Radical, Exp, Ln, Sin, Cos, Abs, Sgn, Pow };

struct Generator {
  GenKind kind;
  std::string name;  // Symbol
  Integer base;      // Radical
  Expr arg;          // Exp: monomial with coefficient 1 (or 1 for e); Pow: polynomial base
  std::vector<std::string> symbols;
  std::size_t hash = 0;
};

using GenPtr = std::shared_ptr<const Generator>;

struct Factor {
  GenPtr gen;
  Ratio exp;
};

// Sorted by generator order, every exponent nonzero.
using Monomial = std::vector<Factor>;

struct Term {
  Monomial mono;
  Rational coeff;
};

// Terms in strictly descending monomial order, coefficients nonzero.
struct Poly {
  std::vector<Term> terms;
  bool empty() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }
};

struct RatFun {
  Poly num;
  Poly den;
  std::vector<Expr> notes;
  std::size_t hash = 0;
  bool atoms = false;
  std::vector<std::string> symbols;
};

int compare_gen(const Generator& a, const Generator& b);
int compare_mono(const Monomial& a, const Monomial& b);
int compare_poly(const Poly& a, const Poly& b);

GenPtr symbol_gen(const std::string& name);
GenPtr radical_gen(const Integer& p);
GenPtr atom_gen(GenKind kind, const Expr& arg);

bool is_one(const Poly& p);
Poly poly_const(const Rational& c);
Poly poly_mono(const Monomial& m, const Rational& c);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_neg(const Poly& a);
Poly poly_scale(const Poly& a, const Rational& c);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_mul_mono(const Poly& a, const Monomial& m);
Poly poly_pow(const Poly& a, unsigned k);
// Build a canonical polynomial from an arbitrary list of terms.
Poly poly_from_terms(std::vector<Term> terms);
// Product of monomials applying the exponent rewrites (radical carry, cos^2, abs^2, ...).
Poly term_canonical(Term t);

Monomial mono_mul(const Monomial& a, const Monomial& b);

// Canonical quotient; throws DomainError when den is zero.
Expr make_ratfun(Poly num, Poly den, std::vector<Expr> notes = {});
Expr from_poly(Poly num, std::vector<Expr> notes = {});
// Wrap an already canonical pair without renormalizing.
Expr make_raw(Poly num, Poly den, std::vector<Expr> notes = {});

void merge_notes(std::vector<Expr>& into, const std::vector<Expr>& from);

// Exact gcd of two polynomials over Q (generators treated as independent
// variables, fractional exponents rescaled to integers). Returned with
// leading coefficient 1.
Poly poly_gcd(const Poly& a, const Poly& b);
// Exact quotient a / b; throws InvariantError if b does not divide a.
Poly poly_divide_exact(const Poly& a, const Poly& b);

}  // namespace linevo::detail
