#include <sstream>

#include "linevo/detail/poly.hpp"
#include "linevo/expr.hpp"

namespace linevo {

using namespace detail;

namespace {

std::string exponent_str(const Ratio& e) {
  if (e == Ratio(1)) return "";
  if (e.is_integer() && e.sign() > 0) return "^" + e.str();
  return "^(" + e.str() + ")";
}

bool single_factor(const Poly& p) {
  return p.size() == 1 && p.terms[0].coeff == 1 && p.terms[0].mono.size() == 1 &&
         p.terms[0].mono[0].gen->kind != GenKind::Exp;
}

std::string poly_str(const Poly& p);

std::string atom_name(GenKind k) {
  switch (k) {
    case GenKind::Ln: return "ln";
    case GenKind::Sin: return "sin";
    case GenKind::Cos: return "cos";
    case GenKind::Abs: return "abs";
    case GenKind::Sgn: return "sgn";
    default: return "?";
  }
}

std::string factor_str(const Factor& f) {
  const Generator& g = *f.gen;
  switch (g.kind) {
    case GenKind::Symbol:
      return g.name + exponent_str(f.exp);
    case GenKind::Radical:
      return g.base.get_str() + "^(" + f.exp.str() + ")";
    case GenKind::Pow: {
      const Poly& b = g.arg.rep().num;
      std::string s = single_factor(b) && b.terms[0].mono[0].exp == Ratio(1) ? poly_str(b) : "(" + poly_str(b) + ")";
      return s + "^(" + f.exp.str() + ")";
    }
    default:
      return atom_name(g.kind) + "(" + g.arg.str() + ")" + exponent_str(f.exp);
  }
}

// Monomial without its coefficient; radicals first, exp factors merged.
std::string mono_str(const Monomial& m) {
  std::vector<std::string> parts;
  for (const auto& f : m)
    if (f.gen->kind == GenKind::Radical) parts.push_back(factor_str(f));
  Expr exparg;
  bool has_exp = false;
  for (const auto& f : m) {
    if (f.gen->kind == GenKind::Radical) continue;
    if (f.gen->kind == GenKind::Exp) {
      exparg = exparg + Expr(f.exp.to_rational()) * f.gen->arg;
      has_exp = true;
      continue;
    }
    parts.push_back(factor_str(f));
  }
  if (has_exp) parts.push_back("exp(" + exparg.str() + ")");
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "*" : "") + parts[i];
  return s;
}

std::string term_str(const Term& t, bool leading) {
  std::string sign;
  Rational c = t.coeff;
  if (c < 0) {
    sign = leading ? "-" : " - ";
    c = -c;
  } else if (!leading) {
    sign = " + ";
  }
  if (t.mono.empty()) return sign + rational_str(c);
  std::string body = mono_str(t.mono);
  if (c.get_num() != 1) body = c.get_num().get_str() + "*" + body;
  if (c.get_den() != 1) body += "/" + c.get_den().get_str();
  return sign + body;
}

std::string poly_str(const Poly& p) {
  if (p.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += term_str(p.terms[i], i == 0);
  return s;
}

bool bare(const Poly& p) {
  // Safe to write without parentheses as a divisor: one factor, coefficient 1.
  return p.size() == 1 && p.terms[0].coeff == 1 && p.terms[0].mono.size() == 1;
}

}  // namespace

std::string Expr::str() const {
  const RatFun& r = rep();
  if (detail::is_one(r.den)) return poly_str(r.num);
  std::string n = poly_str(r.num);
  if (r.num.size() > 1 || (r.num.size() == 1 && r.num.terms[0].coeff.get_den() != 1)) n = "(" + n + ")";
  std::string d = poly_str(r.den);
  if (!bare(r.den)) d = "(" + d + ")";
  return n + "/" + d;
}

}  // namespace linevo
