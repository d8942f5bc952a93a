#include "linevo/expr.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <unordered_map>

#include "linevo/detail/poly.hpp"
#include "linevo/errors.hpp"

namespace linevo {

using namespace detail;

namespace {

const std::shared_ptr<const RatFun>& zero_rep() {
  static const std::shared_ptr<const RatFun> z = [] {
    auto r = std::make_shared<RatFun>();
    r->den = poly_const(1);
    r->hash = 0x51ed;
    return std::shared_ptr<const RatFun>(std::move(r));
  }();
  return z;
}

bool den_one(const Expr& e) { return is_one(e.rep().den); }

std::vector<Expr> joined_notes(const Expr& a, const Expr& b) {
  std::vector<Expr> n = a.domain_notes();
  merge_notes(n, b.domain_notes());
  return n;
}

Expr with_note(const Expr& e, const Expr& note) {
  if (note.is_constant()) return e;
  std::vector<Expr> n = e.domain_notes();
  merge_notes(n, {note});
  return make_raw(e.rep().num, e.rep().den, std::move(n));
}

Expr mono_expr(const Monomial& m, const Rational& c = 1) { return from_poly(poly_mono(m, c)); }

Expr gen_power(const GenPtr& g, const Ratio& e) { return mono_expr(Monomial{{g, e}}); }

struct Split {
  Rational content;  // positive
  Monomial mono;
  Poly rest;
};

// P = content * mono * rest with rest having integer coefficients of gcd 1.
Split split_content(const Poly& p) {
  Integer g = 0, l = 1;
  for (const auto& t : p.terms) {
    g = gcd(g, Integer(t.coeff.get_num()));
    l = lcm(l, Integer(t.coeff.get_den()));
  }
  Split s;
  s.content = Rational(abs(g), l);
  s.content.canonicalize();
  std::vector<std::pair<GenPtr, Ratio>> mins;
  for (const auto& t : p.terms)
    for (const auto& f : t.mono) {
      auto it = std::find_if(mins.begin(), mins.end(), [&](const auto& m) { return compare_gen(*m.first, *f.gen) == 0; });
      if (it == mins.end()) mins.push_back({f.gen, f.exp});
      else it->second = std::min(it->second, f.exp);
    }
  for (auto& [gen, m] : mins) {
    bool everywhere = std::all_of(p.terms.begin(), p.terms.end(), [&](const Term& t) {
      return std::any_of(t.mono.begin(), t.mono.end(), [&](const Factor& h) { return compare_gen(*h.gen, *gen) == 0; });
    });
    if (!everywhere) m = std::min(m, Ratio(0));
    if (!m.is_zero()) s.mono.push_back({gen, m});
  }
  std::sort(s.mono.begin(), s.mono.end(), [](const Factor& a, const Factor& b) { return compare_gen(*a.gen, *b.gen) < 0; });
  Monomial inv = s.mono;
  for (auto& f : inv) f.exp = -f.exp;
  for (const auto& t : p.terms) s.rest.terms.push_back({mono_mul(t.mono, inv), t.coeff / s.content});
  return s;
}

std::map<Integer, std::int64_t> factor_integer(Integer n) {
  std::map<Integer, std::int64_t> f;
  if (n < 0) n = -n;
  for (unsigned long p = 2; p < 100000 && p * p <= n; ++p) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ++f[Integer(p)];
      n /= p;
    }
  }
  if (n > 1) ++f[n];
  return f;
}

// c^f for rational c > 0 and f non-integer.
Expr const_pow(const Rational& c, const Ratio& f) {
  std::map<Integer, Ratio> exps;
  for (const auto& [p, a] : factor_integer(c.get_num())) exps[p] += Ratio(a) * f;
  for (const auto& [p, a] : factor_integer(c.get_den())) exps[p] -= Ratio(a) * f;
  Rational coeff = 1;
  Monomial m;
  for (const auto& [p, e] : exps) {
    if (e.is_zero()) continue;
    m.push_back({radical_gen(p), e});
  }
  return mono_expr(m, coeff);
}

Expr pow_frac_poly(const Poly& p, const Ratio& f);

Expr pow_frac_mono(Rational c, const Monomial& mono, const Ratio& f) {
  Expr sign = 1;
  bool negative = c < 0;
  if (negative && f.den() % 2 != 0) {
    if (f.num() % 2 != 0) sign = -1;
    c = -c;
    negative = false;
  }
  if (negative) {
    if (mono.empty()) throw DomainError("even root of a negative constant");
    // Keep the sign inside: (-M)^f.
    Expr base = from_poly(poly_mono(mono, -1));
    return const_pow(-c, f) * gen_power(atom_gen(GenKind::Pow, base), f);
  }
  Monomial safe, rest;
  for (const auto& fac : mono) {
    switch (fac.gen->kind) {
      case GenKind::Symbol:
      case GenKind::Radical:
      case GenKind::Exp:
      case GenKind::Abs:
      case GenKind::Pow:
        safe.push_back({fac.gen, fac.exp * f});
        break;
      default:
        rest.push_back(fac);
    }
  }
  Expr r = sign * const_pow(c, f) * mono_expr(safe);
  if (!rest.empty()) r = r * gen_power(atom_gen(GenKind::Pow, mono_expr(rest)), f);
  return r;
}

Expr pow_frac_poly(const Poly& p, const Ratio& f) {
  if (p.size() == 1) return pow_frac_mono(p.terms[0].coeff, p.terms[0].mono, f);
  Split s = split_content(p);
  Expr base = from_poly(s.rest);
  return pow_frac_mono(s.content, s.mono, f) * gen_power(atom_gen(GenKind::Pow, base), f);
}

Expr abs_poly(const Poly& p) {
  if (p.size() == 1) {
    const auto& t = p.terms[0];
    Monomial keep;
    Expr r(abs(t.coeff));
    for (const auto& fac : t.mono) {
      switch (fac.gen->kind) {
        case GenKind::Radical:
        case GenKind::Exp:
        case GenKind::Abs:
        case GenKind::Pow:
          keep.push_back(fac);
          break;
        case GenKind::Symbol:
          if (fac.exp.is_integer() && fac.exp.num() % 2 == 0)
            keep.push_back(fac);
          else if (!fac.exp.is_integer())
            keep.push_back(fac);  // fractional powers are taken on the positive branch
          else
            r = r * gen_power(atom_gen(GenKind::Abs, gen_power(fac.gen, Ratio(1))), fac.exp);
          break;
        case GenKind::Sgn:
          break;
        default:
          r = r * gen_power(atom_gen(GenKind::Abs, gen_power(fac.gen, Ratio(1))), fac.exp);
      }
    }
    return r * mono_expr(keep);
  }
  Split s = split_content(p);
  Poly rest = s.rest;
  if (rest.terms.front().coeff < 0) rest = poly_neg(rest);
  return abs_poly(poly_mono(s.mono, s.content)) * gen_power(atom_gen(GenKind::Abs, from_poly(rest)), Ratio(1));
}

Expr sgn_poly(const Poly& p) {
  if (p.size() == 1) {
    const auto& t = p.terms[0];
    Expr r(t.coeff < 0 ? -1 : 1);
    for (const auto& fac : t.mono) {
      switch (fac.gen->kind) {
        case GenKind::Radical:
        case GenKind::Exp:
        case GenKind::Abs:
        case GenKind::Pow:
          break;
        case GenKind::Sgn:
          r = r * gen_power(fac.gen, fac.exp);
          break;
        default:
          if (!fac.exp.is_integer()) break;
          if (fac.exp.num() % 2 != 0) r = r * gen_power(atom_gen(GenKind::Sgn, gen_power(fac.gen, Ratio(1))), Ratio(1));
      }
    }
    return r;
  }
  Split s = split_content(p);
  Expr sign = 1;
  Poly rest = s.rest;
  if (rest.terms.front().coeff < 0) {
    rest = poly_neg(rest);
    sign = -1;
  }
  return sign * sgn_poly(poly_mono(s.mono, 1)) * gen_power(atom_gen(GenKind::Sgn, from_poly(rest)), Ratio(1));
}

Expr negate(const Expr& a) {
  if (a.is_zero()) return a;
  return make_raw(poly_neg(a.rep().num), a.rep().den, a.domain_notes());
}

}  // namespace

Expr::Expr() : rep_(zero_rep()) {}
Expr::Expr(int v) : Expr(Rational(v)) {}
Expr::Expr(long v) : Expr(Rational(v)) {}
Expr::Expr(long long v) : Expr(Rational(Integer(std::to_string(v)))) {}
Expr::Expr(const Rational& q) : rep_(q == 0 ? zero_rep() : from_poly(poly_const(q)).rep_) {}
Expr::Expr(std::shared_ptr<const RatFun> rep) : rep_(std::move(rep)) {}

Expr Expr::symbol(std::string_view name) {
  thread_local std::unordered_map<std::string, Expr> cache;
  std::string key(name);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Expr e = mono_expr(Monomial{{symbol_gen(key), Ratio(1)}});
  cache.emplace(key, e);
  return e;
}

Expr Expr::rational(long num, long den) {
  if (den == 0) throw DomainError("division by zero");
  return Expr(Rational(num, den) + 0);
}

bool Expr::is_zero() const { return rep_->num.empty(); }
bool Expr::is_one() const { return detail::is_one(rep_->num) && detail::is_one(rep_->den); }
bool Expr::is_constant() const { return rep_->symbols.empty() && !rep_->atoms; }
bool Expr::is_polynomial() const { return detail::is_one(rep_->den); }
bool Expr::has_atoms() const { return rep_->atoms; }

std::optional<Rational> Expr::as_rational() const {
  if (!detail::is_one(rep_->den)) return std::nullopt;
  if (rep_->num.empty()) return Rational(0);
  if (rep_->num.size() == 1 && rep_->num.terms[0].mono.empty()) return rep_->num.terms[0].coeff;
  return std::nullopt;
}

bool Expr::depends_on(std::string_view s) const {
  return std::binary_search(rep_->symbols.begin(), rep_->symbols.end(), s,
                            [](const auto& a, const auto& b) { return std::string_view(a) < std::string_view(b); });
}

std::vector<std::string> Expr::free_symbols() const { return rep_->symbols; }

Expr Expr::numerator() const { return from_poly(rep_->num); }
Expr Expr::denominator() const { return from_poly(rep_->den); }

std::size_t Expr::hash() const { return rep_->hash; }
const std::vector<Expr>& Expr::domain_notes() const { return rep_->notes; }

Expr Expr::operator-() const { return negate(*this); }
Expr& Expr::operator+=(const Expr& o) { return *this = *this + o; }
Expr& Expr::operator-=(const Expr& o) { return *this = *this - o; }
Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }
Expr& Expr::operator/=(const Expr& o) { return *this = *this / o; }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const RatFun& x = a.rep();
  const RatFun& y = b.rep();
  if (den_one(a) && den_one(b)) return from_poly(poly_add(x.num, y.num), joined_notes(a, b));
  if (compare_poly(x.den, y.den) == 0) return make_ratfun(poly_add(x.num, y.num), x.den, joined_notes(a, b));
  return make_ratfun(poly_add(poly_mul(x.num, y.den), poly_mul(y.num, x.den)), poly_mul(x.den, y.den),
                     joined_notes(a, b));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  const RatFun& x = a.rep();
  const RatFun& y = b.rep();
  if (auto c = a.as_rational()) return make_raw(poly_scale(y.num, *c), y.den, joined_notes(a, b));
  if (auto c = b.as_rational()) return make_raw(poly_scale(x.num, *c), x.den, joined_notes(a, b));
  if (den_one(a) && den_one(b)) return from_poly(poly_mul(x.num, y.num), joined_notes(a, b));
  return make_ratfun(poly_mul(x.num, y.num), poly_mul(x.den, y.den), joined_notes(a, b));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw DomainError("division by zero");
  if (a.is_zero()) return Expr();
  const RatFun& x = a.rep();
  const RatFun& y = b.rep();
  if (auto c = b.as_rational()) return make_raw(poly_scale(x.num, 1 / *c), x.den, a.domain_notes());
  std::vector<Expr> notes = joined_notes(a, b);
  Expr bn = b.numerator();
  if (!bn.is_constant()) merge_notes(notes, {bn});
  return make_ratfun(poly_mul(x.num, y.den), poly_mul(x.den, y.num), std::move(notes));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.rep_ptr() == b.rep_ptr()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

int compare(const Expr& a, const Expr& b) {
  if (a.rep_ptr() == b.rep_ptr()) return 0;
  int c = compare_poly(a.rep().num, b.rep().num);
  if (c != 0) return c;
  return compare_poly(a.rep().den, b.rep().den);
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.str(); }

Expr pow(const Expr& base, const Ratio& q) {
  if (q.is_zero()) return 1;
  if (base.is_zero()) {
    if (q.sign() > 0) return Expr();
    throw DomainError("zero raised to a nonpositive power");
  }
  if (q.is_integer()) {
    std::int64_t k = q.num();
    if (k < 0) return Expr(1) / pow(base, Ratio(-k));
    if (k == 1) return base;
    const RatFun& r = base.rep();
    if (den_one(base)) return from_poly(poly_pow(r.num, static_cast<unsigned>(k)), base.domain_notes());
    return make_ratfun(poly_pow(r.num, static_cast<unsigned>(k)), poly_pow(r.den, static_cast<unsigned>(k)),
                       base.domain_notes());
  }
  Ratio f = q.frac();
  std::int64_t fl = q.floor();
  const RatFun& r = base.rep();
  Expr frac;
  if (!den_one(base) && f.den() % 2 == 0 && r.num.size() == 1 && r.num.terms[0].mono.empty() &&
      r.num.terms[0].coeff < 0) {
    // (-c/D)^f = (c/(-D))^f: an even root needs the sign on the nonconstant side.
    frac = pow_frac_poly(poly_neg(r.num), f) / pow_frac_poly(poly_neg(r.den), f);
  } else {
    frac = pow_frac_poly(r.num, f);
    if (!den_one(base)) frac = frac / pow_frac_poly(r.den, f);
  }
  return fl == 0 ? frac : pow(base, Ratio(fl)) * frac;
}

Expr pow(const Expr& base, long k) { return pow(base, Ratio(k)); }

Expr pow(const Expr& base, const Expr& e) {
  auto q = e.as_rational();
  if (!q) throw UnsupportedError("exponent must be a rational constant: " + e.str());
  return pow(base, Ratio::from_rational(*q));
}

Expr exp(const Expr& e) {
  if (e.is_zero()) return 1;
  const RatFun& r = e.rep();
  Monomial m;
  auto push = [&](const Expr& arg, const Rational& c) {
    GenPtr g = atom_gen(GenKind::Exp, arg);
    m.push_back({g, Ratio::from_rational(c)});
  };
  if (r.den.size() == 1) {
    // Split over the terms of the numerator: exp(a + b) = exp(a) exp(b).
    const Term& d = r.den.terms[0];
    Poly dm = poly_mono(d.mono, 1);
    for (const auto& t : r.num.terms) {
      Rational c = t.coeff / d.coeff;
      if (t.mono.empty() && d.mono.empty())
        push(Expr(1), c);
      else
        push(make_ratfun(poly_mono(t.mono, 1), dm), c);
    }
  } else {
    Rational lc = r.num.terms.front().coeff;
    push(e / Expr(lc), lc);
  }
  std::sort(m.begin(), m.end(), [](const Factor& a, const Factor& b) { return compare_gen(*a.gen, *b.gen) < 0; });
  // Distinct terms can still map to the same generator (e.g. x/x^2 and 1/x never coexist, but be safe).
  Monomial merged;
  for (auto& f : m) {
    if (!merged.empty() && compare_gen(*merged.back().gen, *f.gen) == 0) {
      merged.back().exp += f.exp;
      if (merged.back().exp.is_zero()) merged.pop_back();
    } else {
      merged.push_back(f);
    }
  }
  return mono_expr(merged);
}

Expr ln(const Expr& e) {
  if (auto c = e.as_rational()) {
    if (*c <= 0) throw DomainError("logarithm of a nonpositive constant");
    if (*c == 1) return Expr();
  }
  const RatFun& r = e.rep();
  if (den_one(e) && r.num.size() == 1 && r.num.terms[0].coeff > 0) {
    const Term& t = r.num.terms[0];
    bool only_exp = !t.mono.empty() && std::all_of(t.mono.begin(), t.mono.end(),
                                                   [](const Factor& f) { return f.gen->kind == GenKind::Exp; });
    if (only_exp) {
      Expr s = t.coeff == 1 ? Expr() : ln(Expr(t.coeff));
      for (const auto& f : t.mono) s = s + Expr(f.exp.to_rational()) * f.gen->arg;
      return s;
    }
  }
  return with_note(gen_power(atom_gen(GenKind::Ln, e), Ratio(1)), e);
}

Expr sin(const Expr& e) {
  if (e.is_zero()) return Expr();
  if (e.rep().num.terms.front().coeff < 0) return -sin(-e);
  return gen_power(atom_gen(GenKind::Sin, e), Ratio(1));
}

Expr cos(const Expr& e) {
  if (e.is_zero()) return 1;
  if (e.rep().num.terms.front().coeff < 0) return cos(-e);
  return gen_power(atom_gen(GenKind::Cos, e), Ratio(1));
}

Expr abs(const Expr& e) {
  if (auto c = e.as_rational()) return Expr(abs(*c));
  Expr r = abs_poly(e.rep().num);
  if (!den_one(e)) r = r / abs_poly(e.rep().den);
  return with_note(r, e);
}

Expr sgn(const Expr& e) {
  if (auto c = e.as_rational()) return Expr(sgn(*c));
  Expr r = sgn_poly(e.rep().num);
  if (!den_one(e)) r = r * sgn_poly(e.rep().den);
  return with_note(r, e);
}

}  // namespace linevo
