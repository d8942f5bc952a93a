#include <algorithm>
#include <functional>

#include "linevo/detail/poly.hpp"
#include "linevo/errors.hpp"

namespace linevo::detail {

namespace {

constexpr std::size_t kMaxNotes = 8;

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::size_t hash_int(const mpz_class& z) { return static_cast<std::size_t>(mpz_get_ui(z.get_mpz_t())) * (sgn(z) < 0 ? 31 : 1); }

std::size_t hash_rat(const Rational& q) { return mix(hash_int(q.get_num()), hash_int(q.get_den())); }

std::size_t hash_poly(const Poly& p) {
  std::size_t h = p.size();
  for (const auto& t : p.terms) {
    h = mix(h, hash_rat(t.coeff));
    for (const auto& f : t.mono) {
      h = mix(h, f.gen->hash);
      h = mix(h, static_cast<std::size_t>(f.exp.num() * 131 + f.exp.den()));
    }
  }
  return h;
}

Rational rat_pow(const Rational& b, std::int64_t k) {
  Rational r = 1;
  Rational base = k < 0 ? Rational(1) / b : b;
  for (std::int64_t i = 0, n = k < 0 ? -k : k; i < n; ++i) r *= base;
  return r;
}

bool needs_fix(const Monomial& m) {
  for (const auto& f : m) {
    switch (f.gen->kind) {
      case GenKind::Radical:
      case GenKind::Pow:
        if (f.exp.sign() < 0 || f.exp >= Ratio(1)) return true;
        break;
      case GenKind::Cos:
      case GenKind::Abs:
        if (f.exp >= Ratio(2)) return true;
        break;
      case GenKind::Sgn:
        if (f.exp != Ratio(1)) return true;
        break;
      default:
        break;
    }
  }
  return false;
}

void finalize(RatFun& r) {
  r.hash = mix(hash_poly(r.num), hash_poly(r.den));
  r.atoms = false;
  std::vector<std::string> syms;
  for (const Poly* p : {&r.num, &r.den})
    for (const auto& t : p->terms)
      for (const auto& f : t.mono) {
        if (f.gen->kind != GenKind::Symbol && f.gen->kind != GenKind::Radical) r.atoms = true;
        syms.insert(syms.end(), f.gen->symbols.begin(), f.gen->symbols.end());
      }
  std::sort(syms.begin(), syms.end());
  syms.erase(std::unique(syms.begin(), syms.end()), syms.end());
  r.symbols = std::move(syms);
}

const Poly& one_poly() {
  static const Poly p = poly_const(1);
  return p;
}

// Per-generator minimum exponent over all terms, absent counted as zero.
std::vector<Factor> min_exponents(const std::vector<const Poly*>& ps) {
  std::vector<Factor> mins;
  std::size_t nterms = 0;
  for (const Poly* p : ps) nterms += p->size();
  std::vector<std::pair<Factor, std::size_t>> seen;
  for (const Poly* p : ps)
    for (const auto& t : p->terms)
      for (const auto& f : t.mono) {
        auto it = std::find_if(seen.begin(), seen.end(),
                               [&](const auto& s) { return compare_gen(*s.first.gen, *f.gen) == 0; });
        if (it == seen.end())
          seen.push_back({f, 1});
        else {
          if (f.exp < it->first.exp) it->first.exp = f.exp;
          ++it->second;
        }
      }
  for (auto& [f, count] : seen) {
    Ratio e = f.exp;
    if (count < nterms && e.sign() > 0) e = Ratio(0);
    if (!e.is_zero()) mins.push_back({f.gen, e});
  }
  std::sort(mins.begin(), mins.end(), [](const Factor& a, const Factor& b) { return compare_gen(*a.gen, *b.gen) < 0; });
  return mins;
}

Monomial mono_inverse(const Monomial& m) {
  Monomial r = m;
  for (auto& f : r) f.exp = -f.exp;
  return r;
}

// Divide every term by a monomial that divides each of them; order is preserved.
Poly divide_mono(const Poly& p, const Monomial& m) {
  Poly r;
  r.terms.reserve(p.size());
  Monomial inv = mono_inverse(m);
  for (const auto& t : p.terms) r.terms.push_back({mono_mul(t.mono, inv), t.coeff});
  return r;
}

}  // namespace

int compare_gen(const Generator& a, const Generator& b) {
  if (&a == &b) return 0;
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case GenKind::Symbol:
      return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    case GenKind::Radical:
      return cmp(a.base, b.base) < 0 ? -1 : (a.base == b.base ? 0 : 1);
    default:
      return compare(a.arg, b.arg);
  }
}

int compare_mono(const Monomial& a, const Monomial& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = compare_gen(*a[i].gen, *b[j].gen);
    if (c < 0) return a[i].exp.sign() > 0 ? 1 : -1;
    if (c > 0) return b[j].exp.sign() > 0 ? -1 : 1;
    if (a[i].exp != b[j].exp) return a[i].exp > b[j].exp ? 1 : -1;
    ++i;
    ++j;
  }
  if (i < a.size()) return a[i].exp.sign() > 0 ? 1 : -1;
  if (j < b.size()) return b[j].exp.sign() > 0 ? -1 : 1;
  return 0;
}

int compare_poly(const Poly& a, const Poly& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = compare_mono(a.terms[i].mono, b.terms[i].mono);
    if (c != 0) return c;
    int d = cmp(a.terms[i].coeff, b.terms[i].coeff);
    if (d != 0) return d < 0 ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

GenPtr symbol_gen(const std::string& name) {
  auto g = std::make_shared<Generator>();
  g->kind = GenKind::Symbol;
  g->name = name;
  g->symbols = {name};
  g->hash = mix(1, std::hash<std::string>{}(name));
  return g;
}

GenPtr radical_gen(const Integer& p) {
  auto g = std::make_shared<Generator>();
  g->kind = GenKind::Radical;
  g->base = p;
  g->hash = mix(2, hash_int(p));
  return g;
}

GenPtr atom_gen(GenKind kind, const Expr& arg) {
  auto g = std::make_shared<Generator>();
  g->kind = kind;
  g->arg = arg;
  g->symbols = arg.free_symbols();
  g->hash = mix(static_cast<std::size_t>(kind) + 3, arg.hash());
  return g;
}

bool is_one(const Poly& p) { return p.size() == 1 && p.terms[0].mono.empty() && p.terms[0].coeff == 1; }

Poly poly_const(const Rational& c) {
  Poly p;
  if (c != 0) p.terms.push_back({{}, c});
  return p;
}

Poly poly_mono(const Monomial& m, const Rational& c) {
  if (c == 0) return {};
  if (needs_fix(m)) return term_canonical({m, c});
  Poly p;
  p.terms.push_back({m, c});
  return p;
}

Poly poly_add(const Poly& a, const Poly& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Poly r;
  r.terms.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = compare_mono(a.terms[i].mono, b.terms[j].mono);
    if (c > 0)
      r.terms.push_back(a.terms[i++]);
    else if (c < 0)
      r.terms.push_back(b.terms[j++]);
    else {
      Rational s = a.terms[i].coeff + b.terms[j].coeff;
      if (s != 0) r.terms.push_back({a.terms[i].mono, s});
      ++i;
      ++j;
    }
  }
  while (i < a.size()) r.terms.push_back(a.terms[i++]);
  while (j < b.size()) r.terms.push_back(b.terms[j++]);
  return r;
}

Poly poly_neg(const Poly& a) {
  Poly r = a;
  for (auto& t : r.terms) t.coeff = -t.coeff;
  return r;
}

Poly poly_scale(const Poly& a, const Rational& c) {
  if (c == 0) return {};
  Poly r = a;
  for (auto& t : r.terms) t.coeff *= c;
  return r;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Monomial r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = compare_gen(*a[i].gen, *b[j].gen);
    if (c < 0)
      r.push_back(a[i++]);
    else if (c > 0)
      r.push_back(b[j++]);
    else {
      Ratio e = a[i].exp + b[j].exp;
      if (!e.is_zero()) r.push_back({a[i].gen, e});
      ++i;
      ++j;
    }
  }
  while (i < a.size()) r.push_back(a[i++]);
  while (j < b.size()) r.push_back(b[j++]);
  return r;
}

Poly poly_from_terms(std::vector<Term> terms) {
  std::vector<Term> plain;
  Poly extra;
  plain.reserve(terms.size());
  for (auto& t : terms) {
    if (t.coeff == 0) continue;
    if (needs_fix(t.mono))
      extra = poly_add(extra, term_canonical(std::move(t)));
    else
      plain.push_back(std::move(t));
  }
  std::sort(plain.begin(), plain.end(), [](const Term& a, const Term& b) { return compare_mono(a.mono, b.mono) > 0; });
  Poly r;
  for (auto& t : plain) {
    if (!r.terms.empty() && compare_mono(r.terms.back().mono, t.mono) == 0) {
      r.terms.back().coeff += t.coeff;
      if (r.terms.back().coeff == 0) r.terms.pop_back();
    } else {
      r.terms.push_back(std::move(t));
    }
  }
  return poly_add(r, extra);
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  if (a.size() == 1 && a.terms[0].mono.empty()) return poly_scale(b, a.terms[0].coeff);
  if (b.size() == 1 && b.terms[0].mono.empty()) return poly_scale(a, b.terms[0].coeff);
  std::vector<Term> terms;
  terms.reserve(a.size() * b.size());
  for (const auto& x : a.terms)
    for (const auto& y : b.terms) terms.push_back({mono_mul(x.mono, y.mono), x.coeff * y.coeff});
  return poly_from_terms(std::move(terms));
}

Poly poly_mul_mono(const Poly& a, const Monomial& m) {
  if (m.empty()) return a;
  std::vector<Term> terms;
  terms.reserve(a.size());
  for (const auto& x : a.terms) terms.push_back({mono_mul(x.mono, m), x.coeff});
  return poly_from_terms(std::move(terms));
}

Poly poly_pow(const Poly& a, unsigned k) {
  Poly r = one_poly(), b = a;
  while (k) {
    if (k & 1) r = poly_mul(r, b);
    k >>= 1;
    if (k) b = poly_mul(b, b);
  }
  return r;
}

Poly term_canonical(Term t) {
  Rational c = t.coeff;
  Monomial keep;
  Poly extra = one_poly();
  for (auto& f : t.mono) {
    Ratio e = f.exp;
    switch (f.gen->kind) {
      case GenKind::Radical: {
        std::int64_t fl = e.floor();
        c *= rat_pow(Rational(f.gen->base), fl);
        e = e.frac();
        break;
      }
      case GenKind::Pow: {
        std::int64_t fl = e.floor();
        if (fl < 0) throw InvariantError("negative power generator exponent");
        if (fl > 0) extra = poly_mul(extra, poly_pow(f.gen->arg.rep().num, static_cast<unsigned>(fl)));
        e = e.frac();
        break;
      }
      case GenKind::Cos: {
        if (e >= Ratio(2)) {
          std::int64_t k = (e / Ratio(2)).floor();
          Monomial s2{{atom_gen(GenKind::Sin, f.gen->arg), Ratio(2)}};
          Poly one_minus = poly_add(one_poly(), poly_mono(s2, -1));
          extra = poly_mul(extra, poly_pow(one_minus, static_cast<unsigned>(k)));
          e = e - Ratio(2 * k);
        }
        break;
      }
      case GenKind::Abs: {
        if (e >= Ratio(2)) {
          std::int64_t k = (e / Ratio(2)).floor();
          extra = poly_mul(extra, poly_pow(f.gen->arg.rep().num, static_cast<unsigned>(2 * k)));
          e = e - Ratio(2 * k);
        }
        break;
      }
      case GenKind::Sgn: {
        if (!e.is_integer()) throw InvariantError("fractional sgn exponent");
        std::int64_t k = ((e.num() % 2) + 2) % 2;
        e = Ratio(k);
        break;
      }
      default:
        break;
    }
    if (!e.is_zero()) keep.push_back({f.gen, e});
  }
  Poly base;
  base.terms.push_back({std::move(keep), c});
  if (is_one(extra)) return base;
  return poly_mul(base, extra);
}

void merge_notes(std::vector<Expr>& into, const std::vector<Expr>& from) {
  for (const auto& n : from) {
    if (into.size() >= kMaxNotes) return;
    if (std::find(into.begin(), into.end(), n) == into.end()) into.push_back(n);
  }
}

Expr from_poly(Poly num, std::vector<Expr> notes) {
  if (num.empty()) return Expr();
  auto r = std::make_shared<RatFun>();
  r->num = std::move(num);
  r->den = one_poly();
  if (notes.size() > kMaxNotes) notes.resize(kMaxNotes);
  r->notes = std::move(notes);
  finalize(*r);
  return Expr(std::shared_ptr<const RatFun>(std::move(r)));
}

Expr make_raw(Poly num, Poly den, std::vector<Expr> notes) {
  if (num.empty()) return Expr();
  auto r = std::make_shared<RatFun>();
  r->num = std::move(num);
  r->den = std::move(den);
  if (notes.size() > kMaxNotes) notes.resize(kMaxNotes);
  r->notes = std::move(notes);
  finalize(*r);
  return Expr(std::shared_ptr<const RatFun>(std::move(r)));
}

Expr make_ratfun(Poly n, Poly d, std::vector<Expr> notes) {
  if (d.empty()) throw DomainError("division by zero");
  if (n.empty()) return Expr();
  if (d.size() == 1 && d.terms[0].mono.empty()) return from_poly(poly_scale(n, 1 / d.terms[0].coeff), std::move(notes));

  // Shift away negative exponents.
  {
    Monomial up;
    for (const auto& f : min_exponents({&n, &d}))
      if (f.exp.sign() < 0) up.push_back({f.gen, -f.exp});
    if (!up.empty()) {
      n = poly_mul_mono(n, up);
      d = poly_mul_mono(d, up);
    }
  }
  // Common monomial content.
  {
    Monomial mn = min_exponents({&n}), md = min_exponents({&d}), common;
    std::size_t i = 0, j = 0;
    while (i < mn.size() && j < md.size()) {
      int c = compare_gen(*mn[i].gen, *md[j].gen);
      if (c < 0)
        ++i;
      else if (c > 0)
        ++j;
      else {
        common.push_back({mn[i].gen, std::min(mn[i].exp, md[j].exp)});
        ++i;
        ++j;
      }
    }
    if (!common.empty()) {
      n = divide_mono(n, common);
      d = divide_mono(d, common);
    }
  }
  if (n.size() > 1 && d.size() > 1) {
    Poly g = poly_gcd(n, d);
    if (!(g.size() == 1 && g.terms[0].mono.empty())) {
      n = poly_divide_exact(n, g);
      d = poly_divide_exact(d, g);
      std::vector<Expr> gn{from_poly(g)};
      merge_notes(gn, notes);
      notes = std::move(gn);
    }
  }
  // Units leave the denominator; so do radicals and fractional powers of
  // a single-term denominator (the latter by clearing into the base).
  bool cleared_pow = false;
  {
    Monomial down;
    for (const auto& f : min_exponents({&d})) {
      GenKind k = f.gen->kind;
      if (k == GenKind::Exp) {
        down.push_back({f.gen, -f.exp});
      } else if (d.size() == 1 && (k == GenKind::Radical || k == GenKind::Pow)) {
        down.push_back({f.gen, Ratio(1) - f.exp});
        cleared_pow = cleared_pow || k == GenKind::Pow;
      }
    }
    if (!down.empty()) {
      n = poly_mul_mono(n, down);
      d = poly_mul_mono(d, down);
    }
  }
  // The new denominator is free of Pow factors, so this recursion is one level.
  if (cleared_pow) return make_ratfun(std::move(n), std::move(d), std::move(notes));
  Rational lc = d.terms.front().coeff;
  if (lc != 1) {
    n = poly_scale(n, 1 / lc);
    d = poly_scale(d, 1 / lc);
  }
  if (is_one(d)) return from_poly(std::move(n), std::move(notes));
  auto r = std::make_shared<RatFun>();
  r->num = std::move(n);
  r->den = std::move(d);
  if (notes.size() > kMaxNotes) notes.resize(kMaxNotes);
  r->notes = std::move(notes);
  finalize(*r);
  return Expr(std::shared_ptr<const RatFun>(std::move(r)));
}

}  // namespace linevo::detail
