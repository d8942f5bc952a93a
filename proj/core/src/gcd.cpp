// Multivariate gcd and exact division. Generators become independent
// variables; fractional exponents of a generator are rescaled by the lcm of
// their denominators so every exponent is a nonnegative integer.

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "linevo/detail/poly.hpp"
#include "linevo/errors.hpp"

namespace linevo::detail {

namespace {

using Exps = std::vector<std::int64_t>;

struct IP {
  std::map<Exps, Rational, std::greater<>> t;
  bool zero() const { return t.empty(); }
};

struct Vars {
  std::vector<GenPtr> gens;
  std::vector<std::int64_t> scale;
  std::size_t n() const { return gens.size(); }
};

void add_term(IP& p, const Exps& e, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = p.t.emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) p.t.erase(it);
  }
}

IP sub(const IP& a, const IP& b) {
  IP r = a;
  for (const auto& [e, c] : b.t) add_term(r, e, -c);
  return r;
}

IP mul(const IP& a, const IP& b) {
  IP r;
  for (const auto& [ea, ca] : a.t)
    for (const auto& [eb, cb] : b.t) {
      Exps e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      add_term(r, e, ca * cb);
    }
  return r;
}

IP constant(std::size_t n, const Rational& c) {
  IP r;
  add_term(r, Exps(n, 0), c);
  return r;
}

std::int64_t degree(const IP& a, std::size_t v) {
  std::int64_t d = -1;
  for (const auto& [e, c] : a.t) d = std::max(d, e[v]);
  return d;
}

IP coeff(const IP& a, std::size_t v, std::int64_t d) {
  IP r;
  for (const auto& [e, c] : a.t)
    if (e[v] == d) {
      Exps f = e;
      f[v] = 0;
      r.t.emplace(std::move(f), c);
    }
  return r;
}

IP shift(const IP& a, std::size_t v, std::int64_t d) {
  IP r;
  for (const auto& [e, c] : a.t) {
    Exps f = e;
    f[v] += d;
    r.t.emplace(std::move(f), c);
  }
  return r;
}

IP exact_div(IP a, const IP& b) {
  if (b.zero()) throw InvariantError("division by zero polynomial");
  const auto& [lb, cb] = *b.t.begin();
  IP q;
  while (!a.zero()) {
    const auto& [la, ca] = *a.t.begin();
    Exps e(la.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      e[i] = la[i] - lb[i];
      if (e[i] < 0) throw InvariantError("inexact polynomial division");
    }
    Rational c = ca / cb;
    IP m;
    m.t.emplace(e, c);
    add_term(q, e, c);
    a = sub(a, mul(m, b));
  }
  return q;
}

// Scale to integer coefficients with gcd 1 and a positive leading coefficient.
IP primitive_int(const IP& a) {
  if (a.zero()) return a;
  Integer l = 1, g = 0;
  for (const auto& [e, c] : a.t) l = lcm(l, Integer(c.get_den()));
  for (const auto& [e, c] : a.t) g = gcd(g, Integer(c.get_num() * (l / c.get_den())));
  Rational s(l, g);
  if (a.t.begin()->second < 0) s = -s;
  IP r;
  for (const auto& [e, c] : a.t) {
    Rational v = c * s;
    v.canonicalize();
    r.t.emplace(e, v);
  }
  return r;
}

bool has_var(const IP& a, std::size_t v) {
  for (const auto& [e, c] : a.t)
    if (e[v] != 0) return true;
  return false;
}

IP gcd_ip(const IP& a, const IP& b, std::size_t n);

IP content(const IP& a, std::size_t v, std::size_t n) {
  IP g;
  std::map<std::int64_t, IP> cs;
  for (const auto& [e, c] : a.t) {
    Exps f = e;
    f[v] = 0;
    add_term(cs[e[v]], f, c);
  }
  for (auto& [d, c] : cs) {
    g = g.zero() ? primitive_int(c) : gcd_ip(g, c, n);
    if (g.t.size() == 1 && std::all_of(g.t.begin()->first.begin(), g.t.begin()->first.end(),
                                       [](std::int64_t x) { return x == 0; }))
      return constant(n, 1);
  }
  return g;
}

IP prem(IP a, const IP& b, std::size_t v) {
  std::int64_t db = degree(b, v);
  IP lb = coeff(b, v, db);
  while (!a.zero()) {
    std::int64_t da = degree(a, v);
    if (da < db) break;
    IP la = coeff(a, v, da);
    a = sub(mul(lb, a), mul(shift(la, v, da - db), b));
  }
  return a;
}

IP gcd_ip(const IP& a, const IP& b, std::size_t n) {
  if (a.zero()) return primitive_int(b);
  if (b.zero()) return primitive_int(a);
  std::size_t v = n;
  for (std::size_t i = 0; i < n && v == n; ++i)
    if (has_var(a, i) || has_var(b, i)) v = i;
  if (v == n) return constant(n, 1);
  if (!has_var(a, v)) return gcd_ip(a, content(b, v, n), n);
  if (!has_var(b, v)) return gcd_ip(content(a, v, n), b, n);
  IP ca = content(a, v, n), cb = content(b, v, n);
  IP pa = primitive_int(exact_div(a, ca)), pb = primitive_int(exact_div(b, cb));
  IP c = gcd_ip(ca, cb, n);
  if (degree(pa, v) < degree(pb, v)) std::swap(pa, pb);
  IP g;
  for (;;) {
    IP r = prem(pa, pb, v);
    if (r.zero()) {
      g = pb;
      break;
    }
    if (!has_var(r, v)) {
      g = constant(n, 1);
      break;
    }
    pa = pb;
    pb = primitive_int(exact_div(r, content(r, v, n)));
  }
  g = primitive_int(exact_div(g, content(g, v, n)));
  return primitive_int(mul(c, g));
}

void collect_vars(const Poly& p, std::vector<GenPtr>& gens) {
  for (const auto& t : p.terms)
    for (const auto& f : t.mono) {
      auto it = std::lower_bound(gens.begin(), gens.end(), f.gen,
                                 [](const GenPtr& a, const GenPtr& b) { return compare_gen(*a, *b) < 0; });
      if (it == gens.end() || compare_gen(**it, *f.gen) != 0) gens.insert(it, f.gen);
    }
}

Vars make_vars(const Poly& a, const Poly& b) {
  Vars vs;
  collect_vars(a, vs.gens);
  collect_vars(b, vs.gens);
  vs.scale.assign(vs.n(), 1);
  auto scan = [&](const Poly& p) {
    for (const auto& t : p.terms)
      for (const auto& f : t.mono) {
        std::size_t i = 0;
        while (compare_gen(*vs.gens[i], *f.gen) != 0) ++i;
        if (f.exp.sign() < 0) throw InvariantError("negative exponent in gcd input");
        vs.scale[i] = lcm64(vs.scale[i], f.exp.den());
      }
  };
  scan(a);
  scan(b);
  return vs;
}

IP to_ip(const Poly& p, const Vars& vs) {
  IP r;
  for (const auto& t : p.terms) {
    Exps e(vs.n(), 0);
    std::size_t i = 0;
    for (const auto& f : t.mono) {
      while (compare_gen(*vs.gens[i], *f.gen) != 0) ++i;
      e[i] = (f.exp * Ratio(vs.scale[i])).num();
    }
    add_term(r, e, t.coeff);
  }
  return r;
}

Poly from_ip(const IP& p, const Vars& vs) {
  std::vector<Term> terms;
  for (const auto& [e, c] : p.t) {
    Monomial m;
    for (std::size_t i = 0; i < vs.n(); ++i)
      if (e[i] != 0) m.push_back({vs.gens[i], Ratio(e[i], vs.scale[i])});
    terms.push_back({std::move(m), c});
  }
  return poly_from_terms(std::move(terms));
}

}  // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
  Vars vs = make_vars(a, b);
  IP g = gcd_ip(to_ip(a, vs), to_ip(b, vs), vs.n());
  Poly r = from_ip(g, vs);
  if (r.empty()) return r;
  return poly_scale(r, 1 / r.terms.front().coeff);
}

Poly poly_divide_exact(const Poly& a, const Poly& b) {
  Vars vs = make_vars(a, b);
  return from_ip(exact_div(to_ip(a, vs), to_ip(b, vs)), vs);
}

}  // namespace linevo::detail
