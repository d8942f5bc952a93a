#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "linevo/detail/poly.hpp"
#include "linevo/errors.hpp"
#include "linevo/symkernel.hpp"

namespace linevo {

using namespace detail;

namespace {

Expr gen_expr(const GenPtr& g, const Ratio& e = Ratio(1)) {
  if (g->kind == GenKind::Radical) return pow(Expr(Rational(g->base)), e);
  if (g->kind == GenKind::Exp) return exp(Expr(e.to_rational()) * g->arg);
  return from_poly(poly_mono(Monomial{{g, e}}, 1));
}

bool depends(const Generator& g, std::string_view var) {
  return std::binary_search(g.symbols.begin(), g.symbols.end(), var,
                            [](const auto& a, const auto& b) { return std::string_view(a) < std::string_view(b); });
}

Expr log_derivative(const GenPtr& g, std::string_view var) {
  switch (g->kind) {
    case GenKind::Symbol:
      return Expr(1) / Expr::symbol(g->name);
    case GenKind::Exp:
      return differentiate(g->arg, var);
    case GenKind::Ln:
      return differentiate(g->arg, var) / (g->arg * gen_expr(g));
    case GenKind::Sin:
      return differentiate(g->arg, var) * cos(g->arg) / gen_expr(g);
    case GenKind::Cos:
      return -differentiate(g->arg, var) * sin(g->arg) / gen_expr(g);
    case GenKind::Abs:
      return differentiate(g->arg, var) * sgn(g->arg) / gen_expr(g);
    case GenKind::Pow:
      return differentiate(g->arg, var) / g->arg;
    default:
      return Expr();
  }
}

Expr derive_poly(const Poly& p, std::string_view var) {
  std::vector<GenPtr> gens;
  for (const auto& t : p.terms)
    for (const auto& f : t.mono)
      if (depends(*f.gen, var) &&
          std::none_of(gens.begin(), gens.end(), [&](const GenPtr& g) { return compare_gen(*g, *f.gen) == 0; }))
        gens.push_back(f.gen);
  Expr acc;
  for (const auto& g : gens) {
    Expr lg = log_derivative(g, var);
    if (lg.is_zero()) continue;
    Poly pg;
    for (const auto& t : p.terms)
      for (const auto& f : t.mono)
        if (compare_gen(*f.gen, *g) == 0) pg.terms.push_back({t.mono, t.coeff * f.exp.to_rational()});
    acc = acc + from_poly(std::move(pg)) * lg;
  }
  return acc;
}

GenView::Kind view_kind(GenKind k) { return static_cast<GenView::Kind>(static_cast<int>(k)); }

struct Rebuilder {
  const std::function<std::optional<Expr>(const GenView&)>& f;
  std::function<bool(const Generator&)> touch;
  std::unordered_map<const Generator*, Expr> args;

  Expr rebuilt_arg(const GenPtr& g) {
    auto it = args.find(g.get());
    if (it != args.end()) return it->second;
    Expr a = g->kind == GenKind::Radical ? Expr(Rational(g->base)) : run(g->arg);
    args.emplace(g.get(), a);
    return a;
  }

  Expr power(const GenPtr& g, const Ratio& e) {
    GenView v;
    v.kind = view_kind(g->kind);
    v.name = g->name;
    v.exponent = e;
    if (g->kind != GenKind::Symbol) v.arg = rebuilt_arg(g);
    if (auto r = f(v)) return *r;
    switch (g->kind) {
      case GenKind::Symbol:
        return pow(Expr::symbol(g->name), e);
      case GenKind::Radical:
        return pow(v.arg, e);
      case GenKind::Exp:
        return exp(Expr(e.to_rational()) * v.arg);
      case GenKind::Ln:
        return pow(ln(v.arg), e);
      case GenKind::Sin:
        return pow(sin(v.arg), e);
      case GenKind::Cos:
        return pow(cos(v.arg), e);
      case GenKind::Abs:
        return pow(abs(v.arg), e);
      case GenKind::Sgn:
        return pow(sgn(v.arg), e);
      case GenKind::Pow:
        return pow(v.arg, e);
    }
    throw InvariantError("unknown generator kind");
  }

  Expr poly(const Poly& p) {
    Expr acc;
    for (const auto& t : p.terms) {
      Monomial keep;
      Expr prod(t.coeff);
      for (const auto& fac : t.mono) {
        if (touch && !touch(*fac.gen))
          keep.push_back(fac);
        else
          prod = prod * power(fac.gen, fac.exp);
      }
      if (!keep.empty()) prod = prod * from_poly(poly_mono(keep, 1));
      acc = acc + prod;
    }
    return acc;
  }

  Expr run(const Expr& e) {
    Expr n = poly(e.rep().num);
    if (is_one(e.rep().den)) return n;
    return n / poly(e.rep().den);
  }
};

// Rational to R with a correction term, so long double keeps its extra digits.
template <class R>
R to_real(const Rational& q) {
  double hi = q.get_d();
  Rational rest = q - Rational(hi);
  return static_cast<R>(hi) + static_cast<R>(rest.get_d());
}

template <class R>
struct EvaluatorT {
  const std::map<std::string, R>& p;
  std::unordered_map<const Generator*, R> cache;

  R base(const GenPtr& g) {
    auto it = cache.find(g.get());
    if (it != cache.end()) return it->second;
    R v = 0;
    switch (g->kind) {
      case GenKind::Symbol: {
        auto s = p.find(g->name);
        if (s == p.end()) throw InputError("unbound symbol '" + g->name + "'");
        v = s->second;
        break;
      }
      case GenKind::Radical:
        v = to_real<R>(g->base);
        break;
      case GenKind::Exp:
        v = eval(g->arg);
        break;  // exponent applied in power()
      case GenKind::Ln: {
        R a = eval(g->arg);
        if (!(a > 0)) throw DomainError("logarithm of a nonpositive value");
        v = std::log(a);
        break;
      }
      case GenKind::Sin:
        v = std::sin(eval(g->arg));
        break;
      case GenKind::Cos:
        v = std::cos(eval(g->arg));
        break;
      case GenKind::Abs:
        v = std::fabs(eval(g->arg));
        break;
      case GenKind::Sgn: {
        R a = eval(g->arg);
        v = (a > 0) - (a < 0);
        break;
      }
      case GenKind::Pow:
        v = eval(g->arg);
        break;
    }
    cache.emplace(g.get(), v);
    return v;
  }

  R power(const GenPtr& g, const Ratio& e) {
    R b = base(g);
    if (g->kind == GenKind::Exp) return std::exp((static_cast<R>(e.num()) / static_cast<R>(e.den())) * b);
    if (e.is_integer()) return std::pow(b, static_cast<R>(e.num()));
    if (b < 0) {
      if (e.den() % 2 == 0) throw DomainError("fractional power of a negative value");
      R r = std::pow(-b, (static_cast<R>(e.num()) / static_cast<R>(e.den())));
      return e.num() % 2 == 0 ? r : -r;
    }
    if (b == 0 && e.sign() < 0) throw DomainError("division by zero");
    return std::pow(b, (static_cast<R>(e.num()) / static_cast<R>(e.den())));
  }

  R poly(const Poly& q, R* magnitude = nullptr) {
    R s = 0, m = 0;
    for (const auto& t : q.terms) {
      R v = to_real<R>(t.coeff);
      for (const auto& f : t.mono) v *= power(f.gen, f.exp);
      s += v;
      m += std::fabs(v);
    }
    if (magnitude) *magnitude = m;
    return s;
  }

  R eval(const Expr& e) {
    R n = poly(e.rep().num);
    if (is_one(e.rep().den)) return n;
    R dm = 0;
    R d = poly(e.rep().den, &dm);
    if (std::fabs(d) <= 1e-14 * std::max(R(1), dm)) throw DomainError("division by zero");
    return n / d;
  }
};
using Evaluator = EvaluatorT<double>;


// Rational roots of a univariate polynomial with rational coefficients c[0..d].
std::vector<Rational> rational_roots(std::vector<Rational> c) {
  std::vector<Rational> roots;
  while (!c.empty() && c.back() == 0) c.pop_back();
  // Zero roots.
  while (c.size() > 1 && c.front() == 0) {
    roots.push_back(0);
    c.erase(c.begin());
  }
  if (c.size() <= 1) return roots;
  Integer l = 1;
  for (const auto& q : c) l = lcm(l, Integer(q.get_den()));
  std::vector<Integer> z;
  for (const auto& q : c) z.push_back(Integer(q.get_num() * (l / q.get_den())));
  auto divisors = [](Integer n) {
    std::vector<Integer> ds;
    n = abs(n);
    if (n == 0) return ds;
    for (Integer i = 1; i * i <= n && i <= 100000; ++i)
      if (n % i == 0) {
        ds.push_back(i);
        if (i * i != n) ds.push_back(n / i);
      }
    return ds;
  };
  auto evalp = [&](const Rational& x) {
    Rational s = 0;
    for (std::size_t i = z.size(); i-- > 0;) s = s * x + Rational(z[i]);
    return s;
  };
  std::vector<Integer> ps = divisors(z.front()), qs = divisors(z.back());
  std::vector<Rational> cand;
  for (const auto& p : ps)
    for (const auto& q : qs) {
      Rational r(p, q);
      r.canonicalize();
      cand.push_back(r);
      cand.push_back(-r);
    }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (const auto& r : cand) {
    // Deflate repeatedly for multiplicity.
    while (z.size() > 1 && evalp(r) == 0) {
      roots.push_back(r);
      // Synthetic division over Q, then re-integerize.
      std::vector<Rational> qz(z.size() - 1);
      Rational carry = 0;
      for (std::size_t i = z.size(); i-- > 1;) {
        carry = carry * r + Rational(z[i]);
        qz[i - 1] = carry;
      }
      Integer ll = 1;
      for (const auto& q : qz) ll = lcm(ll, Integer(q.get_den()));
      z.clear();
      for (const auto& q : qz) z.push_back(Integer(q.get_num() * (ll / q.get_den())));
    }
  }
  if (z.size() > 1) return {};  // does not split over Q
  return roots;
}

std::optional<Expr> integrate_term(const Expr& term, std::string_view var) {
  // term = c * M with M a monomial (possibly negative symbol exponents via a monomial denominator).
  if (!term.depends_on(var)) return term * Expr::symbol(var);
  const Expr v = Expr::symbol(var);
  const RatFun& r = term.rep();
  if (r.num.size() != 1 || r.den.size() != 1) return std::nullopt;
  // Split num/den monomials into var power, exp factors and var-free rest.
  Ratio k(0);
  Expr exparg, rest(r.num.terms[0].coeff / r.den.terms[0].coeff);
  bool other = false;
  auto scan = [&](const Monomial& m, int sgn) {
    for (const auto& f : m) {
      if (!depends(*f.gen, var)) {
        rest = sgn > 0 ? rest * gen_expr(f.gen, f.exp) : rest / gen_expr(f.gen, f.exp);
      } else if (f.gen->kind == GenKind::Symbol) {
        k = sgn > 0 ? k + f.exp : k - f.exp;
      } else if (f.gen->kind == GenKind::Exp && sgn > 0) {
        exparg = exparg + Expr(f.exp.to_rational()) * f.gen->arg;
      } else {
        other = true;
      }
    }
  };
  scan(r.num.terms[0].mono, 1);
  scan(r.den.terms[0].mono, -1);
  if (other) return std::nullopt;
  if (exparg.is_zero()) {
    if (k == Ratio(-1)) return rest * ln(v);
    Ratio k1 = k + Ratio(1);
    return rest * pow(v, k1) / Expr(k1.to_rational());
  }
  // p(v) exp(a v + b) with a constant.
  Expr a = differentiate(exparg, var);
  if (a.depends_on(var) || a.is_zero()) return std::nullopt;
  if (!k.is_integer() || k.sign() < 0) return std::nullopt;
  Expr e = exp(exparg);
  std::int64_t n = k.num();
  Expr sum;
  Expr fall = 1;  // n!/(n-j)!
  Expr apow = a;
  for (std::int64_t j = 0; j <= n; ++j) {
    Expr termj = fall * pow(v, Ratio(n - j)) / apow;
    sum = (j % 2 == 0) ? sum + termj : sum - termj;
    fall = fall * Expr(static_cast<long>(n - j));
    apow = apow * a;
  }
  return rest * e * sum;
}

}  // namespace

Expr differentiate(const Expr& e, std::string_view var, unsigned n) {
  Expr cur = e;
  for (unsigned i = 0; i < n; ++i) {
    if (!cur.depends_on(var)) return Expr();
    const RatFun& r = cur.rep();
    Expr dn = derive_poly(r.num, var);
    if (is_one(r.den)) {
      cur = dn;
      continue;
    }
    Expr num = cur.numerator(), den = cur.denominator();
    Expr dd = derive_poly(r.den, var);
    cur = dn / den - num * dd / (den * den);
  }
  return cur;
}

Expr transform_generators(const Expr& e, const std::function<std::optional<Expr>(const GenView&)>& f) {
  Rebuilder rb{f, {}, {}};
  return rb.run(e);
}

Expr substitute(const Expr& e, const Bindings& b) {
  bool hit = false;
  for (const auto& s : e.free_symbols())
    if (b.count(s)) hit = true;
  if (!hit) return e;
  auto f = [&](const GenView& v) -> std::optional<Expr> {
    if (v.kind != GenView::Symbol) return std::nullopt;
    auto it = b.find(v.name);
    if (it == b.end()) return std::nullopt;
    return pow(it->second, v.exponent);
  };
  Rebuilder rb{f, [&](const Generator& g) {
                 for (const auto& s : g.symbols)
                   if (b.count(s)) return true;
                 return false;
               },
               {}};
  return rb.run(e);
}

Expr substitute_recursive(const Expr& e, const Bindings& b) {
  // Reject cycles first: DFS over bound symbols.
  std::map<std::string, int> state;
  std::function<void(const std::string&)> visit = [&](const std::string& s) {
    int& st = state[s];
    if (st == 1) throw InputError("cyclic bindings through '" + s + "'");
    if (st == 2) return;
    st = 1;
    for (const auto& d : b.at(s).free_symbols())
      if (b.count(d)) visit(d);
    state[s] = 2;
  };
  for (const auto& [s, v] : b) visit(s);
  Expr cur = e;
  for (std::size_t i = 0; i <= b.size(); ++i) {
    Expr next = substitute(cur, b);
    if (next == cur) break;
    cur = next;
  }
  return cur;
}

std::vector<Expr> expand_terms(const Expr& e) {
  std::vector<Expr> out;
  Expr den = e.denominator();
  for (const auto& t : e.rep().num.terms) out.push_back(make_ratfun(poly_mono(t.mono, t.coeff), e.rep().den));
  (void)den;
  return out;
}

std::vector<Expr> poly_coefficients(const Expr& e, std::string_view var) {
  if (!e.depends_on(var)) return {e};
  if (e.denominator().depends_on(var)) throw UnsupportedError("not polynomial in " + std::string(var));
  std::vector<Expr> c;
  Expr den = e.denominator();
  for (const auto& t : e.rep().num.terms) {
    std::int64_t k = 0;
    Monomial rest;
    for (const auto& f : t.mono) {
      if (f.gen->kind == GenKind::Symbol && f.gen->name == var) {
        if (!f.exp.is_integer() || f.exp.sign() < 0) throw UnsupportedError("not polynomial in " + std::string(var));
        k = f.exp.num();
      } else if (depends(*f.gen, var)) {
        throw UnsupportedError("not polynomial in " + std::string(var));
      } else {
        rest.push_back(f);
      }
    }
    if (c.size() <= static_cast<std::size_t>(k)) c.resize(k + 1);
    c[k] = c[k] + from_poly(poly_mono(rest, t.coeff));
  }
  if (!is_one(e.rep().den))
    for (auto& x : c) x = x / den;
  return c;
}

std::optional<int> poly_degree(const Expr& e, std::string_view var) {
  try {
    auto c = poly_coefficients(e, var);
    int d = static_cast<int>(c.size()) - 1;
    while (d > 0 && c[d].is_zero()) --d;
    return d;
  } catch (const UnsupportedError&) {
    return std::nullopt;
  }
}

std::optional<Expr> integrate(const Expr& e, std::string_view var) {
  if (e.is_zero()) return Expr();
  const Expr v = Expr::symbol(var);
  if (!e.depends_on(var)) return e * v;
  Expr den = e.denominator();
  bool monomial_den = e.rep().den.size() == 1;
  if (!den.depends_on(var) || monomial_den) {
    Expr acc;
    for (const auto& t : expand_terms(e)) {
      auto r = integrate_term(t, var);
      if (!r) return std::nullopt;
      acc = acc + *r;
    }
    return acc;
  }
  // Rational function in var: denominator must be a polynomial in var with
  // var-free coefficients that splits over Q.
  std::vector<Expr> dc;
  try {
    dc = poly_coefficients(den, var);
  } catch (const UnsupportedError&) {
    return std::nullopt;
  }
  std::vector<Rational> dq;
  for (const auto& c : dc) {
    auto q = c.as_rational();
    if (!q) return std::nullopt;
    dq.push_back(*q);
  }
  std::vector<Rational> roots = rational_roots(dq);
  if (roots.empty() || roots.size() + 1 != dq.size()) return std::nullopt;
  Expr num = e.numerator();
  if (poly_degree(num, var) == std::nullopt) return std::nullopt;
  // Polynomial part by exact division.
  std::map<Rational, int> mult;
  for (const auto& r : roots) ++mult[r];
  Expr acc;
  Expr proper = e;
  for (const auto& [rho, m] : mult) {
    Expr lin = v - Expr(rho);
    Expr g = e * pow(lin, static_cast<long>(m));  // analytic at rho
    Expr deriv = g;
    Expr fact = 1;
    for (int j = 0; j < m; ++j) {
      Expr cj = substitute(deriv, {{std::string(var), Expr(rho)}}) / fact;  // coefficient of lin^(j-m)
      int k = m - j;
      if (!cj.is_zero()) {
        if (k == 1)
          acc = acc + cj * ln(lin);
        else
          acc = acc - cj / (Expr(k - 1) * pow(lin, static_cast<long>(k - 1)));
        proper = proper - cj / pow(lin, static_cast<long>(k));
      }
      deriv = differentiate(deriv, var);
      fact = fact * Expr(j + 1);
    }
  }
  // What remains is a polynomial in var.
  if (!proper.is_zero()) {
    if (proper.denominator().depends_on(var)) return std::nullopt;
    auto r = integrate(proper, var);
    if (!r) return std::nullopt;
    acc = acc + *r;
  }
  return acc;
}

double eval_numeric(const Expr& e, const Point& p) {
  Evaluator ev{p, {}};
  return ev.eval(e);
}

long double eval_numeric_ld(const Expr& e, const std::map<std::string, long double>& p) {
  EvaluatorT<long double> ev{p, {}};
  return ev.eval(e);
}

ZeroVerdict is_zero(const Expr& e, const ZeroOptions& opt) {
  if (e.is_zero()) return ZeroVerdict::Zero;
  if (!e.has_atoms()) return ZeroVerdict::NonZero;
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> pick(0, 1400);
  auto syms = e.free_symbols();
  std::bernoulli_distribution flip(0.5);
  for (int i = 0; i < opt.probes; ++i) {
    Point pt;
    for (const auto& s : syms) pt[s] = 0.3 + pick(rng) / 1000.0;
    // Outside the domain (roots of negative quantities, logs), retry with
    // random sign patterns before giving up on this probe.
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        Evaluator ev{pt, {}};
        double m = 0;
        double v = ev.poly(e.rep().num, &m);
        if (std::isfinite(v) && std::fabs(v) > opt.tolerance * std::max(1.0, m)) return ZeroVerdict::NonZero;
        break;
      } catch (const DomainError&) {
        for (auto& [name, val] : pt) val = flip(rng) ? -std::fabs(val) : std::fabs(val);
      }
    }
  }
  return ZeroVerdict::Unknown;
}

Expr expand_exp_log(const Expr& e) {
  if (!e.has_atoms()) return e;
  return transform_generators(e, [](const GenView& v) -> std::optional<Expr> {
    if (v.kind != GenView::Exp) return std::nullopt;
    // arg = c * ln(a) (possibly with a rational coefficient after rebuilding)
    const RatFun& r = v.arg.rep();
    if (!is_one(r.den) || r.num.size() != 1) return std::nullopt;
    const Term& t = r.num.terms[0];
    if (t.mono.size() != 1 || t.mono[0].gen->kind != GenKind::Ln || t.mono[0].exp != Ratio(1)) return std::nullopt;
    Ratio q = Ratio::from_rational(t.coeff) * v.exponent;
    return pow(t.mono[0].gen->arg, q);
  });
}

Expr apply_sign_assumption(const Expr& e, std::string_view symbol, Sign sign) {
  if (!e.has_atoms() || !e.depends_on(symbol)) return e;
  int s = sign == Sign::Positive ? 1 : -1;
  // Sign of a monomial c*symbol^k, or 0 when undetermined.
  auto sign_of = [&](const Expr& a) -> int {
    const RatFun& r = a.rep();
    if (!is_one(r.den) || r.num.size() != 1) return 0;
    const Term& t = r.num.terms[0];
    int sg = t.coeff > 0 ? 1 : -1;
    for (const auto& f : t.mono) {
      if (f.gen->kind == GenKind::Radical || f.gen->kind == GenKind::Exp) continue;
      if (f.gen->kind != GenKind::Symbol || f.gen->name != symbol || !f.exp.is_integer()) return 0;
      if (f.exp.num() % 2 != 0) sg *= s;
    }
    return sg;
  };
  return transform_generators(e, [&](const GenView& v) -> std::optional<Expr> {
    if (v.kind != GenView::Abs && v.kind != GenView::Sgn) return std::nullopt;
    int sg = sign_of(v.arg);
    if (sg == 0) return std::nullopt;
    if (v.kind == GenView::Sgn) return pow(Expr(sg), v.exponent);
    return pow(Expr(sg) * v.arg, v.exponent);
  });
}

}  // namespace linevo
