#include "linevo/solutions.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>

#include "linevo/errors.hpp"
#include "linevo/linalg.hpp"
#include "linevo/symkernel.hpp"
#include "linevo/symmetry.hpp"

namespace linevo {

namespace {

using cld = std::complex<long double>;
const Expr kT = Expr::symbol("t");
const Expr kX = Expr::symbol("x");

long double to_ld(const Rational& q) {
  double hi = q.get_d();
  return static_cast<long double>(hi) + static_cast<long double>(Rational(q - Rational(hi)).get_d());
}

Rational from_ld(long double v) {
  double hi = static_cast<double>(v);
  double lo = static_cast<double>(v - hi);
  return Rational(hi) + Rational(lo);
}

Rational factorial(int n) {
  Rational f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Rational binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

// Gaussian rationals, for characteristic polynomials.
struct GQ {
  Rational re = 0, im = 0;
};
GQ operator+(const GQ& a, const GQ& b) { return {a.re + b.re, a.im + b.im}; }
GQ operator-(const GQ& a, const GQ& b) { return {a.re - b.re, a.im - b.im}; }
GQ operator*(const GQ& a, const GQ& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
bool gzero(const GQ& a) { return a.re == 0 && a.im == 0; }
cld gnum(const GQ& a) { return {to_ld(a.re), to_ld(a.im)}; }

// Complex expressions re + i im.
struct CExpr {
  Expr re, im;
};
CExpr operator+(const CExpr& a, const CExpr& b) { return {a.re + b.re, a.im + b.im}; }
CExpr operator-(const CExpr& a, const CExpr& b) { return {a.re - b.re, a.im - b.im}; }
CExpr operator*(const CExpr& a, const CExpr& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
CExpr operator/(const CExpr& a, const CExpr& b) {
  if (b.im.is_zero()) return {a.re / b.re, a.im / b.re};
  Expr d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
bool czero(const CExpr& a) { return a.re.is_zero() && a.im.is_zero(); }
CExpr cexp(const CExpr& a) {
  Expr e = exp(a.re);
  if (a.im.is_zero()) return {e, Expr()};
  return {e * cos(a.im), e * sin(a.im)};
}
CExpr cpow(const CExpr& a, int n) {
  CExpr r{Expr(1), Expr()};
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}
CExpr real(const Expr& e) { return {e, Expr()}; }

template <class F>
struct Ops;
template <>
struct Ops<CExpr> {
  static CExpr from(const GQ& g) { return {Expr(g.re), Expr(g.im)}; }
  static CExpr scale(const CExpr& a, const Rational& q) { return {a.re * Expr(q), a.im * Expr(q)}; }
};
template <>
struct Ops<cld> {
  static cld from(const GQ& g) { return gnum(g); }
  static cld scale(const cld& a, const Rational& q) { return a * to_ld(q); }
};

// Best convergent with a denominator that still fits the exponent type.
Rational rationalize(long double v) {
  const Integer maxden = Integer(1) << 31;
  long double x = v;
  Integer h0 = 1, h1 = 0, k0 = 0, k1 = 1;
  Rational best = from_ld(std::round(v));
  for (int it = 0; it < 64; ++it) {
    long double a = std::floor(x);
    if (std::fabs(a) > 1e15L) break;
    Integer ai(static_cast<double>(a));
    Integer h = ai * h0 + h1, k = ai * k0 + k1;
    if (k > maxden) break;
    best = Rational(h, k);
    best.canonicalize();
    h1 = h0;
    h0 = h;
    k1 = k0;
    k0 = k;
    long double frac = x - a;
    if (frac < 1e-19L) break;
    x = 1 / frac;
  }
  return best;
}

CExpr to_cexpr(const cld& z) { return {Expr(rationalize(z.real())), Expr(rationalize(z.imag()))}; }
CExpr to_cexpr(const CExpr& z) { return z; }

// ---------------------------------------------------------------- roots

struct CharRoot {
  bool exact = false;
  CExpr value;
  cld approx;
  int mult = 1;
};

cld eval_num(const std::vector<GQ>& p, cld z) {
  cld s = 0;
  for (std::size_t i = p.size(); i-- > 0;) s = s * z + gnum(p[i]);
  return s;
}

GQ eval_exact(const std::vector<GQ>& p, const GQ& z) {
  GQ s;
  for (std::size_t i = p.size(); i-- > 0;) s = s * z + p[i];
  return s;
}

std::vector<GQ> deflate(const std::vector<GQ>& p, const GQ& z) {
  std::vector<GQ> q(p.size() - 1);
  GQ carry;
  for (std::size_t i = p.size(); i-- > 1;) {
    carry = carry * z + p[i];
    q[i - 1] = carry;
  }
  return q;
}

std::vector<cld> numeric_roots(const std::vector<GQ>& p) {
  const int n = static_cast<int>(p.size()) - 1;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    cld c = -gnum(p[n - 1 - j]);
    C(0, j) = std::complex<double>(static_cast<double>(c.real()), static_cast<double>(c.imag()));
  }
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cld> out;
  std::vector<GQ> dp;
  for (int i = 1; i <= n; ++i) dp.push_back(GQ{p[i].re * i, p[i].im * i});
  for (int i = 0; i < n; ++i) {
    cld z(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
    // Newton polish in extended precision; harmless near multiple roots
    for (int it = 0; it < 6; ++it) {
      cld d = eval_num(dp, z);
      if (std::abs(d) < 1e-30L) break;
      cld step = eval_num(p, z) / d;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
    }
    out.push_back(z);
  }
  return out;
}

// Convergents of v within tol and with denominator at most maxden.
std::vector<Rational> snaps(long double v, long double tol, long maxden = 100000) {
  std::vector<Rational> out;
  long double x = v;
  Integer h0 = 1, h1 = 0, k0 = 0, k1 = 1;  // h/k convergents
  for (int it = 0; it < 40; ++it) {
    long double a = std::floor(x);
    if (std::fabs(a) > 1e15L) break;
    Integer ai(static_cast<double>(a));
    Integer h = ai * h0 + h1, k = ai * k0 + k1;
    if (k > maxden) break;
    Rational q(h, k);
    q.canonicalize();
    if (std::fabs(to_ld(q) - v) <= tol) out.push_back(q);
    h1 = h0;
    h0 = h;
    k1 = k0;
    k0 = k;
    long double frac = x - a;
    if (frac < 1e-18L) break;
    x = 1 / frac;
  }
  return out;
}

bool perfect_square(const Rational& q, Rational* root) {
  if (q < 0) return false;
  Integer n = q.get_num(), d = q.get_den();
  Integer rn = sqrt(n), rd = sqrt(d);
  if (rn * rn != n || rd * rd != d) return false;
  *root = Rational(rn, rd);
  return true;
}

Expr sqrt_rational(const Rational& q) { return pow(Expr(q), Ratio(1, 2)); }

std::optional<CExpr> sqrt_exact(const GQ& D) {
  if (D.im == 0) {
    if (D.re >= 0) return CExpr{sqrt_rational(D.re), Expr()};
    return CExpr{Expr(), sqrt_rational(-D.re)};
  }
  Rational m;
  if (!perfect_square(D.re * D.re + D.im * D.im, &m)) return std::nullopt;
  Expr x = sqrt_rational((m + D.re) / 2), y = sqrt_rational((m - D.re) / 2);
  if (D.im < 0) y = -y;
  return CExpr{x, y};
}

cld approx_of(const CExpr& z) {
  return {static_cast<long double>(eval_numeric(z.re, {})), static_cast<long double>(eval_numeric(z.im, {}))};
}

// Roots of a monic polynomial over Q(i), with multiplicities.
std::vector<CharRoot> char_roots(std::vector<GQ> p) {
  std::vector<CharRoot> roots;
  auto push_exact = [&](const GQ& z, int m) {
    CharRoot c;
    c.exact = true;
    c.value = Ops<CExpr>::from(z);
    c.approx = gnum(z);
    c.mult = m;
    roots.push_back(c);
  };
  while (p.size() > 2) {
    bool found = false;
    for (const cld& z : numeric_roots(p)) {
      long double tol = 1e-3L * (1 + std::abs(z));
      auto re = snaps(z.real(), tol), im = snaps(z.imag(), tol);
      if (std::fabs(z.imag()) <= tol) im.insert(im.begin(), Rational(0));
      for (const auto& a : re) {
        for (const auto& b : im) {
          GQ q{a, b};
          if (!gzero(eval_exact(p, q))) continue;
          int m = 0;
          while (p.size() > 1 && gzero(eval_exact(p, q))) {
            p = deflate(p, q);
            ++m;
          }
          push_exact(q, m);
          found = true;
          break;
        }
        if (found) break;
      }
      if (found) break;
    }
    if (!found) break;
  }
  // exact roots of y^2 + b y + c, when the discriminant has an exact square root
  auto quadratic = [&](const GQ& b, const GQ& c, int m) {
    auto s = sqrt_exact(b * b - GQ{4, 0} * c);
    if (!s) return false;
    CExpr mb = Ops<CExpr>::scale(Ops<CExpr>::from(b), Rational(-1, 2));
    CExpr hs = Ops<CExpr>::scale(*s, Rational(1, 2));
    for (const CExpr& z : {mb + hs, mb - hs}) {
      CharRoot cr;
      cr.exact = true;
      cr.value = z;
      cr.approx = approx_of(z);
      cr.mult = m;
      roots.push_back(cr);
    }
    return true;
  };
  // quadratic factors over Q(i), from pairs of numeric roots
  while (p.size() > 4) {
    auto zs = numeric_roots(p);
    bool found = false;
    for (std::size_t i = 0; i < zs.size() && !found; ++i)
      for (std::size_t j = i + 1; j < zs.size() && !found; ++j) {
        cld sum = zs[i] + zs[j], prod = zs[i] * zs[j];
        auto pick = [](long double v) {
          long double tol = 1e-4L * (1 + std::fabs(v));
          auto c = snaps(v, tol);
          if (std::fabs(v) <= tol) c.insert(c.begin(), Rational(0));
          return c.empty() ? std::optional<Rational>() : std::optional<Rational>(c.front());
        };
        auto sr = pick(sum.real()), si = pick(sum.imag()), pr = pick(prod.real()), pi = pick(prod.imag());
        if (!sr || !si || !pr || !pi) continue;
        GQ b = GQ{} - GQ{*sr, *si}, c{*pr, *pi};
        // divide while the remainder vanishes
        auto divide = [&](const std::vector<GQ>& a, std::vector<GQ>* q) {
          std::vector<GQ> r = a;
          q->assign(a.size() - 2, GQ{});
          for (std::size_t k = a.size() - 1; k >= 2; --k) {
            GQ lead = r[k];
            (*q)[k - 2] = lead;
            r[k - 1] = r[k - 1] - lead * b;
            r[k - 2] = r[k - 2] - lead * c;
            r[k] = GQ{};
          }
          return gzero(r[0]) && gzero(r[1]);
        };
        std::vector<GQ> q;
        int m = 0;
        while (p.size() >= 3 && divide(p, &q)) {
          p = q;
          ++m;
        }
        if (m == 0) continue;
        if (!quadratic(b, c, m)) {
          // keep the factor; its roots are numeric
          std::vector<GQ> f{c, b, GQ{1, 0}};
          for (const cld& z : numeric_roots(f)) {
            CharRoot cr;
            cr.approx = z;
            cr.value = to_cexpr(z);
            cr.mult = m;
            roots.push_back(cr);
          }
        }
        found = true;
      }
    if (!found) break;
  }
  if (p.size() == 2) {
    push_exact(GQ{} - p[0], 1);
    return roots;
  }
  if (p.size() == 3 && quadratic(p[1], p[0], 1)) return roots;
  if (p.size() <= 1) return roots;
  // numeric remainder; cluster near-equal eigenvalues
  std::vector<cld> zs = numeric_roots(p);
  std::vector<bool> used(zs.size(), false);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (used[i]) continue;
    CharRoot cr;
    cld sum = zs[i];
    for (std::size_t j = i + 1; j < zs.size(); ++j)
      if (!used[j] && std::abs(zs[j] - zs[i]) < 1e-6L * (1 + std::abs(zs[i]))) {
        used[j] = true;
        sum += zs[j];
        ++cr.mult;
      }
    cr.approx = sum / static_cast<long double>(cr.mult);
    cr.value = to_cexpr(cr.approx);
    roots.push_back(cr);
  }
  return roots;
}

// Coefficients of P(y + rho).
template <class F>
std::vector<F> taylor_at(const std::vector<GQ>& p, const F& rho) {
  std::vector<F> b;
  for (const auto& c : p) b.push_back(Ops<F>::from(c));
  const std::size_t n = b.size() - 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = n; i-- > k;) b[i] = b[i] + rho * b[i + 1];
  return b;
}

// Q with P(D + rho) Q = R, where P vanishes to order m at rho.
template <class F>
std::vector<F> mode_particular(const std::vector<F>& c, int m, const std::vector<F>& R) {
  const int d = static_cast<int>(R.size()) - 1;
  const F zero = Ops<F>::from(GQ{});
  std::vector<F> T(d + 1, zero);
  for (int j = d; j >= 0; --j) {
    F acc = R[j];
    for (int i = 1; m + i < static_cast<int>(c.size()) && j + i <= d; ++i)
      acc = acc - Ops<F>::scale(c[m + i] * T[j + i], factorial(j + i) / factorial(j));
    T[j] = acc / c[m];
  }
  std::vector<F> Q(d + m + 1, zero);
  for (int j = 0; j <= d; ++j) Q[j + m] = Ops<F>::scale(T[j], factorial(j) / factorial(j + m));
  return Q;
}

CExpr poly_in(const std::vector<CExpr>& q, const Expr& var) {
  CExpr s{Expr(), Expr()};
  for (std::size_t j = 0; j < q.size(); ++j) {
    Expr v = pow(var, static_cast<long>(j));
    s = s + CExpr{q[j].re * v, q[j].im * v};
  }
  return s;
}

bool is_positive_im(const CharRoot& r) { return r.approx.imag() > 1e-12L; }
bool is_real(const CharRoot& r) {
  return r.exact ? r.value.im.is_zero() : std::fabs(r.approx.imag()) <= 1e-12L;
}

// ---------------------------------------------------------------- helpers

std::vector<std::string> params_of(const Expr& e) {
  std::vector<std::string> out;
  for (const auto& s : e.free_symbols())
    if (s != "t" && s != "x") out.push_back(s);
  return out;
}

Bindings unit_params(const Expr& e) {
  Bindings b;
  for (const auto& s : params_of(e)) b[s] = Expr(1);
  return b;
}

std::optional<Rational> constant_of(const Expr& e) { return e.as_rational(); }

bool t_free(const ReducedEquation& eq) {
  for (const auto& a : eq.A)
    if (is_zero(differentiate(a, "t")) != ZeroVerdict::Zero) return false;
  return true;
}

std::optional<std::vector<GQ>> constant_char_poly(const ReducedEquation& eq, const GQ& lambda) {
  std::vector<GQ> p(eq.r + 1);
  for (int l = 0; l <= eq.r - 2; ++l) {
    auto c = constant_of(eq.A[l]);
    if (!c) return std::nullopt;
    p[l].re = *c;
  }
  p[eq.r].re = 1;
  p[0] = p[0] - lambda;
  return p;
}

struct PShape {
  Expr f, phi;
};

PShape p_shape(const ReducedEquation& eq, const Expr& shift) {
  eq.validate();
  if (!eq.A[1].is_zero()) throw InputError("P(1)+I(phi) reductions need A1 = 0");
  Expr f = differentiate(eq.A[0], "x");
  if (f.depends_on("x") || !(eq.A[0] - f * kX).is_zero())
    throw InputError("P(1)+I(phi) reductions need A0 = f(t) x, got " + eq.A[0].str());
  for (int j = 2; j <= eq.r - 2; ++j)
    if (eq.A[j].depends_on("x")) throw InputError("P(1)+I(phi) reductions need A" + std::to_string(j) + " = A(t)");
  auto F = integrate(f, "t");
  if (!F) throw UnsupportedError("no antiderivative for f = " + f.str());
  return {f, *F + shift};
}

// sum_{k=2}^{r} A^k kappa^k with A^r = 1, A^{r-1} = 0
template <class K>
K a_of(const ReducedEquation& eq, const K& kappa, const std::function<K(const Expr&)>& lift) {
  K s = cpow(kappa, eq.r);
  for (int j = 2; j <= eq.r - 2; ++j)
    if (!eq.A[j].is_zero()) s = s + lift(eq.A[j]) * cpow(kappa, j);
  return s;
}

double sample_residual(const Expr& r) {
  Expr e = substitute(r, unit_params(r));
  double worst = 0;
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) {
      try {
        worst = std::max(worst, std::fabs(eval_numeric(e, {{"t", 0.15 * i}, {"x", 0.17 * j}})));
      } catch (const DomainError&) {
      }
    }
  return worst;
}

Solution symbolic(const Expr& e, const std::string& method) {
  Solution s;
  s.expr = e;
  s.method = method;
  s.parameters = params_of(e);
  s.fn = as_function(substitute(e, unit_params(e)));
  return s;
}

// Classical RK4 with n equal steps.
template <class F>
std::vector<F> rk4(const std::function<void(long double, const std::vector<F>&, std::vector<F>&)>& f,
                   std::vector<F> y, long double a, long double b, int n) {
  const long double h = (b - a) / n;
  const std::size_t m = y.size();
  std::vector<F> k1(m), k2(m), k3(m), k4(m), tmp(m);
  for (int i = 0; i < n; ++i) {
    long double s = a + i * h;
    f(s, y, k1);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + k1[j] * (h / 2);
    f(s + h / 2, tmp, k2);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + k2[j] * (h / 2);
    f(s + h / 2, tmp, k3);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + k3[j] * h;
    f(s + h, tmp, k4);
    for (std::size_t j = 0; j < m; ++j) y[j] = y[j] + (k1[j] + k2[j] * 2.0L + k3[j] * 2.0L + k4[j]) * (h / 6);
  }
  return y;
}

using CSystem = std::function<void(long double, const std::vector<cld>&, std::vector<cld>&)>;

// Integrates from base to s with steps of about h; cached per (s, h).
struct Integrator {
  CSystem f;
  std::vector<cld> y0;
  long double base;
  std::map<std::pair<long double, long double>, std::vector<cld>> cache;

  std::vector<cld> at(long double s, long double h) {
    auto key = std::make_pair(s, h);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    int n = std::max(1, static_cast<int>(std::ceil(std::fabs(s - base) / h - 1e-9L)));
    auto y = s == base ? y0 : rk4<cld>(f, y0, base, s, n);
    if (cache.size() > 20000) cache.clear();
    cache.emplace(key, y);
    return y;
  }
};

// Step-halving certificate on samples base + j/8, j = 1..8; fills slope and residual.
void rk4_certificate(Integrator& ig, long double h, Solution& s) {
  long double e1 = 0, e2 = 0;
  for (int j = 1; j <= 8; ++j) {
    long double p = ig.base + j / 8.0L;
    auto a = ig.at(p, h), b = ig.at(p, h / 2), c = ig.at(p, h / 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
      e1 = std::max(e1, std::abs(a[i] - b[i]));
      e2 = std::max(e2, std::abs(b[i] - c[i]));
    }
  }
  s.max_residual = static_cast<double>(e2 / 15);
  s.slope = (e1 > 0 && e2 > 0) ? static_cast<double>(std::log2(e1 / e2)) : std::numeric_limits<double>::quiet_NaN();
  s.exact = false;
}

long double eval_t(const Expr& e, long double t) { return eval_numeric_ld(e, {{"t", t}, {"x", 0}}); }
long double eval_x(const Expr& e, long double x) { return eval_numeric_ld(e, {{"t", 0}, {"x", x}}); }

std::string sup(const std::string& base, int s) { return base + std::to_string(s); }

// ---------------------------------------------------------------- D family

struct Member {
  Solution sol;
  std::vector<Expr> v, w;
};

std::vector<Member> d_family_exact(const ReducedEquation& eq, const GQ& lambda, int N,
                                   const std::vector<GQ>& poly) {
  const bool real_lambda = lambda.im == 0;
  auto roots = char_roots(poly);
  std::vector<Member> out;
  CExpr lam = Ops<CExpr>::from(lambda);
  for (const auto& root : roots) {
    if (real_lambda && !is_real(root) && !is_positive_im(root)) continue;
    const bool two = !(real_lambda && is_real(root));
    for (int k = 0; k < root.mult; ++k)
      for (int s0 = 0; s0 <= N; ++s0) {
        std::vector<std::vector<CExpr>> Q(s0 + 1);
        auto run = [&](auto rho) {
          using F = decltype(rho);
          auto c = taylor_at<F>(poly, rho);
          std::vector<std::vector<F>> q(s0 + 1);
          q[s0].assign(k + 1, Ops<F>::from(GQ{}));
          q[s0][k] = Ops<F>::from(GQ{1, 0});
          for (int s = s0 - 1; s >= 0; --s) {
            std::vector<F> R;
            for (const auto& e : q[s + 1]) R.push_back(Ops<F>::scale(e, Rational(s + 1)));
            q[s] = mode_particular<F>(c, root.mult, R);
          }
          for (int s = 0; s <= s0; ++s)
            for (const auto& e : q[s]) Q[s].push_back(to_cexpr(e));
        };
        if (root.exact)
          run(root.value);
        else
          run(root.approx);
        CExpr rho = root.value;
        CExpr ex = cexp(CExpr{rho.re * kX, rho.im * kX});
        CExpr et = cexp(CExpr{lam.re * kT, lam.im * kT});
        std::vector<CExpr> z(N + 1, CExpr{Expr(), Expr()});
        CExpr u{Expr(), Expr()};
        for (int s = 0; s <= s0; ++s) {
          z[s] = ex * poly_in(Q[s], kX);
          u = u + z[s] * et * real(pow(kT, static_cast<long>(s)));
        }
        for (int part = 0; part < (two ? 2 : 1); ++part) {
          Member m;
          Expr e = part == 0 ? u.re : u.im;
          m.sol = symbolic(e, "generalized-reduction D");
          if (!root.exact) m.sol.kind = Solution::Kind::Numeric;
          for (int s = 0; s <= N; ++s) {
            if (real_lambda) {
              m.v.push_back(part == 0 ? z[s].re : z[s].im);
            } else {
              m.v.push_back(part == 0 ? z[s].re : z[s].im);
              m.w.push_back(part == 0 ? -z[s].im : z[s].re);
            }
          }
          certify(m.sol, eq);
          out.push_back(std::move(m));
        }
      }
  }
  return out;
}

std::vector<Member> d_family_rk4(const ReducedEquation& eq, const GQ& lambda, int N, double x0, double h) {
  const int r = eq.r;
  const cld lam = gnum(lambda);
  auto A = eq.A;
  auto ig = std::make_shared<Integrator>();
  ig->base = x0;
  ig->y0.assign(static_cast<std::size_t>(r) * (N + 1), cld(0));
  ig->y0[static_cast<std::size_t>(N) * r] = 1;
  ig->f = [A, r, N, lam](long double x, const std::vector<cld>& y, std::vector<cld>& dy) {
    std::vector<long double> a(r - 1);
    for (int l = 0; l <= r - 2; ++l) a[l] = A[l].is_zero() ? 0 : eval_x(A[l], x);
    for (int s = 0; s <= N; ++s) {
      const std::size_t o = static_cast<std::size_t>(s) * r;
      for (int d = 0; d + 1 < r; ++d) dy[o + d] = y[o + d + 1];
      cld top = lam * y[o];
      for (int l = 0; l <= r - 2; ++l) top -= a[l] * y[o + l];
      if (s < N) top += static_cast<long double>(s + 1) * y[o + r];
      dy[o + r - 1] = top;
    }
  };
  const long double hf = h / 4;
  std::vector<Member> out;
  const bool two = lambda.im != 0;
  for (int part = 0; part < (two ? 2 : 1); ++part) {
    Member m;
    m.sol.kind = Solution::Kind::Numeric;
    m.sol.method = "generalized-reduction D (RK4)";
    m.sol.fn = [ig, N, r, lam, part, hf](long double t, long double x) {
      auto y = ig->at(x, hf);
      cld u = 0;
      for (int s = 0; s <= N; ++s) u += y[static_cast<std::size_t>(s) * r] * std::pow(cld(t), s) * std::exp(lam * t);
      return part == 0 ? u.real() : u.imag();
    };
    rk4_certificate(*ig, h, m.sol);
    out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------- P family

struct PSystem {
  CExpr kappa;                                   // phi + mu + i nu
  CExpr a;                                       // diagonal coefficient
  std::vector<std::vector<CExpr>> M;             // M[s][p], p > s
};

PSystem p_system(const ReducedEquation& eq, const CExpr& kappa, int N) {
  PSystem P;
  P.kappa = kappa;
  std::function<CExpr(const Expr&)> lift = [](const Expr& e) { return real(e); };
  P.a = a_of<CExpr>(eq, kappa, lift);
  P.M.assign(N + 1, std::vector<CExpr>(N + 1, CExpr{Expr(), Expr()}));
  for (int s = 0; s <= N; ++s)
    for (int p = s + 1; p <= N; ++p)
      for (int k = 2; k <= eq.r; ++k) {
        if (k == eq.r - 1 || p - s > k) continue;
        Expr Ak = k == eq.r ? Expr(1) : eq.A[k];
        if (Ak.is_zero()) continue;
        Rational c = binomial(k, p - s) * factorial(p) / factorial(s);
        P.M[s][p] = P.M[s][p] + real(Ak) * Ops<CExpr>::scale(cpow(kappa, k + s - p), c);
      }
  return P;
}

std::optional<CExpr> cintegrate(const CExpr& e) {
  auto re = e.re.is_zero() ? std::optional<Expr>(Expr()) : integrate(e.re, "t");
  auto im = e.im.is_zero() ? std::optional<Expr>(Expr()) : integrate(e.im, "t");
  if (!re || !im) return std::nullopt;
  return CExpr{*re, *im};
}

std::optional<std::vector<Member>> p_family_exact(const ReducedEquation& eq, const PSystem& P, int N, bool complex) {
  auto W = cintegrate(P.a);
  if (!W) return std::nullopt;
  CExpr E = cexp(*W);
  CExpr ex = cexp(CExpr{P.kappa.re * kX, P.kappa.im * kX});
  std::vector<Member> out;
  for (int s0 = 0; s0 <= N; ++s0) {
    std::vector<CExpr> y(N + 1, CExpr{Expr(), Expr()});
    y[s0] = CExpr{Expr(1), Expr()};
    for (int s = s0 - 1; s >= 0; --s) {
      CExpr integrand{Expr(), Expr()};
      for (int p = s + 1; p <= s0; ++p) integrand = integrand + P.M[s][p] * y[p];
      auto Y = cintegrate(integrand);
      if (!Y) return std::nullopt;
      y[s] = *Y;
    }
    for (int part = 0; part < (complex ? 2 : 1); ++part) {
      CExpr c = part == 0 ? CExpr{Expr(1), Expr()} : CExpr{Expr(), Expr(1)};
      Member m;
      CExpr u{Expr(), Expr()};
      for (int s = 0; s <= N; ++s) {
        CExpr z = c * E * y[s];
        m.v.push_back(z.re);
        if (complex) m.w.push_back(-z.im);
        u = u + z * ex * real(pow(kX, static_cast<long>(s)));
      }
      m.sol = symbolic(u.re, "generalized-reduction P");
      certify(m.sol, eq);
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<Member> p_family_rk4(const PSystem& P, int N, bool complex, double t0, double h) {
  // numeric coefficient functions of t
  auto num = [](const CExpr& e) {
    return [e](long double t) { return cld(eval_t(e.re, t), eval_t(e.im, t)); };
  };
  auto a = num(P.a);
  std::vector<std::vector<std::function<cld(long double)>>> M(N + 1);
  for (int s = 0; s <= N; ++s)
    for (int p = 0; p <= N; ++p) M[s].push_back(num(P.M[s][p]));
  auto kappa = num(P.kappa);
  auto ig = std::make_shared<Integrator>();
  ig->base = t0;
  ig->y0.assign(N + 1, cld(0));
  ig->y0[N] = 1;
  ig->f = [a, M, N](long double t, const std::vector<cld>& y, std::vector<cld>& dy) {
    cld d = a(t);
    for (int s = 0; s <= N; ++s) {
      cld v = d * y[s];
      for (int p = s + 1; p <= N; ++p) v += M[s][p](t) * y[p];
      dy[s] = v;
    }
  };
  const long double hf = h / 4;
  std::vector<Member> out;
  for (int part = 0; part < (complex ? 2 : 1); ++part) {
    Member m;
    m.sol.kind = Solution::Kind::Numeric;
    m.sol.method = "generalized-reduction P (RK4)";
    cld c = part == 0 ? cld(1) : cld(0, 1);
    m.sol.fn = [ig, N, kappa, c, hf](long double t, long double x) {
      auto y = ig->at(t, hf);
      cld u = 0;
      for (int s = 0; s <= N; ++s) u += y[s] * std::pow(cld(x), s);
      return (c * u * std::exp(kappa(t) * x)).real();
    };
    rk4_certificate(*ig, h, m.sol);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- public

bool LinearODE::constant_coefficients() const {
  for (const auto& c : coeffs)
    if (!c.as_rational()) return false;
  return true;
}

std::string LinearODE::str(const std::string& unknown) const {
  auto deriv = [&](int k) {
    if (k == 0) return unknown;
    if (k <= 3) return unknown + std::string(k, '\'');
    return unknown + "^(" + std::to_string(k) + ")";
  };
  std::string s = deriv(order);
  for (int k = order - 1; k >= 0; --k) {
    if (k >= static_cast<int>(coeffs.size()) || coeffs[k].is_zero()) continue;
    s += " + " + (coeffs[k].is_one() ? "" : "(" + coeffs[k].str() + ")*") + deriv(k);
  }
  return s + " = " + rhs.str();
}

std::string CoupledODE::str() const {
  std::string s = lhs.str(unknown);
  s = s.substr(0, s.rfind(" = "));
  s += " = ";
  bool first = true;
  for (const auto& [c, name] : rhs) {
    if (c.is_zero()) continue;
    if (!first) s += " + ";
    s += (c.is_one() ? "" : "(" + c.str() + ")*") + name;
    first = false;
  }
  return first ? s + "0" : s;
}

void certify(Solution& s, const ReducedEquation& eq) {
  Expr r = residual_symbolic(eq, s.expr);
  s.exact = r.is_zero();
  s.max_residual = s.exact ? 0 : sample_residual(r);
  s.slope = std::numeric_limits<double>::quiet_NaN();
}

LinearODE reduce_D1(const ReducedEquation& eq) {
  eq.validate();
  if (!t_free(eq)) throw InputError("D(1) reduction needs coefficients independent of t");
  LinearODE ode;
  ode.order = eq.r;
  ode.var = "x";
  ode.coeffs.assign(eq.r, Expr());
  for (int l = 0; l <= eq.r - 2; ++l) ode.coeffs[l] = eq.A[l];
  return ode;
}

std::vector<Solution> solve_const_ode(const LinearODE& ode) {
  if (!ode.constant_coefficients()) throw InputError("solve_const_ode needs rational constant coefficients");
  if (!ode.rhs.is_zero()) throw InputError("solve_const_ode solves the homogeneous equation only");
  std::vector<GQ> p(ode.order + 1);
  for (int k = 0; k < ode.order; ++k)
    if (k < static_cast<int>(ode.coeffs.size())) p[k].re = *ode.coeffs[k].as_rational();
  p[ode.order].re = 1;
  const Expr w = Expr::symbol(ode.var);
  std::vector<Solution> out;
  for (const auto& root : char_roots(p)) {
    if (!is_real(root) && !is_positive_im(root)) continue;
    CExpr e = cexp(CExpr{root.value.re * w, root.value.im * w});
    for (int k = 0; k < root.mult; ++k) {
      CExpr b = e * real(pow(w, static_cast<long>(k)));
      for (int part = 0; part < (is_real(root) ? 1 : 2); ++part) {
        Solution s = symbolic(part == 0 ? b.re : b.im, "characteristic roots");
        // residual of the ODE itself
        Expr res = differentiate(s.expr, ode.var, ode.order);
        for (int j = 0; j < ode.order; ++j)
          if (!ode.coeffs[j].is_zero()) res += ode.coeffs[j] * differentiate(s.expr, ode.var, j);
        s.exact = res.is_zero();
        s.max_residual = s.exact ? 0 : sample_residual(res);
        if (!root.exact) s.kind = Solution::Kind::Numeric;
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

namespace {

Solution p1iphi_solution(const ReducedEquation& eq, const Expr& phi) {
  std::function<Expr(const Expr&)> lift = [](const Expr& e) { return e; };
  Expr a = pow(phi, static_cast<long>(eq.r));
  for (int j = 2; j <= eq.r - 2; ++j)
    if (!eq.A[j].is_zero()) a += eq.A[j] * pow(phi, static_cast<long>(j));
  const Expr c0 = Expr::symbol("c0");
  if (auto I = integrate(a, "t")) {
    Solution s = symbolic(c0 * exp(phi * kX + *I), "P(1)+I(phi) reduction");
    certify(s, eq);
    return s;
  }
  // numeric quadrature for the time factor, base point t = 0, c0 = 1
  Solution s;
  s.kind = Solution::Kind::Numeric;
  s.method = "P(1)+I(phi) reduction (quadrature)";
  Expr phi1 = substitute(phi, unit_params(phi)), a1 = substitute(a, unit_params(a));
  s.fn = [phi1, a1](long double t, long double x) {
    auto g = [&](long double s) { return eval_t(a1, s); };
    long double I = boost::math::quadrature::gauss_kronrod<long double, 31>::integrate(g, 0.0L, t, 10, 1e-16L);
    return std::exp(eval_t(phi1, t) * x + I);
  };
  GridSpec grid;
  auto res = residual_numeric(eq, s.fn, grid);
  s.max_residual = res.max_residual;
  s.slope = res.slope;
  s.grid = grid;
  return s;
}

}  // namespace

Solution reduce_P1Iphi(const ReducedEquation& eq, std::optional<Rational> phi_shift) {
  Expr shift = phi_shift ? Expr(*phi_shift) : Expr::symbol("k");
  PShape sh = p_shape(eq, shift);
  return p1iphi_solution(eq, sh.phi);
}

LieReduction lie_reduction(const ReducedEquation& eq, const VectorField& q) {
  eq.validate();
  LieReduction out;
  out.field = q.essential();
  if (q.tau.is_zero() && q.chi.is_zero()) {
    if (q.phi.is_zero()) throw InputError("the zero field gives no reduction");
    if (q.phi.is_constant())
      throw UnsupportedError("I(1) cannot be used for Lie reductions: it does not allow an ansatz for u");
    throw UnsupportedError("I(phi) with nonconstant phi is equivalent to I(t), which is not a Lie symmetry "
                           "generator of any equation in the class");
  }
  if (q.essential() == VectorField::D(1)) {
    out.ansatz = "u = v(omega), omega = x";
    out.ode = reduce_D1(eq);
    if (out.ode.constant_coefficients())
      for (auto s : solve_const_ode(out.ode)) {
        s.method = "D(1) reduction";
        if (s.kind == Solution::Kind::Symbolic) certify(s, eq);
        out.solutions.push_back(std::move(s));
      }
    return out;
  }
  if (q.tau.is_zero() && q.chi.is_one()) {
    PShape sh = p_shape(eq, Expr());
    if (!(differentiate(q.phi, "t") - sh.f).is_zero())
      throw InputError("P(1)+I(phi) needs phi_t = f where A0 = f x; got phi = " + q.phi.str());
    out.ansatz = "u = exp(phi x) v(omega), omega = t";
    Expr a = pow(q.phi, static_cast<long>(eq.r));
    for (int j = 2; j <= eq.r - 2; ++j)
      if (!eq.A[j].is_zero()) a += eq.A[j] * pow(q.phi, static_cast<long>(j));
    out.ode.order = 1;
    out.ode.var = "t";
    out.ode.coeffs = {-a};
    out.solutions.push_back(p1iphi_solution(eq, q.phi));
    return out;
  }
  throw UnsupportedError("Lie reductions are implemented for D(1) and P(1)+I(phi); map " + q.str() +
                         " to one of them first (see canonicalize_1d)");
}

Solution act_symmetry(const VectorField& q, const Solution& h, const ReducedEquation& eq) {
  if (h.kind != Solution::Kind::Symbolic || !h.exact)
    throw InputError("act_symmetry needs a certified symbolic solution");
  auto chk = verify_symmetry(eq, q);
  if (chk.holds != Holds::Yes) throw InputError(q.str() + " is not a verified symmetry of the equation");
  Expr u = q.phi * h.expr - q.tau * differentiate(h.expr, "t") - q.xi(eq.r) * differentiate(h.expr, "x");
  if (q.eta0) u += *q.eta0;
  Solution s = symbolic(u, "symmetry action " + q.str());
  certify(s, eq);
  return s;
}

GeneralizedReduction generalized_reduction(const ReducedEquation& eq, const ReductionSpec& spec) {
  eq.validate();
  if (spec.N < 0) throw InputError("N must be nonnegative");
  if (spec.complex_pair && spec.nu <= 0) throw InputError("nu must be positive");
  GeneralizedReduction g;
  g.spec = spec;
  const int N = spec.N, r = eq.r;
  const bool cx = spec.complex_pair;
  const std::string n1 = "^" + std::to_string(N + 1);
  g.condition = cx ? "((Q + " + rational_str(spec.mu) + ")^2 + " + rational_str(spec.nu * spec.nu) + ")" + n1 + " u = 0"
                   : "(Q + " + rational_str(spec.lambda) + ")" + n1 + " u = 0";
  std::vector<Member> members;

  if (spec.family == ReductionSpec::Family::D) {
    if (!t_free(eq)) throw InputError("the D(1) family needs coefficients independent of t");
    g.field = VectorField::D(1);
    g.recursion_operator = "-D_t";
    GQ lam = cx ? GQ{spec.mu, spec.nu} : GQ{spec.lambda, 0};
    g.ansatz = cx ? "u = (v^s(x) cos(nu t) + w^s(x) sin(nu t)) t^s exp(mu t)" : "u = v^s(x) t^s exp(lambda t)";
    LinearODE L;
    L.order = r;
    L.coeffs.assign(r, Expr());
    for (int l = 0; l <= r - 2; ++l) L.coeffs[l] = eq.A[l];
    for (int s = 0; s <= N; ++s) {
      CoupledODE v{sup("v", s), L, {}};
      if (s < N) v.rhs.push_back({Expr(s + 1), sup("v", s + 1)});
      if (!cx) {
        v.rhs.push_back({Expr(spec.lambda), sup("v", s)});
        g.system.push_back(v);
        continue;
      }
      v.rhs.push_back({Expr(spec.mu), sup("v", s)});
      v.rhs.push_back({Expr(spec.nu), sup("w", s)});
      CoupledODE w{sup("w", s), L, {}};
      if (s < N) w.rhs.push_back({Expr(s + 1), sup("w", s + 1)});
      w.rhs.push_back({Expr(-spec.nu), sup("v", s)});
      w.rhs.push_back({Expr(spec.mu), sup("w", s)});
      g.system.push_back(v);
      g.system.push_back(w);
    }
    if (auto poly = constant_char_poly(eq, lam))
      members = d_family_exact(eq, lam, N, *poly);
    else if (spec.numeric_fallback)
      members = d_family_rk4(eq, lam, N, spec.base_point, spec.step);
    else
      throw UnsupportedError("x-dependent coefficients need the numeric fallback");
  } else {
    PShape sh = p_shape(eq, Expr(spec.phi_shift));
    g.field = VectorField::P(1) + VectorField::I(sh.phi);
    g.recursion_operator = "-D_x + " + sh.phi.str();
    Expr kap = sh.phi + Expr(cx ? spec.mu : spec.lambda);
    CExpr kappa{kap, cx ? Expr(spec.nu) : Expr()};
    g.ansatz = cx ? "u = (v^s(t) cos(nu x) + w^s(t) sin(nu x)) x^s exp((phi + mu) x)" : "u = v^s(t) x^s exp((phi + lambda) x)";
    LinearODE L;
    L.order = 1;
    L.var = "t";
    L.coeffs = {Expr()};
    // printed system with the binomial sums; PHI/PSI are Re/Im of (kappa + i nu)^n
    for (int s = 0; s <= N; ++s) {
      CoupledODE v{sup("v", s), L, {}}, w{sup("w", s), L, {}};
      for (int p = s; p <= N; ++p) {
        Expr cv, cw;  // coefficient of v^p and w^p in the v^s equation
        for (int k = 2; k <= r; ++k) {
          if (k == r - 1 || p - s > k) continue;
          Expr Ak = k == r ? Expr(1) : eq.A[k];
          if (Ak.is_zero()) continue;
          Expr b(binomial(k, p - s) * factorial(p) / factorial(s));
          const int n = k + s - p;
          Expr Phi, Psi;
          for (int q = 0; 2 * q <= n; ++q)
            Phi += Expr(binomial(n, 2 * q) * (q % 2 ? -1 : 1)) * pow(Expr(spec.nu), static_cast<long>(2 * q)) *
                   pow(kap, static_cast<long>(n - 2 * q));
          for (int q = 0; 2 * q + 1 <= n; ++q)
            Psi += Expr(binomial(n, 2 * q + 1) * (q % 2 ? -1 : 1)) * pow(Expr(spec.nu), static_cast<long>(2 * q + 1)) *
                   pow(kap, static_cast<long>(n - 2 * q - 1));
          if (!cx) {
            cv += Ak * b * pow(kap, static_cast<long>(n));
          } else {
            cv += Ak * b * Phi;
            cw += Ak * b * Psi;
          }
        }
        v.rhs.push_back({cv, sup("v", p)});
        if (cx) {
          v.rhs.push_back({cw, sup("w", p)});
          w.rhs.push_back({-cw, sup("v", p)});
          w.rhs.push_back({cv, sup("w", p)});
        }
      }
      g.system.push_back(v);
      if (cx) g.system.push_back(w);
    }
    PSystem P = p_system(eq, kappa, N);
    auto exact = p_family_exact(eq, P, N, cx);
    if (exact)
      members = std::move(*exact);
    else if (spec.numeric_fallback)
      members = p_family_rk4(P, N, cx, spec.base_point == 1 ? 0 : spec.base_point, spec.step);
    else
      throw UnsupportedError("the reduced system has no closed-form quadrature");
  }
  for (auto& m : members) {
    g.solutions.push_back(std::move(m.sol));
    g.v.push_back(std::move(m.v));
    g.w.push_back(std::move(m.w));
  }
  return g;
}

SolutionFamily polynomial_t_solutions(const ReducedEquation& eq, int N, bool numeric_fallback) {
  eq.validate();
  if (!t_free(eq)) throw InputError("polynomial-in-t solutions need coefficients independent of t");
  ReductionSpec spec;
  spec.N = N;
  bool constant = constant_char_poly(eq, GQ{}).has_value();
  if (!constant && !numeric_fallback)
    throw UnsupportedError("x-dependent coefficients need the numeric fallback");
  spec.numeric_fallback = numeric_fallback;
  auto g = generalized_reduction(eq, spec);
  SolutionFamily fam;
  for (auto& s : g.solutions) s.method = "polynomial in t";
  fam.basis = g.solutions;
  if (!constant) return fam;
  Expr sum;
  for (std::size_t i = 0; i < fam.basis.size(); ++i) {
    std::string c = "c" + std::to_string(i + 1);
    fam.constants.push_back(c);
    sum += Expr::symbol(c) * fam.basis[i].expr;
  }
  Solution gen = symbolic(sum, "polynomial in t");
  certify(gen, eq);
  fam.general = gen;
  return fam;
}

Solution polynomial_t_solution(const ReducedEquation& eq, int N, const Expr& top) {
  if (top.depends_on("t")) throw InputError("the top layer must be a function of x");
  ReductionSpec spec;
  spec.N = N;
  spec.numeric_fallback = false;
  if (!t_free(eq) || !constant_char_poly(eq, GQ{}))
    throw UnsupportedError("a prescribed top layer needs constant coefficients");
  auto g = generalized_reduction(eq, spec);
  std::vector<std::size_t> idx;
  std::vector<Expr> tops;
  for (std::size_t i = 0; i < g.solutions.size(); ++i)
    if (!g.v[i][N].is_zero() && g.solutions[i].kind == Solution::Kind::Symbolic) {
      idx.push_back(i);
      tops.push_back(g.v[i][N]);
    }
  tops.push_back(top);
  RationalMatrix m = collect_coordinates(tops);
  const std::size_t n = idx.size();
  RationalMatrix lhs(m.rows(), n);
  std::vector<Rational> rhs(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) lhs(i, j) = m(i, j);
    rhs[i] = m(i, n);
  }
  auto co = solve(lhs, rhs);
  if (!co) throw InputError("top layer " + top.str() + " does not solve the homogeneous layer equation");
  Expr u;
  for (std::size_t j = 0; j < n; ++j)
    if ((*co)[j] != 0) u += Expr((*co)[j]) * g.solutions[idx[j]].expr;
  Solution s = symbolic(u, "polynomial in t");
  certify(s, eq);
  return s;
}

Solution generate_nonlocal(const ReducedEquation& eq, const Solution& h, const NonlocalOptions& opt) {
  if (h.kind != Solution::Kind::Symbolic) throw UnsupportedError("generate_nonlocal needs a symbolic seed solution");
  if (!h.exact) throw InputError("the seed solution is not certified");
  if (!params_of(h.expr).empty()) throw InputError("the seed solution must not contain free constants");
  PShape sh = p_shape(eq, Expr(opt.phi_shift));
  const int r = eq.r;
  const Expr phi = sh.phi;
  const Expr X0(from_ld(opt.x0));
  // a(t) = sum A^k phi^k and the boundary series at x0
  Expr a = pow(phi, static_cast<long>(r)), g;
  std::vector<Expr> hd{h.expr};
  for (int i = 1; i < r; ++i) hd.push_back(differentiate(hd.back(), "x"));
  for (int k = 2; k <= r; ++k) {
    if (k == r - 1) continue;
    Expr Ak = k == r ? Expr(1) : eq.A[k];
    if (Ak.is_zero()) continue;
    if (k < r) a += Ak * pow(phi, static_cast<long>(k));
    Expr series;
    for (int i = 0; i <= k - 1; ++i) series += pow(phi, static_cast<long>(k - 1 - i)) * hd[i];
    g += Ak * series;
  }
  g = substitute(g, {{"x", X0}});
  const Expr inner = exp(-phi * kX) * h.expr;
  const Expr phiX0 = phi * X0;
  const long double x0 = opt.x0, t0 = opt.t0, v0 = opt.v0;
  using GK = boost::math::quadrature::gauss_kronrod<long double, 31>;
  // absolute-or-relative acceptance; a pure relative target never triggers on tiny integrals
  auto quad = [](const std::function<long double(long double)>& f, long double lo, long double hi) {
    if (lo == hi) return 0.0L;
    long double err = 0;
    long double v = GK::integrate(f, lo, hi, 8, 1e-15L, &err);
    if (!(err <= 1e-13L * (1 + std::fabs(v)))) throw InvariantError("quadrature did not converge");
    return v;
  };
  struct TimeData {
    long double phi, w, I;
  };
  // closed forms where the kernel finds them
  std::optional<Expr> W = integrate(a, "t");
  if (W) *W = *W - substitute(*W, {{"t", Expr(from_ld(t0))}});
  std::optional<Expr> Xi = integrate(inner, "x");
  if (Xi) *Xi = *Xi - substitute(*Xi, {{"x", X0}});
  auto cache = std::make_shared<std::map<long double, TimeData>>();
  auto w_of = [a, W, t0, quad](long double t) {
    if (W) return eval_t(*W, t);
    return quad([&](long double s) { return eval_t(a, s); }, t0, t);
  };
  auto time_data = [=](long double t) {
    auto it = cache->find(t);
    if (it != cache->end()) return it->second;
    TimeData d;
    d.phi = eval_t(phi, t);
    d.w = w_of(t);
    d.I = g.is_zero() ? 0.0L
                      : quad([&](long double s) { return eval_t(g, s) * std::exp(-eval_t(phiX0, s) - w_of(s)); }, t0, t);
    if (cache->size() > 50000) cache->clear();
    cache->emplace(t, d);
    return d;
  };
  Solution s;
  s.kind = Solution::Kind::Numeric;
  s.method = "nonlocal generation";
  s.fn = [=](long double t, long double x) {
    TimeData d = time_data(t);
    long double xi = Xi ? eval_numeric_ld(*Xi, {{"t", t}, {"x", x}})
                        : quad([&](long double y) { return eval_numeric_ld(inner, {{"t", t}, {"x", y}}); }, x0, x);
    return std::exp(d.phi * x) * xi + (d.I + v0) * std::exp(d.phi * x + d.w);
  };
  auto res = residual_numeric(eq, s.fn, opt.grid);
  s.max_residual = res.max_residual;
  s.slope = res.slope;
  s.grid = opt.grid;
  // printable summary of the construction
  s.expr = Expr();
  return s;
}

}  // namespace linevo
