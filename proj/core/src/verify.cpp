#include "linevo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linevo/errors.hpp"
#include "linevo/linalg.hpp"
#include "linevo/symkernel.hpp"

namespace linevo {

void GridSpec::validate(int r) const {
  if (!(t1 > t0) || !(x1 > x0)) throw InputError("grid ranges must be non-degenerate");
  if (!(ht > 0) || !(hx > 0)) throw InputError("grid steps must be positive");
  if (order < 2 || order % 2 != 0) throw InputError("stencil order must be even and at least 2");
  if (max_samples < 1) throw InputError("max_samples must be positive");
  int mx = static_cast<int>(central_stencil(r, order).size() / 2);
  int mt = static_cast<int>(central_stencil(1, order).size() / 2);
  if (x1 - x0 <= 2 * mx * hx || t1 - t0 <= 2 * mt * ht)
    throw InputError("grid interior is empty after stencil margins");
  for (double s : singular_x)
    if (s >= x0 && s <= x1)
      throw DomainError("grid x-range [" + std::to_string(x0) + ", " + std::to_string(x1) +
                        "] crosses the singular locus x = " + std::to_string(s));
}

std::vector<Rational> central_stencil(int k, int p) {
  if (k < 1 || p < 2 || p % 2) throw InputError("bad stencil request");
  int n = 2 * ((k + 1) / 2) - 1 + p;
  int m = (n - 1) / 2;
  RationalMatrix V(n, n);
  std::vector<Rational> rhs(n);
  for (int q = 0; q < n; ++q) {
    for (int j = -m; j <= m; ++j) {
      Rational v = 1;
      for (int e = 0; e < q; ++e) v *= j;
      V(q, j + m) = v;
    }
  }
  Rational f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  rhs[k] = f;
  auto w = solve(V, rhs);
  if (!w) throw InvariantError("singular Vandermonde system");
  return *w;
}

Expr residual_symbolic(const EvolutionEquation& eq, const Expr& u) {
  eq.validate();
  Expr res = differentiate(u, "t") - eq.B;
  Expr d = u;
  for (int k = 0; k <= eq.r; ++k) {
    if (k) d = differentiate(d, "x");
    if (!eq.A[k].is_zero()) res -= eq.A[k] * d;
  }
  return res;
}

Expr residual_symbolic(const ReducedEquation& eq, const Expr& u) { return residual_symbolic(embed_reduced(eq), u); }

RealFn as_function(const Expr& u) {
  return [u](long double t, long double x) {
    std::map<std::string, long double> p{{"t", t}, {"x", x}};
    return eval_numeric_ld(u, p);
  };
}

namespace {

std::vector<long double> floats(const std::vector<Rational>& w) {
  std::vector<long double> out;
  for (const auto& q : w) out.push_back(static_cast<long double>(q.get_d()) +
                                        static_cast<long double>(Rational(q - Rational(q.get_d())).get_d()));
  return out;
}

// Sample points on the coarse interior, shared by every refinement level.
std::vector<long double> samples(double a, double b, double h, int margin, int cap) {
  std::vector<long double> pts;
  long double lo = a + margin * h, hi = b - margin * h;
  int n = static_cast<int>(std::floor((hi - lo) / h + 1e-9)) + 1;
  int stride = std::max(1, (n + cap - 1) / cap);
  for (int i = 0; i < n; i += stride) pts.push_back(lo + i * static_cast<long double>(h));
  return pts;
}

}  // namespace

NumericResidual residual_numeric(const EvolutionEquation& eq, const RealFn& u, const GridSpec& g) {
  eq.validate();
  g.validate(eq.r);
  const int r = eq.r;
  std::vector<std::vector<long double>> wx(r + 1);
  for (int k = 1; k <= r; ++k) wx[k] = floats(central_stencil(k, g.order));
  std::vector<long double> wt = floats(central_stencil(1, g.order));
  const int mx = static_cast<int>(wx[r].size() / 2), mt = static_cast<int>(wt.size() / 2);

  auto ts = samples(g.t0, g.t1, g.ht, mt, g.max_samples);
  auto xs = samples(g.x0, g.x1, g.hx, mx, g.max_samples);
  // coefficient values at the sample points
  std::vector<std::vector<long double>> coef(ts.size() * xs.size(), std::vector<long double>(r + 2));
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      std::map<std::string, long double> p{{"t", ts[i]}, {"x", xs[j]}};
      auto& c = coef[i * xs.size() + j];
      for (int k = 0; k <= r; ++k) c[k] = eq.A[k].is_zero() ? 0 : eval_numeric_ld(eq.A[k], p);
      c[r + 1] = eq.B.is_zero() ? 0 : eval_numeric_ld(eq.B, p);
    }

  auto abs_sum = [](const std::vector<long double>& w) {
    long double a = 0;
    for (auto v : w) a += std::fabs(v);
    return a;
  };
  std::vector<long double> amax(r + 1, 0);
  for (const auto& c : coef)
    for (int k = 0; k <= r; ++k) amax[k] = std::max(amax[k], std::fabs(c[k]));

  NumericResidual out;
  std::vector<long double> noise;
  for (int level = 0; level < 3; ++level) {
    const long double ht = g.ht / std::ldexp(1.0L, level), hx = g.hx / std::ldexp(1.0L, level);
    long double worst = 0;
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const long double t = ts[i], x = xs[j];
        const auto& c = coef[i * xs.size() + j];
        std::vector<long double> row(2 * mx + 1);
        for (int s = -mx; s <= mx; ++s) row[s + mx] = u(t, x + s * hx);
        long double ut = 0;
        for (int s = -mt; s <= mt; ++s)
          if (wt[s + mt] != 0) ut += wt[s + mt] * (s == 0 ? row[mx] : u(t + s * ht, x));
        ut /= ht;
        long double rhs = c[0] * row[mx] + c[r + 1];
        for (int k = 1; k <= r; ++k) {
          if (c[k] == 0) continue;
          int m = static_cast<int>(wx[k].size() / 2);
          long double d = 0;
          for (int s = -m; s <= m; ++s) d += wx[k][s + m] * row[s + mx];
          rhs += c[k] * d / std::pow(hx, static_cast<long double>(k));
        }
        worst = std::max(worst, std::fabs(ut - rhs));
        if (level == 0) out.max_abs_u = std::max(out.max_abs_u, static_cast<double>(std::fabs(row[mx])));
      }
    out.levels.push_back(static_cast<double>(worst));
    // rounding floor of the stencils at this level
    long double fl = abs_sum(wt) / ht;
    for (int k = 1; k <= r; ++k) fl += amax[k] * abs_sum(wx[k]) / std::pow(hx, static_cast<long double>(k));
    const long double eps = std::max<long double>(std::numeric_limits<long double>::epsilon(), g.value_eps);
    noise.push_back(fl * eps * std::max<long double>(1, out.max_abs_u));
  }
  out.max_residual = out.levels[0];
  // finest pair whose finer residual is above the floor and that actually
  // converges; the floor is a worst case bound, 3x keeps the bias on the slope
  // under log2(4/3). Values less accurate than the model (quadrature) show up
  // as residuals that stop dropping.
  out.slope = std::numeric_limits<double>::quiet_NaN();
  for (int l = 2; l >= 1; --l)
    if (out.levels[l] > 3 * noise[l] && out.levels[l - 1] >= 4 * out.levels[l]) {
      out.slope = std::log2(out.levels[l - 1] / out.levels[l]);
      break;
    }
  // nothing converges: report the coarse pair as is (about 0 for a non-solution)
  if (!std::isfinite(out.slope) && out.levels[1] > 3 * noise[1] && out.levels[0] > 0)
    out.slope = std::log2(out.levels[0] / out.levels[1]);
  // truncation error never grows under refinement, rounding does
  out.at_roundoff = out.levels[0] <= 10 * noise[0] || out.levels[1] >= 2 * out.levels[0];
  return out;
}

NumericResidual residual_numeric(const ReducedEquation& eq, const RealFn& u, const GridSpec& g) {
  return residual_numeric(embed_reduced(eq), u, g);
}

NumericResidual residual_numeric(const EvolutionEquation& eq, const Expr& u, const GridSpec& g) {
  for (const auto& s : u.free_symbols())
    if (s != "t" && s != "x") throw InputError("solution mentions unbound symbol " + s);
  return residual_numeric(eq, as_function(u), g);
}

NumericResidual residual_numeric(const ReducedEquation& eq, const Expr& u, const GridSpec& g) {
  return residual_numeric(embed_reduced(eq), u, g);
}

}  // namespace linevo
