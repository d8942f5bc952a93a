#include "linevo/equivalence.hpp"

#include <algorithm>

#include "linevo/errors.hpp"
#include "linevo/linalg.hpp"

namespace linevo {

namespace {

const Expr kT = Expr::symbol("t");
const Expr kX = Expr::symbol("x");

Expr Dt(const Expr& e, unsigned n = 1) { return differentiate(e, "t", n); }
Expr Dx(const Expr& e, unsigned n = 1) { return differentiate(e, "x", n); }

bool t_free(const Expr& e) { return !e.depends_on("t") && !e.depends_on("x"); }

Expr at_time(const Expr& e, const Expr& tinv) { return expand_exp_log(substitute(e, {{"t", tinv}})); }

struct InverseMap {
  Expr tinv, xinv;
};

InverseMap inverse_map(const GeneralTransformation& tr) {
  Expr tinv = tr.T == kT ? kT : catalog_entry(tr.T).inverse;
  if (!tr.X.depends_on("x")) throw InputError("X does not depend on x");
  auto d = poly_degree(tr.X, "x");
  if (!d || *d != 1) throw UnsupportedError("the inverse map needs X affine in x, got " + tr.X.str());
  auto c = poly_coefficients(tr.X, "x");
  return {tinv, (kX - at_time(c[0], tinv)) / at_time(c[1], tinv)};
}

Expr apply_inverse(const Expr& e, const InverseMap& m) {
  return expand_exp_log(substitute(e, {{"t", m.tinv}, {"x", m.xinv}}));
}

void require_nonzero(const Expr& e, const char* what) {
  if (is_zero(e) != ZeroVerdict::NonZero) throw InputError(std::string(what) + " must be nonzero, got " + e.str());
}

void require_zero(const Expr& e, const std::string& what) {
  if (is_zero(e) != ZeroVerdict::Zero) throw InputError(what + " (got " + e.str() + ")");
}

// Residual of u against u_t = A^k u_k + B.
Expr residual(const EvolutionEquation& eq, const Expr& u) {
  Expr res = Dt(u) - eq.B;
  for (int k = 0; k <= eq.r; ++k)
    if (!eq.A[k].is_zero()) res -= eq.A[k] * Dx(u, k);
  return res;
}

}  // namespace

// ---------------------------------------------------------------- catalog

std::optional<CatalogEntry> catalog_lookup(const Expr& T) {
  if (T.depends_on("x") || !T.depends_on("t")) return std::nullopt;
  auto check = [&](CatalogEntry e) -> std::optional<CatalogEntry> {
    try {
      Expr back = expand_exp_log(substitute(T, {{"t", e.inverse}}));
      if (is_zero(back - kT) == ZeroVerdict::Zero) return e;
    } catch (const Error&) {
    }
    return std::nullopt;
  };
  if (auto d = poly_degree(T, "t"); d && *d == 1) {
    auto c = poly_coefficients(T, "t");
    return check({"affine", T, (kT - c[0]) / c[1], "all t"});
  }
  {
    Expr n = T.numerator(), d = T.denominator();
    auto dn = poly_degree(n, "t"), dd = poly_degree(d, "t");
    if (dn && dd && *dn <= 1 && *dd == 1) {
      auto cn = poly_coefficients(n, "t");
      auto cd = poly_coefficients(d, "t");
      Expr a = cn.size() > 1 ? cn[1] : Expr(), b = cn[0], c = cd[1], dd0 = cd[0];
      if (is_zero(a * dd0 - b * c) == ZeroVerdict::NonZero)
        return check({"moebius", T, (dd0 * kT - b) / (a - c * kT), "t != " + (a / c).str()});
    }
  }
  Expr Tt = Dt(T);
  if (Tt.is_zero()) return std::nullopt;
  try {
    Expr b = Dt(Tt) / Tt;
    if (!b.is_zero() && !b.depends_on("t")) {
      Expr c = T - Tt / b;
      Expr a = (T - c) * exp(-b * kT);
      if (t_free(c) && t_free(a))
        return check({"exponential", T, ln((kT - c) / a) / b, "(t - (" + c.str() + "))/(" + a.str() + ") > 0"});
    }
    // a*ln(s*(t + beta)) + b with s = +-1
    Expr w = Expr(1) / Tt;
    if (auto dw = poly_degree(w, "t"); dw && *dw == 1) {
      auto c = poly_coefficients(w, "t");
      if (t_free(c[0]) && t_free(c[1])) {
        Expr a = Expr(1) / c[1], lin = kT + c[0] / c[1];
        for (int sg : {1, -1}) {
          Expr L = Expr(sg) * lin;
          Expr b0 = T - a * ln(L);
          if (t_free(b0))
            return check({"logarithm", T, Expr(sg) * exp((kT - b0) / a) - c[0] / c[1],
                          "source " + L.str() + " > 0"});
        }
      }
    }
    Expr qe = Expr(1) + kT * Dt(Tt) / Tt;
    if (auto q = qe.as_rational(); q && *q != 0 && *q != 1) {
      Ratio qr = Ratio::from_rational(*q);
      Expr aa = Tt / (qe * pow(kT, qr - Ratio(1)));
      Expr c = T - aa * pow(kT, qr);
      if (t_free(aa) && t_free(c))
        return check({"power", T, pow((kT - c) / aa, Ratio(1) / qr), "source t > 0"});
    }
  } catch (const Error&) {
  }
  return std::nullopt;
}

CatalogEntry catalog_entry(const Expr& T) {
  auto e = catalog_lookup(T);
  if (!e) throw UnsupportedError("T = " + T.str() + " is not an invertible catalog map");
  return *e;
}

// ---------------------------------------------------------------- transformations

Expr EquivTransformation::X1(int r) const {
  if (r % 2 == 1 && eps != 1) throw InputError("eps must be +1 for odd order");
  if (eps != 1 && eps != -1) throw InputError("eps must be +1 or -1");
  return Expr(eps) * pow(Dt(T), Ratio(1, r));
}

GeneralTransformation to_general(const EquivTransformation& tr, int r) {
  return {tr.T, tr.X1(r) * kX + tr.X0, tr.U1, tr.U0};
}

Expr in_new_variables(const Expr& e, const GeneralTransformation& tr) { return apply_inverse(e, inverse_map(tr)); }

EvolutionEquation pushforward_equation(const EvolutionEquation& eq, const GeneralTransformation& tr) {
  eq.validate();
  const int r = eq.r;
  if (tr.T.depends_on("x")) throw InputError("T must depend on t only");
  Expr Tt = Dt(tr.T), Xx = Dx(tr.X), Xt = Dt(tr.X);
  require_nonzero(Tt, "T_t");
  require_nonzero(Xx, "X_x");
  require_nonzero(tr.U1, "U1");
  InverseMap inv = inverse_map(tr);

  // Jet-linear expressions: slots 0..r hold the coefficients of u_k, slot r+1 the free term.
  using Jet = std::vector<Expr>;
  const std::size_t F = r + 1;
  auto dx_jet = [&](const Jet& L) {
    Jet out(r + 2);
    for (int k = 0; k <= r; ++k) {
      if (L[k].is_zero()) continue;
      if (k == r) throw InvariantError("jet order exceeded");
      out[k] += Dx(L[k]);
      out[k + 1] += L[k];
    }
    out[F] = Dx(L[F]);
    return out;
  };
  std::vector<Jet> U(r + 1, Jet(r + 2));
  U[0][0] = tr.U1;
  U[0][F] = tr.U0;
  Expr inv_Xx = Expr(1) / Xx;
  for (int k = 1; k <= r; ++k) {
    Jet d = dx_jet(U[k - 1]);
    for (auto& c : d) c = c * inv_Xx;
    U[k] = d;
  }
  Jet lhs(r + 2);
  {
    Jet d = dx_jet(U[0]);
    Expr s = Xt / Xx;
    lhs[0] = Dt(tr.U1);
    for (int k = 0; k <= r; ++k) lhs[k] += tr.U1 * eq.A[k];
    lhs[F] = Dt(tr.U0) + tr.U1 * eq.B;
    for (std::size_t k = 0; k < lhs.size(); ++k) lhs[k] = (lhs[k] - s * d[k]) / Tt;
  }
  std::vector<Expr> At(r + 1);
  for (int k = r; k >= 0; --k) {
    Expr num = lhs[k];
    for (int m = k + 1; m <= r; ++m)
      if (!At[m].is_zero()) num -= At[m] * U[m][k];
    At[k] = num / U[k][k];
  }
  Expr Bt = lhs[F];
  for (int m = 0; m <= r; ++m)
    if (!At[m].is_zero()) Bt -= At[m] * U[m][F];

  EvolutionEquation out;
  out.r = r;
  for (auto& a : At) out.A.push_back(apply_inverse(a, inv));
  out.B = apply_inverse(Bt, inv);
  return out;
}

EvolutionEquation pushforward_equation(const EvolutionEquation& eq, const EquivTransformation& tr) {
  return pushforward_equation(eq, to_general(tr, eq.r));
}

ReducedEquation pushforward_reduced(const ReducedEquation& eq, const EquivTransformation& tr) {
  if (!tr.U0.is_zero()) throw InputError("a group element has U0 = 0");
  if (tr.U1.depends_on("x")) throw InputError("U1 must depend on t only");
  EvolutionEquation out = pushforward_equation(embed_reduced(eq), tr);
  const int r = eq.r;
  if (is_zero(out.A[r] - Expr(1)) != ZeroVerdict::Zero || is_zero(out.A[r - 1]) != ZeroVerdict::Zero ||
      is_zero(out.B) != ZeroVerdict::Zero)
    throw InvariantError("image of a reduced equation left the reduced class");
  return {r, std::vector<Expr>(out.A.begin(), out.A.end() - 2)};
}

EvolutionEquation transform_explicit(const EvolutionEquation& eq, const EquivTransformation& tr) {
  eq.validate();
  const int r = eq.r;
  require_zero(eq.A[r] - Expr(1), "explicit rule needs A^r = 1");
  require_zero(eq.A[r - 1], "explicit rule needs A^{r-1} = 0");
  if (tr.U1.depends_on("x") || tr.X0.depends_on("x")) throw InputError("U1 and X0 must depend on t only");
  GeneralTransformation g = to_general(tr, r);
  InverseMap inv = inverse_map(g);
  Expr X1 = tr.X1(r), Tt = Dt(tr.T);
  std::vector<Expr> A(r + 1);
  A[r] = Expr(1);
  for (int j = 2; j <= r - 2; ++j) A[j] = pow(X1, static_cast<long>(j)) * eq.A[j] / Tt;
  A[1] = (X1 * eq.A[1] - Dt(X1) * kX - Dt(tr.X0)) / Tt;
  A[0] = (eq.A[0] + Dt(tr.U1) / tr.U1) / Tt;
  Expr W = tr.U0 / tr.U1;
  Expr op = Dt(W) - Dx(W, r);
  for (int l = 0; l <= r - 2; ++l)
    if (!eq.A[l].is_zero()) op -= eq.A[l] * Dx(W, l);
  Expr B = tr.U1 / Tt * (eq.B + op);
  EvolutionEquation out;
  out.r = r;
  for (auto& a : A) out.A.push_back(apply_inverse(a, inv));
  out.B = apply_inverse(B, inv);
  return out;
}

Expr transport_solution(const Expr& h, const GeneralTransformation& tr) {
  return apply_inverse(tr.U1 * h + tr.U0, inverse_map(tr));
}

EquivTransformation compose(const EquivTransformation& tr1, const EquivTransformation& tr2, int r) {
  Expr T1 = tr1.T;
  EquivTransformation out;
  out.T = at_time(tr2.T, T1);
  if (out.T != kT) catalog_entry(out.T);
  out.eps = tr1.eps * tr2.eps;
  Expr X12 = at_time(tr2.X1(r), T1);
  Expr x1 = tr1.X1(r) * kX + tr1.X0;
  out.X0 = X12 * tr1.X0 + at_time(tr2.X0, T1);
  Expr U12 = at_time(tr2.U1, T1);
  out.U1 = U12 * tr1.U1;
  out.U0 = U12 * tr1.U0 + expand_exp_log(substitute(tr2.U0, {{"t", T1}, {"x", x1}}));
  return out;
}

EquivTransformation invert(const EquivTransformation& tr, int r) {
  CatalogEntry e = catalog_entry(tr.T);
  const Expr& ti = e.inverse;
  Expr X1i = at_time(tr.X1(r), ti);
  Expr U1i = at_time(tr.U1, ti);
  EquivTransformation out;
  out.T = ti;
  out.eps = tr.eps;
  out.X0 = -at_time(tr.X0, ti) / X1i;
  out.U1 = Expr(1) / U1i;
  out.U0 = tr.U0.is_zero() ? Expr() : -in_new_variables(tr.U0, to_general(tr, r)) / U1i;
  return out;
}

// ---------------------------------------------------------------- gauging

std::string target_form_name(TargetForm f) {
  switch (f) {
    case TargetForm::LeadingNormalized: return "leading-normalized";
    case TargetForm::ReducedInhomogeneous: return "reduced-inhomogeneous";
    case TargetForm::ReducedHomogeneous: return "reduced-homogeneous";
  }
  return "?";
}

std::pair<EvolutionEquation, GaugeReport> gauge_leading(const EvolutionEquation& eq) {
  eq.validate();
  const int r = eq.r;
  const Expr& Ar = eq.A[r];
  if (Ar.depends_on("x"))
    throw UnsupportedError("leading coefficient depends on x; only t-dependent A^r can be gauged");
  GaugeReport rep;
  rep.target = TargetForm::LeadingNormalized;
  if (Ar.is_one()) return {eq, rep};
  if (r % 2 == 0) {
    bool negative = false;
    if (auto q = Ar.as_rational()) {
      negative = *q < 0;
    } else if (Ar.free_symbols() == std::vector<std::string>{"t"}) {
      for (double tv : {0.3, 0.7, 1.1, 1.5})
        if (eval_numeric(Ar, {{"t", tv}}) < 0) negative = true;
    }
    if (negative) throw DomainError("even order needs a positive leading coefficient, got " + Ar.str());
  }
  auto T = integrate(Ar, "t");
  if (!T) throw UnsupportedError("no closed-form antiderivative of A^r = " + Ar.str());
  GeneralTransformation g{*T, kX, Expr(1), Expr()};
  EvolutionEquation out = pushforward_equation(eq, g);
  ZeroVerdict v = is_zero(out.A[r] - Expr(1));
  rep.residual_checks.push_back(v);
  if (v != ZeroVerdict::Zero) throw InvariantError("leading gauge did not produce A^r = 1: " + out.A[r].str());
  out.A[r] = Expr(1);
  rep.chain.push_back(g);
  rep.steps.push_back("leading: T = " + T->str());
  return {out, rep};
}

std::pair<EvolutionEquation, GaugeReport> gauge_subleading(const EvolutionEquation& eq) {
  eq.validate();
  const int r = eq.r;
  require_zero(eq.A[r] - Expr(1), "subleading gauge needs A^r = 1");
  GaugeReport rep;
  rep.target = TargetForm::ReducedInhomogeneous;
  const Expr& a = eq.A[r - 1];
  if (a.is_zero()) return {eq, rep};
  auto F = integrate(a, "x");
  if (!F) throw UnsupportedError("no closed-form x-antiderivative of A^{r-1} = " + a.str());
  for (int s : {1, -1}) {
    Expr U1 = expand_exp_log(exp(Expr(s) * *F / Expr(r)));
    GeneralTransformation g{kT, kX, U1, Expr()};
    EvolutionEquation out = pushforward_equation(eq, g);
    ZeroVerdict v = is_zero(out.A[r - 1]);
    if (v != ZeroVerdict::Zero) continue;
    ZeroVerdict lead = is_zero(out.A[r] - Expr(1));
    if (lead != ZeroVerdict::Zero) throw InvariantError("subleading gauge changed A^r");
    rep.residual_checks.push_back(v);
    rep.residual_checks.push_back(lead);
    out.A[r - 1] = Expr();
    out.A[r] = Expr(1);
    rep.chain.push_back(g);
    rep.steps.push_back("subleading: U1 = " + U1.str());
    return {out, rep};
  }
  throw InvariantError("neither sign annihilates A^{r-1}");
}

std::optional<Expr> find_particular_solution(const EvolutionEquation& eq, int dt, int dx) {
  eq.validate();
  if (eq.B.is_zero()) return Expr();
  EvolutionEquation hom = eq;
  hom.B = Expr();
  std::vector<Expr> basis, cols;
  for (int i = 0; i <= dt; ++i)
    for (int j = 0; j <= dx; ++j) {
      Expr w = pow(kT, static_cast<long>(i)) * pow(kX, static_cast<long>(j));
      basis.push_back(w);
      cols.push_back(residual(hom, w));
    }
  cols.push_back(eq.B);
  RationalMatrix m = collect_coordinates(cols);
  const std::size_t n = basis.size();
  RationalMatrix lhs(m.rows(), n);
  std::vector<Rational> rhs(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) lhs(i, j) = m(i, j);
    rhs[i] = m(i, n);
  }
  auto c = solve(lhs, rhs);
  if (!c) return std::nullopt;
  Expr w;
  for (std::size_t j = 0; j < n; ++j)
    if ((*c)[j] != 0) w += Expr((*c)[j]) * basis[j];
  if (is_zero(residual(eq, w)) != ZeroVerdict::Zero) return std::nullopt;
  return w;
}

std::pair<ReducedEquation, GaugeReport> gauge_inhomogeneity(const EvolutionEquation& eq, const Expr& w) {
  eq.validate();
  const int r = eq.r;
  require_zero(eq.A[r] - Expr(1), "inhomogeneity gauge needs A^r = 1");
  require_zero(eq.A[r - 1], "inhomogeneity gauge needs A^{r-1} = 0");
  GaugeReport rep;
  rep.target = TargetForm::ReducedHomogeneous;
  ZeroVerdict pre = is_zero(residual(eq, w));
  if (pre != ZeroVerdict::Zero) throw InputError("w = " + w.str() + " is not a solution of the equation");
  rep.residual_checks.push_back(pre);
  EvolutionEquation out = eq;
  if (!w.is_zero()) {
    GeneralTransformation g{kT, kX, Expr(1), -w};
    out = pushforward_equation(eq, g);
    ZeroVerdict v = is_zero(out.B);
    rep.residual_checks.push_back(v);
    if (v != ZeroVerdict::Zero) throw InvariantError("inhomogeneity survived the gauge: " + out.B.str());
    rep.chain.push_back(g);
    rep.steps.push_back("inhomogeneity: U0 = " + (-w).str());
  } else if (!eq.B.is_zero()) {
    throw InputError("w = 0 does not solve an inhomogeneous equation");
  }
  out.B = Expr();
  out.A[r] = Expr(1);
  out.A[r - 1] = Expr();
  return {*as_reduced(out), rep};
}

std::pair<ReducedEquation, GaugeReport> gauge_to_reduced(const EvolutionEquation& eq, const std::optional<Expr>& w,
                                                        int dt, int dx) {
  GaugeReport rep;
  auto merge = [&](const GaugeReport& g) {
    rep.chain.insert(rep.chain.end(), g.chain.begin(), g.chain.end());
    rep.steps.insert(rep.steps.end(), g.steps.begin(), g.steps.end());
    rep.residual_checks.insert(rep.residual_checks.end(), g.residual_checks.begin(), g.residual_checks.end());
  };
  auto [e1, r1] = gauge_leading(eq);
  merge(r1);
  auto [e2, r2] = gauge_subleading(e1);
  merge(r2);
  std::optional<Expr> ww;
  if (w) {
    Expr cur = *w;
    for (const auto& g : rep.chain) cur = transport_solution(cur, g);
    ww = cur;
  } else {
    // lowest total degree first, so the simplest particular solution wins
    for (int d = 0; d <= dt + dx && !ww; ++d)
      for (int a = std::min(d, dt); a >= 0 && !ww; --a)
        if (d - a <= dx) ww = find_particular_solution(e2, a, d - a);
    if (!ww)
      throw UnsupportedError("no polynomial particular solution up to bidegree (" + std::to_string(dt) + "," +
                             std::to_string(dx) + ")");
  }
  auto [e3, r3] = gauge_inhomogeneity(e2, *ww);
  merge(r3);
  rep.target = TargetForm::ReducedHomogeneous;
  return {e3, rep};
}

// ---------------------------------------------------------------- equivalence algebra

std::vector<Expr> infinitesimal_action(const EquivGenerator& g, const ReducedEquation& eq) {
  eq.validate();
  const int r = eq.r;
  const Expr R(r);
  std::vector<Expr> d(r - 1);
  if (g.f.depends_on("x")) throw InputError("generator function must depend on t only");
  switch (g.kind) {
    case EquivGenerator::D: {
      Expr tau = g.f, tt = Dt(tau), ttt = Dt(tau, 2);
      for (int l = 0; l <= r - 2; ++l) {
        const Expr& A = eq.A[l];
        d[l] = -tau * Dt(A) - tt * kX / R * Dx(A) - Expr(Rational(r - l, r)) * tt * A;
        if (l == 1) d[l] -= kX * ttt / R;
      }
      break;
    }
    case EquivGenerator::P:
      for (int l = 0; l <= r - 2; ++l) d[l] = -g.f * Dx(eq.A[l]);
      d[1] -= Dt(g.f);
      break;
    case EquivGenerator::I:
      d[0] = Dt(g.f);
      break;
  }
  return d;
}

EquivTransformation one_parameter_flow(const EquivGenerator& g, const Rational& eps) {
  EquivTransformation tr;
  const Expr e(eps);
  switch (g.kind) {
    case EquivGenerator::D: {
      auto deg = poly_degree(g.f, "t");
      if (!deg || *deg > 2) throw UnsupportedError("flow of D(tau) needs tau = a + b*t or c*t^2");
      auto c = poly_coefficients(g.f, "t");
      c.resize(3);
      for (auto& ci : c)
        if (!t_free(ci)) throw UnsupportedError("flow of D(tau) needs constant coefficients");
      if (!c[2].is_zero()) {
        if (!c[0].is_zero() || !c[1].is_zero()) throw UnsupportedError("flow of D(tau) supports c*t^2 only");
        tr.T = kT / (Expr(1) - c[2] * e * kT);
      } else if (c[1].is_zero()) {
        tr.T = kT + c[0] * e;
      } else {
        Expr s = c[0] / c[1];
        tr.T = (kT + s) * exp(c[1] * e) - s;
      }
      break;
    }
    case EquivGenerator::P:
      tr.X0 = e * g.f;
      break;
    case EquivGenerator::I:
      tr.U1 = exp(e * g.f);
      break;
  }
  return tr;
}

EquivTransformation Elementary::as_transformation() const {
  EquivTransformation tr;
  switch (kind) {
    case D: tr.T = f; break;
    case P: tr.X0 = f; break;
    case I: tr.U1 = f; break;
    case X: tr.eps = -1; break;
  }
  return tr;
}

std::string Elementary::str() const {
  switch (kind) {
    case D: return "D(T = " + f.str() + ")";
    case P: return "P(X0 = " + f.str() + ")";
    case I: return "I(U1 = " + f.str() + ")";
    case X: return "X";
  }
  return "?";
}

VectorField adjoint_pushforward(const VectorField& q, const Elementary& e, int r) {
  if (q.eta0) throw InputError("adjoint action is defined on essential fields");
  VectorField out = q;
  switch (e.kind) {
    case Elementary::D: {
      CatalogEntry c = catalog_entry(e.f);
      Expr Tt = Dt(e.f);
      out.tau = at_time(Tt * q.tau, c.inverse);
      out.chi = at_time(pow(Tt, Ratio(1, r)) * q.chi, c.inverse);
      out.phi = at_time(q.phi, c.inverse);
      break;
    }
    case Elementary::P:
      out.chi = q.chi + q.tau * Dt(e.f) - Dt(q.tau) * e.f / Expr(r);
      break;
    case Elementary::I:
      require_nonzero(e.f, "U1");
      out.phi = q.phi + q.tau * Dt(e.f) / e.f;
      break;
    case Elementary::X:
      if (r % 2 == 1) throw InputError("the reflection x -> -x is an equivalence only for even order");
      out.chi = -q.chi;
      break;
  }
  return out;
}

std::vector<Elementary> factor_elementary(const EquivTransformation& tr, int r) {
  std::vector<Elementary> out;
  Expr tinv = kT;
  if (tr.T != kT) {
    tinv = catalog_entry(tr.T).inverse;
    out.push_back(Elementary::Dt(tr.T));
  }
  if (tr.eps == -1) {
    if (r % 2 == 1) throw InputError("eps must be +1 for odd order");
    out.push_back(Elementary::Xr());
  }
  if (!tr.X0.is_zero()) out.push_back(Elementary::Px(at_time(tr.X0, tinv)));
  if (!tr.U1.is_one()) out.push_back(Elementary::Iu(at_time(tr.U1, tinv)));
  return out;
}

VectorField adjoint_pushforward(const VectorField& q, const EquivTransformation& tr, int r) {
  VectorField cur = q;
  for (const auto& e : factor_elementary(tr, r)) cur = adjoint_pushforward(cur, e, r);
  return cur;
}

Canonical1D canonicalize_1d(const VectorField& q, int r) {
  if (q.eta0) throw InputError("canonicalization is defined on essential fields");
  if (q.is_zero()) throw InputError("the zero field spans no subalgebra");
  for (const Expr* e : {&q.tau, &q.chi, &q.phi})
    if (e->depends_on("x")) throw InputError("parameter functions must depend on t only");
  Canonical1D out;
  VectorField cur = q;
  auto apply = [&](const Elementary& e) {
    cur = adjoint_pushforward(cur, e, r);
    out.chain.push_back(e);
  };
  auto need = [](std::optional<Expr> e, const std::string& what) {
    if (!e) throw UnsupportedError("no closed-form antiderivative for " + what);
    return *e;
  };
  if (!q.tau.is_zero()) {
    if (q.tau.depends_on("t")) apply(Elementary::Dt(need(integrate(Expr(1) / q.tau, "t"), "1/tau")));
    const Expr c = cur.tau;
    if (c.depends_on("t")) throw InvariantError("time rescaling did not straighten tau");
    if (!cur.chi.is_zero()) apply(Elementary::Px(-need(integrate(cur.chi, "t"), "chi") / c));
    if (!cur.phi.is_zero()) apply(Elementary::Iu(expand_exp_log(exp(-need(integrate(cur.phi, "t"), "phi") / c))));
    out.field = VectorField::D(1);
    out.scale = c;
  } else if (!q.chi.is_zero()) {
    if (q.chi.depends_on("t"))
      apply(Elementary::Dt(need(integrate(pow(q.chi, static_cast<long>(-r)), "t"), "chi^(-r)")));
    const Expr c = cur.chi;
    if (c.depends_on("t")) throw InvariantError("time rescaling did not straighten chi");
    out.field = VectorField::P(1) + VectorField::I(cur.phi / c);
    out.scale = c;
  } else if (!q.phi.depends_on("t")) {
    out.field = VectorField::I(1);
    out.scale = q.phi;
  } else {
    apply(Elementary::Dt(q.phi));
    out.field = VectorField::I(kT);
    out.scale = Expr(1);
    if (cur.phi != kT) throw InvariantError("time change did not map phi to t");
  }
  return out;
}

}  // namespace linevo
