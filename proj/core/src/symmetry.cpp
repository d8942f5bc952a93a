#include "linevo/symmetry.hpp"

#include <algorithm>

#include "linevo/errors.hpp"
#include "linevo/linalg.hpp"

namespace linevo {

namespace {

const Expr kT = Expr::symbol("t");
const Expr kX = Expr::symbol("x");

Expr Dt(const Expr& e, unsigned n = 1) { return differentiate(e, "t", n); }
Expr Dx(const Expr& e, unsigned n = 1) { return differentiate(e, "x", n); }

Holds combine(const std::vector<Expr>& rs) {
  Holds h = Holds::Yes;
  for (const auto& r : rs) {
    ZeroVerdict v = is_zero(r);
    if (v == ZeroVerdict::NonZero) return Holds::No;
    if (v == ZeroVerdict::Unknown) h = Holds::Unknown;
  }
  return h;
}

}  // namespace

ClassifyingResiduals classifying_residuals(const ReducedEquation& eq, const Expr& tau, const Expr& chi,
                                           const Expr& phi, const std::optional<Expr>& eta0) {
  eq.validate();
  for (const Expr* e : {&tau, &chi, &phi})
    if (e->depends_on("x")) throw InputError("tau, chi and phi must depend on t only, got " + e->str());
  const int r = eq.r;
  const Expr R(r);
  Expr tt = Dt(tau);
  Expr xi = tt * kX / R + chi;
  ClassifyingResiduals out;
  for (int l = 0; l <= r - 2; ++l) {
    const Expr& A = eq.A[l];
    Expr res = tau * Dt(A) + xi * Dx(A);
    if (l == 0)
      res += tt * A - Dt(phi);
    else
      res += Expr(r - l) / R * tt * A;
    if (l == 1) res += Dt(tau, 2) * kX / R + Dt(chi);
    out.R.push_back(res);
  }
  if (eta0) {
    Expr lin = Dt(*eta0) - Dx(*eta0, r);
    for (int l = 0; l <= r - 2; ++l)
      if (!eq.A[l].is_zero()) lin -= eq.A[l] * Dx(*eta0, l);
    out.lin = lin;
  }
  return out;
}

std::string holds_name(Holds h) {
  switch (h) {
    case Holds::Yes: return "yes";
    case Holds::No: return "no";
    case Holds::Unknown: return "unknown";
  }
  return "?";
}

SymmetryCheck verify_symmetry(const ReducedEquation& eq, const VectorField& q) {
  SymmetryCheck out;
  out.residuals = classifying_residuals(eq, q.tau, q.chi, q.phi, q.eta0);
  std::vector<Expr> all = out.residuals.R;
  if (out.residuals.lin) all.push_back(*out.residuals.lin);
  out.holds = combine(all);
  return out;
}

std::vector<Expr> AnsatzSpace::functions() const {
  std::vector<Rational> rs = rates;
  if (std::find(rs.begin(), rs.end(), Rational(0)) == rs.end()) rs.insert(rs.begin(), Rational(0));
  std::vector<Expr> out;
  for (const auto& lam : rs) {
    Expr e = exp(Expr(lam) * kT);
    for (int k = 0; k <= kmax; ++k) out.push_back(pow(kT, static_cast<long>(k)) * e);
  }
  for (const auto& g : extra) {
    for (const auto& s : g.free_symbols())
      if (s != "t") throw InputError("ansatz function " + g.str() + " must depend on t only");
    if (!g.is_zero() && std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
  }
  return out;
}

std::string AnsatzSpace::str() const {
  std::string s = "Kmax=" + std::to_string(kmax) + ", rates={";
  for (std::size_t i = 0; i < rates.size(); ++i) s += (i ? "," : "") + rational_str(rates[i]);
  s += "}";
  if (!extra.empty()) {
    s += ", extra={";
    for (std::size_t i = 0; i < extra.size(); ++i) s += (i ? "," : "") + extra[i].str();
    s += "}";
  }
  return s;
}

SymmetryAlgebra solve_symmetries(const ReducedEquation& eq, const AnsatzSpace& space) {
  eq.validate();
  for (const auto& a : eq.A)
    for (const auto& s : a.free_symbols())
      if (s != "t" && s != "x")
        throw UnsupportedError("symbol " + s + " must be given a rational value before solving for symmetries");
  const int r = eq.r;
  std::vector<Expr> f = space.functions();
  const std::size_t n = f.size(), N = 3 * n;
  if (N > space.max_unknowns)
    throw UnsupportedError("ansatz with " + std::to_string(N) + " unknowns exceeds the bound " +
                           std::to_string(space.max_unknowns));

  // One column per unknown coefficient, one block of rows per condition.
  std::vector<std::vector<Expr>> per_l(r - 1, std::vector<Expr>(N));
  for (std::size_t c = 0; c < N; ++c) {
    Expr z;
    const Expr& g = f[c % n];
    ClassifyingResiduals res = c < n ? classifying_residuals(eq, g, z, z)
                               : c < 2 * n ? classifying_residuals(eq, z, g, z)
                                           : classifying_residuals(eq, z, z, g);
    for (int l = 0; l <= r - 2; ++l) per_l[l][c] = res.R[l];
  }
  RationalMatrix M(0, N);
  for (const auto& exprs : per_l) {
    RationalMatrix m = collect_coordinates(exprs);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::vector<Rational> row(N);
      for (std::size_t j = 0; j < N; ++j) row[j] = m(i, j);
      M.append_row(row);
    }
  }
  auto ns = nullspace(M);
  RationalMatrix B(0, N);
  for (const auto& v : ns) B.append_row(v);
  Rref red = rref(B);

  std::vector<VectorField> fields;
  for (std::size_t i = 0; i < red.pivots.size(); ++i) {
    VectorField q;
    for (std::size_t j = 0; j < N; ++j) {
      const Rational& c = red.m(i, j);
      if (c == 0) continue;
      Expr term = Expr(c) * f[j % n];
      if (j < n)
        q.tau += term;
      else if (j < 2 * n)
        q.chi += term;
      else
        q.phi += term;
    }
    fields.push_back(q);
  }
  auto category = [](const VectorField& q) { return !q.tau.is_zero() ? 1 : !q.chi.is_zero() ? 2 : 0; };
  std::stable_sort(fields.begin(), fields.end(),
                   [&](const VectorField& a, const VectorField& b) { return category(a) < category(b); });
  SymmetryAlgebra alg;
  alg.basis = fields;
  alg.signature = algebra_signature(fields);
  return alg;
}

Classification classify(const ReducedEquation& eq, const AnsatzSpace& space) {
  Classification out;
  out.space = space;
  out.algebra = solve_symmetries(eq, space);
  SymmetryAlgebra& alg = out.algebra;
  const Signature s = alg.signature;
  std::string label = "unknown";
  if (s.k0 == 1) {
    switch (s.dim()) {
      case 1: label = "0"; break;
      case 2: label = s.k2 == 1 ? "1" : s.k1 == 1 ? "3" : "unknown"; break;
      case 3:
        if (s.k2 == 2 && s.k1 == 0) {
          label = "2";
        } else if (s.k1 == 1 && s.k2 == 1) {
          // a1 in [Q2, Q1] = a0 Q0 + a1 Q1, Q1 the shift part, Q2 the time part
          const VectorField *q1 = nullptr, *q2 = nullptr;
          for (const auto& q : alg.basis) {
            if (!q.tau.is_zero()) q2 = &q;
            else if (!q.chi.is_zero()) q1 = &q;
          }
          if (!q1 || !q2) throw InvariantError("signature (1,1,1) without shift and time parts");
          VectorField br = lie_bracket(*q2, *q1, eq.r);
          auto co = express_in_span(alg.basis, br);
          if (!co) throw InvariantError("basis is not closed under the bracket");
          std::size_t i1 = static_cast<std::size_t>(q1 - alg.basis.data());
          label = (*co)[i1] == 0 ? "4a" : "4b";
        }
        break;
      case 4:
        if (s.k1 == 1 && s.k2 == 2) label = "5";
        break;
      default: break;
    }
  }
  alg.case_label = label;
  out.caveats.push_back("complete relative to the ansatz " + space.str());
  if (label == "1")
    out.caveats.push_back("the two excluded coefficient families of case 1 were not checked");
  if (label == "unknown") out.caveats.push_back("signature " + s.str() + " matches no case");
  return out;
}

BoundsVerdict signature_bounds_check(const SymmetryAlgebra& alg) {
  BoundsVerdict v;
  const Signature s = alg.signature;
  auto fail = [&](const std::string& m) {
    v.ok = false;
    v.violations.push_back(m);
  };
  if (alg.dim() > 4) fail("dimension " + std::to_string(alg.dim()) + " exceeds 4");
  if (s.k0 != 1) fail("k0 = " + std::to_string(s.k0) + ", expected 1");
  if (s.k1 > 1) fail("k1 = " + std::to_string(s.k1) + " exceeds 1");
  if (s.k2 > 2) fail("k2 = " + std::to_string(s.k2) + " exceeds 2");
  if (static_cast<std::size_t>(s.dim()) != alg.dim()) fail("basis is linearly dependent");
  return v;
}

}  // namespace linevo
