#include "linevo/model.hpp"

#include "linevo/errors.hpp"
#include "linevo/linalg.hpp"
#include "linevo/symkernel.hpp"

namespace linevo {

void EvolutionEquation::validate() const {
  if (r < 3) throw InputError("order must be at least 3");
  if (A.size() != static_cast<std::size_t>(r) + 1)
    throw InputError("general equation of order " + std::to_string(r) + " needs " + std::to_string(r + 1) +
                     " coefficients");
  if (is_zero(A[r]) != ZeroVerdict::NonZero) throw InputError("leading coefficient A" + std::to_string(r) + " must be nonzero");
}

void ReducedEquation::validate() const {
  if (r < 3) throw InputError("order must be at least 3");
  if (A.size() != static_cast<std::size_t>(r) - 1)
    throw InputError("reduced equation of order " + std::to_string(r) + " needs " + std::to_string(r - 1) +
                     " coefficients");
}

Expr ReducedEquation::coeff(int l) const {
  if (l < 0 || l >= static_cast<int>(A.size())) return Expr();
  return A[l];
}

EvolutionEquation embed_reduced(const ReducedEquation& eq) {
  eq.validate();
  EvolutionEquation out;
  out.r = eq.r;
  out.A = eq.A;
  out.A.push_back(Expr());
  out.A.push_back(Expr(1));
  return out;
}

std::optional<ReducedEquation> as_reduced(const EvolutionEquation& eq) {
  eq.validate();
  if (!eq.A[eq.r].is_one() || !eq.A[eq.r - 1].is_zero() || !eq.B.is_zero()) return std::nullopt;
  return ReducedEquation{eq.r, std::vector<Expr>(eq.A.begin(), eq.A.end() - 2)};
}

Expr VectorField::xi(int r) const { return differentiate(tau, "t") * Expr::symbol("x") / Expr(r) + chi; }

bool VectorField::is_zero() const {
  return tau.is_zero() && chi.is_zero() && phi.is_zero() && (!eta0 || eta0->is_zero());
}

std::string VectorField::str() const {
  std::string s;
  auto add = [&](const char* tag, const Expr& e) {
    if (e.is_zero()) return;
    if (!s.empty()) s += " + ";
    s += std::string(tag) + "(" + e.str() + ")";
  };
  add("D", tau);
  add("P", chi);
  add("I", phi);
  if (eta0) add("Z", *eta0);
  return s.empty() ? "0" : s;
}

namespace {
std::optional<Expr> add_opt(const std::optional<Expr>& a, const std::optional<Expr>& b, int sign) {
  if (!a && !b) return std::nullopt;
  Expr x = a ? *a : Expr(), y = b ? *b : Expr();
  return sign > 0 ? x + y : x - y;
}
}  // namespace

VectorField operator+(const VectorField& a, const VectorField& b) {
  return {a.tau + b.tau, a.chi + b.chi, a.phi + b.phi, add_opt(a.eta0, b.eta0, 1)};
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  return {a.tau - b.tau, a.chi - b.chi, a.phi - b.phi, add_opt(a.eta0, b.eta0, -1)};
}

VectorField operator*(const Expr& c, const VectorField& q) {
  std::optional<Expr> e;
  if (q.eta0) e = c * *q.eta0;
  return {c * q.tau, c * q.chi, c * q.phi, e};
}

bool operator==(const VectorField& a, const VectorField& b) { return (a - b).is_zero(); }

VectorField lie_bracket(const VectorField& q1, const VectorField& q2, int r) {
  auto dt = [](const Expr& e) { return differentiate(e, "t"); };
  const Expr R(r);
  VectorField out;
  out.tau = q1.tau * dt(q2.tau) - q2.tau * dt(q1.tau);
  out.chi = q1.tau * dt(q2.chi) - dt(q1.tau) * q2.chi / R - (q2.tau * dt(q1.chi) - dt(q2.tau) * q1.chi / R);
  out.phi = q1.tau * dt(q2.phi) - q2.tau * dt(q1.phi);
  if (q1.eta0 || q2.eta0) {
    Expr z1 = q1.eta0 ? *q1.eta0 : Expr(), z2 = q2.eta0 ? *q2.eta0 : Expr();
    auto act = [&](const VectorField& q, const Expr& z) {
      return q.tau * dt(z) + q.xi(r) * differentiate(z, "x") - q.phi * z;
    };
    out.eta0 = act(q1, z2) - act(q2, z1);
  }
  return out;
}

std::string Signature::str() const {
  return "(" + std::to_string(k0) + "," + std::to_string(k1) + "," + std::to_string(k2) + ")";
}

namespace {

// Stack the selected components of each field into one column per field.
RationalMatrix stacked(const std::vector<VectorField>& fields, int ncomp) {
  std::vector<Expr> all;
  for (int c = 0; c < ncomp; ++c)
    for (const auto& q : fields) {
      const Expr& e = c == 0 ? q.tau : c == 1 ? q.chi : q.phi;
      for (const auto& s : e.free_symbols())
        if (s != "t")
          throw UnsupportedError("parameter function " + e.str() + " depends on " + s +
                                 "; only functions of t with rational coefficients are supported");
      all.push_back(e);
    }
  RationalMatrix m = collect_coordinates(all);
  const std::size_t n = fields.size();
  RationalMatrix out(m.rows() * ncomp, n);
  for (int c = 0; c < ncomp; ++c)
    for (std::size_t k = 0; k < m.rows(); ++k)
      for (std::size_t i = 0; i < n; ++i) out(c * m.rows() + k, i) = m(k, c * n + i);
  return out;
}

}  // namespace

std::size_t field_rank(const std::vector<VectorField>& fields) {
  if (fields.empty()) return 0;
  return rank(stacked(fields, 3));
}

std::optional<std::vector<Rational>> express_in_span(const std::vector<VectorField>& basis, const VectorField& q) {
  std::vector<VectorField> all = basis;
  all.push_back(q.essential());
  RationalMatrix m = stacked(all, 3);
  const std::size_t n = basis.size();
  RationalMatrix lhs(m.rows(), n);
  std::vector<Rational> rhs(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) lhs(i, j) = m(i, j);
    rhs[i] = m(i, n);
  }
  return solve(lhs, rhs);
}

Signature algebra_signature(const std::vector<VectorField>& basis) {
  if (basis.empty()) return {};
  int full = static_cast<int>(rank(stacked(basis, 3)));
  int tc = static_cast<int>(rank(stacked(basis, 2)));
  int t = static_cast<int>(rank(stacked(basis, 1)));
  return {full - tc, tc - t, t};
}

}  // namespace linevo
