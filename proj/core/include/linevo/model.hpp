#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "linevo/expr.hpp"

namespace linevo {

/// u_t = A^k(t,x) u_k + B(t,x), k = 0..r.
struct EvolutionEquation {
  int r = 3;
  std::vector<Expr> A;  // A[0] .. A[r]
  Expr B;

  /// Throws InputError unless r >= 3, A has r+1 entries and A^r is nonzero.
  void validate() const;
};

/// u_t = u_r + A^l(t,x) u_l, l = 0..r-2.
struct ReducedEquation {
  int r = 3;
  std::vector<Expr> A;  // A[0] .. A[r-2]

  void validate() const;
  /// A^l, 0 for l outside 0..r-2.
  Expr coeff(int l) const;
};

EvolutionEquation embed_reduced(const ReducedEquation& eq);
/// The reduced form when A^r = 1, A^{r-1} = 0 and B = 0 exactly.
std::optional<ReducedEquation> as_reduced(const EvolutionEquation& eq);

/// Q = D(tau) + P(chi) + I(phi) + Z(eta0) with
/// D(tau) = tau d_t + (1/r) tau_t x d_x, P(chi) = chi d_x, I(phi) = phi u d_u,
/// Z(eta0) = eta0 d_u.
struct VectorField {
  Expr tau, chi, phi;
  std::optional<Expr> eta0;

  static VectorField D(const Expr& tau) { return {tau, Expr(), Expr(), std::nullopt}; }
  static VectorField P(const Expr& chi) { return {Expr(), chi, Expr(), std::nullopt}; }
  static VectorField I(const Expr& phi) { return {Expr(), Expr(), phi, std::nullopt}; }
  static VectorField Z(const Expr& eta) { return {Expr(), Expr(), Expr(), eta}; }

  /// x-component (1/r) tau_t x + chi.
  Expr xi(int r) const;
  bool is_zero() const;
  /// Drops eta0.
  VectorField essential() const { return {tau, chi, phi, std::nullopt}; }
  /// Compact text such as "P(1) + I(t)"; "0" for the zero field.
  std::string str() const;

  friend VectorField operator+(const VectorField& a, const VectorField& b);
  friend VectorField operator-(const VectorField& a, const VectorField& b);
  friend VectorField operator*(const Expr& c, const VectorField& q);
  friend bool operator==(const VectorField& a, const VectorField& b);
};

VectorField lie_bracket(const VectorField& q1, const VectorField& q2, int r);

struct Signature {
  int k0 = 0, k1 = 0, k2 = 0;
  int dim() const { return k0 + k1 + k2; }
  friend bool operator==(const Signature&, const Signature&) = default;
  std::string str() const;
};

/// Exact (k0, k1, k2) of the span of the essential parts. Parameter
/// functions must depend on t only and live in a finite Q-basis of the
/// expression normal form (throws UnsupportedError otherwise).
Signature algebra_signature(const std::vector<VectorField>& basis);

/// Rank over Q of the essential parts.
std::size_t field_rank(const std::vector<VectorField>& fields);

/// Rational coordinates of q in the span of the essential parts of basis, if it lies there.
std::optional<std::vector<Rational>> express_in_span(const std::vector<VectorField>& basis, const VectorField& q);

struct SymmetryAlgebra {
  std::vector<VectorField> basis;
  Signature signature;
  std::string case_label = "unknown";  // 0 1 2 3 4a 4b 5 unknown

  std::size_t dim() const { return basis.size(); }
};

}  // namespace linevo
