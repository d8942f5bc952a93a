#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "linevo/model.hpp"
#include "linevo/symkernel.hpp"

namespace linevo {

/// Left-hand sides of the classifying conditions, R[l] for l = 0..r-2, plus
/// the residual of the linear part when eta0 is supplied.
struct ClassifyingResiduals {
  std::vector<Expr> R;
  std::optional<Expr> lin;
};

ClassifyingResiduals classifying_residuals(const ReducedEquation& eq, const Expr& tau, const Expr& chi,
                                           const Expr& phi, const std::optional<Expr>& eta0 = std::nullopt);

enum class Holds { Yes, No, Unknown };
std::string holds_name(Holds h);

struct SymmetryCheck {
  Holds holds = Holds::Unknown;
  ClassifyingResiduals residuals;
};

SymmetryCheck verify_symmetry(const ReducedEquation& eq, const VectorField& q);

/// Parameter functions t^k e^(lambda t), k <= kmax, lambda in rates.
struct AnsatzSpace {
  int kmax = 3;
  std::vector<Rational> rates{Rational(0), Rational(1), Rational(-1)};
  /// Further functions of t, e.g. powers of |t| after a time change.
  std::vector<Expr> extra;
  std::size_t max_unknowns = 600;

  std::vector<Expr> functions() const;
  std::string str() const;
};

/// Essential algebra restricted to the ansatz space, basis ordered as
/// kernel, then fields with a time part, then the rest.
SymmetryAlgebra solve_symmetries(const ReducedEquation& eq, const AnsatzSpace& space = {});

struct Classification {
  SymmetryAlgebra algebra;
  AnsatzSpace space;
  std::vector<std::string> caveats;
};

Classification classify(const ReducedEquation& eq, const AnsatzSpace& space = {});

struct BoundsVerdict {
  bool ok = true;
  std::vector<std::string> violations;
};

/// dim <= 4, k0 = 1, k1 <= 1, k2 <= 2, and dim = k0 + k1 + k2.
BoundsVerdict signature_bounds_check(const SymmetryAlgebra& alg);

}  // namespace linevo
