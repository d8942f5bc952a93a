#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "linevo/expr.hpp"
#include "linevo/rational.hpp"

namespace linevo {

/// Dense matrix over Q.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  void append_row(const std::vector<Rational>& row);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> a_;
};

struct Rref {
  RationalMatrix m;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

Rref rref(RationalMatrix m);
std::size_t rank(const RationalMatrix& m);
/// Basis of {v : m v = 0}, one vector per free column, in free-column order.
std::vector<std::vector<Rational>> nullspace(const RationalMatrix& m);
/// Some solution of m v = b (free variables zero), or nothing.
std::optional<std::vector<Rational>> solve(const RationalMatrix& m, const std::vector<Rational>& b);

/// Coordinates of each expression (one column per expression) over the
/// monomials of their common-denominator numerators. Two families of
/// expressions span the same Q-space iff the column spaces agree.
RationalMatrix collect_coordinates(const std::vector<Expr>& exprs);

/// Rank over Q of a list of expressions.
std::size_t expr_rank(const std::vector<Expr>& exprs);

}  // namespace linevo
