#include "linevo/linalg.hpp"

#include <map>

#include "linevo/detail/poly.hpp"
#include "linevo/errors.hpp"

namespace linevo {

using namespace detail;

void RationalMatrix::append_row(const std::vector<Rational>& row) {
  if (rows_ == 0 && cols_ == 0) cols_ = row.size();
  if (row.size() != cols_) throw InvariantError("row length mismatch");
  a_.insert(a_.end(), row.begin(), row.end());
  ++rows_;
}

Rref rref(RationalMatrix m) {
  Rref r;
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
    std::size_t p = row;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    Rational inv = 1 / m(row, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    r.pivots.push_back(c);
    ++row;
  }
  r.m = std::move(m);
  return r;
}

std::size_t rank(const RationalMatrix& m) { return rref(m).pivots.size(); }

std::vector<std::vector<Rational>> nullspace(const RationalMatrix& m) {
  Rref r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(m.cols());
    v[f] = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) v[r.pivots[i]] = -r.m(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<std::vector<Rational>> solve(const RationalMatrix& m, const std::vector<Rational>& b) {
  if (b.size() != m.rows()) throw InvariantError("rhs length mismatch");
  RationalMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  Rref r = rref(aug);
  std::vector<Rational> v(m.cols());
  for (std::size_t i = 0; i < r.pivots.size(); ++i) {
    if (r.pivots[i] == m.cols()) return std::nullopt;
    v[r.pivots[i]] = r.m(i, m.cols());
  }
  return v;
}

RationalMatrix collect_coordinates(const std::vector<Expr>& exprs) {
  // Common denominator as an lcm of the denominators.
  Poly den = poly_const(1);
  for (const auto& e : exprs) {
    const Poly& d = e.rep().den;
    if (is_one(d) || compare_poly(d, den) == 0) continue;
    Poly g = poly_gcd(den, d);
    den = poly_mul(den, poly_divide_exact(d, g));
  }
  struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return compare_mono(a, b) > 0; }
  };
  std::map<Monomial, std::size_t, MonoLess> index;
  std::vector<Poly> nums;
  nums.reserve(exprs.size());
  for (const auto& e : exprs) {
    const RatFun& r = e.rep();
    Poly n = r.num;
    if (!is_one(r.den)) n = poly_mul(n, poly_divide_exact(den, r.den));
    else if (!is_one(den)) n = poly_mul(n, den);
    for (const auto& t : n.terms) index.emplace(t.mono, 0);
    nums.push_back(std::move(n));
  }
  std::size_t k = 0;
  for (auto& [m, i] : index) i = k++;
  RationalMatrix mat(index.size(), exprs.size());
  for (std::size_t j = 0; j < nums.size(); ++j)
    for (const auto& t : nums[j].terms) mat(index.at(t.mono), j) = t.coeff;
  return mat;
}

std::size_t expr_rank(const std::vector<Expr>& exprs) {
  if (exprs.empty()) return 0;
  return rank(collect_coordinates(exprs));
}

}  // namespace linevo
