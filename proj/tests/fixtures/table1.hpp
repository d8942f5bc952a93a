#pragma once

// Representatives of every classification case for r = 3, 4, 5.

#include <string>
#include <vector>

#include "linevo/model.hpp"
#include "linevo/symkernel.hpp"

namespace fixtures {

struct CaseFixture {
  std::string label;
  linevo::ReducedEquation eq;
  linevo::Signature signature;
};

inline std::vector<CaseFixture> table1(int r) {
  using linevo::Expr;
  using linevo::parse_expr;
  const Expr t = Expr::symbol("t"), x = Expr::symbol("x");
  auto tuple = [&](auto&& f) {
    std::vector<Expr> A;
    for (int l = 0; l <= r - 2; ++l) A.push_back(f(l));
    return linevo::ReducedEquation{r, A};
  };
  std::vector<CaseFixture> out;
  // generic: time and space dependent, no extension
  out.push_back({"0", tuple([&](int l) {
                   return l == 0 ? t * x * x * x + x : l == 1 ? x * x + t : Expr();
                 }),
                 {1, 0, 0}});
  out.push_back({"1", tuple([&](int l) { return l == 0 ? x * x : l == 1 ? x * x * x : Expr(); }), {1, 0, 1}});
  out.push_back({"2", tuple([&](int l) { return linevo::pow(x, static_cast<long>(l - r)); }), {1, 0, 2}});
  out.push_back({"3", tuple([&](int l) { return l == 0 ? t * x : t; }), {1, 1, 0}});
  out.push_back({"4a", tuple([&](int l) { return l == 0 ? x : Expr(1); }), {1, 1, 1}});
  out.push_back({"4b", tuple([&](int l) { return l == 0 ? x : l == 1 ? -x : Expr(1); }), {1, 1, 1}});
  out.push_back({"5", tuple([&](int) { return Expr(); }), {1, 1, 2}});
  return out;
}

}  // namespace fixtures
