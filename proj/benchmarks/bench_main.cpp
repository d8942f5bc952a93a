#include <benchmark/benchmark.h>

#include "linevo/equivalence.hpp"
#include "linevo/solutions.hpp"
#include "linevo/symmetry.hpp"
#include "linevo/verify.hpp"

using namespace linevo;

namespace {

const Expr t = Expr::symbol("t");
const Expr x = Expr::symbol("x");

ReducedEquation fixture(int r, int which) {
  std::vector<Expr> A(r - 1);
  switch (which) {
    case 0: A[0] = t * x * x * x + x, A[1] = x * x + t; break;   // no extension
    case 1: A[0] = x, A[1] = -x; for (int l = 2; l <= r - 2; ++l) A[l] = Expr(1); break;
    default: break;                                              // u_t = u_r
  }
  return {r, A};
}

}  // namespace

static void BM_Parse(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(parse_expr("exp(t*x + t^4/4)*(x^2 - 3*t)/(1 + t^2)"));
}
BENCHMARK(BM_Parse);

static void BM_Differentiate(benchmark::State& st) {
  Expr e = parse_expr("exp(t*x + t^4/4)*(x^5/60 + t*x^2)");
  for (auto _ : st) benchmark::DoNotOptimize(differentiate(e, "x", 5));
}
BENCHMARK(BM_Differentiate);

// classify by order r and fixture
static void BM_Classify(benchmark::State& st) {
  ReducedEquation eq = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(classify(eq));
}
BENCHMARK(BM_Classify)->ArgsProduct({{3, 4, 5}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

static void BM_SolveSymmetriesByAnsatz(benchmark::State& st) {
  AnsatzSpace sp;
  sp.kmax = static_cast<int>(st.range(0));
  ReducedEquation eq = fixture(4, 1);
  for (auto _ : st) benchmark::DoNotOptimize(solve_symmetries(eq, sp));
  st.counters["unknowns"] = static_cast<double>(3 * sp.functions().size());
}
BENCHMARK(BM_SolveSymmetriesByAnsatz)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);

static void BM_Pushforward(benchmark::State& st) {
  ReducedEquation eq = fixture(static_cast<int>(st.range(0)), 0);
  EquivTransformation tr;
  tr.T = Expr(8) * t + Expr(1);
  tr.X0 = t * t;
  tr.U1 = exp(t);
  for (auto _ : st) benchmark::DoNotOptimize(pushforward_reduced(eq, tr));
}
BENCHMARK(BM_Pushforward)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

static void BM_ResidualNumeric(benchmark::State& st) {
  ReducedEquation eq{3, {x, Expr()}};
  RealFn u = as_function(parse_expr("exp(t*x + t^4/4)"));
  GridSpec g;
  g.max_samples = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(residual_numeric(eq, u, g));
}
BENCHMARK(BM_ResidualNumeric)->RangeMultiplier(2)->Range(4, 16)->Unit(benchmark::kMillisecond);

static void BM_GeneralizedReductionD(benchmark::State& st) {
  ReductionSpec sp;
  sp.lambda = 1;
  sp.N = static_cast<int>(st.range(0));
  ReducedEquation eq = fixture(3, 2);
  for (auto _ : st) benchmark::DoNotOptimize(generalized_reduction(eq, sp));
}
BENCHMARK(BM_GeneralizedReductionD)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_Nonlocal(benchmark::State& st) {
  ReducedEquation eq{3, {x, Expr()}};
  Solution seed;
  seed.expr = parse_expr("exp(t*x + t^4/4)");
  seed.fn = as_function(seed.expr);
  certify(seed, eq);
  for (auto _ : st) benchmark::DoNotOptimize(generate_nonlocal(eq, seed));
}
BENCHMARK(BM_Nonlocal)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_MAIN();
