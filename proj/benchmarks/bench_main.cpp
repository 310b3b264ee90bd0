#include <benchmark/benchmark.h>

#include <numbers>

#include "penalab/asymptotics.hpp"
#include "penalab/radial.hpp"

namespace {

using namespace penalab;

GridPtr square_grid(int n) {
  return build_grid(DomainSpec::rectangle(0.0, std::numbers::pi, 0.0, std::numbers::pi), n);
}

void BM_Assemble2D(benchmark::State& state) {
  auto grid = square_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto op = DivFormOperator::assemble(grid, CoeffField::bump(grid->domain()));
    benchmark::DoNotOptimize(op.diag(0));
  }
}
BENCHMARK(BM_Assemble2D)->Arg(65)->Arg(129);

void BM_CgPoisson2D(benchmark::State& state) {
  auto grid = square_grid(static_cast<int>(state.range(0)));
  auto op = DivFormOperator::assemble(grid, CoeffField::identity());
  ScalarField rhs = ScalarField::from_function(
      grid, [](double x, double y) { return std::sin(x) * std::sin(y); });
  for (auto _ : state) {
    auto sol = solve_linear(op, rhs, 1e-10);
    benchmark::DoNotOptimize(sol.x[0]);
  }
}
BENCHMARK(BM_CgPoisson2D)->Arg(65)->Arg(129);

void BM_GradPenalizedEnergy(benchmark::State& state) {
  auto grid = square_grid(65);
  auto op = DivFormOperator::assemble(grid, CoeffField::identity());
  EnergyFunctional F(op, ProblemParams{8.0, 4.0, static_cast<double>(state.range(0))});
  ScalarField v = ScalarField::from_function(
      grid, [](double x, double y) { return 0.9 * std::sin(x) * std::sin(y); });
  for (auto _ : state) {
    ScalarField g = F.gradient(v);
    benchmark::DoNotOptimize(g[0]);
  }
}
BENCHMARK(BM_GradPenalizedEnergy)->Arg(16)->Arg(128)->Arg(1024);

void BM_PsorSweeps(benchmark::State& state) {
  auto grid = build_grid(DomainSpec::interval(0.0, std::numbers::pi), 401);
  auto op = DivFormOperator::assemble(grid, CoeffField::identity());
  std::vector<double> rhs(op.size(), 1.0);
  for (auto _ : state) {
    std::vector<double> u(op.size(), 0.0);
    auto res = psor_box_solve(op, rhs, 0.0, 1.0, u, 1.5, 1e-10, 20000);
    benchmark::DoNotOptimize(res.sweeps);
  }
}
BENCHMARK(BM_PsorSweeps);

void BM_RadialShoot(benchmark::State& state) {
  for (auto _ : state) {
    RadialProfile prof = shoot(4.0, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(prof.U0);
  }
}
BENCHMARK(BM_RadialShoot)->Arg(1)->Arg(2)->Arg(3);

} // namespace

BENCHMARK_MAIN();
