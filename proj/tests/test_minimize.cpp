#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "penalab/minimize.hpp"
#include "penalab/obstacle.hpp"

using namespace penalab;

namespace {
const double pi = std::numbers::pi;

// Independent scalar oracle for the one-node problem: bisection on the
// stationarity polynomial evaluated directly.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi), fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double toy_grad(double v, double lambda, double p, double m) {
  return 2.0 * v + std::pow(v, m - 1.0) - lambda * std::pow(v, p - 1.0);
}

double toy_energy(double v, double lambda, double p, double m) {
  return v * v + std::pow(v, m) / m - lambda / p * std::pow(v, p);
}

struct Toy {
  GridPtr grid = build_grid(DomainSpec::interval(0.0, 2.0), 3);
  DivFormOperator op = DivFormOperator::assemble(grid, CoeffField::identity());
  ScalarField at(double v) const {
    ScalarField f(grid);
    f[0] = v;
    return f;
  }
};
} // namespace

TEST_CASE("one-node minimizer matches the scalar root oracle") {
  Toy t;
  EnergyFunctional F(t.op, ProblemParams{5.0, 4.0, 10.0});
  const double u_star = bisect([](double v) { return toy_grad(v, 5, 4, 10); }, 1.0, 2.0);
  const double level_star = toy_energy(u_star, 5, 4, 10);
  CHECK(u_star == doctest::Approx(1.2442).epsilon(1e-3));
  CHECK(level_star == doctest::Approx(-0.5585).epsilon(1e-3));

  ScalarField phi1(t.grid, 1.0);
  SolveReport rep = minimize_jm(F, initial_guess(F, phi1).field);
  CHECK(rep.converged);
  CHECK(rep.solution[0] == doctest::Approx(u_star).epsilon(1e-8));
  CHECK(rep.level == doctest::Approx(level_star).epsilon(1e-10));
  CHECK(rep.level == F.value(rep.solution)); // re-evaluated, exact
  CHECK(rep.negativity_certificate <= 0.0);
}

TEST_CASE("small lambda collapses to the zero solution") {
  Toy t;
  EnergyFunctional F(t.op, ProblemParams{1.0, 4.0, 10.0});
  SolveReport rep = minimize_jm(F, t.at(0.3));
  CHECK(rep.converged);
  CHECK(rep.solution[0] <= 1e-8);
  CHECK(rep.level == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("descent history levels never increase") {
  Toy t;
  EnergyFunctional F(t.op, ProblemParams{5.0, 4.0, 10.0});
  SolveReport rep = minimize_jm(F, t.at(2.5));
  for (std::size_t i = 0; i + 1 < rep.history.size(); ++i)
    CHECK(rep.history[i + 1].level <= rep.history[i].level);
}

TEST_CASE("ray start warns when lambda is below the profile threshold") {
  Toy t;
  // Lambda(one-node profile) = 4; a negative level is certified only past it.
  EnergyFunctional F(t.op, ProblemParams{3.5, 4.0, 10.0});
  ScalarField phi1(t.grid, 1.0);
  InitialGuess ig = initial_guess(F, phi1);
  CHECK(ig.lambda_below_threshold);
  CHECK(ig.field[0] > 0.0);
  EnergyFunctional F2(t.op, ProblemParams{5.0, 4.0, 10.0});
  CHECK_FALSE(initial_guess(F2, phi1).lambda_below_threshold);
}

TEST_CASE("interval minimizer satisfies the stationarity system and the bounds") {
  auto g = build_grid(DomainSpec::interval(0.0, pi), 201);
  auto op = DivFormOperator::assemble(g, CoeffField::identity());
  EnergyFunctional F(op, ProblemParams{3.0, 4.0, 16.0});
  EigenPair ep = principal_eigenpair(op);
  InitialGuess ig = initial_guess(F, ep.phi1);
  CHECK_FALSE(ig.lambda_below_threshold); // 3 > Lambda(phi1) ~ 8/3
  SolveReport rep = minimize_jm(F, ig.field);
  CHECK(rep.converged);
  CHECK(rep.level < 0.0);
  CHECK(rep.level <= F.value(ig.field) + 1e-14);
  CHECK(rep.solution.min() >= 0.0);

  // Stationarity residual, recomputed from scratch.
  ScalarField r = F.gradient(rep.solution);
  double rn = 0.0;
  for (int k = 0; k < r.size(); ++k) rn += r[k] * r[k];
  ScalarField g0 = F.gradient(ig.field);
  double rn0 = 0.0;
  for (int k = 0; k < g0.size(); ++k) rn0 += g0[k] * g0[k];
  CHECK(std::sqrt(rn) <= 1e-9 * std::sqrt(rn0) * (1.0 + 1e-9));

  CHECK(check_apriori(F, rep.solution).all_pass);
}

TEST_CASE("one-node box-constrained limit minimizer") {
  Toy t;
  // level -1/4 at the upper bound when the reaction wins; the start sits
  // past the ridge at sqrt(2/5), inside the basin of the global minimizer
  EnergyFunctional f5(t.op, ProblemParams{5.0, 4.0, 10.0});
  SolveReport rep = minimize_jinf_on_K(f5, t.at(0.9));
  CHECK(rep.converged);
  CHECK(rep.solution[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.level == doctest::Approx(-0.25).epsilon(1e-12));

  // small lambda: the limit energy is nonnegative on the box, minimizer 0
  EnergyFunctional f1(t.op, ProblemParams{1.0, 4.0, 10.0});
  SolveReport rep0 = minimize_jinf_on_K(f1, t.at(0.6));
  CHECK(rep0.converged);
  CHECK(rep0.solution[0] <= 1e-9);
}

TEST_CASE("box minimizer stays in the box and satisfies the inequality probes") {
  auto g = build_grid(DomainSpec::interval(0.0, pi), 201);
  auto op = DivFormOperator::assemble(g, CoeffField::identity());
  EnergyFunctional F(op, ProblemParams{3.0, 4.0, 16.0});
  SolveReport rep = minimize_jinf_on_K(F, ScalarField(g, 0.5));
  CHECK(rep.converged);
  CHECK(rep.solution.min() >= 0.0);
  CHECK(rep.solution.max() <= 1.0);
  CHECK(rep.level < 0.0);
  // plateau at the upper bound for this lambda
  CHECK(rep.solution.max() == 1.0);

  auto probes = default_probes(op, 20, 999);
  CHECK(probe_vi(F, rep.solution, probes) >= -1e-8);
  // the self-probe vanishes identically
  std::vector<ScalarField> self{rep.solution};
  CHECK(probe_vi(F, rep.solution, self) == 0.0);
}

TEST_CASE("multistart is deterministic for a fixed seed") {
  Toy t;
  EnergyFunctional F(t.op, ProblemParams{5.0, 4.0, 10.0});
  ScalarField phi1(t.grid, 1.0);
  std::vector<double> levels_a, levels_b;
  SolveReport a = minimize_jm_multistart(F, phi1, 5, 777, {}, 1, &levels_a);
  SolveReport b = minimize_jm_multistart(F, phi1, 5, 777, {}, 1, &levels_b);
  CHECK(a.level == b.level);
  CHECK(levels_a == levels_b);
  CHECK(a.solution[0] == b.solution[0]);
  SolveReport c = minimize_jm_multistart(F, phi1, 5, 778, {}, 2, nullptr);
  CHECK(c.level == doctest::Approx(a.level).epsilon(1e-9));
}

TEST_CASE("worker pool does not change the multistart result") {
  Toy t;
  EnergyFunctional F(t.op, ProblemParams{5.0, 4.0, 10.0});
  ScalarField phi1(t.grid, 1.0);
  std::vector<double> seq_levels, par_levels;
  SolveReport seq = minimize_jm_multistart(F, phi1, 5, 4242, {}, 1, &seq_levels);
  SolveReport par = minimize_jm_multistart(F, phi1, 5, 4242, {}, 3, &par_levels);
  CHECK(seq_levels == par_levels);
  CHECK(seq.level == par.level);
  CHECK(seq.solution[0] == par.solution[0]);
}
