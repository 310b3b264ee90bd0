#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "penalab/mountainpass.hpp"
#include "penalab/radial.hpp"

using namespace penalab;

namespace {
const double pi = std::numbers::pi;

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

MPReport run_toy_mp(double lambda, double p, double m, int n_path = 9) {
  Toy t;
  EnergyFunctional F(t.op, ProblemParams{lambda, p, m});
  ScalarField phi1(t.grid, 1.0);
  ScalarField endpoint = initial_guess(F, phi1).field;
  return mountain_pass(F, endpoint, n_path);
}
} // namespace

TEST_CASE("minimax geometry constants") {
  Toy t;
  // With the one-node profile the embedding ratio is exactly 1/2, so the
  // ridge radius caps at 1 for lambda <= 2.
  EnergyFunctional F(t.op, ProblemParams{1.9, 4.0, 10.0});
  ScalarField phi1(t.grid, 1.0);
  GeometryReport geo = mp_geometry(F, phi1);
  CHECK(geo.sobolev_S == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(geo.r_lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(geo.rho_m_lambda == doctest::Approx(1.0 / (10.0 * 512.0)).epsilon(1e-12));
  CHECK(geo.endpoint_norm > geo.r_lambda);
  CHECK(geo.geometry_ok);

  // rho decays to zero in m at a fixed subunit radius
  EnergyFunctional F8(t.op, ProblemParams{8.0, 4.0, 10.0});
  double prev = std::numeric_limits<double>::infinity();
  for (double m : {10.0, 20.0, 40.0}) {
    GeometryReport gm = mp_geometry(F8.with_m(m), phi1);
    CHECK(gm.r_lambda < 1.0);
    CHECK(gm.rho_m_lambda < prev);
    prev = gm.rho_m_lambda;
  }
}

TEST_CASE("one-node minimax point matches the scalar ridge oracle") {
  const double z_star = bisect([](double v) { return toy_grad(v, 5, 4, 10); }, 0.3, 1.0);
  const double c_star = toy_energy(z_star, 5, 4, 10);
  CHECK(z_star == doctest::Approx(0.6375).epsilon(1e-3));
  CHECK(c_star == doctest::Approx(0.2011).epsilon(1e-3));

  MPReport rep = run_toy_mp(5.0, 4.0, 10.0);
  CHECK(rep.converged);
  CHECK_FALSE(rep.collapsed);
  CHECK(rep.solution[0] == doctest::Approx(z_star).epsilon(1e-8));
  CHECK(rep.level == doctest::Approx(c_star).epsilon(1e-10));
  CHECK(rep.level >= 0.0);

  // distinct from the global minimizer, which sits at the larger root
  const double u_star = bisect([](double v) { return toy_grad(v, 5, 4, 10); }, 1.0, 2.0);
  CHECK(std::fabs(z_star - u_star) == doctest::Approx(0.607).epsilon(2e-2));
  CHECK(rep.level > toy_energy(u_star, 5, 4, 10));
}

TEST_CASE("deformation history is nonincreasing") {
  MPReport rep = run_toy_mp(5.0, 4.0, 10.0, 17);
  for (std::size_t i = 0; i + 1 < rep.history.size(); ++i)
    CHECK(rep.history[i + 1].max_level <=
          rep.history[i].max_level + 1e-11 * (1.0 + std::fabs(rep.history[i].max_level)));
}

TEST_CASE("limit floor is positive and sits below the minimax levels") {
  Toy t;
  EnergyFunctional F(t.op, ProblemParams{5.0, 4.0, 10.0});
  const double floor = mp_limit_floor(F);
  CHECK(floor == doctest::Approx(0.1).epsilon(1e-9)); // measured constants are exact here
  CHECK(floor > 0.0);

  // the one-dof limit ridge value is 0.2; levels decrease toward it in m
  double prev = std::numeric_limits<double>::infinity();
  for (double m : {10.0, 20.0, 40.0}) {
    MPReport rep = run_toy_mp(5.0, 4.0, m);
    CHECK(rep.converged);
    CHECK(rep.level >= floor - 1e-6);
    CHECK(rep.level >= 0.2 - 1e-10);
    CHECK(rep.level < prev);
    prev = rep.level;
    // scalar oracle for the same exponent
    const double z_m = bisect([m](double v) { return toy_grad(v, 5, 4, m); }, 0.3, 1.0);
    CHECK(rep.solution[0] == doctest::Approx(z_m).epsilon(1e-7));
  }
  CHECK(prev == doctest::Approx(0.2).epsilon(5e-2));
}

TEST_CASE("the penalized energy dominates the limit energy") {
  auto g = build_grid(DomainSpec::interval(0.0, pi), 51);
  auto op = DivFormOperator::assemble(g, CoeffField::identity());
  EnergyFunctional Fm(op, ProblemParams{3.0, 4.0, 12.0});
  for (std::uint64_t seed = 60; seed < 66; ++seed) {
    auto seq = uniform_sequence(seed, g->num_interior());
    ScalarField v(g);
    for (int k = 0; k < v.size(); ++k) v[k] = 2.0 * seq[k] - 0.5;
    CHECK(Fm.value(v) >= Fm.value_inf(v));
  }
}

TEST_CASE("invalid minimax inputs are rejected") {
  Toy t;
  EnergyFunctional F(t.op, ProblemParams{5.0, 4.0, 10.0});
  CHECK_THROWS(mountain_pass(F, t.at(0.2), 9));  // positive level endpoint
  CHECK_THROWS(mountain_pass(F, t.at(1.16), 4)); // too few path points
  EnergyFunctional Finf(t.op, ProblemParams{5.0, 4.0, std::numeric_limits<double>::infinity()});
  CHECK_THROWS(mountain_pass(Finf, t.at(1.16), 9));
  CHECK_THROWS(mp_geometry(Finf, t.at(1.0)));
}

TEST_CASE("interval ridge solution approaches the scaled radial profile") {
  auto g = build_grid(DomainSpec::interval(0.0, pi), 201);
  auto op = DivFormOperator::assemble(g, CoeffField::identity());
  EnergyFunctional F(op, ProblemParams{3.0, 4.0, 32.0});
  EigenPair ep = principal_eigenpair(op);
  ScalarField endpoint = initial_guess(F, ep.phi1).field;
  MPReport rep = mountain_pass(F, endpoint, 33);
  CHECK(rep.converged);
  CHECK(rep.level > 0.0);
  CHECK(rep.level >= rep.level_floor - 1e-6);

  // The limit stationarity system on (0, pi) is solved by the scaled
  // unit-interval profile; at m = 32 the penalty correction is negligible.
  RadialProfile prof = shoot(4.0, 1);
  const double R = pi / 2.0;
  const double zmax = std::pow(1.0 / (3.0 * R * R), 0.5) * prof.U0;
  CHECK(lp_norm(rep.solution, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(zmax).epsilon(2e-3));

  // the reported level matches the final path maximum up to path resolution
  double path_max = -1e300;
  for (const auto& f : rep.path) path_max = std::max(path_max, F.value(f));
  CHECK(rep.level == doctest::Approx(path_max).epsilon(1e-3));

  CHECK(check_apriori(F, rep.solution).all_pass);
}
