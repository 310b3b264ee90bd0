#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "penalab/radial.hpp"

using namespace penalab;

namespace {
const double pi = std::numbers::pi;

// Energy-integral oracle for the first zero in one dimension with p = 4:
// r0 = sqrt(2) * int_0^1 (1 - v^4)^{-1/2} dv, regularized by v = 1 - t^2.
double r0_oracle_1d_p4() {
  const int n = 20001;
  const double dt = 1.0 / (n - 1);
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    const double t = j * dt;
    const double v = 1.0 - t * t;
    const double w = (j == 0 || j == n - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    s += w * 2.0 / std::sqrt((2.0 - t * t) * (1.0 + v * v));
  }
  return std::sqrt(2.0) * s * dt / 3.0;
}
} // namespace

TEST_CASE("first zero and center value in one dimension") {
  const double r0 = r0_oracle_1d_p4();
  CHECK(r0 == doctest::Approx(1.854074677).epsilon(1e-8));
  RadialProfile prof = shoot(4.0, 1);
  CHECK(prof.r0 == doctest::Approx(r0).epsilon(1e-6));
  CHECK(prof.U0 == doctest::Approx(r0).epsilon(1e-6)); // U0 = r0^{2/(p-2)} = r0
  CHECK(prof.U0 == doctest::Approx(1.85407).epsilon(1e-4));
  CHECK(prof.samples.front()[1] == doctest::Approx(prof.U0));
  CHECK(prof.samples.back()[1] == 0.0);
}

TEST_CASE("energy identity on the unit ball") {
  for (auto [N, p] : {std::pair{1, 4.0}, {2, 6.0}, {3, 4.0}}) {
    RadialProfile prof = shoot(p, N);
    CHECK(std::fabs(prof.energy - prof.lp_mass) <= 1e-8 * std::fabs(prof.lp_mass));
  }
}

TEST_CASE("collocation residual of the sampled profile") {
  for (auto [N, p] : {std::pair{1, 4.0}, {2, 6.0}, {3, 4.0}}) {
    RadialProfile prof = shoot(p, N);
    CHECK(max_pde_residual(prof) <= 1e-8 * std::pow(prof.U0, p - 1.0));
  }
}

TEST_CASE("scaled family solves the lambda-reaction equation") {
  RadialProfile prof = shoot(4.0, 2);
  for (auto [lambda, R] : {std::pair{2.0, 1.5}, {0.5, 3.0}}) {
    const double scale = std::pow(1.0 / (lambda * R * R), 1.0 / 2.0);
    CHECK(max_scaled_residual(prof, lambda, R) <= 1e-8 * (1.0 + lambda * std::pow(scale * prof.U0, 3.0)));
  }
}

TEST_CASE("threshold identity of the profile") {
  for (auto [N, p] : {std::pair{1, 4.0}, {2, 4.0}, {2, 10.0}}) {
    GzConditionReport rep = check_gz_conditions(p, N, 1.0, 1.0);
    CHECK(std::fabs(rep.Lambda_U - rep.Lambda_U_identity) <= 1e-6 * rep.Lambda_U_identity);
    // the profile interval (Lambda(U), U0^{p-2}) is empty since p/2 > 1
    CHECK_FALSE(rep.candidates[0].interval_nonempty);
    CHECK(rep.Lambda_U > rep.u0_pow);
  }
}

TEST_CASE("center-value condition in one dimension at unit scaling") {
  GzConditionReport rep = check_gz_conditions(4.0, 1, 1.0, 1.0);
  CHECK(rep.cond_b_value == doctest::Approx(1.854).epsilon(1e-3));
  CHECK(rep.cond_b);
}

TEST_CASE("ball eigenfunction threshold value in one dimension") {
  // cos profile on (-1,1): (p/2) (pi^2/8) / (3/8) with p = 4
  CHECK(Lambda_ball_eigenfunction(4.0, 1) == doctest::Approx(2.0 * (pi * pi / 8.0) / 0.375).epsilon(1e-8));
  CHECK(Lambda_ball_eigenfunction(4.0, 2) > 0.0);
  CHECK(Lambda_ball_eigenfunction(4.0, 3) > 0.0);
}

TEST_CASE("scaled sup norm is homogeneous in lambda") {
  const double v1 = infinity_limit_norm(6.0, 1.0, 2);
  const double v2 = infinity_limit_norm(6.0, 2.0, 2);
  CHECK(v2 == doctest::Approx(std::pow(2.0, -0.25) * v1).epsilon(1e-12));
}

TEST_CASE("two-dimensional sweep approaches sqrt(e)") {
  // the sweep decreases toward the limit value
  double prev = 1e300;
  double last = 0.0;
  for (double p : {10.0, 20.0, 40.0, 80.0}) {
    const double v = infinity_limit_norm(p, 1.0, 2);
    CHECK(v < prev);
    prev = v;
    last = v;
  }
  CHECK(std::fabs(last - std::sqrt(std::exp(1.0))) <= 0.05);
}

TEST_CASE("three-dimensional blow-up trend toward the critical exponent") {
  double prev = 0.0;
  for (double eps : {0.5, 0.2, 0.1}) {
    const double v = infinity_limit_norm(6.0 - eps, 1.0, 3);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("inadmissible exponents are rejected") {
  CHECK_THROWS(shoot(1.5, 1));
  CHECK_THROWS(shoot(6.0, 3)); // critical: no unit-ball profile
  CHECK_THROWS(shoot(7.0, 3));
  CHECK_THROWS(shoot(4.0, 0));
}

TEST_CASE("center value is stable under the internal resolution") {
  // the first-zero rescaling is exact, so tightening the integration
  // tolerance must leave the center value put
  RadialProfile a = shoot(4.0, 2, 1e-10);
  RadialProfile b = shoot(4.0, 2, 1e-12);
  CHECK(std::fabs(a.U0 - b.U0) <= 1e-9 * a.U0);
  CHECK(a.samples[0][1] == a.U0);
}
