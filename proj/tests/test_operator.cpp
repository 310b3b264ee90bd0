#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "penalab/krylov.hpp"
#include "penalab/minimize.hpp"
#include "penalab/operator.hpp"

using namespace penalab;

namespace {
const double pi = std::numbers::pi;

ScalarField random_field(GridPtr g, std::uint64_t seed) {
  auto seq = uniform_sequence(seed, g->num_interior());
  ScalarField f(g);
  for (int k = 0; k < f.size(); ++k) f[k] = seq[k] - 0.5;
  return f;
}
} // namespace

TEST_CASE("one-node toy assembles to the 1x1 matrix [2]") {
  auto g = build_grid(DomainSpec::interval(0.0, 2.0), 3);
  auto op = DivFormOperator::assemble(g, CoeffField::identity());
  CHECK(op.size() == 1);
  CHECK(op.diag(0) == doctest::Approx(2.0).epsilon(1e-15));
  ScalarField v(g);
  v[0] = 1.3;
  CHECK(op.apply(v)[0] == doctest::Approx(2.6).epsilon(1e-15));
}

TEST_CASE("identity coefficient: quadratic form equals the h1 seminorm") {
  for (auto g : {build_grid(DomainSpec::interval(0.0, pi), 64),
                 build_grid(DomainSpec::disk(0.0, 0.0, 1.0), 41)}) {
    auto op = DivFormOperator::assemble(g, CoeffField::identity());
    ScalarField f = random_field(g, 17);
    CHECK(op.quadratic_form(f) == doctest::Approx(h1_seminorm_sq(f)).epsilon(1e-13));
  }
}

TEST_CASE("doubling the coefficient doubles the matrix") {
  auto g = build_grid(DomainSpec::interval(0.0, pi), 33);
  auto a1 = DivFormOperator::assemble(g, CoeffField::identity());
  auto a2 = DivFormOperator::assemble(g, CoeffField::scaled_identity(2.0));
  ScalarField f = random_field(g, 3);
  ScalarField y1 = a1.apply(f), y2 = a2.apply(f);
  for (int k = 0; k < f.size(); ++k) CHECK(y2[k] == doctest::Approx(2.0 * y1[k]).epsilon(1e-14));
}

TEST_CASE("apply on zero field vanishes and grid mismatch throws") {
  auto g = build_grid(DomainSpec::interval(0.0, pi), 33);
  auto other = build_grid(DomainSpec::interval(0.0, pi), 33);
  auto op = DivFormOperator::assemble(g, CoeffField::identity());
  ScalarField z(g);
  ScalarField az = op.apply(z);
  for (int k = 0; k < az.size(); ++k) CHECK(az[k] == 0.0);
  CHECK_THROWS(op.apply(ScalarField(other)));
}

TEST_CASE("symmetry and coercivity of the assembled form") {
  auto g = build_grid(DomainSpec::disk(0.0, 0.0, 1.0), 33);
  auto op = DivFormOperator::assemble(g, CoeffField::bump(g->domain()));
  ScalarField u = random_field(g, 5), v = random_field(g, 6);
  const double uav = dot(u, op.apply(v)), vau = dot(v, op.apply(u));
  CHECK(std::fabs(uav - vau) <= 1e-12 * std::max(std::fabs(uav), 1.0));
  CHECK(op.quadratic_form(u) > 0.0);
  ScalarField z(g);
  CHECK(op.quadratic_form(z) == 0.0);
  // Ellipticity envelope of the assembled form.
  CHECK(op.quadratic_form(u) >= op.coeff().alpha() * h1_seminorm_sq(u) * (1 - 1e-12));
  CHECK(op.quadratic_form(u) <= op.coeff().beta() * h1_seminorm_sq(u) * (1 + 1e-12));
}

TEST_CASE("assembly rejects bad coefficients") {
  auto g = build_grid(DomainSpec::interval(0.0, 1.0), 9);
  CHECK_THROWS(CoeffField::aniso(-1.0, 1.0));
  CHECK_THROWS(DivFormOperator::assemble(
      g, CoeffField::scalar_fn([](double, double) { return -1.0; }, 1.0, 2.0)));
  CHECK_THROWS(DivFormOperator::assemble(
      g, CoeffField::scalar_fn([](double, double) { return 5.0; }, 1.0, 2.0)));
}

TEST_CASE("cg recovers a manufactured solution and handles zero rhs") {
  auto g = build_grid(DomainSpec::interval(0.0, pi), 101);
  auto op = DivFormOperator::assemble(g, CoeffField::bump(g->domain()));
  ScalarField f = random_field(g, 11);
  ScalarField rhs = op.apply(f);
  auto sol = solve_linear(op, rhs, 1e-12);
  CHECK(sol.converged);
  CHECK(linf_distance(sol.x, f) < 1e-9);

  auto zero = solve_linear(op, ScalarField(g), 1e-12);
  CHECK(zero.converged);
  CHECK(lp_norm(zero.x, 2.0) == 0.0);
}

TEST_CASE("poisson closed form x(1-x)/2") {
  auto g = build_grid(DomainSpec::interval(0.0, 1.0), 81);
  auto op = DivFormOperator::assemble(g, CoeffField::identity());
  ScalarField rhs(g, g->cell_volume()); // f == 1, volume weighted
  auto sol = solve_linear(op, rhs, 1e-12);
  ScalarField exact =
      ScalarField::from_function(g, [](double x, double) { return 0.5 * x * (1.0 - x); });
  CHECK(linf_distance(sol.x, exact) < 1e-10); // the stencil is exact for quadratics
}

TEST_CASE("iteration cap reports the achieved residual") {
  auto g = build_grid(DomainSpec::interval(0.0, pi), 201);
  auto op = DivFormOperator::assemble(g, CoeffField::identity());
  ScalarField rhs = random_field(g, 23);
  auto sol = solve_linear(op, rhs, 1e-14, 3);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 3);
  CHECK(sol.rel_residual > 0.0);
}

TEST_CASE("principal eigenpair of the 1d laplacian matches the stencil eigenvalue") {
  for (int n : {51, 101}) {
    auto g = build_grid(DomainSpec::interval(0.0, pi), n);
    auto op = DivFormOperator::assemble(g, CoeffField::identity());
    EigenPair ep = principal_eigenpair(op);
    const double h = g->h(0);
    const double exact = 2.0 / (h * h) * (1.0 - std::cos(h));
    CHECK(ep.lambda1 == doctest::Approx(exact).epsilon(1e-8));
    CHECK(lp_norm(ep.phi1, std::numeric_limits<double>::infinity()) == doctest::Approx(1.0));
    CHECK(ep.phi1.min() >= -1e-10);
    // residual check || A phi - lambda M phi || <= 1e-8 || M phi ||
    ScalarField aphi = op.apply(ep.phi1);
    double r2 = 0.0, m2 = 0.0;
    for (int k = 0; k < aphi.size(); ++k) {
      const double mk = g->cell_volume() * ep.phi1[k];
      r2 += (aphi[k] - ep.lambda1 * mk) * (aphi[k] - ep.lambda1 * mk);
      m2 += mk * mk;
    }
    CHECK(std::sqrt(r2) <= 1e-8 * std::sqrt(m2));
  }
}

TEST_CASE("eigenvalue scales linearly in the coefficient") {
  auto g = build_grid(DomainSpec::interval(0.0, pi), 41);
  auto op1 = DivFormOperator::assemble(g, CoeffField::identity());
  auto opc = DivFormOperator::assemble(g, CoeffField::scaled_identity(3.5));
  EigenPair e1 = principal_eigenpair(op1);
  EigenPair ec = principal_eigenpair(opc);
  CHECK(ec.lambda1 == doctest::Approx(3.5 * e1.lambda1).epsilon(1e-9));
  CHECK(linf_distance(e1.phi1, ec.phi1) < 1e-7);
}

TEST_CASE("minres solves an indefinite diagonal system") {
  const std::size_t n = 40;
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = i < 4 ? -2.0 - double(i) : 1.0 + double(i);
  std::vector<double> b(n, 1.0), x;
  auto r = minres_solve(
      n, [&](const double* in, double* out) { for (std::size_t i = 0; i < n; ++i) out[i] = diag[i] * in[i]; },
      b, x, 1e-12, 400);
  CHECK(r.converged);
  for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(1.0 / diag[i]).epsilon(1e-8));
}
