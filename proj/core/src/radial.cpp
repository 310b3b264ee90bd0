#include "penalab/radial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace penalab {

namespace {

// State (V, V', int V'^2 s^{N-1} ds, int |V|^p s^{N-1} ds).
using State = std::array<double, 4>;

struct Ode {
  double p;
  int N;

  State rhs(double r, const State& y) const {
    const double V = y[0], W = y[1];
    const double pw = V >= 0.0 ? std::pow(V, p - 1.0) : -std::pow(-V, p - 1.0);
    // At the origin the symmetric limit gives V'' = -V^{p-1}/N.
    const double Wp = r > 0.0 ? -pw - (N - 1) / r * W : -pw / N;
    const double rn = std::pow(r, N - 1);
    return {W, Wp, W * W * rn, std::pow(std::fabs(V), p) * rn};
  }
};

State axpy(const State& a, double c, const State& b) {
  return {a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2], a[3] + c * b[3]};
}

State rk4_step(const Ode& ode, double r, const State& y, double h) {
  const State k1 = ode.rhs(r, y);
  const State k2 = ode.rhs(r + 0.5 * h, axpy(y, 0.5 * h, k1));
  const State k3 = ode.rhs(r + 0.5 * h, axpy(y, 0.5 * h, k2));
  const State k4 = ode.rhs(r + h, axpy(y, h, k3));
  State out = y;
  for (int i = 0; i < 4; ++i)
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

State rk4_integrate(const Ode& ode, double r0, const State& y0, double r1, int substeps) {
  if (r1 == r0) return y0;
  State y = y0;
  const double h = (r1 - r0) / substeps;
  for (int i = 0; i < substeps; ++i) y = rk4_step(ode, r0 + i * h, y, h);
  return y;
}

// Dormand-Prince 5(4) coefficients.
struct Dp45 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

struct DpStep {
  State y;
  double err;
};

DpStep dp45_step(const Ode& ode, double r, const State& y, double h) {
  using D = Dp45;
  const State k1 = ode.rhs(r, y);
  const State k2 = ode.rhs(r + D::c2 * h, axpy(y, h * D::a21, k1));
  State t = y;
  for (int i = 0; i < 4; ++i) t[i] += h * (D::a31 * k1[i] + D::a32 * k2[i]);
  const State k3 = ode.rhs(r + D::c3 * h, t);
  t = y;
  for (int i = 0; i < 4; ++i) t[i] += h * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
  const State k4 = ode.rhs(r + D::c4 * h, t);
  t = y;
  for (int i = 0; i < 4; ++i)
    t[i] += h * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] + D::a54 * k4[i]);
  const State k5 = ode.rhs(r + D::c5 * h, t);
  t = y;
  for (int i = 0; i < 4; ++i)
    t[i] += h * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] + D::a64 * k4[i] +
                 D::a65 * k5[i]);
  const State k6 = ode.rhs(r + h, t);
  State y5 = y;
  for (int i = 0; i < 4; ++i)
    y5[i] += h * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] + D::b5 * k5[i] + D::b6 * k6[i]);
  const State k7 = ode.rhs(r + h, y5);
  double err = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double e = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] +
                          D::e6 * k6[i] + D::e7 * k7[i]);
    const double sc = 1e-14 + 1e-12 * std::max(std::fabs(y[i]), std::fabs(y5[i]));
    err = std::max(err, std::fabs(e) / sc);
  }
  return {y5, err};
}

// Series start off the singular origin: V = 1 - r^2/(2N) + a4 r^4 + O(r^6).
State series_state(double p, int N, double r) {
  const double a4 = (p - 1.0) / (8.0 * N * (N + 2.0));
  State y;
  y[0] = 1.0 - r * r / (2.0 * N) + a4 * r * r * r * r;
  y[1] = -r / N + 4.0 * a4 * r * r * r;
  // Leading quadrature terms; the neglected remainder is O(r^{N+4}).
  y[2] = std::pow(r, N + 2) / (N * N * (N + 2.0));
  y[3] = std::pow(r, N) / N - p * std::pow(r, N + 2) / (2.0 * N * (N + 2.0));
  return y;
}

struct TrajPoint {
  double r;
  State y;
};

double hermite(double ra, const State& ya, double rb, const State& yb, double r) {
  const double h = rb - ra;
  const double t = (r - ra) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * ya[0] + h10 * h * ya[1] + h01 * yb[0] + h11 * h * yb[1];
}

} // namespace

RadialProfile shoot(double p, int N, double ode_tol, double r_max, int n_samples) {
  if (!(p > 2.0)) throw std::invalid_argument("shoot: need p > 2");
  if (N < 1) throw std::invalid_argument("shoot: need N >= 1");
  if (N >= 3 && !(p < 2.0 * N / (N - 2.0)))
    throw std::invalid_argument("shoot: p at or beyond the critical exponent, no unit-ball profile");

  const Ode ode{p, N};
  const double r_start = 1e-3;
  std::vector<TrajPoint> traj;
  traj.push_back({r_start, series_state(p, N, r_start)});
  double r = r_start;
  State y = traj.back().y;
  double h = 1e-4;

  bool bracketed = false;
  while (r < r_max) {
    h = std::min(h, std::max(0.05, 0.05 * r)); // log-uniform cap in the far field
    DpStep s = dp45_step(ode, r, y, h);
    if (s.err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(s.err, -0.2));
      continue;
    }
    r += h;
    y = s.y;
    traj.push_back({r, y});
    if (s.err > 0.0) h *= std::min(5.0, 0.9 * std::pow(s.err, -0.2));
    if (y[0] <= 0.0) {
      bracketed = true;
      break;
    }
  }
  if (!bracketed) throw std::runtime_error("shoot: no zero found before r_max");

  // Bisection with mini-integrations from the last strictly positive state.
  const TrajPoint& last_pos = traj[traj.size() - 2];
  double lo = last_pos.r, hi = r;
  for (int it = 0; it < 200 && hi - lo > 0.25 * std::min(ode_tol, 1e-12) * std::max(1.0, hi);
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const State ym = rk4_integrate(ode, last_pos.r, last_pos.y, mid, 8);
    if (ym[0] > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double r0 = 0.5 * (lo + hi);
  const State y_end = rk4_integrate(ode, last_pos.r, last_pos.y, r0, 16);

  RadialProfile prof;
  prof.p = p;
  prof.N = N;
  prof.r0 = r0;
  prof.U0 = std::pow(r0, 2.0 / (p - 2.0));

  const double omega = N == 1 ? 2.0 : (N == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi);
  const double c = prof.U0;
  // U(r) = c V(r0 r): the ball integrals reduce to the shot quadratures.
  prof.energy = omega * c * c * std::pow(r0, 2.0 - N) * y_end[2];
  prof.lp_mass = omega * std::pow(c, p) * std::pow(r0, -N) * y_end[3];

  prof.samples.resize(n_samples);
  prof.samples[0] = {0.0, c};
  prof.samples[n_samples - 1] = {1.0, 0.0};
  if (r0 <= 64.0) {
    // Fixed fine re-integration keeps the uniform table collocation-grade.
    State ys = series_state(p, N, r_start);
    double rs = r_start;
    for (int j = 1; j + 1 < n_samples; ++j) {
      const double target = r0 * j / (n_samples - 1);
      if (target <= r_start) {
        const State st = series_state(p, N, target);
        prof.samples[j] = {static_cast<double>(j) / (n_samples - 1), c * st[0]};
        continue;
      }
      ys = rk4_integrate(ode, rs, ys, target, 8);
      rs = target;
      prof.samples[j] = {static_cast<double>(j) / (n_samples - 1), c * ys[0]};
    }
  } else {
    // Far-field profiles are sampled from the stored trajectory.
    std::size_t seg = 0;
    for (int j = 1; j + 1 < n_samples; ++j) {
      const double target = r0 * j / (n_samples - 1);
      if (target <= r_start) {
        const State st = series_state(p, N, target);
        prof.samples[j] = {static_cast<double>(j) / (n_samples - 1), c * st[0]};
        continue;
      }
      while (seg + 2 < traj.size() && traj[seg + 1].r < target) ++seg;
      const double v = hermite(traj[seg].r, traj[seg].y, traj[seg + 1].r, traj[seg + 1].y, target);
      prof.samples[j] = {static_cast<double>(j) / (n_samples - 1), c * v};
    }
  }

  for (int j = 0; j + 1 < n_samples; ++j)
    if (prof.samples[j][1] < prof.samples[j + 1][1] - 1e-9 * std::max(1.0, c))
      throw std::runtime_error("shoot: profile is not decreasing");
  return prof;
}

double max_pde_residual(const RadialProfile& prof) {
  const int n = static_cast<int>(prof.samples.size());
  const double dr = 1.0 / (n - 1);
  double worst = 0.0;
  // Five-point stencils; keep clear of the center and the boundary.
  for (int j = 2; j + 2 < n; ++j) {
    const double r = prof.samples[j][0];
    if (r < 0.02 || r > 0.98) continue;
    const double um2 = prof.samples[j - 2][1], um1 = prof.samples[j - 1][1],
                 u0 = prof.samples[j][1], up1 = prof.samples[j + 1][1],
                 up2 = prof.samples[j + 2][1];
    const double d1 = (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * dr);
    const double d2 = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * dr * dr);
    const double res = d2 + (prof.N - 1) / r * d1 + std::pow(u0, prof.p - 1.0);
    worst = std::max(worst, std::fabs(res));
  }
  return worst;
}

double max_scaled_residual(const RadialProfile& prof, double lambda, double R) {
  // U_{lambda,R}(s) = k U(s/R), k = (1/(lambda R^2))^{1/(p-2)}; collocate on s in (0, R).
  const int n = static_cast<int>(prof.samples.size());
  const double k = std::pow(1.0 / (lambda * R * R), 1.0 / (prof.p - 2.0));
  const double ds = R / (n - 1);
  double worst = 0.0;
  for (int j = 2; j + 2 < n; ++j) {
    const double s = prof.samples[j][0] * R;
    if (s < 0.02 * R || s > 0.98 * R) continue;
    const double um2 = k * prof.samples[j - 2][1], um1 = k * prof.samples[j - 1][1],
                 u0 = k * prof.samples[j][1], up1 = k * prof.samples[j + 1][1],
                 up2 = k * prof.samples[j + 2][1];
    const double d1 = (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * ds);
    const double d2 = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * ds * ds);
    const double res = d2 + (prof.N - 1) / s * d1 + lambda * std::pow(u0, prof.p - 1.0);
    worst = std::max(worst, std::fabs(res));
  }
  return worst;
}

double Lambda_ball_eigenfunction(double p, int N) {
  // Principal Dirichlet eigenfunction of the unit ball, normalized to 1 at
  // the center: cos(pi r / 2), J_0(j01 r), sin(pi r)/(pi r).
  const double pi = std::numbers::pi;
  const double j01 = 2.404825557695772768622;
  auto phi = [&](double r) -> double {
    if (N == 1) return std::cos(0.5 * pi * r);
    if (N == 2) return std::cyl_bessel_j(0.0, j01 * r);
    return r < 1e-8 ? 1.0 - (pi * r) * (pi * r) / 6.0 : std::sin(pi * r) / (pi * r);
  };
  auto dphi = [&](double r) -> double {
    if (N == 1) return -0.5 * pi * std::sin(0.5 * pi * r);
    if (N == 2) return -j01 * std::cyl_bessel_j(1.0, j01 * r);
    if (r < 1e-8) return -pi * pi * r / 3.0;
    return (pi * r * std::cos(pi * r) - std::sin(pi * r)) / (pi * r * r);
  };
  // Composite Simpson for the radial integrals.
  const int n = 4001;
  const double dr = 1.0 / (n - 1);
  double grad2 = 0.0, pmass = 0.0;
  for (int j = 0; j < n; ++j) {
    const double r = j * dr;
    const double w = (j == 0 || j == n - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    const double rn = std::pow(r, N - 1);
    const double d = dphi(r);
    grad2 += w * d * d * rn;
    pmass += w * std::pow(std::fabs(phi(r)), p) * rn;
  }
  grad2 *= dr / 3.0;
  pmass *= dr / 3.0;
  // The surface factor cancels in the ratio; sup phi = 1.
  return 0.5 * p * grad2 / pmass;
}

GzConditionReport check_gz_conditions(double p, int N, double lambda, double R, double ode_tol) {
  RadialProfile prof = shoot(p, N, ode_tol);
  GzConditionReport rep;
  rep.p = p;
  rep.N = N;
  rep.lambda = lambda;
  rep.R = R;
  rep.U0 = prof.U0;
  rep.u0_pow = std::pow(prof.U0, p - 2.0);
  rep.cond_b_value = std::pow(1.0 / (lambda * R * R), 1.0 / (p - 2.0)) * prof.U0;
  rep.cond_b = rep.cond_b_value > 1.0;
  rep.Lambda_U = 0.5 * p * prof.energy * std::pow(prof.U0, p - 2.0) / prof.lp_mass;
  rep.Lambda_U_identity = 0.5 * p * rep.u0_pow;

  GzCandidate cu;
  cu.name = "profile";
  cu.Lambda = rep.Lambda_U;
  cu.interval_nonempty = cu.Lambda < rep.u0_pow;
  rep.candidates.push_back(cu);

  GzCandidate c1;
  c1.name = "phi1";
  c1.Lambda = Lambda_ball_eigenfunction(p, N);
  c1.interval_nonempty = c1.Lambda < rep.u0_pow;
  rep.candidates.push_back(c1);
  return rep;
}

double infinity_limit_norm(double p, double lambda, int N, double ode_tol) {
  RadialProfile prof = shoot(p, N, ode_tol);
  return std::pow(lambda, -1.0 / (p - 2.0)) * prof.U0;
}

} // namespace penalab
