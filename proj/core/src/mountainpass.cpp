#include "penalab/mountainpass.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "penalab/krylov.hpp"

namespace penalab {

namespace {

double xm_norm(const ScalarField& f, double m) {
  double n = std::sqrt(h1_seminorm_sq(f));
  if (std::isfinite(m)) n += lp_norm(f, m);
  return n;
}

double projected_residual_pos(const ScalarField& u, const ScalarField& g) {
  double s = 0.0;
  for (int k = 0; k < u.size(); ++k) {
    const double r = u[k] > 0.0 ? g[k] : std::min(g[k], 0.0);
    s += r * r;
  }
  return std::sqrt(s);
}

} // namespace

double estimate_embedding_constant(GridPtr grid, double p, int iters) {
  DivFormOperator lap = DivFormOperator::assemble(grid, CoeffField::identity());
  const int n = lap.size();
  const double vol = grid->cell_volume();
  ScalarField v(grid, 1.0);
  {
    const double h1 = std::sqrt(h1_seminorm_sq(v));
    for (double& x : v.values()) x /= h1;
  }
  double best = 0.0;
  for (int it = 0; it < iters; ++it) {
    ScalarField rhs(grid);
    for (int k = 0; k < n; ++k) {
      const double t = safe_pow(std::fabs(v[k]), p - 1.0);
      rhs[k] = (v[k] >= 0.0 ? t : -t) * vol;
    }
    auto sol = solve_linear(lap, rhs, 1e-12);
    v = sol.x;
    const double h1 = std::sqrt(h1_seminorm_sq(v));
    if (h1 == 0.0) break;
    for (double& x : v.values()) x /= h1;
    const double ratio = lp_norm(v, p);
    best = std::max(best, ratio * ratio);
  }
  return best;
}

GeometryReport mp_geometry(const EnergyFunctional& F, const ScalarField& psi0) {
  const ProblemParams& prm = F.params();
  if (!prm.m_finite()) throw std::invalid_argument("mp_geometry: needs finite m");
  const int dim = F.grid().dim();
  const double two_star = ProblemParams::two_star(dim);
  if (std::isfinite(two_star) && prm.p > two_star)
    throw std::invalid_argument("mp_geometry: p beyond the critical exponent");

  GeometryReport rep;
  rep.sobolev_S = estimate_embedding_constant(F.op().grid_ptr(), prm.p);
  const double meas = F.grid().measure();
  const double meas_pow =
      std::isfinite(two_star) ? std::pow(meas, 1.0 - prm.p / two_star) : meas;
  const double sp2 = std::pow(rep.sobolev_S, 0.5 * prm.p);
  rep.r_lambda =
      std::min(1.0, std::pow(prm.p / (4.0 * prm.lambda * sp2 * meas_pow), 1.0 / (prm.p - 2.0)));
  rep.rho_m_lambda = std::pow(rep.r_lambda, prm.m) / (prm.m * std::pow(2.0, prm.m - 1.0));

  ScalingReport sc = scaling_constants(F, psi0);
  ScalarField endpoint = psi0;
  for (double& x : endpoint.values()) x *= sc.T_m;
  rep.endpoint_norm = xm_norm(endpoint, prm.m);
  rep.geometry_ok = rep.endpoint_norm > rep.r_lambda;

  const double sigma = sp2 * meas_pow / prm.p;
  const double sup = lp_norm(psi0, std::numeric_limits<double>::infinity());
  const double h1 = std::sqrt(h1_seminorm_sq(psi0));
  rep.R_threshold =
      F.op().coeff().alpha() / (4.0 * sigma) * std::pow(sup / h1, prm.p - 2.0);
  return rep;
}

double mp_limit_floor(const EnergyFunctional& F) {
  const ProblemParams& prm = F.params();
  const double two_star = ProblemParams::two_star(F.grid().dim());
  const double meas = F.grid().measure();
  const double meas_pow =
      std::isfinite(two_star) ? std::pow(meas, 1.0 - prm.p / two_star) : meas;
  const double S = estimate_embedding_constant(F.op().grid_ptr(), prm.p);
  const double c0 = prm.lambda * std::pow(S, 0.5 * prm.p) * meas_pow / prm.p;
  const double alpha = F.op().coeff().alpha();
  const double rstar = std::pow(alpha / (prm.p * c0), 1.0 / (prm.p - 2.0));
  return 0.5 * alpha * rstar * rstar - c0 * std::pow(rstar, prm.p);
}

bool newton_polish(const EnergyFunctional& F, ScalarField& z, double tol_abs, int max_steps,
                   double lin_tol) {
  const DivFormOperator& A = F.op();
  const int n = A.size();
  ScalarField g = F.gradient(z);
  double rn = projected_residual_pos(z, g);
  const double level0 = F.value(z);
  for (int step = 0; step < max_steps; ++step) {
    if (rn <= tol_abs) return true;
    std::vector<double> diag = F.hessian_diagonal(z);
    auto hess = [&](const double* in, double* out) {
      A.apply(in, out);
      for (int k = 0; k < n; ++k) out[k] += diag[k] * in[k];
    };
    std::vector<double> delta;
    auto lin = minres_solve(n, hess, g.values(), delta, lin_tol, 6 * n + 200);
    if (!lin.converged && lin.rel_residual > 1e-2) return false;
    double damp = 1.0;
    bool accepted = false;
    for (int half = 0; half < 6; ++half, damp *= 0.5) {
      ScalarField trial = z;
      for (int k = 0; k < n; ++k) trial[k] = std::max(trial[k] - damp * delta[k], 0.0);
      ScalarField gt = F.gradient(trial);
      const double rt = projected_residual_pos(trial, gt);
      const double lt = F.value(trial);
      // Stay on the ridge: reject steps that leave the level band.
      const bool level_ok =
          level0 > 0.0 ? (lt > 0.2 * level0 && lt < 5.0 * level0 + 1.0) : std::isfinite(lt);
      if (rt < rn && level_ok) {
        z = std::move(trial);
        g = std::move(gt);
        rn = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return rn <= tol_abs;
  }
  return rn <= tol_abs;
}

MPReport mountain_pass(const EnergyFunctional& F, const ScalarField& endpoint, int n_path,
                       const SolveOptions& opts) {
  const ProblemParams& prm = F.params();
  if (!prm.m_finite()) throw std::invalid_argument("mountain_pass: needs finite m");
  if (n_path < 8) throw std::invalid_argument("mountain_pass: need n_path >= 8");
  if (!(F.value(endpoint) < 0.0))
    throw std::invalid_argument("mountain_pass: endpoint level must be negative");

  const int K = n_path;
  const int n = endpoint.size();
  const double vol = F.grid().cell_volume();
  GridPtr grid = F.op().grid_ptr();

  std::vector<ScalarField> path;
  path.reserve(K);
  for (int i = 0; i < K; ++i) {
    ScalarField f = endpoint;
    const double t = static_cast<double>(i) / (K - 1);
    for (double& x : f.values()) x *= t;
    path.push_back(std::move(f));
  }
  std::vector<double> levels(K);
  auto eval_levels = [&] {
    for (int i = 0; i < K; ++i) levels[i] = F.value(path[i]);
  };
  eval_levels();

  auto respace = [&] {
    std::vector<double> cum(K, 0.0);
    for (int i = 0; i + 1 < K; ++i) {
      ScalarField d = path[i + 1];
      for (int k = 0; k < n; ++k) d[k] -= path[i][k];
      cum[i + 1] = cum[i] + xm_norm(d, prm.m);
    }
    const double total = cum[K - 1];
    if (!(total > 0.0)) return;
    std::vector<ScalarField> fresh;
    fresh.reserve(K);
    fresh.push_back(path.front());
    int seg = 0;
    for (int j = 1; j + 1 < K; ++j) {
      const double target = total * j / (K - 1);
      while (seg + 2 < K && cum[seg + 1] < target) ++seg;
      const double w = (target - cum[seg]) / std::max(cum[seg + 1] - cum[seg], 1e-300);
      ScalarField f(grid);
      for (int k = 0; k < n; ++k) f[k] = (1.0 - w) * path[seg][k] + w * path[seg + 1][k];
      fresh.push_back(std::move(f));
    }
    fresh.push_back(path.back());
    path = std::move(fresh);
  };

  MPReport rep;
  double rn0 = -1.0;
  double rn = 0.0;
  int it = 0;
  // Best ridge candidate seen so far: path maximizer with the smallest
  // stationarity residual. The final Newton polish starts from it.
  ScalarField best_z;
  double best_rn = std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
  int no_improve = 0;
  int stall = 0;

  for (; it < opts.max_iter; ++it) {
    const int kmax =
        static_cast<int>(std::max_element(levels.begin(), levels.end()) - levels.begin());
    const double cur_max = levels[kmax];
    ScalarField g = F.gradient(path[kmax]);
    rn = projected_residual_pos(path[kmax], g);
    if (rn0 < 0.0) rn0 = std::max(rn, 1e-300);
    // Every deformed path gives an upper bound for the minimax level; the
    // running minimum is the current estimate.
    upper_bound = std::min(upper_bound, cur_max);
    rep.history.push_back({it, upper_bound, rn});
    if (rn < best_rn) {
      best_rn = rn;
      best_z = path[kmax];
      no_improve = 0;
    } else if (++no_improve > 50) {
      break;
    }
    if (rn <= 1e-3 * rn0 || rn <= opts.tol_resid * rn0) break;
    if (stall > 80) break;

    if (kmax == 0 || kmax == K - 1 || cur_max <= 1e-12 * (1.0 + std::fabs(levels[K - 1]))) {
      rep.collapsed = true;
      break;
    }

    // One projected descent step at the path maximizer, capped by the local
    // path spacing so the maximizer cannot plunge off the ridge zone.
    ScalarField d(grid);
    double gd = 0.0, dn = 0.0;
    for (int k = 0; k < n; ++k) {
      d[k] = -g[k] / vol;
      gd += g[k] * d[k];
      dn += d[k] * d[k];
    }
    ScalarField seg = path[kmax];
    for (int k = 0; k < n; ++k) seg[k] -= path[kmax - 1][k];
    const double spacing = xm_norm(seg, prm.m);
    double s = std::min(opts.step0, 0.5 * spacing / std::max(std::sqrt(dn), 1e-300));
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      ScalarField trial = path[kmax];
      for (int k = 0; k < n; ++k) trial[k] = std::max(trial[k] + s * d[k], 0.0);
      const double Jt = F.value(trial);
      if (Jt <= cur_max + opts.armijo_c * s * gd) {
        path[kmax] = std::move(trial);
        levels[kmax] = Jt;
        accepted = true;
        break;
      }
      s *= opts.backtrack;
    }
    if (!accepted) ++stall;

    respace();
    eval_levels();
  }

  ScalarField z = best_z.size() > 0
                      ? best_z
                      : path[std::max_element(levels.begin(), levels.end()) - levels.begin()];
  if (!rep.collapsed) {
    newton_polish(F, z, opts.tol_resid * rn0, 80, opts.lin_tol);
    // Put the polished point back on the path at the maximizer slot.
    const int kmax =
        static_cast<int>(std::max_element(levels.begin(), levels.end()) - levels.begin());
    if (kmax > 0 && kmax < K - 1) {
      path[kmax] = z;
      levels[kmax] = F.value(z);
    }
  }
  ScalarField gz = F.gradient(z);
  rn = projected_residual_pos(z, gz);

  rep.solution = std::move(z);
  rep.level = F.value(rep.solution);
  rep.level_floor = mp_limit_floor(F);
  rep.residual_norm = rn;
  rep.iterations = it;
  rep.converged = !rep.collapsed && rn <= opts.tol_resid * rn0 &&
                  rep.level >= rep.level_floor - 1e-6;
  rep.path = std::move(path);
  rep.solution.require_finite("mountain_pass");
  return rep;
}

} // namespace penalab
