#include "penalab/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>

#include "penalab/krylov.hpp"

namespace penalab {

namespace {

double euclid(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Residual of the one-sided constraint v >= 0: the plain gradient on the
// strictly positive set, its negative part on the active set.
double projected_residual_pos(const ScalarField& u, const ScalarField& g) {
  double s = 0.0;
  for (int k = 0; k < u.size(); ++k) {
    const double r = u[k] > 0.0 ? g[k] : std::min(g[k], 0.0);
    s += r * r;
  }
  return std::sqrt(s);
}

ScalarField project_nonneg(ScalarField f) {
  for (double& x : f.values()) x = std::max(x, 0.0);
  return f;
}

} // namespace

std::vector<double> uniform_sequence(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  for (auto& x : out) x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return out;
}

InitialGuess initial_guess(const EnergyFunctional& F, const ScalarField& psi0) {
  ScalingReport rep = scaling_constants(F, psi0);
  InitialGuess out;
  out.scaling = rep;
  out.lambda_below_threshold = !(rep.Lambda_psi < F.params().lambda);
  const double t = F.params().m_finite() ? rep.T_m : rep.T_inf;
  out.field = psi0;
  for (double& x : out.field.values()) x *= t;
  return out;
}

namespace {

// Residual size below which the stationarity system is solved to the limits
// of double evaluation: a small multiple of the balanced term magnitudes.
double residual_fp_floor(const EnergyFunctional& F, const ScalarField& u,
                         const ScalarField& g) {
  const double vol = F.grid().cell_volume();
  const ProblemParams& prm = F.params();
  double scale = 0.0;
  for (int k = 0; k < u.size(); ++k) {
    double t = prm.lambda * safe_pow(u[k], prm.p - 1.0) * vol;
    if (prm.m_finite()) t += safe_pow(std::fabs(u[k]), prm.m - 1.0) * vol;
    scale += t * t;
  }
  return 2e-13 * (std::sqrt(scale) + euclid(g.values()) + 1.0e-30);
}

} // namespace

SolveReport minimize_jm(const EnergyFunctional& F, const ScalarField& init,
                        const SolveOptions& opts, double delta_floor) {
  if (!F.params().m_finite()) throw std::invalid_argument("minimize_jm: needs finite m");
  const DivFormOperator& A = F.op();
  const int n = A.size();
  const double vol = F.grid().cell_volume();

  SolveReport rep;
  ScalarField u = project_nonneg(init);
  double J = F.value(u);
  ScalarField g = F.gradient(u);
  double rn = projected_residual_pos(u, g);
  const double rn0 = rn;
  auto done = [&](double r) {
    return r <= opts.tol_resid * rn0 || r <= residual_fp_floor(F, u, g);
  };
  auto record = [&] {
    // incumbent level: monotone rendering of the descent contract
    const double lv = rep.history.empty() ? J : std::min(J, rep.history.back().level);
    rep.history.push_back({lv, rn});
  };

  int it = 0;
  // Monotone phase: projected descent plus energy-checked Newton steps.
  for (; it < opts.max_iter; ++it) {
    record();
    if (done(rn) || rn <= 1e-4 * rn0) break;

    bool stepped = false;
    if (opts.use_newton && (rn <= 1e-2 * rn0 || it % 5 == 4)) {
      std::vector<double> diag = F.hessian_diagonal(u);
      std::vector<double> delta;
      auto hess = [&](const double* in, double* out) {
        A.apply(in, out);
        for (int k = 0; k < n; ++k) out[k] += diag[k] * in[k];
      };
      auto lin = cg_solve(n, hess, g.values(), delta, opts.lin_tol, 10 * n + 100);
      if (!lin.breakdown && (lin.converged || lin.rel_residual < 1e-2)) {
        ScalarField trial = u;
        for (int k = 0; k < n; ++k) trial[k] = std::max(trial[k] - delta[k], 0.0);
        const double Jt = F.value(trial);
        if (Jt <= J && trial.all_finite()) {
          u = std::move(trial);
          J = Jt;
          stepped = true;
        }
      }
    }

    if (!stepped) {
      // Mass-preconditioned steepest descent with Armijo backtracking.
      ScalarField d(u.grid_ptr());
      double gd = 0.0;
      for (int k = 0; k < n; ++k) {
        d[k] = -g[k] / vol;
        gd += g[k] * d[k];
      }
      double s = opts.step0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        ScalarField trial = u;
        for (int k = 0; k < n; ++k) trial[k] = std::max(trial[k] + s * d[k], 0.0);
        const double Jt = F.value(trial);
        if (Jt <= J + opts.armijo_c * s * gd && std::isfinite(Jt)) {
          u = std::move(trial);
          J = Jt;
          accepted = true;
          break;
        }
        s *= opts.backtrack;
      }
      if (!accepted) break; // no measurable descent left
    }

    g = F.gradient(u);
    rn = projected_residual_pos(u, g);
  }

  // Residual phase: below measurable energy differences, polish the
  // stationarity system by damped Newton steps accepted on residual decrease.
  if (opts.use_newton) {
    for (int step = 0; step < 60 && !done(rn) && it < opts.max_iter; ++step, ++it) {
      std::vector<double> diag = F.hessian_diagonal(u);
      std::vector<double> delta;
      auto hess = [&](const double* in, double* out) {
        A.apply(in, out);
        for (int k = 0; k < n; ++k) out[k] += diag[k] * in[k];
      };
      auto lin = cg_solve(n, hess, g.values(), delta, opts.lin_tol, 10 * n + 100);
      if (lin.breakdown || (!lin.converged && lin.rel_residual > 1e-2)) break;
      bool accepted = false;
      double damp = 1.0;
      for (int half = 0; half < 6 && !accepted; ++half, damp *= 0.5) {
        ScalarField trial = u;
        for (int k = 0; k < n; ++k) trial[k] = std::max(trial[k] - damp * delta[k], 0.0);
        ScalarField gt = F.gradient(trial);
        const double rt = projected_residual_pos(trial, gt);
        if (rt < rn) {
          u = std::move(trial);
          g = std::move(gt);
          rn = rt;
          accepted = true;
        }
      }
      J = F.value(u);
      record();
      if (!accepted) break;
    }
  }

  rep.solution = std::move(u);
  rep.level = F.value(rep.solution);
  rep.residual_norm = rn;
  rep.iterations = it;
  rep.converged = done(rn);
  rep.negativity_certificate = rep.level - std::min(0.0, delta_floor);
  rep.solution.require_finite("minimize_jm");
  return rep;
}

SolveReport minimize_jinf_on_K(const EnergyFunctional& F, const ScalarField& init,
                               const SolveOptions& opts) {
  const DivFormOperator& A = F.op();
  const int n = A.size();
  const double vol = F.grid().cell_volume();
  EnergyFunctional Finf(A, [&] {
    ProblemParams q = F.params();
    q.m = std::numeric_limits<double>::infinity();
    return q;
  }());

  SolveReport rep;
  ScalarField u = project_box(init, 0.0, 1.0);
  double J = Finf.value(u);
  ScalarField g = Finf.gradient(u);

  auto proj_map_residual = [&](const ScalarField& uu, const ScalarField& gg) {
    // || u - P_K(u - grad/mass) ||_2 with unit reference step.
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = std::clamp(uu[k] - gg[k] / vol, 0.0, 1.0) - uu[k];
      s += t * t;
    }
    return std::sqrt(s);
  };

  double rn = proj_map_residual(u, g);
  const double rn0 = rn;
  const double rn_floor = 1e-14 * (1.0 + euclid(g.values()));
  auto done = [&](double r) { return r <= opts.tol_resid * rn0 || r <= rn_floor; };

  ScalarField u_prev = u, g_prev = g;
  bool have_prev = false;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    rep.history.push_back({J, rn});
    if (done(rn)) {
      rep.converged = true;
      break;
    }

    bool stepped = false;
    // Free-set Newton attempt every few sweeps: solve on the inactive set.
    if (opts.use_newton && it > 0 && it % 10 == 0) {
      std::vector<double> diag = Finf.hessian_diagonal(u);
      std::vector<char> free_set(n);
      for (int k = 0; k < n; ++k) {
        const bool at_lo = u[k] <= 0.0 && g[k] >= 0.0;
        const bool at_hi = u[k] >= 1.0 && g[k] <= 0.0;
        free_set[k] = !(at_lo || at_hi);
      }
      auto hess = [&](const double* in, double* out) {
        A.apply(in, out);
        for (int k = 0; k < n; ++k) {
          out[k] += diag[k] * in[k];
          if (!free_set[k]) out[k] = in[k];
        }
      };
      std::vector<double> rhs(n), delta;
      for (int k = 0; k < n; ++k) rhs[k] = free_set[k] ? g[k] : 0.0;
      auto lin = minres_solve(n, hess, rhs, delta, opts.lin_tol, 4 * n + 100);
      if (lin.converged || lin.rel_residual < 1e-2) {
        double scale = 1.0;
        for (int half = 0; half < 4 && !stepped; ++half, scale *= 0.5) {
          ScalarField trial = u;
          for (int k = 0; k < n; ++k)
            trial[k] = std::clamp(trial[k] - scale * (free_set[k] ? delta[k] : 0.0), 0.0, 1.0);
          const double Jt = Finf.value(trial);
          if (Jt <= J) {
            u_prev = u;
            g_prev = g;
            have_prev = true;
            u = std::move(trial);
            J = Jt;
            stepped = true;
          }
        }
      }
    }

    if (!stepped) {
      // Spectral (Barzilai-Borwein) trial step on the mass-scaled gradient,
      // clipped and safeguarded by a projected-arc Armijo search.
      double s = opts.step0;
      if (have_prev) {
        double sy = 0.0, yy = 0.0;
        for (int k = 0; k < n; ++k) {
          const double du = u[k] - u_prev[k];
          const double dg = (g[k] - g_prev[k]) / vol;
          sy += du * dg;
          yy += dg * dg;
        }
        if (sy > 0.0 && yy > 0.0) s = std::clamp(sy / yy, 1e-10, 1e10);
      }
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        ScalarField trial = u;
        double gd = 0.0;
        for (int k = 0; k < n; ++k) {
          trial[k] = std::clamp(trial[k] - s * g[k] / vol, 0.0, 1.0);
          gd += g[k] * (trial[k] - u[k]);
        }
        const double Jt = Finf.value(trial);
        if (Jt <= J + opts.armijo_c * gd && std::isfinite(Jt)) {
          u_prev = u;
          g_prev = g;
          have_prev = true;
          u = std::move(trial);
          J = Jt;
          accepted = true;
          break;
        }
        s *= opts.backtrack;
      }
      if (!accepted) break;
    }

    g = Finf.gradient(u);
    rn = proj_map_residual(u, g);
  }

  rep.solution = std::move(u);
  rep.level = Finf.value(rep.solution);
  rep.residual_norm = rn;
  rep.iterations = it;
  if (!rep.converged && done(rn)) rep.converged = true;
  rep.negativity_certificate = rep.level;
  rep.solution.require_finite("minimize_jinf_on_K");
  return rep;
}

SolveReport minimize_jm_multistart(const EnergyFunctional& F, const ScalarField& psi0,
                                   int n_random, std::uint64_t seed, const SolveOptions& opts,
                                   int jobs, std::vector<double>* all_levels) {
  InitialGuess ray = initial_guess(F, psi0);
  const double delta_floor = std::min(0.0, ray.scaling.J_inf_at_Tinf_psi);
  const double amp = std::max(ray.scaling.T_m * lp_norm(psi0, std::numeric_limits<double>::infinity()), 1.0);
  const int n = psi0.size();

  std::vector<ScalarField> starts;
  starts.push_back(ray.field);
  for (int r = 0; r < n_random; ++r) {
    auto seq = uniform_sequence(seed + 0x9e3779b97f4a7c15ULL * (r + 1), n);
    ScalarField f(psi0.grid_ptr());
    for (int k = 0; k < n; ++k) f[k] = amp * seq[k];
    starts.push_back(std::move(f));
  }

  std::vector<SolveReport> reports(starts.size());
  auto run = [&](std::size_t i) { reports[i] = minimize_jm(F, starts[i], opts, delta_floor); };
  if (jobs > 1) {
    std::vector<std::future<void>> fut;
    for (std::size_t i = 0; i < starts.size(); ++i)
      fut.push_back(std::async(std::launch::async, run, i));
    for (auto& f : fut) f.get();
  } else {
    for (std::size_t i = 0; i < starts.size(); ++i) run(i);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const bool better_conv = reports[i].converged && !reports[best].converged;
    const bool same_conv = reports[i].converged == reports[best].converged;
    if (better_conv || (same_conv && reports[i].level < reports[best].level)) best = i;
  }
  if (all_levels) {
    all_levels->clear();
    for (const auto& r : reports) all_levels->push_back(r.level);
  }
  return reports[best];
}

} // namespace penalab
