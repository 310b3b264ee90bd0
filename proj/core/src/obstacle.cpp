#include "penalab/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "penalab/krylov.hpp"
#include "penalab/minimize.hpp"

namespace penalab {

PsorResult psor_box_solve(const DivFormOperator& A, const std::vector<double>& rhs, double lo,
                          double hi, std::vector<double>& u, double omega, double tol,
                          int max_sweeps) {
  const int n = A.size();
  const auto& rp = A.row_ptr();
  const auto& cols = A.cols();
  const auto& vals = A.vals();
  PsorResult res;
  double prev_change = std::numeric_limits<double>::infinity();
  int bad_sweeps = 0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0;
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      double akk = 0.0;
      for (int a = rp[k]; a < rp[k + 1]; ++a) {
        if (cols[a] == k)
          akk = vals[a];
        else
          s += vals[a] * u[cols[a]];
      }
      const double gs = (rhs[k] - s) / akk;
      const double cand = std::clamp((1.0 - omega) * u[k] + omega * gs, lo, hi);
      change = std::max(change, std::fabs(cand - u[k]));
      u[k] = cand;
    }
    res.sweeps = sweep;
    res.last_change = change;
    if (change <= tol) {
      res.converged = true;
      return res;
    }
    // Overrelaxation can cycle on some actives; retreat to plain Gauss-Seidel.
    if (change > prev_change) {
      if (++bad_sweeps >= 3 && omega != 1.0) {
        omega = 1.0;
        bad_sweeps = 0;
      }
    } else {
      bad_sweeps = 0;
    }
    prev_change = change;
  }
  return res;
}

MultiplierReport extract_multiplier(const EnergyFunctional& F, const ScalarField& u,
                                    const ObstacleOptions& opts) {
  const DivFormOperator& A = F.op();
  const double lambda = F.params().lambda;
  const double p = F.params().p;
  const double vol = F.grid().cell_volume();

  MultiplierReport rep;
  ScalarField au = A.apply(u);
  rep.g = ScalarField(A.grid_ptr());
  double gmin = std::numeric_limits<double>::infinity();
  double gmax = -gmin;
  double defect = 0.0;
  double l1 = 0.0;
  double coincide = 0.0;
  for (int k = 0; k < u.size(); ++k) {
    const double g = lambda * safe_pow(u[k], p - 1.0) - au[k] / vol;
    rep.g[k] = g;
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
    defect = std::max(defect, std::fabs(g * (1.0 - u[k])));
    l1 += std::fabs(g) * vol;
    if (u[k] >= 1.0 - opts.coin_tol) coincide += vol;
  }
  rep.g_min = gmin;
  rep.g_max = gmax;
  rep.complementarity_defect = defect;
  rep.coincidence_measure = coincide;
  rep.g_nontrivial = l1 > opts.g_triv_tol * F.grid().measure();
  return rep;
}

double probe_vi(const EnergyFunctional& F, const ScalarField& u,
                std::span<const ScalarField> probes) {
  const DivFormOperator& A = F.op();
  const double lambda = F.params().lambda;
  const double p = F.params().p;
  const double vol = F.grid().cell_volume();
  ScalarField au = A.apply(u);
  double worst = std::numeric_limits<double>::infinity();
  for (const ScalarField& v : probes) {
    if (v.min() < -1e-12 || v.max() > 1.0 + 1e-12)
      throw std::invalid_argument("probe_vi: probe outside the constraint set");
    double val = 0.0;
    for (int k = 0; k < u.size(); ++k) {
      const double d = v[k] - u[k];
      val += au[k] * d - lambda * safe_pow(u[k], p - 1.0) * d * vol;
    }
    worst = std::min(worst, val);
  }
  return worst;
}

std::vector<ScalarField> default_probes(const DivFormOperator& op, int n_random,
                                        std::uint64_t seed) {
  std::vector<ScalarField> probes;
  probes.emplace_back(op.grid_ptr(), 0.0);
  probes.emplace_back(op.grid_ptr(), 1.0);
  EigenPair ep = principal_eigenpair(op.coeff().kind() == CoeffField::Kind::identity
                                         ? op
                                         : DivFormOperator::assemble(op.grid_ptr(),
                                                                     CoeffField::identity()));
  probes.push_back(project_box(ep.phi1, 0.0, 1.0));
  const int n = op.size();
  for (int r = 0; r < n_random; ++r) {
    auto seq = uniform_sequence(seed + 0x9e3779b97f4a7c15ULL * (r + 1), n);
    ScalarField f(op.grid_ptr());
    for (int k = 0; k < n; ++k) f[k] = seq[k];
    probes.push_back(std::move(f));
  }
  return probes;
}

VIReport solve_vi(const EnergyFunctional& F, const ScalarField& init, const ObstacleOptions& opts) {
  const DivFormOperator& A = F.op();
  const double lambda = F.params().lambda;
  const double p = F.params().p;
  const double vol = F.grid().cell_volume();
  const int n = A.size();

  VIReport rep;
  ScalarField u = project_box(init, 0.0, 1.0);
  std::vector<double> rhs(n);
  int outer = 0;
  bool converged = false;
  for (outer = 1; outer <= opts.max_outer; ++outer) {
    for (int k = 0; k < n; ++k) rhs[k] = lambda * safe_pow(u[k], p - 1.0) * vol;
    std::vector<double> next = u.values();
    PsorResult inner =
        psor_box_solve(A, rhs, 0.0, 1.0, next, opts.omega, opts.tol_inner, opts.max_sweeps);
    if (!inner.converged)
      throw std::runtime_error("solve_vi: projected relaxation stagnated");
    double change = 0.0;
    for (int k = 0; k < n; ++k) change = std::max(change, std::fabs(next[k] - u[k]));
    u.values() = std::move(next);
    if (change <= opts.tol_fp) {
      converged = true;
      break;
    }
  }

  rep.solution = std::move(u);
  rep.iterations = std::min(outer, opts.max_outer);
  rep.converged = converged;
  rep.multiplier = extract_multiplier(F, rep.solution, opts);
  auto probes = default_probes(A, opts.n_random_probes, opts.probe_seed);
  rep.vi_defect = probe_vi(F, rep.solution, probes);
  rep.solution.require_finite("solve_vi");
  return rep;
}

VIReport solve_vi_newton(const EnergyFunctional& F, const ScalarField& init,
                         const ObstacleOptions& opts) {
  const DivFormOperator& A = F.op();
  const double lambda = F.params().lambda;
  const double p = F.params().p;
  const double vol = F.grid().cell_volume();
  const int n = A.size();

  ScalarField u = project_box(init, 0.0, 1.0);
  // Multiplier iterate for the upper bound (lower-bound activity is handled
  // by the same complementarity test with the opposite sign).
  std::vector<double> mu(n, 0.0), nu(n, 0.0);
  {
    ScalarField au = A.apply(u);
    for (int k = 0; k < n; ++k) {
      const double g = lambda * safe_pow(u[k], p - 1.0) - au[k] / vol;
      if (u[k] >= 1.0 - opts.coin_tol) mu[k] = std::max(g, 0.0);
      if (u[k] <= opts.coin_tol) nu[k] = std::max(-g, 0.0);
    }
  }

  bool converged = false;
  int outer = 0;
  std::vector<char> up(n), lo(n);
  for (outer = 1; outer <= opts.max_outer; ++outer) {
    std::vector<char> up_new(n), lo_new(n);
    for (int k = 0; k < n; ++k) {
      up_new[k] = mu[k] + (u[k] - 1.0) > 0.0;
      lo_new[k] = nu[k] - u[k] > 0.0;
    }
    // Fix the actives, Newton-linearize the reaction on the free set.
    ScalarField ub = u;
    for (int k = 0; k < n; ++k)
      if (up_new[k])
        ub[k] = 1.0;
      else if (lo_new[k])
        ub[k] = 0.0;
    ScalarField r = A.apply(ub);
    for (int k = 0; k < n; ++k) r[k] -= lambda * safe_pow(ub[k], p - 1.0) * vol;
    std::vector<double> diag(n);
    for (int k = 0; k < n; ++k)
      diag[k] = -lambda * (p - 1.0) * safe_pow(ub[k], p - 2.0) * vol;
    auto hess = [&](const double* in, double* out) {
      A.apply(in, out);
      for (int k = 0; k < n; ++k) {
        out[k] += diag[k] * in[k];
        if (up_new[k] || lo_new[k]) out[k] = in[k];
      }
    };
    std::vector<double> rhs(n), delta;
    for (int k = 0; k < n; ++k) rhs[k] = (up_new[k] || lo_new[k]) ? 0.0 : r[k];
    auto lin = minres_solve(n, hess, rhs, delta, opts.tol_inner, 6 * n + 200);
    if (!lin.converged && lin.rel_residual > 1e-6) break;

    double change = 0.0;
    for (int k = 0; k < n; ++k) {
      const double next = (up_new[k] || lo_new[k]) ? ub[k] : ub[k] - delta[k];
      change = std::max(change, std::fabs(next - u[k]));
      u[k] = next;
    }
    // Multiplier update from the fresh residual on the actives.
    ScalarField au = A.apply(u);
    for (int k = 0; k < n; ++k) {
      const double g = lambda * safe_pow(u[k], p - 1.0) - au[k] / vol;
      mu[k] = up_new[k] ? g : 0.0;
      nu[k] = lo_new[k] ? -g : 0.0;
    }
    const bool sets_stable = up_new == up && lo_new == lo;
    up.swap(up_new);
    lo.swap(lo_new);
    if (sets_stable && change <= opts.tol_fp) {
      converged = true;
      break;
    }
  }

  VIReport rep;
  rep.solution = project_box(u, 0.0, 1.0);
  rep.iterations = std::min(outer, opts.max_outer);
  rep.converged = converged;
  rep.multiplier = extract_multiplier(F, rep.solution, opts);
  auto probes = default_probes(A, opts.n_random_probes, opts.probe_seed);
  rep.vi_defect = probe_vi(F, rep.solution, probes);
  rep.solution.require_finite("solve_vi_newton");
  return rep;
}

} // namespace penalab
