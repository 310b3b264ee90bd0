#include "penalab/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace penalab {

namespace {

double l1_distance_to_power(const ScalarField& u, double q, const ScalarField& g) {
  double s = 0.0;
  for (int k = 0; k < u.size(); ++k) s += std::fabs(safe_pow(u[k], q) - g[k]);
  return s * u.grid().cell_volume();
}

ScalarField scaled_endpoint(const EnergyFunctional& F, const ScalarField& psi0,
                            const SweepOptions& opts) {
  InitialGuess ray = initial_guess(F, psi0);
  ScalarField endpoint = ray.field;
  for (int i = 0; i < opts.max_endpoint_rescale && !(F.value(endpoint) < 0.0); ++i)
    for (double& x : endpoint.values()) x *= opts.endpoint_scale_step;
  return endpoint;
}

} // namespace

SweepResult sweep_m(const DivFormOperator& op, double lambda, double p,
                    const std::vector<double>& m_list, bool warm_start, const ScalarField& psi0,
                    const SweepOptions& opts) {
  for (std::size_t i = 0; i + 1 < m_list.size(); ++i)
    if (!(m_list[i] < m_list[i + 1]))
      throw std::invalid_argument("sweep_m: m list must be ascending");
  for (double m : m_list)
    if (!(m > p)) throw std::invalid_argument("sweep_m: every m must exceed p");

  SweepResult out;
  out.records.reserve(m_list.size());

  ScalarField warm_u, warm_z;
  bool have_u = false, have_z = false;

  for (double m : m_list) {
    AsymptoticsRecord rec;
    rec.m = m;
    try {
      ProblemParams prm{lambda, p, m};
      EnergyFunctional F(op, prm);

      InitialGuess ray = initial_guess(F, psi0);
      const double delta_floor = std::min(0.0, ray.scaling.J_inf_at_Tinf_psi);
      ScalarField u_init = ray.field;
      if (warm_start && have_u) {
        // The previous iterate may exceed the sup bound of the new exponent;
        // clamp it back inside so the penalty term cannot eject the descent.
        u_init = warm_u;
        const double cap = std::pow(lambda, 1.0 / (m - p));
        for (double& x : u_init.values()) x = std::min(x, cap);
      }
      SolveReport usol = minimize_jm(F, u_init, opts.solve, delta_floor);

      MPReport zsol;
      bool z_done = false;
      if (warm_start && have_z) {
        // Polishing the previous iterate usually lands on the same branch;
        // fall back to the full path deformation when it drifts.
        ScalarField z = warm_z;
        ScalarField g0 = F.gradient(z);
        double scale = 0.0;
        for (int k = 0; k < z.size(); ++k) scale += g0[k] * g0[k];
        const double tol_abs = std::max(opts.solve.tol_resid * std::sqrt(scale), 1e-13);
        if (newton_polish(F, z, tol_abs, 80, opts.solve.lin_tol)) {
          const double lvl = F.value(z);
          const double floor = mp_limit_floor(F);
          const double rel_dist =
              l2_distance(z, usol.solution) / std::max(lp_norm(usol.solution, 2.0), 1e-30);
          if (lvl >= floor - 1e-6 && rel_dist > 1e-3) {
            zsol.solution = std::move(z);
            zsol.level = lvl;
            zsol.level_floor = floor;
            ScalarField gz = F.gradient(zsol.solution);
            double rn = 0.0;
            for (int k = 0; k < gz.size(); ++k)
              rn += (zsol.solution[k] > 0.0 ? gz[k] * gz[k]
                                            : std::min(gz[k], 0.0) * std::min(gz[k], 0.0));
            zsol.residual_norm = std::sqrt(rn);
            zsol.converged = true;
            z_done = true;
          }
        }
      }
      if (!z_done) zsol = mountain_pass(F, scaled_endpoint(F, psi0, opts), opts.n_path, opts.solve);

      rec.u_level = usol.level;
      rec.z_level = zsol.level;
      rec.linf_u = lp_norm(usol.solution, std::numeric_limits<double>::infinity());
      rec.linf_z = lp_norm(zsol.solution, std::numeric_limits<double>::infinity());
      rec.apriori_pass = check_apriori(F, usol.solution).all_pass &&
                         check_apriori(F, zsol.solution).all_pass;
      rec.u_converged = usol.converged;
      rec.z_converged = zsol.converged;
      double coincide = 0.0;
      for (int k = 0; k < usol.solution.size(); ++k)
        if (usol.solution[k] >= 1.0 - opts.obstacle.coin_tol)
          coincide += op.grid().cell_volume();
      rec.coincidence_measure_m = coincide;

      warm_u = usol.solution;
      warm_z = zsol.solution;
      have_u = have_z = true;
      out.u_fields.push_back(std::move(usol.solution));
      out.z_fields.push_back(std::move(zsol.solution));
    } catch (const std::exception&) {
      rec.skipped = true;
      out.u_fields.emplace_back(op.grid_ptr());
      out.z_fields.emplace_back(op.grid_ptr());
    }
    out.records.push_back(rec);
  }

  if (!have_u) throw std::runtime_error("sweep_m: every exponent failed");
  out.last_u = warm_u;
  out.last_z = warm_z;

  ProblemParams prm_inf{lambda, p, std::numeric_limits<double>::infinity()};
  EnergyFunctional Finf(op, prm_inf);
  out.u_limit = solve_vi(Finf, out.last_u, opts.obstacle);
  // The ridge branch is a saddle of the limit energy and repels the Picard
  // iteration, so its limit needs the branch-preserving solve.
  out.z_limit = solve_vi_newton(Finf, out.last_z, opts.obstacle);
  if (!out.z_limit.converged) out.z_limit = solve_vi(Finf, out.last_z, opts.obstacle);

  for (std::size_t i = 0; i < out.records.size(); ++i) {
    auto& rec = out.records[i];
    if (rec.skipped) continue;
    rec.dist_u_to_limit = l2_distance(out.u_fields[i], out.u_limit.solution);
    rec.dist_z_to_limit = l2_distance(out.z_fields[i], out.z_limit.solution);
    rec.g_approx_defect =
        l1_distance_to_power(out.u_fields[i], rec.m - 1.0, out.u_limit.multiplier.g);
  }
  return out;
}

ConvergenceSummary convergence_metrics(const SweepResult& sweep) {
  std::vector<const AsymptoticsRecord*> recs;
  for (const auto& r : sweep.records)
    if (!r.skipped) recs.push_back(&r);
  if (recs.size() < 3)
    throw std::invalid_argument("convergence_metrics: need at least 3 records");

  auto slope = [&](auto dist_of) {
    // Least-squares slope of log dist against log m.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto* r : recs) {
      const double d = dist_of(*r);
      if (!(d > 0.0)) continue;
      const double x = std::log(r->m), y = std::log(d);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  auto monotone = [&](auto dist_of) {
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
      const double a = dist_of(*recs[i]), b = dist_of(*recs[i + 1]);
      // Below the solver floor further decrease is noise.
      if (!(b < a || std::max(a, b) <= 1e-8)) return false;
    }
    return true;
  };

  ConvergenceSummary s;
  s.slope_u = slope([](const AsymptoticsRecord& r) { return r.dist_u_to_limit; });
  s.slope_z = slope([](const AsymptoticsRecord& r) { return r.dist_z_to_limit; });
  s.monotone_u = monotone([](const AsymptoticsRecord& r) { return r.dist_u_to_limit; });
  s.monotone_z = monotone([](const AsymptoticsRecord& r) { return r.dist_z_to_limit; });
  s.final_comp_defect_u = sweep.u_limit.multiplier.complementarity_defect;
  s.final_comp_defect_z = sweep.z_limit.multiplier.complementarity_defect;
  s.final_g_approx_defect = recs.back()->g_approx_defect;
  return s;
}

GzTrivialityReport gz_triviality_experiment(const DivFormOperator& op, double lambda, double p,
                                            const std::vector<double>& m_list,
                                            const ScalarField& psi0, const SweepOptions& opts) {
  SweepResult sweep = sweep_m(op, lambda, p, m_list, true, psi0, opts);
  GzTrivialityReport rep;
  rep.coincidence_measure_z = sweep.z_limit.multiplier.coincidence_measure;
  rep.g_nontrivial = sweep.z_limit.multiplier.g_nontrivial;
  double l1 = 0.0;
  for (int k = 0; k < sweep.z_limit.multiplier.g.size(); ++k)
    l1 += std::fabs(sweep.z_limit.multiplier.g[k]);
  rep.g_l1 = l1 * op.grid().cell_volume();
  rep.g_max = sweep.z_limit.multiplier.g_max;
  rep.complementarity_defect = sweep.z_limit.multiplier.complementarity_defect;
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    double coincide = 0.0;
    const ScalarField& z = sweep.z_fields[i];
    for (int k = 0; k < z.size(); ++k)
      if (z[k] >= 1.0 - opts.obstacle.coin_tol) coincide += op.grid().cell_volume();
    rep.coincidence_measure_zm.push_back(coincide);
  }
  return rep;
}

} // namespace penalab
