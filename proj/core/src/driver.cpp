#include "penalab/driver.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "penalab/asymptotics.hpp"
#include "penalab/field_io.hpp"
#include "penalab/radial.hpp"
#include "penalab/report_json.hpp"

namespace penalab {

namespace fs = std::filesystem;

std::string resolve_output_dir(const ExperimentConfig& cfg) {
  const char* env = std::getenv("PENALAB_OUT");
  std::string dir = env && *env ? env : cfg.output_dir;
  fs::create_directories(dir);
  return dir;
}

namespace {

JsonValue history_json(const std::vector<HistoryEntry>& hist) {
  JsonValue arr = JsonValue::array();
  for (const auto& h : hist) {
    JsonValue e = JsonValue::object();
    e.set("level", h.level);
    e.set("residual", h.residual);
    arr.push(std::move(e));
  }
  return arr;
}

JsonValue scaling_json(const ScalingReport& r) {
  JsonValue j = JsonValue::object();
  j.set("a", r.a);
  j.set("b_m", r.b_m);
  j.set("T_m", r.T_m);
  j.set("lambda_m_psi", r.lambda_m_psi);
  j.set("Lambda_psi", r.Lambda_psi);
  j.set("T_inf", r.T_inf);
  j.set("J_m_at_Tm_psi", r.J_m_at_Tm_psi);
  j.set("J_inf_at_Tinf_psi", r.J_inf_at_Tinf_psi);
  return j;
}

JsonValue apriori_json(const AprioriReport& r) {
  JsonValue j = JsonValue::object();
  j.set("linf_bound", r.linf_bound);
  j.set("linf_actual", r.linf_actual);
  j.set("lm_bound", r.lm_bound);
  j.set("lm_actual", r.lm_actual);
  j.set("energy_bound", r.energy_bound);
  j.set("energy_actual", r.energy_actual);
  j.set("all_pass", r.all_pass);
  return j;
}

JsonValue multiplier_json(const MultiplierReport& r, const std::string& g_csv) {
  JsonValue j = JsonValue::object();
  j.set("g_csv", g_csv);
  j.set("g_min", r.g_min);
  j.set("g_max", r.g_max);
  j.set("complementarity_defect", r.complementarity_defect);
  j.set("coincidence_measure", r.coincidence_measure);
  j.set("g_nontrivial", r.g_nontrivial);
  return j;
}

JsonValue vi_json(const VIReport& r, const std::string& sol_csv, const std::string& g_csv) {
  JsonValue j = JsonValue::object();
  j.set("solution_csv", sol_csv);
  j.set("vi_defect", r.vi_defect);
  j.set("iterations", r.iterations);
  j.set("converged", r.converged);
  j.set("multiplier", multiplier_json(r.multiplier, g_csv));
  return j;
}

void write_manifest(const std::string& dir, const std::string& subcommand,
                    const ExperimentConfig& cfg, double wall_s, int exit_code) {
  JsonValue m = JsonValue::object();
  m.set("subcommand", subcommand);
  m.set("version", kVersion);
  m.set("wall_time_s", wall_s);
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m.set("timestamp", buf);
  m.set("exit_code", exit_code);
  m.set("config_echo", config_json(cfg));
  write_text_file(dir + "/manifest.json", m.dump());
}

struct Workspace {
  GridPtr grid;
  DivFormOperator op;
  ScalarField psi0;
};

Workspace make_workspace(const ExperimentConfig& cfg) {
  Workspace w;
  w.grid = cfg.make_grid();
  w.op = DivFormOperator::assemble(w.grid, cfg.make_coeff());
  w.psi0 = cfg.make_psi0(w.op);
  return w;
}

SolveOptions solve_options(const ExperimentConfig& cfg) {
  SolveOptions o;
  o.tol_resid = cfg.tol.tol_resid;
  o.lin_tol = cfg.tol.lin_tol;
  o.tol_vi = cfg.tol.tol_vi;
  return o;
}

ObstacleOptions obstacle_options(const ExperimentConfig& cfg) {
  ObstacleOptions o;
  o.tol_fp = cfg.tol.tol_fp;
  o.tol_vi = cfg.tol.tol_vi;
  o.comp_tol_factor = 1e-6;
  o.probe_seed = cfg.seed + 1001;
  return o;
}

int run_solve_min(const ExperimentConfig& cfg, const std::string& dir) {
  Workspace w = make_workspace(cfg);
  EnergyFunctional F(w.op, cfg.make_params());
  std::vector<double> levels;
  SolveReport rep =
      minimize_jm_multistart(F, w.psi0, cfg.multistart, cfg.seed, solve_options(cfg), cfg.jobs,
                             &levels);
  ScalingReport sc = scaling_constants(F, w.psi0);
  AprioriReport ap = check_apriori(F, rep.solution, cfg.tol.tol_apriori);

  write_field_csv(rep.solution, dir + "/solution_min.csv");
  JsonValue j = JsonValue::object();
  j.set("m", cfg.m);
  j.set("lambda", cfg.lambda);
  j.set("p", cfg.p);
  j.set("level", rep.level);
  j.set("residual_norm", rep.residual_norm);
  j.set("iterations", rep.iterations);
  j.set("converged", rep.converged);
  j.set("negativity_certificate", rep.negativity_certificate);
  j.set("solution_csv", "solution_min.csv");
  JsonValue lv = JsonValue::array();
  for (double l : levels) lv.push(JsonValue::number(l));
  j.set("multistart_levels", std::move(lv));
  j.set("scaling", scaling_json(sc));
  j.set("apriori", apriori_json(ap));
  j.set("history", history_json(rep.history));
  write_text_file(dir + "/solve_min_report.json", j.dump());
  std::cout << "solve-min: level=" << format_number(rep.level)
            << " residual=" << format_number(rep.residual_norm)
            << (rep.converged ? " converged" : " NOT converged") << "\n";
  return rep.converged ? 0 : 2;
}

int run_solve_mp(const ExperimentConfig& cfg, const std::string& dir) {
  Workspace w = make_workspace(cfg);
  EnergyFunctional F(w.op, cfg.make_params());
  GeometryReport geo = mp_geometry(F, w.psi0);
  InitialGuess ray = initial_guess(F, w.psi0);
  ScalarField endpoint = ray.field;
  for (int i = 0; i < 8 && !(F.value(endpoint) < 0.0); ++i)
    for (double& x : endpoint.values()) x *= 1.2;
  MPReport rep = mountain_pass(F, endpoint, cfg.n_path, solve_options(cfg));
  AprioriReport ap = check_apriori(F, rep.solution, cfg.tol.tol_apriori);

  write_field_csv(rep.solution, dir + "/solution_mp.csv");
  {
    std::ostringstream csv;
    csv << "iteration,max_level,residual\n";
    for (const auto& h : rep.history)
      csv << h.iteration << ',' << format_number(h.max_level) << ','
          << format_number(h.residual) << '\n';
    write_text_file(dir + "/mp_path_levels.csv", csv.str());
  }
  JsonValue j = JsonValue::object();
  j.set("m", cfg.m);
  j.set("lambda", cfg.lambda);
  j.set("p", cfg.p);
  j.set("level", rep.level);
  j.set("residual_norm", rep.residual_norm);
  j.set("iterations", rep.iterations);
  j.set("converged", rep.converged);
  j.set("level_floor", rep.level_floor);
  j.set("collapsed", rep.collapsed);
  j.set("solution_csv", "solution_mp.csv");
  j.set("path_levels_csv", "mp_path_levels.csv");
  JsonValue g = JsonValue::object();
  g.set("r_lambda", geo.r_lambda);
  g.set("rho_m_lambda", geo.rho_m_lambda);
  g.set("sobolev_S", geo.sobolev_S);
  g.set("R_threshold", geo.R_threshold);
  g.set("endpoint_norm", geo.endpoint_norm);
  g.set("geometry_ok", geo.geometry_ok);
  j.set("geometry", std::move(g));
  j.set("apriori", apriori_json(ap));
  write_text_file(dir + "/solve_mp_report.json", j.dump());
  std::cout << "solve-mp: level=" << format_number(rep.level)
            << " floor=" << format_number(rep.level_floor)
            << (rep.converged ? " converged" : " NOT converged") << "\n";
  return rep.converged ? 0 : 2;
}

int run_obstacle(const ExperimentConfig& cfg, const std::string& dir) {
  Workspace w = make_workspace(cfg);
  ProblemParams prm = cfg.make_params();
  prm.m = std::numeric_limits<double>::infinity();
  EnergyFunctional Finf(w.op, prm);

  ScalarField init(w.grid, 0.0);
  if (cfg.obstacle_init == "min") {
    // Start the descent on the scaled ray, which carries a negative level
    // whenever lambda clears the profile threshold.
    ScalarField start = project_box(initial_guess(Finf, w.psi0).field, 0.0, 1.0);
    SolveReport mini = minimize_jinf_on_K(Finf, start, solve_options(cfg));
    init = mini.solution;
  } else if (cfg.obstacle_init == "zero") {
    // keep zeros
  } else {
    init = read_field_csv(w.grid, cfg.obstacle_init);
  }
  VIReport rep = solve_vi(Finf, init, obstacle_options(cfg));

  write_field_csv(rep.solution, dir + "/solution_vi.csv");
  write_field_csv(rep.multiplier.g, dir + "/multiplier_g.csv");
  JsonValue j = vi_json(rep, "solution_vi.csv", "multiplier_g.csv");
  j.set("lambda", cfg.lambda);
  j.set("p", cfg.p);
  write_text_file(dir + "/vi_report.json", j.dump());
  std::cout << "obstacle: vi_defect=" << format_number(rep.vi_defect)
            << " g_max=" << format_number(rep.multiplier.g_max)
            << (rep.converged ? " converged" : " NOT converged") << "\n";
  return rep.converged ? 0 : 2;
}

int run_sweep(const ExperimentConfig& cfg, const std::string& dir) {
  Workspace w = make_workspace(cfg);
  SweepOptions so;
  so.solve = solve_options(cfg);
  so.obstacle = obstacle_options(cfg);
  so.n_path = cfg.n_path;
  std::vector<double> m_list = cfg.m_list;
  if (m_list.empty()) {
    // geometric default, resolving the 1 + log(lambda)/m decay of the bounds
    for (double m = 2.0 * cfg.p; m <= kPenaltyExponentCap && m_list.size() < 5; m *= 2.0)
      m_list.push_back(m);
  }
  SweepResult sw = sweep_m(w.op, cfg.lambda, cfg.p, m_list, cfg.warm_start, w.psi0, so);

  {
    std::ostringstream csv;
    csv << "m,u_level,z_level,linf_u,linf_z,dist_u_to_limit,dist_z_to_limit,"
           "g_approx_defect,apriori_pass,coincidence_measure_m,u_converged,z_converged,skipped\n";
    for (const auto& r : sw.records)
      csv << format_number(r.m) << ',' << format_number(r.u_level) << ','
          << format_number(r.z_level) << ',' << format_number(r.linf_u) << ','
          << format_number(r.linf_z) << ',' << format_number(r.dist_u_to_limit) << ','
          << format_number(r.dist_z_to_limit) << ',' << format_number(r.g_approx_defect) << ','
          << (r.apriori_pass ? 1 : 0) << ',' << format_number(r.coincidence_measure_m) << ','
          << (r.u_converged ? 1 : 0) << ',' << (r.z_converged ? 1 : 0) << ','
          << (r.skipped ? 1 : 0) << '\n';
    write_text_file(dir + "/sweep.csv", csv.str());
  }
  write_field_csv(sw.u_limit.solution, dir + "/limit_u.csv");
  write_field_csv(sw.z_limit.solution, dir + "/limit_z.csv");
  write_field_csv(sw.u_limit.multiplier.g, dir + "/limit_g_u.csv");
  write_field_csv(sw.z_limit.multiplier.g, dir + "/limit_g_z.csv");

  ConvergenceSummary cs = convergence_metrics(sw);
  JsonValue j = JsonValue::object();
  j.set("records_csv", "sweep.csv");
  j.set("slope_u", cs.slope_u);
  j.set("slope_z", cs.slope_z);
  j.set("monotone_u", cs.monotone_u);
  j.set("monotone_z", cs.monotone_z);
  j.set("final_comp_defect_u", cs.final_comp_defect_u);
  j.set("final_comp_defect_z", cs.final_comp_defect_z);
  j.set("final_g_approx_defect", cs.final_g_approx_defect);
  j.set("u_limit", vi_json(sw.u_limit, "limit_u.csv", "limit_g_u.csv"));
  j.set("z_limit", vi_json(sw.z_limit, "limit_z.csv", "limit_g_z.csv"));
  write_text_file(dir + "/sweep_summary.json", j.dump());

  bool all_ok = sw.u_limit.converged && sw.z_limit.converged;
  for (const auto& r : sw.records)
    all_ok = all_ok && !r.skipped && r.u_converged && r.z_converged;
  std::cout << "sweep: " << sw.records.size()
            << " exponents, final dist_u=" << format_number(sw.records.back().dist_u_to_limit)
            << " dist_z=" << format_number(sw.records.back().dist_z_to_limit) << "\n";
  return all_ok ? 0 : 2;
}

int run_radial(const ExperimentConfig& cfg, const std::string& dir) {
  const RadialSection& r = cfg.radial;
  RadialProfile prof = shoot(r.p, r.N, cfg.tol.ode_tol);
  {
    std::ostringstream csv;
    csv << "r,U\n";
    for (const auto& s : prof.samples)
      csv << format_number(s[0]) << ',' << format_number(s[1]) << '\n';
    write_text_file(dir + "/radial_profile.csv", csv.str());
  }
  JsonValue j = JsonValue::object();
  j.set("p", prof.p);
  j.set("N", prof.N);
  j.set("r0", prof.r0);
  j.set("U0", prof.U0);
  j.set("energy", prof.energy);
  j.set("lp_mass", prof.lp_mass);
  j.set("samples_csv", "radial_profile.csv");

  if (r.has_scaling) {
    GzConditionReport gz = check_gz_conditions(r.p, r.N, r.lambda, r.R, cfg.tol.ode_tol);
    JsonValue g = JsonValue::object();
    g.set("lambda", gz.lambda);
    g.set("R", gz.R);
    g.set("cond_b_value", gz.cond_b_value);
    g.set("cond_b", gz.cond_b);
    g.set("Lambda_U", gz.Lambda_U);
    g.set("Lambda_U_identity", gz.Lambda_U_identity);
    g.set("u0_pow", gz.u0_pow);
    JsonValue cands = JsonValue::array();
    for (const auto& c : gz.candidates) {
      JsonValue cj = JsonValue::object();
      cj.set("name", c.name);
      cj.set("Lambda", c.Lambda);
      cj.set("interval_nonempty", c.interval_nonempty);
      cands.push(std::move(cj));
    }
    g.set("candidates", std::move(cands));
    j.set("gz_conditions", std::move(g));
  }

  if (!r.p_sweep.empty()) {
    std::ostringstream csv;
    csv << "p,r0,U0,limit_norm\n";
    for (double ps : r.p_sweep) {
      RadialProfile pr = shoot(ps, r.N, cfg.tol.ode_tol);
      csv << format_number(ps) << ',' << format_number(pr.r0) << ',' << format_number(pr.U0)
          << ',' << format_number(std::pow(r.lambda, -1.0 / (ps - 2.0)) * pr.U0) << '\n';
    }
    write_text_file(dir + "/radial_sweep.csv", csv.str());
    j.set("sweep_csv", "radial_sweep.csv");
  }
  if (!r.lambdaR2_grid.empty()) {
    // Threshold hunt: for each p and lambda R^2 report the two conditions.
    std::ostringstream csv;
    csv << "p,lambdaR2,U0_pow,Lambda_profile,Lambda_phi1,cond_b,above_Lambda_phi1\n";
    const auto& plist = r.p_sweep.empty() ? std::vector<double>{r.p} : r.p_sweep;
    for (double ps : plist) {
      RadialProfile pr = shoot(ps, r.N, cfg.tol.ode_tol);
      const double u0pow = std::pow(pr.U0, ps - 2.0);
      const double lam_prof = 0.5 * ps * u0pow;
      const double lam_phi1 = Lambda_ball_eigenfunction(ps, r.N);
      for (double lr2 : r.lambdaR2_grid)
        csv << format_number(ps) << ',' << format_number(lr2) << ',' << format_number(u0pow)
            << ',' << format_number(lam_prof) << ',' << format_number(lam_phi1) << ','
            << (lr2 < u0pow ? 1 : 0) << ',' << (lr2 > lam_phi1 ? 1 : 0) << '\n';
    }
    write_text_file(dir + "/gz_hunt.csv", csv.str());
    j.set("gz_hunt_csv", "gz_hunt.csv");
  }
  write_text_file(dir + "/radial_report.json", j.dump());
  std::cout << "radial: p=" << format_number(r.p) << " N=" << r.N
            << " U0=" << format_number(prof.U0) << " r0=" << format_number(prof.r0) << "\n";
  return 0;
}

int run_eigen(const ExperimentConfig& cfg, const std::string& dir) {
  Workspace w = make_workspace(cfg);
  EigenPair ep = principal_eigenpair(w.op);
  write_field_csv(ep.phi1, dir + "/phi1.csv");
  JsonValue j = JsonValue::object();
  j.set("lambda1", ep.lambda1);
  j.set("iterations", ep.iterations);
  j.set("residual", ep.residual);
  j.set("phi1_csv", "phi1.csv");
  write_text_file(dir + "/eigen_report.json", j.dump());
  std::cout << "eigen: lambda1=" << format_number(ep.lambda1) << "\n";
  return 0;
}

int run_constants(const ExperimentConfig& cfg, const std::string& dir) {
  Workspace w = make_workspace(cfg);
  EnergyFunctional F(w.op, cfg.make_params());
  ScalingReport sc = scaling_constants(F, w.psi0);
  Lambda1Bound lb = lambda1_lower_bound(w.op, cfg.make_params());
  JsonValue j = JsonValue::object();
  j.set("scaling", scaling_json(sc));
  j.set("lambda1_dir", lb.lambda1_dir);
  j.set("Lambda_phi1", lb.Lambda_phi1);
  j.set("floor", lb.floor);
  write_text_file(dir + "/constants_report.json", j.dump());
  std::cout << "constants: Lambda(psi0)=" << format_number(sc.Lambda_psi)
            << " lambda_m(psi0)=" << format_number(sc.lambda_m_psi)
            << " floor=" << format_number(lb.floor) << "\n";
  return 0;
}

} // namespace

RunResult run(const std::string& subcommand, const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string dir = resolve_output_dir(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  if (subcommand == "solve-min")
    code = run_solve_min(cfg, dir);
  else if (subcommand == "solve-mp")
    code = run_solve_mp(cfg, dir);
  else if (subcommand == "obstacle")
    code = run_obstacle(cfg, dir);
  else if (subcommand == "sweep")
    code = run_sweep(cfg, dir);
  else if (subcommand == "radial")
    code = run_radial(cfg, dir);
  else if (subcommand == "eigen")
    code = run_eigen(cfg, dir);
  else if (subcommand == "constants")
    code = run_constants(cfg, dir);
  else
    throw std::invalid_argument("run: unknown subcommand '" + subcommand + "'");
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir, subcommand, cfg, wall, code);
  return {code, dir};
}

} // namespace penalab
