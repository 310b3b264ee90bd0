// penalab command line: penalized two-solution solver suite and its
// obstacle-problem limit diagnostics.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "penalab/driver.hpp"

namespace {

struct CommonArgs {
  std::string config_file;
  std::string preset_name;
  double m_override = -1.0;
  long long seed_override = -1;
  std::string out_override;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool grid_cmd = true) {
  if (grid_cmd) {
    auto* cfg = cmd->add_option("--config", a.config_file, "JSON experiment config");
    auto* pre = cmd->add_option("--preset", a.preset_name, "Shipped preset name");
    cfg->excludes(pre);
  }
  cmd->add_option("--seed", a.seed_override, "RNG seed override");
  cmd->add_option("--out", a.out_override, "Output directory override");
  cmd->add_option("--jobs", a.jobs, "Worker pool size for independent sub-runs");
}

penalab::ExperimentConfig make_config(const CommonArgs& a) {
  penalab::ExperimentConfig cfg;
  if (!a.preset_name.empty())
    cfg = penalab::preset(a.preset_name);
  else if (!a.config_file.empty())
    cfg = penalab::load_config_file(a.config_file);
  else
    throw CLI::ValidationError("need --config or --preset");
  if (a.m_override > 0) cfg.m = a.m_override;
  if (a.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed_override);
  if (!a.out_override.empty()) cfg.output_dir = a.out_override;
  if (a.jobs > 0) cfg.jobs = a.jobs;
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalab: two positive solutions of a penalized elliptic problem "
               "and their obstacle-problem limit"};
  app.require_subcommand(1);

  CommonArgs a_min, a_mp, a_obs, a_sweep, a_radial, a_eigen, a_const;
  std::string obstacle_init = "min";
  std::string m_list_csv, p_sweep_csv;
  int n_path = 0;
  double radial_p = 0.0, radial_lambda = -1.0, radial_R = -1.0;
  int radial_dim = 0;

  auto* c_min = app.add_subcommand("solve-min", "Global minimizer of the penalized energy");
  add_common(c_min, a_min);
  c_min->add_option("--m", a_min.m_override, "Penalty exponent override");

  auto* c_mp = app.add_subcommand("solve-mp", "Minimax (ridge) solution of the penalized energy");
  add_common(c_mp, a_mp);
  c_mp->add_option("--m", a_mp.m_override, "Penalty exponent override");
  c_mp->add_option("--n-path", n_path, "Number of path points");

  auto* c_obs = app.add_subcommand("obstacle", "Box-constrained limit problem and multiplier");
  add_common(c_obs, a_obs);
  c_obs->add_option("--init", obstacle_init, "Initial iterate: min | zero | <field.csv>");

  auto* c_sweep = app.add_subcommand("sweep", "Exponent sweep with limit telemetry");
  add_common(c_sweep, a_sweep);
  c_sweep->add_option("--m-list", m_list_csv, "Comma separated ascending exponents");

  auto* c_radial = app.add_subcommand("radial", "Radial unit-ball profile and scalings");
  add_common(c_radial, a_radial, true);
  c_radial->add_option("--p", radial_p, "Reaction exponent");
  c_radial->add_option("--dim", radial_dim, "Space dimension N");
  c_radial->add_option("--lambda", radial_lambda, "Reaction scale for condition reports");
  c_radial->add_option("--R", radial_R, "Ball radius for condition reports");
  c_radial->add_option("--sweep", p_sweep_csv, "Comma separated p sweep");

  auto* c_eigen = app.add_subcommand("eigen", "Principal Dirichlet eigenpair");
  add_common(c_eigen, a_eigen);

  auto* c_const = app.add_subcommand("constants", "Ray scaling constants and thresholds");
  add_common(c_const, a_const);

  CLI11_PARSE(app, argc, argv);

  auto parse_list = [](const std::string& csv) {
    std::vector<double> out;
    std::string cur;
    for (char ch : csv + ",") {
      if (ch == ',') {
        if (!cur.empty()) out.push_back(std::stod(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    return out;
  };

  try {
    penalab::RunResult res;
    if (c_min->parsed()) {
      res = penalab::run("solve-min", make_config(a_min));
    } else if (c_mp->parsed()) {
      auto cfg = make_config(a_mp);
      if (n_path > 0) cfg.n_path = n_path;
      res = penalab::run("solve-mp", cfg);
    } else if (c_obs->parsed()) {
      auto cfg = make_config(a_obs);
      cfg.obstacle_init = obstacle_init;
      res = penalab::run("obstacle", cfg);
    } else if (c_sweep->parsed()) {
      auto cfg = make_config(a_sweep);
      if (!m_list_csv.empty()) cfg.m_list = parse_list(m_list_csv);
      res = penalab::run("sweep", cfg);
    } else if (c_radial->parsed()) {
      penalab::ExperimentConfig cfg;
      if (!a_radial.preset_name.empty())
        cfg = penalab::preset(a_radial.preset_name);
      else if (!a_radial.config_file.empty())
        cfg = penalab::load_config_file(a_radial.config_file);
      else
        cfg.name = "radial";
      if (a_radial.seed_override >= 0) cfg.seed = a_radial.seed_override;
      if (!a_radial.out_override.empty()) cfg.output_dir = a_radial.out_override;
      if (radial_p > 0) cfg.radial.p = radial_p;
      if (radial_dim > 0) cfg.radial.N = radial_dim;
      if (radial_lambda > 0) {
        cfg.radial.lambda = radial_lambda;
        cfg.radial.has_scaling = true;
      }
      if (radial_R > 0) {
        cfg.radial.R = radial_R;
        cfg.radial.has_scaling = true;
      }
      if (!p_sweep_csv.empty()) cfg.radial.p_sweep = parse_list(p_sweep_csv);
      res = penalab::run("radial", cfg);
    } else if (c_eigen->parsed()) {
      res = penalab::run("eigen", make_config(a_eigen));
    } else if (c_const->parsed()) {
      res = penalab::run("constants", make_config(a_const));
    }
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "penalab: error: " << e.what() << "\n";
    return 1;
  }
}
