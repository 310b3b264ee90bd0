#ifndef PENALAB_CONFIG_HPP
#define PENALAB_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "penalab/functional.hpp"

namespace penalab {

struct ToleranceSet {
  double tol_resid = 1e-9;
  double tol_fp = 1e-10;
  double tol_vi = 1e-8;
  double lin_tol = 1e-10;
  double ode_tol = 1e-10;
  double tol_apriori = 0.02;
};

// Radial workflow parameters (ball problems and the threshold hunt).
struct RadialSection {
  int N = 2;
  double p = 4.0;
  double lambda = 1.0;
  double R = 1.0;
  bool has_scaling = false; // lambda/R were given: emit the condition report
  std::vector<double> p_sweep;
  std::vector<double> lambdaR2_grid;
};

struct ExperimentConfig {
  std::string name = "custom";
  DomainSpec domain = DomainSpec::interval(0.0, 1.0);
  std::array<int, 2> n{101, 101};

  std::string coeff_kind = "identity"; // identity | scalar | matrix
  std::string coeff_expr = "identity"; // identity | aniso | bump
  double coeff_a1 = 1.0, coeff_a2 = 1.0;
  double alpha = 1.0, beta = 1.0;

  double lambda = 1.0;
  double p = 4.0;
  double m = 16.0;
  std::vector<double> m_list;

  std::string psi0 = "phi1"; // phi1 | sin | file:<path>
  std::string obstacle_init = "min"; // min | zero | <field.csv>

  ToleranceSet tol;
  std::uint64_t seed = 12345;
  std::string output_dir = "penalab_out";
  int n_path = 33;
  int multistart = 5;
  int jobs = 1;
  bool warm_start = true;

  RadialSection radial;

  void validate() const;
  CoeffField make_coeff() const;
  GridPtr make_grid() const;
  ScalarField make_psi0(const DivFormOperator& op) const;
  ProblemParams make_params() const { return ProblemParams{lambda, p, m}; }
};

class JsonValue;

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);
JsonValue config_json(const ExperimentConfig& cfg);

// Shipped experiment presets: toy-1node, interval-pi, square, disk, gz-hunt.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace penalab

#endif
