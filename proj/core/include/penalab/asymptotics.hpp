#ifndef PENALAB_ASYMPTOTICS_HPP
#define PENALAB_ASYMPTOTICS_HPP

#include "penalab/mountainpass.hpp"
#include "penalab/obstacle.hpp"

namespace penalab {

struct AsymptoticsRecord {
  double m = 0.0;
  double u_level = 0.0;
  double z_level = 0.0;
  double linf_u = 0.0;
  double linf_z = 0.0;
  double dist_u_to_limit = 0.0; // L2 distance to the obstacle solution
  double dist_z_to_limit = 0.0;
  double g_approx_defect = 0.0; // || u_m^{m-1} - g_u ||_1 against the limit multiplier
  bool apriori_pass = false;
  double coincidence_measure_m = 0.0;
  bool u_converged = false;
  bool z_converged = false;
  bool skipped = false;
};

struct SweepOptions {
  SolveOptions solve;
  ObstacleOptions obstacle;
  int n_path = 33;
  double endpoint_scale_step = 1.2; // rescale when the ray endpoint level is nonnegative
  int max_endpoint_rescale = 8;
};

struct SweepResult {
  std::vector<AsymptoticsRecord> records;
  VIReport u_limit;
  VIReport z_limit;
  ScalarField last_u;
  ScalarField last_z;
  std::vector<ScalarField> u_fields;
  std::vector<ScalarField> z_fields;
};

// Runs the minimizer and the minimax solver over an ascending m list,
// optionally warm-starting each branch from the previous exponent, then
// solves the limit obstacle problem from both final iterates and fills the
// per-m convergence telemetry.
SweepResult sweep_m(const DivFormOperator& op, double lambda, double p,
                    const std::vector<double>& m_list, bool warm_start, const ScalarField& psi0,
                    const SweepOptions& opts = {});

struct ConvergenceSummary {
  double slope_u = 0.0; // log-log slope of dist vs m, about -1 for the minimizer branch
  double slope_z = 0.0;
  bool monotone_u = false;
  bool monotone_z = false;
  double final_comp_defect_u = 0.0;
  double final_comp_defect_z = 0.0;
  double final_g_approx_defect = 0.0;
};

ConvergenceSummary convergence_metrics(const SweepResult& sweep);

struct GzTrivialityReport {
  double coincidence_measure_z = 0.0;
  bool g_nontrivial = false;
  double g_l1 = 0.0;
  double g_max = 0.0;
  double complementarity_defect = 0.0;
  std::vector<double> coincidence_measure_zm; // per m, z branch
};

// Numerical evidence on whether the minimax-branch multiplier vanishes.
GzTrivialityReport gz_triviality_experiment(const DivFormOperator& op, double lambda, double p,
                                            const std::vector<double>& m_list,
                                            const ScalarField& psi0,
                                            const SweepOptions& opts = {});

} // namespace penalab

#endif
