#ifndef PENALAB_OBSTACLE_HPP
#define PENALAB_OBSTACLE_HPP

#include <cstdint>
#include <span>

#include "penalab/functional.hpp"

namespace penalab {

struct ObstacleOptions {
  double tol_fp = 1e-10;    // outer fixed-point tolerance, sup norm
  int max_outer = 300;
  double omega = 1.5;       // SOR relaxation, falls back to 1 on non-monotone sweeps
  double tol_inner = 1e-12;
  int max_sweeps = 200000;
  double coin_tol = 1e-6;
  double comp_tol_factor = 1e-6; // accepted complementarity defect is factor * lambda
  double g_triv_tol = 1e-4;
  double tol_vi = 1e-8;
  int n_random_probes = 20;
  std::uint64_t probe_seed = 20240517;
};

struct MultiplierReport {
  ScalarField g;
  double g_min = 0.0;
  double g_max = 0.0;
  double complementarity_defect = 0.0; // max |g (1 - u)|
  double coincidence_measure = 0.0;    // volume of {u >= 1 - coin_tol}
  bool g_nontrivial = false;           // ||g||_1 > g_triv_tol * |Omega|
};

struct VIReport {
  ScalarField solution;
  MultiplierReport multiplier;
  double vi_defect = 0.0; // worst probe value, nonnegative up to tol_vi at solutions
  int iterations = 0;
  bool converged = false;
};

struct PsorResult {
  int sweeps = 0;
  double last_change = 0.0;
  bool converged = false;
};

// Projected SOR sweeps for A u = rhs subject to lo <= u <= hi.
PsorResult psor_box_solve(const DivFormOperator& A, const std::vector<double>& rhs, double lo,
                          double hi, std::vector<double>& u, double omega, double tol,
                          int max_sweeps);

// Bilateral obstacle solve of the limit problem: outer Picard iteration on
// the reaction term, projected SOR inner solves on the box [0, 1]. Converges
// to iteration-stable solutions (the minimizer branch and the trivial one).
VIReport solve_vi(const EnergyFunctional& F, const ScalarField& init,
                  const ObstacleOptions& opts = {});

// Branch-preserving solve: primal-dual active set plus a Newton
// linearization of the reaction. Locally convergent also at saddle-type
// solutions of the inequality, where the Picard iteration is repelled.
VIReport solve_vi_newton(const EnergyFunctional& F, const ScalarField& init,
                         const ObstacleOptions& opts = {});

// Raw complementarity multiplier g = (lambda (u+)^{p-1} vol - A u) / vol
// with box, complementarity and triviality diagnostics.
MultiplierReport extract_multiplier(const EnergyFunctional& F, const ScalarField& u,
                                    const ObstacleOptions& opts = {});

// min over probes v in K of the variational-inequality pairing at u.
double probe_vi(const EnergyFunctional& F, const ScalarField& u,
                std::span<const ScalarField> probes);

// {0, 1, clipped principal eigenfunction, seeded random box fields}.
std::vector<ScalarField> default_probes(const DivFormOperator& op, int n_random,
                                        std::uint64_t seed);

} // namespace penalab

#endif
