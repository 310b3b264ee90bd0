#ifndef PENALAB_MOUNTAINPASS_HPP
#define PENALAB_MOUNTAINPASS_HPP

#include "penalab/minimize.hpp"

namespace penalab {

struct GeometryReport {
  double r_lambda = 0.0;
  double rho_m_lambda = 0.0;
  double sobolev_S = 0.0;     // discrete estimate of sup ||v||_p^2 / ||grad v||_2^2
  double R_threshold = 0.0;   // diagnostic only
  double endpoint_norm = 0.0; // || T_m psi0 ||_{H1} + || T_m psi0 ||_m
  bool geometry_ok = false;
};

struct MPHistoryEntry {
  int iteration = 0;
  double max_level = 0.0;
  double residual = 0.0;
};

struct MPReport {
  ScalarField solution;
  double level = 0.0;
  std::vector<ScalarField> path;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double level_floor = 0.0;
  bool collapsed = false; // path maximum fell to the zero level: no ridge
  std::vector<MPHistoryEntry> history;
};

// Discrete estimate of sup ||v||_p / ||grad v||_2, squared, by a power-type
// iteration on the Laplacian of the grid.
double estimate_embedding_constant(GridPtr grid, double p, int iters = 40);

// Ridge radius, level floor and endpoint diagnostics of the minimax geometry.
GeometryReport mp_geometry(const EnergyFunctional& F, const ScalarField& psi0);

// Path-deformation minimax solver: discretize the segment [0, endpoint],
// repeatedly relax the path maximizer and re-space the path, then polish the
// maximizer with a Newton iteration on the stationarity system.
MPReport mountain_pass(const EnergyFunctional& F, const ScalarField& endpoint, int n_path,
                       const SolveOptions& opts = {});

// Positive lower bound rho_inf for the limit minimax level, from the measured
// embedding constant.
double mp_limit_floor(const EnergyFunctional& F);

// Newton polish of a near-critical point toward a (possibly saddle) solution
// of the stationarity system; returns false when the iteration left the basin.
bool newton_polish(const EnergyFunctional& F, ScalarField& z, double tol_abs, int max_steps,
                   double lin_tol = 1e-10);

} // namespace penalab

#endif
