#ifndef PENALAB_MINIMIZE_HPP
#define PENALAB_MINIMIZE_HPP

#include <cstdint>
#include <vector>

#include "penalab/functional.hpp"

namespace penalab {

struct SolveOptions {
  double tol_resid = 1e-9;   // relative to the initial residual
  int max_iter = 5000;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double step0 = 1.0;
  bool use_newton = true;
  double lin_tol = 1e-10;
  double tol_vi = 1e-8;
};

struct HistoryEntry {
  double level = 0.0;
  double residual = 0.0;
};

struct SolveReport {
  ScalarField solution;
  double level = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  // level - min(0, limit level of the scaled ray profile); positive values
  // flag a run that did not certify a negative level.
  double negativity_certificate = 0.0;
  std::vector<HistoryEntry> history;
};

struct InitialGuess {
  ScalarField field;
  ScalingReport scaling;
  // Set when lambda <= Lambda(psi0): a negative level is not guaranteed.
  bool lambda_below_threshold = false;
};

// Ray start T_m * psi0 for the descent, with its scaling diagnostics.
InitialGuess initial_guess(const EnergyFunctional& F, const ScalarField& psi0);

// Projected descent with Armijo backtracking plus Newton refinement for the
// penalized energy over {v >= 0}.
SolveReport minimize_jm(const EnergyFunctional& F, const ScalarField& init,
                        const SolveOptions& opts = {}, double delta_floor = 0.0);

// Projected gradient (spectral steps, Armijo safeguard) for the limit energy
// over the box constraint set {0 <= v <= 1}, with a free-set Newton polish.
SolveReport minimize_jinf_on_K(const EnergyFunctional& F, const ScalarField& init,
                               const SolveOptions& opts = {});

// Scaled ray start plus n_random seeded nonnegative starts; returns the
// lowest converged level. jobs > 1 runs the starts concurrently.
SolveReport minimize_jm_multistart(const EnergyFunctional& F, const ScalarField& psi0,
                                   int n_random, std::uint64_t seed,
                                   const SolveOptions& opts = {}, int jobs = 1,
                                   std::vector<double>* all_levels = nullptr);

// Deterministic uniform values in [0,1) from a counter-seeded generator.
std::vector<double> uniform_sequence(std::uint64_t seed, std::size_t count);

} // namespace penalab

#endif
