#ifndef PENALAB_DRIVER_HPP
#define PENALAB_DRIVER_HPP

#include <string>

#include "penalab/config.hpp"

namespace penalab {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 converged, 2 completed without convergence. Errors throw and
// the command line maps them to 1.
struct RunResult {
  int exit_code = 0;
  std::string output_dir;
};

// Subcommands: solve-min, solve-mp, obstacle, sweep, radial, eigen, constants.
RunResult run(const std::string& subcommand, const ExperimentConfig& cfg);

// Output directory after the PENALAB_OUT override, created on demand.
std::string resolve_output_dir(const ExperimentConfig& cfg);

} // namespace penalab

#endif
