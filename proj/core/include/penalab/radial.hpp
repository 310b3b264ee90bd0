#ifndef PENALAB_RADIAL_HPP
#define PENALAB_RADIAL_HPP

#include <array>
#include <string>
#include <vector>

namespace penalab {

// Unit-ball profile of -Delta U = U^{p-1}, U > 0, U = 0 on the boundary,
// obtained by shooting from the center and rescaling the first zero to 1.
struct RadialProfile {
  double p = 0.0;
  int N = 1;
  double r0 = 0.0; // first zero of the center-normalized profile
  double U0 = 0.0; // center value of the unit-ball solution, r0^{2/(p-2)}
  std::vector<std::array<double, 2>> samples; // (r, U(r)) on [0, 1], uniform in r
  double energy = 0.0;  // ||grad U||_2^2 on the unit ball
  double lp_mass = 0.0; // ||U||_p^p on the unit ball
};

// The first zero grows exponentially in p (the profile decays only
// logarithmically in 2d), hence the generous default range.
RadialProfile shoot(double p, int N, double ode_tol = 1e-10, double r_max = 1e10,
                    int n_samples = 1025);

// Largest collocation residual of the sampled profile in the radial equation,
// via high-order finite differences away from the endpoints.
double max_pde_residual(const RadialProfile& prof);

// Residual of the scaled family (1/(lambda R^2))^{1/(p-2)} U(x/R) in the
// lambda-reaction equation on the ball of radius R.
double max_scaled_residual(const RadialProfile& prof, double lambda, double R);

struct GzCandidate {
  std::string name;
  double Lambda = 0.0;        // threshold value of the profile
  bool interval_nonempty = false; // Lambda < U0^{p-2}
};

struct GzConditionReport {
  double p = 0.0;
  int N = 1;
  double lambda = 0.0;
  double R = 0.0;
  double U0 = 0.0;
  double u0_pow = 0.0;        // U0^{p-2}
  double cond_b_value = 0.0;  // (1/(lambda R^2))^{1/(p-2)} U0
  bool cond_b = false;
  double Lambda_U = 0.0;          // (p/2) U0^{p-2} from the profile norms
  double Lambda_U_identity = 0.0; // (p/2) U0^{p-2} closed form
  std::vector<GzCandidate> candidates;
};

// Checks the center-value condition and the threshold interval test for the
// profile itself and the principal ball eigenfunction.
GzConditionReport check_gz_conditions(double p, int N, double lambda, double R,
                                      double ode_tol = 1e-10);

// lambda^{-1/(p-2)} * U0: the sup norm of the scaled unit-ball solution.
double infinity_limit_norm(double p, double lambda, int N, double ode_tol = 1e-10);

// Threshold value of the principal ball eigenfunction (unit ball, beta = 1).
double Lambda_ball_eigenfunction(double p, int N);

} // namespace penalab

#endif
