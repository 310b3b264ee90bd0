#ifndef PENALAB_FUNCTIONAL_HPP
#define PENALAB_FUNCTIONAL_HPP

#include <cmath>
#include <limits>

#include "penalab/operator.hpp"

namespace penalab {

// Exponent cap for the penalty power; past it the penalty term in the energy
// is replaced by an indicator surrogate (exp/log roundoff dominates there).
inline constexpr double kPenaltyExponentCap = 4096.0;
// Saturation value for large powers.
inline constexpr double kPowerCap = 1e300;

struct ProblemParams {
  double lambda = 1.0;
  double p = 4.0;
  // m > p selects the penalized energy, infinity the limit energy.
  double m = std::numeric_limits<double>::infinity();

  bool m_finite() const { return std::isfinite(m); }
  static double two_star(int dim) {
    return dim > 2 ? 2.0 * dim / (dim - 2.0) : std::numeric_limits<double>::infinity();
  }
  // Throws std::invalid_argument when the exponent/parameter constraints fail.
  void validate() const;
};

struct EvalWarnings {
  long saturated = 0;
  bool indicator_mode = false;
};

// x^q for x >= 0, hard-saturated at kPowerCap; total and monotone in x.
double safe_pow(double x, double q);

// Penalized energy and its limit on one assembled operator.
class EnergyFunctional {
public:
  EnergyFunctional(const DivFormOperator& op, ProblemParams prm);

  const DivFormOperator& op() const { return *op_; }
  const ProblemParams& params() const { return prm_; }
  const Grid& grid() const { return op_->grid(); }

  // J_m (finite m) or the limit energy when m is infinite.
  double value(const ScalarField& v, EvalWarnings* w = nullptr) const;
  ScalarField gradient(const ScalarField& v, EvalWarnings* w = nullptr) const;

  // Limit energy regardless of the configured m.
  double value_inf(const ScalarField& v, EvalWarnings* w = nullptr) const;
  ScalarField gradient_inf(const ScalarField& v, EvalWarnings* w = nullptr) const;

  // Diagonal of the second derivative (without the stiffness part).
  std::vector<double> hessian_diagonal(const ScalarField& v) const;

  EnergyFunctional with_m(double m) const;

private:
  const DivFormOperator* op_;
  ProblemParams prm_;
};

struct ScalingReport {
  double a = 0.0;
  double b_m = 0.0;
  double T_m = 0.0;
  double lambda_m_psi = 0.0;
  double Lambda_psi = 0.0;
  double T_inf = 0.0;
  double J_m_at_Tm_psi = 0.0;
  double J_inf_at_Tinf_psi = 0.0;
};

// Constants of the one-variable ray reduction g_m(t) = a/t^{p-2} + b_m t^{m-p}
// for a nonzero profile psi, plus the energy levels at the ray minimizers.
ScalingReport scaling_constants(const EnergyFunctional& F, const ScalarField& psi);

struct Lambda1Bound {
  double lambda1_dir = 0.0;   // principal Dirichlet eigenvalue of the Laplacian
  double Lambda_phi1 = 0.0;   // upper estimate of the minimal threshold
  double floor = 0.0;         // p*(beta/2)*lambda1_dir
  ScalarField phi1;
};

// Threshold estimate Lambda(phi1) together with its analytic floor.
Lambda1Bound lambda1_lower_bound(const DivFormOperator& op, const ProblemParams& prm);

struct AprioriReport {
  double linf_bound = 0.0;
  double linf_actual = 0.0;
  double lm_bound = 0.0;
  double lm_actual = 0.0;
  double energy_bound = 0.0;
  double energy_actual = 0.0;
  bool all_pass = false;
};

// Sup, L^m and energy bounds every solution of the penalized problem obeys.
AprioriReport check_apriori(const EnergyFunctional& F, const ScalarField& w,
                            double tol_apriori = 0.02);

// Smallest m in a doubling scan with lambda_m(psi) < lambda (negative ray level).
double find_negative_level_m(const EnergyFunctional& F, const ScalarField& psi, double m_start);

} // namespace penalab

#endif
