#include "penalab/functional.hpp"

#include <cmath>
#include <stdexcept>

namespace penalab {

void ProblemParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("params: lambda must be positive");
  if (!(p > 2.0)) throw std::invalid_argument("params: need p > 2");
  if (m_finite() && !(m > p)) throw std::invalid_argument("params: need m > p");
}

double safe_pow(double x, double q) {
  if (!(x > 0.0)) return 0.0;
  const double r = std::pow(x, q);
  if (!(r < kPowerCap)) return kPowerCap;
  return r;
}

EnergyFunctional::EnergyFunctional(const DivFormOperator& op, ProblemParams prm)
    : op_(&op), prm_(prm) {
  prm_.validate();
}

EnergyFunctional EnergyFunctional::with_m(double m) const {
  ProblemParams p2 = prm_;
  p2.m = m;
  return EnergyFunctional(*op_, p2);
}

double EnergyFunctional::value_inf(const ScalarField& v, EvalWarnings*) const {
  const double vol = grid().cell_volume();
  double react = 0.0;
  for (double x : v.values()) react += safe_pow(x, prm_.p);
  react *= vol;
  return 0.5 * op_->quadratic_form(v) - prm_.lambda / prm_.p * react;
}

ScalarField EnergyFunctional::gradient_inf(const ScalarField& v, EvalWarnings*) const {
  const double vol = grid().cell_volume();
  ScalarField g = op_->apply(v);
  for (int k = 0; k < v.size(); ++k) g[k] -= prm_.lambda * safe_pow(v[k], prm_.p - 1.0) * vol;
  return g;
}

double EnergyFunctional::value(const ScalarField& v, EvalWarnings* w) const {
  if (!prm_.m_finite()) return value_inf(v, w);
  const double vol = grid().cell_volume();
  if (prm_.m > kPenaltyExponentCap) {
    // Indicator surrogate: zero inside the unit ball of the sup norm,
    // saturated outside. Reported, not a differentiable energy.
    double pen = 0.0;
    for (double x : v.values())
      if (std::fabs(x) > 1.0) pen = kPowerCap;
    if (w) w->indicator_mode = true;
    return value_inf(v, w) + pen;
  }
  double pen = 0.0, react = 0.0;
  long sat = 0;
  for (double x : v.values()) {
    const double pm = safe_pow(std::fabs(x), prm_.m);
    if (pm >= kPowerCap) ++sat;
    pen += pm;
    react += safe_pow(x, prm_.p);
  }
  if (w) w->saturated += sat;
  pen = std::min(pen * vol, kPowerCap);
  react *= vol;
  return 0.5 * op_->quadratic_form(v) + pen / prm_.m - prm_.lambda / prm_.p * react;
}

ScalarField EnergyFunctional::gradient(const ScalarField& v, EvalWarnings* w) const {
  if (!prm_.m_finite()) return gradient_inf(v, w);
  const double vol = grid().cell_volume();
  ScalarField g = op_->apply(v);
  long sat = 0;
  for (int k = 0; k < v.size(); ++k) {
    const double x = v[k];
    const double pm = safe_pow(std::fabs(x), prm_.m - 1.0);
    if (pm >= kPowerCap) ++sat;
    g[k] += (x >= 0.0 ? pm : -pm) * vol;
    g[k] -= prm_.lambda * safe_pow(x, prm_.p - 1.0) * vol;
  }
  if (w) w->saturated += sat;
  return g;
}

std::vector<double> EnergyFunctional::hessian_diagonal(const ScalarField& v) const {
  const double vol = grid().cell_volume();
  std::vector<double> d(v.size(), 0.0);
  for (int k = 0; k < v.size(); ++k) {
    double t = -prm_.lambda * (prm_.p - 1.0) * safe_pow(v[k], prm_.p - 2.0);
    if (prm_.m_finite()) t += (prm_.m - 1.0) * safe_pow(std::fabs(v[k]), prm_.m - 2.0);
    d[k] = t * vol;
  }
  return d;
}

ScalingReport scaling_constants(const EnergyFunctional& F, const ScalarField& psi) {
  const ProblemParams& prm = F.params();
  ScalingReport r;
  const double sup = lp_norm(psi, std::numeric_limits<double>::infinity());
  if (sup == 0.0) throw std::invalid_argument("scaling_constants: psi must be nonzero");
  const double h1 = h1_seminorm_sq(psi);
  const double pp = lp_power_sum(psi, prm.p);
  const double beta = F.op().coeff().beta();
  const double p = prm.p;

  r.a = 0.5 * beta * h1 / pp;
  r.T_inf = 1.0 / sup;
  r.Lambda_psi = p * 0.5 * beta * h1 * std::pow(sup, p - 2.0) / pp;

  auto scaled = [&](double t) {
    ScalarField tpsi = psi;
    for (double& x : tpsi.values()) x *= t;
    return tpsi;
  };
  r.J_inf_at_Tinf_psi = F.value_inf(scaled(r.T_inf));

  if (prm.m_finite()) {
    const double m = prm.m;
    r.b_m = lp_power_sum(psi, m) / (m * pp);
    r.T_m = std::pow((p - 2.0) / (m - p) * r.a / r.b_m, 1.0 / (m - 2.0));
    const double g_at_tm = r.a / std::pow(r.T_m, p - 2.0) + r.b_m * std::pow(r.T_m, m - p);
    r.lambda_m_psi = p * g_at_tm;
    r.J_m_at_Tm_psi = F.value(scaled(r.T_m));
  } else {
    r.b_m = 0.0;
    r.T_m = r.T_inf;
    r.lambda_m_psi = r.Lambda_psi;
    r.J_m_at_Tm_psi = r.J_inf_at_Tinf_psi;
  }
  return r;
}

Lambda1Bound lambda1_lower_bound(const DivFormOperator& op, const ProblemParams& prm) {
  // The floor is stated for the Dirichlet Laplacian, independently of M.
  EigenPair ep;
  if (op.coeff().kind() == CoeffField::Kind::identity) {
    ep = principal_eigenpair(op);
  } else {
    DivFormOperator lap = DivFormOperator::assemble(op.grid_ptr(), CoeffField::identity());
    ep = principal_eigenpair(lap);
  }
  const double beta = op.coeff().beta();
  Lambda1Bound out;
  out.lambda1_dir = ep.lambda1;
  out.floor = prm.p * 0.5 * beta * ep.lambda1;

  const double h1 = h1_seminorm_sq(ep.phi1);
  const double pp = lp_power_sum(ep.phi1, prm.p);
  const double sup = lp_norm(ep.phi1, std::numeric_limits<double>::infinity());
  out.Lambda_phi1 = prm.p * 0.5 * beta * h1 * std::pow(sup, prm.p - 2.0) / pp;
  out.phi1 = std::move(ep.phi1);
  if (out.floor > out.Lambda_phi1 * (1.0 + 1e-10))
    throw std::runtime_error("lambda1_lower_bound: floor exceeds Lambda(phi1)");
  return out;
}

AprioriReport check_apriori(const EnergyFunctional& F, const ScalarField& w, double tol_apriori) {
  const ProblemParams& prm = F.params();
  if (!prm.m_finite()) throw std::invalid_argument("check_apriori: needs finite m");
  const double lambda = prm.lambda, m = prm.m, p = prm.p;
  const double meas = F.grid().measure();
  AprioriReport r;
  r.linf_bound = std::pow(lambda, 1.0 / (m - p));
  r.linf_actual = lp_norm(w, std::numeric_limits<double>::infinity());
  r.lm_bound = std::pow(lambda, m / (m - p)) * meas;
  r.lm_actual = lp_power_sum(w, m);
  r.energy_bound = meas * std::pow(lambda, m / (m - p));
  r.energy_actual = F.op().coeff().alpha() * h1_seminorm_sq(w) + r.lm_actual;
  const double s = 1.0 + tol_apriori;
  r.all_pass = r.linf_actual <= r.linf_bound * s && r.lm_actual <= r.lm_bound * s &&
               r.energy_actual <= r.energy_bound * s;
  return r;
}

double find_negative_level_m(const EnergyFunctional& F, const ScalarField& psi, double m_start) {
  const double lambda = F.params().lambda;
  double m = std::max(m_start, F.params().p * 1.5);
  for (int i = 0; i < 64; ++i) {
    ScalingReport r = scaling_constants(F.with_m(m), psi);
    if (r.lambda_m_psi < lambda) return m;
    m *= 2.0;
    if (m > kPenaltyExponentCap) break;
  }
  throw std::runtime_error("find_negative_level_m: no admissible m below the exponent cap");
}

} // namespace penalab
