#ifndef PENALAB_KRYLOV_HPP
#define PENALAB_KRYLOV_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace penalab {

struct KrylovResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
  // CG only: a direction with p'Ap <= 0 was met, the matrix is not SPD.
  bool breakdown = false;
};

// Conjugate gradients for symmetric positive definite operators.
// op(x, y) computes y = A x. Optional Jacobi preconditioner via diag.
template <class Op>
KrylovResult cg_solve(std::size_t n, Op&& op, const std::vector<double>& b,
                      std::vector<double>& x, double tol, int max_iter,
                      const double* jacobi_diag = nullptr) {
  KrylovResult res;
  x.assign(n, 0.0);
  std::vector<double> r = b, z(n), p(n), q(n);
  auto nrm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
  };
  const double bnorm = nrm2(b);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
    if (jacobi_diag)
      for (std::size_t i = 0; i < n; ++i) out[i] = in[i] / jacobi_diag[i];
    else
      out = in;
  };
  precond(r, z);
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
  for (int it = 0; it < max_iter; ++it) {
    op(p.data(), q.data());
    double pq = 0.0;
    for (std::size_t i = 0; i < n; ++i) pq += p[i] * q[i];
    if (!(pq > 0.0)) {
      res.breakdown = true;
      res.iterations = it;
      res.rel_residual = nrm2(r) / bnorm;
      return res;
    }
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    res.iterations = it + 1;
    res.rel_residual = nrm2(r) / bnorm;
    if (res.rel_residual <= tol) {
      res.converged = true;
      return res;
    }
    precond(r, z);
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

// MINRES for symmetric (possibly indefinite) operators.
template <class Op>
KrylovResult minres_solve(std::size_t n, Op&& op, const std::vector<double>& b,
                          std::vector<double>& x, double tol, int max_iter) {
  KrylovResult res;
  x.assign(n, 0.0);
  auto nrm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
  };
  std::vector<double> v = b;
  double beta = nrm2(v);
  if (beta == 0.0) {
    res.converged = true;
    return res;
  }
  const double beta1 = beta;
  std::vector<double> v_old(n, 0.0), w(n, 0.0), w_old(n, 0.0), u(n);
  for (double& t : v) t /= beta;
  double eta = beta, gamma = 1.0, gamma_old = 1.0, sigma = 0.0, sigma_old = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    op(v.data(), u.data());
    for (std::size_t i = 0; i < n; ++i) u[i] -= beta * v_old[i];
    double alpha = 0.0;
    for (std::size_t i = 0; i < n; ++i) alpha += v[i] * u[i];
    for (std::size_t i = 0; i < n; ++i) u[i] -= alpha * v[i];
    const double beta_new = nrm2(u);

    const double delta = gamma * alpha - gamma_old * sigma * beta;
    const double rho1 = std::sqrt(delta * delta + beta_new * beta_new);
    const double rho2 = sigma * alpha + gamma_old * gamma * beta;
    const double rho3 = sigma_old * beta;
    const double gamma_new = delta / rho1;
    const double sigma_new = beta_new / rho1;

    for (std::size_t i = 0; i < n; ++i) {
      const double wi = (v[i] - rho3 * w_old[i] - rho2 * w[i]) / rho1;
      w_old[i] = w[i];
      w[i] = wi;
      x[i] += gamma_new * eta * wi;
    }
    eta = -sigma_new * eta;
    res.iterations = it + 1;
    res.rel_residual = std::fabs(eta) / beta1;
    if (res.rel_residual <= tol) {
      res.converged = true;
      return res;
    }
    if (beta_new == 0.0) return res;
    v_old.swap(v);
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / beta_new;
    beta = beta_new;
    gamma_old = gamma;
    gamma = gamma_new;
    sigma_old = sigma;
    sigma = sigma_new;
  }
  return res;
}

} // namespace penalab

#endif
