#include "penalab/operator.hpp"

#include <cmath>
#include <stdexcept>

#include "penalab/krylov.hpp"

namespace penalab {

CoeffField CoeffField::identity() { return CoeffField(); }

CoeffField CoeffField::scaled_identity(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("coeff: scale must be positive");
  CoeffField f;
  f.kind_ = Kind::scalar;
  f.a1_ = f.a2_ = c;
  f.alpha_ = f.beta_ = c;
  f.name_ = "scaled_identity";
  return f;
}

CoeffField CoeffField::aniso(double a1, double a2) {
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw std::invalid_argument("coeff: aniso entries must be positive");
  CoeffField f;
  f.kind_ = Kind::matrix;
  f.a1_ = a1;
  f.a2_ = a2;
  f.alpha_ = std::min(a1, a2);
  f.beta_ = std::max(a1, a2);
  f.name_ = "aniso";
  return f;
}

CoeffField CoeffField::bump(const DomainSpec& dom) {
  CoeffField f;
  f.kind_ = Kind::scalar;
  f.is_bump_ = true;
  if (dom.kind == DomainKind::disk)
    f.x0_ = dom.center;
  else
    f.x0_ = {0.5 * (dom.lo[0] + dom.hi[0]), 0.5 * (dom.lo[1] + dom.hi[1])};
  f.alpha_ = 1.0;
  f.beta_ = 1.5;
  f.name_ = "bump";
  return f;
}

CoeffField CoeffField::scalar_fn(std::function<double(double, double)> a, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta >= alpha)) throw std::invalid_argument("coeff: need 0 < alpha <= beta");
  CoeffField f;
  f.kind_ = Kind::scalar;
  f.fn_ = std::move(a);
  f.alpha_ = alpha;
  f.beta_ = beta;
  f.name_ = "scalar_fn";
  return f;
}

SymMat2 CoeffField::sample(double x, double y) const {
  switch (kind_) {
    case Kind::identity:
      return {1.0, 1.0, 0.0};
    case Kind::scalar: {
      double a;
      if (is_bump_) {
        const double dx = x - x0_[0], dy = y - x0_[1];
        a = 1.0 + 0.5 * std::exp(-(dx * dx + dy * dy));
      } else if (fn_) {
        a = fn_(x, y);
      } else {
        a = a1_;
      }
      return {a, a, 0.0};
    }
    case Kind::matrix:
      return {a1_, a2_, 0.0};
  }
  return {1.0, 1.0, 0.0};
}

DivFormOperator DivFormOperator::assemble(GridPtr grid, const CoeffField& coeff) {
  DivFormOperator op;
  op.grid_ = std::move(grid);
  op.coeff_ = coeff;
  const Grid& g = *op.grid_;
  const int n = g.num_interior();
  op.n_ = n;
  const double vol = g.cell_volume();

  // Sample M at every interior node once; Dirichlet/exterior neighbors reuse
  // the interior-side sample for the edge average.
  std::vector<SymMat2> msample(n);
  for (int k = 0; k < n; ++k) {
    auto xy = g.interior_coords(k);
    SymMat2 m = coeff.sample(xy[0], xy[1]);
    if (m.m12 != 0.0)
      throw std::invalid_argument("assemble: off-diagonal coefficients are not supported by the flux stencil");
    if (!(m.m11 > 0.0) || !(m.m22 > 0.0))
      throw std::invalid_argument("assemble: coefficient sample is not positive definite");
    const double lo = std::min(m.m11, m.m22), hi = std::max(m.m11, m.m22);
    if (lo < coeff.alpha() * (1.0 - 1e-12) || hi > coeff.beta() * (1.0 + 1e-12))
      throw std::invalid_argument("assemble: coefficient sample violates the declared alpha/beta bounds");
    msample[k] = m;
  }

  std::vector<std::vector<std::pair<int, double>>> rows(n);
  std::vector<double> diag(n, 0.0);
  const double inv_h2[2] = {1.0 / (g.h(0) * g.h(0)),
                            g.dim() == 2 ? 1.0 / (g.h(1) * g.h(1)) : 0.0};
  for (int k = 0; k < n; ++k) {
    const auto& nb = g.neighbors(k);
    for (int dir = 0; dir < 2 * g.dim(); ++dir) {
      const int axis = dir / 2;
      const int j = nb[dir];
      const double mk = axis == 0 ? msample[k].m11 : msample[k].m22;
      const double mj = j >= 0 ? (axis == 0 ? msample[j].m11 : msample[j].m22) : mk;
      const double mu = 0.5 * (mk + mj);
      const double w = mu * inv_h2[axis] * vol;
      diag[k] += w;
      if (j >= 0) rows[k].push_back({j, -w});
    }
  }

  op.row_ptr_.assign(n + 1, 0);
  for (int k = 0; k < n; ++k) op.row_ptr_[k + 1] = op.row_ptr_[k] + 1 + static_cast<int>(rows[k].size());
  op.col_.resize(op.row_ptr_[n]);
  op.val_.resize(op.row_ptr_[n]);
  op.diag_ = diag;
  for (int k = 0; k < n; ++k) {
    int at = op.row_ptr_[k];
    op.col_[at] = k;
    op.val_[at] = diag[k];
    ++at;
    for (auto [j, w] : rows[k]) {
      op.col_[at] = j;
      op.val_[at] = w;
      ++at;
    }
  }
  return op;
}

void DivFormOperator::apply(const double* x, double* y) const {
  for (int k = 0; k < n_; ++k) {
    double s = 0.0;
    for (int a = row_ptr_[k]; a < row_ptr_[k + 1]; ++a) s += val_[a] * x[col_[a]];
    y[k] = s;
  }
}

ScalarField DivFormOperator::apply(const ScalarField& f) const {
  if (f.grid_ptr().get() != grid_.get())
    throw std::invalid_argument("operator: field lives on a different grid");
  ScalarField out(grid_);
  apply(f.data(), out.data());
  return out;
}

double DivFormOperator::quadratic_form(const ScalarField& f) const {
  ScalarField t = apply(f);
  return dot(f, t);
}

LinearSolveResult solve_linear(const DivFormOperator& op, const ScalarField& rhs,
                               double tol, int max_iter, bool jacobi) {
  const int n = op.size();
  if (rhs.size() != n) throw std::invalid_argument("solve_linear: rhs on different grid");
  if (max_iter < 0) max_iter = 10 * n + 100;
  std::vector<double> x;
  auto r = cg_solve(
      n, [&](const double* in, double* out) { op.apply(in, out); }, rhs.values(), x, tol,
      max_iter, jacobi ? op.diag().data() : nullptr);
  LinearSolveResult out{ScalarField(op.grid_ptr(), std::move(x)), r.iterations, r.rel_residual,
                        r.converged, r.breakdown};
  return out;
}

EigenPair principal_eigenpair(const DivFormOperator& op, double tol, int max_iter) {
  const Grid& g = op.grid();
  const int n = op.size();
  const double vol = g.cell_volume();
  ScalarField x(op.grid_ptr(), 1.0);
  ScalarField ax(op.grid_ptr());
  double lambda = 0.0;
  int it = 0;
  double resid = 0.0;
  for (it = 1; it <= max_iter; ++it) {
    ScalarField b(op.grid_ptr());
    for (int k = 0; k < n; ++k) b[k] = vol * x[k];
    auto sol = solve_linear(op, b, 1e-12);
    if (!sol.converged && sol.rel_residual > 1e-8)
      throw std::runtime_error("principal_eigenpair: inner linear solve failed");
    x = sol.x;
    // Sup normalization with a sign convention from the dominant entry.
    double mx = 0.0;
    for (int k = 0; k < n; ++k)
      if (std::fabs(x[k]) > std::fabs(mx)) mx = x[k];
    if (mx == 0.0) throw std::runtime_error("principal_eigenpair: iterate collapsed to zero");
    for (int k = 0; k < n; ++k) x[k] /= mx;

    op.apply(x.data(), ax.data());
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
      num += x[k] * ax[k];
      den += x[k] * x[k] * vol;
    }
    lambda = num / den;
    double r2 = 0.0, m2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double mk = vol * x[k];
      const double rk = ax[k] - lambda * mk;
      r2 += rk * rk;
      m2 += mk * mk;
    }
    resid = std::sqrt(r2) / std::sqrt(m2);
    if (resid <= tol * std::max(lambda, 1e-30)) break;
  }
  if (it > max_iter) throw std::runtime_error("principal_eigenpair: inverse iteration did not converge");
  const double floor = -1e-8 * x.max();
  for (int k = 0; k < n; ++k)
    if (x[k] < floor) throw std::runtime_error("principal_eigenpair: eigenfunction changes sign");
  EigenPair out;
  out.lambda1 = lambda;
  out.phi1 = std::move(x);
  out.iterations = it;
  out.residual = resid;
  return out;
}

} // namespace penalab
