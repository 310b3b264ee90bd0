#ifndef PENALAB_OPERATOR_HPP
#define PENALAB_OPERATOR_HPP

#include <functional>
#include <string>
#include <vector>

#include "penalab/grid.hpp"

namespace penalab {

// Symmetric 2x2 coefficient sample; m12 is ignored in 1D.
struct SymMat2 {
  double m11 = 1.0;
  double m22 = 1.0;
  double m12 = 0.0;
};

// Coefficient matrix M(x) of the divergence-form operator, with ellipticity
// bounds alpha <= M <= beta on the spectrum.
class CoeffField {
public:
  enum class Kind { identity, scalar, matrix };

  static CoeffField identity();
  static CoeffField scaled_identity(double c);
  static CoeffField aniso(double a1, double a2);
  // 1 + 0.5 * exp(-|x - x0|^2), centered at the domain midpoint.
  static CoeffField bump(const DomainSpec& dom);
  static CoeffField scalar_fn(std::function<double(double, double)> a, double alpha, double beta);

  SymMat2 sample(double x, double y) const;
  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const std::string& name() const { return name_; }

private:
  Kind kind_ = Kind::identity;
  double alpha_ = 1.0;
  double beta_ = 1.0;
  double a1_ = 1.0, a2_ = 1.0;
  std::array<double, 2> x0_{0.0, 0.0};
  bool is_bump_ = false;
  std::function<double(double, double)> fn_;
  std::string name_ = "identity";
};

// Assembled five-point flux stencil for v -> -div(M(x) grad v) on the
// interior nodes, volume weighted: u . (A v) approximates the Dirichlet form.
class DivFormOperator {
public:
  static DivFormOperator assemble(GridPtr grid, const CoeffField& coeff);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const CoeffField& coeff() const { return coeff_; }
  int size() const { return n_; }

  void apply(const double* x, double* y) const;
  ScalarField apply(const ScalarField& f) const;
  // v . (A v)
  double quadratic_form(const ScalarField& f) const;
  double diag(int k) const { return diag_[k]; }
  const std::vector<double>& diag() const { return diag_; }
  // Lumped mass: quadrature weight per interior node.
  double mass(int) const { return grid_->cell_volume(); }

  // CSR access for relaxation sweeps.
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return col_; }
  const std::vector<double>& vals() const { return val_; }

private:
  GridPtr grid_;
  CoeffField coeff_;
  int n_ = 0;
  std::vector<int> row_ptr_, col_;
  std::vector<double> val_;
  std::vector<double> diag_;
};

struct LinearSolveResult {
  ScalarField x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
  bool breakdown = false;
};

// Conjugate-gradient solve of A x = rhs to a relative residual.
LinearSolveResult solve_linear(const DivFormOperator& op, const ScalarField& rhs,
                               double tol = 1e-10, int max_iter = -1, bool jacobi = false);

struct EigenPair {
  double lambda1 = 0.0;
  ScalarField phi1;
  int iterations = 0;
  double residual = 0.0;
};

// Smallest eigenpair of A phi = lambda Mass phi by inverse iteration;
// phi1 is nonnegative with unit sup norm.
EigenPair principal_eigenpair(const DivFormOperator& op, double tol = 1e-10, int max_iter = 400);

} // namespace penalab

#endif
