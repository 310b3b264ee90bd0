#ifndef PENALAB_GRID_HPP
#define PENALAB_GRID_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace penalab {

enum class DomainKind { interval, rectangle, disk };

// Geometric description of the domain before discretization.
struct DomainSpec {
  DomainKind kind = DomainKind::interval;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<double, 2> center{0.0, 0.0};
  double radius = 1.0;

  static DomainSpec interval(double a, double b);
  static DomainSpec rectangle(double ax, double bx, double ay, double by);
  static DomainSpec disk(double cx, double cy, double r);
};

// Structured lattice over the bounding box of the domain. Lattice nodes are
// either interior unknowns or held at zero (Dirichlet boundary, or outside a
// masked domain such as the disk). Immutable after construction; safe to
// share between threads.
class Grid {
public:
  Grid(const DomainSpec& dom, std::array<int, 2> n);

  int dim() const { return dim_; }
  const DomainSpec& domain() const { return dom_; }
  int n(int axis) const { return n_[axis]; }
  double h(int axis) const { return h_[axis]; }
  double extent_lo(int axis) const { return dom_.lo[axis]; }
  double extent_hi(int axis) const { return dom_.hi[axis]; }

  int num_nodes() const { return n_[0] * n_[1]; }
  int num_interior() const { return static_cast<int>(node_of_interior_.size()); }

  // |Omega|. Exact for interval/rectangle, cell-count quadrature for the disk.
  double measure() const { return measure_; }
  // Quadrature weight of one interior node.
  double cell_volume() const { return cell_volume_; }

  int node_id(int ix, int iy) const { return iy * n_[0] + ix; }
  // Interior index of a lattice node, -1 when the node is fixed at zero.
  int interior_index(int node) const { return interior_of_node_[node]; }
  int interior_index(int ix, int iy) const { return interior_of_node_[node_id(ix, iy)]; }
  int node_of_interior(int k) const { return node_of_interior_[k]; }

  double x_of(int ix) const { return dom_.lo[0] + ix * h_[0]; }
  double y_of(int iy) const { return dim_ == 2 ? dom_.lo[1] + iy * h_[1] : 0.0; }
  std::array<double, 2> interior_coords(int k) const;

  // Interior neighbor indices of interior node k, order {-x, +x, -y, +y};
  // -1 encodes a zero-valued (Dirichlet/exterior) neighbor.
  const std::array<std::int32_t, 4>& neighbors(int k) const { return nb_[k]; }

private:
  DomainSpec dom_;
  int dim_;
  std::array<int, 2> n_;
  std::array<double, 2> h_;
  double measure_;
  double cell_volume_;
  std::vector<std::int32_t> interior_of_node_;
  std::vector<std::int32_t> node_of_interior_;
  std::vector<std::array<std::int32_t, 4>> nb_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const DomainSpec& dom, std::array<int, 2> n);
GridPtr build_grid(const DomainSpec& dom, int n);

// Nodal values at the interior nodes of a grid; boundary and exterior lattice
// values are implicitly zero.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  template <class F>
  static ScalarField from_function(GridPtr grid, F&& f) {
    ScalarField out(grid);
    for (int k = 0; k < out.size(); ++k) {
      auto xy = grid->interior_coords(k);
      out.v_[k] = f(xy[0], xy[1]);
    }
    return out;
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int k) const { return v_[k]; }
  double& operator[](int k) { return v_[k]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  const double* data() const { return v_.data(); }
  double* data() { return v_.data(); }

  double min() const;
  double max() const;
  bool all_finite() const;
  // Throws std::runtime_error when a value is NaN or infinite.
  void require_finite(const char* where) const;

private:
  GridPtr grid_;
  std::vector<double> v_;
};

// || f ||_q with the nodal quadrature; q = infinity returns max |f|.
double lp_norm(const ScalarField& f, double q);
// sum_i |f_i|^q * vol_i, saturated at 1e300.
double lp_power_sum(const ScalarField& f, double q);
// sum over lattice edges of (df/h)^2 * cell volume, edges to zero included.
double h1_seminorm_sq(const ScalarField& f);
// Pointwise clamp to [lo, hi].
ScalarField project_box(const ScalarField& f, double lo, double hi);

double dot(const ScalarField& a, const ScalarField& b);
// Quadrature-weighted L2 distance of two fields on one grid.
double l2_distance(const ScalarField& a, const ScalarField& b);
double linf_distance(const ScalarField& a, const ScalarField& b);

} // namespace penalab

#endif
