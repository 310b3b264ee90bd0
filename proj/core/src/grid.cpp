#include "penalab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace penalab {

DomainSpec DomainSpec::interval(double a, double b) {
  DomainSpec d;
  d.kind = DomainKind::interval;
  d.lo = {a, 0.0};
  d.hi = {b, 1.0};
  return d;
}

DomainSpec DomainSpec::rectangle(double ax, double bx, double ay, double by) {
  DomainSpec d;
  d.kind = DomainKind::rectangle;
  d.lo = {ax, ay};
  d.hi = {bx, by};
  return d;
}

DomainSpec DomainSpec::disk(double cx, double cy, double r) {
  DomainSpec d;
  d.kind = DomainKind::disk;
  d.center = {cx, cy};
  d.radius = r;
  d.lo = {cx - r, cy - r};
  d.hi = {cx + r, cy + r};
  return d;
}

Grid::Grid(const DomainSpec& dom, std::array<int, 2> n) : dom_(dom) {
  dim_ = dom.kind == DomainKind::interval ? 1 : 2;
  if (dom.kind == DomainKind::disk) {
    if (!(dom.radius > 0.0)) throw std::invalid_argument("grid: disk radius must be positive");
    dom_.lo = {dom.center[0] - dom.radius, dom.center[1] - dom.radius};
    dom_.hi = {dom.center[0] + dom.radius, dom.center[1] + dom.radius};
  }
  for (int a = 0; a < dim_; ++a) {
    if (n[a] < 3)
      throw std::invalid_argument("grid: need at least 3 nodes per axis, got " + std::to_string(n[a]));
    if (!(dom_.hi[a] > dom_.lo[a]) || !std::isfinite(dom_.lo[a]) || !std::isfinite(dom_.hi[a]))
      throw std::invalid_argument("grid: degenerate extents");
  }
  n_ = {n[0], dim_ == 2 ? n[1] : 1};
  h_ = {(dom_.hi[0] - dom_.lo[0]) / (n_[0] - 1),
        dim_ == 2 ? (dom_.hi[1] - dom_.lo[1]) / (n_[1] - 1) : 1.0};
  cell_volume_ = h_[0] * (dim_ == 2 ? h_[1] : 1.0);

  const int nn = num_nodes();
  interior_of_node_.assign(nn, -1);
  auto inside = [&](int ix, int iy) {
    if (ix <= 0 || ix >= n_[0] - 1) return false;
    if (dim_ == 2 && (iy <= 0 || iy >= n_[1] - 1)) return false;
    if (dom_.kind == DomainKind::disk) {
      const double dx = x_of(ix) - dom_.center[0];
      const double dy = y_of(iy) - dom_.center[1];
      return dx * dx + dy * dy < dom_.radius * dom_.radius;
    }
    return true;
  };
  for (int iy = 0; iy < n_[1]; ++iy)
    for (int ix = 0; ix < n_[0]; ++ix)
      if (inside(ix, iy)) {
        interior_of_node_[node_id(ix, iy)] = static_cast<std::int32_t>(node_of_interior_.size());
        node_of_interior_.push_back(static_cast<std::int32_t>(node_id(ix, iy)));
      }
  if (node_of_interior_.empty()) throw std::invalid_argument("grid: no interior nodes");

  nb_.resize(node_of_interior_.size());
  for (int k = 0; k < num_interior(); ++k) {
    const int node = node_of_interior_[k];
    const int ix = node % n_[0];
    const int iy = node / n_[0];
    auto at = [&](int jx, int jy) -> std::int32_t {
      if (jx < 0 || jx >= n_[0] || jy < 0 || jy >= n_[1]) return -1;
      return interior_of_node_[node_id(jx, jy)];
    };
    nb_[k] = {at(ix - 1, iy), at(ix + 1, iy),
              dim_ == 2 ? at(ix, iy - 1) : std::int32_t(-1),
              dim_ == 2 ? at(ix, iy + 1) : std::int32_t(-1)};
  }

  if (dom_.kind == DomainKind::disk)
    measure_ = num_interior() * cell_volume_;
  else {
    measure_ = dom_.hi[0] - dom_.lo[0];
    if (dim_ == 2) measure_ *= dom_.hi[1] - dom_.lo[1];
  }
}

std::array<double, 2> Grid::interior_coords(int k) const {
  const int node = node_of_interior_[k];
  return {x_of(node % n_[0]), y_of(node / n_[0])};
}

GridPtr build_grid(const DomainSpec& dom, std::array<int, 2> n) {
  return std::make_shared<Grid>(dom, n);
}

GridPtr build_grid(const DomainSpec& dom, int n) { return build_grid(dom, {n, n}); }

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), v_(grid_->num_interior(), fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
  if (static_cast<int>(v_.size()) != grid_->num_interior())
    throw std::invalid_argument("field: value count does not match grid");
}

double ScalarField::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v_) m = std::min(m, x);
  return m;
}

double ScalarField::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v_) m = std::max(m, x);
  return m;
}

bool ScalarField::all_finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

void ScalarField::require_finite(const char* where) const {
  if (!all_finite()) throw std::runtime_error(std::string(where) + ": non-finite field value");
}

double lp_norm(const ScalarField& f, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lp_norm: q must be >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::fabs(x));
    return m;
  }
  double vmax = 0.0;
  for (double x : f.values()) vmax = std::max(vmax, std::fabs(x));
  if (vmax == 0.0) return 0.0;
  // Factor out the max so arbitrarily large q stays in range and the norm is
  // absolutely homogeneous to rounding.
  double s = 0.0;
  for (double x : f.values()) s += std::pow(std::fabs(x) / vmax, q);
  s *= f.grid().cell_volume();
  return vmax * std::pow(s, 1.0 / q);
}

double lp_power_sum(const ScalarField& f, double q) {
  const double cap = 1e300;
  double s = 0.0;
  for (double x : f.values()) {
    double t = std::pow(std::fabs(x), q);
    if (!(t < cap)) t = cap;
    s += t;
    if (s > cap) s = cap;
  }
  return std::min(s * f.grid().cell_volume(), cap);
}

double h1_seminorm_sq(const ScalarField& f) {
  const Grid& g = f.grid();
  const double vol = g.cell_volume();
  double s = 0.0;
  const double inv_hx2 = 1.0 / (g.h(0) * g.h(0));
  for (int iy = 0; iy < g.n(1); ++iy)
    for (int ix = 0; ix + 1 < g.n(0); ++ix) {
      const int ka = g.interior_index(ix, iy);
      const int kb = g.interior_index(ix + 1, iy);
      if (ka < 0 && kb < 0) continue;
      const double d = (kb >= 0 ? f[kb] : 0.0) - (ka >= 0 ? f[ka] : 0.0);
      s += d * d * inv_hx2 * vol;
    }
  if (g.dim() == 2) {
    const double inv_hy2 = 1.0 / (g.h(1) * g.h(1));
    for (int iy = 0; iy + 1 < g.n(1); ++iy)
      for (int ix = 0; ix < g.n(0); ++ix) {
        const int ka = g.interior_index(ix, iy);
        const int kb = g.interior_index(ix, iy + 1);
        if (ka < 0 && kb < 0) continue;
        const double d = (kb >= 0 ? f[kb] : 0.0) - (ka >= 0 ? f[ka] : 0.0);
        s += d * d * inv_hy2 * vol;
      }
  }
  return s;
}

ScalarField project_box(const ScalarField& f, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("project_box: lo > hi");
  ScalarField out = f;
  for (double& x : out.values()) x = std::clamp(x, lo, hi);
  return out;
}

double dot(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (int k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double l2_distance(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (int k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s * a.grid().cell_volume());
}

double linf_distance(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (int k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
  return m;
}

} // namespace penalab
