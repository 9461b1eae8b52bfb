#include "swarmcov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swarmcov/error.hpp"

namespace swarmcov {

Domain::Domain(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2) {
    throw ConfigError("domain dimension must be 1 or 2, got " + std::to_string(axes_.size()));
  }
  for (const auto& a : axes_) {
    if (!(std::isfinite(a.lo) && std::isfinite(a.hi) && a.lo < a.hi)) {
      throw ConfigError("domain extent must satisfy lo < hi");
    }
  }
}

Domain Domain::unit(int dimension) {
  return Domain(std::vector<Interval>(static_cast<std::size_t>(dimension), Interval{0.0, 1.0}));
}

bool Domain::contains(const Point& p) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (!(p[i] >= axes_[i].lo && p[i] <= axes_[i].hi)) return false;
  }
  return true;
}

double Domain::volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.length();
  return v;
}

UniformGrid::UniformGrid(Domain domain, std::array<std::size_t, 2> cells)
    : domain_(std::move(domain)), cells_(cells) {
  if (domain_.dimension() == 1) cells_[1] = 1;
  if (cells_[0] == 0 || cells_[1] == 0) throw ConfigError("grid needs at least one cell per axis");
}

double UniformGrid::spacing(int axis) const {
  if (axis >= dimension()) return 1.0;
  return domain_.axis(axis).length() / static_cast<double>(cells_[static_cast<std::size_t>(axis)]);
}

double UniformGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dimension(); ++a) v *= spacing(a);
  return v;
}

Point UniformGrid::center(std::size_t flat) const {
  const auto c = coords(flat);
  Point p{0.0, 0.0};
  for (int a = 0; a < dimension(); ++a) {
    p[static_cast<std::size_t>(a)] =
        domain_.axis(a).lo + (static_cast<double>(c[static_cast<std::size_t>(a)]) + 0.5) * spacing(a);
  }
  return p;
}

std::size_t UniformGrid::locate(const Point& p) const {
  std::array<std::size_t, 2> c{0, 0};
  for (int a = 0; a < dimension(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const double s = std::floor((p[ua] - domain_.axis(a).lo) / spacing(a));
    const double hi = static_cast<double>(cells_[ua] - 1);
    c[ua] = static_cast<std::size_t>(std::clamp(s, 0.0, hi));
  }
  return index(c[0], c[1]);
}

GridFunction::GridFunction(UniformGrid grid, double fill) : grid_(std::move(grid)), values_(grid_.size(), fill) {}

GridFunction::GridFunction(UniformGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ShapeError("grid function has " + std::to_string(values_.size()) + " values for " +
                     std::to_string(grid_.size()) + " cells");
  }
}

double GridFunction::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_volume();
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

VectorGridFunction::VectorGridFunction(UniformGrid g) : grid(std::move(g)) {
  for (int a = 0; a < grid.dimension(); ++a) components[static_cast<std::size_t>(a)].assign(grid.size(), 0.0);
}

double VectorGridFunction::max_abs(int axis) const {
  double m = 0.0;
  for (double v : components[static_cast<std::size_t>(axis)]) m = std::max(m, std::abs(v));
  return m;
}

void require_same_grid(const UniformGrid& a, const UniformGrid& b, const char* what) {
  if (!(a == b)) throw ShapeError(std::string(what) + ": grids differ");
}

}  // namespace swarmcov
