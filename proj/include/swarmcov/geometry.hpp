#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace swarmcov {

// Points always carry two coordinates; 1D domains ignore the second one.
using Point = std::array<double, 2>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

// Axis-aligned box in one or two dimensions.
class Domain {
 public:
  explicit Domain(std::vector<Interval> axes);

  static Domain unit(int dimension);

  int dimension() const { return static_cast<int>(axes_.size()); }
  const Interval& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  const std::vector<Interval>& axes() const { return axes_; }

  // Closed-box membership.
  bool contains(const Point& p) const;
  double volume() const;

  bool operator==(const Domain&) const = default;

 private:
  std::vector<Interval> axes_;
};

// Uniform cell-centred grid over a Domain. Flat cell index is ix * ny + iy
// (y fastest); in 1D ny == 1.
class UniformGrid {
 public:
  UniformGrid(Domain domain, std::array<std::size_t, 2> cells);
  UniformGrid(Domain domain, std::size_t nx, std::size_t ny = 1) : UniformGrid(std::move(domain), {nx, ny}) {}

  const Domain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }
  std::size_t cells(int axis) const { return cells_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const { return cells_[0] * cells_[1]; }
  double spacing(int axis) const;
  double cell_volume() const;

  std::size_t index(std::size_t ix, std::size_t iy = 0) const { return ix * cells_[1] + iy; }
  std::array<std::size_t, 2> coords(std::size_t flat) const { return {flat / cells_[1], flat % cells_[1]}; }
  Point center(std::size_t flat) const;

  // Cell containing p. Points on the outer boundary go to the adjacent interior
  // cell; points outside are clamped to the nearest cell.
  std::size_t locate(const Point& p) const;

  bool operator==(const UniformGrid&) const = default;

 private:
  Domain domain_;
  std::array<std::size_t, 2> cells_;
};

// Scalar value per grid cell (a density in 1/volume units unless noted).
class GridFunction {
 public:
  explicit GridFunction(UniformGrid grid, double fill = 0.0);
  GridFunction(UniformGrid grid, std::vector<double> values);

  const UniformGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double mass() const;
  double min() const;
  double max() const;

  bool operator==(const GridFunction&) const = default;

 private:
  UniformGrid grid_;
  std::vector<double> values_;
};

// Per-axis component arrays over a grid (cell-centred vectors).
struct VectorGridFunction {
  UniformGrid grid;
  std::array<std::vector<double>, 2> components;

  explicit VectorGridFunction(UniformGrid g);
  double max_abs(int axis) const;
};

void require_same_grid(const UniformGrid& a, const UniformGrid& b, const char* what);

}  // namespace swarmcov
