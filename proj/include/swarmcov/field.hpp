#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "swarmcov/geometry.hpp"

namespace swarmcov {

namespace detail {

class FieldImpl {
 public:
  virtual ~FieldImpl() = default;
  virtual double value(const Point& p) const = 0;
  virtual Point gradient(const Point& p) const = 0;
  virtual bool analytic_gradient() const = 0;
  // Bounds of value() over the domain closure.
  virtual double lower_bound() const = 0;
  virtual double upper_bound() const = 0;
};

}  // namespace detail

// Strictly positive scalar field over a rectangular domain. Immutable; copies
// share the underlying representation and may be evaluated concurrently.
class ScalarField {
 public:
  ScalarField(Domain domain, std::shared_ptr<const detail::FieldImpl> impl, double scale = 1.0);

  // Throws DomainError when p is outside the domain closure.
  double operator()(const Point& p) const;
  double eval(const Point& p) const { return (*this)(p); }
  Point gradient(const Point& p) const;

  // Lower bound eps_min > 0 and upper bound of the field over the domain.
  double floor() const { return scale_ * impl_->lower_bound(); }
  double ceiling() const { return scale_ * impl_->upper_bound(); }

  const Domain& domain() const { return domain_; }
  double scale() const { return scale_; }
  bool has_analytic_gradient() const { return impl_->analytic_gradient(); }

  ScalarField scaled(double factor) const;

  static ScalarField constant(Domain domain, double value);

 private:
  Domain domain_;
  std::shared_ptr<const detail::FieldImpl> impl_;
  double scale_;
};

// F1(x) = c1 (sin(pi x) + 0.01) on [0,1], c1 = 1 / (2/pi + 0.01).
ScalarField sine_field_1d();
// F2(x) = c2 (x^2 + 0.01) on [0,1], c2 = 1 / (1/3 + 0.01).
ScalarField quadratic_field_1d();

enum class BumpCombine { sum, difference };

// f1 +/- f2 + eps on the unit square, f_n(x) = exp(-1 / (1 - |a_n x - b_n|^2))
// inside the unit ball of a_n x - b_n, with b_n the vector (b_n, b_n).
struct BumpParams {
  double a1 = 2.0;
  double a2 = 6.0;
  double b1 = 1.0;
  double b2 = 2.0;
  double eps = 0.01;
  BumpCombine combine = BumpCombine::sum;
};

// Throws ConfigError if the combination is not strictly positive (checked on
// a dense lattice).
ScalarField bump_field_2d(const BumpParams& params = {});

// Nodal samples on a uniform lattice spanning the domain, multilinear
// interpolation between nodes. `nodes` counts lattice points per axis;
// samples are ordered x-major (y fastest). Non-positive samples are rejected.
ScalarField sampled_field(Domain domain, std::array<std::size_t, 2> nodes, std::vector<double> samples);

// CSV with header `x,value` or `x,y,value`; uniform lattice inferred.
ScalarField load_field_csv(const std::filesystem::path& path);
void save_field_csv(const std::filesystem::path& path, const ScalarField& field, std::array<std::size_t, 2> nodes);

// Midpoint-rule integral over `domain` with `resolution` cells per axis.
double integrate(const ScalarField& field, const Domain& domain, int resolution);
ScalarField normalize(const ScalarField& field, const Domain& domain, int quadrature_resolution);

// Cell averages of the field (subsamples^dim midpoint samples per cell).
GridFunction cell_averages(const ScalarField& field, const UniformGrid& grid, int subsamples = 8);
// Cell averages rescaled to unit mass: the target density mu_F on the grid.
GridFunction target_density(const ScalarField& field, const UniformGrid& grid, int subsamples = 8);

// Feedback laws (D, a, H) and passive-to-active rate k.
class ControlLaws {
 public:
  using ScalarFn = std::function<double(const Point&)>;
  using VectorFn = std::function<Point(const Point&)>;

  // Empty advection / reaction functions mean identically zero.
  ControlLaws(Domain domain, ScalarFn diffusion, VectorFn advection = {}, ScalarFn reaction = {},
              double switch_rate = 0.0, double reaction_bound = 0.0);

  double diffusion(const Point& p) const { return diffusion_(p); }
  Point advection(const Point& p) const { return advection_ ? advection_(p) : Point{0.0, 0.0}; }
  double reaction(const Point& p) const { return reaction_ ? reaction_(p) : 0.0; }
  double switch_rate() const { return switch_rate_; }
  double reaction_bound() const { return reaction_bound_; }
  bool has_advection() const { return static_cast<bool>(advection_); }
  bool has_reaction() const { return static_cast<bool>(reaction_); }
  const Domain& domain() const { return domain_; }

  ControlLaws with_switch_rate(double k) const;

 private:
  Domain domain_;
  ScalarFn diffusion_;
  VectorFn advection_;
  ScalarFn reaction_;
  double switch_rate_;
  double reaction_bound_;
};

// D = c1 / sqrt(F) + c2, a = c2 grad F / F, H = 0.
ControlLaws diffusion_coverage_law(const ScalarField& field, double c1, double c2 = 0.0);
// D = c1, a = 0, H = c2 F.
ControlLaws reaction_coverage_law(const ScalarField& field, double c1, double c2);
// D = constant everywhere.
ControlLaws constant_diffusion_law(const Domain& domain, double diffusion);

}  // namespace swarmcov
