#include "swarmcov/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "swarmcov/csv.hpp"
#include "swarmcov/error.hpp"

namespace swarmcov {

namespace {

using detail::FieldImpl;

class ConstantField final : public FieldImpl {
 public:
  explicit ConstantField(double v) : v_(v) {}
  double value(const Point&) const override { return v_; }
  Point gradient(const Point&) const override { return {0.0, 0.0}; }
  bool analytic_gradient() const override { return true; }
  double lower_bound() const override { return v_; }
  double upper_bound() const override { return v_; }

 private:
  double v_;
};

class SineField final : public FieldImpl {
 public:
  double value(const Point& p) const override { return c_ * (std::sin(std::numbers::pi * p[0]) + 0.01); }
  Point gradient(const Point& p) const override {
    return {c_ * std::numbers::pi * std::cos(std::numbers::pi * p[0]), 0.0};
  }
  bool analytic_gradient() const override { return true; }
  double lower_bound() const override { return c_ * 0.01; }
  double upper_bound() const override { return c_ * 1.01; }

 private:
  double c_ = 1.0 / (2.0 / std::numbers::pi + 0.01);
};

class QuadraticField final : public FieldImpl {
 public:
  double value(const Point& p) const override { return c_ * (p[0] * p[0] + 0.01); }
  Point gradient(const Point& p) const override { return {2.0 * c_ * p[0], 0.0}; }
  bool analytic_gradient() const override { return true; }
  double lower_bound() const override { return c_ * 0.01; }
  double upper_bound() const override { return c_ * 1.01; }

 private:
  double c_ = 1.0 / (1.0 / 3.0 + 0.01);
};

class BumpField final : public FieldImpl {
 public:
  explicit BumpField(const BumpParams& p) : p_(p), sign_(p.combine == BumpCombine::sum ? 1.0 : -1.0) {
    // Dense lattice scan for the bounds; the sum variant has the exact floor eps.
    constexpr int n = 801;
    lo_ = std::numeric_limits<double>::infinity();
    hi_ = -lo_;
    Point argmin{};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Point x{i / double(n - 1), j / double(n - 1)};
        const double v = value(x);
        if (v < lo_) {
          lo_ = v;
          argmin = x;
        }
        hi_ = std::max(hi_, v);
      }
    }
    if (!(lo_ > 0.0)) {
      std::ostringstream msg;
      msg << "bump field is not strictly positive: minimum " << lo_ << " at (" << argmin[0] << ", " << argmin[1]
          << ")";
      throw ConfigError(msg.str());
    }
    if (p.combine == BumpCombine::sum) lo_ = p.eps;
  }

  double value(const Point& x) const override {
    return bump(x, p_.a1, p_.b1) + sign_ * bump(x, p_.a2, p_.b2) + p_.eps;
  }

  Point gradient(const Point& x) const override {
    Point g1 = bump_gradient(x, p_.a1, p_.b1);
    Point g2 = bump_gradient(x, p_.a2, p_.b2);
    return {g1[0] + sign_ * g2[0], g1[1] + sign_ * g2[1]};
  }

  bool analytic_gradient() const override { return true; }
  double lower_bound() const override { return lo_; }
  double upper_bound() const override { return hi_; }

 private:
  static double radius2(const Point& x, double a, double b) {
    const double u = a * x[0] - b;
    const double v = a * x[1] - b;
    return u * u + v * v;
  }
  static double bump(const Point& x, double a, double b) {
    const double r2 = radius2(x, a, b);
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
  }
  static Point bump_gradient(const Point& x, double a, double b) {
    const double r2 = radius2(x, a, b);
    if (r2 >= 1.0) return {0.0, 0.0};
    const double q = 1.0 - r2;
    const double f = std::exp(-1.0 / q);
    const double s = -2.0 * a * f / (q * q);
    return {s * (a * x[0] - b), s * (a * x[1] - b)};
  }

  BumpParams p_;
  double sign_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

// Nodal lattice with multilinear interpolation. Nodal gradients by second-order
// central differences, one-sided second-order at the lattice boundary.
class SampledField final : public FieldImpl {
 public:
  SampledField(const Domain& domain, std::array<std::size_t, 2> nodes, std::vector<double> samples)
      : dim_(domain.dimension()), nodes_(nodes), samples_(std::move(samples)) {
    if (dim_ == 1) nodes_[1] = 1;
    for (int a = 0; a < dim_; ++a) {
      if (nodes_[static_cast<std::size_t>(a)] < 2) throw ConfigError("sampled field needs >= 2 nodes per axis");
      lo_[static_cast<std::size_t>(a)] = domain.axis(a).lo;
      h_[static_cast<std::size_t>(a)] = domain.axis(a).length() / double(nodes_[static_cast<std::size_t>(a)] - 1);
    }
    if (samples_.size() != nodes_[0] * nodes_[1]) throw ShapeError("sample count does not match node lattice");
    const auto [mn, mx] = std::minmax_element(samples_.begin(), samples_.end());
    if (!(*mn > 0.0) || !std::isfinite(*mx)) {
      throw ConfigError("sampled field must be strictly positive and finite (minimum sample " +
                        format_double(*mn) + ")");
    }
    min_ = *mn;
    max_ = *mx;
    for (int a = 0; a < dim_; ++a) grad_[static_cast<std::size_t>(a)] = nodal_derivative(a);
  }

  double value(const Point& p) const override { return interpolate(samples_, p); }
  Point gradient(const Point& p) const override {
    Point g{0.0, 0.0};
    for (int a = 0; a < dim_; ++a) g[static_cast<std::size_t>(a)] = interpolate(grad_[static_cast<std::size_t>(a)], p);
    return g;
  }
  bool analytic_gradient() const override { return false; }
  double lower_bound() const override { return min_; }
  double upper_bound() const override { return max_; }

 private:
  std::size_t at(std::size_t i, std::size_t j) const { return i * nodes_[1] + j; }

  std::vector<double> nodal_derivative(int axis) const {
    const auto ua = static_cast<std::size_t>(axis);
    const std::size_t n = nodes_[ua];
    const double h = h_[ua];
    std::vector<double> d(samples_.size(), 0.0);
    const std::size_t other = nodes_[1 - ua];
    for (std::size_t o = 0; o < other; ++o) {
      auto idx = [&](std::size_t k) { return axis == 0 ? at(k, o) : at(o, k); };
      auto f = [&](std::size_t k) { return samples_[idx(k)]; };
      if (n == 2) {
        const double s = (f(1) - f(0)) / h;
        d[idx(0)] = d[idx(1)] = s;
        continue;
      }
      d[idx(0)] = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
      for (std::size_t k = 1; k + 1 < n; ++k) d[idx(k)] = (f(k + 1) - f(k - 1)) / (2.0 * h);
      d[idx(n - 1)] = (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
    }
    return d;
  }

  double interpolate(const std::vector<double>& v, const Point& p) const {
    std::array<std::size_t, 2> i{0, 0};
    std::array<double, 2> t{0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      double s = (p[ua] - lo_[ua]) / h_[ua];
      // Snap coordinates within rounding of a node so nodes reproduce their samples.
      if (const double r = std::round(s); std::abs(s - r) < 1e-9) s = r;
      const double cell = std::clamp(std::floor(s), 0.0, double(nodes_[ua] - 2));
      i[ua] = static_cast<std::size_t>(cell);
      t[ua] = s - cell;
    }
    if (dim_ == 1) return (1.0 - t[0]) * v[i[0]] + t[0] * v[i[0] + 1];
    const double v00 = v[at(i[0], i[1])];
    const double v01 = v[at(i[0], i[1] + 1)];
    const double v10 = v[at(i[0] + 1, i[1])];
    const double v11 = v[at(i[0] + 1, i[1] + 1)];
    return (1.0 - t[0]) * ((1.0 - t[1]) * v00 + t[1] * v01) + t[0] * ((1.0 - t[1]) * v10 + t[1] * v11);
  }

  int dim_;
  std::array<std::size_t, 2> nodes_;
  std::array<double, 2> lo_{0.0, 0.0};
  std::array<double, 2> h_{1.0, 1.0};
  std::vector<double> samples_;
  std::array<std::vector<double>, 2> grad_;
  double min_ = 0.0;
  double max_ = 0.0;
};

}  // namespace

ScalarField::ScalarField(Domain domain, std::shared_ptr<const detail::FieldImpl> impl, double scale)
    : domain_(std::move(domain)), impl_(std::move(impl)), scale_(scale) {
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw ConfigError("field scale must be positive and finite");
}

double ScalarField::operator()(const Point& p) const {
  if (!domain_.contains(p)) {
    std::ostringstream msg;
    msg << "point (" << p[0];
    if (domain_.dimension() == 2) msg << ", " << p[1];
    msg << ") is outside the field domain";
    throw DomainError(msg.str());
  }
  return scale_ * impl_->value(p);
}

Point ScalarField::gradient(const Point& p) const {
  if (!domain_.contains(p)) throw DomainError("gradient evaluated outside the field domain");
  Point g = impl_->gradient(p);
  return {scale_ * g[0], scale_ * g[1]};
}

ScalarField ScalarField::scaled(double factor) const { return ScalarField(domain_, impl_, scale_ * factor); }

ScalarField ScalarField::constant(Domain domain, double value) {
  if (!(value > 0.0)) throw ConfigError("constant field must be positive");
  return ScalarField(std::move(domain), std::make_shared<ConstantField>(value));
}

ScalarField sine_field_1d() { return ScalarField(Domain::unit(1), std::make_shared<SineField>()); }

ScalarField quadratic_field_1d() { return ScalarField(Domain::unit(1), std::make_shared<QuadraticField>()); }

ScalarField bump_field_2d(const BumpParams& params) {
  return ScalarField(Domain::unit(2), std::make_shared<BumpField>(params));
}

ScalarField sampled_field(Domain domain, std::array<std::size_t, 2> nodes, std::vector<double> samples) {
  auto impl = std::make_shared<SampledField>(domain, nodes, std::move(samples));
  return ScalarField(std::move(domain), std::move(impl));
}

namespace {

// Sorted distinct coordinates; verifies uniform spacing.
std::vector<double> lattice_axis(std::vector<double> coords, const char* name) {
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  if (coords.size() < 2) throw LoadError(std::string("field CSV needs >= 2 distinct ") + name + " coordinates");
  const double h = (coords.back() - coords.front()) / double(coords.size() - 1);
  for (std::size_t i = 1; i < coords.size(); ++i) {
    const double step = coords[i] - coords[i - 1];
    if (std::abs(step - h) > 1e-6 * h) {
      throw LoadError(std::string("field CSV: non-uniform ") + name + " spacing near " + format_double(coords[i]));
    }
  }
  return coords;
}

std::size_t lattice_index(double x, const std::vector<double>& axis) {
  const double h = (axis.back() - axis.front()) / double(axis.size() - 1);
  const double s = (x - axis.front()) / h;
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-6) throw LoadError("field CSV: coordinate off the lattice: " + format_double(x));
  return static_cast<std::size_t>(r);
}

}  // namespace

ScalarField load_field_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const bool two_d = t.has_column("y");
  const std::size_t cx = t.column("x");
  const std::size_t cv = t.column("value");
  const std::size_t cy = two_d ? t.column("y") : 0;
  if (t.header.size() != (two_d ? 3u : 2u)) throw LoadError(path.string() + ": expected header x[,y],value");
  if (t.rows.empty()) throw LoadError(path.string() + ": no samples");

  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    xs.push_back(t.number(r, cx));
    if (two_d) ys.push_back(t.number(r, cy));
  }
  const auto ax = lattice_axis(xs, "x");
  const auto ay = two_d ? lattice_axis(ys, "y") : std::vector<double>{0.0};
  std::vector<double> samples(ax.size() * ay.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<char> seen(samples.size(), 0);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::size_t i = lattice_index(xs[r], ax);
    const std::size_t j = two_d ? lattice_index(ys[r], ay) : 0;
    const std::size_t k = i * ay.size() + j;
    if (seen[k]) throw LoadError(path.string() + ": duplicate lattice node at row " + std::to_string(r + 2));
    seen[k] = 1;
    samples[k] = t.number(r, cv);
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw LoadError(path.string() + ": incomplete lattice");

  std::vector<Interval> axes{{ax.front(), ax.back()}};
  if (two_d) axes.push_back({ay.front(), ay.back()});
  try {
    return sampled_field(Domain(axes), {ax.size(), ay.size()}, std::move(samples));
  } catch (const ConfigError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void save_field_csv(const std::filesystem::path& path, const ScalarField& field, std::array<std::size_t, 2> nodes) {
  const Domain& d = field.domain();
  const bool two_d = d.dimension() == 2;
  CsvWriter w = two_d ? CsvWriter(path, {"x", "y", "value"}) : CsvWriter(path, {"x", "value"});
  const std::size_t ny = two_d ? nodes[1] : 1;
  auto node = [](const Interval& a, std::size_t i, std::size_t n) {
    return i + 1 == n ? a.hi : a.lo + a.length() * double(i) / double(n - 1);
  };
  for (std::size_t i = 0; i < nodes[0]; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      Point p{node(d.axis(0), i, nodes[0]), two_d ? node(d.axis(1), j, ny) : 0.0};
      w.cell(p[0]);
      if (two_d) w.cell(p[1]);
      w.cell(field(p));
      w.end_row();
    }
  }
}

double integrate(const ScalarField& field, const Domain& domain, int resolution) {
  if (resolution < 1) throw ConfigError("quadrature resolution must be >= 1");
  const UniformGrid g(domain, {std::size_t(resolution), std::size_t(resolution)});
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += field(g.center(i));
  return s * g.cell_volume();
}

ScalarField normalize(const ScalarField& field, const Domain& domain, int quadrature_resolution) {
  return field.scaled(1.0 / integrate(field, domain, quadrature_resolution));
}

GridFunction cell_averages(const ScalarField& field, const UniformGrid& grid, int subsamples) {
  GridFunction out(grid);
  const int dim = grid.dimension();
  const int ny = dim == 2 ? subsamples : 1;
  const double hx = grid.spacing(0);
  const double hy = grid.spacing(1);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Point ctr = grid.center(c);
    double s = 0.0;
    for (int i = 0; i < subsamples; ++i) {
      for (int j = 0; j < ny; ++j) {
        Point p = ctr;
        p[0] += ((i + 0.5) / subsamples - 0.5) * hx;
        if (dim == 2) p[1] += ((j + 0.5) / subsamples - 0.5) * hy;
        s += field(p);
      }
    }
    out[c] = s / double(subsamples * ny);
  }
  return out;
}

GridFunction target_density(const ScalarField& field, const UniformGrid& grid, int subsamples) {
  GridFunction g = cell_averages(field, grid, subsamples);
  const double m = g.mass();
  for (double& v : g.values()) v /= m;
  return g;
}

ControlLaws::ControlLaws(Domain domain, ScalarFn diffusion, VectorFn advection, ScalarFn reaction,
                         double switch_rate, double reaction_bound)
    : domain_(std::move(domain)),
      diffusion_(std::move(diffusion)),
      advection_(std::move(advection)),
      reaction_(std::move(reaction)),
      switch_rate_(switch_rate),
      reaction_bound_(reaction_bound) {
  if (!diffusion_) throw ConfigError("control laws need a diffusion law");
  if (!(switch_rate_ >= 0.0)) throw ConfigError("switch rate k must be >= 0");
  if (!(reaction_bound_ >= 0.0)) throw ConfigError("reaction bound must be >= 0");
}

ControlLaws ControlLaws::with_switch_rate(double k) const {
  ControlLaws out = *this;
  if (!(k >= 0.0)) throw ConfigError("switch rate k must be >= 0");
  out.switch_rate_ = k;
  return out;
}

ControlLaws diffusion_coverage_law(const ScalarField& field, double c1, double c2) {
  if (!(c1 > 0.0)) throw ConfigError("diffusion coverage law needs c1 > 0");
  if (!(c2 >= 0.0)) throw ConfigError("diffusion coverage law needs c2 >= 0");
  auto D = [field, c1, c2](const Point& p) { return c1 / std::sqrt(field(p)) + c2; };
  ControlLaws::VectorFn a;
  if (c2 > 0.0) {
    a = [field, c2](const Point& p) {
      const double f = field(p);
      const Point g = field.gradient(p);
      return Point{c2 * g[0] / f, c2 * g[1] / f};
    };
  }
  return ControlLaws(field.domain(), D, a);
}

ControlLaws reaction_coverage_law(const ScalarField& field, double c1, double c2) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("reaction coverage law needs c1 > 0 and c2 > 0");
  auto D = [c1](const Point&) { return c1; };
  auto H = [field, c2](const Point& p) { return c2 * field(p); };
  return ControlLaws(field.domain(), D, {}, H, 0.0, c2 * field.ceiling());
}

ControlLaws constant_diffusion_law(const Domain& domain, double diffusion) {
  if (!(diffusion >= 0.0)) throw ConfigError("diffusion must be >= 0");
  return ControlLaws(domain, [diffusion](const Point&) { return diffusion; });
}

}  // namespace swarmcov
