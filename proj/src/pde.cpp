#include "swarmcov/pde.hpp"

#include <algorithm>
#include <cmath>

#include "swarmcov/csv.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/grid_io.hpp"

namespace swarmcov {

namespace {

struct Layout {
  std::size_t nx;
  std::size_t ny;
  int dim;
  double hx;
  double hy;

  explicit Layout(const UniformGrid& g)
      : nx(g.cells(0)), ny(g.cells(1)), dim(g.dimension()), hx(g.spacing(0)), hy(g.spacing(1)) {}
};

void require_positive(const GridFunction& w) {
  for (double v : w.values()) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("weight w must be positive and finite on every cell");
  }
}

// Upwind face velocity along an axis between cells L and R.
inline double face_velocity(const std::vector<double>& a, std::size_t l, std::size_t r) { return 0.5 * (a[l] + a[r]); }

double max_outflow(const VectorGridFunction& a, int axis) {
  const Layout L(a.grid);
  const auto& comp = a.components[static_cast<std::size_t>(axis)];
  const std::size_t n = axis == 0 ? L.nx : L.ny;
  const std::size_t stride = axis == 0 ? L.ny : 1;
  double m = 0.0;
  for (std::size_t c = 0; c < a.grid.size(); ++c) {
    const std::size_t k = axis == 0 ? c / L.ny : c % L.ny;
    double out = 0.0;
    if (k + 1 < n) out += std::max(face_velocity(comp, c, c + stride), 0.0);
    if (k > 0) out += std::max(-face_velocity(comp, c - stride, c), 0.0);
    m = std::max(m, out);
  }
  return m;
}

void check_dt(double dt, double bound, const char* what) {
  if (!(dt > 0.0)) throw StepError(std::string(what) + ": dt must be positive");
  if (dt > bound * (1.0 + 1e-12)) {
    throw StepError(std::string(what) + ": dt = " + format_double(dt) + " exceeds the stability bound " +
                    format_double(bound));
  }
}

// Net diffusive rate Lap_h(v) at cell c, with v = w * y.
inline double laplacian_at(const std::vector<double>& v, std::size_t c, const Layout& L) {
  const std::size_t ix = c / L.ny;
  const std::size_t iy = c % L.ny;
  double jr = 0.0, jl = 0.0;
  if (ix + 1 < L.nx) jr = (v[c + L.ny] - v[c]) / L.hx;
  if (ix > 0) jl = (v[c] - v[c - L.ny]) / L.hx;
  double r = (jr - jl) / L.hx;
  if (L.dim == 2) {
    double ju = 0.0, jd = 0.0;
    if (iy + 1 < L.ny) ju = (v[c + 1] - v[c]) / L.hy;
    if (iy > 0) jd = (v[c] - v[c - 1]) / L.hy;
    r += (ju - jd) / L.hy;
  }
  return r;
}

// Net advective rate -div_h(a y) at cell c with first-order upwind fluxes.
inline double advection_at(const VectorGridFunction& a, const std::vector<double>& y, std::size_t c,
                           const Layout& L) {
  auto flux = [&](const std::vector<double>& comp, std::size_t l, std::size_t r) {
    const double v = face_velocity(comp, l, r);
    return v > 0.0 ? v * y[l] : v * y[r];
  };
  const std::size_t ix = c / L.ny;
  const std::size_t iy = c % L.ny;
  const auto& ax = a.components[0];
  double fr = 0.0, fl = 0.0;
  if (ix + 1 < L.nx) fr = flux(ax, c, c + L.ny);
  if (ix > 0) fl = flux(ax, c - L.ny, c);
  double r = -(fr - fl) / L.hx;
  if (L.dim == 2) {
    const auto& ay = a.components[1];
    double fu = 0.0, fd = 0.0;
    if (iy + 1 < L.ny) fu = flux(ay, c, c + 1);
    if (iy > 0) fd = flux(ay, c - 1, c);
    r -= (fu - fd) / L.hy;
  }
  return r;
}

std::vector<double> product(const GridFunction& w, const GridFunction& y) {
  std::vector<double> v(y.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] * y[i];
  return v;
}

}  // namespace

AdrCoefficients coefficients_from_laws(const ControlLaws& laws, const UniformGrid& grid) {
  if (!(laws.domain() == grid.domain())) throw ConfigError("laws and grid are on different domains");
  GridFunction w(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double D = laws.diffusion(grid.center(c));
    w[c] = D * D;
  }
  AdrCoefficients coeffs(std::move(w));
  if (laws.has_advection()) {
    VectorGridFunction a(grid);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const Point v = laws.advection(grid.center(c));
      for (int ax = 0; ax < grid.dimension(); ++ax) a.components[std::size_t(ax)][c] = v[std::size_t(ax)];
    }
    coeffs.advection = std::move(a);
  }
  if (laws.has_reaction()) {
    GridFunction h(grid);
    for (std::size_t c = 0; c < grid.size(); ++c) h[c] = laws.reaction(grid.center(c));
    coeffs.reaction = std::move(h);
  }
  coeffs.switch_rate = laws.switch_rate();
  return coeffs;
}

double cfl_max_dt(const GridFunction& w, const VectorGridFunction* advection) {
  require_positive(w);
  const UniformGrid& g = w.grid();
  double rate = 0.0;
  const double wmax = w.max();
  for (int a = 0; a < g.dimension(); ++a) {
    const double h = g.spacing(a);
    rate += 2.0 * wmax / (h * h);
    if (advection) rate += max_outflow(*advection, a) / h;
  }
  return 1.0 / rate;
}

double adr_max_dt(const AdrCoefficients& coeffs) {
  const double base = cfl_max_dt(coeffs.w, coeffs.advection ? &*coeffs.advection : nullptr);
  double rate = 1.0 / base;
  if (coeffs.reaction) rate += std::max(0.0, coeffs.reaction->max());
  double dt = 1.0 / rate;
  if (coeffs.switch_rate > 0.0) dt = std::min(dt, 1.0 / coeffs.switch_rate);
  return dt;
}

DiffusionOperator::DiffusionOperator(GridFunction w) : w_(std::move(w)), max_dt_(cfl_max_dt(w_)), scratch_(w_.size()) {}

void DiffusionOperator::apply(std::span<const double> y, std::span<double> out, double dt, Sweep sweep) const {
  check_dt(dt, max_dt_, "step_diffusion");
  const Layout L(w_.grid());
  const std::size_t n = w_.size();
  for (std::size_t i = 0; i < n; ++i) scratch_[i] = w_[i] * y[i];
  auto update = [&](std::size_t c) { out[c] = y[c] + dt * laplacian_at(scratch_, c, L); };
  if (sweep == Sweep::row_major) {
    for (std::size_t c = 0; c < n; ++c) update(c);
  } else {
    for (std::size_t iy = 0; iy < L.ny; ++iy) {
      for (std::size_t ix = 0; ix < L.nx; ++ix) update(ix * L.ny + iy);
    }
  }
}

void DiffusionOperator::apply_transpose(std::span<const double> p, std::span<double> out, double dt) const {
  const Layout L(w_.grid());
  const std::size_t n = w_.size();
  std::copy(p.begin(), p.end(), scratch_.begin());
  for (std::size_t c = 0; c < n; ++c) out[c] = p[c] + dt * w_[c] * laplacian_at(scratch_, c, L);
}

GridFunction step_diffusion(const GridFunction& y, const GridFunction& w, double dt, Sweep sweep) {
  require_same_grid(y.grid(), w.grid(), "step_diffusion");
  const DiffusionOperator op(w);
  GridFunction out(y.grid());
  op.apply(y.values(), out.values(), dt, sweep);
  return out;
}

GridFunction step_diffusion_transpose(const GridFunction& p, const GridFunction& w, double dt) {
  require_same_grid(p.grid(), w.grid(), "step_diffusion_transpose");
  const DiffusionOperator op(w);
  GridFunction out(p.grid());
  op.apply_transpose(p.values(), out.values(), dt);
  return out;
}

std::pair<GridFunction, GridFunction> step_adr(const GridFunction& y1, const GridFunction& y2,
                                               const AdrCoefficients& coeffs, double dt) {
  require_same_grid(y1.grid(), coeffs.w.grid(), "step_adr");
  require_same_grid(y2.grid(), coeffs.w.grid(), "step_adr");
  check_dt(dt, adr_max_dt(coeffs), "step_adr");
  const Layout L(y1.grid());
  const auto v = product(coeffs.w, y1);
  const std::vector<double> y1v(y1.values().begin(), y1.values().end());
  GridFunction n1(y1.grid()), n2(y2.grid());
  const double k = coeffs.switch_rate;
  for (std::size_t c = 0; c < y1.size(); ++c) {
    double rate = laplacian_at(v, c, L);
    if (coeffs.advection) rate += advection_at(*coeffs.advection, y1v, c, L);
    const double H = coeffs.reaction ? (*coeffs.reaction)[c] : 0.0;
    const double exchange = H * y1[c] - k * y2[c];
    n1[c] = y1[c] + dt * rate - dt * exchange;
    n2[c] = y2[c] + dt * exchange;
  }
  return {std::move(n1), std::move(n2)};
}

SolveReport solve(const GridFunction& y0, const std::optional<GridFunction>& y20, const AdrCoefficients& coeffs,
                  double t_end, const std::vector<double>& snapshot_times, std::optional<double> dt) {
  require_same_grid(y0.grid(), coeffs.w.grid(), "solve");
  if (y20) require_same_grid(y20->grid(), coeffs.w.grid(), "solve");
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  for (double v : y0.values()) {
    if (!(v >= 0.0)) throw ConfigError("initial density must be nonnegative");
  }
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) throw ConfigError("snapshot times must be sorted");

  const bool two_species = y20.has_value() || !coeffs.diffusion_only() || coeffs.switch_rate > 0.0;
  const double bound = two_species ? adr_max_dt(coeffs) : cfl_max_dt(coeffs.w);
  SolveReport report;
  report.dt_used = dt.value_or(0.9 * bound);

  std::vector<std::uint64_t> snaps;
  for (double t : snapshot_times) {
    if (t < 0.0) throw ConfigError("snapshot times must be >= 0");
    snaps.push_back(step_at_or_after(t, report.dt_used));
  }
  const std::uint64_t steps =
      std::max(step_at_or_after(t_end, report.dt_used), snaps.empty() ? std::uint64_t{0} : snaps.back());
  report.steps = steps;

  GridFunction y1 = y0;
  GridFunction y2 = y20.value_or(GridFunction(y0.grid()));
  std::optional<DiffusionOperator> op;
  GridFunction buffer(y0.grid());
  if (!two_species) op.emplace(coeffs.w);
  auto total_mass = [&] { return y1.mass() + (two_species ? y2.mass() : 0.0); };
  const double m0 = total_mass();
  const double denom = m0 != 0.0 ? std::abs(m0) : 1.0;
  std::size_t next = 0;
  auto record = [&](std::uint64_t k) {
    while (next < snaps.size() && snaps[next] == k) {
      report.snapshots.push_back(PdeSnapshot{double(k) * report.dt_used, y1,
                                             two_species ? std::optional<GridFunction>(y2) : std::nullopt});
      ++next;
    }
  };
  record(0);
  for (std::uint64_t k = 1; k <= steps; ++k) {
    if (two_species) {
      auto [a, b] = step_adr(y1, y2, coeffs, report.dt_used);
      y1 = std::move(a);
      y2 = std::move(b);
    } else {
      op->apply(y1.values(), buffer.values(), report.dt_used);
      std::swap(y1, buffer);
    }
    report.mass_drift = std::max(report.mass_drift, std::abs(total_mass() - m0) / denom);
    record(k);
  }
  return report;
}

GridFunction steady_state(const GridFunction& w) {
  require_positive(w);
  GridFunction s(w.grid());
  for (std::size_t i = 0; i < w.size(); ++i) s[i] = 1.0 / w[i];
  const double m = s.mass();
  for (double& v : s.values()) v /= m;
  return s;
}

double l2_distance(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid(), "l2_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

DecayFit decay_rate(const std::vector<PdeSnapshot>& snapshots, const GridFunction& target) {
  if (snapshots.size() < 4) throw ConfigError("decay_rate needs at least 4 snapshots");
  std::vector<double> ts, ls;
  for (const auto& s : snapshots) {
    const double d = l2_distance(s.y1, target);
    if (d > 1e-12) {
      ts.push_back(s.time);
      ls.push_back(std::log(d));
    }
  }
  if (ts.size() < 2) throw DegenerateError("decay_rate: fewer than 2 snapshots differ from the target");
  const double n = double(ts.size());
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += ls[i];
  }
  mt /= n;
  ml /= n;
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    stl += (ts[i] - mt) * (ls[i] - ml);
    sll += (ls[i] - ml) * (ls[i] - ml);
  }
  if (stt == 0.0) throw DegenerateError("decay_rate: snapshots share a single time");
  const double slope = stl / stt;
  DecayFit fit;
  fit.rate = -slope;
  fit.points = ts.size();
  fit.r_squared = sll > 0.0 ? (stl * stl) / (stt * sll) : 1.0;
  return fit;
}

}  // namespace swarmcov
