#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "swarmcov/field.hpp"
#include "swarmcov/geometry.hpp"

namespace swarmcov {

// Coefficients of the active/passive system
//   dy1/dt = Lap(w y1) - div(a y1) - H y1 + k y2,   dy2/dt = H y1 - k y2
// with zero total flux through the boundary. w = D^2.
struct AdrCoefficients {
  GridFunction w;
  std::optional<VectorGridFunction> advection;
  std::optional<GridFunction> reaction;
  double switch_rate = 0.0;

  explicit AdrCoefficients(GridFunction weight) : w(std::move(weight)) {}
  bool diffusion_only() const { return !advection && !reaction; }
};

// Sample (D^2, a, H, k) of the laws at the cell centres.
AdrCoefficients coefficients_from_laws(const ControlLaws& laws, const UniformGrid& grid);

// Order in which cells are visited; each cell's update is a fixed formula of
// its neighbours, so both orders give bit-identical results.
enum class Sweep { row_major, column_major };

// Largest stable explicit step: 1 / (sum_axes 2 max(w) / h^2 + sum_axes max_outflow / h),
// where max_outflow is the largest per-cell upwind outflow speed along the axis.
double cfl_max_dt(const GridFunction& w, const VectorGridFunction* advection = nullptr);
// As cfl_max_dt plus the reaction rate, and at most 1/k.
double adr_max_dt(const AdrCoefficients& coeffs);

// The explicit diffusion map y -> S y on a fixed weight, applied in place on
// raw cell arrays. Holds the precomputed stability bound.
class DiffusionOperator {
 public:
  explicit DiffusionOperator(GridFunction w);

  const UniformGrid& grid() const { return w_.grid(); }
  const GridFunction& weight() const { return w_; }
  double max_dt() const { return max_dt_; }

  // out = S y. `out` must not alias `y`. StepError if dt exceeds max_dt().
  void apply(std::span<const double> y, std::span<double> out, double dt, Sweep sweep = Sweep::row_major) const;
  // out = S^T p.
  void apply_transpose(std::span<const double> p, std::span<double> out, double dt) const;

 private:
  GridFunction w_;
  double max_dt_;
  mutable std::vector<double> scratch_;
};

// One explicit finite-volume step of dy/dt = Lap(w y) with zero-flux walls.
GridFunction step_diffusion(const GridFunction& y, const GridFunction& w, double dt, Sweep sweep = Sweep::row_major);
// Transpose of the step_diffusion map (the backward step of an adjoint sweep).
GridFunction step_diffusion_transpose(const GridFunction& p, const GridFunction& w, double dt);

std::pair<GridFunction, GridFunction> step_adr(const GridFunction& y1, const GridFunction& y2,
                                               const AdrCoefficients& coeffs, double dt);

struct PdeSnapshot {
  double time = 0.0;
  GridFunction y1;
  std::optional<GridFunction> y2;
};

struct SolveReport {
  std::vector<PdeSnapshot> snapshots;
  double mass_drift = 0.0;  // max_t |mass(t) - mass(0)| / mass(0)
  double dt_used = 0.0;
  std::uint64_t steps = 0;
};

// Marches with dt = 0.9 * (stable bound) unless `dt` is given. Snapshots are
// taken at the first step time >= each requested time. The passive species is
// evolved only when y20 is given or the coefficients have reaction terms.
SolveReport solve(const GridFunction& y0, const std::optional<GridFunction>& y20, const AdrCoefficients& coeffs,
                  double t_end, const std::vector<double>& snapshot_times, std::optional<double> dt = std::nullopt);

// Unit-mass density proportional to 1/w.
GridFunction steady_state(const GridFunction& w);

struct DecayFit {
  double rate = 0.0;       // omega in |y(t) - target| ~ exp(-omega t)
  double r_squared = 0.0;  // of the log-linear least-squares fit
  std::size_t points = 0;
};

// Least-squares slope of log ||y(t) - target||_2 over snapshots whose distance
// exceeds 1e-12. Needs >= 4 snapshots; DegenerateError if < 2 points remain.
// Rounding drift of a converged solve sits near 1e-12, so snapshots should
// stop before convergence.
DecayFit decay_rate(const std::vector<PdeSnapshot>& snapshots, const GridFunction& target);

double l2_distance(const GridFunction& a, const GridFunction& b);

}  // namespace swarmcov
