#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "swarmcov/field.hpp"
#include "swarmcov/geometry.hpp"
#include "swarmcov/pde.hpp"
#include "swarmcov/sde.hpp"

namespace swarmcov {

// Disjoint 1D cells covering a window O. Cells are half-open [lo, hi) except
// the last, which is closed.
class Partition {
 public:
  explicit Partition(std::vector<Interval> cells);

  // Cells cut at the multiples of 1/divisions_per_unit inside (lo, hi).
  static Partition grid_aligned(double lo, double hi, std::size_t divisions_per_unit);

  const std::vector<Interval>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  double lo() const { return cells_.front().lo; }
  double hi() const { return cells_.back().hi; }
  std::optional<std::size_t> locate(double x) const;

 private:
  std::vector<Interval> cells_;
};

struct ObservationSeries {
  Partition partition;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[k][cell]
  std::size_t agent_count = 0;
};

// Fraction of agents per cell at each snapshot (x coordinate).
ObservationSeries observe(const std::vector<SwarmState>& snapshots, const Partition& partition);

void write_observations_csv(const std::filesystem::path& path, const ObservationSeries& obs);
// agent_count is not stored in the file and comes back as 0.
ObservationSeries read_observations_csv(const std::filesystem::path& path);

// Piecewise-linear nodal basis with M equispaced nodes spanning a 1D domain.
class HatBasis {
 public:
  HatBasis(Interval domain, std::size_t size);

  std::size_t size() const { return size_; }
  const Interval& domain() const { return domain_; }
  double node(std::size_t j) const;
  double phi(std::size_t j, double x) const;
  double evaluate(const std::vector<double>& coeffs, double x) const;

 private:
  Interval domain_;
  std::size_t size_;
};

struct ProblemSettings {
  std::size_t basis_size = 10;
  double d = 1e-6;
  double lambda = 0.1;
  double T1 = 0.0;
  double T2 = 1.0;
  std::size_t solver_cells = 100;
};

// Regularised least-squares reconstruction of the density at T1 from
// windowed occupancy data, on a fixed 1D finite-volume discretisation.
class EstimationProblem {
 public:
  EstimationProblem(Interval domain, ProblemSettings settings, ObservationSeries obs);

  const ProblemSettings& settings() const { return settings_; }
  const HatBasis& basis() const { return basis_; }
  const ObservationSeries& observations() const { return obs_; }
  const UniformGrid& grid() const { return op_.grid(); }
  double dt() const { return dt_; }
  // Solver step index at which each observation is compared.
  const std::vector<std::uint64_t>& observation_steps() const { return obs_steps_; }
  // Delta t_k = t_k - t_{k-1}, t_0 = T1.
  const std::vector<double>& observation_weights() const { return weights_; }

  GridFunction expand(const std::vector<double>& coeffs) const;
  // Model cell masses per observation time: m[k][cell].
  std::vector<std::vector<double>> predict(const std::vector<double>& coeffs) const;
  double objective(const std::vector<double>& coeffs) const;
  // Exact gradient of objective() with respect to the coefficients.
  std::vector<double> adjoint_gradient(const std::vector<double>& coeffs) const;
  // Same problem with different data (e.g. synthetic values from predict).
  EstimationProblem with_values(std::vector<std::vector<double>> values) const;

 private:
  std::vector<double> masses(std::span<const double> y) const;
  std::vector<double> basis_transpose(std::span<const double> y) const;
  double regulariser(const std::vector<double>& coeffs) const;
  void check_coeffs(const std::vector<double>& coeffs) const;

  ProblemSettings settings_;
  HatBasis basis_;
  ObservationSeries obs_;
  DiffusionOperator op_;
  double dt_;
  std::vector<std::uint64_t> obs_steps_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> basis_rows_;  // [cell][j]
  // overlap_[cell] = list of (partition cell, overlap length)
  std::vector<std::vector<std::pair<std::size_t, double>>> overlap_;
};

std::vector<double> project(std::vector<double> coeffs);

struct Estimate {
  std::vector<double> coefficients;
  GridFunction u_hat;
  std::vector<double> objective_history;
  std::size_t iterations = 0;
  std::optional<double> scale;
};

struct SolverOptions {
  std::size_t max_iters = 2000;
  double tol = 1e-10;
  double armijo = 1e-4;
};

// Projected gradient descent on {coeffs >= 0}: Barzilai-Borwein trial step
// then Armijo halving. Stops when (J_k - J_{k+1}) / J_k < tol, when no
// decrease can be found, or after max_iters accepted steps.
Estimate solve_inverse(const EstimationProblem& problem, const std::vector<double>& init,
                       const SolverOptions& options = {});

struct ProtocolSettings {
  double c = 0.01;
  double dt1 = 1.0;
  double dt2 = 100.0;
  std::size_t agent_count = 10000;
  std::size_t observation_count = 20;
  InitialDistribution initial = UniformInit{};
  std::uint64_t seed = 0;
  unsigned workers = 1;
  ProblemSettings problem;
  SolverOptions solver;
};

// Phases 1 and 2: coverage with D = c / sqrt(F) on [0, T1], then D = sqrt(d)
// on (T1, T2]. Returns the swarm at the observation times T1 + k (T2 - T1) / n.
std::vector<SwarmState> protocol_snapshots(const ScalarField& field, const ProtocolSettings& settings);

// Phase 3 on given snapshots; u_hat normalised to unit mass.
Estimate estimate_from_snapshots(const std::vector<SwarmState>& snapshots, const Interval& domain,
                                 const Partition& partition, const ProtocolSettings& settings);

Estimate run_protocol(const ScalarField& field, const Partition& partition, const ProtocolSettings& settings);

// Multiplies u_hat by the mean of known / u_hat over the solver cells whose
// centres lie in [window.lo, window.hi] (cells with u_hat < 1e-8 skipped).
GridFunction rescale_with_known(const GridFunction& u_hat, const std::vector<double>& known, const Interval& window,
                                double* scale_out = nullptr);

double relative_l2_error(const GridFunction& estimate, const GridFunction& truth);

// `x,u_hat[,F_scaled]` at the solver cell centres.
void write_estimate_csv(const std::filesystem::path& path, const GridFunction& u_hat,
                        const std::optional<GridFunction>& scaled = std::nullopt);
GridFunction read_estimate_csv(const std::filesystem::path& path, const Domain& domain);

}  // namespace swarmcov
