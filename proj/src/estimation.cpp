#include "swarmcov/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "swarmcov/csv.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/grid_io.hpp"

namespace swarmcov {

Partition::Partition(std::vector<Interval> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) throw ConfigError("partition has no cells");
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!(cells_[i].lo < cells_[i].hi)) throw ConfigError("partition cell " + std::to_string(i) + " is empty");
    if (i > 0 && cells_[i].lo < cells_[i - 1].hi) throw ConfigError("partition cells overlap or are unsorted");
  }
}

Partition Partition::grid_aligned(double lo, double hi, std::size_t divisions_per_unit) {
  if (!(lo < hi)) throw ConfigError("observation window must have lo < hi");
  if (divisions_per_unit == 0) throw ConfigError("partition divisions must be positive");
  const double n = double(divisions_per_unit);
  std::vector<double> cuts{lo};
  // Cut points k / n strictly inside (lo, hi), matched with a small tolerance
  // so that e.g. 0.7 * 10 does not produce a sliver cell.
  const auto first = static_cast<long long>(std::floor(lo * n + 1e-9)) + 1;
  for (long long k = first;; ++k) {
    const double x = double(k) / n;
    if (x >= hi - 1e-9 / n) break;
    if (x > lo + 1e-9 / n) cuts.push_back(x);
  }
  cuts.push_back(hi);
  std::vector<Interval> cells;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) cells.push_back({cuts[i], cuts[i + 1]});
  return Partition(std::move(cells));
}

std::optional<std::size_t> Partition::locate(double x) const {
  if (x < lo() || x > hi()) return std::nullopt;
  auto it = std::upper_bound(cells_.begin(), cells_.end(), x, [](double v, const Interval& c) { return v < c.hi; });
  if (it == cells_.end()) return x == hi() ? std::optional<std::size_t>(cells_.size() - 1) : std::nullopt;
  if (x < it->lo) return std::nullopt;  // gap between cells
  return std::size_t(it - cells_.begin());
}

ObservationSeries observe(const std::vector<SwarmState>& snapshots, const Partition& partition) {
  if (snapshots.empty()) throw ConfigError("observe: no snapshots");
  ObservationSeries obs{partition, {}, {}, snapshots.front().agents.size()};
  for (const auto& s : snapshots) {
    if (s.agents.size() != obs.agent_count) throw ShapeError("observe: agent count changes between snapshots");
    if (s.agents.empty()) throw ConfigError("observe: empty swarm");
    std::vector<double> counts(partition.size(), 0.0);
    for (const auto& a : s.agents)
      if (auto c = partition.locate(a.position[0])) counts[*c] += 1.0;
    for (double& v : counts) v /= double(s.agents.size());
    obs.times.push_back(s.time);
    obs.values.push_back(std::move(counts));
  }
  return obs;
}

void write_observations_csv(const std::filesystem::path& path, const ObservationSeries& obs) {
  CsvWriter w(path, {"t", "cell_lo", "cell_hi", "fraction"});
  for (std::size_t k = 0; k < obs.times.size(); ++k)
    for (std::size_t c = 0; c < obs.partition.size(); ++c) {
      w.cell(obs.times[k]).cell(obs.partition.cells()[c].lo).cell(obs.partition.cells()[c].hi).cell(obs.values[k][c]);
      w.end_row();
    }
}

ObservationSeries read_observations_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto ct = t.column("t"), clo = t.column("cell_lo"), chi = t.column("cell_hi"), cf = t.column("fraction");
  if (t.rows.empty()) throw LoadError(path.string() + ": no observations");
  std::vector<Interval> cells;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double time = t.number(r, ct);
    if (times.empty() || times.back() != time) {
      if (!times.empty() && values.back().size() != cells.size())
        throw LoadError(path.string() + ": ragged observation block");
      times.push_back(time);
      values.emplace_back();
    }
    const Interval cell{t.number(r, clo), t.number(r, chi)};
    if (times.size() == 1) {
      cells.push_back(cell);
    } else if (values.back().size() >= cells.size() || !(cells[values.back().size()] == cell)) {
      throw LoadError(path.string() + ": cells differ between observation times");
    }
    values.back().push_back(t.number(r, cf));
  }
  for (const auto& v : values)
    if (v.size() != cells.size()) throw LoadError(path.string() + ": ragged observation block");
  try {
    return ObservationSeries{Partition(std::move(cells)), std::move(times), std::move(values), 0};
  } catch (const ConfigError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

HatBasis::HatBasis(Interval domain, std::size_t size) : domain_(domain), size_(size) {
  if (size < 2) throw ConfigError("basis needs at least 2 nodes");
}

double HatBasis::node(std::size_t j) const {
  return domain_.lo + domain_.length() * double(j) / double(size_ - 1);
}

double HatBasis::phi(std::size_t j, double x) const {
  const double spacing = domain_.length() / double(size_ - 1);
  return std::max(0.0, 1.0 - std::abs(x - node(j)) / spacing);
}

double HatBasis::evaluate(const std::vector<double>& coeffs, double x) const {
  if (coeffs.size() != size_) throw ShapeError("coefficient vector has the wrong length");
  double s = 0.0;
  for (std::size_t j = 0; j < size_; ++j) s += coeffs[j] * phi(j, x);
  return s;
}

namespace {

GridFunction constant_weight(Interval domain, std::size_t cells, double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("dispersion coefficient d must be positive");
  if (cells < 2) throw ConfigError("solver grid needs at least 2 cells");
  return GridFunction(UniformGrid(Domain({domain}), cells), d);
}

}  // namespace

EstimationProblem::EstimationProblem(Interval domain, ProblemSettings settings, ObservationSeries obs)
    : settings_(settings),
      basis_(domain, settings.basis_size),
      obs_(std::move(obs)),
      op_(constant_weight(domain, settings.solver_cells, settings.d)),
      dt_(0.9 * op_.max_dt()) {
  if (!(settings_.T1 < settings_.T2)) throw ConfigError("estimation requires T1 < T2");
  if (!(settings_.lambda >= 0.0) || !std::isfinite(settings_.lambda)) throw ConfigError("lambda must be >= 0");
  if (obs_.times.empty()) throw ConfigError("no observation times");
  if (obs_.values.size() != obs_.times.size()) throw ShapeError("observation values and times differ in length");
  if (obs_.partition.lo() < domain.lo || obs_.partition.hi() > domain.hi)
    throw ConfigError("observation window lies outside the domain");
  double prev = settings_.T1;
  for (std::size_t k = 0; k < obs_.times.size(); ++k) {
    const double t = obs_.times[k];
    if (!(t > prev) && !(k == 0 && t > settings_.T1))
      throw ConfigError("observation times must be increasing inside (T1, T2]");
    if (t > settings_.T2 * (1.0 + 1e-12) + 1e-12) throw ConfigError("observation time after T2");
    if (obs_.values[k].size() != obs_.partition.size()) throw ShapeError("observation row has the wrong cell count");
    weights_.push_back(t - prev);
    obs_steps_.push_back(step_at_or_after(t - settings_.T1, dt_));
    prev = t;
  }

  const UniformGrid& g = grid();
  const double h = g.spacing(0);
  basis_rows_.resize(g.size());
  overlap_.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xc = g.center(i)[0];
    basis_rows_[i].resize(basis_.size());
    for (std::size_t j = 0; j < basis_.size(); ++j) basis_rows_[i][j] = basis_.phi(j, xc);
    const double a = domain.lo + double(i) * h, b = a + h;
    for (std::size_t c = 0; c < obs_.partition.size(); ++c) {
      const auto& cell = obs_.partition.cells()[c];
      const double len = std::min(b, cell.hi) - std::max(a, cell.lo);
      if (len > 0.0) overlap_[i].emplace_back(c, len);
    }
  }
}

EstimationProblem EstimationProblem::with_values(std::vector<std::vector<double>> values) const {
  ObservationSeries obs = obs_;
  obs.values = std::move(values);
  return EstimationProblem(basis_.domain(), settings_, std::move(obs));
}

void EstimationProblem::check_coeffs(const std::vector<double>& coeffs) const {
  if (coeffs.size() != basis_.size())
    throw ShapeError("expected " + std::to_string(basis_.size()) + " coefficients, got " +
                     std::to_string(coeffs.size()));
}

GridFunction EstimationProblem::expand(const std::vector<double>& coeffs) const {
  check_coeffs(coeffs);
  GridFunction u(grid());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = std::inner_product(coeffs.begin(), coeffs.end(), basis_rows_[i].begin(), 0.0);
  return u;
}

std::vector<double> EstimationProblem::masses(std::span<const double> y) const {
  std::vector<double> m(obs_.partition.size(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (auto [c, len] : overlap_[i]) m[c] += len * y[i];
  return m;
}

std::vector<double> EstimationProblem::basis_transpose(std::span<const double> y) const {
  std::vector<double> out(basis_.size(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += basis_rows_[i][j] * y[i];
  return out;
}

std::vector<std::vector<double>> EstimationProblem::predict(const std::vector<double>& coeffs) const {
  GridFunction y = expand(coeffs);
  GridFunction next(grid());
  std::vector<std::vector<double>> out;
  out.reserve(obs_steps_.size());
  std::uint64_t n = 0;
  for (std::uint64_t target : obs_steps_) {
    for (; n < target; ++n) {
      op_.apply(y.values(), next.values(), dt_);
      std::swap(y, next);
    }
    out.push_back(masses(y.values()));
  }
  return out;
}

double EstimationProblem::regulariser(const std::vector<double>& coeffs) const {
  const GridFunction u = expand(coeffs);
  double s = 0.0;
  for (double v : u.values()) s += v * v;
  return settings_.lambda * s * grid().spacing(0);
}

double EstimationProblem::objective(const std::vector<double>& coeffs) const {
  const auto m = predict(coeffs);
  double misfit = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < m[k].size(); ++c) {
      const double r = m[k][c] - obs_.values[k][c];
      s += r * r;
    }
    misfit += weights_[k] * s;
  }
  return misfit + regulariser(coeffs);
}

std::vector<double> EstimationProblem::adjoint_gradient(const std::vector<double>& coeffs) const {
  const auto m = predict(coeffs);
  const UniformGrid& g = grid();
  std::vector<double> p(g.size(), 0.0), next(g.size());
  std::size_t k = obs_steps_.size();
  for (std::uint64_t n = obs_steps_.back();; --n) {
    while (k > 0 && obs_steps_[k - 1] == n) {
      --k;
      for (std::size_t i = 0; i < p.size(); ++i)
        for (auto [c, len] : overlap_[i]) p[i] += len * 2.0 * weights_[k] * (m[k][c] - obs_.values[k][c]);
    }
    if (n == 0) break;
    op_.apply_transpose(p, next, dt_);
    std::swap(p, next);
  }
  std::vector<double> grad = basis_transpose(p);
  if (settings_.lambda > 0.0) {
    const GridFunction u = expand(coeffs);
    const auto reg = basis_transpose(u.values());
    const double f = 2.0 * settings_.lambda * g.spacing(0);
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += f * reg[j];
  }
  return grad;
}

std::vector<double> project(std::vector<double> coeffs) {
  for (double& v : coeffs) v = std::max(v, 0.0);
  return coeffs;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double checked_objective(const EstimationProblem& problem, const std::vector<double>& c, std::size_t iteration) {
  const double J = problem.objective(c);
  if (!std::isfinite(J)) throw NumericError("objective is not finite at iteration " + std::to_string(iteration));
  return J;
}

}  // namespace

Estimate solve_inverse(const EstimationProblem& problem, const std::vector<double>& init,
                       const SolverOptions& options) {
  if (init.size() != problem.basis().size()) throw ShapeError("initial coefficients have the wrong length");
  for (double v : init)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("initial coefficients must be finite and >= 0");

  std::vector<double> c = init;
  double J = checked_objective(problem, c, 0);
  Estimate est{c, problem.expand(c), {J}, 0, std::nullopt};
  if (options.max_iters == 0 || J == 0.0) return est;

  std::vector<double> g = problem.adjoint_gradient(c);
  const double gnorm = std::sqrt(dot(g, g));
  if (gnorm == 0.0) return est;
  double alpha = 1e-3 * std::max(1.0, std::sqrt(dot(c, c))) / gnorm;

  while (est.iterations < options.max_iters) {
    const std::size_t iter = est.iterations + 1;
    std::vector<double> cn;
    double Jn = 0.0;
    bool found = false;
    for (int halvings = 0; halvings < 200; ++halvings) {
      cn = c;
      for (std::size_t j = 0; j < cn.size(); ++j) cn[j] = c[j] - alpha * g[j];
      cn = project(std::move(cn));
      if (cn == c) break;
      Jn = checked_objective(problem, cn, iter);
      double descent = 0.0;
      for (std::size_t j = 0; j < cn.size(); ++j) descent += g[j] * (cn[j] - c[j]);
      if (Jn <= J + options.armijo * descent && Jn < J) {
        found = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!found) break;

    std::vector<double> gn = problem.adjoint_gradient(cn);
    std::vector<double> s(c.size()), yv(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
      s[j] = cn[j] - c[j];
      yv[j] = gn[j] - g[j];
    }
    const double sy = dot(s, yv);
    alpha = sy > 0.0 ? dot(s, s) / sy : 2.0 * alpha;

    const double rel = (J - Jn) / J;
    c = std::move(cn);
    g = std::move(gn);
    J = Jn;
    est.objective_history.push_back(J);
    est.iterations = iter;
    if (rel < options.tol || J == 0.0) break;
  }
  est.coefficients = c;
  est.u_hat = problem.expand(c);
  return est;
}

std::vector<SwarmState> protocol_snapshots(const ScalarField& field, const ProtocolSettings& settings) {
  const Domain& domain = field.domain();
  if (domain.dimension() != 1) throw ConfigError("estimation runs on 1D domains only");
  const ProblemSettings& ps = settings.problem;
  if (!(ps.T1 > 0.0) || !(ps.T1 < ps.T2)) throw ConfigError("estimation requires 0 < T1 < T2");
  if (settings.agent_count == 0) throw ConfigError("agent count must be positive");
  if (settings.observation_count == 0) throw ConfigError("observation count must be positive");
  if (!(settings.dt2 > 0.0)) throw ConfigError("phase-2 dt must be positive");

  SimConfig phase1;
  phase1.agent_count = settings.agent_count;
  phase1.dt = settings.dt1;
  phase1.t_end = ps.T1;
  phase1.seed = settings.seed;
  phase1.snapshot_times = {ps.T1};
  phase1.initial = settings.initial;
  phase1.workers = settings.workers;
  const ControlLaws coverage = diffusion_coverage_law(field, settings.c);
  SwarmState at_t1 = simulate(phase1, coverage, domain).back();
  const std::uint64_t phase1_steps = step_at_or_after(ps.T1, settings.dt1);
  at_t1.time = ps.T1;

  const ControlLaws dispersion = constant_diffusion_law(domain, std::sqrt(ps.d));
  const double span = ps.T2 - ps.T1;
  std::vector<std::uint64_t> steps;
  for (std::size_t k = 1; k <= settings.observation_count; ++k)
    steps.push_back(step_at_or_after(span * double(k) / double(settings.observation_count), settings.dt2));
  auto snaps = advance(std::move(at_t1), dispersion, settings.dt2, steps.back(), steps, settings.seed, phase1_steps,
                       settings.workers);
  for (std::size_t k = 0; k < snaps.size(); ++k)
    snaps[k].time = ps.T1 + span * double(k + 1) / double(settings.observation_count);
  return snaps;
}

Estimate estimate_from_snapshots(const std::vector<SwarmState>& snapshots, const Interval& domain,
                                 const Partition& partition, const ProtocolSettings& settings) {
  if (snapshots.empty()) throw ConfigError("no snapshots to estimate from");
  EstimationProblem problem(domain, settings.problem, observe(snapshots, partition));
  // Uniform unit-mass start.
  std::vector<double> init(settings.problem.basis_size, 1.0 / domain.length());
  Estimate est = solve_inverse(problem, init, settings.solver);
  const double mass = est.u_hat.mass();
  if (!(mass > 0.0)) throw DegenerateError("estimate has zero mass");
  for (double& v : est.u_hat.values()) v /= mass;
  for (double& v : est.coefficients) v /= mass;
  return est;
}

Estimate run_protocol(const ScalarField& field, const Partition& partition, const ProtocolSettings& settings) {
  return estimate_from_snapshots(protocol_snapshots(field, settings), field.domain().axis(0), partition, settings);
}

GridFunction rescale_with_known(const GridFunction& u_hat, const std::vector<double>& known, const Interval& window,
                                double* scale_out) {
  if (known.size() != u_hat.size()) throw ShapeError("known values must match the estimate grid");
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < u_hat.size(); ++i) {
    const double x = u_hat.grid().center(i)[0];
    if (x < window.lo || x > window.hi) continue;
    if (u_hat[i] < 1e-8 || !(known[i] > 0.0)) continue;
    sum += known[i] / u_hat[i];
    ++used;
  }
  if (used == 0) throw DegenerateError("no usable cells to fix the scale");
  const double scale = sum / double(used);
  if (scale_out) *scale_out = scale;
  GridFunction out = u_hat;
  for (double& v : out.values()) v *= scale;
  return out;
}

double relative_l2_error(const GridFunction& estimate, const GridFunction& truth) {
  require_same_grid(estimate.grid(), truth.grid(), "relative_l2_error");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  if (!(den > 0.0)) throw DegenerateError("relative error against a zero reference");
  return std::sqrt(num / den);
}

void write_estimate_csv(const std::filesystem::path& path, const GridFunction& u_hat,
                        const std::optional<GridFunction>& scaled) {
  if (scaled) require_same_grid(u_hat.grid(), scaled->grid(), "write_estimate_csv");
  std::vector<std::string> header{"x", "u_hat"};
  if (scaled) header.emplace_back("F_scaled");
  CsvWriter w(path, header);
  for (std::size_t i = 0; i < u_hat.size(); ++i) {
    w.cell(u_hat.grid().center(i)[0]).cell(u_hat[i]);
    if (scaled) w.cell((*scaled)[i]);
    w.end_row();
  }
}

GridFunction read_estimate_csv(const std::filesystem::path& path, const Domain& domain) {
  const CsvTable t = read_csv(path);
  const auto cx = t.column("x"), cu = t.column("u_hat");
  if (domain.dimension() != 1) throw LoadError("estimate CSV is 1D");
  if (t.rows.empty()) throw LoadError(path.string() + ": empty estimate");
  GridFunction u(UniformGrid(domain, t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double x = t.number(r, cx);
    const double expect = u.grid().center(r)[0];
    if (std::abs(x - expect) > 1e-9 * std::max(1.0, domain.axis(0).length()))
      throw LoadError(path.string() + ": x values are not the cell centres of a uniform grid");
    u[r] = t.number(r, cu);
  }
  return u;
}

}  // namespace swarmcov
