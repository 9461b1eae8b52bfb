#include "swarmcov/experiments.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "swarmcov/csv.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/estimation.hpp"
#include "swarmcov/field.hpp"
#include "swarmcov/graph.hpp"
#include "swarmcov/grid_io.hpp"
#include "swarmcov/pde.hpp"
#include "swarmcov/sde.hpp"

namespace swarmcov {

namespace fs = std::filesystem;

namespace {

Domain domain_from_list(const std::vector<double>& v, const std::string& key) {
  if (v.size() != 2 && v.size() != 4) throw ConfigError("config key " + key + ": expected lo, hi[, lo, hi]");
  std::vector<Interval> axes{{v[0], v[1]}};
  if (v.size() == 4) axes.push_back({v[2], v[3]});
  try {
    return Domain(std::move(axes));
  } catch (const ConfigError& e) {
    throw ConfigError("config key " + key + ": " + e.what());
  }
}

ScalarField read_field(const Config& cfg) {
  const std::string kind = cfg.choice("field.kind", {"sine1d", "quadratic1d", "bump2d", "csv", "constant"});
  if (kind == "sine1d") return sine_field_1d();
  if (kind == "quadratic1d") return quadratic_field_1d();
  if (kind == "csv") {
    try {
      return load_field_csv(cfg.existing_file("field.path"));
    } catch (const LoadError& e) {
      throw ConfigError(std::string("field.path: ") + e.what());
    }
  }
  if (kind == "constant") {
    return ScalarField::constant(domain_from_list(cfg.numbers("field.domain"), "field.domain"),
                                 cfg.positive("field.value", 1.0));
  }
  BumpParams p;
  p.a1 = cfg.number("field.a1", p.a1);
  p.a2 = cfg.number("field.a2", p.a2);
  p.b1 = cfg.number("field.b1", p.b1);
  p.b2 = cfg.number("field.b2", p.b2);
  p.eps = cfg.nonnegative("field.eps", p.eps);
  p.combine = cfg.choice("field.combine", {"sum", "difference"}, "sum") == "sum" ? BumpCombine::sum
                                                                               : BumpCombine::difference;
  try {
    return bump_field_2d(p);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("[field]: ") + e.what());
  }
}

// [law] family = diffusion | reaction | constant.
ControlLaws read_law(const Config& cfg, const ScalarField& field) {
  const std::string family = cfg.choice("law.family", {"diffusion", "reaction", "constant"}, "diffusion");
  ControlLaws laws = [&] {
    if (family == "diffusion")
      return diffusion_coverage_law(field, cfg.positive("law.c1"), cfg.nonnegative("law.c2", 0.0));
    if (family == "reaction") return reaction_coverage_law(field, cfg.positive("law.c1"), cfg.positive("law.c2"));
    return constant_diffusion_law(field.domain(), cfg.positive("law.D"));
  }();
  const double k = cfg.nonnegative("law.switch_rate", 0.0);
  if (family != "reaction" && k > 0.0) throw ConfigError("law.switch_rate only applies to the reaction family");
  return k > 0.0 ? laws.with_switch_rate(k) : laws;
}

Point point_from(const std::vector<double>& v, int dim, const std::string& key) {
  if (v.size() != std::size_t(dim)) throw ConfigError("config key " + key + ": expected " + std::to_string(dim) + " values");
  return dim == 1 ? Point{v[0], 0.0} : Point{v[0], v[1]};
}

InitialDistribution read_initial(const Config& cfg, const std::string& prefix, const Domain& domain) {
  const std::string kind = cfg.choice(prefix + "init", {"gaussian", "uniform", "point"}, "uniform");
  const int dim = domain.dimension();
  const std::vector<double> mid = dim == 1 ? std::vector<double>{0.5 * (domain.axis(0).lo + domain.axis(0).hi)}
                                           : std::vector<double>{0.5 * (domain.axis(0).lo + domain.axis(0).hi),
                                                                 0.5 * (domain.axis(1).lo + domain.axis(1).hi)};
  if (kind == "uniform") return UniformInit{};
  const Point c = point_from(cfg.numbers(prefix + "init_center", mid), dim, prefix + "init_center");
  if (!domain.contains(c)) throw ConfigError("config key " + prefix + "init_center lies outside the domain");
  if (kind == "point") return PointInit{c};
  return GaussianInit{c, cfg.positive(prefix + "init_sigma", 0.1)};
}

std::array<std::size_t, 2> read_cells(const Config& cfg, const std::string& key, int dim,
                                      std::vector<double> fallback) {
  const auto v = cfg.numbers(key, std::move(fallback));
  if (v.size() != std::size_t(dim)) throw ConfigError("config key " + key + ": expected " + std::to_string(dim) + " values");
  std::array<std::size_t, 2> cells{1, 1};
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (!(v[a] >= 1.0) || v[a] != std::floor(v[a]) || v[a] > 1e6)
      throw ConfigError("config key " + key + ": cell counts must be positive integers");
    cells[a] = std::size_t(v[a]);
  }
  return cells;
}

std::vector<double> sorted_times(const Config& cfg, const std::string& key, double t_end) {
  auto t = cfg.numbers(key, {t_end});
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0.0 || t[i] > t_end) throw ConfigError("config key " + key + ": times must lie in [0, t_end]");
    if (i > 0 && !(t[i] > t[i - 1])) throw ConfigError("config key " + key + ": times must be increasing");
  }
  return t;
}

std::uint64_t read_seed(const Config& cfg, const RunOptions& options) {
  const std::uint64_t s = cfg.integer("run.seed", 0);
  return options.seed ? *options.seed : s;
}

unsigned read_workers(const Config& cfg) {
  const auto w = cfg.integer("run.workers", 1);
  if (w == 0 || w > 1024) throw ConfigError("config key run.workers must be in [1, 1024]");
  return unsigned(w);
}

fs::path prepare_out(const RunOptions& options) {
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + options.out_dir.string() + ": " + ec.message());
  return options.out_dir;
}

void write_metrics(const fs::path& path, const std::map<std::string, double>& metrics) {
  CsvWriter w(path, {"metric", "value"});
  for (const auto& [k, v] : metrics) {
    w.cell(std::string_view(k)).cell(v);
    w.end_row();
  }
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw NumericError("cannot write " + path.string());
  out << body;
}

void check_finite(const GridFunction& g, const std::string& what) {
  for (double v : g.values())
    if (!std::isfinite(v)) throw NumericError(what + " contains non-finite values");
}

}  // namespace

// ---------------------------------------------------------------- coverage

RunResult cmd_coverage(const Config& cfg, const RunOptions& options) {
  const ScalarField field = read_field(cfg);
  const Domain& domain = field.domain();
  const ControlLaws laws = read_law(cfg, field);
  SimConfig sim;
  const auto agents = cfg.integer("swarm.agents");
  if (agents == 0 || agents > 100'000'000) throw ConfigError("config key swarm.agents must be in [1, 1e8]");
  sim.agent_count = agents;
  sim.dt = cfg.positive("swarm.dt");
  sim.t_end = cfg.positive("swarm.t_end");
  sim.snapshot_times = sorted_times(cfg, "swarm.snapshots", sim.t_end);
  sim.initial = read_initial(cfg, "swarm.", domain);
  sim.initial_mode = cfg.choice("swarm.init_mode", {"active", "passive"}, "active") == "active" ? Mode::active
                                                                                                : Mode::passive;
  sim.seed = read_seed(cfg, options);
  sim.workers = read_workers(cfg);
  const auto cells = read_cells(cfg, "output.grid", domain.dimension(),
                                domain.dimension() == 1 ? std::vector<double>{50} : std::vector<double>{20, 20});
  const bool write_agents = cfg.flag("output.agents", false);
  check_step_size(laws, sim.dt);
  cfg.finish();

  const fs::path out = prepare_out(options);
  const auto snaps = simulate(sim, laws, domain);
  const UniformGrid grid(domain, cells);
  const GridFunction target = target_density(field, grid);

  RunResult res;
  std::vector<TimedGrid> frames;
  CsvWriter summary(out / "summary.csv", {"t", "tv", "active_fraction"});
  for (const auto& s : snaps) {
    GridFunction h = histogram(s, grid);
    const double tv = tv_distance(h, target);
    std::size_t active = 0;
    for (const auto& a : s.agents) active += a.mode == Mode::active;
    summary.cell(s.time).cell(tv).cell(double(active) / double(s.agents.size()));
    summary.end_row();
    frames.push_back({s.time, std::move(h)});
    res.metrics["final_tv"] = tv;
  }
  write_histograms_csv(out / "histograms.csv", frames);
  res.artifacts = {out / "histograms.csv", out / "summary.csv"};
  if (write_agents) {
    write_snapshots_csv(out / "agents.csv", snaps, domain.dimension());
    res.artifacts.push_back(out / "agents.csv");
  }
  if (options.gnuplot) {
    const std::string plot =
        domain.dimension() == 2
            ? "set datafile separator ','\nset key autotitle columnhead\nset view map\n"
              "stats 'histograms.csv' using 1 nooutput\n"
              "splot 'histograms.csv' using 2:3:($1 == STATS_max ? $4 : 1/0) with points pt 5 palette notitle\n"
              "pause mouse close\n"
              "set logscale x\nplot 'summary.csv' using 1:2 with linespoints title 'TV'\npause mouse close\n"
            : "set datafile separator ','\nset key autotitle columnhead\n"
              "plot 'histograms.csv' using 2:3 with points title 'density'\npause mouse close\n"
              "set logscale x\nplot 'summary.csv' using 1:2 with linespoints title 'TV'\npause mouse close\n";
    write_text(out / "coverage.gp", plot);
    res.artifacts.push_back(out / "coverage.gp");
  }
  return res;
}

// ---------------------------------------------------------------- pde

namespace {

GridFunction initial_density(const std::string& kind, const UniformGrid& grid, const Point& center, double sigma) {
  GridFunction y(grid, 0.0);
  if (kind == "uniform") {
    for (double& v : y.values()) v = 1.0;
  } else if (kind == "point") {
    y[grid.locate(center)] = 1.0;
  } else {
    // Cell averages of the Gaussian restricted to the domain.
    const int sub = 8;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto [ix, iy] = grid.coords(i);
      double acc = 0.0;
      for (int a = 0; a < sub; ++a)
        for (int b = 0; b < (grid.dimension() == 2 ? sub : 1); ++b) {
          const double x = grid.domain().axis(0).lo + (double(ix) + (a + 0.5) / sub) * grid.spacing(0);
          double r2 = (x - center[0]) * (x - center[0]);
          if (grid.dimension() == 2) {
            const double yy = grid.domain().axis(1).lo + (double(iy) + (b + 0.5) / sub) * grid.spacing(1);
            r2 += (yy - center[1]) * (yy - center[1]);
          }
          acc += std::exp(-0.5 * r2 / (sigma * sigma));
        }
      y[i] = acc;
    }
  }
  const double m = y.mass();
  for (double& v : y.values()) v /= m;
  return y;
}

}  // namespace

RunResult cmd_pde(const Config& cfg, const RunOptions& options) {
  const std::string mode = cfg.choice("pde.coefficients", {"constant", "law", "weight_csv"});
  std::optional<ScalarField> field;
  std::optional<ControlLaws> laws;
  std::optional<Domain> domain;
  double w_const = 0.0;
  if (mode == "law") {
    field = read_field(cfg);
    laws = read_law(cfg, *field);
    domain = field->domain();
  } else if (mode == "weight_csv") {
    try {
      field = load_field_csv(cfg.existing_file("pde.w_path"));
    } catch (const LoadError& e) {
      throw ConfigError(std::string("pde.w_path: ") + e.what());
    }
    domain = field->domain();
  } else {
    domain = domain_from_list(cfg.numbers("pde.domain", {0.0, 1.0}), "pde.domain");
    w_const = cfg.positive("pde.w");
  }
  const auto cells = read_cells(cfg, "pde.cells", domain->dimension(),
                                domain->dimension() == 1 ? std::vector<double>{100} : std::vector<double>{40, 40});
  const double t_end = cfg.positive("pde.t_end");
  const auto times = sorted_times(cfg, "pde.snapshots", t_end);
  const std::optional<double> dt = cfg.has("pde.dt") ? std::optional<double>(cfg.positive("pde.dt")) : std::nullopt;
  const std::string init = cfg.choice("pde.init", {"uniform", "gaussian", "point"}, "gaussian");
  const int dim = domain->dimension();
  const std::vector<double> mid = dim == 1 ? std::vector<double>{0.5} : std::vector<double>{0.5, 0.5};
  const Point center = init == "uniform" ? Point{} : point_from(cfg.numbers("pde.init_center", mid), dim, "pde.init_center");
  const double sigma = init == "gaussian" ? cfg.positive("pde.init_sigma", 0.1) : 0.1;
  if (init != "uniform" && !domain->contains(center)) throw ConfigError("config key pde.init_center lies outside the domain");
  cfg.finish();

  const UniformGrid grid(*domain, cells);
  AdrCoefficients coeffs = laws    ? coefficients_from_laws(*laws, grid)
                           : field ? AdrCoefficients(cell_averages(*field, grid))
                                   : AdrCoefficients(GridFunction(grid, w_const));
  const GridFunction y0 = initial_density(init, grid, center, sigma);
  const bool two_species = !coeffs.diffusion_only() || coeffs.switch_rate > 0.0;
  const auto y20 = two_species ? std::optional<GridFunction>(GridFunction(grid, 0.0)) : std::nullopt;

  const fs::path out = prepare_out(options);
  const SolveReport rep = solve(y0, y20, coeffs, t_end, times, dt);
  for (const auto& s : rep.snapshots) check_finite(s.y1, "PDE solution");

  RunResult res;
  std::vector<TimedGrid> frames, passive;
  for (const auto& s : rep.snapshots) {
    frames.push_back({s.time, s.y1});
    if (s.y2) passive.push_back({s.time, *s.y2});
  }
  write_histograms_csv(out / "snapshots.csv", frames);
  res.artifacts.push_back(out / "snapshots.csv");
  if (!passive.empty()) {
    write_histograms_csv(out / "passive.csv", passive);
    res.artifacts.push_back(out / "passive.csv");
  }
  res.metrics["mass_drift"] = rep.mass_drift;
  res.metrics["dt"] = rep.dt_used;
  res.metrics["steps"] = double(rep.steps);
  if (!two_species) {
    const GridFunction target = steady_state(coeffs.w);
    res.metrics["final_tv_to_steady"] = tv_distance(rep.snapshots.back().y1, target);
    if (rep.snapshots.size() >= 4) {
      try {
        const DecayFit fit = decay_rate(rep.snapshots, target);
        res.metrics["decay_rate"] = fit.rate;
        res.metrics["decay_r_squared"] = fit.r_squared;
        if (mode == "constant") res.metrics["decay_rate_over_w_pi2"] = fit.rate / (w_const * std::numbers::pi * std::numbers::pi);
      } catch (const DegenerateError&) {
        // Converged before the snapshots: no decay to fit.
      }
    }
  }
  write_metrics(out / "report.csv", res.metrics);
  res.artifacts.push_back(out / "report.csv");
  if (options.gnuplot) {
    write_text(out / "pde.gp",
               dim == 1 ? "set datafile separator ','\nplot 'snapshots.csv' using 2:3:1 with points palette "
                          "title 'y1(t)'\npause mouse close\n"
                        : "set datafile separator ','\nset view map\nstats 'snapshots.csv' using 1 nooutput\n"
                          "splot 'snapshots.csv' using 2:3:($1 == STATS_max ? $4 : 1/0) with points pt 5 "
                          "palette notitle\npause mouse close\n");
    res.artifacts.push_back(out / "pde.gp");
  }
  return res;
}

// ---------------------------------------------------------------- graph

RunResult cmd_graph(const Config& cfg, const RunOptions& options) {
  const std::string source = cfg.choice("graph.kind", {"edges", "path", "complete"}, "edges");
  std::optional<Graph> g;
  if (source == "edges") {
    try {
      g = load_edge_list(cfg.existing_file("graph.edges"));
    } catch (const LoadError& e) {
      throw ConfigError(std::string("graph.edges: ") + e.what());
    }
  } else {
    const auto n = cfg.integer("graph.vertices");
    if (n < 1 || n > 100000) throw ConfigError("config key graph.vertices must be in [1, 1e5]");
    g = source == "path" ? Graph::path(n) : Graph::complete(n);
  }
  NodeRates rates{cfg.numbers("rates.f"), cfg.positive("rates.c", 1.0), cfg.number("rates.exponent", 1.0)};
  try {
    validate(rates, *g);
  } catch (const Error& e) {
    throw ConfigError(std::string("[rates]: ") + e.what());
  }
  const std::size_t n = g->vertex_count();
  std::vector<double> p0(n, 0.0);
  p0[0] = 1.0;
  p0 = cfg.numbers("propagate.p0", p0);
  if (p0.size() != n) throw ConfigError("config key propagate.p0 must have one entry per vertex");
  double total = 0.0;
  for (double v : p0) {
    if (v < 0.0) throw ConfigError("config key propagate.p0 must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("config key propagate.p0 must sum to 1");
  auto times = cfg.numbers("propagate.times", {0.0, 1.0, 2.0, 4.0, 8.0});
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] < 0.0 || (i > 0 && !(times[i] > times[i - 1])))
      throw ConfigError("config key propagate.times must be nonnegative and increasing");
  const auto start = cfg.integer("sampler.start", 0);
  if (start >= n) throw ConfigError("config key sampler.start is not a vertex");
  const auto jumps = cfg.integer("sampler.jumps", 100000);
  if (jumps == 0) throw ConfigError("config key sampler.jumps must be positive");
  const bool write_traj = cfg.flag("sampler.write_trajectory", true);
  const std::uint64_t seed = read_seed(cfg, options);
  cfg.finish();

  const fs::path out = prepare_out(options);
  RunResult res;
  const auto pi = invariant_distribution(rates);
  const auto resid = generator_residual(*g, rates, pi);
  double max_resid = 0.0;
  {
    CsvWriter w(out / "invariant.csv", {"vertex", "pi", "residual"});
    for (std::size_t i = 0; i < n; ++i) {
      w.cell(i).cell(pi[i]).cell(resid[i]);
      w.end_row();
      max_resid = std::max(max_resid, std::abs(resid[i]));
    }
  }
  {
    CsvWriter w(out / "propagate.csv", {"t", "vertex", "p"});
    for (double t : times) {
      const auto p = propagate(*g, p0, rates, t);
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(p[i])) throw NumericError("propagate produced a non-finite probability");
        w.cell(t).cell(i).cell(p[i]);
        w.end_row();
      }
      res.metrics["final_tv_propagate"] = tv_distance(p, pi);
    }
  }
  const auto traj = sample_ctmc(*g, rates, start, std::numeric_limits<double>::infinity(), seed, jumps);
  const auto occ = occupation_fractions(traj, n);
  {
    CsvWriter w(out / "occupation.csv", {"vertex", "occupation", "pi"});
    for (std::size_t i = 0; i < n; ++i) {
      w.cell(i).cell(occ[i]).cell(pi[i]);
      w.end_row();
    }
  }
  res.artifacts = {out / "invariant.csv", out / "propagate.csv", out / "occupation.csv"};
  if (write_traj) {
    write_trajectory_csv(out / "trajectory.csv", traj);
    res.artifacts.push_back(out / "trajectory.csv");
  }
  res.metrics["max_residual"] = max_resid;
  res.metrics["occupation_tv"] = tv_distance(occ, pi);
  res.metrics["jumps"] = double(traj.size() - 1);
  write_metrics(out / "report.csv", res.metrics);
  res.artifacts.push_back(out / "report.csv");
  if (options.gnuplot) {
    write_text(out / "graph.gp",
               "set datafile separator ','\nset style data histograms\nset style fill solid\n"
               "plot 'occupation.csv' using 2 title 'occupation', '' using 3 title 'pi'\npause mouse close\n");
    res.artifacts.push_back(out / "graph.gp");
  }
  return res;
}

// ---------------------------------------------------------------- estimate

namespace {

void write_history(const fs::path& path, const std::vector<double>& history) {
  CsvWriter w(path, {"iteration", "objective"});
  for (std::size_t i = 0; i < history.size(); ++i) {
    w.cell(i).cell(history[i]);
    w.end_row();
  }
}

}  // namespace

RunResult cmd_estimate(const Config& cfg, const RunOptions& options) {
  const ScalarField field = read_field(cfg);
  if (field.domain().dimension() != 1) throw ConfigError("field: estimation needs a 1D field");
  const Interval dom = field.domain().axis(0);
  ProtocolSettings s;
  s.c = cfg.positive("protocol.c");
  s.problem.T1 = cfg.positive("protocol.T1");
  s.problem.T2 = cfg.positive("protocol.T2");
  if (!(s.problem.T1 < s.problem.T2)) throw ConfigError("config keys protocol.T1 < protocol.T2 required");
  s.problem.d = cfg.positive("protocol.d");
  s.dt1 = cfg.positive("protocol.dt1");
  s.dt2 = cfg.positive("protocol.dt2");
  s.agent_count = cfg.integer("protocol.agents");
  if (s.agent_count == 0 || s.agent_count > 100'000'000) throw ConfigError("config key protocol.agents must be in [1, 1e8]");
  s.observation_count = cfg.integer("protocol.observations", 20);
  if (s.observation_count == 0) throw ConfigError("config key protocol.observations must be positive");
  s.initial = read_initial(cfg, "protocol.", field.domain());
  s.problem.lambda = cfg.nonnegative("estimate.lambda", 0.1);
  s.problem.basis_size = cfg.integer("estimate.basis", 10);
  if (s.problem.basis_size < 2) throw ConfigError("config key estimate.basis must be >= 2");
  s.problem.solver_cells = cfg.integer("estimate.solver_cells", 100);
  if (s.problem.solver_cells < 2) throw ConfigError("config key estimate.solver_cells must be >= 2");
  s.solver.max_iters = cfg.integer("estimate.max_iters", 5000);
  s.solver.tol = cfg.nonnegative("estimate.tol", 1e-10);
  const auto window = cfg.numbers("estimate.window", {0.7, 1.0});
  if (window.size() != 2 || !(window[0] < window[1]) || window[0] < dom.lo || window[1] > dom.hi)
    throw ConfigError("config key estimate.window must be lo, hi inside the domain");
  const auto divisions = cfg.integer("estimate.partition", 100);
  if (divisions == 0) throw ConfigError("config key estimate.partition must be positive");
  const auto compare = cfg.integer("estimate.compare", 0);
  const bool rescale = cfg.flag("estimate.rescale", true);
  s.seed = read_seed(cfg, options);
  s.workers = read_workers(cfg);
  // Surface schedule problems before simulating.
  check_step_size(diffusion_coverage_law(field, s.c), s.dt1);
  cfg.finish();

  const fs::path out = prepare_out(options);
  const auto snaps = protocol_snapshots(field, s);
  RunResult res;

  auto run_one = [&](std::size_t div, const std::string& suffix) {
    const Partition part = Partition::grid_aligned(window[0], window[1], div);
    const ObservationSeries obs = observe(snaps, part);
    write_observations_csv(out / ("observations" + suffix + ".csv"), obs);
    Estimate est = estimate_from_snapshots(snaps, dom, part, s);
    check_finite(est.u_hat, "estimate");
    const GridFunction truth = target_density(field, est.u_hat.grid());
    const double err = relative_l2_error(est.u_hat, truth);
    std::optional<GridFunction> scaled;
    if (rescale) {
      std::vector<double> known(est.u_hat.size());
      for (std::size_t i = 0; i < known.size(); ++i) known[i] = field(est.u_hat.grid().center(i));
      double scale = 0.0;
      scaled = rescale_with_known(est.u_hat, known, {window[0], window[1]}, &scale);
      res.metrics["scale" + suffix] = scale;
    }
    write_estimate_csv(out / ("estimate" + suffix + ".csv"), est.u_hat, scaled);
    write_history(out / ("history" + suffix + ".csv"), est.objective_history);
    res.metrics["rel_l2_error" + suffix] = err;
    res.metrics["iterations" + suffix] = double(est.iterations);
    res.metrics["objective" + suffix] = est.objective_history.back();
    res.metrics["cells" + suffix] = double(part.size());
    for (const char* stem : {"observations", "estimate", "history"})
      res.artifacts.push_back(out / (std::string(stem) + suffix + ".csv"));
  };
  run_one(divisions, "");
  if (compare > 0) run_one(compare, "_compare");
  write_metrics(out / "summary.csv", res.metrics);
  res.artifacts.push_back(out / "summary.csv");
  if (options.gnuplot) {
    write_text(out / "estimate.gp",
               std::string("set datafile separator ','\nset key autotitle columnhead\n"
                           "plot 'estimate.csv' using 1:2 with lines") +
                   (compare > 0 ? ", 'estimate_compare.csv' using 1:2 with lines" : "") +
                   "\npause mouse close\n");
    res.artifacts.push_back(out / "estimate.gp");
  }
  return res;
}

}  // namespace swarmcov
