#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "swarmcov/config.hpp"
#include "swarmcov/error.hpp"
#include "swarmcov/estimation.hpp"
#include "swarmcov/experiments.hpp"
#include "swarmcov/field.hpp"
#include "swarmcov/graph.hpp"
#include "swarmcov/pde.hpp"
#include "swarmcov/sde.hpp"

namespace py = pybind11;
using namespace swarmcov;

namespace {

Domain unit_or(const std::vector<std::pair<double, double>>& axes) {
  std::vector<Interval> iv;
  for (const auto& [lo, hi] : axes) iv.push_back({lo, hi});
  return Domain(iv);
}

GridFunction on_line(const std::vector<double>& values, std::pair<double, double> domain) {
  return GridFunction(UniformGrid(Domain({{domain.first, domain.second}}), values.size()), values);
}

std::vector<double> as_vector(const GridFunction& g) { return {g.values().begin(), g.values().end()}; }

InitialDistribution make_init(const std::string& kind, std::vector<double> center, double sigma) {
  center.resize(2, 0.0);
  if (kind == "uniform") return UniformInit{};
  if (kind == "gaussian") return GaussianInit{{center[0], center[1]}, sigma};
  if (kind == "point") return PointInit{{center[0], center[1]}};
  throw ConfigError("init must be uniform, gaussian or point");
}

Graph make_graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) { return Graph(n, edges); }

}  // namespace

PYBIND11_MODULE(_swarmcov, m) {
  m.doc() = "Swarm coverage simulation, mean-field solver and field estimation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<LoadError>(m, "LoadError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  auto numeric = py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<StepError>(m, "StepError", numeric.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", numeric.ptr());

  py::class_<ScalarField>(m, "Field")
      .def("__call__", [](const ScalarField& f, double x, double y) { return f(Point{x, y}); }, py::arg("x"),
           py::arg("y") = 0.0)
      .def("gradient", [](const ScalarField& f, double x, double y) { return f.gradient(Point{x, y}); },
           py::arg("x"), py::arg("y") = 0.0)
      .def_property_readonly("domain",
                             [](const ScalarField& f) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& a : f.domain().axes()) out.emplace_back(a.lo, a.hi);
                               return out;
                             })
      .def_property_readonly("floor", &ScalarField::floor)
      .def("scaled", &ScalarField::scaled);

  m.def("sine_field_1d", &sine_field_1d);
  m.def("quadratic_field_1d", &quadratic_field_1d);
  m.def("bump_field_2d", [] { return bump_field_2d(); });
  m.def("constant_field", [](const std::vector<std::pair<double, double>>& domain, double value) {
    return ScalarField::constant(unit_or(domain), value);
  });
  m.def("load_field_csv", &load_field_csv, py::arg("path"));

  m.def(
      "simulate_coverage",
      [](const ScalarField& field, double c1, std::size_t agents, double dt, double t_end,
         std::vector<double> snapshot_times, std::uint64_t seed, const std::string& init, std::vector<double> center,
         double sigma, unsigned workers) {
        SimConfig sim;
        sim.agent_count = agents;
        sim.dt = dt;
        sim.t_end = t_end;
        sim.seed = seed;
        sim.snapshot_times = std::move(snapshot_times);
        sim.initial = make_init(init, std::move(center), sigma);
        sim.workers = workers;
        std::vector<std::pair<double, std::vector<std::array<double, 2>>>> out;
        for (const auto& s : simulate(sim, diffusion_coverage_law(field, c1), field.domain())) {
          std::vector<std::array<double, 2>> pos;
          for (const auto& a : s.agents) pos.push_back(a.position);
          out.emplace_back(s.time, std::move(pos));
        }
        return out;
      },
      "Simulate the diffusion coverage law D = c1 / sqrt(F). Returns [(t, [[x, y], ...]), ...].", py::arg("field"),
      py::arg("c1"), py::arg("agents"), py::arg("dt"), py::arg("t_end"), py::arg("snapshot_times"),
      py::arg("seed") = 0, py::arg("init") = "uniform", py::arg("center") = std::vector<double>{0.5, 0.5},
      py::arg("sigma") = 0.1, py::arg("workers") = 1);

  m.def(
      "solve_diffusion",
      [](const std::vector<double>& w, const std::vector<double>& y0, double t_end, const std::vector<double>& times,
         std::pair<double, double> domain) {
        const SolveReport rep = solve(on_line(y0, domain), std::nullopt, AdrCoefficients(on_line(w, domain)), t_end,
                                      times);
        py::dict out;
        std::vector<double> ts;
        std::vector<std::vector<double>> ys;
        for (const auto& s : rep.snapshots) {
          ts.push_back(s.time);
          ys.push_back(as_vector(s.y1));
        }
        out["times"] = ts;
        out["snapshots"] = ys;
        out["mass_drift"] = rep.mass_drift;
        out["dt"] = rep.dt_used;
        out["steps"] = rep.steps;
        return out;
      },
      "Zero-flux finite-volume solve of dy/dt = (w y)'' on a 1D cell grid.", py::arg("w"), py::arg("y0"),
      py::arg("t_end"), py::arg("times"), py::arg("domain") = std::pair<double, double>{0.0, 1.0});

  m.def(
      "steady_state",
      [](const std::vector<double>& w, std::pair<double, double> domain) {
        return as_vector(steady_state(on_line(w, domain)));
      },
      py::arg("w"), py::arg("domain") = std::pair<double, double>{0.0, 1.0});

  m.def(
      "invariant_distribution",
      [](std::vector<double> f, double c, double exponent) { return invariant_distribution({std::move(f), c, exponent}); },
      py::arg("f"), py::arg("c") = 1.0, py::arg("exponent") = 1.0);
  m.def(
      "propagate",
      [](std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges, const std::vector<double>& p0,
         std::vector<double> f, double t, double c, double exponent) {
        return propagate(make_graph(n, edges), p0, {std::move(f), c, exponent}, t);
      },
      py::arg("n"), py::arg("edges"), py::arg("p0"), py::arg("f"), py::arg("t"), py::arg("c") = 1.0,
      py::arg("exponent") = 1.0);
  m.def(
      "sample_ctmc",
      [](std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges, std::vector<double> f,
         std::size_t start, double t_end, std::uint64_t seed, std::size_t max_jumps, double c, double exponent) {
        const auto traj = sample_ctmc(make_graph(n, edges), {std::move(f), c, exponent}, start, t_end, seed, max_jumps);
        std::vector<std::pair<double, std::size_t>> out;
        for (const auto& j : traj) out.emplace_back(j.time, j.vertex);
        return out;
      },
      "Gillespie trajectory as [(jump time, vertex), ...] starting at (0, start).", py::arg("n"), py::arg("edges"),
      py::arg("f"), py::arg("start"), py::arg("t_end"), py::arg("seed") = 0,
      py::arg("max_jumps") = std::numeric_limits<std::size_t>::max(), py::arg("c") = 1.0, py::arg("exponent") = 1.0);

  py::class_<EstimationProblem>(m, "EstimationProblem")
      .def(py::init([](std::pair<double, double> window, std::size_t divisions, std::vector<double> times,
                       std::vector<std::vector<double>> values, std::size_t basis, double d, double lam, double T1,
                       double T2, std::size_t solver_cells) {
             ProblemSettings s{basis, d, lam, T1, T2, solver_cells};
             ObservationSeries obs{Partition::grid_aligned(window.first, window.second, divisions), std::move(times),
                                   std::move(values), 0};
             return EstimationProblem({0.0, 1.0}, s, std::move(obs));
           }),
           "Least-squares reconstruction on [0, 1] from windowed occupancy fractions.", py::arg("window"),
           py::arg("divisions"), py::arg("times"), py::arg("values"), py::arg("basis") = 10, py::arg("d") = 1e-6,
           py::arg("lam") = 0.1, py::arg("T1") = 0.0, py::arg("T2") = 1.0, py::arg("solver_cells") = 100)
      .def("predict", &EstimationProblem::predict)
      .def("objective", &EstimationProblem::objective)
      .def("gradient", &EstimationProblem::adjoint_gradient)
      .def("with_values", &EstimationProblem::with_values)
      .def("expand", [](const EstimationProblem& p, const std::vector<double>& c) { return as_vector(p.expand(c)); })
      .def(
          "solve",
          [](const EstimationProblem& p, const std::vector<double>& init, std::size_t max_iters, double tol) {
            const Estimate e = solve_inverse(p, init, {max_iters, tol});
            py::dict out;
            out["coefficients"] = e.coefficients;
            out["u_hat"] = as_vector(e.u_hat);
            out["history"] = e.objective_history;
            out["iterations"] = e.iterations;
            return out;
          },
          py::arg("init"), py::arg("max_iters") = 2000, py::arg("tol") = 1e-10)
      .def_property_readonly("cell_count", [](const EstimationProblem& p) { return p.observations().partition.size(); });

  m.def(
      "run",
      [](const std::string& command, const std::filesystem::path& config, const std::filesystem::path& out,
         std::optional<std::uint64_t> seed) {
        static const std::map<std::string, RunResult (*)(const Config&, const RunOptions&)> commands{
            {"coverage", cmd_coverage}, {"pde", cmd_pde}, {"graph", cmd_graph}, {"estimate", cmd_estimate}};
        const auto it = commands.find(command);
        if (it == commands.end()) throw ConfigError("unknown command '" + command + "'");
        RunOptions o;
        o.out_dir = out;
        o.seed = seed;
        const RunResult r = it->second(Config::load(config), o);
        return r.metrics;
      },
      "Run one CLI experiment and return its metrics.", py::arg("command"), py::arg("config"), py::arg("out") = "out",
      py::arg("seed") = std::nullopt);
}
