#include "swarmcov/grid_io.hpp"

#include <algorithm>
#include <cmath>

#include "swarmcov/csv.hpp"
#include "swarmcov/error.hpp"

namespace swarmcov {

std::uint64_t step_at_or_after(double t, double dt) {
  if (t <= 0.0) return 0;
  const double q = t / dt;
  return static_cast<std::uint64_t>(std::ceil(q - 1e-9 * std::max(1.0, q)));
}

void write_histograms_csv(const std::filesystem::path& path, const std::vector<TimedGrid>& frames) {
  if (frames.empty()) throw ConfigError("no histogram frames to write");
  const int dim = frames.front().density.grid().dimension();
  CsvWriter w = dim == 2 ? CsvWriter(path, {"t", "cell_x", "cell_y", "density"})
                         : CsvWriter(path, {"t", "cell_x", "density"});
  for (const auto& f : frames) {
    const auto& g = f.density.grid();
    for (std::size_t c = 0; c < g.size(); ++c) {
      const Point p = g.center(c);
      w.cell(f.time).cell(p[0]);
      if (dim == 2) w.cell(p[1]);
      w.cell(f.density[c]);
      w.end_row();
    }
  }
}

std::vector<TimedGrid> read_histograms_csv(const std::filesystem::path& path, const Domain& domain) {
  const CsvTable t = read_csv(path);
  const bool two_d = t.has_column("cell_y");
  if (two_d != (domain.dimension() == 2)) throw LoadError(path.string() + ": dimension does not match domain");
  const std::size_t ct = t.column("t"), cx = t.column("cell_x"), cd = t.column("density");
  const std::size_t cy = two_d ? t.column("cell_y") : 0;

  std::vector<std::pair<double, std::vector<std::size_t>>> frames;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double time = t.number(r, ct);
    if (frames.empty() || frames.back().first != time) frames.push_back({time, {}});
    frames.back().second.push_back(r);
  }
  std::vector<TimedGrid> out;
  for (const auto& [time, rows] : frames) {
    std::vector<double> xs, ys;
    for (auto r : rows) {
      xs.push_back(t.number(r, cx));
      if (two_d) ys.push_back(t.number(r, cy));
    }
    auto count_distinct = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
    };
    const std::size_t nx = count_distinct(xs);
    const std::size_t ny = two_d ? count_distinct(ys) : 1;
    if (nx * ny != rows.size()) throw LoadError(path.string() + ": incomplete histogram grid at t=" + format_double(time));
    UniformGrid grid(domain, {nx, ny});
    GridFunction g(grid);
    std::vector<char> seen(grid.size(), 0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Point p{xs[k], two_d ? ys[k] : 0.0};
      const std::size_t c = grid.locate(p);
      const Point ctr = grid.center(c);
      if (std::abs(ctr[0] - p[0]) > 1e-9 * grid.spacing(0) ||
          (two_d && std::abs(ctr[1] - p[1]) > 1e-9 * grid.spacing(1)) || seen[c]) {
        throw LoadError(path.string() + ": cell centre does not match a uniform grid over the domain");
      }
      seen[c] = 1;
      g[c] = t.number(rows[k], cd);
    }
    out.push_back(TimedGrid{time, std::move(g)});
  }
  return out;
}

}  // namespace swarmcov
