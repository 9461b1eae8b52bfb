#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "swarmcov/geometry.hpp"

namespace swarmcov {

// Index of the first step whose time k * dt is >= t (with a relative
// tolerance of 1e-9 so that t = k * dt rounds to k).
std::uint64_t step_at_or_after(double t, double dt);

struct TimedGrid {
  double time = 0.0;
  GridFunction density;
};

// `t,cell_x[,cell_y],density`, one row per cell per frame.
void write_histograms_csv(const std::filesystem::path& path, const std::vector<TimedGrid>& frames);
// Grid inferred from the cell centres; `domain` fixes the outer extents.
std::vector<TimedGrid> read_histograms_csv(const std::filesystem::path& path, const Domain& domain);

}  // namespace swarmcov
