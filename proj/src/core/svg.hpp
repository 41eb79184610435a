// Deterministic SVG rendering: phase portraits (vector field + trajectories,
// optional basin shading) and basin heatmaps. Byte-identical output for
// identical inputs; no timestamps, no rasterization.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/limitset.hpp"
#include "core/system.hpp"

namespace koop {

struct PhasePlotSpec {
  Box view;                           // plotted region (2D, after projection)
  std::array<int, 2> projection{0, 1};  // state axes mapped to plot x/y
  int field_grid = 20;                // arrows per axis; 0 disables the field
  int width_px = 640;
  int height_px = 640;
};

// Requires a 2D plot plane: dim == 2, or dim == 3 with a declared projection.
// dim > 3 is unsupported.
std::string render_phase_plot(const SystemDef& sys,
                              const std::vector<Trajectory>& trajectories,
                              const PhasePlotSpec& spec,
                              const BasinMap* basins = nullptr);

// x(t) line chart for 1D trajectories.
std::string render_timeseries(const Trajectory& traj, int width_px = 640,
                              int height_px = 400);

// Cell heatmap of a 2D basin map.
std::string render_basin_heatmap(const BasinMap& map, int width_px = 640,
                                 int height_px = 640);

}  // namespace koop
