#include "core/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/error.hpp"

namespace koop {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

const char* basin_color(int label) {
  static const char* palette[] = {"#ffd9a0", "#a8c8f0", "#b4e0a8", "#e0b0e0",
                                  "#f0c8c8", "#c8f0e8", "#e8e8a8", "#d0c0f0"};
  if (label == BasinMap::kUnresolved) return "#f0f0f0";
  if (label == BasinMap::kDiverged) return "#d8d8d8";
  return palette[static_cast<std::size_t>(label) % 8];
}

const char* trajectory_color(std::size_t i) {
  static const char* palette[] = {"#1f5fbf", "#0f8f8f", "#7f3fbf",
                                  "#bf5f1f", "#3f7f3f"};
  return palette[i % 5];
}

struct Frame {
  Box view;
  double w, h, margin;
  double px(double x) const {
    return margin + (x - view.lo[0]) / (view.hi[0] - view.lo[0]) * (w - 2 * margin);
  }
  double py(double y) const {
    return h - margin -
           (y - view.lo[1]) / (view.hi[1] - view.lo[1]) * (h - 2 * margin);
  }
};

void emit_axes(std::ostringstream& out, const Frame& f) {
  out << "<rect x=\"" << num(f.margin) << "\" y=\"" << num(f.margin)
      << "\" width=\"" << num(f.w - 2 * f.margin) << "\" height=\""
      << num(f.h - 2 * f.margin)
      << "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
  for (int axis = 0; axis < 2; ++axis) {
    const double lo = f.view.lo[axis], hi = f.view.hi[axis];
    for (int k = 0; k <= 4; ++k) {
      const double v = lo + (hi - lo) * k / 4.0;
      if (axis == 0) {
        const double x = f.px(v);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.h - f.margin)
            << "\" x2=\"" << num(x) << "\" y2=\""
            << num(f.h - f.margin + 4) << "\" stroke=\"#404040\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << num(f.h - f.margin + 16)
            << "\" font-family=\"monospace\" font-size=\"10\" "
               "text-anchor=\"middle\">"
            << num(v) << "</text>\n";
      } else {
        const double y = f.py(v);
        out << "<line x1=\"" << num(f.margin - 4) << "\" y1=\"" << num(y)
            << "\" x2=\"" << num(f.margin) << "\" y2=\"" << num(y)
            << "\" stroke=\"#404040\"/>\n";
        out << "<text x=\"" << num(f.margin - 6) << "\" y=\"" << num(y + 3)
            << "\" font-family=\"monospace\" font-size=\"10\" "
               "text-anchor=\"end\">"
            << num(v) << "</text>\n";
      }
    }
  }
}

std::string svg_open(double w, double h) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w)
      << "\" height=\"" << num(h) << "\" viewBox=\"0 0 " << num(w) << " "
      << num(h) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  return out.str();
}

}  // namespace

std::string render_phase_plot(const SystemDef& sys,
                              const std::vector<Trajectory>& trajectories,
                              const PhasePlotSpec& spec,
                              const BasinMap* basins) {
  if (sys.dim > 3)
    fail(ErrorCode::unsupported, "phase plots support dim <= 3 only");
  if (sys.dim == 1)
    fail(ErrorCode::unsupported, "use render_timeseries for 1D systems");
  const int ax = spec.projection[0], ay = spec.projection[1];
  if (ax < 0 || ay < 0 || ax >= sys.dim || ay >= sys.dim || ax == ay)
    fail(ErrorCode::invalid_argument, "bad projection axes");

  Frame f{spec.view, static_cast<double>(spec.width_px),
          static_cast<double>(spec.height_px), 42.0};
  std::ostringstream out;
  out << svg_open(f.w, f.h);

  if (basins && basins->box.dim() == 2) {
    const double cw =
        (f.px(basins->box.hi[0]) - f.px(basins->box.lo[0])) / basins->resolution[0];
    const double ch =
        (f.py(basins->box.lo[1]) - f.py(basins->box.hi[1])) / basins->resolution[1];
    for (std::size_t idx = 0; idx < basins->labels.size(); ++idx) {
      const Vec c = basins->cell_center(idx);
      out << "<rect x=\"" << num(f.px(c[0]) - cw / 2) << "\" y=\""
          << num(f.py(c[1]) - ch / 2) << "\" width=\"" << num(cw)
          << "\" height=\"" << num(ch) << "\" fill=\""
          << basin_color(basins->labels[idx]) << "\"/>\n";
    }
  }

  if (spec.field_grid > 0 && sys.dim >= 2) {
    const int g = spec.field_grid;
    // Arrow length is normalized per cell; only the direction is drawn.
    const double cell = std::min((spec.view.hi[0] - spec.view.lo[0]) / g,
                                 (spec.view.hi[1] - spec.view.lo[1]) / g);
    Vec x(sys.dim), dx(sys.dim);
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        x.setZero();
        x[ax] = spec.view.lo[0] +
                (spec.view.hi[0] - spec.view.lo[0]) * (i + 0.5) / g;
        x[ay] = spec.view.lo[1] +
                (spec.view.hi[1] - spec.view.lo[1]) * (j + 0.5) / g;
        if (!sys.domain.contains(x)) continue;
        sys.vector_field(x, dx);
        const double mag = std::hypot(dx[ax], dx[ay]);
        if (mag < 1e-14) continue;
        const double ux = dx[ax] / mag, uy = dx[ay] / mag;
        const double x0 = x[ax] - 0.35 * cell * ux, y0 = x[ay] - 0.35 * cell * uy;
        const double x1 = x[ax] + 0.35 * cell * ux, y1 = x[ay] + 0.35 * cell * uy;
        out << "<line x1=\"" << num(f.px(x0)) << "\" y1=\"" << num(f.py(y0))
            << "\" x2=\"" << num(f.px(x1)) << "\" y2=\"" << num(f.py(y1))
            << "\" stroke=\"#cc3333\" stroke-width=\"0.8\"/>\n";
        // arrow head
        const double hx = x1 - 0.12 * cell * (ux - 0.6 * uy);
        const double hy = y1 - 0.12 * cell * (uy + 0.6 * ux);
        const double gx = x1 - 0.12 * cell * (ux + 0.6 * uy);
        const double gy = y1 - 0.12 * cell * (uy - 0.6 * ux);
        out << "<path d=\"M " << num(f.px(hx)) << " " << num(f.py(hy)) << " L "
            << num(f.px(x1)) << " " << num(f.py(y1)) << " L " << num(f.px(gx))
            << " " << num(f.py(gy))
            << "\" fill=\"none\" stroke=\"#cc3333\" stroke-width=\"0.8\"/>\n";
      }
    }
  }

  for (std::size_t ti = 0; ti < trajectories.size(); ++ti) {
    const Trajectory& tr = trajectories[ti];
    out << "<polyline fill=\"none\" stroke=\"" << trajectory_color(ti)
        << "\" stroke-width=\"1.2\" points=\"";
    for (const Vec& s : tr.states)
      out << num(f.px(s[ax])) << "," << num(f.py(s[ay])) << " ";
    out << "\"/>\n";
  }

  emit_axes(out, f);
  out << "</svg>\n";
  return out.str();
}

std::string render_timeseries(const Trajectory& traj, int width_px,
                              int height_px) {
  if (traj.dim != 1)
    fail(ErrorCode::unsupported, "timeseries rendering expects dim == 1");
  double lo = traj.states.front()[0], hi = lo;
  for (const Vec& s : traj.states) {
    lo = std::min(lo, s[0]);
    hi = std::max(hi, s[0]);
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double t_end = traj.time_at(traj.states.size() - 1);
  Box view;
  view.lo = Vec(2);
  view.hi = Vec(2);
  view.lo << std::min(traj.t0, t_end), lo;
  view.hi << std::max(traj.t0, t_end), hi;
  Frame f{view, static_cast<double>(width_px), static_cast<double>(height_px),
          42.0};
  std::ostringstream out;
  out << svg_open(f.w, f.h);
  out << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.2\" "
         "points=\"";
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    out << num(f.px(traj.time_at(k))) << "," << num(f.py(traj.states[k][0]))
        << " ";
  out << "\"/>\n";
  emit_axes(out, f);
  out << "</svg>\n";
  return out.str();
}

std::string render_basin_heatmap(const BasinMap& map, int width_px,
                                 int height_px) {
  if (map.box.dim() != 2)
    fail(ErrorCode::unsupported, "basin heatmaps are 2D only");
  Frame f{map.box, static_cast<double>(width_px),
          static_cast<double>(height_px), 42.0};
  std::ostringstream out;
  out << svg_open(f.w, f.h);
  const double cw =
      (f.px(map.box.hi[0]) - f.px(map.box.lo[0])) / map.resolution[0];
  const double ch =
      (f.py(map.box.lo[1]) - f.py(map.box.hi[1])) / map.resolution[1];
  for (std::size_t idx = 0; idx < map.labels.size(); ++idx) {
    const Vec c = map.cell_center(idx);
    out << "<rect x=\"" << num(f.px(c[0]) - cw / 2) << "\" y=\""
        << num(f.py(c[1]) - ch / 2) << "\" width=\"" << num(cw)
        << "\" height=\"" << num(ch) << "\" fill=\""
        << basin_color(map.labels[idx]) << "\"/>\n";
  }
  emit_axes(out, f);
  out << "</svg>\n";
  return out.str();
}

}  // namespace koop
