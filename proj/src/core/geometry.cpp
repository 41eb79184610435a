#include "core/geometry.hpp"

#include <limits>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace koop {

Box Box::of(std::initializer_list<double> lo_list,
            std::initializer_list<double> hi_list) {
  Box b;
  b.lo = Eigen::Map<const Vec>(lo_list.begin(), lo_list.size());
  b.hi = Eigen::Map<const Vec>(hi_list.begin(), hi_list.size());
  if (b.lo.size() != b.hi.size())
    fail(ErrorCode::invalid_argument, "box bounds have mismatched dimensions");
  return b;
}

double directed_hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.empty()) return 0.0;
  if (b.empty()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const Vec& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& q : b) best = std::min(best, (p - q).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.empty() && b.empty()) return 0.0;
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double diameter(const std::vector<Vec>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

std::vector<Vec> sample_box_points(const Box& box, int n, std::uint64_t seed,
                                   bool include_corners) {
  const int d = box.dim();
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(n));
  if (include_corners && d <= 10) {
    const int corners = 1 << d;
    for (int c = 0; c < corners && static_cast<int>(pts.size()) < n; ++c) {
      Vec p(d);
      for (int i = 0; i < d; ++i) p[i] = (c >> i) & 1 ? box.hi[i] : box.lo[i];
      pts.push_back(p);
    }
  }
  Rng rng(seed);
  while (static_cast<int>(pts.size()) < n) {
    Vec p(d);
    for (int i = 0; i < d; ++i) p[i] = rng.uniform(box.lo[i], box.hi[i]);
    pts.push_back(p);
  }
  return pts;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < n; ++i) {
    // Symmetric form so that endpoints are exact and midpoints of symmetric
    // ranges land on 0 exactly.
    const double a = static_cast<double>(n - 1 - i);
    const double b = static_cast<double>(i);
    out.push_back((a * lo + b * hi) / static_cast<double>(n - 1));
  }
  return out;
}

}  // namespace koop
