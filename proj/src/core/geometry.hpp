// Boxes, point-set distances and sampling helpers used across the lab.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace koop {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Box {
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vec& x) const {
    for (int i = 0; i < x.size(); ++i) {
      if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    }
    return true;
  }

  static Box of(std::initializer_list<double> lo_list,
                std::initializer_list<double> hi_list);
};

// Max-min distance from each point of a to the set b.
double directed_hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b);

// Symmetric Hausdorff distance between finite point sets. Both empty -> 0,
// exactly one empty -> +inf.
double hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b);

// Largest pairwise distance.
double diameter(const std::vector<Vec>& pts);

// Deterministic sample of a box: the 2^d corners (when include_corners and
// d <= 10) followed by uniform draws up to n points total.
std::vector<Vec> sample_box_points(const Box& box, int n, std::uint64_t seed,
                                   bool include_corners = true);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace koop
