// Thin wrappers around Eigen for the few dense-linear-algebra operations the
// lab needs: matrix exponential/principal logarithm and rank-revealing least
// squares.
#pragma once

#include <Eigen/Dense>
#include <optional>

#include "core/geometry.hpp"

namespace koop {

// e^{M} via scaling-and-squaring with Pade approximation.
Mat expm(const Mat& m);

// Principal matrix logarithm. Empty when the principal branch does not exist,
// i.e. some eigenvalue lies on the closed negative real axis (including 0).
std::optional<Mat> logm_principal(const Mat& m);

struct LstsqResult {
  Mat solution;
  Eigen::Index rank;
};

// Minimum-norm least-squares solution of a * x = b through a rank-revealing
// complete orthogonal decomposition.
LstsqResult lstsq(const Mat& a, const Mat& b);

}  // namespace koop
