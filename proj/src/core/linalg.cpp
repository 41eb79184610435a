#include "core/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace koop {

Mat expm(const Mat& m) { return m.exp(); }

std::optional<Mat> logm_principal(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) return std::nullopt;
  const auto& vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    const std::complex<double> z = vals[i];
    if (z.real() <= 0.0 && std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z.real())))
      return std::nullopt;
  }
  return m.log();
}

LstsqResult lstsq(const Mat& a, const Mat& b) {
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
  return LstsqResult{cod.solve(b), cod.rank()};
}

}  // namespace koop
