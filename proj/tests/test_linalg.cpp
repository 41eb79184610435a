#include <doctest.h>

#include <cmath>

#include "core/geometry.hpp"
#include "core/linalg.hpp"

using koop::Mat;
using koop::Vec;

TEST_CASE("expm matches scalar and rotation closed forms") {
  Mat a = Mat::Constant(1, 1, -2.0);
  CHECK(std::abs(koop::expm(a * 0.5)(0, 0) - std::exp(-1.0)) < 1e-14);

  Mat rot(2, 2);
  rot << 0, -1, 1, 0;
  const Mat e = koop::expm(rot * 0.7);
  CHECK(std::abs(e(0, 0) - std::cos(0.7)) < 1e-14);
  CHECK(std::abs(e(1, 0) - std::sin(0.7)) < 1e-14);
}

TEST_CASE("expm semigroup property e^{A(t1+t2)} = e^{At1} e^{At2}") {
  Mat a(3, 3);
  a << 0, -1, 0, 1, 0, 0, 0, 0, -2;
  const Mat lhs = koop::expm(a * 0.9);
  const Mat rhs = koop::expm(a * 0.4) * koop::expm(a * 0.5);
  CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("principal log inverts exp and respects the branch cut") {
  Mat a(2, 2);
  a << -0.3, -1.2, 1.2, -0.3;
  const auto log_k = koop::logm_principal(koop::expm(a));
  REQUIRE(log_k.has_value());
  CHECK((*log_k - a).norm() < 1e-10);

  Mat neg = Mat::Constant(1, 1, -0.5);
  CHECK(!koop::logm_principal(neg).has_value());
  Mat zero = Mat::Zero(1, 1);
  CHECK(!koop::logm_principal(zero).has_value());
}

TEST_CASE("least squares recovers an exact linear map and reports rank") {
  Mat x(40, 3);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = std::sin(0.37 * i);
    x(i, 2) = std::cos(0.91 * i);
  }
  Mat coef(3, 2);
  coef << 1, 2, -0.5, 0.25, 3, -1;
  const auto ls = koop::lstsq(x, x * coef);
  CHECK(ls.rank == 3);
  CHECK((ls.solution - coef).norm() < 1e-10);
}

TEST_CASE("hausdorff distance on finite point sets") {
  auto v1 = [](double a) {
    Vec v(1);
    v << a;
    return v;
  };
  std::vector<Vec> a = {v1(0.0), v1(1.0)};
  std::vector<Vec> b = {v1(0.0)};
  CHECK(koop::hausdorff(a, b) == doctest::Approx(1.0));
  CHECK(koop::hausdorff(a, a) == doctest::Approx(0.0));
  CHECK(koop::hausdorff({}, {}) == 0.0);
  CHECK(std::isinf(koop::hausdorff(a, {})));
}

TEST_CASE("linspace endpoints are exact and symmetric midpoint is zero") {
  const auto g = koop::linspace(-2.0, 2.0, 401);
  CHECK(g.front() == -2.0);
  CHECK(g.back() == 2.0);
  CHECK(g[200] == 0.0);
}
