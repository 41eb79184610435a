#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/immersion.hpp"
#include "core/linalg.hpp"

using namespace koop;

namespace {
Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
LimitSet point_set(const Vec& p) {
  LimitSet ls;
  ls.kind = LimitSet::Kind::equilibrium;
  ls.representatives = {p};
  ls.source_state = p;
  return ls;
}
}  // namespace

TEST_CASE("exact catalog: maps and generators match the worked examples") {
  CHECK(exact_catalog().size() == 5);

  const ImmersionCandidate& quad = find_immersion("quadratic1d");
  CHECK(quad.eval(v1(0.0))[0] == doctest::Approx(-1.0));  // (0+1)/(0-1)
  CHECK(quad.generator(0, 0) == -2.0);

  const ImmersionCandidate& lc = find_immersion("limit_cycle2d");
  const Vec f10 = lc.eval(v2(1.0, 0.0));
  CHECK(f10[0] == doctest::Approx(1.0));
  CHECK(f10[1] == doctest::Approx(0.0));
  CHECK(f10[2] == doctest::Approx(0.0));
  Mat block = Mat::Zero(3, 3);
  block(0, 1) = -1;
  block(1, 0) = 1;
  block(2, 2) = -2;
  CHECK((lc.generator - block).norm() == 0.0);

  const ImmersionCandidate& rational = find_immersion("rational1d");
  const Vec fh = rational.eval(v1(0.5));  // branch (0,1): 3 ln|1.5/-1.5| = 0
  CHECK(fh[0] == doctest::Approx(0.0));
  CHECK(fh[1] == doctest::Approx(3.0));
  CHECK(rational.generator(0, 1) == 1.0);
  CHECK(rational.generator.cwiseAbs().sum() == 1.0);  // only udot = v
  CHECK(rational.continuity == ImmersionCandidate::Continuity::discontinuous);

  // At the equilibria the discontinuous map takes the (x, 0) branch.
  CHECK(rational.eval(v1(1.0)) == v2(1.0, 0.0));
  CHECK(rational.eval(v1(0.0)) == v2(0.0, 0.0));

  const ImmersionCandidate& cubic = find_immersion("cubic1d");
  CHECK(cubic.injective_claim == ImmersionCandidate::Injectivity::no);
  CHECK(cubic.eval(v1(2.0))[0] == doctest::Approx(-0.75));
}

TEST_CASE("immersion identity at a hand-computed point") {
  // phi(1, 0) = -tanh 1 and F(-tanh t) = -e^{-2t} for F = (x+1)/(x-1).
  const ImmersionCandidate& quad = find_immersion("quadratic1d");
  const SystemDef& sys = find_system("quadratic1d");
  const Vec x1 = sys.closed_form_flow(1.0, v1(0.0));
  CHECK(std::abs(quad.eval(x1)[0] + std::exp(-2.0)) < 1e-9);
  CHECK(std::abs(std::exp(-2.0) * quad.eval(v1(0.0))[0] + std::exp(-2.0)) <
        1e-15);

  const ImmersionResidualReport rep =
      verify_immersion(quad, {v1(0.0)}, {0.0, 1.0}, 1e-3);
  CHECK(rep.max_residual < 1e-9);
  // t = 0 sample is exactly zero: psi(0, .) is the identity.
  CHECK(rep.samples[0].residual == 0.0);
}

TEST_CASE("default 20x20 grids verify all five candidates") {
  for (const ImmersionCandidate& cand : exact_catalog()) {
    std::vector<Vec> xi_grid;
    std::vector<double> t_grid;
    default_verification_grid(cand, 20, 20, xi_grid, t_grid);
    INFO(cand.name);
    CHECK(verify_immersion(cand, xi_grid, t_grid, 1e-3).max_residual <= 1e-6);
    CHECK(verify_immersion(cand, xi_grid, t_grid, 1e-3,
                           FlowMode::integrate_only)
              .max_residual <= 1e-5);
  }
}

TEST_CASE("printed identity for the rational system on (0,1)") {
  const ImmersionCandidate& cand = find_immersion("rational1d");
  const SystemDef& sys = find_system("rational1d");
  for (double x0 : {0.2, 0.5, 0.8}) {
    for (double t : {0.0, 1.0, 2.0, 5.0}) {
      const Vec lhs = cand.eval(sys.closed_form_flow(t, v1(x0)));
      const Vec rhs = v2(
          3.0 * std::log(3.0 * x0 / (2.0 - 2.0 * x0 * x0)) + 3.0 * t, 3.0);
      CHECK((lhs - rhs).norm() <= 1e-6);
    }
  }
}

TEST_CASE("generator consistency: dF(phi(t,xi))/dt at 0 equals A F(xi)") {
  const double h = 1e-5;
  for (const ImmersionCandidate& cand : exact_catalog()) {
    const SystemDef& sys = find_system(cand.source_system);
    std::vector<Vec> xi_grid;
    std::vector<double> t_grid;
    default_verification_grid(cand, 7, 2, xi_grid, t_grid);
    for (const Vec& xi : xi_grid) {
      const Vec fp = cand.eval(sys.closed_form_flow(h, xi));
      const Vec fm = cand.eval(sys.closed_form_flow(-h, xi));
      const Vec lhs = (fp - fm) / (2.0 * h);
      const Vec rhs = cand.generator * cand.eval(xi);
      INFO(cand.name);
      CHECK((lhs - rhs).norm() <= 1e-4 * std::max(1.0, rhs.norm()));
    }
  }
}

TEST_CASE("matrix-exponential semigroup holds for every generator") {
  for (const ImmersionCandidate& cand : exact_catalog()) {
    const Mat lhs = expm(cand.generator * (0.7 + 1.4));
    const Mat rhs = expm(cand.generator * 0.7) * expm(cand.generator * 1.4);
    CHECK((lhs - rhs).norm() <= 1e-10);
  }
}

TEST_CASE("injectivity probe finds the collision of an even map") {
  ImmersionCandidate square;
  square.name = "square";
  square.source_system = "cubic1d";
  square.source_dim = 1;
  square.target_dim = 1;
  square.map = [](const Vec& x) { return v1(x[0] * x[0]); };
  square.generator = Mat::Zero(1, 1);
  square.domain = DomainSpec::full(1);
  const InjectivityProbeResult probe =
      injectivity_probe(square, Box::of({-1.0}, {1.0}), 1000, 5, 1e-4);
  REQUIRE(probe.collision_found);
  CHECK(std::abs(probe.xi1[0] + probe.xi2[0]) < 2e-2);  // near (-a, a)
}

TEST_CASE("probes support the one-to-one claims of the worked maps") {
  const InjectivityProbeResult planar = injectivity_probe(
      find_immersion("limit_cycle2d"), Box::of({-3.0, -3.0}, {3.0, 3.0}), 5000,
      11, 1e-6, 0.1);
  CHECK(!planar.collision_found);

  const InjectivityProbeResult rational = injectivity_probe(
      find_immersion("rational1d"), Box::of({-3.0}, {3.0}), 5000, 13, 1e-6);
  CHECK(!rational.collision_found);
}

TEST_CASE("collapse witness: both cubic equilibria map to the same point") {
  const ImmersionCandidate& cubic = find_immersion("cubic1d");
  const CollapseWitness w =
      collapse_witness(cubic, {point_set(v1(-1.0)), point_set(v1(1.0))});
  CHECK(w.max_distance <= 1e-12);
}

TEST_CASE("collapse witness: 1x1 table when only one set lies in the domain") {
  const ImmersionCandidate& sine = find_immersion("sine1d");
  const auto sets = filter_to_domain(
      reference_limit_sets(find_system("sine1d")), sine.domain);
  REQUIRE(sets.size() == 1);  // {pi}; 0 is excluded from (0, pi]
  const CollapseWitness w = collapse_witness(sine, sets);
  CHECK(w.distances.rows() == 1);
  CHECK(w.max_distance == 0.0);
}

TEST_CASE("evaluating F outside its domain names the point") {
  const ImmersionCandidate& quad = find_immersion("quadratic1d");
  try {
    (void)quad.eval(v1(1.0));
    FAIL("expected domain violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::domain_violation);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
  const ImmersionCandidate& lc = find_immersion("limit_cycle2d");
  CHECK_THROWS_AS((void)collapse_witness(
                      lc, {point_set(v2(0.0, 0.0)),
                           point_set(v2(1.0, 0.0))}),
                  Error);
}

TEST_CASE("collapse consistency for continuous candidates with >= 2 sets") {
  for (const ImmersionCandidate& cand : exact_catalog()) {
    if (cand.continuity != ImmersionCandidate::Continuity::continuous) continue;
    const auto in_domain = filter_to_domain(
        reference_limit_sets(find_system(cand.source_system)), cand.domain);
    if (in_domain.size() < 2) continue;
    INFO(cand.name);
    CHECK(collapse_witness(cand, in_domain).max_distance <= 1e-6);
  }
}
