#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/limitset.hpp"

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
std::vector<Vec> grid1(double lo, double hi, int n) {
  std::vector<Vec> g;
  for (double x : linspace(lo, hi, n)) g.push_back(v1(x));
  return g;
}
}  // namespace

TEST_CASE("Van der Pol from (0.1, 0) classifies as a periodic orbit") {
  const LimitSet ls =
      estimate_omega_limit(find_system("vanderpol"), v2(0.1, 0.0));
  CHECK(ls.kind == LimitSet::Kind::periodic_orbit);
  REQUIRE(ls.period_estimate.has_value());
  CHECK(*ls.period_estimate == doctest::Approx(6.663).epsilon(1e-2));
}

TEST_CASE("periodic orbit closes: flowing a representative for one period") {
  const SystemDef& sys = find_system("limit_cycle2d");
  const LimitSet ls = estimate_omega_limit(sys, v2(0.1, 0.0));
  REQUIRE(ls.kind == LimitSet::Kind::periodic_orbit);
  REQUIRE(ls.period_estimate.has_value());
  CHECK(*ls.period_estimate == doctest::Approx(2.0 * M_PI).epsilon(1e-4));
  for (std::size_t i = 0; i < ls.representatives.size(); i += 200) {
    const Vec back =
        flow_for(sys, ls.representatives[i], *ls.period_estimate, 1e-3);
    CHECK((back - ls.representatives[i]).norm() <= 1e-3);
  }
}

TEST_CASE("xdot = x^2 - 1 from 0 settles on the equilibrium -1") {
  const LimitSet ls = estimate_omega_limit(find_system("quadratic1d"), v1(0.0));
  CHECK(ls.kind == LimitSet::Kind::equilibrium);
  REQUIRE(ls.representatives.size() == 1);
  CHECK(std::abs(ls.representatives[0][0] + 1.0) < 1e-9);
}

TEST_CASE("a known equilibrium seed is its own omega-limit set") {
  const SystemDef& duffing = find_system("duffing");
  const LimitSet ls = estimate_omega_limit(duffing, v2(0.0, 0.0));
  CHECK(ls.kind == LimitSet::Kind::equilibrium);
  CHECK((ls.representatives[0] - v2(0.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("Lorenz tail is a bounded attractor cloud") {
  LimitParams p;
  p.observe = 50.0;
  Vec x0(3);
  x0 << 1.0, 1.0, 1.0;
  const LimitSet ls = estimate_omega_limit(find_system("lorenz"), x0, p);
  CHECK(ls.kind == LimitSet::Kind::attractor_cloud);
  CHECK(ls.representatives.size() > 10);
}

TEST_CASE("divergence classifies as the empty limit set") {
  const LimitSet ls =
      estimate_omega_limit(find_system("linear1d_unstable"), v1(1.0));
  CHECK(ls.kind == LimitSet::Kind::empty);
  CHECK(ls.representatives.empty());
}

TEST_CASE("reported equilibria satisfy the field tolerance") {
  LimitParams p;
  for (const char* name : {"cubic1d", "duffing", "rational1d"}) {
    const SystemDef& sys = find_system(name);
    const auto sets = catalog_limit_sets(sys, [&] {
      std::vector<Vec> seeds;
      if (sys.dim == 1) {
        seeds = grid1(-2.0, 2.0, 21);
      } else {
        for (double x : linspace(-2.0, 2.0, 5))
          for (double y : linspace(-2.0, 2.0, 5)) seeds.push_back(v2(x, y));
      }
      return seeds;
    }());
    for (const LimitSet& ls : sets) {
      if (ls.kind != LimitSet::Kind::equilibrium) continue;
      INFO(name);
      CHECK(sys.eval_field(ls.representatives[0]).norm() <= p.tol_eq);
    }
  }
}

TEST_CASE("Duffing 5x5 grid finds both sinks and the saddle") {
  std::vector<Vec> seeds;
  for (double x : linspace(-2.0, 2.0, 5))
    for (double y : linspace(-2.0, 2.0, 5)) seeds.push_back(v2(x, y));
  const auto sets = catalog_limit_sets(find_system("duffing"), seeds);
  CHECK(sets.size() == 3);
  for (const Vec& target : {v2(1, 0), v2(-1, 0), v2(0, 0)}) {
    double best = 1e300;
    for (const LimitSet& ls : sets)
      best = std::min(best, (ls.representatives[0] - target).norm());
    CHECK(best < 1e-8);
  }
}

TEST_CASE("single equilibrium seed yields exactly one set") {
  const auto sets =
      catalog_limit_sets(find_system("duffing"), {v2(1.0, 0.0)});
  CHECK(sets.size() == 1);
}

TEST_CASE("two seeds on the planar limit cycle merge into one orbit") {
  const auto sets = catalog_limit_sets(find_system("limit_cycle2d"),
                                       {v2(0.1, 0.0), v2(2.0, 0.0)});
  REQUIRE(sets.size() == 1);
  CHECK(sets[0].kind == LimitSet::Kind::periodic_orbit);
  const auto& circle = find_system("limit_cycle2d").known_limit_sets[0].points;
  CHECK(hausdorff(sets[0].representatives, circle) < 1e-2);
}

TEST_CASE("basin labels on xdot = x - x^3 agree with the sign oracle") {
  const SystemDef& sys = find_system("cubic1d");
  const auto targets = catalog_limit_sets(sys, grid1(-2.0, 2.0, 21));
  REQUIRE(targets.size() == 3);
  const BasinMap map =
      label_basins(sys, Box::of({-2.0}, {2.0}), {401}, targets);

  auto expected = [&](double x) {
    const Vec target = v1(x < 0 ? -1.0 : (x > 0 ? 1.0 : 0.0));
    for (std::size_t i = 0; i < targets.size(); ++i)
      if ((targets[i].representatives[0] - target).norm() < 1e-9)
        return static_cast<int>(i);
    return BasinMap::kUnresolved;
  };
  for (std::size_t idx = 0; idx < map.labels.size(); ++idx) {
    const double x = map.cell_center(idx)[0];
    CHECK(map.labels[idx] == expected(x));
  }
  // center cell sits exactly on the unstable equilibrium
  CHECK(map.cell_center(200)[0] == 0.0);
  CHECK(map.labels[200] == expected(0.0));
}

TEST_CASE("resolution 1 labels the single cell by its own omega-limit") {
  const SystemDef& sys = find_system("linear1d_stable");
  const auto targets = catalog_limit_sets(sys, {v1(0.5)});
  const BasinMap map = label_basins(sys, Box::of({-1.0}, {1.0}), {1}, targets);
  REQUIRE(map.labels.size() == 1);
  CHECK(map.labels[0] == 0);
}

TEST_CASE("basin partition: merged trajectories imply equal labels") {
  const SystemDef& sys = find_system("cubic1d");
  LimitParams p;
  const auto targets = catalog_limit_sets(sys, grid1(-2.0, 2.0, 21));
  const BasinMap map = label_basins(sys, Box::of({-2.0}, {2.0}), {41}, targets);
  for (std::size_t idx = 0; idx + 1 < map.labels.size(); ++idx) {
    const Vec a = map.cell_center(idx), b = map.cell_center(idx + 1);
    const Trajectory ta = integrate(sys, a, 20.0, 1e-3);
    const Trajectory tb = integrate(sys, b, 20.0, 1e-3);
    bool merged = false;
    for (std::size_t k = 0; k < std::min(ta.states.size(), tb.states.size());
         k += 50)
      if ((ta.states[k] - tb.states[k]).norm() < p.merge_tol) merged = true;
    if (merged) CHECK(map.labels[idx] == map.labels[idx + 1]);
  }
}

TEST_CASE("single-basin maps report no internal boundaries") {
  const SystemDef& sys = find_system("linear1d_stable");
  const auto targets = catalog_limit_sets(sys, {v1(0.5)});
  const BasinMap map = label_basins(sys, Box::of({-1.0}, {1.0}), {41}, targets);
  const ClosedBasinReport score = closed_basin_score(sys, map);
  CHECK(!score.has_internal_boundaries());
}

TEST_CASE("xdot = x^2 - 1 on [-1,1]: basin of {-1} is open at the far end") {
  const SystemDef& sys = find_system("quadratic1d");
  const auto targets = catalog_limit_sets(sys, grid1(-1.0, 1.0, 21));
  REQUIRE(targets.size() == 2);
  // Grid chosen so cell centers land exactly on both equilibria.
  const BasinMap map =
      label_basins(sys, Box::of({-1.025}, {1.025}), {41}, targets);
  const ClosedBasinReport score = closed_basin_score(sys, map);

  int idx_m1 = -1, idx_p1 = -1;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if ((targets[i].representatives[0] - v1(-1.0)).norm() < 1e-9)
      idx_m1 = static_cast<int>(i);
    if ((targets[i].representatives[0] - v1(1.0)).norm() < 1e-9)
      idx_p1 = static_cast<int>(i);
  }
  REQUIRE(idx_m1 >= 0);
  REQUIRE(idx_p1 >= 0);
  const auto& sm = score.stats[static_cast<std::size_t>(idx_m1)];
  const auto& sp = score.stats[static_cast<std::size_t>(idx_p1)];
  CHECK(sm.boundary_edges == 1);
  CHECK(sm.open_to_neighbor == 1);
  CHECK(sm.closed_like == 0);
  CHECK(sp.closed_like == sp.boundary_edges);
}

TEST_CASE("contraction passes the incremental-stability probe") {
  const StabilityProbeReport rep = incremental_stability_probe(
      find_system("linear1d_stable"), Box::of({-1.0}, {1.0}), 200, 3.0, 21);
  CHECK(!rep.violates_c2);
  CHECK(rep.max_gain == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("expansion violates the probe at horizon 3 but not at horizon 2") {
  // Deviation grows like e^t d0, so the factor-10 margin trips at t >= ln 10.
  const SystemDef& sys = find_system("linear1d_unstable");
  const Box region = Box::of({-1.0}, {1.0});
  const StabilityProbeReport h3 =
      incremental_stability_probe(sys, region, 200, 3.0, 22);
  CHECK(h3.violates_c2);
  CHECK(h3.max_gain == doctest::Approx(std::exp(3.0)).epsilon(1e-6));
  const StabilityProbeReport h2 =
      incremental_stability_probe(sys, region, 200, 2.0, 22);
  CHECK(!h2.violates_c2);
}

TEST_CASE("probe envelope is monotone nondecreasing") {
  const StabilityProbeReport rep = incremental_stability_probe(
      find_system("duffing"), Box::of({0.7, -0.3}, {1.3, 0.3}), 100, 20.0, 23);
  CHECK(!rep.violates_c2);
  for (std::size_t i = 1; i < rep.envelope_gains.size(); ++i)
    CHECK(rep.envelope_gains[i] >= rep.envelope_gains[i - 1]);
  CHECK_THROWS_AS((void)incremental_stability_probe(
                      find_system("duffing"), Box::of({0.0, 0.0}, {1.0, 1.0}),
                      0, 1.0, 1),
                  Error);
}

TEST_CASE("precompactness probe on the three worked cases") {
  Vec x0(3);
  x0 << 1.0, 1.0, 1.0;
  const Trajectory lorenz = integrate(find_system("lorenz"), x0, 100.0, 1e-3);
  CHECK(precompactness_probe(lorenz, 1e3) == PrecompactVerdict::precompact_like);

  const Trajectory growth =
      integrate(find_system("linear1d_unstable"), v1(1.0), 20.0, 1e-3);
  CHECK(precompactness_probe(growth, 1e3) == PrecompactVerdict::diverged);

  const Trajectory vdp =
      integrate(find_system("vanderpol"), v2(3.0, 3.0), 100.0, 1e-3);
  CHECK(precompactness_probe(vdp, 1e3) == PrecompactVerdict::precompact_like);
}

TEST_CASE("alpha-limit sets equal omega-limit sets of the reversed system") {
  // Backward Van der Pol from inside the cycle spirals into the origin.
  const SystemDef& vdp = find_system("vanderpol");
  const LimitSet alpha =
      estimate_omega_limit(vdp, v2(0.1, 0.0), {}, Direction::reversed);
  CHECK(alpha.kind == LimitSet::Kind::equilibrium);
  CHECK(alpha.direction == Direction::reversed);
  CHECK(alpha.representatives[0].norm() < 1e-9);

  const LimitSet omega_rev =
      estimate_omega_limit(reversed_system(vdp), v2(0.1, 0.0));
  CHECK(hausdorff(alpha.representatives, omega_rev.representatives) < 1e-2);
}

TEST_CASE("known-set recovery across the 1D and 2D catalog") {
  LimitParams p;
  for (const SystemDef& sys : catalog()) {
    if (sys.dim > 2) continue;
    std::vector<Vec> seeds;
    if (sys.dim == 1) {
      const bool full = sys.domain.kind == DomainSpec::Kind::full_space;
      seeds = full ? grid1(-2.0, 2.0, 21)
                   : grid1(sys.default_box.lo[0], sys.default_box.hi[0], 21);
    } else {
      for (double x : linspace(sys.default_box.lo[0], sys.default_box.hi[0], 5))
        for (double y :
             linspace(sys.default_box.lo[1], sys.default_box.hi[1], 5))
          seeds.push_back(v2(x, y));
    }
    const auto found = catalog_limit_sets(sys, seeds, p);
    for (const LimitSetSpec& spec : sys.known_limit_sets) {
      INFO(sys.name, ": ", spec.label);
      if (!spec.points.empty()) {
        double best = 1e300;
        for (const LimitSet& f : found)
          best = std::min(best, hausdorff(spec.points, f.representatives));
        CHECK(best <= 1e-2);
      } else if (spec.kind == LimitSetSpec::Kind::periodic_orbit) {
        int orbits = 0;
        for (const LimitSet& f : found)
          if (f.kind == LimitSet::Kind::periodic_orbit) ++orbits;
        CHECK(orbits >= 1);
      }
    }
  }
}
