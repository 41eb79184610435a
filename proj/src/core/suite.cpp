// One-command verification suite: re-runs each worked example and writes a
// PASS/FAIL summary table plus per-example artifacts.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <sstream>

#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/immersion.hpp"
#include "core/io.hpp"
#include "core/learning.hpp"
#include "core/limitset.hpp"
#include "core/rng.hpp"
#include "core/svg.hpp"
#include "core/system.hpp"

namespace koop {

namespace fs = std::filesystem;

namespace {

Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

struct RowContext {
  fs::path root;
  bool quick = false;
  std::uint64_t seed = 0;
  RunManifest* manifest = nullptr;

  void write(const std::string& rel, const std::string& content) const {
    atomic_write_file(root / rel, content);
    manifest->outputs.push_back(rel);
  }
};

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::vector<Vec> grid_1d(double lo, double hi, int n) {
  std::vector<Vec> seeds;
  for (double x : linspace(lo, hi, n)) seeds.push_back(vec1(x));
  return seeds;
}

std::vector<Vec> grid_2d(const Box& box, int per_axis) {
  std::vector<Vec> seeds;
  for (double x : linspace(box.lo[0], box.hi[0], per_axis))
    for (double y : linspace(box.lo[1], box.hi[1], per_axis))
      seeds.push_back(vec2(x, y));
  return seeds;
}

// ---------------------------------------------------------------------------
// Rows
// ---------------------------------------------------------------------------

Check row_simulate_vanderpol(const RowContext& ctx) {
  Check c;
  const SystemDef& sys = find_system("vanderpol");
  const Trajectory traj = integrate(sys, vec2(0.1, 0.0), 50.0, 1e-3);
  ctx.write("vanderpol/trajectory.csv", trajectory_csv(traj));
  PhasePlotSpec spec;
  spec.view = sys.default_box;
  const std::string svg = render_phase_plot(sys, {traj}, spec);
  ctx.write("vanderpol/phase.svg", svg);
  c.require(!traj.exited_domain, "trajectory left the domain");
  c.require(svg.find("</svg>") != std::string::npos, "svg not closed");
  return c;
}

Check verify_candidate(const RowContext& ctx, const std::string& name,
                       double tol) {
  Check c;
  const ImmersionCandidate& cand = find_immersion(name);
  std::vector<Vec> xi_grid;
  std::vector<double> t_grid;
  default_verification_grid(cand, 20, 20, xi_grid, t_grid);
  const ImmersionResidualReport report =
      verify_immersion(cand, xi_grid, t_grid, 1e-3);
  ctx.write(name + "/residuals.csv", residual_report_csv(report));
  c.require(report.max_residual <= tol,
            "max residual " + fmt17(report.max_residual) + " > " + fmt17(tol));
  c.note("max residual " + fmt17(report.max_residual));
  return c;
}

Check row_immersion_quadratic1d(const RowContext& ctx) {
  Check c = verify_candidate(ctx, "quadratic1d", 1e-6);
  // Extending the domain by the second equilibrium breaks the map.
  const ImmersionCandidate& cand = find_immersion("quadratic1d");
  bool threw = false;
  try {
    cand.eval(vec1(1.0));
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::domain_violation;
  }
  c.require(threw, "F(1) should raise a domain violation");
  return c;
}

Check row_immersion_sine1d(const RowContext& ctx) {
  return verify_candidate(ctx, "sine1d", 1e-6);
}

Check row_immersion_cubic1d(const RowContext& ctx) {
  Check c = verify_candidate(ctx, "cubic1d", 1e-6);
  const ImmersionCandidate& cand = find_immersion("cubic1d");
  const std::vector<LimitSet> in_domain = filter_to_domain(
      reference_limit_sets(find_system("cubic1d")), cand.domain);
  const CollapseWitness w = collapse_witness(cand, in_domain);
  c.require(in_domain.size() == 2, "expected the two equilibria +-1 in domain");
  c.require(w.max_distance <= 1e-9,
            "images of +-1 should coincide, distance " + fmt17(w.max_distance));
  return c;
}

Check row_immersion_limit_cycle2d(const RowContext& ctx) {
  Check c = verify_candidate(ctx, "limit_cycle2d", 1e-6);
  const ImmersionCandidate& cand = find_immersion("limit_cycle2d");
  const int samples = ctx.quick ? 1000 : 5000;
  const InjectivityProbeResult probe = injectivity_probe(
      cand, Box::of({-3.0, -3.0}, {3.0, 3.0}), samples, 11, 1e-6, 0.1);
  c.require(!probe.collision_found, "unexpected collision found");
  return c;
}

Check row_immersion_rational1d(const RowContext& ctx) {
  Check c = verify_candidate(ctx, "rational1d", 1e-6);
  // Printed formula on the branch (0,1): F(phi(t,x0)) = (3 ln(3x0/(2-2x0^2)) + 3t, 3).
  const SystemDef& sys = find_system("rational1d");
  const ImmersionCandidate& cand = find_immersion("rational1d");
  double worst = 0.0;
  for (double x0 : {0.2, 0.5, 0.8}) {
    for (double t : {0.0, 1.0, 2.0, 5.0}) {
      const Vec lhs = cand.eval(sys.closed_form_flow(t, vec1(x0)));
      const Vec rhs =
          vec2(3.0 * std::log(3.0 * x0 / (2.0 - 2.0 * x0 * x0)) + 3.0 * t, 3.0);
      worst = std::max(worst, (lhs - rhs).norm());
    }
  }
  c.require(worst <= 1e-6, "formula residual " + fmt17(worst));
  c.note("formula residual " + fmt17(worst));
  return c;
}

Check row_limit_sets_catalog(const RowContext& ctx) {
  Check c;
  LimitParams p;
  nlohmann::json report;
  for (const SystemDef& sys : catalog()) {
    if (sys.dim > 2) continue;
    // 1D seed grids span [-2, 2] where the domain allows: every 1D catalog
    // equilibrium is a grid point, so unstable ones are seeded exactly.
    std::vector<Vec> seeds;
    if (sys.dim == 1) {
      const bool full = sys.domain.kind == DomainSpec::Kind::full_space;
      seeds = full ? grid_1d(-2.0, 2.0, 21)
                   : grid_1d(sys.default_box.lo[0], sys.default_box.hi[0], 21);
    } else {
      seeds = grid_2d(sys.default_box, 5);
    }
    const std::vector<LimitSet> found = catalog_limit_sets(sys, seeds, p);
    int orbits = 0;
    for (const LimitSet& f : found)
      if (f.kind == LimitSet::Kind::periodic_orbit) ++orbits;

    for (const LimitSetSpec& spec : sys.known_limit_sets) {
      if (!spec.points.empty()) {
        double best = 1e300;
        for (const LimitSet& f : found)
          best = std::min(best, hausdorff(spec.points, f.representatives));
        c.require(best <= p.merge_tol, sys.name + ": " + spec.label +
                                           " unrecovered (hausdorff " +
                                           fmt17(best) + ")");
      } else if (spec.kind == LimitSetSpec::Kind::periodic_orbit) {
        c.require(orbits >= 1, sys.name + ": no periodic orbit found");
      }
    }
    if (sys.name == "vanderpol")
      c.require(orbits == 1, "vanderpol: expected exactly one periodic orbit");
    report[sys.name] = static_cast<int>(found.size());
  }
  // Lorenz: bounded non-recurrent tail inside the invariant ellipsoid.
  {
    const SystemDef& lorenz = find_system("lorenz");
    LimitParams lp;
    lp.observe = 50.0;
    Vec x0(3);
    x0 << 1.0, 1.0, 1.0;
    const LimitSet attractor = estimate_omega_limit(lorenz, x0, lp);
    c.require(attractor.kind == LimitSet::Kind::attractor_cloud,
              std::string("lorenz from (1,1,1) classified ") +
                  limit_set_kind_name(attractor.kind));
    const Trajectory t = integrate(lorenz, x0, 100.0, 1e-3);
    bool inside = !t.exited_domain;
    for (const Vec& s : t.states) inside = inside && lorenz.domain.contains(s);
    c.require(inside, "lorenz trajectory left the ellipsoid");
  }
  ctx.write("limit_sets/counts.json", report.dump(2) + "\n");
  return c;
}

Check row_basins_cubic1d(const RowContext& ctx) {
  Check c;
  const SystemDef& sys = find_system("cubic1d");
  LimitParams p;
  const std::vector<LimitSet> targets =
      catalog_limit_sets(sys, grid_1d(-2.0, 2.0, 21), p);
  c.require(targets.size() == 3, "expected 3 targets");
  const int res = ctx.quick ? 101 : 401;
  const BasinMap map =
      label_basins(sys, Box::of({-2.0}, {2.0}), {res}, targets, p);
  ctx.write("basins_cubic1d/basins.csv", basin_csv(map));

  // Sign oracle: negative cells flow to {-1}, positive to {1}, zero to {0}.
  auto expected = [&](double x) {
    const Vec target = vec1(x < 0 ? -1.0 : (x > 0 ? 1.0 : 0.0));
    for (std::size_t i = 0; i < targets.size(); ++i)
      if ((targets[i].representatives[0] - target).norm() < 1e-9)
        return static_cast<int>(i);
    return BasinMap::kUnresolved;
  };
  std::size_t mismatches = 0;
  for (std::size_t idx = 0; idx < map.labels.size(); ++idx) {
    const double x = map.cell_center(idx)[0];
    if (x == 0.0) continue;  // center cell excluded from the oracle count
    if (map.labels[idx] != expected(x)) ++mismatches;
  }
  c.require(mismatches == 0,
            std::to_string(mismatches) + " cells disagree with the sign oracle");
  const std::size_t center = map.labels.size() / 2;
  c.require(map.labels[center] == expected(0.0) ||
                map.cell_center(center)[0] != 0.0,
            "center cell not labeled {0}");
  return c;
}

Check row_closed_basins_quadratic1d(const RowContext& ctx) {
  Check c;
  const SystemDef& sys = find_system("quadratic1d");
  LimitParams p;
  // Box chosen so cell centers land exactly on the equilibria -1 and 1.
  const Box box = Box::of({-1.025}, {1.025});
  const std::vector<LimitSet> targets =
      catalog_limit_sets(sys, grid_1d(-1.0, 1.0, 21), p);
  c.require(targets.size() == 2, "expected both equilibria as targets");
  const BasinMap map = label_basins(sys, box, {41}, targets, p);
  const ClosedBasinReport score = closed_basin_score(sys, map, p);
  ctx.write("closed_basins_quadratic1d/basins.csv", basin_csv(map));

  int idx_m1 = -1, idx_p1 = -1;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if ((targets[i].representatives[0] - vec1(-1.0)).norm() < 1e-9)
      idx_m1 = static_cast<int>(i);
    if ((targets[i].representatives[0] - vec1(1.0)).norm() < 1e-9)
      idx_p1 = static_cast<int>(i);
  }
  c.require(idx_m1 >= 0 && idx_p1 >= 0, "targets missing +-1");
  if (c.pass) {
    const BasinBoundaryStat& sm = score.stats[static_cast<std::size_t>(idx_m1)];
    const BasinBoundaryStat& sp = score.stats[static_cast<std::size_t>(idx_p1)];
    c.require(sm.boundary_edges > 0, "no boundary edge seen");
    c.require(sm.closed_like == 0 && sm.open_to_neighbor == sm.boundary_edges,
              "basin of {-1} should be open-like at 1");
    c.require(sp.closed_like == sp.boundary_edges,
              "basin of {1} should own its boundary");
  }
  return c;
}

Check row_basins_duffing(const RowContext& ctx) {
  Check c;
  const SystemDef& sys = find_system("duffing");
  LimitParams p;
  p.dt = 1e-2;
  const Box box = Box::of({-2.0, -2.0}, {2.0, 2.0});
  const std::vector<LimitSet> targets =
      catalog_limit_sets(sys, grid_2d(box, 5), p);
  c.require(targets.size() == 3, "expected 3 limit sets (got " +
                                     std::to_string(targets.size()) + ")");
  int saddle = match_limit_set(
      [] {
        LimitSet probe;
        probe.kind = LimitSet::Kind::equilibrium;
        probe.representatives = {vec2(0.0, 0.0)};
        return probe;
      }(),
      targets, p.merge_tol);
  c.require(saddle >= 0, "saddle not among targets");

  const int res = ctx.quick ? 41 : 101;
  const BasinMap map = label_basins(sys, box, {res, res}, targets, p);
  ctx.write("basins_duffing/basins.csv", basin_csv(map));
  ctx.write("basins_duffing/basins.svg", render_basin_heatmap(map));

  std::size_t saddle_cells = 0, unresolved = 0;
  for (int label : map.labels) {
    if (label == saddle) ++saddle_cells;
    if (label < 0) ++unresolved;
  }
  const double frac =
      static_cast<double>(saddle_cells) / static_cast<double>(map.labels.size());
  c.require(frac <= 0.01, "saddle basin fraction " + fmt17(frac));
  c.require(unresolved <= map.labels.size() / 100,
            std::to_string(unresolved) + " unresolved cells");

  const ClosedBasinReport score = closed_basin_score(sys, map, p);
  for (const BasinBoundaryStat& s : score.stats) {
    if (s.limit_set == saddle) continue;
    if (s.boundary_edges == 0) continue;
    c.require(s.open_to_third > 0,
              "shared boundary should belong to the saddle's basin");
  }
  return c;
}

Check row_stability_probes(const RowContext& ctx) {
  Check c;
  const int pairs = ctx.quick ? 50 : 200;
  const StabilityProbeReport contraction = incremental_stability_probe(
      find_system("linear1d_stable"), Box::of({-1.0}, {1.0}), pairs, 3.0, 21);
  c.require(!contraction.violates_c2, "xdot=-x flagged as violating");
  const StabilityProbeReport expansion = incremental_stability_probe(
      find_system("linear1d_unstable"), Box::of({-1.0}, {1.0}), pairs, 3.0, 22);
  c.require(expansion.violates_c2, "xdot=x not flagged at horizon 3");
  const StabilityProbeReport duffing = incremental_stability_probe(
      find_system("duffing"), Box::of({0.7, -0.3}, {1.3, 0.3}),
      ctx.quick ? 200 : 1000, 20.0, 23);
  c.require(!duffing.violates_c2,
            "duffing within one basin flagged, max gain " +
                fmt17(duffing.max_gain));
  c.note("duffing max gain " + fmt17(duffing.max_gain));
  ctx.write("stability/duffing_probe.json", stability_report_json(duffing));
  return c;
}

Check row_precompactness(const RowContext& ctx) {
  Check c;
  (void)ctx;
  const Trajectory vdp =
      integrate(find_system("vanderpol"), vec2(3.0, 3.0), 100.0, 1e-3);
  c.require(precompactness_probe(vdp, 1e3) == PrecompactVerdict::precompact_like,
            "vanderpol from (3,3) should look precompact");
  const Trajectory growth =
      integrate(find_system("linear1d_unstable"), vec1(1.0), 20.0, 1e-3);
  c.require(precompactness_probe(growth, 1e3) == PrecompactVerdict::diverged,
            "xdot=x from 1 should diverge past 1e3");
  Vec x0(3);
  x0 << 1.0, 1.0, 1.0;
  const Trajectory lorenz = integrate(find_system("lorenz"), x0, 100.0, 1e-3);
  c.require(precompactness_probe(lorenz, 1e3) == PrecompactVerdict::precompact_like,
            "lorenz from (1,1,1) should look precompact");
  return c;
}

Check row_reversal_duality_duffing(const RowContext& ctx) {
  Check c;
  (void)ctx;
  const SystemDef& duffing = find_system("duffing");
  const SystemDef rev = reversed_system(duffing);
  LimitParams p;
  const std::vector<Vec> seeds = {vec2(0.0, 0.0), vec2(1e-3, 0.0),
                                  vec2(0.0, 1e-3), vec2(-1e-3, -1e-3),
                                  vec2(0.5, 0.0)};
  const std::vector<LimitSet> alpha =
      catalog_limit_sets(duffing, seeds, p, Direction::reversed);
  const std::vector<LimitSet> omega_rev = catalog_limit_sets(rev, seeds, p);
  c.require(alpha.size() == omega_rev.size(),
            "set counts differ: " + std::to_string(alpha.size()) + " vs " +
                std::to_string(omega_rev.size()));
  for (const LimitSet& a : alpha) {
    double best = 1e300;
    for (const LimitSet& b : omega_rev)
      best = std::min(best, hausdorff(a.representatives, b.representatives));
    c.require(best <= p.merge_tol, "alpha set unmatched, distance " + fmt17(best));
  }
  c.note(std::to_string(alpha.size()) + " alpha-limit sets matched");
  return c;
}

Check row_learning_linear_recovery(const RowContext& ctx) {
  Check c;
  (void)ctx;
  {
    const SystemDef& sys = find_system("linear1d_fast");
    const SamplePairs pairs =
        sample_pairs(sys, Box::of({-1.0}, {1.0}), 50, 0.1, 31);
    const LearnedEmbedding emb =
        fit_embedding(pairs, Dictionary::monomials(1, 1), 1);
    c.require(emb.a.has_value(), "log of K failed");
    if (emb.a) {
      const double err = std::abs((*emb.a)(0, 0) + 2.0);
      c.require(err <= 1e-8, "A error " + fmt17(err));
      c.note("1d A error " + fmt17(err));
    }
  }
  {
    const SystemDef& sys = find_system("harmonic2d");
    const SamplePairs pairs =
        sample_pairs(sys, Box::of({-1.0, -1.0}, {1.0, 1.0}), 200, 0.1, 32);
    const LearnedEmbedding emb =
        fit_embedding(pairs, Dictionary::monomials(2, 1), 2);
    c.require(emb.a.has_value(), "log of K failed (rotation)");
    if (emb.a) {
      Mat expect(2, 2);
      expect << 0, -1, 1, 0;
      const double err = (*emb.a - expect).norm();
      c.require(err <= 1e-6, "rotation A error " + fmt17(err));
      c.note("rotation A error " + fmt17(err));
    }
  }
  return c;
}

Check row_learning_oracle_dictionary(const RowContext& ctx) {
  Check c;
  const SystemDef& sys = find_system("limit_cycle2d");
  const Dictionary dict = Dictionary::custom(
      2,
      {[](const Vec& x) { return x[0] / x.norm(); },
       [](const Vec& x) { return x[1] / x.norm(); },
       [](const Vec& x) { return 1.0 / x.squaredNorm() - 1.0; }},
      {"x1/|x|", "x2/|x|", "|x|^-2-1"});
  const SamplePairs pairs = sample_pairs(
      sys, Box::of({0.3, 0.3}, {1.8, 1.8}), ctx.quick ? 200 : 500, 0.1, 33);
  const LearnedEmbedding emb = fit_embedding(pairs, dict, 3);
  c.require(emb.fit_residual <= 1e-6,
            "fit residual " + fmt17(emb.fit_residual));
  c.require(emb.a.has_value(), "log of K failed");
  if (emb.a) {
    Mat expect = Mat::Zero(3, 3);
    expect(0, 1) = -1.0;
    expect(1, 0) = 1.0;
    expect(2, 2) = -2.0;
    const double err = (*emb.a - expect).norm();
    c.require(err <= 1e-4, "A error " + fmt17(err));
    c.note("A error " + fmt17(err));
  }
  ctx.write("oracle_dictionary/embedding.json", embedding_json(emb));
  return c;
}

Check row_collapse_trend_duffing(const RowContext& ctx) {
  Check c;
  const SystemDef& sys = find_system("duffing");
  const Dictionary dict = Dictionary::monomials(2, 4);
  const std::vector<int> ns =
      ctx.quick ? std::vector<int>{100, 1000} : std::vector<int>{100, 1000, 10000};
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < (ctx.quick ? 2 : 5); ++i)
    seeds.push_back(mix_seed(77, static_cast<std::uint64_t>(i)));
  const CollapseReport report = sweep(sys, dict, 5, {0.01}, ns, seeds,
                                      Box::of({-2.0, -2.0}, {2.0, 2.0}));
  ctx.write("collapse_trend/sweep.csv", collapse_report_csv(report));
  ctx.write("collapse_trend/sweep.json", collapse_report_json(report));

  std::vector<double> means;
  for (const CollapseSummaryRow& row : report.summary) {
    c.require(row.ok_cells == static_cast<int>(seeds.size()),
              "cells failed at N=" + std::to_string(row.n));
    means.push_back(row.mean_metric);
  }
  std::ostringstream m;
  m << "means:";
  for (double v : means) m << " " << fmt17(v);
  c.note(m.str());
  if (ctx.quick) {
    c.require(means.back() <= means.front() + 0.02,
              "collapse metric did not trend down");
  } else {
    int inversions = 0;
    for (std::size_t i = 1; i < means.size(); ++i) {
      if (means[i] > means[i - 1]) {
        ++inversions;
        c.require(means[i] - means[i - 1] <= 0.02,
                  "inversion larger than 0.02");
      }
    }
    c.require(inversions <= 1, "more than one inversion");
    c.require(means.back() <= 0.5 * means.front(),
              "N=10000 mean not below half the N=100 mean");
  }
  return c;
}

Check row_exclusion_duffing(const RowContext& ctx) {
  Check c;
  const SystemDef& sys = find_system("duffing");
  const ImmersionCandidate coord = coordinate_immersion(sys, 0);
  const std::vector<int> ns =
      ctx.quick ? std::vector<int>{100, 1000} : std::vector<int>{100, 1000, 10000};
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < (ctx.quick ? 2 : 3); ++i)
    seeds.push_back(mix_seed(52, static_cast<std::uint64_t>(i)));
  const ExclusionReport report = exclusion_test(
      sys, coord, 0.1, ns, Box::of({-2.0, -2.0}, {2.0, 2.0}), seeds);
  ctx.write("exclusion_duffing/exclusion.csv", exclusion_report_csv(report));
  ctx.write("exclusion_duffing/exclusion.json", exclusion_report_json(report));

  c.require(report.distinguishes_limit_sets,
            "first coordinate should distinguish the equilibria");
  for (const ExclusionRow& row : report.rows) {
    if (row.n >= 1000)
      c.require(row.mean_residual >= 1e-3,
                "residual at N=" + std::to_string(row.n) + " is " +
                    fmt17(row.mean_residual));
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    c.require(report.rows[i].mean_residual >=
                  report.rows[i - 1].mean_residual - 1e-12,
              "mean residual decreased between nested sample sets");
  std::ostringstream m;
  m << "residuals:";
  for (const ExclusionRow& row : report.rows) m << " " << fmt17(row.mean_residual);
  c.note(m.str());
  return c;
}

Check row_exclusion_exact_quadratic1d(const RowContext& ctx) {
  Check c;
  const SystemDef& sys = find_system("quadratic1d");
  const ImmersionCandidate& cand = find_immersion("quadratic1d");
  const std::vector<int> ns =
      ctx.quick ? std::vector<int>{100, 1000} : std::vector<int>{100, 1000, 10000};
  const ExclusionReport report =
      exclusion_test(sys, cand, 0.1, ns, Box::of({-3.0}, {0.9}), {61, 62});
  ctx.write("exclusion_exact/exclusion.csv", exclusion_report_csv(report));
  for (const ExclusionRow& row : report.rows)
    c.require(row.mean_residual <= 1e-6,
              "exact immersion residual " + fmt17(row.mean_residual) +
                  " at N=" + std::to_string(row.n));
  return c;
}

Check row_dense_identity_quadratic1d(const RowContext& ctx) {
  Check c;
  const SystemDef& sys = find_system("quadratic1d");
  const ImmersionCandidate& cand = find_immersion("quadratic1d");
  std::vector<double> taus;
  for (int k = 1; k <= (ctx.quick ? 3 : 6); ++k) taus.push_back(std::pow(2.0, -k));
  const DenseFitReport report =
      dense_identity_probe(sys, cand, taus, ctx.quick ? 2000 : 10000,
                           Box::of({-3.0}, {0.9}), 100, 5.0, 71);
  for (std::size_t i = 0; i < report.taus.size(); ++i)
    c.require(report.residuals[i] <= 1e-10,
              "fit residual " + fmt17(report.residuals[i]) + " at tau=" +
                  fmt17(report.taus[i]));
  c.require(report.a_estimate.has_value(), "generator estimate missing");
  c.require(report.heldout_max_residual <= 1e-4,
            "held-out residual " + fmt17(report.heldout_max_residual));
  c.note("held-out residual " + fmt17(report.heldout_max_residual));
  return c;
}

}  // namespace

RunManifest reproduce_paper_suite(const std::string& output_dir, bool quick,
                                  std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.experiment = "reproduce-paper";
  manifest.version = KOOPLAB_VERSION;
  fs::create_directories(output_dir);

  RowContext ctx;
  ctx.root = output_dir;
  ctx.quick = quick;
  ctx.seed = seed;
  ctx.manifest = &manifest;

  using Row = std::pair<std::string, std::function<Check(const RowContext&)>>;
  const std::vector<Row> rows = {
      {"simulate_vanderpol", row_simulate_vanderpol},
      {"immersion_quadratic1d", row_immersion_quadratic1d},
      {"immersion_sine1d", row_immersion_sine1d},
      {"immersion_cubic1d", row_immersion_cubic1d},
      {"immersion_limit_cycle2d", row_immersion_limit_cycle2d},
      {"immersion_rational1d", row_immersion_rational1d},
      {"limit_sets_catalog", row_limit_sets_catalog},
      {"basins_cubic1d", row_basins_cubic1d},
      {"closed_basins_quadratic1d", row_closed_basins_quadratic1d},
      {"basins_duffing", row_basins_duffing},
      {"stability_probes", row_stability_probes},
      {"precompactness", row_precompactness},
      {"reversal_duality_duffing", row_reversal_duality_duffing},
      {"learning_linear_recovery", row_learning_linear_recovery},
      {"learning_oracle_dictionary", row_learning_oracle_dictionary},
      {"collapse_trend_duffing", row_collapse_trend_duffing},
      {"exclusion_duffing", row_exclusion_duffing},
      {"exclusion_exact_quadratic1d", row_exclusion_exact_quadratic1d},
      {"dense_identity_quadratic1d", row_dense_identity_quadratic1d},
  };

  for (const Row& row : rows) {
    CellStatus cell;
    cell.name = row.first;
    try {
      const Check c = row.second(ctx);
      cell.status = c.pass ? "PASS" : "FAIL";
      cell.detail = c.detail;
      if (!c.pass) manifest.ok = false;
    } catch (const std::exception& e) {
      cell.status = "FAIL";
      cell.detail = e.what();
      manifest.ok = false;
    }
    manifest.cells.push_back(std::move(cell));
  }

  std::ostringstream summary;
  summary << "example,status,detail\n";
  for (const CellStatus& c : manifest.cells) {
    std::string detail = c.detail;
    for (char& ch : detail)
      if (ch == ',' || ch == '\n') ch = ';';
    summary << c.name << "," << c.status << "," << detail << "\n";
  }
  atomic_write_file(fs::path(output_dir) / "summary.csv", summary.str());
  manifest.outputs.push_back("summary.csv");

  manifest.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();
  atomic_write_file(fs::path(output_dir) / "manifest.json",
                    manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace koop
