#include "core/limitset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace koop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double min_distance(const Vec& p, const std::vector<Vec>& set) {
  double best = kInf;
  for (const Vec& q : set) best = std::min(best, (p - q).norm());
  return best;
}
}  // namespace

const char* limit_set_kind_name(LimitSet::Kind kind) {
  switch (kind) {
    case LimitSet::Kind::equilibrium: return "equilibrium";
    case LimitSet::Kind::periodic_orbit: return "periodic_orbit";
    case LimitSet::Kind::attractor_cloud: return "attractor_cloud";
    case LimitSet::Kind::empty: return "empty";
  }
  return "empty";
}

std::optional<Vec> polish_equilibrium(const SystemDef& sys, Vec guess,
                                      double tol, int max_iters) {
  Vec f(sys.dim);
  for (int iter = 0; iter < max_iters; ++iter) {
    sys.vector_field(guess, f);
    if (!f.allFinite()) return std::nullopt;
    if (f.norm() <= tol) return guess;
    Mat jac(sys.dim, sys.dim);
    Vec fp(sys.dim), fm(sys.dim);
    for (int j = 0; j < sys.dim; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(guess[j]));
      Vec xp = guess, xm = guess;
      xp[j] += h;
      xm[j] -= h;
      sys.vector_field(xp, fp);
      sys.vector_field(xm, fm);
      jac.col(j) = (fp - fm) / (2.0 * h);
    }
    Eigen::FullPivLU<Mat> lu(jac);
    if (!lu.isInvertible()) return std::nullopt;
    const Vec step = lu.solve(f);
    if (!step.allFinite()) return std::nullopt;
    guess -= step;
    if (!guess.allFinite()) return std::nullopt;
  }
  sys.vector_field(guess, f);
  if (f.norm() <= tol) return guess;
  return std::nullopt;
}

namespace {

double window_diameter(const std::vector<Vec>& states, std::size_t begin) {
  // Diameter around the final state is enough for a stationarity test and
  // avoids the quadratic pair scan.
  const Vec& ref = states.back();
  double d = 0.0;
  for (std::size_t k = begin; k < states.size(); ++k)
    d = std::max(d, (states[k] - ref).norm());
  return d;
}

// Re-integrates from `from` and accepts the equilibrium only if the distance
// to it actually shrinks; this rejects slow saddle passages that look
// stationary over one chunk.
bool confirm_attracting(const SystemDef& sys, const Vec& from, const Vec& eq,
                        const LimitParams& p, Direction dir) {
  const double d0 = (from - eq).norm();
  if (d0 <= 1e-12) return true;
  try {
    Trajectory t = integrate(sys, from, p.confirm_horizon, p.dt, dir);
    if (t.exited_domain) return false;
    return (t.last() - eq).norm() <= std::max(0.8 * d0, 1e-12);
  } catch (const Error&) {
    return false;
  }
}

std::optional<LimitSet> try_equilibrium(const SystemDef& sys, const Vec& tail,
                                        const Vec& xi, const LimitParams& p,
                                        Direction dir) {
  auto polished = polish_equilibrium(sys, tail);
  if (!polished) return std::nullopt;
  if ((*polished - tail).norm() > 10.0 * p.stationary_tol) return std::nullopt;
  if (sys.eval_field(*polished).norm() > p.tol_eq) return std::nullopt;
  if (!confirm_attracting(sys, tail, *polished, p, dir)) return std::nullopt;
  LimitSet out;
  out.kind = LimitSet::Kind::equilibrium;
  out.representatives = {*polished};
  out.source_state = xi;
  out.direction = dir;
  return out;
}

struct Crossing {
  double time;
  Vec state;
};

// Poincare-style first-return test on the observation window: crossings of
// the hyperplane through the window's final state, normal to the flow there.
std::optional<LimitSet> try_periodic(const SystemDef& sys,
                                     const std::vector<Vec>& window, double dt,
                                     const Vec& xi, const LimitParams& p,
                                     Direction dir) {
  const Vec& x_ref = window.back();
  Vec fr = sys.eval_field(x_ref);
  if (dir == Direction::reversed) fr = -fr;
  const double speed = fr.norm();
  if (speed < 1e-10) return std::nullopt;
  const Vec normal = fr / speed;

  std::vector<Crossing> crossings;
  double s_prev = normal.dot(window.front() - x_ref);
  for (std::size_t k = 1; k < window.size(); ++k) {
    const double s = normal.dot(window[k] - x_ref);
    if (s_prev < 0.0 && s >= 0.0) {
      const double alpha = s_prev / (s_prev - s);
      Crossing c;
      c.time = (static_cast<double>(k - 1) + alpha) * dt;
      c.state = window[k - 1] + alpha * (window[k] - window[k - 1]);
      crossings.push_back(std::move(c));
    }
    s_prev = s;
  }
  if (crossings.size() < 2) return std::nullopt;

  double period = 0.0;
  for (std::size_t i = 1; i < crossings.size(); ++i)
    period += crossings[i].time - crossings[i - 1].time;
  period /= static_cast<double>(crossings.size() - 1);
  if (!(period > 0.0)) return std::nullopt;

  for (std::size_t i = 1; i < crossings.size(); ++i) {
    const double gap = crossings[i].time - crossings[i - 1].time;
    if (std::abs(gap - period) > 0.1 * period) return std::nullopt;
    if ((crossings[i].state - crossings[i - 1].state).norm() > p.tol_orbit)
      return std::nullopt;
  }

  // Resample one period starting from the most converged crossing. Points are
  // taken uniformly in arc length, not time, so that two estimates of the
  // same orbit from different phases merge under the Hausdorff tolerance.
  LimitSet out;
  out.kind = LimitSet::Kind::periodic_orbit;
  out.period_estimate = period;
  out.source_state = xi;
  out.direction = dir;
  try {
    Trajectory orbit = integrate(sys, crossings.back().state, period, p.dt, dir);
    const std::size_t n = orbit.states.size();
    std::vector<double> arc(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
      arc[i] = arc[i - 1] + (orbit.states[i] - orbit.states[i - 1]).norm();
    const std::size_t want =
        std::min<std::size_t>(n, static_cast<std::size_t>(p.max_orbit_points));
    out.representatives.reserve(want);
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < want; ++i) {
      const double target = arc.back() * static_cast<double>(i) / want;
      while (cursor + 1 < n && arc[cursor + 1] < target) ++cursor;
      out.representatives.push_back(orbit.states[cursor]);
    }
  } catch (const Error&) {
    for (const Crossing& c : crossings) out.representatives.push_back(c.state);
  }
  return out;
}

LimitSet empty_limit_set(const Vec& xi, Direction dir) {
  LimitSet out;
  out.kind = LimitSet::Kind::empty;
  out.source_state = xi;
  out.direction = dir;
  return out;
}

}  // namespace

LimitSet estimate_omega_limit(const SystemDef& sys, const Vec& xi,
                              const LimitParams& p, Direction dir) {
  if (!sys.domain.contains(xi))
    fail(ErrorCode::domain_violation,
         "seed state outside domain of " + sys.name);

  Vec x = xi;
  double settled = 0.0;
  while (settled < p.settle - 1e-12) {
    const double chunk = std::min(p.early_chunk, p.settle - settled);
    Trajectory tr;
    try {
      tr = integrate(sys, x, chunk, p.dt, dir);
    } catch (const IntegrationDiverged&) {
      return empty_limit_set(xi, dir);
    }
    if (tr.exited_domain || tr.max_norm() > p.norm_bound)
      return empty_limit_set(xi, dir);
    x = tr.last();
    settled += chunk;
    if (p.early_exit && window_diameter(tr.states, 0) <= p.stationary_tol) {
      if (auto eq = try_equilibrium(sys, x, xi, p, dir)) return *eq;
    }
  }

  Trajectory obs;
  try {
    obs = integrate(sys, x, p.observe, p.dt, dir);
  } catch (const IntegrationDiverged&) {
    return empty_limit_set(xi, dir);
  }
  if (obs.exited_domain || obs.max_norm() > p.norm_bound)
    return empty_limit_set(xi, dir);

  if (window_diameter(obs.states, 0) <= p.stationary_tol) {
    if (auto eq = try_equilibrium(sys, obs.last(), xi, p, dir)) return *eq;
  }
  if (auto orbit = try_periodic(sys, obs.states, p.dt, xi, p, dir))
    return *orbit;

  // Bounded, non-stationary, non-recurrent tail.
  LimitSet out;
  out.kind = LimitSet::Kind::attractor_cloud;
  out.source_state = xi;
  out.direction = dir;
  const std::size_t n = obs.states.size();
  const std::size_t want =
      std::min<std::size_t>(n, static_cast<std::size_t>(p.max_cloud_points));
  out.representatives.reserve(want);
  for (std::size_t i = 0; i < want; ++i)
    out.representatives.push_back(obs.states[i * n / want]);
  return out;
}

std::vector<LimitSet> catalog_limit_sets(const SystemDef& sys,
                                         const std::vector<Vec>& seeds,
                                         const LimitParams& p, Direction dir) {
  if (seeds.empty()) fail(ErrorCode::invalid_argument, "seed list is empty");
  std::vector<LimitSet> per_seed(seeds.size());
  std::vector<char> usable(seeds.size(), 0);
  parallel_for(seeds.size(), [&](std::size_t i) {
    if (!sys.domain.contains(seeds[i])) return;
    per_seed[i] = estimate_omega_limit(sys, seeds[i], p, dir);
    usable[i] = per_seed[i].kind != LimitSet::Kind::empty;
  });
  std::vector<LimitSet> distinct;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!usable[i]) continue;
    bool merged = false;
    for (const LimitSet& seen : distinct) {
      if (hausdorff(per_seed[i].representatives, seen.representatives) <
          p.merge_tol) {
        merged = true;
        break;
      }
    }
    if (!merged) distinct.push_back(std::move(per_seed[i]));
  }
  return distinct;
}

std::vector<LimitSet> reference_limit_sets(const SystemDef& sys,
                                           const LimitParams& p) {
  std::vector<LimitSet> out;
  for (const LimitSetSpec& spec : sys.known_limit_sets) {
    if (!spec.points.empty()) {
      LimitSet ls;
      switch (spec.kind) {
        case LimitSetSpec::Kind::equilibrium:
          ls.kind = LimitSet::Kind::equilibrium;
          break;
        case LimitSetSpec::Kind::periodic_orbit:
          ls.kind = LimitSet::Kind::periodic_orbit;
          break;
        case LimitSetSpec::Kind::attractor_cloud:
          ls.kind = LimitSet::Kind::attractor_cloud;
          break;
      }
      ls.representatives = spec.points;
      ls.source_state = spec.witness;
      out.push_back(std::move(ls));
    } else {
      LimitSet est = estimate_omega_limit(sys, spec.witness, p);
      if (est.kind != LimitSet::Kind::empty) out.push_back(std::move(est));
    }
  }
  return out;
}

int match_limit_set(const LimitSet& est, const std::vector<LimitSet>& targets,
                    double merge_tol) {
  int best = -1;
  double best_dist = merge_tol;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d = hausdorff(est.representatives, targets[i].representatives);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::size_t BasinMap::cell_count() const {
  std::size_t n = 1;
  for (int r : resolution) n *= static_cast<std::size_t>(r);
  return n;
}

std::vector<int> BasinMap::cell_coords(std::size_t flat) const {
  std::vector<int> coords(resolution.size());
  for (std::size_t axis = resolution.size(); axis-- > 0;) {
    coords[axis] = static_cast<int>(flat % static_cast<std::size_t>(resolution[axis]));
    flat /= static_cast<std::size_t>(resolution[axis]);
  }
  return coords;
}

std::size_t BasinMap::flat_index(const std::vector<int>& coords) const {
  std::size_t flat = 0;
  for (std::size_t axis = 0; axis < coords.size(); ++axis)
    flat = flat * static_cast<std::size_t>(resolution[axis]) +
           static_cast<std::size_t>(coords[axis]);
  return flat;
}

Vec BasinMap::cell_center(std::size_t flat) const {
  const std::vector<int> coords = cell_coords(flat);
  Vec c(static_cast<int>(coords.size()));
  for (std::size_t axis = 0; axis < coords.size(); ++axis) {
    const double n = resolution[axis];
    const double i = coords[axis];
    // Symmetric form: centers of symmetric boxes land exactly on 0.
    c[static_cast<int>(axis)] =
        ((2 * n - 2 * i - 1) * box.lo[static_cast<int>(axis)] +
         (2 * i + 1) * box.hi[static_cast<int>(axis)]) /
        (2 * n);
  }
  return c;
}

BasinMap label_basins(const SystemDef& sys, const Box& box,
                      const std::vector<int>& resolution,
                      const std::vector<LimitSet>& targets,
                      const LimitParams& p, Direction dir) {
  if (targets.empty()) fail(ErrorCode::invalid_argument, "no target limit sets");
  if (static_cast<int>(resolution.size()) != sys.dim || box.dim() != sys.dim)
    fail(ErrorCode::invalid_argument, "box/resolution dimension mismatch");
  for (int r : resolution)
    if (r < 1) fail(ErrorCode::invalid_argument, "resolution must be >= 1");

  BasinMap map;
  map.box = box;
  map.resolution = resolution;
  map.limit_sets = targets;
  map.direction = dir;
  map.labels.assign(map.cell_count(), BasinMap::kUnresolved);

  parallel_for(map.cell_count(), [&](std::size_t idx) {
    const Vec center = map.cell_center(idx);
    if (!sys.domain.contains(center)) {
      map.labels[idx] = BasinMap::kUnresolved;
      return;
    }
    const LimitSet est = estimate_omega_limit(sys, center, p, dir);
    if (est.kind == LimitSet::Kind::empty) {
      map.labels[idx] = BasinMap::kDiverged;
      return;
    }
    map.labels[idx] = match_limit_set(est, targets, p.merge_tol);
  });
  return map;
}

std::string basin_csv(const BasinMap& map) {
  std::ostringstream out;
  const int dim = map.box.dim();
  for (int i = 1; i <= dim; ++i) out << "x" << i << ",";
  out << "label\n";
  for (std::size_t idx = 0; idx < map.labels.size(); ++idx) {
    const Vec c = map.cell_center(idx);
    for (int i = 0; i < dim; ++i) out << fmt17(c[i]) << ",";
    const int label = map.labels[idx];
    if (label == BasinMap::kUnresolved)
      out << "UNRESOLVED";
    else if (label == BasinMap::kDiverged)
      out << "DIVERGED";
    else
      out << label;
    out << "\n";
  }
  return out.str();
}

bool ClosedBasinReport::has_internal_boundaries() const {
  for (const BasinBoundaryStat& s : stats)
    if (s.boundary_edges > 0) return true;
  return false;
}

namespace {

int classify_point(const SystemDef& sys, const Vec& x, const BasinMap& map,
                   const LimitParams& p) {
  if (!sys.domain.contains(x)) return BasinMap::kUnresolved;
  const LimitSet est = estimate_omega_limit(sys, x, p, map.direction);
  if (est.kind == LimitSet::Kind::empty) return BasinMap::kDiverged;
  return match_limit_set(est, map.limit_sets, p.merge_tol);
}

}  // namespace

ClosedBasinReport closed_basin_score(const SystemDef& sys, const BasinMap& map,
                                     const LimitParams& params) {
  // Boundary refinement rides through slow saddle passages, so allow a longer
  // transient than plain labeling.
  LimitParams p = params;
  p.settle = 2.0 * params.settle;

  ClosedBasinReport report;
  report.stats.resize(map.limit_sets.size());
  for (std::size_t i = 0; i < map.limit_sets.size(); ++i)
    report.stats[i].limit_set = static_cast<int>(i);

  struct Edge {
    Vec a_center, b_center;
    int a_label, b_label;
  };
  std::vector<Edge> edges;
  const std::size_t cells = map.cell_count();
  for (std::size_t idx = 0; idx < cells; ++idx) {
    const int la = map.labels[idx];
    if (la < 0) continue;
    const std::vector<int> coords = map.cell_coords(idx);
    for (std::size_t axis = 0; axis < coords.size(); ++axis) {
      if (coords[axis] + 1 >= map.resolution[axis]) continue;
      std::vector<int> next = coords;
      next[axis] += 1;
      const int lb = map.labels[map.flat_index(next)];
      if (lb < 0 || lb == la) continue;
      edges.push_back(Edge{map.cell_center(idx),
                           map.cell_center(map.flat_index(next)), la, lb});
    }
  }

  constexpr int kBisectIters = 40;
  const double near_miss_tol = 1e-3;

  std::vector<int> owners(edges.size(), BasinMap::kUnresolved);
  parallel_for(edges.size(), [&](std::size_t e) {
    const Edge& edge = edges[e];
    Vec pa = edge.a_center, pb = edge.b_center;
    int owner = BasinMap::kUnresolved;
    bool third_hit = false;
    for (int it = 0; it < kBisectIters; ++it) {
      const Vec mid = 0.5 * (pa + pb);
      const int lm = classify_point(sys, mid, map, p);
      if (lm == edge.a_label) {
        pa = mid;
      } else if (lm == edge.b_label) {
        pb = mid;
      } else {
        owner = lm;
        third_hit = true;
        break;
      }
    }
    if (!third_hit) {
      // Bracket collapsed onto a limit set: the boundary point is that set.
      for (std::size_t s = 0; s < map.limit_sets.size(); ++s) {
        const auto& reps = map.limit_sets[s].representatives;
        if (min_distance(pa, reps) <= p.merge_tol &&
            min_distance(pb, reps) <= p.merge_tol) {
          owner = static_cast<int>(s);
          break;
        }
      }
      if (owner == BasinMap::kUnresolved) {
        // Near-miss test: a boundary trajectory that shadows the stable
        // manifold of a third set passes arbitrarily close to it.
        const Vec mid = 0.5 * (pa + pb);
        double best = kInf;
        int best_set = BasinMap::kUnresolved;
        try {
          Trajectory t = integrate(sys, mid, p.settle, p.dt, map.direction);
          for (std::size_t s = 0; s < map.limit_sets.size(); ++s) {
            if (static_cast<int>(s) == edge.a_label ||
                static_cast<int>(s) == edge.b_label)
              continue;
            for (const Vec& st : t.states) {
              const double d =
                  min_distance(st, map.limit_sets[s].representatives);
              if (d < best) {
                best = d;
                best_set = static_cast<int>(s);
              }
            }
          }
        } catch (const Error&) {
        }
        if (best <= near_miss_tol)
          owner = best_set;
        else
          owner = classify_point(sys, mid, map, p);
      }
    }
    owners[e] = owner;
  });

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    const int owner = owners[e];
    for (int side : {edge.a_label, edge.b_label}) {
      BasinBoundaryStat& st = report.stats[static_cast<std::size_t>(side)];
      st.boundary_edges += 1;
      if (owner == side)
        st.closed_like += 1;
      else if (owner == edge.a_label || owner == edge.b_label)
        st.open_to_neighbor += 1;
      else
        st.open_to_third += 1;
    }
  }
  return report;
}

namespace {

// Pool-adjacent-violators: least-squares monotone nondecreasing fit.
std::vector<double> isotonic_fit(const std::vector<double>& y) {
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (double v : y) {
    blocks.push_back({v, 1});
    while (blocks.size() >= 2) {
      const Block& b = blocks[blocks.size() - 1];
      const Block& a = blocks[blocks.size() - 2];
      if (a.sum / a.count <= b.sum / b.count) break;
      Block merged{a.sum + b.sum, a.count + b.count};
      blocks.pop_back();
      blocks.pop_back();
      blocks.push_back(merged);
    }
  }
  std::vector<double> fit;
  fit.reserve(y.size());
  for (const Block& b : blocks) {
    const double v = b.sum / static_cast<double>(b.count);
    for (std::size_t i = 0; i < b.count; ++i) fit.push_back(v);
  }
  return fit;
}

}  // namespace

StabilityProbeReport incremental_stability_probe(const SystemDef& sys,
                                                 const Box& region, int pairs,
                                                 double horizon,
                                                 std::uint64_t seed,
                                                 const LimitParams& p) {
  if (pairs < 1) fail(ErrorCode::invalid_argument, "pairs must be >= 1");
  if (region.dim() != sys.dim)
    fail(ErrorCode::invalid_argument, "region dimension mismatch");

  StabilityProbeReport report;
  report.pair_samples.resize(static_cast<std::size_t>(pairs));

  parallel_for(static_cast<std::size_t>(pairs), [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    auto draw = [&]() {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec x(sys.dim);
        for (int d = 0; d < sys.dim; ++d)
          x[d] = rng.uniform(region.lo[d], region.hi[d]);
        if (sys.domain.contains(x)) return x;
      }
      fail(ErrorCode::empty_domain,
           "sampling region misses the domain of " + sys.name);
    };
    PairSample& sample = report.pair_samples[i];
    sample.xi1 = draw();
    do {
      sample.xi2 = draw();
    } while ((sample.xi1 - sample.xi2).norm() < 1e-12);
    sample.initial_distance = (sample.xi1 - sample.xi2).norm();
    try {
      const Trajectory t1 = integrate(sys, sample.xi1, horizon, p.dt);
      const Trajectory t2 = integrate(sys, sample.xi2, horizon, p.dt);
      const std::size_t n = std::min(t1.states.size(), t2.states.size());
      double sup = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        sup = std::max(sup, (t1.states[k] - t2.states[k]).norm());
      sample.sup_deviation = sup;
      if (t1.exited_domain || t2.exited_domain ||
          t1.max_norm() > p.norm_bound || t2.max_norm() > p.norm_bound)
        sample.sup_deviation = kInf;
    } catch (const Error&) {
      sample.sup_deviation = kInf;
    }
  });

  std::vector<std::size_t> order(report.pair_samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.pair_samples[a].initial_distance <
           report.pair_samples[b].initial_distance;
  });
  std::vector<double> devs;
  devs.reserve(order.size());
  for (std::size_t i : order) {
    report.envelope_distances.push_back(
        report.pair_samples[i].initial_distance);
    devs.push_back(report.pair_samples[i].sup_deviation);
  }
  report.envelope_gains = isotonic_fit(devs);

  for (const PairSample& s : report.pair_samples) {
    const double gain = s.sup_deviation / s.initial_distance;
    report.max_gain = std::max(report.max_gain, gain);
    if (s.sup_deviation >
        StabilityProbeReport::kViolationFactor * s.initial_distance)
      report.violates_c2 = true;
  }
  return report;
}

std::string stability_report_json(const StabilityProbeReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["verdict"] = report.violates_c2 ? "violates_C2" : "consistent_with_C2";
  j["max_gain"] = report.max_gain;
  j["violation_factor"] = StabilityProbeReport::kViolationFactor;
  auto& pairs = j["pair_samples"] = nlohmann::json::array();
  for (const PairSample& s : report.pair_samples) {
    nlohmann::json row;
    row["xi1"] = std::vector<double>(s.xi1.data(), s.xi1.data() + s.xi1.size());
    row["xi2"] = std::vector<double>(s.xi2.data(), s.xi2.data() + s.xi2.size());
    row["initial_distance"] = s.initial_distance;
    row["sup_deviation"] = s.sup_deviation;
    pairs.push_back(std::move(row));
  }
  j["envelope"] = {{"initial_distance", report.envelope_distances},
                   {"fitted_gain", report.envelope_gains}};
  return j.dump(2) + "\n";
}

PrecompactVerdict precompactness_probe(const Trajectory& traj,
                                       double norm_bound) {
  if (traj.exited_domain || traj.max_norm() > norm_bound)
    return PrecompactVerdict::diverged;
  return PrecompactVerdict::precompact_like;
}

}  // namespace koop
