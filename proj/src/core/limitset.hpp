// Numerical estimation and classification of omega- and alpha-limit sets,
// basin labeling on grids, and empirical probes for precompactness and
// incremental stability. Everything here is evidence, not proof.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/system.hpp"

namespace koop {

struct LimitParams {
  double settle = 50.0;         // transient to discard
  double observe = 20.0;        // classification window
  double dt = 1e-3;
  double tol_eq = 1e-8;         // ||f|| bound for a reported equilibrium
  double merge_tol = 1e-2;      // Hausdorff tolerance for merging/matching
  double tol_orbit = 1e-3;      // first-return closure tolerance
  double stationary_tol = 1e-4; // window diameter for the stationary test
  double norm_bound = 1e6;      // beyond this the trajectory counts as diverged
  int max_orbit_points = 1024;
  int max_cloud_points = 256;
  bool early_exit = true;       // classify equilibria before the full settle
  double early_chunk = 5.0;
  double confirm_horizon = 5.0; // attraction re-check for equilibrium claims
};

struct LimitSet {
  enum class Kind { equilibrium, periodic_orbit, attractor_cloud, empty };

  Kind kind = Kind::empty;
  std::vector<Vec> representatives;
  std::optional<double> period_estimate;  // periodic_orbit only
  Vec source_state;
  Direction direction = Direction::forward;  // forward: omega, reversed: alpha
};

const char* limit_set_kind_name(LimitSet::Kind kind);

// Integrates settle+observe and classifies the tail. Divergence (non-finite,
// domain exit, norm beyond norm_bound) yields kind=empty.
LimitSet estimate_omega_limit(const SystemDef& sys, const Vec& xi,
                              const LimitParams& params = {},
                              Direction dir = Direction::forward);

// Runs estimate_omega_limit per seed and merges results whose representative
// Hausdorff distance is below merge_tol. Seeds outside the domain are skipped;
// empty classifications are dropped.
std::vector<LimitSet> catalog_limit_sets(const SystemDef& sys,
                                         const std::vector<Vec>& seeds,
                                         const LimitParams& params = {},
                                         Direction dir = Direction::forward);

// The catalog's known limit sets as LimitSet values; specs without explicit
// points are estimated from their witness states.
std::vector<LimitSet> reference_limit_sets(const SystemDef& sys,
                                           const LimitParams& params = {});

// Index of the target within merge_tol of `est` (closest if several), or -1.
int match_limit_set(const LimitSet& est, const std::vector<LimitSet>& targets,
                    double merge_tol);

struct BasinMap {
  static constexpr int kUnresolved = -1;
  static constexpr int kDiverged = -2;

  Box box;
  std::vector<int> resolution;  // cells per axis
  std::vector<int> labels;      // row-major, index into limit_sets or k*
  std::vector<LimitSet> limit_sets;
  Direction direction = Direction::forward;

  std::size_t cell_count() const;
  std::vector<int> cell_coords(std::size_t flat) const;
  std::size_t flat_index(const std::vector<int>& coords) const;
  Vec cell_center(std::size_t flat) const;
};

BasinMap label_basins(const SystemDef& sys, const Box& box,
                      const std::vector<int>& resolution,
                      const std::vector<LimitSet>& targets,
                      const LimitParams& params = {},
                      Direction dir = Direction::forward);

// CSV export `x1,...,xn,label`; special labels print as UNRESOLVED/DIVERGED.
std::string basin_csv(const BasinMap& map);

struct BasinBoundaryStat {
  int limit_set = -1;            // index into map.limit_sets
  std::size_t boundary_edges = 0;
  std::size_t closed_like = 0;   // refined boundary point belongs to this basin
  std::size_t open_to_neighbor = 0;
  std::size_t open_to_third = 0;
  double closed_fraction() const {
    return boundary_edges == 0 ? 1.0
                               : static_cast<double>(closed_like) /
                                     static_cast<double>(boundary_edges);
  }
};

struct ClosedBasinReport {
  std::vector<BasinBoundaryStat> stats;  // one per limit set in the map
  bool has_internal_boundaries() const;
};

// Refines every basin-adjacent cell pair by bisection and attributes the
// boundary point: to a basin it collapses onto, to a third limit set the
// refined trajectory nearly hits, or to the midpoint's own basin.
ClosedBasinReport closed_basin_score(const SystemDef& sys, const BasinMap& map,
                                     const LimitParams& params = {});

struct PairSample {
  Vec xi1, xi2;
  double initial_distance = 0.0;
  double sup_deviation = 0.0;
};

struct StabilityProbeReport {
  // A pair violates when its trajectories separate by more than
  // kViolationFactor times the initial distance within the horizon.
  static constexpr double kViolationFactor = 10.0;

  std::vector<PairSample> pair_samples;
  std::vector<double> envelope_distances;  // isotonic fit knots (sorted d0)
  std::vector<double> envelope_gains;      // fitted sup-deviation per knot
  double max_gain = 0.0;
  bool violates_c2 = false;
};

StabilityProbeReport incremental_stability_probe(const SystemDef& sys,
                                                 const Box& region, int pairs,
                                                 double horizon,
                                                 std::uint64_t seed,
                                                 const LimitParams& params = {});

std::string stability_report_json(const StabilityProbeReport& report);

enum class PrecompactVerdict { precompact_like, diverged };

PrecompactVerdict precompactness_probe(const Trajectory& traj,
                                       double norm_bound = 1e6);

// Newton refinement of an equilibrium guess (finite-difference Jacobian).
std::optional<Vec> polish_equilibrium(const SystemDef& sys, Vec guess,
                                      double tol = 1e-12, int max_iters = 25);

}  // namespace koop
