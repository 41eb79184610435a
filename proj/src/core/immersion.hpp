// Closed-form immersion candidates F with generator A, and numerical checks
// of the defining identity F(phi(t,xi)) = e^{At} F(xi).
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/limitset.hpp"
#include "core/linalg.hpp"
#include "core/system.hpp"

namespace koop {

struct ImmersionCandidate {
  enum class Continuity { continuous, discontinuous };
  enum class Injectivity { yes, no, unknown };

  std::string name;
  std::string source_system;
  int source_dim = 0;
  int target_dim = 0;
  std::function<Vec(const Vec&)> map;  // raw map, no domain checks
  Mat generator;                       // target system zdot = A z
  DomainSpec domain;                   // where the immersion identity holds
  Continuity continuity = Continuity::continuous;
  Injectivity injective_claim = Injectivity::unknown;

  // Domain- and finiteness-checked evaluation; throws domain_violation naming
  // the offending point.
  Vec eval(const Vec& x) const;
};

// The worked closed-form immersions, keyed by their source system name.
const std::vector<ImmersionCandidate>& exact_catalog();
const ImmersionCandidate& find_immersion(const std::string& name);

// F(x) = x[axis] with a zero generator placeholder; used as a fixed candidate
// that provably distinguishes limit sets.
ImmersionCandidate coordinate_immersion(const SystemDef& sys, int axis);

struct ImmersionSample {
  Vec xi;
  double t = 0.0;
  double residual = 0.0;
};

struct ImmersionResidualReport {
  std::string candidate;
  std::string grid_spec;
  std::vector<ImmersionSample> samples;
  double max_residual = 0.0;
};

ImmersionResidualReport verify_immersion(const ImmersionCandidate& cand,
                                         const std::vector<Vec>& xi_grid,
                                         const std::vector<double>& t_grid,
                                         double dt = 1e-3,
                                         FlowMode mode = FlowMode::prefer_closed_form);

// Canonical grids per candidate: nxi domain points (one branch interval for
// the discontinuous candidate) and nt times in [0, 5].
void default_verification_grid(const ImmersionCandidate& cand, int nxi, int nt,
                               std::vector<Vec>& xi_grid,
                               std::vector<double>& t_grid);

// CSV export `xi1,...,xin,t,residual`; JSON carries schema_version.
std::string residual_report_csv(const ImmersionResidualReport& report);
std::string residual_report_json(const ImmersionResidualReport& report);

struct InjectivityProbeResult {
  bool collision_found = false;
  Vec xi1, xi2;  // populated when a collision was found
};

// Samples box-cap-domain points and reports a pair mapping together:
// ||F(a)-F(b)|| <= collision_tol while ||a-b|| >= 100 * collision_tol.
// exclusion_radius additionally keeps samples away from the domain's
// excluded points (e.g. to probe an annulus around a removed origin).
InjectivityProbeResult injectivity_probe(const ImmersionCandidate& cand,
                                         const Box& box, int samples,
                                         std::uint64_t seed,
                                         double collision_tol,
                                         double exclusion_radius = 0.0);

struct CollapseWitness {
  Mat distances;  // pairwise Hausdorff distances between F-images
  double max_distance = 0.0;
};

// Evaluates F on each limit set's representatives. Throws domain_violation
// when a representative lies outside the immersion domain (e.g. the removed
// origin of the planar limit-cycle example).
CollapseWitness collapse_witness(const ImmersionCandidate& cand,
                                 const std::vector<LimitSet>& limit_sets);

// Limit sets all of whose representatives lie in the immersion domain.
std::vector<LimitSet> filter_to_domain(const std::vector<LimitSet>& sets,
                                       const DomainSpec& domain);

}  // namespace koop
