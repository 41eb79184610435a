// Benchmark system catalog and trajectory integration. Systems are autonomous
// vector fields on subsets of R^n; several carry closed-form flows that the
// integrator is checked against.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace koop {

struct DomainSpec {
  enum class Kind { full_space, box, box_minus_points, ellipsoid };

  Kind kind = Kind::full_space;
  int dim = 0;
  Box bounds;                    // box / box_minus_points (may be +-inf)
  std::vector<Vec> excluded;     // box_minus_points, finitely many
  double exclusion_radius = 1e-12;
  Vec center;                    // ellipsoid
  Mat shape;                     // ellipsoid: (x-c)^T shape (x-c) <= 1

  bool contains(const Vec& x) const;

  static DomainSpec full(int dim);
  static DomainSpec box_domain(Box b);
  static DomainSpec box_minus(Box b, std::vector<Vec> excluded);
  static DomainSpec ellipsoid(Vec center, Mat shape);
};

struct LimitSetSpec {
  enum class Kind { equilibrium, periodic_orbit, attractor_cloud };

  Kind kind = Kind::equilibrium;
  std::vector<Vec> points;  // empty when the shape is not known in closed form
  Vec witness;              // an initial state whose omega-limit set is this one
  std::string label;
};

using VectorField = std::function<void(const Vec&, Vec&)>;
using ClosedFormFlow = std::function<Vec(double, const Vec&)>;

struct SystemDef {
  std::string name;
  int dim = 0;
  VectorField vector_field;
  DomainSpec domain;
  ClosedFormFlow closed_form_flow;  // nullable
  std::vector<LimitSetSpec> known_limit_sets;
  Box default_box;  // canonical sampling/plotting region
  std::string notes;

  bool has_closed_form() const { return static_cast<bool>(closed_form_flow); }

  Vec eval_field(const Vec& x) const {
    Vec out(dim);
    vector_field(x, out);
    return out;
  }
};

enum class Direction { forward, reversed };

struct Trajectory {
  std::string system_name;
  int dim = 0;
  double t0 = 0.0;
  double dt = 0.0;
  Direction direction = Direction::forward;
  std::vector<Vec> states;
  bool exited_domain = false;

  double time_at(std::size_t k) const {
    const double sign = direction == Direction::reversed ? -1.0 : 1.0;
    return t0 + sign * static_cast<double>(k) * dt;
  }
  const Vec& last() const { return states.back(); }
  double max_norm() const;
};

// Fixed-step RK4. The horizon must be an integer multiple of dt (rounded to
// the nearest step count). Leaving the domain truncates the trajectory and
// sets exited_domain; a non-finite state raises IntegrationDiverged with the
// last valid time.
Trajectory integrate(const SystemDef& sys, const Vec& xi, double horizon,
                     double dt, Direction dir = Direction::forward);

// Propagates for exactly tau: full steps of dt plus one final partial step.
// Used where the horizon is not a step multiple (e.g. data-pair sampling).
Vec flow_for(const SystemDef& sys, const Vec& xi, double tau, double dt,
             Direction dir = Direction::forward);

enum class FlowMode { prefer_closed_form, integrate_only };

// phi(t, xi): the closed form when available (and mode allows), else RK4.
Vec flow_sample(const SystemDef& sys, const Vec& xi, double t, double dt,
                FlowMode mode = FlowMode::prefer_closed_form);

// Max residual between the closed-form flow and the integrator over random
// (t, xi) samples drawn from [0,5] x default_box. Throws `unsupported` when
// the system has no closed form.
double closed_form_flow_check(const SystemDef& sys, int samples,
                              std::uint64_t seed, double dt = 1e-3);

const std::vector<SystemDef>& catalog();
const SystemDef& find_system(const std::string& name);

// The time-reversed system xdot = -f(x) on the same domain.
SystemDef reversed_system(const SystemDef& sys);

// CSV export: header `t,x1,...,xn`, floats with 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

// Lorenz invariant-ellipsoid parameters, exposed for tests.
struct LorenzEllipsoid {
  double sigma, b, r, level;
  double value(const Vec& x) const;  // r x^2 + sigma y^2 + sigma (z-2r)^2
};
LorenzEllipsoid lorenz_ellipsoid();

}  // namespace koop
