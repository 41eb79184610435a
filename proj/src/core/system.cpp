#include "core/system.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/rng.hpp"

namespace koop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

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
Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}
}  // namespace

bool DomainSpec::contains(const Vec& x) const {
  if (static_cast<int>(x.size()) != dim) return false;
  if (!x.allFinite()) return false;
  switch (kind) {
    case Kind::full_space:
      return true;
    case Kind::box:
      return bounds.contains(x);
    case Kind::box_minus_points: {
      if (!bounds.contains(x)) return false;
      for (const Vec& p : excluded)
        if ((x - p).norm() <= exclusion_radius) return false;
      return true;
    }
    case Kind::ellipsoid: {
      const Vec d = x - center;
      return d.dot(shape * d) <= 1.0;
    }
  }
  return false;
}

DomainSpec DomainSpec::full(int dim) {
  DomainSpec d;
  d.kind = Kind::full_space;
  d.dim = dim;
  return d;
}

DomainSpec DomainSpec::box_domain(Box b) {
  DomainSpec d;
  d.kind = Kind::box;
  d.dim = b.dim();
  d.bounds = std::move(b);
  return d;
}

DomainSpec DomainSpec::box_minus(Box b, std::vector<Vec> excluded) {
  DomainSpec d;
  d.kind = Kind::box_minus_points;
  d.dim = b.dim();
  d.bounds = std::move(b);
  d.excluded = std::move(excluded);
  return d;
}

DomainSpec DomainSpec::ellipsoid(Vec center, Mat shape) {
  DomainSpec d;
  d.kind = Kind::ellipsoid;
  d.dim = static_cast<int>(center.size());
  d.center = std::move(center);
  d.shape = std::move(shape);
  return d;
}

double Trajectory::max_norm() const {
  double m = 0.0;
  for (const Vec& s : states) m = std::max(m, s.norm());
  return m;
}

namespace {

// One RK4 step of xdot = sign * f(x). Scratch vectors are caller-owned so the
// hot loops stay allocation-free.
struct Rk4Scratch {
  Vec k1, k2, k3, k4, tmp;
  explicit Rk4Scratch(int dim) : k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim) {}
};

void rk4_step(const SystemDef& sys, double sign, double h, Vec& x, Rk4Scratch& s) {
  sys.vector_field(x, s.k1);
  s.tmp = x + (sign * h / 2) * s.k1;
  sys.vector_field(s.tmp, s.k2);
  s.tmp = x + (sign * h / 2) * s.k2;
  sys.vector_field(s.tmp, s.k3);
  s.tmp = x + sign * h * s.k3;
  sys.vector_field(s.tmp, s.k4);
  x += (sign * h / 6) * (s.k1 + 2 * s.k2 + 2 * s.k3 + s.k4);
}

}  // namespace

Trajectory integrate(const SystemDef& sys, const Vec& xi, double horizon,
                     double dt, Direction dir) {
  if (!(dt > 0)) fail(ErrorCode::invalid_argument, "dt must be positive");
  if (!(horizon >= 0)) fail(ErrorCode::invalid_argument, "horizon must be >= 0");
  if (!sys.domain.contains(xi))
    fail(ErrorCode::domain_violation, "initial state outside domain of " + sys.name);

  Trajectory traj;
  traj.system_name = sys.name;
  traj.dim = sys.dim;
  traj.t0 = 0.0;
  traj.dt = dt;
  traj.direction = dir;

  const auto steps = static_cast<long long>(std::llround(horizon / dt));
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.states.push_back(xi);

  const double sign = dir == Direction::reversed ? -1.0 : 1.0;
  Rk4Scratch scratch(sys.dim);
  Vec x = xi;
  for (long long k = 0; k < steps; ++k) {
    rk4_step(sys, sign, dt, x, scratch);
    if (!x.allFinite()) {
      throw IntegrationDiverged(
          "integration diverged for " + sys.name + " at t=" +
              fmt17(traj.time_at(static_cast<std::size_t>(k))),
          traj.time_at(static_cast<std::size_t>(k)));
    }
    if (!sys.domain.contains(x)) {
      traj.exited_domain = true;
      break;
    }
    traj.states.push_back(x);
  }
  return traj;
}

Vec flow_for(const SystemDef& sys, const Vec& xi, double tau, double dt,
             Direction dir) {
  if (!(dt > 0)) fail(ErrorCode::invalid_argument, "dt must be positive");
  if (!(tau >= 0)) fail(ErrorCode::invalid_argument, "tau must be >= 0");
  if (!sys.domain.contains(xi))
    fail(ErrorCode::domain_violation, "initial state outside domain of " + sys.name);

  const double sign = dir == Direction::reversed ? -1.0 : 1.0;
  Rk4Scratch scratch(sys.dim);
  Vec x = xi;
  auto full_steps = static_cast<long long>(std::floor(tau / dt + 1e-12));
  double remainder = tau - static_cast<double>(full_steps) * dt;
  if (remainder < 1e-12 * dt) remainder = 0.0;
  double t = 0.0;
  auto advance = [&](double h) {
    rk4_step(sys, sign, h, x, scratch);
    if (!x.allFinite())
      throw IntegrationDiverged("integration diverged for " + sys.name, t);
    t += h;
    if (!sys.domain.contains(x))
      fail(ErrorCode::domain_violation,
           "trajectory left domain of " + sys.name + " at t=" + fmt17(t));
  };
  for (long long k = 0; k < full_steps; ++k) advance(dt);
  if (remainder > 0.0) advance(remainder);
  return x;
}

Vec flow_sample(const SystemDef& sys, const Vec& xi, double t, double dt,
                FlowMode mode) {
  if (mode == FlowMode::prefer_closed_form && sys.has_closed_form())
    return sys.closed_form_flow(t, xi);
  if (t < 0)
    return flow_for(sys, xi, -t, dt, Direction::reversed);
  return flow_for(sys, xi, t, dt);
}

double closed_form_flow_check(const SystemDef& sys, int samples,
                              std::uint64_t seed, double dt) {
  if (!sys.has_closed_form())
    fail(ErrorCode::unsupported, sys.name + " has no closed-form flow");
  if (samples < 1) fail(ErrorCode::invalid_argument, "samples must be >= 1");
  Rng rng(seed);
  double worst = 0.0;
  int accepted = 0;
  int attempts = 0;
  while (accepted < samples && attempts < 1000 * samples) {
    ++attempts;
    Vec xi(sys.dim);
    for (int i = 0; i < sys.dim; ++i)
      xi[i] = rng.uniform(sys.default_box.lo[i], sys.default_box.hi[i]);
    if (!sys.domain.contains(xi)) continue;
    const double t = rng.uniform(0.0, 5.0);
    Vec integrated;
    try {
      integrated = flow_for(sys, xi, t, dt);
    } catch (const Error&) {
      continue;  // diverging draw; the check targets the shared domain
    }
    const Vec closed = sys.closed_form_flow(t, xi);
    worst = std::max(worst, (closed - integrated).norm());
    ++accepted;
  }
  if (accepted == 0)
    fail(ErrorCode::empty_domain, "no valid samples drawn for " + sys.name);
  return worst;
}

namespace {

std::vector<Vec> circle_points(double radius, int n) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * M_PI * static_cast<double>(i) / n;
    pts.push_back(vec2(radius * std::cos(th), radius * std::sin(th)));
  }
  return pts;
}

LimitSetSpec eq_spec(Vec point, std::string label) {
  LimitSetSpec s;
  s.kind = LimitSetSpec::Kind::equilibrium;
  s.witness = point;
  s.points = {std::move(point)};
  s.label = std::move(label);
  return s;
}

// Radial part shared by cubic1d and the 2D limit-cycle system:
// rdot = r(1 - r^2)  =>  r(t) = r0 / sqrt(e^{-2t} + r0^2 (1 - e^{-2t})).
double radial_flow(double t, double r0) {
  const double w = std::exp(-2.0 * t);
  return r0 / std::sqrt(w + r0 * r0 * (1.0 - w));
}

SystemDef make_quadratic1d() {
  SystemDef s;
  s.name = "quadratic1d";
  s.dim = 1;
  s.vector_field = [](const Vec& x, Vec& dx) { dx[0] = x[0] * x[0] - 1.0; };
  s.domain = DomainSpec::full(1);
  s.closed_form_flow = [](double t, const Vec& xi) {
    if (t == 0.0) return xi;
    // Moebius form of the separable solution; valid until blow-up (xi > 1).
    const double th = std::tanh(t);
    return vec1((xi[0] - th) / (1.0 - xi[0] * th));
  };
  s.known_limit_sets = {eq_spec(vec1(-1.0), "stable equilibrium -1"),
                        eq_spec(vec1(1.0), "unstable equilibrium 1")};
  s.default_box = Box::of({-3.0}, {0.9});
  s.notes = "xdot = x^2 - 1; omega-limit sets {-1} and {1}";
  return s;
}

SystemDef make_sine1d() {
  SystemDef s;
  s.name = "sine1d";
  s.dim = 1;
  s.vector_field = [](const Vec& x, Vec& dx) { dx[0] = std::sin(x[0]); };
  s.domain = DomainSpec::box_domain(Box::of({0.0}, {M_PI}));
  s.closed_form_flow = [](double t, const Vec& xi) {
    if (t == 0.0) return xi;
    if (xi[0] == 0.0 || xi[0] == M_PI) return xi;
    return vec1(2.0 * std::atan(std::exp(t) * std::tan(xi[0] / 2.0)));
  };
  s.known_limit_sets = {eq_spec(vec1(0.0), "unstable equilibrium 0"),
                        eq_spec(vec1(M_PI), "stable equilibrium pi")};
  s.default_box = Box::of({0.0}, {M_PI});
  s.notes = "xdot = sin(x) on [0, pi]";
  return s;
}

SystemDef make_cubic1d() {
  SystemDef s;
  s.name = "cubic1d";
  s.dim = 1;
  s.vector_field = [](const Vec& x, Vec& dx) {
    dx[0] = x[0] - x[0] * x[0] * x[0];
  };
  s.domain = DomainSpec::full(1);
  s.closed_form_flow = [](double t, const Vec& xi) {
    if (t == 0.0) return xi;
    return vec1(xi[0] == 0.0 ? 0.0 : std::copysign(radial_flow(t, std::abs(xi[0])), xi[0]));
  };
  s.known_limit_sets = {eq_spec(vec1(-1.0), "stable equilibrium -1"),
                        eq_spec(vec1(0.0), "unstable equilibrium 0"),
                        eq_spec(vec1(1.0), "stable equilibrium 1")};
  s.default_box = Box::of({-2.0}, {2.0});
  s.notes = "xdot = x - x^3; omega-limit sets {-1}, {0}, {1}";
  return s;
}

SystemDef make_rational1d() {
  SystemDef s;
  s.name = "rational1d";
  s.dim = 1;
  s.vector_field = [](const Vec& x, Vec& dx) {
    const double v = x[0];
    dx[0] = v * (1.0 - v * v) / (1.0 + v * v);
  };
  s.domain = DomainSpec::full(1);
  s.closed_form_flow = [](double t, const Vec& xi) {
    const double x0 = xi[0];
    if (t == 0.0 || x0 == 0.0 || x0 == 1.0 || x0 == -1.0) return xi;
    // From ln|x/(1-x^2)| = t + const; the quadratic root matching x(0) = x0
    // flips sign across |x0| = 1. Scaled by e^{-t} to avoid overflow.
    const double k = x0 / (1.0 - x0 * x0);
    const double sgn = std::abs(x0) < 1.0 ? 1.0 : -1.0;
    const double w = std::exp(-t);
    return vec1((-w + sgn * std::sqrt(w * w + 4.0 * k * k)) / (2.0 * k));
  };
  s.known_limit_sets = {eq_spec(vec1(-1.0), "stable equilibrium -1"),
                        eq_spec(vec1(0.0), "unstable equilibrium 0"),
                        eq_spec(vec1(1.0), "stable equilibrium 1")};
  s.default_box = Box::of({-3.0}, {3.0});
  s.notes = "xdot = x (1 - x^2) / (1 + x^2); three equilibria";
  return s;
}

SystemDef make_limit_cycle2d() {
  SystemDef s;
  s.name = "limit_cycle2d";
  s.dim = 2;
  s.vector_field = [](const Vec& x, Vec& dx) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    dx[0] = x[0] - x[1] - x[0] * r2;
    dx[1] = x[0] + x[1] - x[1] * r2;
  };
  s.domain = DomainSpec::box_minus(Box::of({-kInf, -kInf}, {kInf, kInf}),
                                   {vec2(0.0, 0.0)});
  s.closed_form_flow = [](double t, const Vec& xi) {
    if (t == 0.0) return xi;
    const double r0 = xi.norm();
    const double th = std::atan2(xi[1], xi[0]) + t;
    const double r = radial_flow(t, r0);
    return vec2(r * std::cos(th), r * std::sin(th));
  };
  {
    LimitSetSpec cycle;
    cycle.kind = LimitSetSpec::Kind::periodic_orbit;
    cycle.points = circle_points(1.0, 512);
    cycle.witness = vec2(0.1, 0.0);
    cycle.label = "unit circle";
    s.known_limit_sets = {cycle};
  }
  s.default_box = Box::of({-2.0, -2.0}, {2.0, 2.0});
  s.notes =
      "planar system with a stable limit cycle on the unit circle; "
      "domain excludes the origin (its only omega-limit set in the domain "
      "is the circle)";
  return s;
}

SystemDef make_duffing() {
  SystemDef s;
  s.name = "duffing";
  s.dim = 2;
  s.vector_field = [](const Vec& x, Vec& dx) {
    dx[0] = x[1];
    dx[1] = -0.5 * x[1] - x[0] * (x[0] * x[0] - 1.0);
  };
  s.domain = DomainSpec::full(2);
  s.known_limit_sets = {eq_spec(vec2(1.0, 0.0), "stable equilibrium (1,0)"),
                        eq_spec(vec2(-1.0, 0.0), "stable equilibrium (-1,0)"),
                        eq_spec(vec2(0.0, 0.0), "saddle (0,0)")};
  s.default_box = Box::of({-2.0, -2.0}, {2.0, 2.0});
  s.notes = "unforced Duffing oscillator with damping 0.5";
  return s;
}

SystemDef make_vanderpol() {
  SystemDef s;
  s.name = "vanderpol";
  s.dim = 2;
  s.vector_field = [](const Vec& x, Vec& dx) {
    dx[0] = x[1] - x[0] * x[0] * x[0] + x[0];
    dx[1] = -x[0];
  };
  s.domain = DomainSpec::full(2);
  {
    LimitSetSpec cycle;
    cycle.kind = LimitSetSpec::Kind::periodic_orbit;
    cycle.witness = vec2(2.0, 0.0);
    cycle.label = "stable limit cycle";
    s.known_limit_sets = {eq_spec(vec2(0.0, 0.0), "unstable equilibrium (0,0)"),
                          cycle};
  }
  s.default_box = Box::of({-3.0, -3.0}, {3.0, 3.0});
  s.notes = "Van der Pol oscillator (Lienard form)";
  return s;
}

SystemDef make_lorenz() {
  const LorenzEllipsoid e = lorenz_ellipsoid();
  SystemDef s;
  s.name = "lorenz";
  s.dim = 3;
  s.vector_field = [sigma = e.sigma, b = e.b, r = e.r](const Vec& x, Vec& dx) {
    dx[0] = sigma * (x[1] - x[0]);
    dx[1] = r * x[0] - x[1] - x[0] * x[2];
    dx[2] = x[0] * x[1] - b * x[2];
  };
  {
    Mat shape = Mat::Zero(3, 3);
    shape(0, 0) = e.r / e.level;
    shape(1, 1) = e.sigma / e.level;
    shape(2, 2) = e.sigma / e.level;
    s.domain = DomainSpec::ellipsoid(vec3(0.0, 0.0, 2.0 * e.r), shape);
  }
  const double q = std::sqrt(e.b * (e.r - 1.0));  // sqrt(72)
  {
    LimitSetSpec attractor;
    attractor.kind = LimitSetSpec::Kind::attractor_cloud;
    attractor.witness = vec3(1.0, 1.0, 1.0);
    attractor.label = "Lorenz attractor";
    s.known_limit_sets = {eq_spec(vec3(0.0, 0.0, 0.0), "origin"),
                          eq_spec(vec3(q, q, e.r - 1.0), "C+"),
                          eq_spec(vec3(-q, -q, e.r - 1.0), "C-"), attractor};
  }
  s.default_box = Box::of({-20.0, -25.0, 0.0}, {20.0, 25.0, 50.0});
  s.notes = "Lorenz system, sigma=10, b=8/3, r=28, on an invariant ellipsoid";
  return s;
}

SystemDef make_linear1d(const std::string& name, double rate) {
  SystemDef s;
  s.name = name;
  s.dim = 1;
  s.vector_field = [rate](const Vec& x, Vec& dx) { dx[0] = rate * x[0]; };
  s.domain = DomainSpec::full(1);
  s.closed_form_flow = [rate](double t, const Vec& xi) {
    if (t == 0.0) return xi;
    return vec1(xi[0] * std::exp(rate * t));
  };
  s.known_limit_sets = {eq_spec(vec1(0.0), "equilibrium 0")};
  s.default_box = Box::of({-1.0}, {1.0});
  s.notes = "linear scalar system xdot = " + fmt17(rate) + " x";
  return s;
}

SystemDef make_harmonic2d() {
  SystemDef s;
  s.name = "harmonic2d";
  s.dim = 2;
  s.vector_field = [](const Vec& x, Vec& dx) {
    dx[0] = -x[1];
    dx[1] = x[0];
  };
  s.domain = DomainSpec::full(2);
  s.closed_form_flow = [](double t, const Vec& xi) {
    if (t == 0.0) return xi;
    const double c = std::cos(t), sn = std::sin(t);
    return vec2(c * xi[0] - sn * xi[1], sn * xi[0] + c * xi[1]);
  };
  s.known_limit_sets = {eq_spec(vec2(0.0, 0.0), "center (0,0)")};
  s.default_box = Box::of({-1.0, -1.0}, {1.0, 1.0});
  s.notes =
      "harmonic oscillator; every circle is a closed orbit, only the origin "
      "is listed";
  return s;
}

}  // namespace

LorenzEllipsoid lorenz_ellipsoid() {
  // Level set of V = r x^2 + sigma y^2 + sigma (z - 2r)^2. V decreases outside
  // the small ellipsoid r x^2 + y^2 + b (z - r)^2 = b r^2, where max V is
  // about 3.35e4; level 6.7e4 keeps the sublevel set forward invariant with a
  // factor-two margin.
  return LorenzEllipsoid{10.0, 8.0 / 3.0, 28.0, 6.7e4};
}

double LorenzEllipsoid::value(const Vec& x) const {
  const double dz = x[2] - 2.0 * r;
  return r * x[0] * x[0] + sigma * x[1] * x[1] + sigma * dz * dz;
}

const std::vector<SystemDef>& catalog() {
  static const std::vector<SystemDef> systems = [] {
    std::vector<SystemDef> v;
    v.push_back(make_quadratic1d());
    v.push_back(make_sine1d());
    v.push_back(make_cubic1d());
    v.push_back(make_rational1d());
    v.push_back(make_limit_cycle2d());
    v.push_back(make_duffing());
    v.push_back(make_vanderpol());
    v.push_back(make_lorenz());
    v.push_back(make_linear1d("linear1d_stable", -1.0));
    v.push_back(make_linear1d("linear1d_unstable", 1.0));
    v.push_back(make_linear1d("linear1d_fast", -2.0));
    v.push_back(make_harmonic2d());
    return v;
  }();
  return systems;
}

const SystemDef& find_system(const std::string& name) {
  for (const SystemDef& s : catalog())
    if (s.name == name) return s;
  fail(ErrorCode::unknown_name, "unknown system: " + name);
}

SystemDef reversed_system(const SystemDef& sys) {
  SystemDef r = sys;
  r.name = sys.name + "_reversed";
  r.vector_field = [field = sys.vector_field](const Vec& x, Vec& dx) {
    field(x, dx);
    dx = -dx;
  };
  if (sys.has_closed_form()) {
    r.closed_form_flow = [flow = sys.closed_form_flow](double t, const Vec& xi) {
      return flow(-t, xi);
    };
  }
  // Equilibria survive time reversal; orbit/attractor stability does not.
  r.known_limit_sets.clear();
  for (const LimitSetSpec& spec : sys.known_limit_sets)
    if (spec.kind == LimitSetSpec::Kind::equilibrium)
      r.known_limit_sets.push_back(spec);
  r.notes = "time reversal of " + sys.name;
  return r;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= traj.dim; ++i) out << ",x" << i;
  out << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << fmt17(traj.time_at(k));
    for (int i = 0; i < traj.dim; ++i) out << "," << fmt17(traj.states[k][i]);
    out << "\n";
  }
  return out.str();
}

}  // namespace koop
