#include "core/immersion.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/rng.hpp"

namespace koop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string point_str(const Vec& x) {
  std::string s = "(";
  for (int i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += fmt17(x[i]);
  }
  return s + ")";
}

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
}  // namespace

Vec ImmersionCandidate::eval(const Vec& x) const {
  if (!domain.contains(x))
    fail(ErrorCode::domain_violation,
         "F of " + name + " undefined at " + point_str(x));
  Vec out = map(x);
  if (!out.allFinite())
    fail(ErrorCode::domain_violation,
         "F of " + name + " non-finite at " + point_str(x));
  return out;
}

namespace {

ImmersionCandidate make_quadratic1d() {
  ImmersionCandidate c;
  c.name = "quadratic1d";
  c.source_system = "quadratic1d";
  c.source_dim = 1;
  c.target_dim = 1;
  c.map = [](const Vec& x) { return vec1((x[0] + 1.0) / (x[0] - 1.0)); };
  c.generator = Mat::Constant(1, 1, -2.0);
  c.domain = DomainSpec::box_minus(Box::of({-kInf}, {1.0}), {vec1(1.0)});
  c.continuity = ImmersionCandidate::Continuity::continuous;
  c.injective_claim = ImmersionCandidate::Injectivity::yes;
  return c;
}

ImmersionCandidate make_sine1d() {
  ImmersionCandidate c;
  c.name = "sine1d";
  c.source_system = "sine1d";
  c.source_dim = 1;
  c.target_dim = 1;
  c.map = [](const Vec& x) {
    const double y = std::cos(x[0]);
    return vec1((y + 1.0) / (y - 1.0));
  };
  c.generator = Mat::Constant(1, 1, -2.0);
  c.domain = DomainSpec::box_minus(Box::of({0.0}, {M_PI}), {vec1(0.0)});
  c.continuity = ImmersionCandidate::Continuity::continuous;
  c.injective_claim = ImmersionCandidate::Injectivity::yes;
  return c;
}

ImmersionCandidate make_cubic1d() {
  ImmersionCandidate c;
  c.name = "cubic1d";
  c.source_system = "cubic1d";
  c.source_dim = 1;
  c.target_dim = 1;
  c.map = [](const Vec& x) { return vec1(1.0 / (x[0] * x[0]) - 1.0); };
  c.generator = Mat::Constant(1, 1, -2.0);
  c.domain = DomainSpec::box_minus(Box::of({-kInf}, {kInf}), {vec1(0.0)});
  c.continuity = ImmersionCandidate::Continuity::continuous;
  // F is even, so it cannot be one-to-one across the two half-lines.
  c.injective_claim = ImmersionCandidate::Injectivity::no;
  return c;
}

ImmersionCandidate make_limit_cycle2d() {
  ImmersionCandidate c;
  c.name = "limit_cycle2d";
  c.source_system = "limit_cycle2d";
  c.source_dim = 2;
  c.target_dim = 3;
  c.map = [](const Vec& x) {
    const double r = x.norm();
    Vec out(3);
    out << x[0] / r, x[1] / r, 1.0 / (r * r) - 1.0;
    return out;
  };
  c.generator = Mat::Zero(3, 3);
  c.generator(0, 1) = -1.0;
  c.generator(1, 0) = 1.0;
  c.generator(2, 2) = -2.0;
  c.domain = DomainSpec::box_minus(Box::of({-kInf, -kInf}, {kInf, kInf}),
                                   {vec2(0.0, 0.0)});
  c.continuity = ImmersionCandidate::Continuity::continuous;
  c.injective_claim = ImmersionCandidate::Injectivity::yes;
  return c;
}

ImmersionCandidate make_rational1d() {
  ImmersionCandidate c;
  c.name = "rational1d";
  c.source_system = "rational1d";
  c.source_dim = 1;
  c.target_dim = 2;
  c.map = [](const Vec& x) {
    const double v = x[0];
    // Branch index by strict sign tests against the equilibria {-1, 0, 1};
    // exactly at an equilibrium the map is (x, 0).
    if (v == -1.0 || v == 0.0 || v == 1.0) return vec2(v, 0.0);
    double branch;
    if (v < -1.0)
      branch = 1.0;
    else if (v < 0.0)
      branch = 2.0;
    else if (v < 1.0)
      branch = 3.0;
    else
      branch = 4.0;
    const double core = std::log(std::abs(3.0 * v / (-2.0 + 2.0 * v * v)));
    return vec2(branch * core, branch);
  };
  c.generator = Mat::Zero(2, 2);
  c.generator(0, 1) = 1.0;  // udot = v, vdot = 0
  c.domain = DomainSpec::full(1);
  c.continuity = ImmersionCandidate::Continuity::discontinuous;
  c.injective_claim = ImmersionCandidate::Injectivity::yes;
  return c;
}

}  // namespace

const std::vector<ImmersionCandidate>& exact_catalog() {
  static const std::vector<ImmersionCandidate> candidates = [] {
    std::vector<ImmersionCandidate> v;
    v.push_back(make_quadratic1d());
    v.push_back(make_sine1d());
    v.push_back(make_cubic1d());
    v.push_back(make_limit_cycle2d());
    v.push_back(make_rational1d());
    return v;
  }();
  return candidates;
}

const ImmersionCandidate& find_immersion(const std::string& name) {
  for (const ImmersionCandidate& c : exact_catalog())
    if (c.name == name) return c;
  fail(ErrorCode::unknown_name, "unknown immersion candidate: " + name);
}

ImmersionCandidate coordinate_immersion(const SystemDef& sys, int axis) {
  if (axis < 0 || axis >= sys.dim)
    fail(ErrorCode::invalid_argument, "coordinate axis out of range");
  ImmersionCandidate c;
  c.name = sys.name + "_coordinate_" + std::to_string(axis + 1);
  c.source_system = sys.name;
  c.source_dim = sys.dim;
  c.target_dim = 1;
  c.map = [axis](const Vec& x) { return vec1(x[axis]); };
  c.generator = Mat::Zero(1, 1);
  c.domain = sys.domain;
  c.continuity = ImmersionCandidate::Continuity::continuous;
  c.injective_claim = sys.dim == 1 ? ImmersionCandidate::Injectivity::yes
                                   : ImmersionCandidate::Injectivity::no;
  return c;
}

ImmersionResidualReport verify_immersion(const ImmersionCandidate& cand,
                                         const std::vector<Vec>& xi_grid,
                                         const std::vector<double>& t_grid,
                                         double dt, FlowMode mode) {
  if (xi_grid.empty() || t_grid.empty())
    fail(ErrorCode::invalid_argument, "verification grids must be nonempty");
  const SystemDef& sys = find_system(cand.source_system);

  std::vector<Mat> propagators;
  propagators.reserve(t_grid.size());
  for (double t : t_grid) propagators.push_back(expm(cand.generator * t));

  ImmersionResidualReport report;
  report.candidate = cand.name;
  {
    std::ostringstream g;
    g << xi_grid.size() << "x" << t_grid.size() << " grid, t in ["
      << fmt17(t_grid.front()) << ", " << fmt17(t_grid.back()) << "]";
    report.grid_spec = g.str();
  }
  report.samples.reserve(xi_grid.size() * t_grid.size());

  for (const Vec& xi : xi_grid) {
    const Vec f_xi = cand.eval(xi);
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      const double t = t_grid[ti];
      const Vec x_t = flow_sample(sys, xi, t, dt, mode);
      const Vec lhs = cand.eval(x_t);
      const Vec rhs = propagators[ti] * f_xi;
      ImmersionSample s;
      s.xi = xi;
      s.t = t;
      s.residual = (lhs - rhs).norm();
      report.max_residual = std::max(report.max_residual, s.residual);
      report.samples.push_back(std::move(s));
    }
  }
  return report;
}

void default_verification_grid(const ImmersionCandidate& cand, int nxi, int nt,
                               std::vector<Vec>& xi_grid,
                               std::vector<double>& t_grid) {
  xi_grid.clear();
  t_grid = linspace(0.0, 5.0, nt);
  if (cand.name == "quadratic1d") {
    for (double x : linspace(-3.0, 0.9, nxi)) xi_grid.push_back(vec1(x));
  } else if (cand.name == "sine1d") {
    for (double x : linspace(0.1, M_PI, nxi)) xi_grid.push_back(vec1(x));
  } else if (cand.name == "cubic1d") {
    for (double x : linspace(0.2, 3.0, nxi)) xi_grid.push_back(vec1(x));
  } else if (cand.name == "limit_cycle2d") {
    const double radii[] = {0.5, 1.0, 1.5, 2.0};
    for (int i = 0; i < nxi; ++i) {
      const double r = radii[i % 4];
      const double th = 2.0 * M_PI * static_cast<double>(i) / nxi;
      xi_grid.push_back(vec2(r * std::cos(th), r * std::sin(th)));
    }
  } else if (cand.name == "rational1d") {
    // Single branch interval (0, 1); trajectories never cross equilibria and
    // residuals across branches are meaningless.
    for (double x : linspace(0.05, 0.95, nxi)) xi_grid.push_back(vec1(x));
  } else {
    fail(ErrorCode::unknown_name, "no default grid for " + cand.name);
  }
}

std::string residual_report_csv(const ImmersionResidualReport& report) {
  std::ostringstream out;
  const int dim = report.samples.empty()
                      ? 0
                      : static_cast<int>(report.samples.front().xi.size());
  for (int i = 1; i <= dim; ++i) out << "xi" << i << ",";
  out << "t,residual\n";
  for (const ImmersionSample& s : report.samples) {
    for (int i = 0; i < dim; ++i) out << fmt17(s.xi[i]) << ",";
    out << fmt17(s.t) << "," << fmt17(s.residual) << "\n";
  }
  return out.str();
}

std::string residual_report_json(const ImmersionResidualReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["candidate"] = report.candidate;
  j["grid_spec"] = report.grid_spec;
  j["max_residual"] = report.max_residual;
  auto& samples = j["samples"] = nlohmann::json::array();
  for (const ImmersionSample& s : report.samples) {
    samples.push_back(
        {{"xi", std::vector<double>(s.xi.data(), s.xi.data() + s.xi.size())},
         {"t", s.t},
         {"residual", s.residual}});
  }
  return j.dump(2) + "\n";
}

InjectivityProbeResult injectivity_probe(const ImmersionCandidate& cand,
                                         const Box& box, int samples,
                                         std::uint64_t seed,
                                         double collision_tol,
                                         double exclusion_radius) {
  if (samples < 2) fail(ErrorCode::invalid_argument, "samples must be >= 2");
  if (!(collision_tol > 0))
    fail(ErrorCode::invalid_argument, "collision_tol must be positive");

  Rng rng(seed);
  std::vector<Vec> pts;
  std::vector<Vec> images;
  pts.reserve(static_cast<std::size_t>(samples));
  long attempts = 0;
  const long max_attempts = 1000L * samples;
  while (static_cast<int>(pts.size()) < samples && attempts < max_attempts) {
    ++attempts;
    Vec x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
    if (!cand.domain.contains(x)) continue;
    if (exclusion_radius > 0.0) {
      bool near = false;
      for (const Vec& p : cand.domain.excluded)
        if ((x - p).norm() < exclusion_radius) near = true;
      if (near) continue;
    }
    images.push_back(cand.eval(x));
    pts.push_back(std::move(x));
  }
  if (static_cast<int>(pts.size()) < samples)
    fail(ErrorCode::empty_domain, "sampling box misses the immersion domain");

  InjectivityProbeResult result;
  const double min_sep = 100.0 * collision_tol;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if ((images[i] - images[j]).norm() <= collision_tol &&
          (pts[i] - pts[j]).norm() >= min_sep) {
        result.collision_found = true;
        result.xi1 = pts[i];
        result.xi2 = pts[j];
        return result;
      }
    }
  }
  return result;
}

CollapseWitness collapse_witness(const ImmersionCandidate& cand,
                                 const std::vector<LimitSet>& limit_sets) {
  if (limit_sets.empty())
    fail(ErrorCode::invalid_argument, "no limit sets given");
  std::vector<std::vector<Vec>> images(limit_sets.size());
  for (std::size_t i = 0; i < limit_sets.size(); ++i) {
    for (const Vec& rep : limit_sets[i].representatives)
      images[i].push_back(cand.eval(rep));
  }
  CollapseWitness w;
  const auto n = static_cast<Eigen::Index>(limit_sets.size());
  w.distances = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = hausdorff(images[static_cast<std::size_t>(i)],
                                 images[static_cast<std::size_t>(j)]);
      w.distances(i, j) = d;
      w.distances(j, i) = d;
      w.max_distance = std::max(w.max_distance, d);
    }
  }
  return w;
}

std::vector<LimitSet> filter_to_domain(const std::vector<LimitSet>& sets,
                                       const DomainSpec& domain) {
  std::vector<LimitSet> out;
  for (const LimitSet& s : sets) {
    bool inside = !s.representatives.empty();
    for (const Vec& rep : s.representatives)
      if (!domain.contains(rep)) inside = false;
    if (inside) out.push_back(s);
  }
  return out;
}

}  // namespace koop
