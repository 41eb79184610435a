#include "core/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <sstream>

#include "core/error.hpp"
#include "core/immersion.hpp"
#include "core/io.hpp"
#include "core/learning.hpp"
#include "core/limitset.hpp"
#include "core/rng.hpp"
#include "core/svg.hpp"
#include "core/system.hpp"

namespace koop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> names = {
      "simulate", "limit-sets", "basins",    "verify-immersion",
      "learn",    "sweep",      "exclusion", "reproduce-paper"};
  return names;
}

Vec parse_vec(const json& j) {
  if (!j.is_array() || j.empty())
    fail(ErrorCode::invalid_argument, "expected a nonempty numeric array");
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

Box parse_box(const json& j) {
  if (!j.contains("lo") || !j.contains("hi"))
    fail(ErrorCode::invalid_argument, "box needs lo and hi arrays");
  Box b;
  b.lo = parse_vec(j["lo"]);
  b.hi = parse_vec(j["hi"]);
  if (b.lo.size() != b.hi.size())
    fail(ErrorCode::invalid_argument, "box lo/hi dimension mismatch");
  return b;
}

Box box_or_default(const json& params, const SystemDef& sys) {
  if (params.contains("box")) return parse_box(params["box"]);
  return sys.default_box;
}

Dictionary dictionary_from_json(const json& j, const Box& box) {
  const std::string kind = j.value("kind", "monomials");
  if (kind == "monomials") {
    return Dictionary::monomials(box.dim(), j.value("degree", 4));
  }
  if (kind == "gaussian_rbf") {
    const int per_axis = j.value("per_axis", 4);
    if (per_axis < 1) fail(ErrorCode::invalid_argument, "per_axis must be >= 1");
    const double width = j.value("width", 0.8);
    std::vector<Vec> centers;
    std::vector<int> idx(static_cast<std::size_t>(box.dim()), 0);
    while (true) {
      Vec c(box.dim());
      for (int d = 0; d < box.dim(); ++d) {
        const double frac = per_axis == 1
                                ? 0.5
                                : static_cast<double>(idx[static_cast<std::size_t>(d)]) /
                                      (per_axis - 1);
        c[d] = box.lo[d] + frac * (box.hi[d] - box.lo[d]);
      }
      centers.push_back(std::move(c));
      int d = 0;
      for (; d < box.dim(); ++d) {
        if (++idx[static_cast<std::size_t>(d)] < per_axis) break;
        idx[static_cast<std::size_t>(d)] = 0;
      }
      if (d == box.dim()) break;
    }
    return Dictionary::gaussian_rbf(std::move(centers), width);
  }
  fail(ErrorCode::invalid_argument, "unknown dictionary kind: " + kind);
}

std::vector<std::uint64_t> seeds_from_params(const json& params,
                                             std::uint64_t base, int def_n) {
  std::vector<std::uint64_t> seeds;
  if (params.contains("seeds")) {
    for (const auto& s : params["seeds"]) seeds.push_back(s.get<std::uint64_t>());
  } else {
    const int n = params.value("n_seeds", def_n);
    if (n < 1) fail(ErrorCode::invalid_argument, "n_seeds must be >= 1");
    for (int i = 0; i < n; ++i)
      seeds.push_back(mix_seed(base, static_cast<std::uint64_t>(i)));
  }
  return seeds;
}

std::vector<Vec> seed_grid(const SystemDef& sys, const Box& box, int per_axis) {
  std::vector<std::vector<double>> axes;
  for (int d = 0; d < sys.dim; ++d)
    axes.push_back(linspace(box.lo[d], box.hi[d], per_axis));
  std::vector<Vec> seeds;
  std::vector<int> idx(static_cast<std::size_t>(sys.dim), 0);
  while (true) {
    Vec s(sys.dim);
    for (int d = 0; d < sys.dim; ++d)
      s[d] = axes[static_cast<std::size_t>(d)][static_cast<std::size_t>(
          idx[static_cast<std::size_t>(d)])];
    seeds.push_back(std::move(s));
    int d = 0;
    for (; d < sys.dim; ++d) {
      if (++idx[static_cast<std::size_t>(d)] < per_axis) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
    if (d == sys.dim) break;
  }
  return seeds;
}

int default_grid_per_axis(int dim) { return dim == 1 ? 21 : (dim == 2 ? 5 : 3); }

json limit_set_json(const LimitSet& ls) {
  json j;
  j["kind"] = limit_set_kind_name(ls.kind);
  j["direction"] = ls.direction == Direction::forward ? "forward" : "backward";
  j["source_state"] = std::vector<double>(
      ls.source_state.data(), ls.source_state.data() + ls.source_state.size());
  if (ls.period_estimate) j["period_estimate"] = *ls.period_estimate;
  auto& reps = j["representatives"] = json::array();
  for (const Vec& r : ls.representatives)
    reps.push_back(std::vector<double>(r.data(), r.data() + r.size()));
  return j;
}

struct Writer {
  fs::path root;
  RunManifest* manifest;
  void operator()(const std::string& rel, const std::string& content) const {
    atomic_write_file(root / rel, content);
    manifest->outputs.push_back(rel);
  }
};

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  if (!j.is_object() || !j.contains("experiment"))
    fail(ErrorCode::invalid_argument, "config must name an experiment");
  cfg.experiment = j["experiment"].get<std::string>();
  cfg.system = j.value("system", "");
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.quick = j.value("quick", false);
  cfg.output_dir = j.value("output_dir", "out");
  cfg.params = j.value("params", json::object());
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["system"] = system;
  j["seed"] = seed;
  j["quick"] = quick;
  j["output_dir"] = output_dir;
  j["params"] = params;
  j["schema_version"] = 1;
  return j;
}

void ExperimentConfig::validate() const {
  bool known = false;
  for (const std::string& e : known_experiments()) known |= (e == experiment);
  if (!known) fail(ErrorCode::invalid_argument, "unknown experiment: " + experiment);
  if (experiment != "reproduce-paper") {
    if (system.empty())
      fail(ErrorCode::invalid_argument, "experiment requires a system name");
    find_system(system);  // throws unknown_name
  }
  if (params.contains("tau") && !(params["tau"].get<double>() > 0))
    fail(ErrorCode::invalid_argument, "tau must be > 0");
  if (params.contains("tau_list"))
    for (const auto& t : params["tau_list"])
      if (!(t.get<double>() > 0))
        fail(ErrorCode::invalid_argument, "tau must be > 0");
  if (params.contains("N") && params["N"].get<long long>() <= 0)
    fail(ErrorCode::invalid_argument, "N must be > 0");
  if (params.contains("N_list"))
    for (const auto& n : params["N_list"])
      if (n.get<long long>() <= 0)
        fail(ErrorCode::invalid_argument, "N must be > 0");
  if (params.contains("resolution") && params["resolution"].get<long long>() < 1)
    fail(ErrorCode::invalid_argument, "resolution must be >= 1");
  if (params.contains("dt") && !(params["dt"].get<double>() > 0))
    fail(ErrorCode::invalid_argument, "dt must be > 0");
  if (params.contains("horizon") && !(params["horizon"].get<double>() >= 0))
    fail(ErrorCode::invalid_argument, "horizon must be >= 0");
}

json RunManifest::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["experiment"] = experiment;
  j["system"] = system;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["duration_ms"] = duration_ms;
  j["ok"] = ok;
  j["outputs"] = outputs;
  auto& cells = j["cells"] = json::array();
  for (const CellStatus& c : this->cells)
    cells.push_back({{"name", c.name}, {"status", c.status}, {"detail", c.detail}});
  return j;
}

std::string config_hash(const json& canonical) {
  // FNV-1a 64 over the canonical (sorted-key) dump.
  const std::string s = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void run_simulate(const ExperimentConfig& cfg, const Writer& write,
                  RunManifest& manifest) {
  const SystemDef& sys = find_system(cfg.system);
  Vec xi;
  if (cfg.params.contains("xi")) {
    xi = parse_vec(cfg.params["xi"]);
  } else {
    xi = 0.5 * (sys.default_box.lo + sys.default_box.hi) +
         0.1 * (sys.default_box.hi - sys.default_box.lo);
  }
  const double horizon = cfg.params.value("horizon", 50.0);
  const double dt = cfg.params.value("dt", 1e-3);
  const Direction dir = cfg.params.value("direction", "forward") == "reversed"
                            ? Direction::reversed
                            : Direction::forward;
  const Trajectory traj = integrate(sys, xi, horizon, dt, dir);
  write("trajectory.csv", trajectory_csv(traj));
  if (sys.dim == 1) {
    write("trajectory.svg", render_timeseries(traj));
  } else {
    PhasePlotSpec spec;
    spec.view = box_or_default(cfg.params, sys);
    if (sys.dim == 3) {
      spec.projection = {0, 2};
      Box view;
      view.lo = Vec(2);
      view.hi = Vec(2);
      view.lo << sys.default_box.lo[0], sys.default_box.lo[2];
      view.hi << sys.default_box.hi[0], sys.default_box.hi[2];
      spec.view = view;
      spec.field_grid = 0;  // projected fields are not meaningful
    }
    if (cfg.params.contains("projection")) {
      spec.projection = {cfg.params["projection"][0].get<int>(),
                         cfg.params["projection"][1].get<int>()};
    }
    write("phase.svg", render_phase_plot(sys, {traj}, spec));
  }
  manifest.cells.push_back(
      {"simulate", "ok",
       traj.exited_domain ? "trajectory truncated at domain exit"
                          : "final state " + fmt17(traj.last()[0])});
}

LimitParams limit_params_from(const json& params) {
  LimitParams p;
  p.settle = params.value("settle", p.settle);
  p.observe = params.value("observe", p.observe);
  p.dt = params.value("dt", p.dt);
  p.tol_eq = params.value("tol_eq", p.tol_eq);
  p.merge_tol = params.value("merge_tol", p.merge_tol);
  p.tol_orbit = params.value("tol_orbit", p.tol_orbit);
  p.norm_bound = params.value("norm_bound", p.norm_bound);
  return p;
}

void run_limit_sets(const ExperimentConfig& cfg, const Writer& write,
                    RunManifest& manifest) {
  const SystemDef& sys = find_system(cfg.system);
  const Box box = box_or_default(cfg.params, sys);
  const LimitParams p = limit_params_from(cfg.params);
  const Direction dir = cfg.params.value("direction", "forward") == "backward"
                            ? Direction::reversed
                            : Direction::forward;
  std::vector<Vec> seeds;
  if (cfg.params.contains("seeds")) {
    for (const auto& s : cfg.params["seeds"]) seeds.push_back(parse_vec(s));
  } else {
    const int per_axis =
        cfg.params.value("grid_per_axis", default_grid_per_axis(sys.dim));
    seeds = seed_grid(sys, box, per_axis);
  }
  const std::vector<LimitSet> sets = catalog_limit_sets(sys, seeds, p, dir);
  json j;
  j["schema_version"] = 1;
  j["system"] = sys.name;
  auto& arr = j["limit_sets"] = json::array();
  for (const LimitSet& ls : sets) arr.push_back(limit_set_json(ls));
  write("limit_sets.json", j.dump(2) + "\n");
  manifest.cells.push_back({"limit-sets", "ok",
                            std::to_string(sets.size()) + " distinct sets"});
}

void run_basins(const ExperimentConfig& cfg, const Writer& write,
                RunManifest& manifest) {
  const SystemDef& sys = find_system(cfg.system);
  const Box box = box_or_default(cfg.params, sys);
  LimitParams p = limit_params_from(cfg.params);
  if (!cfg.params.contains("dt")) p.dt = 1e-2;  // labeling default
  const Direction dir = cfg.params.value("direction", "forward") == "backward"
                            ? Direction::reversed
                            : Direction::forward;
  const int def_res = cfg.quick ? 41 : 101;
  const int res = cfg.params.value("resolution", def_res);
  const int per_axis =
      cfg.params.value("grid_per_axis", default_grid_per_axis(sys.dim));
  const std::vector<LimitSet> targets =
      catalog_limit_sets(sys, seed_grid(sys, box, per_axis), p, dir);
  const BasinMap map = label_basins(
      sys, box, std::vector<int>(static_cast<std::size_t>(sys.dim), res),
      targets, p, dir);
  write("basins.csv", basin_csv(map));
  if (sys.dim == 2) write("basins.svg", render_basin_heatmap(map));
  if (cfg.params.value("score", false)) {
    const ClosedBasinReport score = closed_basin_score(sys, map, p);
    json j;
    j["schema_version"] = 1;
    auto& arr = j["stats"] = json::array();
    for (const BasinBoundaryStat& s : score.stats) {
      arr.push_back({{"limit_set", s.limit_set},
                     {"boundary_edges", s.boundary_edges},
                     {"closed_like", s.closed_like},
                     {"open_to_neighbor", s.open_to_neighbor},
                     {"open_to_third", s.open_to_third},
                     {"closed_fraction", s.closed_fraction()}});
    }
    write("basin_score.json", j.dump(2) + "\n");
  }
  manifest.cells.push_back(
      {"basins", "ok", std::to_string(targets.size()) + " target sets"});
}

void run_verify_immersion(const ExperimentConfig& cfg, const Writer& write,
                          RunManifest& manifest) {
  const ImmersionCandidate& cand = find_immersion(cfg.system);
  const int nxi = cfg.params.value("nxi", 20);
  const int nt = cfg.params.value("nt", 20);
  const double dt = cfg.params.value("dt", 1e-3);
  const FlowMode mode = cfg.params.value("mode", "auto") == "integrate"
                            ? FlowMode::integrate_only
                            : FlowMode::prefer_closed_form;
  std::vector<Vec> xi_grid;
  std::vector<double> t_grid;
  default_verification_grid(cand, nxi, nt, xi_grid, t_grid);
  const ImmersionResidualReport report =
      verify_immersion(cand, xi_grid, t_grid, dt, mode);
  write("residuals.csv", residual_report_csv(report));
  write("residual_report.json", residual_report_json(report));
  manifest.cells.push_back({"verify-immersion", "ok",
                            "max residual " + fmt17(report.max_residual)});
}

void run_learn(const ExperimentConfig& cfg, const Writer& write,
               RunManifest& manifest) {
  const SystemDef& sys = find_system(cfg.system);
  const Box box = box_or_default(cfg.params, sys);
  const Dictionary dict =
      dictionary_from_json(cfg.params.value("dictionary", json::object()), box);
  const int m = cfg.params.value("m", 3);
  const double tau = cfg.params.value("tau", 0.1);
  const int n = cfg.params.value("N", cfg.quick ? 200 : 1000);
  const double dt = cfg.params.value("dt", 1e-3);
  const SamplePairs pairs = sample_pairs(sys, box, n, tau, cfg.seed, dt);
  const LearnedEmbedding emb = fit_embedding(pairs, dict, m);
  write("embedding.json", embedding_json(emb));
  manifest.cells.push_back(
      {"learn", "ok", "fit residual " + fmt17(emb.fit_residual)});
}

void run_sweep(const ExperimentConfig& cfg, const Writer& write,
               RunManifest& manifest) {
  const SystemDef& sys = find_system(cfg.system);
  const Box box = box_or_default(cfg.params, sys);
  const Dictionary dict =
      dictionary_from_json(cfg.params.value("dictionary", json::object()), box);
  const int m = cfg.params.value("m", 5);
  std::vector<double> taus;
  if (cfg.params.contains("tau_list"))
    for (const auto& t : cfg.params["tau_list"]) taus.push_back(t.get<double>());
  else
    taus = {0.01, 0.1};
  std::vector<int> ns;
  if (cfg.params.contains("N_list"))
    for (const auto& n : cfg.params["N_list"]) ns.push_back(n.get<int>());
  else if (cfg.quick)
    ns = {100, 1000};
  else
    ns = {100, 1000, 10000};
  const std::vector<std::uint64_t> seeds =
      seeds_from_params(cfg.params, cfg.seed, cfg.quick ? 2 : 5);
  const CollapseReport report = sweep(sys, dict, m, taus, ns, seeds, box);
  write("sweep.csv", collapse_report_csv(report));
  write("sweep.json", collapse_report_json(report));
  for (const CollapseCell& c : report.cells) {
    std::ostringstream name;
    name << "tau=" << fmt17(c.tau) << ",N=" << c.n << ",seed=" << c.seed;
    manifest.cells.push_back({name.str(), c.status,
                              "metric " + fmt17(c.collapse_metric)});
    if (c.status.rfind("failed", 0) == 0) manifest.ok = false;
  }
}

void run_exclusion(const ExperimentConfig& cfg, const Writer& write,
                   RunManifest& manifest) {
  const SystemDef& sys = find_system(cfg.system);
  const Box box = box_or_default(cfg.params, sys);
  const std::string cand_name = cfg.params.value("candidate", "coordinate:1");
  ImmersionCandidate cand;
  if (cand_name.rfind("coordinate:", 0) == 0) {
    cand = coordinate_immersion(sys, std::stoi(cand_name.substr(11)) - 1);
  } else {
    cand = find_immersion(cand_name);
    if (cand.source_system != sys.name)
      fail(ErrorCode::invalid_argument,
           "candidate " + cand_name + " does not belong to " + sys.name);
  }
  const double tau = cfg.params.value("tau", 0.1);
  std::vector<int> ns;
  if (cfg.params.contains("N_list"))
    for (const auto& n : cfg.params["N_list"]) ns.push_back(n.get<int>());
  else if (cfg.quick)
    ns = {100, 1000};
  else
    ns = {100, 1000, 10000};
  const std::vector<std::uint64_t> seeds =
      seeds_from_params(cfg.params, cfg.seed, cfg.quick ? 2 : 3);
  const ExclusionReport report =
      exclusion_test(sys, cand, tau, ns, box, seeds);
  write("exclusion.csv", exclusion_report_csv(report));
  write("exclusion.json", exclusion_report_json(report));
  manifest.cells.push_back(
      {"exclusion", "ok",
       std::string("distinguishes=") +
           (report.distinguishes_limit_sets ? "true" : "false")});
}

}  // namespace

RunManifest run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  RunManifest manifest;
  manifest.experiment = config.experiment;
  manifest.system = config.system;
  manifest.version = KOOPLAB_VERSION;
  manifest.config_hash = config_hash(config.to_json());

  if (config.experiment == "reproduce-paper") {
    RunManifest suite =
        reproduce_paper_suite(config.output_dir, config.quick, config.seed);
    suite.config_hash = manifest.config_hash;
    return suite;
  }

  fs::create_directories(config.output_dir);
  Writer write{fs::path(config.output_dir), &manifest};

  if (config.experiment == "simulate") {
    run_simulate(config, write, manifest);
  } else if (config.experiment == "limit-sets") {
    run_limit_sets(config, write, manifest);
  } else if (config.experiment == "basins") {
    run_basins(config, write, manifest);
  } else if (config.experiment == "verify-immersion") {
    run_verify_immersion(config, write, manifest);
  } else if (config.experiment == "learn") {
    run_learn(config, write, manifest);
  } else if (config.experiment == "sweep") {
    run_sweep(config, write, manifest);
  } else if (config.experiment == "exclusion") {
    run_exclusion(config, write, manifest);
  }

  for (const std::string& rel : manifest.outputs) {
    std::error_code ec;
    const auto size = fs::file_size(fs::path(config.output_dir) / rel, ec);
    if (ec || size == 0)
      fail(ErrorCode::io_error, "output missing or empty: " + rel);
  }

  manifest.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();
  atomic_write_file(fs::path(config.output_dir) / "manifest.json",
                    manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace koop
