// kooplab command-line front end. All computation goes through the C API in
// kooplab.h; this binary only parses flags, assembles the experiment config,
// and reports results.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kooplab.h"

namespace {

using nlohmann::json;

int fail_with_error(kl_status status) {
  json err;
  err["error"] = true;
  err["status"] = static_cast<int>(status);
  err["message"] = kl_last_error();
  std::cerr << err.dump() << "\n";
  return 2;
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::string default_output_dir(const std::string& experiment) {
  if (const char* root = std::getenv("KOOPLAB_OUT"))
    return std::string(root) + "/" + experiment;
  return "out/" + experiment;
}

int run_config(const json& config) {
  char* manifest_json = nullptr;
  const kl_status status = kl_run_experiment(config.dump().c_str(), &manifest_json);
  if (status != KL_OK) return fail_with_error(status);

  const json manifest = json::parse(manifest_json);
  kl_string_free(manifest_json);

  std::cout << "experiment: " << manifest["experiment"].get<std::string>()
            << "\n";
  if (!manifest["system"].get<std::string>().empty())
    std::cout << "system:     " << manifest["system"].get<std::string>() << "\n";
  std::cout << "outputs:\n";
  for (const auto& o : manifest["outputs"])
    std::cout << "  " << o.get<std::string>() << "\n";
  for (const auto& cell : manifest["cells"]) {
    const std::string st = cell["status"].get<std::string>();
    if (st == "PASS" || st == "FAIL")
      std::cout << "[" << st << "] " << cell["name"].get<std::string>() << "  "
                << cell["detail"].get<std::string>() << "\n";
  }
  const bool ok = manifest["ok"].get<bool>();
  std::cout << (ok ? "OK" : "FAILED") << " ("
            << manifest["duration_ms"].get<double>() << " ms)\n";
  return ok ? 0 : 1;
}

int list_systems() {
  const int n = kl_catalog_count();
  char name[128];
  for (int i = 0; i < n; ++i) {
    if (kl_catalog_name(i, name, sizeof(name)) != KL_OK) continue;
    kl_system* sys = nullptr;
    if (kl_system_open(name, &sys) != KL_OK) continue;
    std::printf("%-20s dim=%d%s\n", name, kl_system_dim(sys),
                kl_system_has_closed_form(sys) ? "  (closed-form flow)" : "");
    kl_system_close(sys);
  }
  const int m = kl_immersion_count();
  if (m > 0) std::printf("immersion candidates:\n");
  for (int i = 0; i < m; ++i) {
    if (kl_immersion_name(i, name, sizeof(name)) == KL_OK)
      std::printf("  %s\n", name);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kooplab: linear-immersion and Koopman-embedding laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, output_dir, system_name;
  std::uint64_t seed = 0;
  bool quick = false;
  app.add_option("--config", config_path, "JSON config file (flags override)");
  app.add_option("--out", output_dir, "output directory");
  app.add_option("--seed", seed, "base RNG seed");
  app.add_flag("--quick", quick, "scaled-down grids and sample sizes");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  std::string xi_str, direction = "forward";
  double horizon = 50.0, dt = 1e-3;
  simulate->add_option("--system", system_name, "catalog system")->required();
  auto* xi_opt = simulate->add_option("--xi", xi_str, "initial state x1,x2,...");
  auto* horizon_opt = simulate->add_option("--horizon", horizon, "time horizon");
  auto* dt_opt = simulate->add_option("--dt", dt, "integrator step");
  auto* dir_opt =
      simulate->add_option("--direction", direction, "forward|reversed");

  // limit-sets
  auto* limits = app.add_subcommand("limit-sets", "estimate distinct limit sets");
  int grid_per_axis = 0;
  double settle = 50.0, observe = 20.0;
  limits->add_option("--system", system_name, "catalog system")->required();
  auto* grid_opt = limits->add_option("--grid", grid_per_axis, "seeds per axis");
  auto* settle_opt = limits->add_option("--settle", settle, "settle time");
  auto* observe_opt = limits->add_option("--observe", observe, "observe time");
  auto* ldir_opt = limits->add_option("--direction", direction, "forward|backward");

  // basins
  auto* basins = app.add_subcommand("basins", "label basins of attraction");
  int resolution = 0;
  bool score = false;
  basins->add_option("--system", system_name, "catalog system")->required();
  auto* res_opt = basins->add_option("--resolution", resolution, "cells per axis");
  basins->add_flag("--score", score, "also compute the closed-basin score");
  auto* bdir_opt = basins->add_option("--direction", direction, "forward|backward");

  // verify-immersion
  auto* verify = app.add_subcommand("verify-immersion",
                                    "check F(phi(t,xi)) = e^{At} F(xi)");
  int nxi = 20, nt = 20;
  std::string mode = "auto";
  verify->add_option("--system", system_name, "immersion candidate")->required();
  verify->add_option("--nxi", nxi, "state grid size");
  verify->add_option("--nt", nt, "time grid size");
  verify->add_option("--mode", mode, "auto|integrate");

  // learn
  auto* learn = app.add_subcommand("learn", "fit one dictionary embedding");
  double tau = 0.1;
  int n_pairs = 1000, m_dim = 3, degree = 4;
  learn->add_option("--system", system_name, "catalog system")->required();
  auto* tau_opt = learn->add_option("--tau", tau, "sampling interval");
  auto* n_opt = learn->add_option("--N", n_pairs, "sample pairs");
  auto* m_opt = learn->add_option("--m", m_dim, "embedding dimension");
  auto* deg_opt = learn->add_option("--degree", degree, "monomial degree");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "collapse metric over (tau, N)");
  std::string taus_str, ns_str;
  int n_seeds = 0;
  sweep_cmd->add_option("--system", system_name, "catalog system")->required();
  auto* taus_opt = sweep_cmd->add_option("--taus", taus_str, "tau list t1,t2,...");
  auto* ns_opt = sweep_cmd->add_option("--Ns", ns_str, "N list n1,n2,...");
  auto* seeds_opt = sweep_cmd->add_option("--n-seeds", n_seeds, "seeds per cell");
  auto* sm_opt = sweep_cmd->add_option("--m", m_dim, "embedding dimension");
  auto* sdeg_opt = sweep_cmd->add_option("--degree", degree, "monomial degree");

  // exclusion
  auto* exclusion = app.add_subcommand("exclusion",
                                       "fixed-F best-fit residual vs N");
  std::string candidate = "coordinate:1";
  exclusion->add_option("--system", system_name, "catalog system")->required();
  auto* cand_opt = exclusion->add_option(
      "--candidate", candidate, "immersion name or coordinate:<axis>");
  auto* etau_opt = exclusion->add_option("--tau", tau, "sampling interval");
  auto* ens_opt = exclusion->add_option("--Ns", ns_str, "N list n1,n2,...");

  // reproduce-paper
  auto* reproduce = app.add_subcommand(
      "reproduce-paper", "run the full worked-example suite (PASS/FAIL table)");

  // list-systems
  auto* list_cmd = app.add_subcommand("list-systems", "print the catalog");

  CLI11_PARSE(app, argc, argv);

  if (list_cmd->parsed()) return list_systems();

  json config = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "{\"error\":true,\"message\":\"cannot open config file\"}\n";
      return 2;
    }
    try {
      in >> config;
    } catch (const json::exception& e) {
      json err{{"error", true}, {"message", e.what()}};
      std::cerr << err.dump() << "\n";
      return 2;
    }
  }
  if (!config.contains("params")) config["params"] = json::object();
  json& params = config["params"];

  auto set_if = [](const CLI::Option* opt, auto&& fn) {
    if (opt && opt->count() > 0) fn();
  };

  std::string experiment;
  if (simulate->parsed()) {
    experiment = "simulate";
    set_if(xi_opt, [&] { params["xi"] = parse_csv_doubles(xi_str); });
    set_if(horizon_opt, [&] { params["horizon"] = horizon; });
    set_if(dt_opt, [&] { params["dt"] = dt; });
    set_if(dir_opt, [&] { params["direction"] = direction; });
  } else if (limits->parsed()) {
    experiment = "limit-sets";
    set_if(grid_opt, [&] { params["grid_per_axis"] = grid_per_axis; });
    set_if(settle_opt, [&] { params["settle"] = settle; });
    set_if(observe_opt, [&] { params["observe"] = observe; });
    set_if(ldir_opt, [&] { params["direction"] = direction; });
  } else if (basins->parsed()) {
    experiment = "basins";
    set_if(res_opt, [&] { params["resolution"] = resolution; });
    if (score) params["score"] = true;
    set_if(bdir_opt, [&] { params["direction"] = direction; });
  } else if (verify->parsed()) {
    experiment = "verify-immersion";
    params["nxi"] = nxi;
    params["nt"] = nt;
    params["mode"] = mode;
  } else if (learn->parsed()) {
    experiment = "learn";
    set_if(tau_opt, [&] { params["tau"] = tau; });
    set_if(n_opt, [&] { params["N"] = n_pairs; });
    set_if(m_opt, [&] { params["m"] = m_dim; });
    set_if(deg_opt, [&] {
      params["dictionary"] = {{"kind", "monomials"}, {"degree", degree}};
    });
  } else if (sweep_cmd->parsed()) {
    experiment = "sweep";
    set_if(taus_opt, [&] { params["tau_list"] = parse_csv_doubles(taus_str); });
    set_if(ns_opt, [&] {
      json ns = json::array();
      for (double v : parse_csv_doubles(ns_str)) ns.push_back(static_cast<long long>(v));
      params["N_list"] = ns;
    });
    set_if(seeds_opt, [&] { params["n_seeds"] = n_seeds; });
    set_if(sm_opt, [&] { params["m"] = m_dim; });
    set_if(sdeg_opt, [&] {
      params["dictionary"] = {{"kind", "monomials"}, {"degree", degree}};
    });
  } else if (exclusion->parsed()) {
    experiment = "exclusion";
    set_if(cand_opt, [&] { params["candidate"] = candidate; });
    set_if(etau_opt, [&] { params["tau"] = tau; });
    set_if(ens_opt, [&] {
      json ns = json::array();
      for (double v : parse_csv_doubles(ns_str)) ns.push_back(static_cast<long long>(v));
      params["N_list"] = ns;
    });
  } else if (reproduce->parsed()) {
    experiment = "reproduce-paper";
  }

  config["experiment"] = experiment;
  if (!system_name.empty()) config["system"] = system_name;
  if (app.count("--seed") > 0 || !config.contains("seed")) config["seed"] = seed;
  if (quick) config["quick"] = true;
  if (app.count("--out") > 0 || !config.contains("output_dir"))
    config["output_dir"] =
        output_dir.empty() ? default_output_dir(experiment) : output_dir;

  return run_config(config);
}
