// Experiment front end: validated configs, the dispatcher that writes CSV /
// JSON / SVG artifacts plus a run manifest, and the one-command suite that
// re-checks every worked example.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace koop {

struct ExperimentConfig {
  std::string experiment;  // simulate | limit-sets | basins | verify-immersion
                           // | learn | sweep | exclusion | reproduce-paper
  std::string system;      // catalog name (empty for reproduce-paper)
  std::uint64_t seed = 0;
  bool quick = false;
  std::string output_dir = "out";
  nlohmann::json params = nlohmann::json::object();

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Structural validation; throws before any computation starts.
  void validate() const;
};

struct CellStatus {
  std::string name;
  std::string status;  // PASS / FAIL / ok / failed: ...
  std::string detail;
};

struct RunManifest {
  std::string experiment;
  std::string system;
  std::string config_hash;
  std::string version;
  double duration_ms = 0.0;
  bool ok = true;
  std::vector<std::string> outputs;  // files written, relative to output_dir
  std::vector<CellStatus> cells;

  nlohmann::json to_json() const;
};

// Executes the configured experiment, writes its artifacts and manifest.json
// under config.output_dir, and returns the manifest. Per-cell failures inside
// sweeps are recorded without aborting; configuration errors throw.
RunManifest run(const ExperimentConfig& config);

// Runs the whole worked-example suite and writes summary.csv mapping each
// example to PASS/FAIL. quick scales sample counts and grids down for CI.
RunManifest reproduce_paper_suite(const std::string& output_dir, bool quick,
                                  std::uint64_t seed = 0);

std::string config_hash(const nlohmann::json& canonical);

}  // namespace koop
