// End-to-end checks of the installed CLI binary (path injected by CMake).
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "kooplab_cli_log.txt";
  const std::string cmd =
      std::string(KOOPLAB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream buf;
  buf << in.rdbuf();
  return RunResult{WEXITSTATUS(raw), buf.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "kooplab_cli" / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("list-systems prints the catalog") {
  const RunResult r = run_cli("list-systems");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("duffing") != std::string::npos);
  CHECK(r.output.find("lorenz") != std::string::npos);
}

TEST_CASE("simulate subcommand writes artifacts and reports outputs") {
  const fs::path dir = fresh_dir("simulate");
  const RunResult r = run_cli(
      "simulate --system vanderpol --xi 0.1,0 --horizon 5 --out " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "phase.svg"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(r.output.find("trajectory.csv") != std::string::npos);
}

TEST_CASE("bad input yields a machine-readable error and nonzero exit") {
  const RunResult r = run_cli("simulate --system no_such_system --out /tmp/x");
  CHECK(r.exit_code != 0);
  const auto nl = r.output.find_last_of('{');
  REQUIRE(nl != std::string::npos);
  const auto err = nlohmann::json::parse(r.output.substr(nl));
  CHECK(err["error"] == true);
  CHECK(err["message"].get<std::string>().find("no_such_system") !=
        std::string::npos);
}

TEST_CASE("config file drives the run and flags override it") {
  const fs::path dir = fresh_dir("config");
  const fs::path cfg_path = fs::temp_directory_path() / "kooplab_cli_cfg.json";
  nlohmann::json cfg;
  cfg["experiment"] = "simulate";
  cfg["system"] = "harmonic2d";
  cfg["output_dir"] = dir.string();
  cfg["params"] = {{"xi", {1.0, 0.0}}, {"horizon", 5.0}, {"dt", 0.01}};
  {
    std::ofstream out(cfg_path);
    out << cfg.dump();
  }
  // --horizon overrides the config's 5.0
  const RunResult r = run_cli("simulate --system harmonic2d --config " +
                              cfg_path.string() + " --horizon 2");
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir / "trajectory.csv");
  const auto rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 202);  // header + 201 states (horizon 2 at dt 0.01)
}

TEST_CASE("KOOPLAB_OUT provides the output root when --out is absent") {
  const fs::path root = fresh_dir("envroot");
  const fs::path log = fs::temp_directory_path() / "kooplab_cli_log.txt";
  const std::string cmd = "KOOPLAB_OUT=" + root.string() + " " +
                          std::string(KOOPLAB_CLI_PATH) +
                          " simulate --system harmonic2d --xi 1,0 --horizon 1 > " +
                          log.string() + " 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(fs::exists(root / "simulate" / "trajectory.csv"));
}

TEST_CASE("learn subcommand produces an embedding artifact") {
  const fs::path dir = fresh_dir("learn");
  const RunResult r = run_cli(
      "learn --system linear1d_fast --tau 0.1 --N 50 --m 1 --degree 1 --out " +
      dir.string());
  CHECK(r.exit_code == 0);
  const auto emb = nlohmann::json::parse(slurp(dir / "embedding.json"));
  CHECK(std::abs(emb["A"][0][0].get<double>() + 2.0) < 1e-8);
}
