// Exercises the shared-library surface exactly as an external client would:
// only kooplab.h, opaque handles, and error codes.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "kooplab.h"

namespace {
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}
}  // namespace

TEST_CASE("version and catalog enumeration") {
  CHECK(std::strlen(kl_version()) > 0);
  const int n = kl_catalog_count();
  CHECK(n >= 8);
  bool saw_duffing = false;
  char name[64];
  for (int i = 0; i < n; ++i) {
    REQUIRE(kl_catalog_name(i, name, sizeof(name)) == KL_OK);
    if (std::string(name) == "duffing") saw_duffing = true;
  }
  CHECK(saw_duffing);
  CHECK(kl_catalog_name(n + 3, name, sizeof(name)) == KL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("unknown names set an error code and a message") {
  kl_system* sys = nullptr;
  CHECK(kl_system_open("no_such_system", &sys) == KL_ERR_UNKNOWN_NAME);
  CHECK(std::strlen(kl_last_error()) > 0);
}

TEST_CASE("integration through the handle API matches the closed form") {
  kl_system* sys = nullptr;
  REQUIRE(kl_system_open("quadratic1d", &sys) == KL_OK);
  CHECK(kl_system_dim(sys) == 1);
  CHECK(kl_system_has_closed_form(sys) == 1);

  const double xi = 0.0;
  double dx = 0.0;
  REQUIRE(kl_system_eval_field(sys, &xi, &dx) == KL_OK);
  CHECK(dx == -1.0);

  kl_trajectory* traj = nullptr;
  REQUIRE(kl_integrate(sys, &xi, 1.0, 1e-3, 0, &traj) == KL_OK);
  CHECK(kl_trajectory_length(traj) == 1001);
  CHECK(kl_trajectory_dim(traj) == 1);
  CHECK(kl_trajectory_exited_domain(traj) == 0);
  double t = 0.0, x = 0.0;
  REQUIRE(kl_trajectory_state(traj, 1000, &t, &x) == KL_OK);
  CHECK(t == doctest::Approx(1.0));
  CHECK(std::abs(x + std::tanh(1.0)) < 1e-6);

  const auto csv_path =
      std::filesystem::temp_directory_path() / "kooplab_capi_traj.csv";
  REQUIRE(kl_trajectory_write_csv(traj, csv_path.string().c_str()) == KL_OK);
  CHECK(slurp(csv_path).rfind("t,x1\n", 0) == 0);

  kl_trajectory_close(traj);
  kl_system_close(sys);
}

TEST_CASE("limit-set estimation and basin labeling via handles") {
  kl_system* sys = nullptr;
  REQUIRE(kl_system_open("vanderpol", &sys) == KL_OK);
  const double xi[2] = {0.1, 0.0};
  kl_limit_sets* sets = nullptr;
  REQUIRE(kl_estimate_limit_set(sys, xi, 50.0, 20.0, 1e-3, 0, &sets) == KL_OK);
  REQUIRE(kl_limit_sets_count(sets) == 1);
  CHECK(kl_limit_sets_kind(sets, 0) == 1);  // periodic orbit
  double period = 0.0;
  CHECK(kl_limit_sets_period(sets, 0, &period) == 1);
  CHECK(period == doctest::Approx(6.663).epsilon(1e-2));
  CHECK(kl_limit_sets_rep_count(sets, 0) > 100);
  kl_limit_sets_close(sets);
  kl_system_close(sys);

  kl_system* cubic = nullptr;
  REQUIRE(kl_system_open("cubic1d", &cubic) == KL_OK);
  std::vector<double> seeds;
  for (int i = 0; i < 21; ++i) seeds.push_back(-2.0 + 4.0 * i / 20.0);
  kl_limit_sets* targets = nullptr;
  REQUIRE(kl_catalog_limit_sets(cubic, seeds.data(), seeds.size(), 50.0, 20.0,
                                1e-3, 0, &targets) == KL_OK);
  CHECK(kl_limit_sets_count(targets) == 3);

  const double lo = -2.0, hi = 2.0;
  const int res = 21;
  kl_basin_map* map = nullptr;
  REQUIRE(kl_label_basins(cubic, &lo, &hi, &res, targets, 0, &map) == KL_OK);
  CHECK(kl_basin_map_cell_count(map) == 21);
  CHECK(kl_basin_map_label(map, 0) >= 0);
  const auto csv_path =
      std::filesystem::temp_directory_path() / "kooplab_capi_basins.csv";
  REQUIRE(kl_basin_map_write_csv(map, csv_path.string().c_str()) == KL_OK);
  CHECK(slurp(csv_path).rfind("x1,label\n", 0) == 0);
  kl_basin_map_close(map);
  kl_limit_sets_close(targets);
  kl_system_close(cubic);
}

TEST_CASE("immersion handles: evaluation, verification, domain errors") {
  CHECK(kl_immersion_count() == 5);
  kl_immersion* imm = nullptr;
  REQUIRE(kl_immersion_open("quadratic1d", &imm) == KL_OK);
  CHECK(kl_immersion_source_dim(imm) == 1);
  CHECK(kl_immersion_target_dim(imm) == 1);

  double x = 0.0, fx = 0.0;
  REQUIRE(kl_immersion_eval(imm, &x, &fx) == KL_OK);
  CHECK(fx == -1.0);
  x = 1.0;
  CHECK(kl_immersion_eval(imm, &x, &fx) == KL_ERR_DOMAIN_VIOLATION);

  double max_residual = 1.0;
  REQUIRE(kl_immersion_verify(imm, 1e-3, &max_residual) == KL_OK);
  CHECK(max_residual <= 1e-6);
  kl_immersion_close(imm);
}

TEST_CASE("embedding learning through the C API") {
  kl_system* sys = nullptr;
  REQUIRE(kl_system_open("linear1d_fast", &sys) == KL_OK);
  const double lo = -1.0, hi = 1.0;
  kl_embedding* emb = nullptr;
  REQUIRE(kl_fit_embedding(sys, &lo, &hi, 50, 0.1, 31, 1e-3,
                           R"({"kind":"monomials","degree":1})", 1,
                           &emb) == KL_OK);
  CHECK(kl_embedding_dim(emb) == 1);
  CHECK(kl_embedding_fit_residual(emb) <= 1e-10);
  double a = 0.0;
  REQUIRE(kl_embedding_generator(emb, &a) == KL_OK);
  CHECK(std::abs(a + 2.0) <= 1e-8);
  double x = 0.5, fx = 0.0;
  REQUIRE(kl_embedding_eval(emb, &x, &fx) == KL_OK);
  CHECK(std::abs(fx - 0.5) < 1e-12);  // unit-normalized identity observable

  char* json_out = nullptr;
  REQUIRE(kl_embedding_to_json(emb, &json_out) == KL_OK);
  const auto parsed = nlohmann::json::parse(json_out);
  CHECK(parsed["N"] == 50);
  kl_string_free(json_out);
  kl_embedding_close(emb);
  kl_system_close(sys);
}

TEST_CASE("experiment runner: config errors and a successful run") {
  char* manifest = nullptr;
  CHECK(kl_run_experiment("{ not json", &manifest) == KL_ERR_INVALID_ARGUMENT);
  CHECK(kl_run_experiment("{}", &manifest) == KL_ERR_INVALID_ARGUMENT);
  CHECK(kl_run_experiment(
            R"({"experiment":"simulate","system":"no_such_system"})",
            &manifest) == KL_ERR_UNKNOWN_NAME);

  const auto dir = std::filesystem::temp_directory_path() / "kooplab_capi_run";
  std::filesystem::remove_all(dir);
  nlohmann::json cfg;
  cfg["experiment"] = "simulate";
  cfg["system"] = "harmonic2d";
  cfg["output_dir"] = dir.string();
  cfg["params"] = {{"xi", {1.0, 0.0}}, {"horizon", 1.0}};
  REQUIRE(kl_run_experiment(cfg.dump().c_str(), &manifest) == KL_OK);
  const auto parsed = nlohmann::json::parse(manifest);
  CHECK(parsed["ok"] == true);
  CHECK(std::filesystem::exists(dir / "trajectory.csv"));
  kl_string_free(manifest);
}
