// extern "C" shim over the C++ core: opaque handles, error codes, and a
// thread-local last-error message.
#include "kooplab.h"

#include <cstring>
#include <new>
#include <string>

#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/immersion.hpp"
#include "core/io.hpp"
#include "core/learning.hpp"
#include "core/limitset.hpp"
#include "core/svg.hpp"
#include "core/system.hpp"

namespace {

thread_local std::string g_last_error;

kl_status to_status(koop::ErrorCode c) {
  using koop::ErrorCode;
  switch (c) {
    case ErrorCode::invalid_argument: return KL_ERR_INVALID_ARGUMENT;
    case ErrorCode::unknown_name: return KL_ERR_UNKNOWN_NAME;
    case ErrorCode::domain_violation: return KL_ERR_DOMAIN_VIOLATION;
    case ErrorCode::integration_diverged: return KL_ERR_INTEGRATION_DIVERGED;
    case ErrorCode::degenerate_data: return KL_ERR_DEGENERATE_DATA;
    case ErrorCode::unsupported: return KL_ERR_UNSUPPORTED;
    case ErrorCode::empty_domain: return KL_ERR_EMPTY_DOMAIN;
    case ErrorCode::io_error: return KL_ERR_IO;
    case ErrorCode::internal: return KL_ERR_INTERNAL;
  }
  return KL_ERR_INTERNAL;
}

template <typename Fn>
kl_status guarded(Fn&& fn) {
  try {
    fn();
    return KL_OK;
  } catch (const koop::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return KL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KL_ERR_INTERNAL;
  }
}

kl_status copy_name(const std::string& name, char* buf, size_t buf_size) {
  if (!buf || buf_size == 0) {
    g_last_error = "null or empty name buffer";
    return KL_ERR_INVALID_ARGUMENT;
  }
  if (name.size() + 1 > buf_size) {
    g_last_error = "name buffer too small";
    return KL_ERR_INVALID_ARGUMENT;
  }
  std::memcpy(buf, name.c_str(), name.size() + 1);
  return KL_OK;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

koop::Vec to_vec(const double* x, int dim) {
  return Eigen::Map<const koop::Vec>(x, dim);
}

}  // namespace

struct kl_system {
  const koop::SystemDef* def;
};
struct kl_trajectory {
  koop::Trajectory traj;
};
struct kl_limit_sets {
  std::vector<koop::LimitSet> sets;
};
struct kl_basin_map {
  koop::BasinMap map;
};
struct kl_immersion {
  const koop::ImmersionCandidate* cand;
};
struct kl_embedding {
  koop::LearnedEmbedding emb;
};

extern "C" {

const char* kl_version(void) { return KOOPLAB_VERSION; }

const char* kl_last_error(void) { return g_last_error.c_str(); }

void kl_string_free(char* s) { delete[] s; }

int kl_catalog_count(void) {
  return static_cast<int>(koop::catalog().size());
}

kl_status kl_catalog_name(int index, char* buf, size_t buf_size) {
  const auto& systems = koop::catalog();
  if (index < 0 || index >= static_cast<int>(systems.size())) {
    g_last_error = "catalog index out of range";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return copy_name(systems[static_cast<std::size_t>(index)].name, buf, buf_size);
}

kl_status kl_system_open(const char* name, kl_system** out) {
  if (!name || !out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = new kl_system{&koop::find_system(name)}; });
}

void kl_system_close(kl_system* sys) { delete sys; }

int kl_system_dim(const kl_system* sys) { return sys ? sys->def->dim : 0; }

int kl_system_has_closed_form(const kl_system* sys) {
  return sys && sys->def->has_closed_form() ? 1 : 0;
}

kl_status kl_system_eval_field(const kl_system* sys, const double* x,
                               double* dx_out) {
  if (!sys || !x || !dx_out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    koop::Vec dx(sys->def->dim);
    sys->def->vector_field(to_vec(x, sys->def->dim), dx);
    for (int i = 0; i < sys->def->dim; ++i) dx_out[i] = dx[i];
  });
}

int kl_system_contains(const kl_system* sys, const double* x) {
  if (!sys || !x) return 0;
  return sys->def->domain.contains(to_vec(x, sys->def->dim)) ? 1 : 0;
}

kl_status kl_integrate(const kl_system* sys, const double* xi, double horizon,
                       double dt, int reversed, kl_trajectory** out) {
  if (!sys || !xi || !out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = new kl_trajectory{koop::integrate(
        *sys->def, to_vec(xi, sys->def->dim), horizon, dt,
        reversed ? koop::Direction::reversed : koop::Direction::forward)};
  });
}

void kl_trajectory_close(kl_trajectory* traj) { delete traj; }

size_t kl_trajectory_length(const kl_trajectory* traj) {
  return traj ? traj->traj.states.size() : 0;
}

int kl_trajectory_dim(const kl_trajectory* traj) {
  return traj ? traj->traj.dim : 0;
}

int kl_trajectory_exited_domain(const kl_trajectory* traj) {
  return traj && traj->traj.exited_domain ? 1 : 0;
}

kl_status kl_trajectory_state(const kl_trajectory* traj, size_t index,
                              double* t_out, double* x_out) {
  if (!traj || !t_out || !x_out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  if (index >= traj->traj.states.size()) {
    g_last_error = "trajectory index out of range";
    return KL_ERR_INVALID_ARGUMENT;
  }
  *t_out = traj->traj.time_at(index);
  const koop::Vec& s = traj->traj.states[index];
  for (int i = 0; i < traj->traj.dim; ++i) x_out[i] = s[i];
  return KL_OK;
}

kl_status kl_trajectory_write_csv(const kl_trajectory* traj, const char* path) {
  if (!traj || !path) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { koop::atomic_write_file(path, koop::trajectory_csv(traj->traj)); });
}

kl_status kl_estimate_limit_set(const kl_system* sys, const double* xi,
                                double settle, double observe, double dt,
                                int backward, kl_limit_sets** out) {
  if (!sys || !xi || !out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    koop::LimitParams p;
    p.settle = settle;
    p.observe = observe;
    p.dt = dt;
    auto set = koop::estimate_omega_limit(
        *sys->def, to_vec(xi, sys->def->dim), p,
        backward ? koop::Direction::reversed : koop::Direction::forward);
    *out = new kl_limit_sets{{std::move(set)}};
  });
}

kl_status kl_catalog_limit_sets(const kl_system* sys, const double* seeds,
                                size_t n_seeds, double settle, double observe,
                                double dt, int backward, kl_limit_sets** out) {
  if (!sys || !seeds || !out || n_seeds == 0) {
    g_last_error = "null argument or empty seed list";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    koop::LimitParams p;
    p.settle = settle;
    p.observe = observe;
    p.dt = dt;
    const int dim = sys->def->dim;
    std::vector<koop::Vec> seed_vecs;
    seed_vecs.reserve(n_seeds);
    for (size_t i = 0; i < n_seeds; ++i)
      seed_vecs.push_back(to_vec(seeds + i * static_cast<size_t>(dim), dim));
    *out = new kl_limit_sets{koop::catalog_limit_sets(
        *sys->def, seed_vecs, p,
        backward ? koop::Direction::reversed : koop::Direction::forward)};
  });
}

void kl_limit_sets_close(kl_limit_sets* sets) { delete sets; }

size_t kl_limit_sets_count(const kl_limit_sets* sets) {
  return sets ? sets->sets.size() : 0;
}

int kl_limit_sets_kind(const kl_limit_sets* sets, size_t index) {
  if (!sets || index >= sets->sets.size()) return -1;
  return static_cast<int>(sets->sets[index].kind);
}

size_t kl_limit_sets_rep_count(const kl_limit_sets* sets, size_t index) {
  if (!sets || index >= sets->sets.size()) return 0;
  return sets->sets[index].representatives.size();
}

kl_status kl_limit_sets_rep(const kl_limit_sets* sets, size_t index,
                            size_t rep_index, double* x_out) {
  if (!sets || !x_out || index >= sets->sets.size() ||
      rep_index >= sets->sets[index].representatives.size()) {
    g_last_error = "limit set index out of range";
    return KL_ERR_INVALID_ARGUMENT;
  }
  const koop::Vec& r = sets->sets[index].representatives[rep_index];
  for (int i = 0; i < r.size(); ++i) x_out[i] = r[i];
  return KL_OK;
}

int kl_limit_sets_period(const kl_limit_sets* sets, size_t index,
                         double* period_out) {
  if (!sets || index >= sets->sets.size() ||
      !sets->sets[index].period_estimate)
    return 0;
  if (period_out) *period_out = *sets->sets[index].period_estimate;
  return 1;
}

kl_status kl_label_basins(const kl_system* sys, const double* box_lo,
                          const double* box_hi, const int* resolution,
                          const kl_limit_sets* targets, int backward,
                          kl_basin_map** out) {
  if (!sys || !box_lo || !box_hi || !resolution || !targets || !out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const int dim = sys->def->dim;
    koop::Box box;
    box.lo = to_vec(box_lo, dim);
    box.hi = to_vec(box_hi, dim);
    std::vector<int> res(resolution, resolution + dim);
    koop::LimitParams p;
    *out = new kl_basin_map{koop::label_basins(
        *sys->def, box, res, targets->sets, p,
        backward ? koop::Direction::reversed : koop::Direction::forward)};
  });
}

void kl_basin_map_close(kl_basin_map* map) { delete map; }

size_t kl_basin_map_cell_count(const kl_basin_map* map) {
  return map ? map->map.labels.size() : 0;
}

int kl_basin_map_label(const kl_basin_map* map, size_t cell) {
  if (!map || cell >= map->map.labels.size()) return koop::BasinMap::kUnresolved;
  return map->map.labels[cell];
}

kl_status kl_basin_map_write_csv(const kl_basin_map* map, const char* path) {
  if (!map || !path) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { koop::atomic_write_file(path, koop::basin_csv(map->map)); });
}

kl_status kl_basin_map_write_svg(const kl_basin_map* map, const char* path) {
  if (!map || !path) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    koop::atomic_write_file(path, koop::render_basin_heatmap(map->map));
  });
}

int kl_immersion_count(void) {
  return static_cast<int>(koop::exact_catalog().size());
}

kl_status kl_immersion_name(int index, char* buf, size_t buf_size) {
  const auto& all = koop::exact_catalog();
  if (index < 0 || index >= static_cast<int>(all.size())) {
    g_last_error = "immersion index out of range";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return copy_name(all[static_cast<std::size_t>(index)].name, buf, buf_size);
}

kl_status kl_immersion_open(const char* name, kl_immersion** out) {
  if (!name || !out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = new kl_immersion{&koop::find_immersion(name)}; });
}

void kl_immersion_close(kl_immersion* imm) { delete imm; }

int kl_immersion_source_dim(const kl_immersion* imm) {
  return imm ? imm->cand->source_dim : 0;
}

int kl_immersion_target_dim(const kl_immersion* imm) {
  return imm ? imm->cand->target_dim : 0;
}

kl_status kl_immersion_eval(const kl_immersion* imm, const double* x,
                            double* fx_out) {
  if (!imm || !x || !fx_out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const koop::Vec fx = imm->cand->eval(to_vec(x, imm->cand->source_dim));
    for (int i = 0; i < fx.size(); ++i) fx_out[i] = fx[i];
  });
}

kl_status kl_immersion_verify(const kl_immersion* imm, double dt,
                              double* max_residual_out) {
  if (!imm || !max_residual_out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    std::vector<koop::Vec> xi_grid;
    std::vector<double> t_grid;
    koop::default_verification_grid(*imm->cand, 20, 20, xi_grid, t_grid);
    *max_residual_out =
        koop::verify_immersion(*imm->cand, xi_grid, t_grid, dt).max_residual;
  });
}

kl_status kl_fit_embedding(const kl_system* sys, const double* box_lo,
                           const double* box_hi, int n, double tau,
                           uint64_t seed, double dt,
                           const char* dictionary_json, int m,
                           kl_embedding** out) {
  if (!sys || !box_lo || !box_hi || !dictionary_json || !out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const int dim = sys->def->dim;
    koop::Box box;
    box.lo = to_vec(box_lo, dim);
    box.hi = to_vec(box_hi, dim);
    const nlohmann::json spec = nlohmann::json::parse(dictionary_json);
    koop::Dictionary dict = [&] {
      const std::string kind = spec.value("kind", "monomials");
      if (kind == "monomials")
        return koop::Dictionary::monomials(dim, spec.value("degree", 4));
      if (kind == "gaussian_rbf") {
        const int per_axis = spec.value("per_axis", 4);
        std::vector<koop::Vec> centers;
        std::vector<int> idx(static_cast<std::size_t>(dim), 0);
        while (true) {
          koop::Vec c(dim);
          for (int d = 0; d < dim; ++d) {
            const double frac =
                per_axis == 1 ? 0.5
                              : static_cast<double>(idx[static_cast<std::size_t>(d)]) /
                                    (per_axis - 1);
            c[d] = box.lo[d] + frac * (box.hi[d] - box.lo[d]);
          }
          centers.push_back(std::move(c));
          int d = 0;
          for (; d < dim; ++d) {
            if (++idx[static_cast<std::size_t>(d)] < per_axis) break;
            idx[static_cast<std::size_t>(d)] = 0;
          }
          if (d == dim) break;
        }
        return koop::Dictionary::gaussian_rbf(std::move(centers),
                                              spec.value("width", 0.8));
      }
      koop::fail(koop::ErrorCode::invalid_argument,
                 "unknown dictionary kind: " + kind);
    }();
    const koop::SamplePairs pairs =
        koop::sample_pairs(*sys->def, box, n, tau, seed, dt);
    *out = new kl_embedding{koop::fit_embedding(pairs, dict, m)};
  });
}

void kl_embedding_close(kl_embedding* emb) { delete emb; }

double kl_embedding_fit_residual(const kl_embedding* emb) {
  return emb ? emb->emb.fit_residual : -1.0;
}

int kl_embedding_dim(const kl_embedding* emb) {
  return emb ? static_cast<int>(emb->emb.k.rows()) : 0;
}

kl_status kl_embedding_eval(const kl_embedding* emb, const double* x,
                            double* fx_out) {
  if (!emb || !x || !fx_out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const koop::Vec fx =
        emb->emb.eval(to_vec(x, emb->emb.dictionary.dim()));
    for (int i = 0; i < fx.size(); ++i) fx_out[i] = fx[i];
  });
}

kl_status kl_embedding_generator(const kl_embedding* emb, double* a_out) {
  if (!emb || !a_out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  if (!emb->emb.a) {
    g_last_error = "principal logarithm of K does not exist";
    return KL_ERR_UNSUPPORTED;
  }
  const koop::Mat& a = *emb->emb.a;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      a_out[i * a.cols() + j] = a(i, j);
  return KL_OK;
}

kl_status kl_embedding_to_json(const kl_embedding* emb, char** json_out) {
  if (!emb || !json_out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *json_out = dup_string(koop::embedding_json(emb->emb)); });
}

kl_status kl_run_experiment(const char* config_json, char** manifest_json_out) {
  if (!config_json || !manifest_json_out) {
    g_last_error = "null argument";
    return KL_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      koop::fail(koop::ErrorCode::invalid_argument,
                 std::string("config is not valid JSON: ") + e.what());
    }
    const koop::ExperimentConfig config =
        koop::ExperimentConfig::from_json(parsed);
    const koop::RunManifest manifest = koop::run(config);
    *manifest_json_out = dup_string(manifest.to_json().dump(2) + "\n");
  });
}

}  // extern "C"
