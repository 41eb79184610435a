/*
 * kooplab C API.
 *
 * A shared-library interface over the linear-immersion laboratory: benchmark
 * system catalog, trajectory integration, limit-set estimation, basin
 * labeling, closed-form immersion verification, dictionary-based embedding
 * learning, and the experiment runner.
 *
 * Conventions:
 *  - All objects are opaque handles created by kl_*_open/:::_create calls and
 *    released with the matching kl_*_close. Handles are immutable after
 *    creation and safe to share across threads.
 *  - Functions return kl_status; KL_OK is 0. On error, kl_last_error() gives
 *    a thread-local human-readable message.
 *  - States are double arrays of the system dimension, caller-allocated.
 */
#ifndef KOOPLAB_H
#define KOOPLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kl_status {
  KL_OK = 0,
  KL_ERR_INVALID_ARGUMENT = 1,
  KL_ERR_UNKNOWN_NAME = 2,
  KL_ERR_DOMAIN_VIOLATION = 3,
  KL_ERR_INTEGRATION_DIVERGED = 4,
  KL_ERR_DEGENERATE_DATA = 5,
  KL_ERR_UNSUPPORTED = 6,
  KL_ERR_EMPTY_DOMAIN = 7,
  KL_ERR_IO = 8,
  KL_ERR_INTERNAL = 9
} kl_status;

typedef struct kl_system kl_system;
typedef struct kl_trajectory kl_trajectory;
typedef struct kl_limit_sets kl_limit_sets;
typedef struct kl_basin_map kl_basin_map;
typedef struct kl_immersion kl_immersion;
typedef struct kl_embedding kl_embedding;

const char* kl_version(void);

/* Thread-local message for the most recent failure on this thread. */
const char* kl_last_error(void);

/* Frees strings returned through char** out-parameters. */
void kl_string_free(char* s);

/* ------------------------------------------------------------------ */
/* System catalog                                                      */
/* ------------------------------------------------------------------ */

int kl_catalog_count(void);
kl_status kl_catalog_name(int index, char* buf, size_t buf_size);

kl_status kl_system_open(const char* name, kl_system** out);
void kl_system_close(kl_system* sys);
int kl_system_dim(const kl_system* sys);
int kl_system_has_closed_form(const kl_system* sys);
kl_status kl_system_eval_field(const kl_system* sys, const double* x,
                               double* dx_out);
int kl_system_contains(const kl_system* sys, const double* x);

/* ------------------------------------------------------------------ */
/* Trajectories                                                        */
/* ------------------------------------------------------------------ */

/* Fixed-step RK4; reversed != 0 integrates xdot = -f(x). */
kl_status kl_integrate(const kl_system* sys, const double* xi, double horizon,
                       double dt, int reversed, kl_trajectory** out);
void kl_trajectory_close(kl_trajectory* traj);
size_t kl_trajectory_length(const kl_trajectory* traj);
int kl_trajectory_dim(const kl_trajectory* traj);
int kl_trajectory_exited_domain(const kl_trajectory* traj);
kl_status kl_trajectory_state(const kl_trajectory* traj, size_t index,
                              double* t_out, double* x_out);
/* CSV with header t,x1,...,xn and 17-significant-digit floats. */
kl_status kl_trajectory_write_csv(const kl_trajectory* traj, const char* path);

/* ------------------------------------------------------------------ */
/* Limit sets                                                          */
/* ------------------------------------------------------------------ */

/* kind: 0 equilibrium, 1 periodic_orbit, 2 attractor_cloud, 3 empty */
kl_status kl_estimate_limit_set(const kl_system* sys, const double* xi,
                                double settle, double observe, double dt,
                                int backward, kl_limit_sets** out);
kl_status kl_catalog_limit_sets(const kl_system* sys, const double* seeds,
                                size_t n_seeds, double settle, double observe,
                                double dt, int backward, kl_limit_sets** out);
void kl_limit_sets_close(kl_limit_sets* sets);
size_t kl_limit_sets_count(const kl_limit_sets* sets);
int kl_limit_sets_kind(const kl_limit_sets* sets, size_t index);
size_t kl_limit_sets_rep_count(const kl_limit_sets* sets, size_t index);
kl_status kl_limit_sets_rep(const kl_limit_sets* sets, size_t index,
                            size_t rep_index, double* x_out);
/* Returns 1 and writes the period when the set is a periodic orbit. */
int kl_limit_sets_period(const kl_limit_sets* sets, size_t index,
                         double* period_out);

/* ------------------------------------------------------------------ */
/* Basins                                                              */
/* ------------------------------------------------------------------ */

kl_status kl_label_basins(const kl_system* sys, const double* box_lo,
                          const double* box_hi, const int* resolution,
                          const kl_limit_sets* targets, int backward,
                          kl_basin_map** out);
void kl_basin_map_close(kl_basin_map* map);
size_t kl_basin_map_cell_count(const kl_basin_map* map);
/* >= 0: limit-set index; -1 UNRESOLVED; -2 DIVERGED */
int kl_basin_map_label(const kl_basin_map* map, size_t cell);
kl_status kl_basin_map_write_csv(const kl_basin_map* map, const char* path);
kl_status kl_basin_map_write_svg(const kl_basin_map* map, const char* path);

/* ------------------------------------------------------------------ */
/* Exact immersions                                                    */
/* ------------------------------------------------------------------ */

int kl_immersion_count(void);
kl_status kl_immersion_name(int index, char* buf, size_t buf_size);
kl_status kl_immersion_open(const char* name, kl_immersion** out);
void kl_immersion_close(kl_immersion* imm);
int kl_immersion_source_dim(const kl_immersion* imm);
int kl_immersion_target_dim(const kl_immersion* imm);
kl_status kl_immersion_eval(const kl_immersion* imm, const double* x,
                            double* fx_out);
/* Max residual of F(phi(t,xi)) - e^{At} F(xi) over the default 20 x 20 grid. */
kl_status kl_immersion_verify(const kl_immersion* imm, double dt,
                              double* max_residual_out);

/* ------------------------------------------------------------------ */
/* Embedding learning                                                  */
/* ------------------------------------------------------------------ */

/* dictionary_json: {"kind":"monomials","degree":d} or
 * {"kind":"gaussian_rbf","per_axis":k,"width":w}. */
kl_status kl_fit_embedding(const kl_system* sys, const double* box_lo,
                           const double* box_hi, int n, double tau,
                           uint64_t seed, double dt,
                           const char* dictionary_json, int m,
                           kl_embedding** out);
void kl_embedding_close(kl_embedding* emb);
double kl_embedding_fit_residual(const kl_embedding* emb);
int kl_embedding_dim(const kl_embedding* emb);
kl_status kl_embedding_eval(const kl_embedding* emb, const double* x,
                            double* fx_out);
/* Row-major m x m generator; fails with KL_ERR_UNSUPPORTED when the
 * principal logarithm of K does not exist. */
kl_status kl_embedding_generator(const kl_embedding* emb, double* a_out);
/* Serialized embedding (W, K, A, dictionary spec). */
kl_status kl_embedding_to_json(const kl_embedding* emb, char** json_out);

/* ------------------------------------------------------------------ */
/* Experiment runner                                                   */
/* ------------------------------------------------------------------ */

/* config_json follows the documented experiment schema. Artifacts land in
 * the config's output_dir; the run manifest JSON is returned. A nonzero
 * status is returned for configuration errors; suite FAILs are reported in
 * the manifest with status KL_OK. */
kl_status kl_run_experiment(const char* config_json, char** manifest_json_out);

#ifdef __cplusplus
}
#endif

#endif /* KOOPLAB_H */
