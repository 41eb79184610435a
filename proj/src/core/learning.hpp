// Data-driven approximate linear immersions: dictionary observables, the
// EDMD-style least-squares fit, the normalized limit-set collapse metric, and
// the (tau, N) sweep / fixed-F exclusion experiments.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/immersion.hpp"
#include "core/limitset.hpp"
#include "core/linalg.hpp"
#include "core/system.hpp"

namespace koop {

class Dictionary {
 public:
  enum class Kind { monomials, gaussian_rbf, custom };

  // All monomials of total degree <= degree, ordered by (degree, lex);
  // includes the constant and every coordinate.
  static Dictionary monomials(int dim, int degree);

  // exp(-||x - c||^2 / (2 width^2)) per center.
  static Dictionary gaussian_rbf(std::vector<Vec> centers, double width);

  static Dictionary custom(int dim,
                           std::vector<std::function<double(const Vec&)>> fns,
                           std::vector<std::string> labels,
                           bool has_constant = false);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(labels_.size()); }
  bool has_constant() const { return has_constant_; }
  const std::vector<std::string>& labels() const { return labels_; }

  void eval(const Vec& x, Eigen::Ref<Vec> out) const;
  Vec eval(const Vec& x) const;

  nlohmann::json spec_json() const;

 private:
  Kind kind_ = Kind::monomials;
  int dim_ = 0;
  bool has_constant_ = false;
  std::vector<std::string> labels_;
  // monomials
  std::vector<std::vector<int>> exponents_;
  int degree_ = 0;
  // rbf
  std::vector<Vec> centers_;
  double width_ = 1.0;
  // custom
  std::vector<std::function<double(const Vec&)>> fns_;
};

struct SamplePairs {
  double tau = 0.0;
  int n = 0;
  Box box;
  std::uint64_t seed = 0;
  Mat x;      // dim x N
  Mat xplus;  // dim x N, xplus.col(l) = phi(tau, x.col(l))
};

// Uniform i.i.d. states in box-cap-domain propagated for exactly tau.
// Draws whose trajectory leaves the domain are resampled, capped at 100 N
// attempts. Closed-form flows are used when available so pairs are exact.
SamplePairs sample_pairs(const SystemDef& sys, const Box& box, int n,
                         double tau, std::uint64_t seed, double dt = 1e-3,
                         FlowMode mode = FlowMode::prefer_closed_form);

struct LearnedEmbedding {
  Dictionary dictionary;
  Mat w;  // m x p, F(x) = w * psi(x); rows from unit-norm left eigenvectors
  Mat k;  // m x m one-step matrix (real block form; K ~ e^{A tau})
  std::optional<Mat> a;  // log(k)/tau when the principal log exists
  bool log_failed = false;
  bool excluded_constant = false;
  bool split_pair = false;  // last direction took only the real part of a pair
  double fit_residual = 0.0;  // RMS of ||F(x+) - K F(x)|| over the data
  double tau = 0.0;
  int n = 0;

  Vec eval(const Vec& x) const { return w * dictionary.eval(x); }
};

// Two-stage EDMD: full p x p least-squares one-step matrix, then reduction to
// the m left-eigendirections of largest eigenvalue magnitude (skipping the
// constant-function eigendirection when a constant basis element exists).
LearnedEmbedding fit_embedding(const SamplePairs& samples,
                               const Dictionary& dictionary, int m);

std::string embedding_json(const LearnedEmbedding& emb);

// Max pairwise Hausdorff distance between F-images of the limit sets,
// normalized by the diameter of F over box_sample; 0 when the spread is
// below 1e-12 (degenerate constant map). Requires >= 2 limit sets.
double collapse_metric(const std::function<Vec(const Vec&)>& f,
                       const std::vector<LimitSet>& limit_sets,
                       const std::vector<Vec>& box_sample);
double collapse_metric(const LearnedEmbedding& emb,
                       const std::vector<LimitSet>& limit_sets,
                       const std::vector<Vec>& box_sample);

struct CollapseCell {
  double tau = 0.0;
  int n = 0;
  std::uint64_t seed = 0;
  double fit_residual = 0.0;
  double collapse_metric = 0.0;
  double spread = 0.0;
  std::string status;  // ok | not_applicable | failed: <reason>
};

struct CollapseSummaryRow {
  double tau = 0.0;
  int n = 0;
  double mean_metric = 0.0;
  double stddev_metric = 0.0;
  int ok_cells = 0;
};

struct CollapseReport {
  std::vector<CollapseCell> cells;
  std::vector<CollapseSummaryRow> summary;
};

// Full factorial (tau, N, seed) fit + metric. Per-cell failures are recorded
// without aborting the sweep.
CollapseReport sweep(const SystemDef& sys, const Dictionary& dictionary, int m,
                     const std::vector<double>& tau_list,
                     const std::vector<int>& n_list,
                     const std::vector<std::uint64_t>& seeds, const Box& box,
                     const LimitParams& params = {});

std::string collapse_report_csv(const CollapseReport& report);
std::string collapse_report_json(const CollapseReport& report);

struct ExclusionRow {
  int n = 0;
  std::vector<double> residuals;  // per seed, nested sample prefixes
  double mean_residual = 0.0;
};

struct ExclusionReport {
  std::string candidate;
  double tau = 0.0;
  bool distinguishes_limit_sets = false;
  std::vector<ExclusionRow> rows;
};

// For a FIXED map F, the best one-step matrix K per sample size: residual
// bounded away from zero witnesses F leaving the zero-loss set as N grows;
// an exact immersion stays at zero. Sample sets are nested across N.
ExclusionReport exclusion_test(const SystemDef& sys,
                               const ImmersionCandidate& f_fixed, double tau,
                               const std::vector<int>& n_list, const Box& box,
                               const std::vector<std::uint64_t>& seeds,
                               double dt = 1e-3, const LimitParams& params = {});

std::string exclusion_report_csv(const ExclusionReport& report);
std::string exclusion_report_json(const ExclusionReport& report);

struct DenseFitReport {
  std::vector<double> taus;
  std::vector<double> residuals;   // best-fit RMS per tau for the fixed map
  std::optional<Mat> a_estimate;   // from the smallest tau's K
  double heldout_max_residual = 0.0;
};

// Dense-sampling probe: fits the best K for the fixed map at every tau, then
// checks the immersion identity at held-out (xi, t) points using the
// generator recovered from the smallest tau.
DenseFitReport dense_identity_probe(const SystemDef& sys,
                                    const ImmersionCandidate& f_fixed,
                                    const std::vector<double>& taus, int n,
                                    const Box& box, int heldout_points,
                                    double t_max, std::uint64_t seed,
                                    double dt = 1e-3);

}  // namespace koop
