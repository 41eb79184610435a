#include "core/learning.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace koop {

namespace {

void enumerate_monomials(int dim, int degree, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == dim) {
    out.push_back(current);
    return;
  }
  int used = 0;
  for (int e : current) used += e;
  for (int e = 0; e <= degree - used; ++e) {
    current.push_back(e);
    enumerate_monomials(dim, degree, current, out);
    current.pop_back();
  }
}

std::string monomial_label(const std::vector<int>& exps) {
  std::string s;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (exps[i] > 1) s += "^" + std::to_string(exps[i]);
  }
  return s.empty() ? "1" : s;
}

}  // namespace

Dictionary Dictionary::monomials(int dim, int degree) {
  if (dim < 1 || degree < 1)
    fail(ErrorCode::invalid_argument, "monomials need dim >= 1, degree >= 1");
  Dictionary d;
  d.kind_ = Kind::monomials;
  d.dim_ = dim;
  d.degree_ = degree;
  d.has_constant_ = true;
  std::vector<int> current;
  enumerate_monomials(dim, degree, current, d.exponents_);
  std::stable_sort(d.exponents_.begin(), d.exponents_.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     int ta = 0, tb = 0;
                     for (int e : a) ta += e;
                     for (int e : b) tb += e;
                     if (ta != tb) return ta < tb;
                     return a > b;  // within a degree, x1 powers lead
                   });
  for (const auto& e : d.exponents_) d.labels_.push_back(monomial_label(e));
  return d;
}

Dictionary Dictionary::gaussian_rbf(std::vector<Vec> centers, double width) {
  if (centers.empty() || !(width > 0))
    fail(ErrorCode::invalid_argument, "rbf needs centers and positive width");
  Dictionary d;
  d.kind_ = Kind::gaussian_rbf;
  d.dim_ = static_cast<int>(centers.front().size());
  d.centers_ = std::move(centers);
  d.width_ = width;
  d.has_constant_ = false;
  for (std::size_t i = 0; i < d.centers_.size(); ++i)
    d.labels_.push_back("rbf" + std::to_string(i + 1));
  return d;
}

Dictionary Dictionary::custom(int dim,
                              std::vector<std::function<double(const Vec&)>> fns,
                              std::vector<std::string> labels,
                              bool has_constant) {
  if (fns.empty() || fns.size() != labels.size())
    fail(ErrorCode::invalid_argument, "custom dictionary needs labeled functions");
  Dictionary d;
  d.kind_ = Kind::custom;
  d.dim_ = dim;
  d.fns_ = std::move(fns);
  d.labels_ = std::move(labels);
  d.has_constant_ = has_constant;
  return d;
}

void Dictionary::eval(const Vec& x, Eigen::Ref<Vec> out) const {
  switch (kind_) {
    case Kind::monomials: {
      for (std::size_t b = 0; b < exponents_.size(); ++b) {
        double v = 1.0;
        for (int i = 0; i < dim_; ++i) {
          for (int e = 0; e < exponents_[b][static_cast<std::size_t>(i)]; ++e)
            v *= x[i];
        }
        out[static_cast<Eigen::Index>(b)] = v;
      }
      return;
    }
    case Kind::gaussian_rbf: {
      for (std::size_t b = 0; b < centers_.size(); ++b) {
        const double q = (x - centers_[b]).squaredNorm();
        out[static_cast<Eigen::Index>(b)] =
            std::exp(-q / (2.0 * width_ * width_));
      }
      return;
    }
    case Kind::custom: {
      for (std::size_t b = 0; b < fns_.size(); ++b)
        out[static_cast<Eigen::Index>(b)] = fns_[b](x);
      return;
    }
  }
}

Vec Dictionary::eval(const Vec& x) const {
  Vec out(size());
  eval(x, out);
  return out;
}

nlohmann::json Dictionary::spec_json() const {
  nlohmann::json j;
  j["size"] = size();
  j["dim"] = dim_;
  j["labels"] = labels_;
  switch (kind_) {
    case Kind::monomials:
      j["kind"] = "monomials";
      j["degree"] = degree_;
      break;
    case Kind::gaussian_rbf: {
      j["kind"] = "gaussian_rbf";
      j["width"] = width_;
      auto& cs = j["centers"] = nlohmann::json::array();
      for (const Vec& c : centers_)
        cs.push_back(std::vector<double>(c.data(), c.data() + c.size()));
      break;
    }
    case Kind::custom:
      j["kind"] = "custom";
      break;
  }
  return j;
}

SamplePairs sample_pairs(const SystemDef& sys, const Box& box, int n,
                         double tau, std::uint64_t seed, double dt,
                         FlowMode mode) {
  if (n < 1) fail(ErrorCode::invalid_argument, "N must be >= 1");
  if (!(tau > 0)) fail(ErrorCode::invalid_argument, "tau must be positive");
  if (box.dim() != sys.dim)
    fail(ErrorCode::invalid_argument, "box dimension mismatch");

  SamplePairs out;
  out.tau = tau;
  out.n = n;
  out.box = box;
  out.seed = seed;
  out.x.resize(sys.dim, n);
  out.xplus.resize(sys.dim, n);

  const bool closed =
      mode == FlowMode::prefer_closed_form && sys.has_closed_form();
  Rng rng(seed);
  long long attempts = 0;
  const long long max_attempts = 100LL * n;
  int filled = 0;
  while (filled < n) {
    if (attempts >= max_attempts)
      fail(ErrorCode::empty_domain,
           "could not draw " + std::to_string(n) + " pairs from " + sys.name +
               " within the attempt budget");
    ++attempts;
    Vec x(sys.dim);
    for (int i = 0; i < sys.dim; ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
    if (!sys.domain.contains(x)) continue;
    Vec xp;
    if (closed) {
      xp = sys.closed_form_flow(tau, x);
      if (!xp.allFinite() || !sys.domain.contains(xp)) continue;
    } else {
      try {
        xp = flow_for(sys, x, tau, dt);
      } catch (const Error&) {
        continue;  // left the domain or diverged within tau: resample
      }
    }
    out.x.col(filled) = x;
    out.xplus.col(filled) = xp;
    ++filled;
  }
  return out;
}

namespace {

struct EigenBlock {
  bool complex_pair = false;
  double magnitude = 0.0;
  double angle = 0.0;
  Eigen::Index index = 0;  // position in the solver output (tie-break)
  std::complex<double> lambda;
  Eigen::VectorXcd v;  // left eigenvector of K_full
};

// Rotates a unit complex vector so its largest-modulus entry is real and
// positive; makes the (u, v) real pair deterministic.
void canonicalize_phase(Eigen::VectorXcd& v) {
  Eigen::Index at = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      at = i;
    }
  }
  if (best <= 0.0) return;
  v *= std::conj(v[at]) / std::abs(v[at]);
}

}  // namespace

LearnedEmbedding fit_embedding(const SamplePairs& samples,
                               const Dictionary& dictionary, int m) {
  const int p = dictionary.size();
  const int n = samples.n;
  if (m < 1 || m > p)
    fail(ErrorCode::invalid_argument, "need 1 <= m <= dictionary size");
  if (dictionary.dim() != static_cast<int>(samples.x.rows()))
    fail(ErrorCode::invalid_argument, "dictionary/sample dimension mismatch");

  Mat psi_x(n, p), psi_y(n, p);
  {
    Vec buf(p);
    for (int l = 0; l < n; ++l) {
      dictionary.eval(samples.x.col(l), buf);
      psi_x.row(l) = buf.transpose();
      dictionary.eval(samples.xplus.col(l), buf);
      psi_y.row(l) = buf.transpose();
    }
  }

  // Stage 1: K_full minimizing sum_l ||psi(x+) - K psi(x)||^2.
  LstsqResult ls = lstsq(psi_x, psi_y);
  if (ls.rank < p)
    fail(ErrorCode::degenerate_data,
         "data matrix is rank deficient: numerical rank " +
             std::to_string(ls.rank) + " < " + std::to_string(p));
  const Mat k_full = ls.solution.transpose();

  // Stage 2: left eigendirections of K_full.
  Eigen::EigenSolver<Mat> es(k_full.transpose());
  if (es.info() != Eigen::Success)
    fail(ErrorCode::internal, "eigendecomposition failed");
  const Eigen::VectorXcd lambdas = es.eigenvalues();
  const Eigen::MatrixXcd vectors = es.eigenvectors();

  // The constant observable satisfies the one-step relation exactly with
  // eigenvalue 1; identify it by near-unit eigenvalue plus (near-)zero sample
  // variance of the eigen-observable, and keep it out of the reduction.
  Eigen::Index constant_index = -1;
  if (dictionary.has_constant()) {
    double best_var = 1e300;
    const int probe = std::min(n, 256);
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
      if (std::abs(lambdas[i] - std::complex<double>(1.0, 0.0)) > 1e-6) continue;
      std::complex<double> mean(0.0, 0.0);
      std::vector<std::complex<double>> vals(static_cast<std::size_t>(probe));
      for (int l = 0; l < probe; ++l) {
        std::complex<double> g(0.0, 0.0);
        for (int b = 0; b < p; ++b) g += vectors(b, i) * psi_x(l, b);
        vals[static_cast<std::size_t>(l)] = g;
        mean += g;
      }
      mean /= static_cast<double>(probe);
      double var = 0.0;
      for (const auto& g : vals) var += std::norm(g - mean);
      var /= static_cast<double>(probe);
      const double rel = var / std::max(1.0, std::norm(mean));
      if (rel < 1e-12 && var < best_var) {
        best_var = var;
        constant_index = i;
      }
    }
  }

  std::vector<EigenBlock> blocks;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (i == constant_index) continue;
    const std::complex<double> lam = lambdas[i];
    if (lam.imag() < -1e-14) continue;  // conjugate partner carries the pair
    EigenBlock b;
    b.complex_pair = lam.imag() > 1e-14;
    b.magnitude = std::abs(lam);
    b.angle = std::abs(std::arg(lam));
    b.index = i;
    b.lambda = lam;
    b.v = vectors.col(i);
    blocks.push_back(std::move(b));
  }
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const EigenBlock& a, const EigenBlock& b) {
                     if (a.magnitude != b.magnitude)
                       return a.magnitude > b.magnitude;
                     if (a.angle != b.angle) return a.angle < b.angle;
                     return a.index < b.index;
                   });

  LearnedEmbedding emb;
  emb.dictionary = dictionary;
  emb.tau = samples.tau;
  emb.n = n;
  emb.excluded_constant = constant_index >= 0;
  emb.w = Mat::Zero(m, p);
  emb.k = Mat::Zero(m, m);

  auto unit_real_row = [](const Eigen::VectorXcd& v) {
    Vec u = v.real();
    const double unorm = u.norm();
    if (unorm > 0) u /= unorm;
    // Deterministic sign: largest-|entry| positive.
    Eigen::Index at = 0;
    u.cwiseAbs().maxCoeff(&at);
    if (u[at] < 0) u = -u;
    return u;
  };

  int row = 0;
  std::vector<char> consumed(blocks.size(), 0);
  for (std::size_t bi = 0; bi < blocks.size() && row < m; ++bi) {
    const EigenBlock& b = blocks[bi];
    const int need = b.complex_pair ? 2 : 1;
    if (row + need > m) continue;  // a pair may not split; try later blocks
    Eigen::VectorXcd v = b.v / b.v.norm();
    canonicalize_phase(v);
    if (b.complex_pair) {
      emb.w.row(row) = v.real().transpose();
      emb.w.row(row + 1) = v.imag().transpose();
      emb.k(row, row) = b.lambda.real();
      emb.k(row, row + 1) = -b.lambda.imag();
      emb.k(row + 1, row) = b.lambda.imag();
      emb.k(row + 1, row + 1) = b.lambda.real();
    } else {
      emb.w.row(row) = unit_real_row(v).transpose();
      emb.k(row, row) = b.lambda.real();
    }
    consumed[bi] = 1;
    row += need;
  }
  if (row == m - 1) {
    // Everything left pairs up. Fill the final slot with the real part of the
    // best remaining pair and its Re(lambda); the dropped off-block coupling
    // is O(Im lambda), small at the short sampling times where this happens.
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      if (consumed[bi] || !blocks[bi].complex_pair) continue;
      Eigen::VectorXcd v = blocks[bi].v / blocks[bi].v.norm();
      canonicalize_phase(v);
      emb.w.row(row) = unit_real_row(v).transpose();
      emb.k(row, row) = blocks[bi].lambda.real();
      emb.split_pair = true;
      ++row;
      break;
    }
  }
  if (row < m)
    fail(ErrorCode::degenerate_data,
         "could not assemble " + std::to_string(m) +
             " real directions from the spectrum (got " + std::to_string(row) +
             ")");

  double sq = 0.0;
  {
    Vec fx(m), fy(m), buf(p);
    for (int l = 0; l < n; ++l) {
      dictionary.eval(samples.x.col(l), buf);
      fx = emb.w * buf;
      dictionary.eval(samples.xplus.col(l), buf);
      fy = emb.w * buf;
      sq += (fy - emb.k * fx).squaredNorm();
    }
  }
  emb.fit_residual = std::sqrt(sq / static_cast<double>(n));

  emb.a = logm_principal(emb.k);
  if (emb.a) {
    *emb.a /= samples.tau;
  } else {
    emb.log_failed = true;
  }
  return emb;
}

namespace {

nlohmann::json matrix_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string embedding_json(const LearnedEmbedding& emb) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["dictionary"] = emb.dictionary.spec_json();
  j["tau"] = emb.tau;
  j["N"] = emb.n;
  j["m"] = emb.k.rows();
  j["W"] = matrix_json(emb.w);
  j["K"] = matrix_json(emb.k);
  j["A"] = emb.a ? matrix_json(*emb.a) : nlohmann::json();
  j["log_failed"] = emb.log_failed;
  j["excluded_constant"] = emb.excluded_constant;
  j["split_pair"] = emb.split_pair;
  j["fit_residual"] = emb.fit_residual;
  return j.dump(2) + "\n";
}

double collapse_metric(const std::function<Vec(const Vec&)>& f,
                       const std::vector<LimitSet>& limit_sets,
                       const std::vector<Vec>& box_sample) {
  if (limit_sets.size() < 2)
    fail(ErrorCode::invalid_argument, "collapse metric needs >= 2 limit sets");
  if (box_sample.empty())
    fail(ErrorCode::invalid_argument, "box_sample must be nonempty");

  std::vector<Vec> image;
  image.reserve(box_sample.size());
  for (const Vec& x : box_sample) image.push_back(f(x));
  const double spread = diameter(image);
  if (spread < 1e-12) return 0.0;

  std::vector<std::vector<Vec>> set_images(limit_sets.size());
  for (std::size_t i = 0; i < limit_sets.size(); ++i)
    for (const Vec& rep : limit_sets[i].representatives)
      set_images[i].push_back(f(rep));

  double worst = 0.0;
  for (std::size_t i = 0; i < set_images.size(); ++i)
    for (std::size_t j = i + 1; j < set_images.size(); ++j)
      worst = std::max(worst, hausdorff(set_images[i], set_images[j]));
  return std::clamp(worst / spread, 0.0, 1.0);
}

double collapse_metric(const LearnedEmbedding& emb,
                       const std::vector<LimitSet>& limit_sets,
                       const std::vector<Vec>& box_sample) {
  return collapse_metric([&](const Vec& x) { return emb.eval(x); }, limit_sets,
                         box_sample);
}

CollapseReport sweep(const SystemDef& sys, const Dictionary& dictionary, int m,
                     const std::vector<double>& tau_list,
                     const std::vector<int>& n_list,
                     const std::vector<std::uint64_t>& seeds, const Box& box,
                     const LimitParams& params) {
  if (tau_list.empty() || n_list.empty() || seeds.empty())
    fail(ErrorCode::invalid_argument, "sweep lists must be nonempty");

  const std::vector<LimitSet> targets = reference_limit_sets(sys, params);
  const bool applicable = targets.size() >= 2;
  const std::vector<Vec> box_sample =
      sample_box_points(box, 1000, mix_seed(0x626f7873616d70ULL, 0));

  CollapseReport report;
  report.cells.resize(tau_list.size() * n_list.size() * seeds.size());
  const std::size_t per_tau = n_list.size() * seeds.size();

  parallel_for(report.cells.size(), [&](std::size_t idx) {
    const std::size_t ti = idx / per_tau;
    const std::size_t ni = (idx % per_tau) / seeds.size();
    const std::size_t si = idx % seeds.size();
    CollapseCell& cell = report.cells[idx];
    cell.tau = tau_list[ti];
    cell.n = n_list[ni];
    cell.seed = seeds[si];
    if (!applicable) {
      cell.status = "not_applicable";
      return;
    }
    try {
      const std::uint64_t cell_seed =
          mix_seed(mix_seed(seeds[si], ti), static_cast<std::uint64_t>(cell.n));
      const SamplePairs pairs =
          sample_pairs(sys, box, cell.n, cell.tau, cell_seed, params.dt);
      const LearnedEmbedding emb = fit_embedding(pairs, dictionary, m);
      std::vector<Vec> image;
      image.reserve(box_sample.size());
      for (const Vec& x : box_sample) image.push_back(emb.eval(x));
      cell.spread = diameter(image);
      cell.fit_residual = emb.fit_residual;
      cell.collapse_metric = collapse_metric(emb, targets, box_sample);
      cell.status = "ok";
    } catch (const Error& e) {
      cell.status = std::string("failed: ") + e.what();
    }
  });

  for (std::size_t ti = 0; ti < tau_list.size(); ++ti) {
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
      CollapseSummaryRow row;
      row.tau = tau_list[ti];
      row.n = n_list[ni];
      double sum = 0.0, sumsq = 0.0;
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        const CollapseCell& cell =
            report.cells[ti * per_tau + ni * seeds.size() + si];
        if (cell.status != "ok") continue;
        sum += cell.collapse_metric;
        sumsq += cell.collapse_metric * cell.collapse_metric;
        row.ok_cells += 1;
      }
      if (row.ok_cells > 0) {
        row.mean_metric = sum / row.ok_cells;
        const double var =
            std::max(0.0, sumsq / row.ok_cells - row.mean_metric * row.mean_metric);
        row.stddev_metric = std::sqrt(var);
      }
      report.summary.push_back(row);
    }
  }
  return report;
}

std::string collapse_report_csv(const CollapseReport& report) {
  std::ostringstream out;
  out << "tau,N,seed,fit_residual,collapse_metric,spread,status\n";
  for (const CollapseCell& c : report.cells) {
    out << fmt17(c.tau) << "," << c.n << "," << c.seed << ","
        << fmt17(c.fit_residual) << "," << fmt17(c.collapse_metric) << ","
        << fmt17(c.spread) << "," << c.status << "\n";
  }
  return out.str();
}

std::string collapse_report_json(const CollapseReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const CollapseCell& c : report.cells) {
    cells.push_back({{"tau", c.tau},
                     {"N", c.n},
                     {"seed", c.seed},
                     {"fit_residual", c.fit_residual},
                     {"collapse_metric", c.collapse_metric},
                     {"spread", c.spread},
                     {"status", c.status}});
  }
  auto& summary = j["summary"] = nlohmann::json::array();
  for (const CollapseSummaryRow& r : report.summary) {
    summary.push_back({{"tau", r.tau},
                       {"N", r.n},
                       {"mean_collapse_metric", r.mean_metric},
                       {"stddev_collapse_metric", r.stddev_metric},
                       {"ok_cells", r.ok_cells}});
  }
  return j.dump(2) + "\n";
}

ExclusionReport exclusion_test(const SystemDef& sys,
                               const ImmersionCandidate& f_fixed, double tau,
                               const std::vector<int>& n_list, const Box& box,
                               const std::vector<std::uint64_t>& seeds,
                               double dt, const LimitParams& params) {
  if (n_list.empty() || seeds.empty())
    fail(ErrorCode::invalid_argument, "exclusion test lists must be nonempty");
  for (int n : n_list)
    if (n < 1) fail(ErrorCode::invalid_argument, "N must be >= 1");

  ExclusionReport report;
  report.candidate = f_fixed.name;
  report.tau = tau;

  // Informational precondition: does the fixed map separate the limit sets
  // that lie inside its own domain?
  {
    const std::vector<LimitSet> in_domain =
        filter_to_domain(reference_limit_sets(sys, params), f_fixed.domain);
    if (in_domain.size() >= 2) {
      const CollapseWitness w = collapse_witness(f_fixed, in_domain);
      report.distinguishes_limit_sets = w.max_distance > 1e-6;
    }
  }

  std::vector<int> ns = n_list;
  const int n_max = *std::max_element(ns.begin(), ns.end());
  const int m = f_fixed.target_dim;

  std::vector<Mat> fx_all(seeds.size()), fy_all(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t si) {
    const SamplePairs pairs =
        sample_pairs(sys, box, n_max, tau, seeds[si], dt);
    Mat fx(m, n_max), fy(m, n_max);
    for (int l = 0; l < n_max; ++l) {
      fx.col(l) = f_fixed.eval(pairs.x.col(l));
      fy.col(l) = f_fixed.eval(pairs.xplus.col(l));
    }
    fx_all[si] = std::move(fx);
    fy_all[si] = std::move(fy);
  });

  for (int n : ns) {
    ExclusionRow row;
    row.n = n;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const Mat fx = fx_all[si].leftCols(n);
      const Mat fy = fy_all[si].leftCols(n);
      const Mat k = lstsq(fx.transpose(), fy.transpose()).solution.transpose();
      const double rms =
          std::sqrt((fy - k * fx).squaredNorm() / static_cast<double>(n));
      row.residuals.push_back(rms);
      row.mean_residual += rms;
    }
    row.mean_residual /= static_cast<double>(seeds.size());
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string exclusion_report_csv(const ExclusionReport& report) {
  std::ostringstream out;
  out << "N,seed_index,rms_residual\n";
  for (const ExclusionRow& row : report.rows)
    for (std::size_t si = 0; si < row.residuals.size(); ++si)
      out << row.n << "," << si << "," << fmt17(row.residuals[si]) << "\n";
  return out.str();
}

std::string exclusion_report_json(const ExclusionReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["candidate"] = report.candidate;
  j["tau"] = report.tau;
  j["distinguishes_limit_sets"] = report.distinguishes_limit_sets;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const ExclusionRow& row : report.rows) {
    rows.push_back({{"N", row.n},
                    {"residuals", row.residuals},
                    {"mean_residual", row.mean_residual}});
  }
  return j.dump(2) + "\n";
}

DenseFitReport dense_identity_probe(const SystemDef& sys,
                                    const ImmersionCandidate& f_fixed,
                                    const std::vector<double>& taus, int n,
                                    const Box& box, int heldout_points,
                                    double t_max, std::uint64_t seed,
                                    double dt) {
  if (taus.empty()) fail(ErrorCode::invalid_argument, "tau list is empty");

  DenseFitReport report;
  report.taus = taus;
  report.residuals.resize(taus.size());

  const int m = f_fixed.target_dim;
  std::size_t smallest = 0;
  Mat k_smallest;
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    const SamplePairs pairs =
        sample_pairs(sys, box, n, taus[ti], mix_seed(seed, ti), dt);
    Mat fx(m, n), fy(m, n);
    for (int l = 0; l < n; ++l) {
      fx.col(l) = f_fixed.eval(pairs.x.col(l));
      fy.col(l) = f_fixed.eval(pairs.xplus.col(l));
    }
    const Mat k = lstsq(fx.transpose(), fy.transpose()).solution.transpose();
    report.residuals[ti] =
        std::sqrt((fy - k * fx).squaredNorm() / static_cast<double>(n));
    if (taus[ti] <= taus[smallest]) {
      smallest = ti;
      k_smallest = k;
    }
  }

  if (auto log_k = logm_principal(k_smallest))
    report.a_estimate = *log_k / taus[smallest];
  if (!report.a_estimate) return report;

  Rng rng(mix_seed(seed, 0xbeef));
  int accepted = 0;
  long attempts = 0;
  while (accepted < heldout_points && attempts < 1000L * heldout_points) {
    ++attempts;
    Vec xi(sys.dim);
    for (int i = 0; i < sys.dim; ++i) xi[i] = rng.uniform(box.lo[i], box.hi[i]);
    if (!sys.domain.contains(xi) || !f_fixed.domain.contains(xi)) continue;
    const double t = rng.uniform(0.0, t_max);
    Vec x_t;
    try {
      x_t = flow_sample(sys, xi, t, dt);
    } catch (const Error&) {
      continue;
    }
    if (!f_fixed.domain.contains(x_t)) continue;
    const Vec lhs = f_fixed.eval(x_t);
    const Vec rhs = expm(*report.a_estimate * t) * f_fixed.eval(xi);
    report.heldout_max_residual =
        std::max(report.heldout_max_residual, (lhs - rhs).norm());
    ++accepted;
  }
  return report;
}

}  // namespace koop
