#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "core/error.hpp"
#include "core/learning.hpp"
#include "core/rng.hpp"

using namespace koop;

namespace {
Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
LimitSet point_set(const Vec& p) {
  LimitSet ls;
  ls.kind = LimitSet::Kind::equilibrium;
  ls.representatives = {p};
  ls.source_state = p;
  return ls;
}
SamplePairs prefix_of(const SamplePairs& pairs, int n) {
  SamplePairs out;
  out.tau = pairs.tau;
  out.n = n;
  out.box = pairs.box;
  out.seed = pairs.seed;
  out.x = pairs.x.leftCols(n);
  out.xplus = pairs.xplus.leftCols(n);
  return out;
}
}  // namespace

TEST_CASE("monomial dictionary enumerates constant, coordinates, products") {
  const Dictionary dict = Dictionary::monomials(2, 4);
  CHECK(dict.size() == 15);  // C(4+2, 2)
  CHECK(dict.has_constant());
  CHECK(dict.labels()[0] == "1");
  CHECK(dict.labels()[1] == "x1");
  CHECK(dict.labels()[2] == "x2");
  const Vec psi = dict.eval(v2(2.0, 3.0));
  CHECK(psi[0] == 1.0);
  CHECK(psi[1] == 2.0);
  CHECK(psi[2] == 3.0);
  // highest block contains x1^4 .. x2^4
  CHECK(psi[dict.size() - 1] == doctest::Approx(81.0));  // x2^4
  CHECK(psi[dict.size() - 5] == doctest::Approx(16.0));  // x1^4
}

TEST_CASE("gaussian rbf dictionary evaluates the kernel") {
  const Dictionary dict =
      Dictionary::gaussian_rbf({v2(0.0, 0.0), v2(1.0, 0.0)}, 0.5);
  CHECK(dict.size() == 2);
  CHECK(!dict.has_constant());
  const Vec psi = dict.eval(v2(1.0, 0.0));
  CHECK(psi[1] == doctest::Approx(1.0));
  CHECK(psi[0] == doctest::Approx(std::exp(-1.0 / (2.0 * 0.25))));
}

TEST_CASE("sample pairs on a degenerate box reproduce the scalar flow") {
  const SystemDef& sys = find_system("linear1d_fast");
  const SamplePairs pairs =
      sample_pairs(sys, Box::of({1.0}, {1.0}), 1, 0.1, 3);
  CHECK(pairs.x(0, 0) == 1.0);
  CHECK(pairs.xplus(0, 0) == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));
}

TEST_CASE("sample pairs reject tau <= 0 and N < 1") {
  const SystemDef& sys = find_system("duffing");
  const Box box = Box::of({-1.0, -1.0}, {1.0, 1.0});
  CHECK_THROWS_AS((void)sample_pairs(sys, box, 10, 0.0, 1), Error);
  CHECK_THROWS_AS((void)sample_pairs(sys, box, 0, 0.1, 1), Error);
}

TEST_CASE("a box disjoint from the domain raises empty_domain") {
  const SystemDef& sine = find_system("sine1d");  // domain [0, pi]
  try {
    (void)sample_pairs(sine, Box::of({-5.0}, {-4.0}), 5, 0.1, 1);
    FAIL("expected empty_domain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_domain);
  }
}

TEST_CASE("sampling is deterministic given the seed") {
  const SystemDef& sys = find_system("duffing");
  const Box box = Box::of({-2.0, -2.0}, {2.0, 2.0});
  const SamplePairs a = sample_pairs(sys, box, 64, 0.1, 42);
  const SamplePairs b = sample_pairs(sys, box, 64, 0.1, 42);
  CHECK(a.x == b.x);
  CHECK(a.xplus == b.xplus);
  for (int l = 0; l < a.n; ++l) CHECK(box.contains(a.x.col(l)));

  const LearnedEmbedding e1 = fit_embedding(a, Dictionary::monomials(2, 2), 2);
  const LearnedEmbedding e2 = fit_embedding(b, Dictionary::monomials(2, 2), 2);
  CHECK(e1.w == e2.w);
  CHECK(e1.k == e2.k);
}

TEST_CASE("linear system with identity dictionary recovers its generator") {
  const SystemDef& sys = find_system("linear1d_fast");
  const SamplePairs pairs = sample_pairs(sys, Box::of({-1.0}, {1.0}), 50, 0.1, 31);
  const LearnedEmbedding emb =
      fit_embedding(pairs, Dictionary::monomials(1, 1), 1);
  CHECK(emb.k(0, 0) == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));
  CHECK(emb.excluded_constant);
  CHECK(emb.fit_residual <= 1e-10);
  REQUIRE(emb.a.has_value());
  CHECK(std::abs((*emb.a)(0, 0) + 2.0) <= 1e-8);
}

TEST_CASE("rotation system recovers the skew generator through the pair") {
  const SystemDef& sys = find_system("harmonic2d");
  const SamplePairs pairs =
      sample_pairs(sys, Box::of({-1.0, -1.0}, {1.0, 1.0}), 200, 0.1, 32);
  const LearnedEmbedding emb =
      fit_embedding(pairs, Dictionary::monomials(2, 1), 2);
  Mat expect(2, 2);
  expect << 0, -1, 1, 0;
  CHECK(emb.fit_residual <= 1e-10);
  REQUIRE(emb.a.has_value());
  CHECK((*emb.a - expect).norm() <= 1e-6);
}

TEST_CASE("oracle dictionary on the planar limit cycle recovers the blocks") {
  const SystemDef& sys = find_system("limit_cycle2d");
  const Dictionary dict = Dictionary::custom(
      2,
      {[](const Vec& x) { return x[0] / x.norm(); },
       [](const Vec& x) { return x[1] / x.norm(); },
       [](const Vec& x) { return 1.0 / x.squaredNorm() - 1.0; }},
      {"x1/|x|", "x2/|x|", "|x|^-2-1"});
  const SamplePairs pairs =
      sample_pairs(sys, Box::of({0.3, 0.3}, {1.8, 1.8}), 500, 0.1, 33);
  const LearnedEmbedding emb = fit_embedding(pairs, dict, 3);
  CHECK(emb.fit_residual <= 1e-6);
  Mat expect = Mat::Zero(3, 3);
  expect(0, 1) = -1;
  expect(1, 0) = 1;
  expect(2, 2) = -2;
  REQUIRE(emb.a.has_value());
  CHECK((*emb.a - expect).norm() <= 1e-4);
}

TEST_CASE("half-turn rotation data has no principal log: A absent, flagged") {
  // At tau = pi the one-step matrix of the rotation system is -I.
  const SystemDef& sys = find_system("harmonic2d");
  const SamplePairs pairs =
      sample_pairs(sys, Box::of({-1.0, -1.0}, {1.0, 1.0}), 100, M_PI, 8);
  const LearnedEmbedding emb =
      fit_embedding(pairs, Dictionary::monomials(2, 1), 2);
  CHECK(emb.k(0, 0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(emb.log_failed);
  CHECK(!emb.a.has_value());
}

TEST_CASE("rank-deficient data raises degenerate_data naming the rank") {
  const SystemDef& sys = find_system("cubic1d");
  const SamplePairs pairs = sample_pairs(sys, Box::of({0.1}, {0.9}), 2, 0.1, 9);
  try {
    (void)fit_embedding(pairs, Dictionary::monomials(1, 3), 2);
    FAIL("expected degenerate_data");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_data);
    CHECK(std::string(e.what()).find("rank") != std::string::npos);
  }
}

TEST_CASE("fit residual is non-decreasing on nested sample prefixes") {
  const SystemDef& sys = find_system("duffing");
  const SamplePairs pairs =
      sample_pairs(sys, Box::of({-2.0, -2.0}, {2.0, 2.0}), 3200, 0.1, 100);
  double prev = -1.0;
  for (int n : {200, 800, 3200}) {
    const LearnedEmbedding emb =
        fit_embedding(prefix_of(pairs, n), Dictionary::monomials(2, 2), 2);
    CHECK(emb.fit_residual >= prev - 1e-15);
    prev = emb.fit_residual;
  }
}

TEST_CASE("fixed-map sum of squares grows with nested constraints") {
  // For a fixed F the optimal SSE over a superset of the data can never be
  // smaller: check rms^2 * N is monotone per seed.
  const SystemDef& sys = find_system("duffing");
  const ImmersionCandidate coord = coordinate_immersion(sys, 0);
  const ExclusionReport rep =
      exclusion_test(sys, coord, 0.1, {100, 400, 1600, 6400},
                     Box::of({-2.0, -2.0}, {2.0, 2.0}), {1, 2, 3});
  for (std::size_t si = 0; si < 3; ++si) {
    double prev = -1.0;
    for (const ExclusionRow& row : rep.rows) {
      const double sse =
          row.residuals[si] * row.residuals[si] * static_cast<double>(row.n);
      CHECK(sse >= prev - 1e-12);
      prev = sse;
    }
  }
}

TEST_CASE("collapse metric worked values") {
  const auto sample =
      sample_box_points(Box::of({-2.0, -2.0}, {2.0, 2.0}), 1000, 5);

  // Constant map: zero spread scores zero by convention.
  auto constant = [](const Vec&) { return v1(3.0); };
  CHECK(collapse_metric(constant, {point_set(v2(1, 0)), point_set(v2(-1, 0))},
                        sample) == 0.0);

  // First coordinate on Duffing: distance 2 over spread 4 (corners included).
  auto first = [](const Vec& x) { return v1(x[0]); };
  CHECK(collapse_metric(first,
                        {point_set(v2(1, 0)), point_set(v2(-1, 0)),
                         point_set(v2(0, 0))},
                        sample) == doctest::Approx(0.5).epsilon(1e-12));

  // The exact cubic immersion sends both sinks to the same image.
  const ImmersionCandidate& cubic = find_immersion("cubic1d");
  const auto sample1d = sample_box_points(Box::of({0.2}, {2.0}), 1000, 6);
  auto cubic_map = [&](const Vec& x) { return cubic.eval(x); };
  CHECK(collapse_metric(cubic_map,
                        {point_set(v1(-1.0)), point_set(v1(1.0))},
                        sample1d) <= 1e-6);

  CHECK_THROWS_AS((void)collapse_metric(first, {point_set(v2(1, 0))}, sample),
                  Error);
}

TEST_CASE("single-cell sweep equals the direct fit plus metric") {
  const SystemDef& sys = find_system("duffing");
  const Dictionary dict = Dictionary::monomials(2, 2);
  const Box box = Box::of({-2.0, -2.0}, {2.0, 2.0});
  const CollapseReport rep = sweep(sys, dict, 2, {0.1}, {200}, {7}, box);
  REQUIRE(rep.cells.size() == 1);
  CHECK(rep.cells[0].status == "ok");

  const std::uint64_t cell_seed = mix_seed(mix_seed(7, 0), 200);
  const SamplePairs pairs = sample_pairs(sys, box, 200, 0.1, cell_seed);
  const LearnedEmbedding emb = fit_embedding(pairs, dict, 2);
  CHECK(rep.cells[0].fit_residual == emb.fit_residual);
  const auto box_sample =
      sample_box_points(box, 1000, mix_seed(0x626f7873616d70ULL, 0));
  CHECK(rep.cells[0].collapse_metric ==
        collapse_metric(emb, reference_limit_sets(sys), box_sample));
}

TEST_CASE("sweep marks single-limit-set systems not applicable") {
  const SystemDef& sys = find_system("linear1d_stable");
  const CollapseReport rep = sweep(sys, Dictionary::monomials(1, 2), 1, {0.1},
                                   {50}, {1}, Box::of({-1.0}, {1.0}));
  REQUIRE(rep.cells.size() == 1);
  CHECK(rep.cells[0].status == "not_applicable");
}

TEST_CASE("sweep records per-cell failures without aborting") {
  const SystemDef& sys = find_system("duffing");
  // N = 4 < p = 15 forces a rank-deficient fit in one cell.
  const CollapseReport rep =
      sweep(sys, Dictionary::monomials(2, 4), 5, {0.1}, {4, 400}, {1},
            Box::of({-2.0, -2.0}, {2.0, 2.0}));
  REQUIRE(rep.cells.size() == 2);
  CHECK(rep.cells[0].status.rfind("failed", 0) == 0);
  CHECK(rep.cells[1].status == "ok");
  const std::string csv = collapse_report_csv(rep);
  CHECK(csv.rfind("tau,N,seed,fit_residual,collapse_metric,spread,status\n",
                  0) == 0);
}

TEST_CASE("exclusion test rejects empty or nonpositive N lists") {
  const SystemDef& sys = find_system("duffing");
  const ImmersionCandidate coord = coordinate_immersion(sys, 0);
  const Box box = Box::of({-2.0, -2.0}, {2.0, 2.0});
  CHECK_THROWS_AS((void)exclusion_test(sys, coord, 0.1, {}, box, {1}), Error);
  CHECK_THROWS_AS((void)exclusion_test(sys, coord, 0.1, {0}, box, {1}), Error);
}

TEST_CASE("exact immersion stays in the zero-loss set at every N") {
  const SystemDef& sys = find_system("quadratic1d");
  const ImmersionCandidate& cand = find_immersion("quadratic1d");
  const ExclusionReport rep = exclusion_test(
      sys, cand, 0.1, {100, 1000}, Box::of({-3.0}, {0.9}), {61});
  for (const ExclusionRow& row : rep.rows) CHECK(row.mean_residual <= 1e-6);
  CHECK(!rep.distinguishes_limit_sets);  // only {-1} lies in the domain
}

TEST_CASE("embedding serialization round-trips the coefficients") {
  const SystemDef& sys = find_system("linear1d_fast");
  const SamplePairs pairs = sample_pairs(sys, Box::of({-1.0}, {1.0}), 50, 0.1, 31);
  const LearnedEmbedding emb =
      fit_embedding(pairs, Dictionary::monomials(1, 1), 1);
  const nlohmann::json j = nlohmann::json::parse(embedding_json(emb));
  CHECK(j["schema_version"] == 1);
  CHECK(j["dictionary"]["kind"] == "monomials");
  CHECK(j["K"][0][0].get<double>() == emb.k(0, 0));
  CHECK(j["W"][0][1].get<double>() == emb.w(0, 1));
  CHECK(j["A"][0][0].get<double>() == (*emb.a)(0, 0));
}
