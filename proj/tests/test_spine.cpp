// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "brw/error.hpp"
#include "brw/martingale.hpp"
#include "brw/spine.hpp"
#include "brw/stats.hpp"
#include "oracles.hpp"

using namespace brw;

namespace {

// Linear stand-in for the Gaussian renewal function, enough for support checks.
RenewalTable linear_table(double c0) {
  std::vector<double> u, h, zero;
  for (int k = 0; k <= 20; ++k) {
    u.push_back(k);
    h.push_back(1.0 + c0 * k);
    zero.push_back(0.0);
  }
  return RenewalTable(u, h, zero, u, zero, c0, 0.0, oracle::kGaussianTheta, 0.0);
}

}  // namespace

TEST_CASE("binary Q_alpha spines stay above the barrier with one brother per level") {
  const auto model = normalize_boundary(Family::BinaryGaussian);
  const auto table = linear_table(oracle::gaussian_c0(model.sigma2()));
  Rng rng(1);
  for (int r = 0; r < 100; ++r) {
    const auto s = sample_spine_qalpha(model, table, 1.0, 12, rng);
    REQUIRE(s.depth() == 12);
    CHECK(s.weight == 1.0);
    CHECK(s.ess.empty());
    for (double v : s.spine) CHECK(v >= -1.0);
    for (const auto& b : s.brothers) CHECK(b.size() == 1);
  }
  CHECK_THROWS_AS(sample_spine_qalpha(model, table, -1.0, 3, rng), Error);
}

TEST_CASE("Q_beta spine increments have mean s2 (1 - beta)") {
  const auto model = normalize_boundary(Family::BinaryGaussian);
  Rng rng(2);
  std::vector<double> inc;
  for (int r = 0; r < 20000; ++r) {
    const auto s = sample_spine_qbeta(model, 0.5, 3, rng);
    inc.push_back(s.spine.back() / 3.0);
  }
  const auto e = mean_and_se(inc);
  CHECK(std::fabs(e.mean - oracle::kLn2) < 4.0 * e.standard_error);
  CHECK_THROWS_AS(sample_spine_qbeta(model, std::nan(""), 3, rng), Error);
}

TEST_CASE("resampled Q_beta spines agree with exact ones") {
  const auto model = normalize_boundary(Family::PoissonGaussian, 1.0);
  SpineOptions sir;
  sir.method = TiltMethod::ImportanceResampling;
  sir.batch = 256;
  Rng rng(3);
  std::vector<double> exact, resampled;
  for (int r = 0; r < 4000; ++r) {
    exact.push_back(sample_spine_qbeta(model, 0.7, 4, rng).spine.back());
    const auto s = sample_spine_qbeta(model, 0.7, 4, rng, sir);
    CHECK(s.ess.size() == 4);
    resampled.push_back(s.spine.back());
  }
  CHECK(ks_two_sample(exact, resampled) < 0.04);
}

TEST_CASE("spine tree carries the spine as a leaf lineage") {
  const auto model = normalize_boundary(Family::PoissonGaussian, 1.0);
  const auto table = linear_table(oracle::gaussian_c0(1.0));
  Rng rng(4);
  const auto s = sample_spine_qalpha(model, table, 0.5, 6, rng);
  const auto tree = grow_spine_tree(model, s, 99);
  REQUIRE(tree.forest.depth() == 6);
  CHECK(tree.spine_leaf.generation == 6);
  for (std::size_t k = 1; k <= 6; ++k) {
    CHECK(tree.forest.ancestor_position(tree.spine_leaf, k) == s.spine[k]);
  }
  const auto again = grow_spine_tree(model, s, 99);
  CHECK(again.forest.total_particles() == tree.forest.total_particles());
}

TEST_CASE("Q_alpha trees on the lattice have density D_alpha / h_alpha(0)") {
  // E_Q[F] = E_P[F D_n^(alpha)] / h_alpha(0), with F the population size.
  const auto model = oracle::lattice_model();
  const auto table = oracle::lattice_table();
  const double alpha = 1.0;
  const std::size_t n = 4;
  std::vector<double> q_side, p_side;
  Rng rng(5);
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const auto s = sample_spine_qalpha(model, table, alpha, n, rng);
    for (double v : s.spine) REQUIRE(v >= -alpha);
    const auto tree = grow_spine_tree(model, s, stream_key(6, i));
    q_side.push_back(static_cast<double>(tree.forest.leaves().size()));
    const Forest f = simulate(model, n, stream_key(7, i));
    const auto series = compute_series(f, {}, model, alpha, &table);
    p_side.push_back(static_cast<double>(f.leaves().size()) * series.d_alpha[n] /
                     table.h_alpha(alpha, 0.0));
  }
  const auto q = mean_and_se(q_side);
  const auto p = mean_and_se(p_side);
  CHECK(std::fabs(q.mean - p.mean) < 4.0 * std::hypot(q.standard_error, p.standard_error));
}

TEST_CASE("lattice spine follows the conditioned walk") {
  const auto model = oracle::lattice_model();
  const auto table = oracle::lattice_table();
  Rng rng(8);
  std::vector<double> spine_end, walk_end;
  for (int r = 0; r < 10000; ++r) {
    spine_end.push_back(sample_spine_qalpha(model, table, 0.0, 8, rng).spine.back());
    walk_end.push_back(conditioned_walk(model, table, 0.0, 8, rng).back());
  }
  const auto a = mean_and_se(spine_end);
  const auto b = mean_and_se(walk_end);
  CHECK(std::fabs(a.mean - b.mean) < 4.0 * std::hypot(a.standard_error, b.standard_error));
}

TEST_CASE("spine writers") {
  const auto model = normalize_boundary(Family::PoissonGaussian, 1.0);
  Rng rng(9);
  SpineOptions sir;
  sir.method = TiltMethod::ImportanceResampling;
  const auto s = sample_spine_qbeta(model, 1.0, 3, rng, sir);
  std::ostringstream csv, diag;
  write_spine_csv(csv, s);
  CHECK(csv.str().rfind("level,spine_V,n_brothers,brother_Vs\n0,0,0,\n", 0) == 0);
  write_spine_diagnostics(diag, s);
  std::size_t lines = 0;
  std::string line;
  std::istringstream in(diag.str());
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 4);
  CHECK(diag.str().find("\"exact\":false") != std::string::npos);
}
