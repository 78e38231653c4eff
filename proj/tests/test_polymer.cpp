// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "brw/error.hpp"
#include "brw/polymer.hpp"
#include "brw/stats.hpp"
#include "oracles.hpp"

using namespace brw;

TEST_CASE("overlap recursion equals the quadratic double loop") {
  const auto model = normalize_boundary(Family::PoissonGaussian, 1.0);
  const std::vector<double> deltas = {0.0, 0.1, 0.2, 1.0 / 3.0, 0.5, 0.75, 0.99, 1.0, 1.5};
  for (std::size_t r = 0; r < 30; ++r) {
    const Forest f = simulate_surviving(model, 1 + r % 6, 17, r);
    const auto reports = overlap_pair_mass(f, deltas);
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      const double brute = oracle::brute_pair_mass(f, deltas[k]);
      CHECK(reports[k].pair_mass == doctest::Approx(brute).epsilon(1e-12));
    }
  }
}

TEST_CASE("overlap pair mass edge cases and monotonicity") {
  const auto model = normalize_boundary(Family::BinaryGaussian);
  const Forest f = simulate(model, 8, 4);
  CHECK(overlap_pair_mass(f, 0.0).pair_mass == doctest::Approx(1.0).epsilon(1e-15));
  const auto diag = overlap_pair_mass(f, 2.0);
  CHECK(diag.level == 9);
  double sq = 0.0;
  for (double w : oracle::enumerated_polymer_weights(f, 1.0)) sq += w * w;
  CHECK(diag.pair_mass == doctest::Approx(sq).epsilon(1e-12));
  double prev = 1.0;
  for (double delta = 0.0; delta <= 1.0; delta += 0.125) {
    const double m = overlap_pair_mass(f, delta).pair_mass;
    CHECK(m <= prev + 1e-15);
    CHECK(m >= 0.0);
    prev = m;
  }
  CHECK_THROWS_AS(overlap_pair_mass(f, -0.1), Error);
}

TEST_CASE("polymer sampler matches enumerated weights") {
  const auto model = normalize_boundary(Family::PoissonGaussian, 1.5);
  for (std::size_t r = 0; r < 5; ++r) {
    const Forest f = simulate_surviving(model, 3, 29, r);
    for (double beta : {0.5, 1.0}) {
      const auto p = oracle::enumerated_polymer_weights(f, beta);
      Rng rng(stream_key(31, r));
      const auto draws = sample_polymer(f, beta, model, 20000, rng);
      std::vector<double> counts(p.size(), 0.0);
      for (const auto& d : draws) {
        REQUIRE(d.node.generation == 3);
        counts[d.node.index] += 1.0;
      }
      CHECK(chi_square(counts, p).p_value > 0.001);
      const auto& tr = draws.front().trajectory;
      CHECK(tr.values().back() == f.leaves().position[draws.front().node.index]);
    }
  }
}

TEST_CASE("polymer functionals") {
  const auto model = normalize_boundary(Family::BinaryGaussian);
  const Forest f = simulate(model, 6, 8);
  const std::vector<double> grid = {0.5, 1.0};
  const auto one = [](std::span<const double>) { return 1.0; };
  CHECK(polymer_functional(f, grid, one) == doctest::Approx(1.0).epsilon(1e-14));
  // Endpoint functional against a direct weighted sum.
  const auto end = [](std::span<const double> v) { return v[1]; };
  double direct = 0.0;
  const auto w = oracle::enumerated_polymer_weights(f, 1.0);
  for (std::size_t i = 0; i < w.size(); ++i) direct += w[i] * f.leaves().position[i] / std::sqrt(6.0);
  CHECK(polymer_functional(f, grid, end) == doctest::Approx(direct).epsilon(1e-12));
  const auto pts = polymer_points(f, grid);
  CHECK(pts.leaves() == 64);
  CHECK(pts.row(3)[1] == doctest::Approx(f.leaves().position[3] / std::sqrt(6.0)));
}

TEST_CASE("extinct forests are rejected") {
  const auto model = normalize_boundary(Family::PoissonGaussian, 0.2);
  SimulationOptions opt;
  opt.barrier_alpha = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Forest f = simulate(model, 6, seed, opt);
    if (f.alive()) continue;
    Rng rng(1);
    CHECK_THROWS_AS(sample_polymer(f, 1.0, model, 1, rng), Error);
    CHECK_THROWS_AS(overlap_pair_mass(f, 0.5), Error);
    return;
  }
  FAIL("no extinct forest found");
}
