// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "brw/error.hpp"
#include "brw/stats.hpp"
#include "brw/walk.hpp"
#include "oracles.hpp"

using namespace brw;

TEST_CASE("many-to-one step law") {
  SUBCASE("Gaussian families are centred with variance s2") {
    for (const auto& model : {normalize_boundary(Family::BinaryGaussian),
                              normalize_boundary(Family::PoissonGaussian, 1.7)}) {
      const ManyToOneLaw law(model);
      Rng rng(3);
      std::vector<double> x(100000);
      for (auto& v : x) v = law.sample(rng);
      const auto s = mean_and_se(x);
      CHECK(std::fabs(s.mean) < 4.0 * s.standard_error);
      CHECK(s.sd * s.sd == doctest::Approx(model.sigma2()).epsilon(0.02));
    }
  }
  SUBCASE("lattice steps are fair coin flips") {
    const auto model = oracle::lattice_model();
    const ManyToOneLaw law(model);
    Rng rng(4);
    const int reps = 100000;
    int up = 0;
    for (int i = 0; i < reps; ++i) {
      const double v = law.sample(rng);
      REQUIRE(std::fabs(v) == 1.0);
      up += v > 0.0;
    }
    CHECK(std::fabs(up - reps / 2.0) < 4.0 * std::sqrt(reps / 4.0));
  }
}

TEST_CASE("walk stays nonnegative with the Sparre Andersen probability") {
  const auto model = normalize_boundary(Family::BinaryGaussian);
  const ManyToOneLaw law(model);
  Rng rng(8);
  const std::size_t n = 6, reps = 200000;
  std::vector<double> stay(n, 0.0), path;
  for (std::size_t r = 0; r < reps; ++r) {
    sample_walk(law, n, rng, path);
    for (std::size_t k = 0; k < n && path[k] >= 0.0; ++k) stay[k] += 1.0;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double p = oracle::sparre_andersen(static_cast<unsigned>(k + 1));
    const double se = std::sqrt(p * (1.0 - p) / reps);
    INFO("n = " << k + 1);
    CHECK(std::fabs(stay[k] / reps - p) < 4.0 * se);
  }
}

TEST_CASE("many-to-one identity on the lattice model") {
  const auto model = oracle::lattice_model();
  // Population size: both sides have mean cosh(1)^n.
  const auto count = many_to_one_check(model, 4, [](std::span<const double>) { return 1.0; },
                                       40000, 12, 2);
  CHECK(count.agrees(4.0));
  CHECK(count.rhs.mean == doctest::Approx(std::pow(std::cosh(1.0), 4)).epsilon(0.02));
  const auto path_min = many_to_one_check(
      model, 4, [](std::span<const double> p) { return p[1] >= 0.0 ? p.back() : 0.0; }, 40000, 13,
      2);
  CHECK(path_min.agrees(4.0));
}

TEST_CASE("exact lattice table is harmonic") {
  const auto model = oracle::lattice_model();
  const auto table = oracle::lattice_table();
  for (double u : {0.0, 1.0, 3.0, 10.0}) {
    const auto check = harmonicity_check(model, table, u, 40000, 2);
    INFO("u = " << u);
    CHECK(check.z_score() < 4.0);
    CHECK(check.expectation.mean == doctest::Approx(1.0 + u).epsilon(0.02));
  }
}

TEST_CASE("renewal estimator recovers the lattice renewal function") {
  const auto model = oracle::lattice_model();
  RenewalOptions opt;
  opt.walks = 4000;
  opt.horizon = 100000;
  opt.survival_horizon = 2000;
  opt.enforce_horizon = false;
  opt.threads = 2;
  const auto table = estimate_renewal(model, uniform_grid(10.0, 1.0), opt, 5);
  CHECK(table.h0(0.0) == 1.0);
  for (std::size_t i = 1; i < table.u_grid().size(); ++i) {
    const double u = table.u_grid()[i];
    INFO("u = " << u);
    const double slack = 4.0 * table.standard_errors()[i] + table.tail_bias()[i];
    CHECK(std::fabs(table.h0_values()[i] - (1.0 + u)) < slack);
  }
  CHECK(std::fabs(table.c0() - 1.0) < 4.0 * table.c0_se() + 0.05);
  CHECK(std::fabs(table.theta() - std::sqrt(2.0 / std::numbers::pi)) <
        4.0 * table.theta_se() + 0.05);
}

TEST_CASE("renewal slope for Gaussian steps") {
  const auto model = normalize_boundary(Family::BinaryGaussian);
  RenewalOptions opt;
  opt.walks = 4000;
  opt.horizon = 200000;
  opt.enforce_horizon = false;
  opt.threads = 2;
  const auto table = estimate_renewal(model, uniform_grid(6.0, 0.5), opt, 6);
  const double target = oracle::gaussian_c0(model.sigma2());
  CHECK(std::fabs(table.c0() - target) < 4.0 * table.c0_se() + 0.05);
  std::ostringstream csv;
  table.write_csv(csv);
  CHECK(csv.str().rfind("u,h0,se,n_ladders\n", 0) == 0);
}

TEST_CASE("renewal table lookups") {
  auto table = oracle::lattice_table(40);
  CHECK(table.h0(-0.5) == 0.0);
  CHECK(table.h0(2.5) == doctest::Approx(3.5));
  CHECK(table.h0(45.0) == doctest::Approx(46.0));
  CHECK(table.h_alpha(2.0, 1.0) == doctest::Approx(4.0));
  CHECK(table.lipschitz() == doctest::Approx(1.0));
  table.override_value(0, 2.0);
  CHECK(table.h0(0.0) == 2.0);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0), Error);
  CHECK_THROWS_AS(uniform_grid(1.0, -1.0), Error);
  CHECK(uniform_grid(1.0, 0.25).size() == 5);
  CHECK_THROWS_AS(table.theta_at(0), Error);
  const auto model = oracle::lattice_model();
  RenewalOptions opt;
  const std::vector<double> bad = {1.0, 2.0};
  CHECK_THROWS_AS(estimate_renewal(model, bad, opt, 1), Error);
}

TEST_CASE("conditioned walks respect the barrier") {
  SUBCASE("lattice, resampling") {
    const auto model = oracle::lattice_model();
    const auto table = oracle::lattice_table();
    Rng rng(10);
    for (int r = 0; r < 200; ++r) {
      const auto path = conditioned_walk(model, table, 0.0, 30, rng);
      REQUIRE(path.size() == 31);
      CHECK(path[0] == 0.0);
      for (double v : path) CHECK(v >= 0.0);
    }
    // From u = 1 the h-transform moves up with probability h(2) / (2 h(1)) = 3/4.
    const ManyToOneLaw law(model);
    int up = 0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) up += conditioned_step(law, table, 0.0, 1.0, rng) > 1.0;
    CHECK(up / static_cast<double>(reps) == doctest::Approx(0.75).epsilon(0.03));
    ConditionedWalkOptions rejection;
    rejection.method = ConditionedWalkMethod::Rejection;
    CHECK_THROWS_AS(conditioned_step(law, table, 0.0, 1.0, rng, rejection), Error);
  }
  SUBCASE("Gaussian, rejection") {
    const auto model = normalize_boundary(Family::BinaryGaussian);
    const double c0 = oracle::gaussian_c0(model.sigma2());
    std::vector<double> u, h, zero;
    for (int k = 0; k <= 20; ++k) {
      u.push_back(k);
      h.push_back(1.0 + c0 * k);
      zero.push_back(0.0);
    }
    const RenewalTable table(u, h, zero, u, zero, c0, 0.0, oracle::kGaussianTheta, 0.0);
    Rng rng(11);
    for (int r = 0; r < 200; ++r) {
      const auto path = conditioned_walk(model, table, 1.5, 40, rng);
      for (double v : path) CHECK(v >= -1.5);
    }
    CHECK_THROWS_AS(conditioned_walk(model, table, -1.0, 3, rng), Error);
  }
}
