// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <vector>

#include "brw/error.hpp"
#include "brw/kahan.hpp"
#include "brw/parallel.hpp"
#include "brw/rng.hpp"
#include "brw/stats.hpp"

using namespace brw;

TEST_CASE("stream keys are deterministic and distinct") {
  CHECK(stream_key(1, 2, 3) == stream_key(1, 2, 3));
  CHECK(stream_key(1, 2, 3) != stream_key(1, 3, 2));
  CHECK(stream_key(1, 2) != stream_key(2, 2));
  Rng a(stream_key(9, 1)), b(stream_key(9, 1));
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("uniform draws stay in the open unit interval") {
  Rng rng(42);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have unit variance") {
  Rng rng(7);
  std::vector<double> x(200000);
  for (auto& v : x) v = rng.normal();
  const auto s = mean_and_se(x);
  CHECK(std::fabs(s.mean) < 4.0 * s.standard_error);
  CHECK(s.sd == doctest::Approx(1.0).epsilon(0.01));
  CHECK(ks_statistic(x, normal_cdf) < 0.005);
}

TEST_CASE("compensated sum recovers cancelled terms") {
  CompensatedSum s;
  s += 1e16;
  for (int i = 0; i < 1000; ++i) s += 1.0;
  s += -1e16;
  CHECK(s.value() == 1000.0);
}

TEST_CASE("mean and standard error") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const auto s = mean_and_se(x);
  CHECK(s.count == 5);
  CHECK(s.mean == 3.0);
  CHECK(s.sd == doctest::Approx(std::sqrt(2.5)));
  CHECK(s.standard_error == doctest::Approx(std::sqrt(2.5 / 5)));
}

TEST_CASE("median and its interval") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  std::vector<double> x(1001);
  std::iota(x.begin(), x.end(), 0.0);
  const auto m = median_with_ci(x);
  CHECK(m.median == 500.0);
  CHECK(m.lower < 500.0);
  CHECK(m.upper > 500.0);
  CHECK(m.standard_error > 0.0);
}

TEST_CASE("normal quantile inverts the CDF") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  for (double p : {0.001, 0.1, 0.5, 0.8, 0.999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK(bonferroni_z(0.0027, 1) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(bonferroni_z(0.0027, 20) > bonferroni_z(0.0027, 2));
}

TEST_CASE("chi-square statistic") {
  const std::vector<double> obs = {30, 20, 50};
  const std::vector<double> p = {0.3, 0.2, 0.5};
  const auto c = chi_square(obs, p);
  CHECK(c.statistic == doctest::Approx(0.0));
  CHECK(c.dof == 2);
  CHECK(c.p_value == doctest::Approx(1.0));
  const std::vector<double> skewed = {60, 20, 20};
  CHECK(chi_square(skewed, p).p_value < 1e-6);
}

TEST_CASE("weighted KS reduces to the unweighted one") {
  Rng rng(3);
  std::vector<double> x(5000), w(5000, 2.5);
  for (auto& v : x) v = rng.uniform();
  auto id = [](double t) { return std::clamp(t, 0.0, 1.0); };
  CHECK(ks_statistic_weighted(x, w, id) == doctest::Approx(ks_statistic(x, id)).epsilon(1e-12));
  CHECK(ks_two_sample(x, x) == 0.0);
}

TEST_CASE("effective sample size") {
  const std::vector<double> equal(10, 3.0);
  CHECK(effective_sample_size(equal) == doctest::Approx(10.0));
  const std::vector<double> one = {1.0, 0.0, 0.0};
  CHECK(effective_sample_size(one) == doctest::Approx(1.0));
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  for (unsigned threads : {1u, 3u, 8u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  CHECK_THROWS_AS(parallel_for(10, 2,
                               [](std::size_t i) {
                                 if (i == 7) throw Error(ErrorCode::InvalidArgument, "boom");
                               }),
                  Error);
}
