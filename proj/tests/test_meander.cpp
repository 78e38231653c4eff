// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "brw/error.hpp"
#include "brw/meander.hpp"
#include "brw/stats.hpp"

using namespace brw;
using boost::math::quadrature::gauss_kronrod;

namespace {

double integrate(const auto& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("marginal CDF integrates the density") {
  for (double t : {0.1, 0.25, 0.5, 0.9, 1.0}) {
    for (double x : {0.1, 0.5, 1.0, 2.0, 3.5}) {
      const double q = integrate([&](double y) { return meander_marginal_pdf(t, y); }, 0.0, x);
      INFO("t = " << t << ", x = " << x);
      CHECK(std::fabs(meander_marginal_cdf(t, x) - q) < 1e-10);
    }
    const double mass = integrate([&](double y) { return meander_marginal_pdf(t, y); }, 0.0,
                                  std::numeric_limits<double>::infinity());
    CHECK(std::fabs(mass - 1.0) < 1e-10);
  }
  for (double x : {0.3, 1.0, 2.7}) {
    CHECK(meander_marginal_cdf(1.0, x) == doctest::Approx(rayleigh_cdf(x)).epsilon(1e-13));
  }
}

TEST_CASE("exponential moment of the Rayleigh endpoint") {
  CHECK(meander_exp_moment(0.0) == 1.0);
  CHECK(meander_exp_moment(1.0) == doctest::Approx(4.477051811703694).epsilon(1e-14));
  for (double a : {0.5, 1.0, 2.0, 5.0}) {
    const double q = integrate([&](double x) { return std::exp(a * x - x * x / 2.0) * x; }, 0.0,
                               std::numeric_limits<double>::infinity());
    INFO("a = " << a);
    CHECK(std::fabs(meander_exp_moment(a) - q) / q < 1e-9);
    CHECK(meander_log_exp_moment(a) == doctest::Approx(std::log(q)).epsilon(1e-12));
  }
  CHECK(std::isfinite(meander_log_exp_moment(60.0)));
}

TEST_CASE("constants chain") {
  const double s2 = 2.0 * std::numbers::ln2;
  for (double c : {0.1, 1.0, 4.0, 20.0, 50.0}) {
    INFO("C = " << c);
    CHECK(constants_chain(c, s2) == doctest::Approx(constants_chain_closed(c, s2)).epsilon(1e-12));
  }
  CHECK(std::fabs(constants_chain(50.0, s2) - 2.0) < 1e-6);
  CHECK_THROWS_AS(constants_chain(0.0, s2), Error);
  CHECK_THROWS_AS(constants_chain_closed(1.0, -1.0), Error);
}

TEST_CASE("reweighted Bessel paths have meander marginals") {
  const std::vector<double> grid = {0.25, 0.5, 1.0};
  Rng rng(12);
  const auto batch = sample_meander(grid, rng, 40000, 64);
  REQUIRE(batch.samples.size() == 40000);
  CHECK(batch.ess > 20000.0);
  std::vector<double> w;
  for (const auto& s : batch.samples) w.push_back(s.weight);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::vector<double> x;
    for (const auto& s : batch.samples) x.push_back(s.values[j]);
    const double t = grid[j];
    INFO("t = " << t);
    CHECK(ks_statistic_weighted(x, w, [t](double y) { return meander_marginal_cdf(t, std::max(y, 0.0)); }) <
          0.015);
  }
  // Unweighted, the endpoint is the norm of a 3-d Gaussian.
  std::vector<double> end;
  for (const auto& s : batch.samples) end.push_back(s.values.back());
  CHECK(ks_statistic(end, maxwell_cdf) < 0.015);
}

TEST_CASE("meander domain errors") {
  CHECK_THROWS_AS(meander_marginal_cdf(0.0, 1.0), Error);
  CHECK_THROWS_AS(meander_marginal_cdf(0.5, -1.0), Error);
  CHECK_THROWS_AS(meander_exp_moment(-0.1), Error);
  Rng rng(1);
  const std::vector<double> bad = {0.5, 0.2};
  CHECK_THROWS_AS(sample_meander(bad, rng, 10), Error);
  const std::vector<double> outside = {1.5};
  CHECK_THROWS_AS(sample_meander(outside, rng, 10), Error);
}
