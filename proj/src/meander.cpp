// SPDX-License-Identifier: Apache-2.0
#include "brw/meander.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brw/error.hpp"
#include "brw/stats.hpp"

namespace brw {

namespace {

void check_domain(double t, double x) {
  if (!(t > 0.0 && t <= 1.0) || !(x >= 0.0)) {
    throw Error(ErrorCode::DomainError, "meander marginal needs t in (0, 1] and x >= 0");
  }
}

}  // namespace

double rayleigh_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-0.5 * x * x); }

double maxwell_cdf(double x) {
  if (x <= 0.0) return 0.0;
  return std::erf(x / std::numbers::sqrt2) -
         std::sqrt(2.0 / std::numbers::pi) * x * std::exp(-0.5 * x * x);
}

double meander_marginal_cdf(double t, double x) {
  check_domain(t, x);
  if (std::isinf(x)) return 1.0;
  if (t == 1.0) return rayleigh_cdf(x);
  // Integral of the density by parts.
  const double value = std::erf(x / std::sqrt(2.0 * t * (1.0 - t))) -
                       std::exp(-0.5 * x * x / t) / std::sqrt(t) *
                           std::erf(x / std::sqrt(2.0 * (1.0 - t)));
  return std::clamp(value, 0.0, 1.0);
}

double meander_marginal_pdf(double t, double x) {
  check_domain(t, x);
  if (std::isinf(x)) return 0.0;
  const double gauss = x / (t * std::sqrt(t)) * std::exp(-0.5 * x * x / t);
  if (t == 1.0) return gauss;
  return gauss * std::erf(x / std::sqrt(2.0 * (1.0 - t)));
}

double meander_exp_moment(double a) {
  if (a < 0.0) throw Error(ErrorCode::DomainError, "exponential moment needs a >= 0");
  if (a == 0.0) return 1.0;
  if (a > 30.0) return std::exp(meander_log_exp_moment(a));
  return 1.0 + a * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * a * a) * normal_cdf(a);
}

double meander_log_exp_moment(double a) {
  if (a < 0.0) throw Error(ErrorCode::DomainError, "exponential moment needs a >= 0");
  if (a == 0.0) return 0.0;
  // log(1 + B) with log B = a^2/2 + log(a sqrt(2 pi) Phi(a)).
  const double log_b = 0.5 * a * a + std::log(a * std::sqrt(2.0 * std::numbers::pi) * normal_cdf(a));
  return log_b + std::log1p(std::exp(-log_b));
}

double constants_chain(double c, double sigma2) {
  if (!(c > 0.0) || !(sigma2 > 0.0)) {
    throw Error(ErrorCode::DomainError, "constants chain needs C > 0 and sigma2 > 0");
  }
  const double a = std::sqrt(sigma2 * c);
  return std::exp(-0.5 * a * a + meander_log_exp_moment(a)) *
         std::sqrt(2.0 / (std::numbers::pi * a * a));
}

double constants_chain_closed(double c, double sigma2) {
  if (!(c > 0.0) || !(sigma2 > 0.0)) {
    throw Error(ErrorCode::DomainError, "constants chain needs C > 0 and sigma2 > 0");
  }
  const double a = std::sqrt(sigma2 * c);
  return 2.0 * normal_cdf(a) + std::sqrt(2.0 / (std::numbers::pi * a * a)) * std::exp(-0.5 * a * a);
}

MeanderBatch sample_meander(std::span<const double> t_grid, Rng& rng, std::size_t batch,
                            std::size_t resolution) {
  if (t_grid.empty() || !std::is_sorted(t_grid.begin(), t_grid.end()) ||
      !(t_grid.front() > 0.0) || t_grid.back() > 1.0) {
    throw Error(ErrorCode::DomainError, "t grid must ascend inside (0, 1]");
  }
  // Observation times: the t grid merged with the uniform grid, always ending at 1.
  std::vector<double> times(t_grid.begin(), t_grid.end());
  for (std::size_t i = 1; i <= resolution; ++i) {
    times.push_back(static_cast<double>(i) / static_cast<double>(resolution));
  }
  times.push_back(1.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<std::size_t> slot(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    slot[j] = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), t_grid[j]) - times.begin());
  }

  MeanderBatch out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  out.samples.resize(batch);
  const double scale = std::sqrt(std::numbers::pi / 2.0);
  double raw_total = 0.0;
  for (auto& sample : out.samples) {
    sample.values.resize(t_grid.size());
    double b[3] = {0.0, 0.0, 0.0};
    double prev = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double sd = std::sqrt(times[i] - prev);
      prev = times[i];
      for (double& c : b) c += sd * rng.normal();
      while (next < slot.size() && slot[next] == i) {
        sample.values[next++] = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
      }
    }
    const double r1 = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    sample.raw_weight = scale / r1;
    raw_total += sample.raw_weight;
  }
  const double mean = batch ? raw_total / static_cast<double>(batch) : 1.0;
  std::vector<double> weights(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    out.samples[i].weight = out.samples[i].raw_weight / mean;
    weights[i] = out.samples[i].weight;
  }
  out.ess = effective_sample_size(weights);
  return out;
}

}  // namespace brw
