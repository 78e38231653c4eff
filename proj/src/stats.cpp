// SPDX-License-Identifier: Apache-2.0
#include "brw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "brw/error.hpp"
#include "brw/kahan.hpp"

namespace brw {

SampleSummary mean_and_se(std::span<const double> values) {
  SampleSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  CompensatedSum sum;
  for (double v : values) sum += v;
  const auto n = static_cast<double>(values.size());
  s.mean = sum.value() / n;
  if (values.size() < 2) return s;
  CompensatedSum sq;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(sq.value() / (n - 1.0));
  s.standard_error = s.sd / std::sqrt(n);
  return s;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

MedianEstimate median_with_ci(std::vector<double> values, double z) {
  MedianEstimate m;
  if (values.empty()) {
    m.median = m.lower = m.upper = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  m.median = quantile(values, 0.5);
  const double half = z * std::sqrt(n) / 2.0;
  const auto lo = static_cast<std::ptrdiff_t>(std::floor(n / 2.0 - half));
  const auto hi = static_cast<std::ptrdiff_t>(std::ceil(n / 2.0 + half));
  const auto last = static_cast<std::ptrdiff_t>(values.size()) - 1;
  m.lower = values[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(lo, 0, last))];
  m.upper = values[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(hi, 0, last))];
  m.standard_error = (m.upper - m.lower) / (2.0 * z);
  return m;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) return 1.0;
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic_weighted(std::span<const double> values,
                             std::span<const double> weights,
                             const std::function<double(double)>& cdf) {
  if (values.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "values/weights size mismatch");
  }
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  CompensatedSum total_acc;
  for (double w : weights) total_acc += w;
  const double total = total_acc.value();
  if (!(total > 0.0)) return 1.0;
  double d = 0.0;
  CompensatedSum acc;
  for (std::size_t i : order) {
    const double before = acc.value() / total;
    acc += weights[i];
    const double after = acc.value() / total;
    const double f = cdf(values[i]);
    d = std::max({d, after - f, f - before});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

ChiSquare chi_square(std::span<const double> observed,
                     std::span<const double> expected_probabilities) {
  if (observed.size() != expected_probabilities.size() || observed.empty()) {
    throw Error(ErrorCode::InvalidArgument, "chi-square needs matching non-empty inputs");
  }
  double total = 0.0;
  for (double o : observed) total += o;
  ChiSquare result;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = total * expected_probabilities[i];
    if (expected <= 0.0) {
      if (observed[i] > 0.0) result.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    const double diff = observed[i] - expected;
    result.statistic += diff * diff / expected;
    ++cells;
  }
  result.dof = cells > 1 ? cells - 1 : 1;
  result.p_value = std::isfinite(result.statistic)
                       ? boost::math::gamma_q(0.5 * static_cast<double>(result.dof),
                                              0.5 * result.statistic)
                       : 0.0;
  return result;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double bonferroni_z(double level, std::size_t tests) {
  return normal_quantile(1.0 - level / (2.0 * static_cast<double>(std::max<std::size_t>(1, tests))));
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

}  // namespace brw
