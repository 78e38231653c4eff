// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace brw {

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double sd = 0.0;
};

SampleSummary mean_and_se(std::span<const double> values);

double quantile(std::vector<double> values, double p);
double median(std::vector<double> values);

/// Distribution-free interval for the median from binomial order statistics;
/// `standard_error` is the half-width divided by the normal quantile.
struct MedianEstimate {
  double median = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double standard_error = 0.0;
};

MedianEstimate median_with_ci(std::vector<double> values, double z = 1.96);

/// Kolmogorov-Smirnov distance between an empirical sample and a CDF.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

/// Weighted empirical CDF vs a CDF; weights need not be normalized.
double ks_statistic_weighted(std::span<const double> values,
                             std::span<const double> weights,
                             const std::function<double(double)>& cdf);

double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic p-value of the one-sample KS statistic for n samples.
double ks_pvalue(double statistic, std::size_t n);

/// Pearson chi-square statistic and its upper-tail p-value.
struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

ChiSquare chi_square(std::span<const double> observed,
                     std::span<const double> expected_probabilities);

double normal_cdf(double x);
double normal_quantile(double p);

/// Two-sided normal threshold keeping the family-wise level at `level`
/// across `tests` comparisons.
double bonferroni_z(double level, std::size_t tests);

/// FNV-1a, used to fingerprint configurations.
std::uint64_t fnv1a64(std::string_view data);

double effective_sample_size(std::span<const double> weights);

}  // namespace brw
