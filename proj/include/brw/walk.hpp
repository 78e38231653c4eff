// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "brw/model.hpp"
#include "brw/rng.hpp"

namespace brw {

/*!
 * Law of the one-step increment S_1 of the many-to-one random walk:
 * E f(S_1) = E[sum_{|z|=1} f(V(z)) e^{-V(z)}].
 *
 * Gaussian families tilt N(s2, s2) to N(0, s2) exactly. Finite-atom custom
 * laws are sampled exactly by enumeration. Sampler-only custom laws use
 * size-biased selection with self-normalized weights sum e^{-V} over a batch.
 */
class ManyToOneLaw {
 public:
  static constexpr std::size_t kDefaultBatch = 64;

  explicit ManyToOneLaw(const BoundaryModel& model,
                        std::size_t batch = kDefaultBatch);

  double sample(Rng& rng) const;
  double sigma2() const noexcept { return model_->sigma2(); }
  bool gaussian() const noexcept { return model_->gaussian_displacements(); }
  double step_sd() const noexcept;
  const BoundaryModel& model() const noexcept { return *model_; }

 private:
  const BoundaryModel* model_;
  std::size_t batch_;
  // Finite-atom laws: cumulative weights over (atom, child) pairs.
  std::vector<double> cumulative_;
  std::vector<double> values_;
};

/// Draw a path S_1..S_n (S_0 = 0 is implicit) into `path`.
void sample_walk(const ManyToOneLaw& law, std::size_t n, Rng& rng,
                 std::vector<double>& path);

using PathFunction = std::function<double(std::span<const double>)>;

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Two independent estimates of the same quantity.
struct IdentityCheck {
  MeanEstimate lhs;
  MeanEstimate rhs;

  double z_score() const noexcept;
  /// |lhs - rhs| <= z * sqrt(se_l^2 + se_r^2).
  bool agrees(double z = 3.0) const noexcept;
};

/*!
 * Many-to-one identity E[sum_{|x|=n} g(V(x_1..x_n))] = E[e^{S_n} g(S_1..S_n)].
 * The left side simulates `samples` full trees, the right side `samples`
 * walks. Sample i uses stream (seed, side, i).
 */
IdentityCheck many_to_one_check(const BoundaryModel& model, std::size_t n,
                                const PathFunction& g, std::size_t samples,
                                std::uint64_t seed, unsigned threads = 1);

/*!
 * Estimated renewal function h_0 of the strict descending ladder heights of
 * S on an ascending grid, with h_0(0) = 1 pinned.
 *
 * Outside the grid, h_0 is extended linearly with slope c0 from the last
 * grid value, and is 0 for negative arguments.
 */
class RenewalTable {
 public:
  RenewalTable(std::vector<double> u_grid, std::vector<double> h0,
               std::vector<double> se, std::vector<double> n_ladders,
               std::vector<double> tail_bias, double c0, double c0_se,
               double theta, double theta_se);

  std::span<const double> u_grid() const noexcept { return u_; }
  std::span<const double> h0_values() const noexcept { return h_; }
  std::span<const double> standard_errors() const noexcept { return se_; }
  std::span<const double> ladder_counts() const noexcept { return ladders_; }
  std::span<const double> tail_bias() const noexcept { return bias_; }
  double c0() const noexcept { return c0_; }
  double c0_se() const noexcept { return c0_se_; }
  double theta() const noexcept { return theta_; }
  double theta_se() const noexcept { return theta_se_; }
  double u_max() const noexcept { return u_.back(); }

  /// Linear interpolation; linear extension beyond the grid; 0 below 0.
  double h0(double u) const noexcept;
  /// h_alpha(u) = h_0(u + alpha).
  double h_alpha(double alpha, double u) const noexcept { return h0(u + alpha); }
  /// Standard error of the grid estimate nearest to u.
  double se_at(double u) const noexcept;
  /// Largest slope of the interpolant, including the extrapolation slope.
  double lipschitz() const noexcept;

  /// Overwrite one grid value. Fault-injection hook for negative controls.
  void override_value(std::size_t index, double value);

  /// Fraction of walks with min_{j <= H} S_j >= -u at each grid point, H
  /// being the survival horizon.
  void set_survival(std::vector<double> fraction, std::size_t horizon, std::size_t walks);
  std::span<const double> survival() const noexcept { return survival_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t walks() const noexcept { return walks_; }
  /// sqrt(H) P(min S >= -u) / h_0(u) at grid point `index`, with its
  /// binomial standard error.
  double theta_at(std::size_t index) const;
  double theta_se_at(std::size_t index) const;

  /// CSV with header `u,h0,se,n_ladders`.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<double> u_, h_, se_, ladders_, bias_;
  double c0_, c0_se_, theta_, theta_se_;
  std::vector<double> survival_;
  std::size_t horizon_ = 0;
  std::size_t walks_ = 0;
};

struct RenewalOptions {
  std::size_t walks = 20000;
  std::size_t horizon = 100000;
  /// Step at which survival above -u is recorded for theta (capped at horizon).
  std::size_t survival_horizon = 10000;
  unsigned threads = 1;
  /// Throw HorizonTooSmall when the tail bias bar exceeds the SE.
  bool enforce_horizon = true;
};

/*!
 * Ladder-epoch estimator: h_0(u) = 1 + mean number of strict descending
 * ladder epochs j in [1, horizon] with S_j >= -u, plus a plug-in estimate of
 * the ladder epochs after the horizon. c0 is a weighted least-squares slope
 * over the top third of the grid; theta = sqrt(H) P(min S >= -u) / h_0(u)
 * averaged over the grid at H = survival_horizon.
 */
RenewalTable estimate_renewal(const BoundaryModel& model,
                              std::span<const double> u_grid,
                              const RenewalOptions& options, std::uint64_t seed);

/// Evenly spaced grid 0, step, ..., u_max.
std::vector<double> uniform_grid(double u_max, double step);

/// Residual of h_0(u) = E[h_0(S_1 + u); S_1 >= -u] at one point.
struct HarmonicityCheck {
  double u = 0.0;
  double table_value = 0.0;
  MeanEstimate expectation;
  double combined_se = 0.0;

  double z_score() const noexcept;
  bool passes(double z = 3.0) const noexcept { return z_score() <= z; }
};

HarmonicityCheck harmonicity_check(const BoundaryModel& model,
                                   const RenewalTable& table, double u,
                                   std::size_t samples, std::uint64_t seed);

enum class ConditionedWalkMethod {
  Auto,                  ///< rejection for Gaussian steps, otherwise resampling
  Rejection,             ///< exact; Gaussian step laws only
  ImportanceResampling,  ///< self-normalized resampling over a batch
};

struct ConditionedWalkOptions {
  ConditionedWalkMethod method = ConditionedWalkMethod::Auto;
  std::size_t batch = 64;
  std::size_t max_batch_doublings = 10;
};

/*!
 * One transition of the h-transform kernel
 * p^(alpha)(u, dv) = 1{v >= -alpha} h_alpha(v)/h_alpha(u) p(u, dv).
 */
double conditioned_step(const ManyToOneLaw& law, const RenewalTable& table,
                        double alpha, double u, Rng& rng,
                        const ConditionedWalkOptions& options = {});

/*!
 * Path S_0..S_n (S_0 = 0, so n + 1 values) of the walk conditioned to stay
 * above -alpha. Throws WeightCollapse when resampling finds no admissible
 * candidate even after doubling the batch repeatedly.
 */
std::vector<double> conditioned_walk(const BoundaryModel& model,
                                     const RenewalTable& table, double alpha,
                                     std::size_t n, Rng& rng,
                                     const ConditionedWalkOptions& options = {});

}  // namespace brw
