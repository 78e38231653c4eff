// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "brw/rng.hpp"

namespace brw {

enum class Family { BinaryGaussian, PoissonGaussian, Custom };

const char* to_string(Family family) noexcept;

struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return x > lower && x < upper; }
};

/// One possible offspring configuration of a finitely supported point process.
struct OffspringAtom {
  std::vector<double> displacements;
  double probability = 0.0;
};

/*!
 * User-supplied offspring law.
 *
 * Either `atoms` (a finite enumeration of configurations) or `sample` must be
 * set. When only atoms are given, the sampler, the log-Laplace transform and
 * the mean offspring count are derived from them, and every size-biased law
 * in the toolkit is sampled exactly. Sampler-only laws must supply
 * `log_laplace` and `mean_offspring`; size-biased laws then fall back to
 * self-normalized importance resampling.
 */
struct CustomLaw {
  std::string name = "custom";
  std::function<void(Rng&, std::vector<double>&)> sample;
  std::function<double(double)> log_laplace;
  std::optional<double> mean_offspring;
  std::vector<OffspringAtom> atoms;
  Interval domain;
};

/*!
 * Offspring point-process law of a branching random walk, normalized to the
 * boundary case E[sum e^{-V}] = 1, E[sum V e^{-V}] = 0.
 *
 * Immutable after construction; copies share the custom law.
 */
class BoundaryModel {
 public:
  /// Unchecked construction from a custom law. Use normalize_boundary() to
  /// obtain a verified model.
  explicit BoundaryModel(CustomLaw law);

  Family family() const noexcept { return family_; }
  /// Phi(beta) = log E[sum e^{-beta V}]; +inf outside domain().
  double log_laplace(double beta) const;
  double sigma2() const noexcept { return sigma2_; }
  Interval domain() const noexcept { return domain_; }
  double mean_offspring() const noexcept { return mean_offspring_; }

  // Gaussian families only: displacement law N(mean, variance).
  double displacement_mean() const noexcept { return disp_mean_; }
  double displacement_variance() const noexcept { return disp_var_; }
  bool gaussian_displacements() const noexcept {
    return family_ != Family::Custom;
  }

  /// Displacements of one offspring point process, appended to `out` after
  /// clearing it.
  void sample_offspring(Rng& rng, std::vector<double>& out) const;

  /// Custom law, or nullptr for parametric families.
  const CustomLaw* custom() const noexcept { return custom_.get(); }

  nlohmann::json to_config() const;

 private:
  BoundaryModel() = default;
  friend BoundaryModel normalize_boundary(Family, std::optional<double>,
                                          std::optional<double>);

  Family family_ = Family::BinaryGaussian;
  double s2_ = 0.0;
  double disp_mean_ = 0.0;
  double disp_var_ = 0.0;
  double mean_offspring_ = 0.0;
  double sigma2_ = 0.0;
  Interval domain_;
  std::shared_ptr<const CustomLaw> custom_;
};

/*!
 * Normalize a parametric family to the boundary case.
 *
 * BinaryGaussian has no free parameter: two children with N(mu, s2)
 * displacements are boundary only for mu = s2 = 2 ln 2. A supplied `s2` must
 * match that value. PoissonGaussian(s2) uses Poisson(e^{s2/2}) children with
 * N(s2, s2) displacements; `poisson_mean` m may be given instead, giving
 * s2 = 2 ln m.
 *
 * Throws Error{NoSolution} when the request cannot be normalized.
 */
BoundaryModel normalize_boundary(Family family,
                                 std::optional<double> s2 = std::nullopt,
                                 std::optional<double> poisson_mean = std::nullopt);

/// Verify a custom law against the boundary conditions and return it
/// unchanged. Throws NoSolution / Unbounded.
BoundaryModel normalize_boundary(const CustomLaw& law);

/// Build a model from the `model` config block
/// (`family`, `s2`, optional `poisson_mean`).
BoundaryModel model_from_config(const nlohmann::json& block);

inline constexpr double kPhiPrimeStep = 1e-5;
inline constexpr double kPhiSecondStep = 1e-4;

double phi_prime(const BoundaryModel& model, double beta,
                 double step = kPhiPrimeStep);
double phi_second(const BoundaryModel& model, double beta,
                  double step = kPhiSecondStep);

// Integrability diagnostics.

struct MomentEstimate {
  std::string name;
  double estimate = 0.0;
  double standard_error = 0.0;
  double max_term_share = 0.0;  // largest single sample / sum of samples
  bool finite_with_confidence = false;
};

struct ConditionReport {
  std::size_t samples = 0;
  double delta_minus = 0.0;
  double epsilon0 = 0.0;
  std::vector<MomentEstimate> moments;
  bool conclusive = false;

  bool all_finite() const noexcept;
};

struct ConditionOptions {
  double delta_minus = 0.04;
  double epsilon0 = 0.1;
};

/// Monte Carlo estimates of E[X log_+^2 X], E[X~ log_+ X~] and
/// E[(sum e^{-(1-2 delta_-) V})^{1+2 eps0}]. Advisory only.
ConditionReport check_conditions(const BoundaryModel& model,
                                 std::size_t samples, Rng& rng,
                                 const ConditionOptions& options = {});

}  // namespace brw
