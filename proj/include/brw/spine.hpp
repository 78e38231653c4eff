// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "brw/forest.hpp"
#include "brw/model.hpp"
#include "brw/rng.hpp"
#include "brw/walk.hpp"

namespace brw {

enum class SpineMeasure { QAlpha, QBeta };

/// A spine w_0..w_n with the brothers born alongside it. Positions are
/// absolute. brothers[i - 1] holds the children of w_{i-1} other than w_i.
struct SpineRealization {
  SpineMeasure measure = SpineMeasure::QAlpha;
  double parameter = 0.0;  ///< alpha or beta
  std::vector<double> spine;
  std::vector<std::vector<double>> brothers;
  /// Product of per-level normalizer ratios; 1 for exact sampling.
  double weight = 1.0;
  /// Effective sample size of each resampling batch; empty when exact.
  std::vector<double> ess;

  std::size_t depth() const noexcept { return spine.empty() ? 0 : spine.size() - 1; }
};

enum class TiltMethod {
  Auto,                  ///< exact for Gaussian and finite-atom laws
  Exact,
  ImportanceResampling,  ///< self-normalized over a batch of P offspring sets
};

struct SpineOptions {
  TiltMethod method = TiltMethod::Auto;
  std::size_t batch = 64;
  std::size_t max_batch_doublings = 10;
};

/*!
 * Spine of Q^(alpha): offspring of a spine particle at u follow the law of
 * Theta tilted by sum e^{-v} h_alpha(u + v) 1{u + v >= -alpha}, and the next
 * spine particle is picked among them proportionally to its term.
 *
 * Exact tilts: for Gaussian families the tilted child has the h-transform step
 * law and the other children are untouched (one brother for the binary
 * family, an independent Poisson set for the Poisson family); finite-atom laws
 * are enumerated. Throws WeightCollapse when resampling fails.
 */
SpineRealization sample_spine_qalpha(const BoundaryModel& model, const RenewalTable& table,
                                     double alpha, std::size_t n, Rng& rng,
                                     const SpineOptions& options = {});

/// Spine of Q_beta = W_beta . P: children picked proportionally to e^{-beta V}.
SpineRealization sample_spine_qbeta(const BoundaryModel& model, double beta, std::size_t n,
                                    Rng& rng, const SpineOptions& options = {});

/// A full tree under Q^(alpha) to depth n: the spine, its brothers and
/// independent P-subtrees below every brother.
struct SpineTree {
  Forest forest;
  NodeId spine_leaf;
};

SpineTree grow_spine_tree(const BoundaryModel& model, const SpineRealization& spine,
                          std::uint64_t seed);

/// Columns level,spine_V,n_brothers,brother_Vs (brothers joined by ';').
void write_spine_csv(std::ostream& out, const SpineRealization& spine);

/// One JSON object per level with its effective sample size, then a summary.
void write_spine_diagnostics(std::ostream& out, const SpineRealization& spine);

}  // namespace brw
