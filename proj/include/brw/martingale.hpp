// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "brw/forest.hpp"
#include "brw/model.hpp"
#include "brw/walk.hpp"

namespace brw {

/// Additive and derivative martingales of one forest, generation by generation.
struct MartingaleSeries {
  std::vector<double> betas;
  /// w_beta[b][k] = sum_{|x|=k} e^{-beta_b V(x) - Phi(beta_b) k}.
  std::vector<std::vector<double>> w_beta;
  std::vector<double> w;  ///< beta = 1
  std::vector<double> d;  ///< sum V e^{-V}, may be negative
  std::optional<double> alpha;
  std::vector<double> w_alpha;  ///< sum e^{-V} 1{path min >= -alpha}
  std::vector<double> d_alpha;  ///< sum h_alpha(V) e^{-V} 1{path min >= -alpha}

  std::size_t depth() const noexcept { return w.empty() ? 0 : w.size() - 1; }
  /// D at the deepest generation, the finite-n stand-in for D_infinity.
  double d_proxy() const noexcept { return d.empty() ? 0.0 : d.back(); }

  /// Columns generation,beta,W_beta,W,D,W_alpha,D_alpha (one row per
  /// generation and beta); a leading seed column when `seed` is given.
  void write_csv(std::ostream& out, std::optional<std::uint64_t> seed = std::nullopt,
                 bool header = true) const;
};

/*!
 * Exact sums over every generation with compensated accumulation.
 * W_alpha / D_alpha are filled when `alpha` is given; D_alpha needs `table`.
 * Throws BetaOutsideDomain for a beta where Phi is not finite.
 */
MartingaleSeries compute_series(const Forest& forest, std::span<const double> betas,
                                const BoundaryModel& model,
                                std::optional<double> alpha = std::nullopt,
                                const RenewalTable* table = nullptr);

/// M_w = sum_{|x|=n, x >= w} e^{-beta V(x)} for every node w at one level.
struct SubtreeMass {
  std::size_t level = 0;
  std::vector<double> mass;

  double total() const noexcept;
};

SubtreeMass subtree_mass(const Forest& forest, std::size_t level, double beta = 1.0);

/// Subtree masses at every level 0..n from one backward sweep.
std::vector<std::vector<double>> mass_tree(const Forest& forest, double beta = 1.0);

}  // namespace brw
