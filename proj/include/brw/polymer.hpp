// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "brw/forest.hpp"
#include "brw/model.hpp"
#include "brw/rng.hpp"

namespace brw {

/// One particle drawn from the polymer measure at the deepest generation.
struct PolymerDraw {
  NodeId node;
  double weight = 0.0;  ///< e^{-beta V - Phi(beta) n} / W_{beta,n}
  TrajectoryView trajectory;
};

/*!
 * `count` independent draws from mu_n^(beta), sampled top-down through the
 * subtree masses so each draw costs O(depth * branching).
 * Throws ExtinctForest when the last generation is empty.
 */
std::vector<PolymerDraw> sample_polymer(const Forest& forest, double beta,
                                        const BoundaryModel& model, std::size_t count,
                                        Rng& rng);

/// Leaf weights of mu_n^(beta) together with the rescaled trajectory V_t of
/// each leaf at the points of a t grid (row-major, one row per leaf).
struct PolymerPoints {
  std::vector<double> t_grid;
  std::vector<double> weights;  ///< normalized to sum 1
  std::vector<double> values;   ///< values[leaf * t_grid.size() + j]

  std::size_t leaves() const noexcept { return weights.size(); }
  std::span<const double> row(std::size_t leaf) const {
    return {values.data() + leaf * t_grid.size(), t_grid.size()};
  }
};

PolymerPoints polymer_points(const Forest& forest, std::span<const double> t_grid,
                             double beta = 1.0);

using GridFunction = std::function<double(std::span<const double>)>;

/// (1/W) sum e^{-beta V(x)} F(V_{t_1}(x), ..., V_{t_d}(x)).
double polymer_functional(const Forest& forest, std::span<const double> t_grid,
                          const GridFunction& f, double beta = 1.0);
double polymer_functional(const PolymerPoints& points, const GridFunction& f);

struct OverlapReport {
  double delta = 0.0;
  double pair_mass = 0.0;
  std::size_t n = 0;
  std::size_t level = 0;  ///< ceil(delta n); n + 1 stands for the diagonal only
};

/*!
 * (1/W_n^2) sum_{u,v} e^{-V(u)-V(v)} 1{overlap(u, v) >= delta}, with the
 * overlap read off the common ancestor (equal to the value-based overlap for
 * continuous displacement laws). Diagonal pairs are included. Computed as
 * sum_{|w|=k} M_w^2 / (sum M_w)^2 at level k = ceil(delta n); delta n within
 * 1e-9 of an integer counts as that integer.
 */
OverlapReport overlap_pair_mass(const Forest& forest, double delta);

/// Same statistic for several deltas from one backward sweep.
std::vector<OverlapReport> overlap_pair_mass(const Forest& forest,
                                             std::span<const double> deltas);

}  // namespace brw
