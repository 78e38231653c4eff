// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "brw/model.hpp"

namespace brw {

/// One generation in structure-of-arrays form. Parents are non-decreasing, so
/// the children of a particle occupy a contiguous range of the next block.
struct Generation {
  std::vector<std::uint32_t> parent;
  std::vector<double> position;
  std::vector<double> path_min;
  std::vector<std::uint64_t> label;

  std::size_t size() const noexcept { return position.size(); }
  bool empty() const noexcept { return position.empty(); }
};

struct NodeId {
  std::size_t generation = 0;
  std::size_t index = 0;
};

struct SimulationOptions {
  /// Kill particles with position < -alpha, together with their subtrees.
  std::optional<double> barrier_alpha;
  std::size_t max_particles = std::size_t{1} << 24;
};

/*!
 * A simulated branching random walk stored generation by generation.
 *
 * Generation 0 holds the root at the origin. A forest always has
 * depth() + 1 generation blocks; after extinction the remaining blocks are
 * empty and alive() is false.
 */
class Forest {
 public:
  /// Build from explicit parent/position arrays (generation 0 excluded: the
  /// root is implicit). Validates parent indices and fills path minima.
  static Forest from_generations(
      const std::vector<std::vector<std::uint32_t>>& parents,
      const std::vector<std::vector<double>>& positions);

  std::size_t depth() const noexcept { return generations_.size() - 1; }
  const Generation& generation(std::size_t k) const { return generations_.at(k); }
  const Generation& leaves() const noexcept { return generations_.back(); }
  bool alive() const noexcept { return !generations_.back().empty(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::optional<double> barrier() const noexcept { return barrier_; }
  std::size_t total_particles() const noexcept;

  /// Half-open index range of the children of (k, i) inside generation k+1.
  std::pair<std::size_t, std::size_t> children(std::size_t k, std::size_t i) const;

  /// Position of the ancestor of `node` at generation `g` (g <= node.generation).
  double ancestor_position(NodeId node, std::size_t g) const;

  /// Little-endian dump: "BRW1", depth u32, counts u64[depth+1], then per
  /// generation parent u32[] and position f64[].
  void write_dump(std::ostream& out) const;
  static Forest read_dump(std::istream& in);

 private:
  friend Forest simulate(const BoundaryModel&, std::size_t, std::uint64_t,
                         const SimulationOptions&);
  Forest() = default;
  void fill_path_min();

  std::vector<Generation> generations_;
  std::uint64_t seed_ = 0;
  std::optional<double> barrier_;
};

/*!
 * Simulate to `n_generations`. Offspring of each particle are drawn from a
 * private stream keyed by (seed, generation, ancestry label), so the result is
 * a deterministic function of its arguments, and runs with and without a
 * barrier are coupled particle by particle.
 *
 * Throws ParticleCapExceeded when more than `max_particles` particles would be
 * stored.
 */
Forest simulate(const BoundaryModel& model, std::size_t n_generations,
                std::uint64_t seed, const SimulationOptions& options = {});

/// Ancestral trajectory (V(x_1), ..., V(x_n)) of a particle plus its
/// interpolation V_t(x) on [0, 1].
class TrajectoryView {
 public:
  TrajectoryView(NodeId node, std::vector<double> values)
      : node_(node), values_(std::move(values)) {}

  NodeId node() const noexcept { return node_; }
  std::span<const double> values() const noexcept { return values_; }
  double interpolated(double t) const;

 private:
  NodeId node_;
  std::vector<double> values_;
};

/// V_t for the path (0, values...) at t in [0, 1]; zero for an empty path.
double interpolate_path(std::span<const double> values, double t);

TrajectoryView trajectory(const Forest& forest, NodeId node);

/*!
 * Draws forests conditioned on survival to depth n (the computable stand-in
 * for conditioning on non-extinction). Replicate r, attempt a uses seed
 * stream_key(seed, r, a), so streams are independent of scheduling.
 */
class SurvivalSampler {
 public:
  static constexpr std::size_t kMaxConsecutiveRejections = 1'000'000;

  SurvivalSampler(const BoundaryModel& model, std::size_t n, std::uint64_t seed,
                  SimulationOptions options = {});

  /// Next surviving forest. Throws AllExtinct after too many rejections.
  Forest next();

  std::size_t accepted() const noexcept { return accepted_; }
  std::size_t attempts() const noexcept { return attempts_; }
  double acceptance_rate() const noexcept;

 private:
  const BoundaryModel* model_;
  std::size_t n_;
  std::uint64_t seed_;
  SimulationOptions options_;
  std::size_t accepted_ = 0;
  std::size_t attempts_ = 0;
};

/// Surviving forest for replicate `replicate` of a fan-out; the number of
/// attempts used is written to `attempts` when non-null.
Forest simulate_surviving(const BoundaryModel& model, std::size_t n,
                          std::uint64_t seed, std::size_t replicate,
                          const SimulationOptions& options = {},
                          std::size_t* attempts = nullptr);

}  // namespace brw
