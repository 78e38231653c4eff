// SPDX-License-Identifier: Apache-2.0
#include "brw/forest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "brw/error.hpp"

namespace brw {

namespace {

constexpr std::uint64_t kRootLabel = 0x726f6f74ull;  // "root"

Generation root_generation() {
  Generation g;
  g.parent.push_back(0);
  g.position.push_back(0.0);
  g.path_min.push_back(0.0);
  g.label.push_back(kRootLabel);
  return g;
}

template <class T>
void write_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "dump format assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(ErrorCode::IoError, "truncated forest dump");
  return value;
}

}  // namespace

std::size_t Forest::total_particles() const noexcept {
  std::size_t total = 0;
  for (const auto& g : generations_) total += g.size();
  return total;
}

std::pair<std::size_t, std::size_t> Forest::children(std::size_t k,
                                                     std::size_t i) const {
  if (k >= depth()) return {0, 0};
  const auto& parents = generations_[k + 1].parent;
  const auto key = static_cast<std::uint32_t>(i);
  auto lo = std::lower_bound(parents.begin(), parents.end(), key);
  auto hi = std::upper_bound(lo, parents.end(), key);
  return {static_cast<std::size_t>(lo - parents.begin()),
          static_cast<std::size_t>(hi - parents.begin())};
}

double Forest::ancestor_position(NodeId node, std::size_t g) const {
  std::size_t idx = node.index;
  for (std::size_t k = node.generation; k > g; --k) {
    idx = generations_[k].parent[idx];
  }
  return generations_[g].position[idx];
}

void Forest::fill_path_min() {
  for (std::size_t k = 1; k < generations_.size(); ++k) {
    auto& gen = generations_[k];
    const auto& prev = generations_[k - 1];
    gen.path_min.resize(gen.size());
    for (std::size_t i = 0; i < gen.size(); ++i) {
      gen.path_min[i] = std::min(prev.path_min[gen.parent[i]], gen.position[i]);
    }
  }
}

Forest Forest::from_generations(
    const std::vector<std::vector<std::uint32_t>>& parents,
    const std::vector<std::vector<double>>& positions) {
  if (parents.size() != positions.size()) {
    throw Error(ErrorCode::InvalidArgument, "parents/positions depth mismatch");
  }
  Forest forest;
  forest.generations_.push_back(root_generation());
  for (std::size_t k = 0; k < parents.size(); ++k) {
    if (parents[k].size() != positions[k].size()) {
      throw Error(ErrorCode::InvalidArgument, "parents/positions size mismatch");
    }
    const std::size_t prev_size = forest.generations_.back().size();
    if (!std::is_sorted(parents[k].begin(), parents[k].end())) {
      throw Error(ErrorCode::InvalidArgument, "parent indices must be non-decreasing");
    }
    Generation gen;
    gen.parent = parents[k];
    gen.position = positions[k];
    gen.label.assign(gen.size(), 0);
    for (auto p : gen.parent) {
      if (p >= prev_size) {
        throw Error(ErrorCode::InvalidArgument, "parent index out of range");
      }
    }
    forest.generations_.push_back(std::move(gen));
  }
  forest.fill_path_min();
  return forest;
}

void Forest::write_dump(std::ostream& out) const {
  out.write("BRW1", 4);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(depth()));
  for (const auto& g : generations_) write_le<std::uint64_t>(out, g.size());
  for (const auto& g : generations_) {
    for (auto p : g.parent) write_le<std::uint32_t>(out, p);
    for (double v : g.position) write_le<double>(out, v);
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing forest dump");
}

Forest Forest::read_dump(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "BRW1", 4) != 0) {
    throw Error(ErrorCode::IoError, "not a BRW1 forest dump");
  }
  const auto depth = read_le<std::uint32_t>(in);
  std::vector<std::uint64_t> counts(depth + std::size_t{1});
  for (auto& c : counts) c = read_le<std::uint64_t>(in);
  if (counts[0] != 1) throw Error(ErrorCode::IoError, "dump root generation must hold one particle");
  std::vector<std::vector<std::uint32_t>> parents(depth);
  std::vector<std::vector<double>> positions(depth);
  for (std::size_t k = 0; k <= depth; ++k) {
    std::vector<std::uint32_t> par(counts[k]);
    std::vector<double> pos(counts[k]);
    for (auto& p : par) p = read_le<std::uint32_t>(in);
    for (auto& v : pos) v = read_le<double>(in);
    if (k == 0) continue;
    parents[k - 1] = std::move(par);
    positions[k - 1] = std::move(pos);
  }
  return from_generations(parents, positions);
}

Forest simulate(const BoundaryModel& model, std::size_t n_generations,
                std::uint64_t seed, const SimulationOptions& options) {
  if (options.max_particles < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_particles must be >= 1");
  }
  Forest forest;
  forest.seed_ = seed;
  forest.barrier_ = options.barrier_alpha;
  forest.generations_.reserve(n_generations + 1);
  forest.generations_.push_back(root_generation());
  std::size_t stored = 1;
  const double floor = options.barrier_alpha
                           ? -*options.barrier_alpha
                           : -std::numeric_limits<double>::infinity();
  std::vector<double> displacements;
  for (std::size_t k = 0; k < n_generations; ++k) {
    const Generation& prev = forest.generations_.back();
    Generation next;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      Rng rng(stream_key(seed, k, prev.label[i]));
      model.sample_offspring(rng, displacements);
      const double base = prev.position[i];
      for (std::size_t c = 0; c < displacements.size(); ++c) {
        const double pos = base + displacements[c];
        if (pos < floor) continue;
        next.parent.push_back(static_cast<std::uint32_t>(i));
        next.position.push_back(pos);
        next.path_min.push_back(std::min(prev.path_min[i], pos));
        next.label.push_back(hash_combine(prev.label[i], c));
      }
    }
    stored += next.size();
    if (stored > options.max_particles) {
      throw ParticleCapExceeded(k, options.max_particles);
    }
    forest.generations_.push_back(std::move(next));
  }
  return forest;
}

double interpolate_path(std::span<const double> values, double t) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double scaled = static_cast<double>(n) * t;
  auto lower = static_cast<std::size_t>(std::floor(scaled));
  if (lower > n) lower = n;
  const double frac = scaled - static_cast<double>(lower);
  auto at = [&](std::size_t i) { return i == 0 ? 0.0 : values[i - 1]; };
  const double base = at(lower);
  const double slope = lower < n ? at(lower + 1) - base : 0.0;
  return (base + frac * slope) / std::sqrt(static_cast<double>(n));
}

double TrajectoryView::interpolated(double t) const {
  return interpolate_path(values_, t);
}

TrajectoryView trajectory(const Forest& forest, NodeId node) {
  if (node.generation > forest.depth() ||
      node.index >= forest.generation(node.generation).size()) {
    throw Error(ErrorCode::InvalidNode, "node is not in the forest");
  }
  std::vector<double> values(node.generation);
  std::size_t idx = node.index;
  for (std::size_t k = node.generation; k >= 1; --k) {
    const auto& gen = forest.generation(k);
    values[k - 1] = gen.position[idx];
    idx = gen.parent[idx];
  }
  return TrajectoryView(node, std::move(values));
}

SurvivalSampler::SurvivalSampler(const BoundaryModel& model, std::size_t n,
                                 std::uint64_t seed, SimulationOptions options)
    : model_(&model), n_(n), seed_(seed), options_(options) {}

Forest SurvivalSampler::next() {
  std::size_t used = 0;
  Forest forest = simulate_surviving(*model_, n_, seed_, accepted_, options_, &used);
  attempts_ += used;
  ++accepted_;
  return forest;
}

double SurvivalSampler::acceptance_rate() const noexcept {
  return attempts_ == 0 ? 0.0
                        : static_cast<double>(accepted_) / static_cast<double>(attempts_);
}

Forest simulate_surviving(const BoundaryModel& model, std::size_t n,
                          std::uint64_t seed, std::size_t replicate,
                          const SimulationOptions& options, std::size_t* attempts) {
  for (std::size_t a = 0; a < SurvivalSampler::kMaxConsecutiveRejections; ++a) {
    Forest forest = simulate(model, n, stream_key(seed, replicate, a), options);
    if (forest.alive()) {
      if (attempts) *attempts = a + 1;
      return forest;
    }
  }
  throw Error(ErrorCode::AllExtinct,
              "no surviving forest after " +
                  std::to_string(SurvivalSampler::kMaxConsecutiveRejections) +
                  " consecutive attempts");
}

}  // namespace brw
