// SPDX-License-Identifier: Apache-2.0
#include "brw/polymer.hpp"

#include <algorithm>
#include <cmath>

#include "brw/error.hpp"
#include "brw/kahan.hpp"
#include "brw/martingale.hpp"

namespace brw {

namespace {

void require_alive(const Forest& forest) {
  if (!forest.alive()) {
    throw Error(ErrorCode::ExtinctForest, "the forest has no particle at its last generation");
  }
}

}  // namespace

std::vector<PolymerDraw> sample_polymer(const Forest& forest, double beta,
                                        const BoundaryModel& model, std::size_t count,
                                        Rng& rng) {
  require_alive(forest);
  if (!model.domain().contains(beta) || !std::isfinite(model.log_laplace(beta))) {
    throw Error(ErrorCode::BetaOutsideDomain, "beta is outside the model domain");
  }
  const auto masses = mass_tree(forest, beta);
  const std::size_t n = forest.depth();
  const double total = masses[0][0];
  std::vector<PolymerDraw> draws;
  draws.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto [first, last] = forest.children(k, idx);
      double target = rng.uniform() * masses[k][idx];
      std::size_t pick = last - 1;
      for (std::size_t j = first; j < last; ++j) {
        target -= masses[k + 1][j];
        if (target < 0.0) {
          pick = j;
          break;
        }
      }
      // Skip dead-end children when rounding lands on one.
      while (masses[k + 1][pick] == 0.0 && pick > first) --pick;
      idx = pick;
    }
    const NodeId node{n, idx};
    draws.push_back(PolymerDraw{node, masses[n][idx] / total, trajectory(forest, node)});
  }
  return draws;
}

PolymerPoints polymer_points(const Forest& forest, std::span<const double> t_grid,
                             double beta) {
  require_alive(forest);
  const std::size_t n = forest.depth();
  const std::size_t d = t_grid.size();
  const Generation& leaves = forest.leaves();
  PolymerPoints points;
  points.t_grid.assign(t_grid.begin(), t_grid.end());
  points.weights.resize(leaves.size());
  points.values.assign(leaves.size() * d, 0.0);

  // Subtract the minimum before exponentiating; the normalization cancels it.
  const double shift = *std::min_element(leaves.position.begin(), leaves.position.end());
  CompensatedSum total;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    points.weights[i] = std::exp(-beta * (leaves.position[i] - shift));
    total += points.weights[i];
  }
  const double norm = total.value();
  for (double& w : points.weights) w /= norm;

  if (n == 0) return points;
  std::vector<double> path(n);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    std::size_t idx = i;
    for (std::size_t k = n; k >= 1; --k) {
      const Generation& gen = forest.generation(k);
      path[k - 1] = gen.position[idx];
      idx = gen.parent[idx];
    }
    double* row = points.values.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = interpolate_path(path, t_grid[j]);
    }
  }
  return points;
}

double polymer_functional(const PolymerPoints& points, const GridFunction& f) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < points.leaves(); ++i) {
    if (points.weights[i] == 0.0) continue;
    sum += points.weights[i] * f(points.row(i));
  }
  return sum.value();
}

double polymer_functional(const Forest& forest, std::span<const double> t_grid,
                          const GridFunction& f, double beta) {
  return polymer_functional(polymer_points(forest, t_grid, beta), f);
}

std::vector<OverlapReport> overlap_pair_mass(const Forest& forest,
                                             std::span<const double> deltas) {
  require_alive(forest);
  const std::size_t n = forest.depth();
  const auto masses = mass_tree(forest, 1.0);
  const double total = masses[0][0];
  std::vector<OverlapReport> reports;
  reports.reserve(deltas.size());
  for (double delta : deltas) {
    if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be >= 0");
    OverlapReport report;
    report.delta = delta;
    report.n = n;
    const double cut = std::ceil(delta * static_cast<double>(n) - 1e-9);
    CompensatedSum sq;
    if (cut > static_cast<double>(n)) {
      report.level = n + 1;
      for (double m : masses[n]) sq += m * m;
    } else {
      report.level = static_cast<std::size_t>(std::max(0.0, cut));
      for (double m : masses[report.level]) sq += m * m;
    }
    report.pair_mass = std::clamp(sq.value() / (total * total), 0.0, 1.0);
    reports.push_back(report);
  }
  return reports;
}

OverlapReport overlap_pair_mass(const Forest& forest, double delta) {
  return overlap_pair_mass(forest, std::span<const double>(&delta, 1)).front();
}

}  // namespace brw
