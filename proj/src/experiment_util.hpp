// SPDX-License-Identifier: Apache-2.0
// Helpers shared by the experiment drivers.
#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "brw/error.hpp"
#include "brw/experiments.hpp"
#include "brw/forest.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"
#include "brw/walk.hpp"

namespace brw::detail {

template <class T>
T param(const nlohmann::json& block, const char* key, T fallback) {
  if (!block.contains(key) || block.at(key).is_null()) return fallback;
  try {
    return block.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError,
                std::string("experiment.") + key + ": " + e.what());
  }
}

inline nlohmann::json sub_block(const nlohmann::json& block, const char* key) {
  if (!block.contains(key)) return nlohmann::json::object();
  if (!block.at(key).is_object()) {
    throw Error(ErrorCode::ConfigError, std::string("experiment.") + key + " must be an object");
  }
  return block.at(key);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline RunReport start_report(const std::string& name, const ExperimentConfig& config) {
  RunReport report;
  report.experiment = name;
  report.parameters = config.to_json();
  report.seed = config.sim.seed;
  report.config_hash = config.hash();
  return report;
}

/// Statistic without a pass flag.
inline Statistic info(std::string name, double estimate, double se,
                      std::optional<double> target = std::nullopt) {
  Statistic s;
  s.name = std::move(name);
  s.estimate = estimate;
  s.standard_error = se;
  s.target = target;
  return s;
}

/// Pass when |estimate - target| <= z * se.
inline Statistic within_se(std::string name, double estimate, double se, double target,
                           double z) {
  Statistic s = info(std::move(name), estimate, se, target);
  const double diff = std::fabs(estimate - target);
  s.pass = se > 0.0 ? diff <= z * se : diff == 0.0;
  s.tolerance = format_number(z) + " se";
  s.extra["z"] = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : 1e300);
  return s;
}

/// Pass when |estimate - target| <= tol * |target|.
inline Statistic within_relative(std::string name, double estimate, double se, double target,
                                 double tol) {
  Statistic s = info(std::move(name), estimate, se, target);
  s.pass = std::fabs(estimate - target) <= tol * std::fabs(target);
  s.tolerance = "relative " + format_number(tol);
  return s;
}

/// Pass when estimate <= bound (deterministic quantities; se is 0).
inline Statistic at_most(std::string name, double estimate, double bound, double se = 0.0) {
  Statistic s = info(std::move(name), estimate, se);
  s.pass = estimate <= bound;
  s.tolerance = "<= " + format_number(bound);
  return s;
}

inline Statistic flag(std::string name, bool ok, double estimate, double se,
                      std::string rule) {
  Statistic s = info(std::move(name), estimate, se);
  s.pass = ok;
  s.tolerance = std::move(rule);
  return s;
}

inline SimulationOptions simulation_options(const ExperimentConfig& config) {
  SimulationOptions options;
  options.barrier_alpha = config.sim.barrier_alpha;
  options.max_particles = config.sim.max_particles;
  return options;
}

inline std::size_t require_depth(const ExperimentConfig& config, std::size_t n) {
  if (n > config.sim.max_gen) {
    throw Error(ErrorCode::BudgetExceeded, "depth " + std::to_string(n) +
                                               " exceeds sim.max_gen " +
                                               std::to_string(config.sim.max_gen));
  }
  return n;
}

/// Surviving forests for replicates 0..count-1 at depth n, each handed to
/// `fn(replicate, forest)` on a worker thread. Returns the total attempts.
template <class Fn>
std::size_t for_surviving(const BoundaryModel& model, std::size_t n, std::uint64_t seed,
                          std::size_t count, const ExperimentConfig& config, Fn&& fn) {
  const SimulationOptions options = simulation_options(config);
  std::vector<std::size_t> attempts(count, 0);
  parallel_for(count, config.threads, [&](std::size_t r) {
    Forest forest = simulate_surviving(model, n, seed, r, options, &attempts[r]);
    fn(r, forest);
  });
  std::size_t total = 0;
  for (auto a : attempts) total += a;
  return total;
}

inline std::vector<double> grid_from_block(const nlohmann::json& block) {
  if (block.contains("u_grid")) return param<std::vector<double>>(block, "u_grid", {});
  return uniform_grid(param<double>(block, "u_max", 10.0), param<double>(block, "u_step", 0.5));
}

inline RenewalOptions renewal_options(const nlohmann::json& block, unsigned threads) {
  RenewalOptions options;
  options.walks = param<std::size_t>(block, "walks", 20000);
  options.horizon = param<std::size_t>(block, "horizon", 4000000);
  options.survival_horizon = param<std::size_t>(block, "survival_horizon", 10000);
  options.threads = threads;
  options.enforce_horizon = param<bool>(block, "enforce_horizon", true);
  return options;
}

inline RenewalTable renewal_from_block(const BoundaryModel& model, const nlohmann::json& block,
                                       std::uint64_t seed, unsigned threads) {
  const auto grid = grid_from_block(block);
  return estimate_renewal(model, grid, renewal_options(block, threads),
                          stream_key(seed, 0x72656e77ull));
}

inline MeanEstimate estimate_of(const std::vector<double>& values) {
  const auto s = mean_and_se(values);
  return {s.mean, s.standard_error};
}

/// lhs - rhs as a statistic with a two-sided z threshold.
inline Statistic identity_stat(std::string name, MeanEstimate lhs, MeanEstimate rhs,
                               double z) {
  const double se = std::hypot(lhs.standard_error, rhs.standard_error);
  Statistic s = within_se(std::move(name), lhs.mean - rhs.mean, se, 0.0, z);
  s.extra["lhs"] = lhs.mean;
  s.extra["lhs_se"] = lhs.standard_error;
  s.extra["rhs"] = rhs.mean;
  s.extra["rhs_se"] = rhs.standard_error;
  return s;
}

/// E[g(S_0..S_n) h_alpha(S_n)/h_alpha(0); min S >= -alpha] for each g, from
/// `walks` plain many-to-one walks. Walk i uses stream (seed, i).
inline std::vector<MeanEstimate> h_weighted_walk_means(const BoundaryModel& model,
                                                       const RenewalTable& table, double alpha,
                                                       std::size_t n, std::size_t walks,
                                                       std::uint64_t seed, unsigned threads,
                                                       const std::vector<PathFunction>& gs) {
  const ManyToOneLaw law(model);
  const double h_root = table.h_alpha(alpha, 0.0);
  std::vector<std::vector<double>> values(gs.size(), std::vector<double>(walks, 0.0));
  parallel_for(walks, threads, [&](std::size_t i) {
    Rng rng(stream_key(seed, i));
    std::vector<double> path(n + 1, 0.0);
    bool above = true;
    for (std::size_t k = 1; k <= n; ++k) {
      path[k] = path[k - 1] + law.sample(rng);
      above = above && path[k] >= -alpha;
    }
    if (!above) return;
    const double weight = table.h_alpha(alpha, path[n]) / h_root;
    for (std::size_t g = 0; g < gs.size(); ++g) values[g][i] = weight * gs[g](path);
  });
  std::vector<MeanEstimate> out;
  for (const auto& v : values) out.push_back(estimate_of(v));
  return out;
}

}  // namespace brw::detail
