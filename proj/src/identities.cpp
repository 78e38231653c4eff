// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "brw/experiments.hpp"
#include "brw/martingale.hpp"
#include "brw/spine.hpp"
#include "experiment_util.hpp"

namespace brw {

using namespace detail;

namespace {

struct NamedPath {
  std::string name;
  PathFunction g;
};

// Bounded after the e^{S_n} factor of the many-to-one side.
std::vector<NamedPath> many_to_one_functions() {
  return {
      {"end_nonpositive", [](std::span<const double> p) { return p.back() <= 0.0 ? 1.0 : 0.0; }},
      {"end_nonpositive_square",
       [](std::span<const double> p) {
         return p.back() <= 0.0 ? std::min(p.back() * p.back(), 4.0) : 0.0;
       }},
      {"min_above_minus1_end_below_1",
       [](std::span<const double> p) {
         return *std::min_element(p.begin(), p.end()) >= -1.0 && p.back() <= 1.0 ? 1.0 : 0.0;
       }},
  };
}

std::vector<NamedPath> spine_functions() {
  return {
      {"end_below_2", [](std::span<const double> p) { return p.back() <= 2.0 ? 1.0 : 0.0; }},
      {"end_square_capped",
       [](std::span<const double> p) { return std::min(p.back() * p.back(), 16.0) / 16.0; }},
      {"max_below_4",
       [](std::span<const double> p) { return *std::max_element(p.begin(), p.end()) <= 4.0 ? 1.0 : 0.0; }},
  };
}

}  // namespace

RunReport run_identity_suite(const ExperimentConfig& config) {
  Stopwatch clock;
  RunReport report = start_report("identities", config);
  const BoundaryModel model = config.model();
  const auto& ex = config.experiment;
  const auto mto_n = param<std::vector<std::size_t>>(ex, "many_to_one_n", {3, 6, 9});
  const std::size_t mto_samples = param<std::size_t>(ex, "many_to_one_samples", 50000);
  const auto harmonic_points = param<std::vector<double>>(ex, "harmonic_points", {0.0, 1.0, 2.0, 5.0});
  const std::size_t harmonic_samples = param<std::size_t>(ex, "harmonic_samples", 1000000);
  const double alpha = param<double>(ex, "alpha", 2.0);
  const std::size_t spine_n = param<std::size_t>(ex, "spine_n", 10);
  const std::size_t spine_draws = param<std::size_t>(ex, "spine_draws", 20000);
  const std::size_t spine_walks = param<std::size_t>(ex, "spine_walks", 100000);
  const auto betas = param<std::vector<double>>(ex, "betas", {0.5, 1.0});
  const std::size_t mart_n = param<std::size_t>(ex, "martingale_n", 8);
  const std::size_t mart_seeds = param<std::size_t>(ex, "martingale_seeds", 10000);
  const std::size_t d_alpha_n = param<std::size_t>(ex, "d_alpha_n", 6);
  const double level = param<double>(ex, "level", 0.0027);
  const bool inject = param<bool>(ex, "inject_h0_zero", false);
  const std::uint64_t seed = config.sim.seed;

  const auto mto = many_to_one_functions();
  const auto spine_gs = spine_functions();
  const std::size_t tests = mto.size() * mto_n.size() + harmonic_points.size() +
                            spine_gs.size() + betas.size() + 2;
  const double z = bonferroni_z(level, tests);
  report.statistics.push_back(info("bonferroni_z", z, 0.0));

  RenewalTable table = renewal_from_block(model, sub_block(ex, "renewal"), seed, config.threads);
  if (inject) table.override_value(0, 2.0);

  for (auto n : mto_n) {
    for (std::size_t g = 0; g < mto.size(); ++g) {
      const auto check = many_to_one_check(model, n, mto[g].g, mto_samples,
                                           stream_key(seed, 0x6d746f00ull, n, g), config.threads);
      report.statistics.push_back(identity_stat(
          "many_to_one_" + mto[g].name + "_n" + std::to_string(n), check.lhs, check.rhs, z));
    }
  }

  for (double u : harmonic_points) {
    const auto check = harmonicity_check(model, table, u, harmonic_samples,
                                         stream_key(seed, 0x6861726dull));
    report.statistics.push_back(within_se("harmonicity_u" + format_number(u),
                                          check.expectation.mean, check.combined_se,
                                          check.table_value, z));
  }

  {
    std::vector<SpineRealization> spines(spine_draws);
    parallel_for(spine_draws, config.threads, [&](std::size_t i) {
      Rng rng(stream_key(seed, 0x73706964ull, i));
      spines[i] = sample_spine_qalpha(model, table, alpha, spine_n, rng);
    });
    std::vector<PathFunction> gs;
    for (const auto& g : spine_gs) gs.push_back(g.g);
    const auto rhs = h_weighted_walk_means(model, table, alpha, spine_n, spine_walks,
                                           stream_key(seed, 0x73707277ull), config.threads, gs);
    for (std::size_t g = 0; g < gs.size(); ++g) {
      std::vector<double> lhs(spine_draws);
      for (std::size_t i = 0; i < spine_draws; ++i) lhs[i] = gs[g](spines[i].spine) * spines[i].weight;
      report.statistics.push_back(
          identity_stat("spine_path_" + spine_gs[g].name, estimate_of(lhs), rhs[g], z));
    }
  }

  {
    const std::size_t depth = std::max(mart_n, d_alpha_n);
    std::vector<std::vector<double>> w(betas.size(), std::vector<double>(mart_seeds));
    std::vector<double> d(mart_seeds), d_alpha(mart_seeds);
    parallel_for(mart_seeds, config.threads, [&](std::size_t i) {
      const Forest f = simulate(model, depth, stream_key(seed, 0x6d617274ull, i),
                                simulation_options(config));
      const auto s = compute_series(f, betas, model, alpha, &table);
      for (std::size_t b = 0; b < betas.size(); ++b) w[b][i] = s.w_beta[b][mart_n];
      d[i] = s.d[mart_n];
      d_alpha[i] = s.d_alpha[d_alpha_n];
    });
    for (std::size_t b = 0; b < betas.size(); ++b) {
      const auto e = mean_and_se(w[b]);
      report.statistics.push_back(within_se("mean_W_beta" + format_number(betas[b]) + "_n" +
                                                std::to_string(mart_n),
                                            e.mean, e.standard_error, 1.0, z));
    }
    const auto ed = mean_and_se(d);
    report.statistics.push_back(
        within_se("mean_D_n" + std::to_string(mart_n), ed.mean, ed.standard_error, 0.0, z));
    // The truncated derivative martingale is a true martingale started at h_alpha(0).
    const auto ea = mean_and_se(d_alpha);
    const MeanEstimate target{table.h_alpha(alpha, 0.0), table.se_at(alpha)};
    report.statistics.push_back(identity_stat(
        "mean_D_alpha" + format_number(alpha) + "_n" + std::to_string(d_alpha_n),
        {ea.mean, ea.standard_error}, target, z));
  }

  report.wall_clock_seconds = clock.seconds();
  return report;
}

}  // namespace brw
