// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "brw/model.hpp"

namespace brw {

struct SimBlock {
  std::size_t max_gen = 20;
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  std::optional<double> barrier_alpha;
  std::size_t max_particles = std::size_t{1} << 24;
};

/*!
 * Parsed run configuration: `model`, `sim` and `experiment` blocks.
 * `sim.seed` is mandatory; nothing draws on ambient entropy.
 */
struct ExperimentConfig {
  nlohmann::json model_block;
  SimBlock sim;
  nlohmann::json experiment = nlohmann::json::object();
  unsigned threads = 1;

  BoundaryModel model() const { return model_from_config(model_block); }
  /// Canonical JSON (threads excluded, so the hash does not depend on them).
  nlohmann::json to_json() const;
  std::uint64_t hash() const;
};

/// Throws ConfigError on missing keys or wrong types. `seed` overrides
/// sim.seed and may stand in for it.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              std::optional<std::uint64_t> seed = std::nullopt,
                              unsigned threads = 1);

struct Statistic {
  std::string name;
  double estimate = 0.0;
  double standard_error = 0.0;
  std::optional<double> target;
  std::string tolerance;  ///< human-readable rule, empty when no pass flag
  std::optional<bool> pass;
  nlohmann::json extra = nlohmann::json::object();
};

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void write_csv(std::ostream& out) const;
  void write_jsonl(std::ostream& out) const;
};

struct RunReport {
  std::string experiment;
  nlohmann::json parameters;
  std::vector<Statistic> statistics;
  std::vector<Table> tables;
  /// Extra files (name -> contents) written next to the tables.
  std::map<std::string, std::string> attachments;
  double wall_clock_seconds = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  /// True when every statistic that carries a pass flag passed.
  bool passed() const noexcept;
  const Statistic* find(const std::string& name) const noexcept;
  nlohmann::json to_json() const;
};

enum class OutputFormat { Csv, Jsonl };

/// Tables as <experiment>_<table>.csv|jsonl, attachments verbatim, and
/// <experiment>_report.jsonl holding run metadata and every statistic.
void write_report(const RunReport& report, const std::filesystem::path& dir,
                  OutputFormat format);

std::string format_number(double value);
std::string hex64(std::uint64_t value);

const std::vector<std::string>& experiment_names();
RunReport run_experiment(const std::string& name, const ExperimentConfig& config);

RunReport run_simulate(const ExperimentConfig& config);
RunReport run_theorem_a(const ExperimentConfig& config);
RunReport run_first_order(const ExperimentConfig& config);
RunReport run_meander_fdd(const ExperimentConfig& config);
RunReport run_overlap(const ExperimentConfig& config);
RunReport run_prop_exp(const ExperimentConfig& config);
RunReport run_renewal(const ExperimentConfig& config);
RunReport run_spine_check(const ExperimentConfig& config);
/// Every exact identity with Bonferroni-adjusted pass flags. Setting
/// experiment.inject_h0_zero corrupts h_0(0) to 2 as a negative control.
RunReport run_identity_suite(const ExperimentConfig& config);

inline constexpr const char* kVersion = "1.0.0";

}  // namespace brw
