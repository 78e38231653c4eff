// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "brw/error.hpp"
#include "brw/experiments.hpp"

using namespace brw;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_config() {
  return {{"model", {{"family", "binary_gaussian"}}},
          {"sim", {{"max_gen", 6}, {"replicates", 20}, {"seed", 3}}}};
}

ErrorCode code_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a config error");
  return ErrorCode::InvalidArgument;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("brw_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto config = parse_config(base_config());
  CHECK(config.sim.max_gen == 6);
  CHECK(config.sim.seed == 3);
  CHECK_FALSE(config.sim.barrier_alpha.has_value());
  CHECK(parse_config(base_config(), 99).sim.seed == 99);

  auto no_seed = base_config();
  no_seed["sim"].erase("seed");
  CHECK(code_of(no_seed) == ErrorCode::ConfigError);
  CHECK(parse_config(no_seed, 5).sim.seed == 5);

  auto bad_type = base_config();
  bad_type["sim"]["max_gen"] = "six";
  CHECK(code_of(bad_type) == ErrorCode::ConfigError);

  auto bad_model = base_config();
  bad_model["model"]["s2"] = 1.0;
  CHECK(code_of(bad_model) == ErrorCode::ConfigError);

  CHECK(code_of(json::array()) == ErrorCode::ConfigError);
  CHECK(code_of({{"model", {{"family", "binary_gaussian"}}}}) == ErrorCode::ConfigError);
  auto bad_block = base_config();
  bad_block["experiment"] = 3;
  CHECK(code_of(bad_block) == ErrorCode::ConfigError);
}

TEST_CASE("config hash ignores the thread count") {
  const auto a = parse_config(base_config(), std::nullopt, 1);
  const auto b = parse_config(base_config(), std::nullopt, 8);
  CHECK(a.hash() == b.hash());
  const auto c = parse_config(base_config(), 4);
  CHECK(a.hash() != c.hash());
  CHECK(hex64(0xabcull) == "0000000000000abc");
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.0) == "-2");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("CSV quoting") {
  Table t{"demo", {"a", "b"}, {}};
  t.rows.push_back({std::int64_t{1}, std::string("x,y")});
  t.rows.push_back({0.5, std::string("say \"hi\"")});
  std::ostringstream out;
  t.write_csv(out);
  CHECK(out.str() == "a,b\n1,\"x,y\"\n0.5,\"say \"\"hi\"\"\"\n");
  std::ostringstream jl;
  t.write_jsonl(jl);
  CHECK(json::parse(jl.str().substr(0, jl.str().find('\n')))["b"] == "x,y");
}

TEST_CASE("reports are written to disk") {
  auto doc = base_config();
  doc["experiment"] = {{"n_values", {4, 6}}, {"bruteforce_forests", 3}};
  const auto report = run_experiment("overlap", parse_config(doc));
  CHECK(report.experiment == "overlap");
  CHECK(report.find("bruteforce_max_rel_diff") != nullptr);
  CHECK(report.find("no such statistic") == nullptr);
  const auto dir = scratch("report");
  write_report(report, dir, OutputFormat::Csv);
  CHECK(fs::exists(dir / "overlap_pair_mass.csv"));
  std::ifstream in(dir / "overlap_report.jsonl");
  std::string first;
  std::getline(in, first);
  const auto run = json::parse(first);
  CHECK(run["type"] == "run");
  CHECK(run["config_hash"] == hex64(report.config_hash));
  write_report(report, dir, OutputFormat::Jsonl);
  CHECK(fs::exists(dir / "overlap_pair_mass.jsonl"));
  fs::remove_all(dir);
}

TEST_CASE("tables do not depend on the thread count") {
  auto doc = base_config();
  doc["experiment"] = {{"n_values", {4, 6}}, {"bruteforce_forests", 3}};
  for (const std::string name : {"overlap", "simulate"}) {
    const auto one = run_experiment(name, parse_config(doc, std::nullopt, 1));
    const auto three = run_experiment(name, parse_config(doc, std::nullopt, 3));
    const auto d1 = scratch(name + "_1");
    const auto d3 = scratch(name + "_3");
    write_report(one, d1, OutputFormat::Csv);
    write_report(three, d3, OutputFormat::Csv);
    for (const auto& table : one.tables) {
      const std::string file = name + "_" + table.name + ".csv";
      INFO(file);
      CHECK(slurp(d1 / file) == slurp(d3 / file));
    }
    fs::remove_all(d1);
    fs::remove_all(d3);
  }
}

TEST_CASE("experiment dispatch and budgets") {
  CHECK(experiment_names().size() == 9);
  try {
    run_experiment("nope", parse_config(base_config()));
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
  auto doc = base_config();
  doc["experiment"] = {{"C_values", {5.0}}, {"betas", {0.5}}};
  try {
    run_experiment("first-order", parse_config(doc));
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
  }
  auto deep = base_config();
  deep["sim"]["max_gen"] = 30;
  CHECK_THROWS_AS(run_experiment("theorem-a", parse_config(deep)), Error);
}
