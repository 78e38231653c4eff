// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Links only the C interface.
#include <brw/brw.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct RunArgs {
  std::string config;
  std::string out = ".";
  std::string format = "csv";
  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool quiet = false;
};

void print_summary(const nlohmann::json& report) {
  std::cout << report["experiment"].get<std::string>() << "  seed "
            << report["seed"].get<std::uint64_t>() << "  config "
            << report["config_hash"].get<std::string>() << "\n";
  for (const auto& s : report["statistics"]) {
    const char* tag = "INFO";
    if (s.contains("pass")) tag = s["pass"].get<bool>() ? "PASS" : "FAIL";
    std::cout << "  " << tag << "  " << s["name"].get<std::string>() << " = "
              << s["estimate"].dump();
    if (s.contains("standard_error")) std::cout << " +- " << s["standard_error"].dump();
    if (s.contains("target")) std::cout << "  target " << s["target"].dump();
    if (s.contains("tolerance")) std::cout << "  [" << s["tolerance"].get<std::string>() << "]";
    std::cout << "\n";
  }
  std::cout << (report["passed"].get<bool>() ? "PASS" : "FAIL") << "\n";
}

int run(const std::string& name, const RunArgs& args, bool has_seed) {
  std::ifstream in(args.config);
  if (!in) {
    std::cerr << "error: cannot read config " << args.config << "\n";
    return kExitError;
  }
  std::stringstream text;
  text << in.rdbuf();
  brw_run_options options{};
  options.seed = args.seed;
  options.has_seed = has_seed ? 1 : 0;
  options.threads = args.threads;
  options.out_dir = args.out.c_str();
  options.format = args.format.c_str();
  brw_report* report = nullptr;
  const brw_status status = brw_run_experiment(name.c_str(), text.str().c_str(), &options, &report);
  if (status != BRW_OK) {
    std::cerr << "error (" << brw_status_string(status) << "): " << brw_last_error() << "\n";
    return kExitError;
  }
  const int passed = brw_report_passed(report);
  if (!args.quiet) print_summary(nlohmann::json::parse(brw_report_json(report)));
  brw_report_free(report);
  return passed ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching random walk experiments"};
  app.set_version_flag("--version", std::string(brw_version()));
  app.require_subcommand(1);

  RunArgs args;
  std::string chosen;
  bool has_seed = false;
  for (std::size_t i = 0; i < brw_experiment_count(); ++i) {
    const std::string name = brw_experiment_name(i);
    CLI::App* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    sub->add_option("--config", args.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "Output directory")->capture_default_str();
    sub->add_option("--threads", args.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--format", args.format, "Table format")->capture_default_str()->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { args.seed = s; has_seed = true; },
        "Override sim.seed");
    sub->add_flag("--quiet", args.quiet, "Print nothing on success");
    sub->callback([&, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }
  return run(chosen, args, has_seed);
}
