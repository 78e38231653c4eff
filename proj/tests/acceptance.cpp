// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, written to stdout and to
// <out>/acceptance.txt. Exit status 0 when the suite ran to completion
// (whatever the verdicts), 1 with --strict and any FAIL, 2 on errors.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "brw/error.hpp"
#include "brw/experiments.hpp"
#include "brw/meander.hpp"
#include "brw/polymer.hpp"
#include "brw/stats.hpp"
#include "oracles.hpp"

using namespace brw;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Pinned tolerances.
constexpr double kExpMomentRelTol = 1e-9;
constexpr double kChainTol = 1e-6;
constexpr double kPolymerMinP = 0.01;
constexpr double kBruteRelTol = 1e-12;
constexpr double kAlgebraicRelTol = 1e-10;
constexpr double kMeanderOracleKs = 0.05;
constexpr double kIdentityBudgetSeconds = 300.0;

struct Verdict {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path configs;
  fs::path out;
  unsigned threads = 1;
};

json load(const Context& ctx, const std::string& file) {
  std::ifstream in(ctx.configs / file);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + (ctx.configs / file).string());
  return json::parse(in);
}

RunReport run(const std::string& name, const json& doc, unsigned threads,
              const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report = run_experiment(name, parse_config(doc, std::nullopt, threads));
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_report(report, dir, OutputFormat::Csv);
  return report;
}

const Statistic& require(const RunReport& r, const std::string& name) {
  const Statistic* s = r.find(name);
  if (!s) throw Error(ErrorCode::InvalidArgument, r.experiment + " has no statistic " + name);
  return *s;
}

std::string num(double v) { return format_number(v); }

std::string failed_flags(const RunReport& r) {
  std::string out;
  for (const auto& s : r.statistics) {
    if (s.pass && !*s.pass) out += (out.empty() ? "" : ",") + s.name;
  }
  return out.empty() ? "none" : out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Pooled chi-square of the top-down polymer sampler against enumerated
// weights over several depth-3 trees.
Verdict polymer_chi_square(Verdict v) {
  const auto model = normalize_boundary(Family::PoissonGaussian, 1.5);
  double stat = 0.0;
  std::size_t dof = 0;
  for (std::size_t r = 0; r < 20; ++r) {
    const Forest f = simulate_surviving(model, 3, 101, r);
    const auto p = oracle::enumerated_polymer_weights(f, 1.0);
    if (p.size() < 2) continue;
    Rng rng(stream_key(103, r));
    const auto draws = sample_polymer(f, 1.0, model, 20000, rng);
    std::vector<double> counts(p.size(), 0.0);
    for (const auto& d : draws) counts[d.node.index] += 1.0;
    const auto c = chi_square(counts, p);
    stat += c.statistic;
    dof += c.dof;
  }
  const double pval = boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat);
  v.pass = pval > kPolymerMinP;
  v.detail += " polymer_chi2_p=" + num(pval) + " (dof " + std::to_string(dof) + ")";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  Context ctx;
  std::string configs = "configs", out = "acceptance_out";
  bool strict = false;
  ctx.threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--configs", configs, "Directory holding the run configurations")
      ->check(CLI::ExistingDirectory);
  app.add_option("--out", out, "Output directory");
  app.add_option("--threads", ctx.threads, "Worker threads for the main runs");
  app.add_flag("--strict", strict, "Exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);
  ctx.configs = configs;
  ctx.out = out;

  std::vector<Verdict> verdicts;
  auto attempt = [&](int id, const std::string& title, const std::function<Verdict(Verdict)>& body) {
    Verdict v{id, title, false, ""};
    try {
      v = body(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << id << "] " << title << ":" << v.detail
              << std::endl;
    verdicts.push_back(v);
  };

  try {
    fs::create_directories(ctx.out);

    attempt(1, "exact identities", [&](Verdict v) {
      const auto r = run("identities", load(ctx, "identities.json"), ctx.threads, ctx.out);
      v.pass = r.passed() && r.wall_clock_seconds < kIdentityBudgetSeconds;
      v.detail = " failed=" + failed_flags(r) + " seconds=" + num(std::round(r.wall_clock_seconds));
      return v;
    });

    // Shared by criteria 2 and 6.
    RunReport overlap;
    bool have_overlap = false;
    auto get_overlap = [&]() -> const RunReport& {
      if (!have_overlap) {
        overlap = run("overlap", load(ctx, "overlap.json"), ctx.threads, ctx.out);
        have_overlap = true;
      }
      return overlap;
    };

    attempt(2, "brute-force oracles", [&](Verdict v) {
      const auto& brute = require(get_overlap(), "bruteforce_max_rel_diff");
      const auto fo = run("first-order", load(ctx, "first_order.json"), ctx.threads, ctx.out);
      const auto& alg = require(fo, "algebraic_identity_max_rel_diff");
      const bool ok_brute = brute.estimate <= kBruteRelTol;
      const bool ok_alg = alg.estimate <= kAlgebraicRelTol;
      v.detail = " overlap_rel=" + num(brute.estimate) + " algebraic_rel=" + num(alg.estimate);
      v = polymer_chi_square(v);
      v.pass = v.pass && ok_brute && ok_alg;
      return v;
    });

    attempt(3, "deterministic numerics", [&](Verdict v) {
      using boost::math::quadrature::gauss_kronrod;
      double worst = 0.0;
      for (double a : {0.5, 1.0, 2.0, 5.0}) {
        const double q = gauss_kronrod<double, 61>::integrate(
            [a](double x) { return std::exp(a * x - x * x / 2.0) * x; }, 0.0,
            std::numeric_limits<double>::infinity(), 15, 1e-14);
        worst = std::max(worst, std::fabs(meander_exp_moment(a) - q) / q);
      }
      const double f50 = constants_chain(50.0, 2.0 * oracle::kLn2);
      v.pass = worst <= kExpMomentRelTol && std::fabs(f50 - 2.0) < kChainTol;
      v.detail = " exp_moment_rel=" + num(worst) + " f(50)=" + num(f50);
      return v;
    });

    attempt(4, "normalized partition function ratio", [&](Verdict v) {
      const auto r = run("theorem-a", load(ctx, "theorem_a.json"), ctx.threads, ctx.out);
      v.pass = r.passed();
      std::string medians;
      for (const auto& s : r.statistics) {
        if (s.name.rfind("median_ratio_n", 0) == 0) medians += " " + s.name + "=" + num(s.estimate);
      }
      v.detail = medians + " failed=" + failed_flags(r);
      return v;
    });

    attempt(5, "polymer endpoint and finite-dimensional laws", [&](Verdict v) {
      const auto r = run("meander-fdd", load(ctx, "meander_fdd.json"), ctx.threads, ctx.out);
      v.pass = r.passed();
      v.detail = " cdf_distance_t1=" + num(require(r, "cdf_distance_t1").estimate) +
                 " failed=" + failed_flags(r);
      return v;
    });

    attempt(6, "overlap decay", [&](Verdict v) {
      const auto& r = get_overlap();
      const Statistic* trend = nullptr;
      for (const auto& s : r.statistics) {
        if (s.name.rfind("median_strictly_decreasing_delta", 0) == 0) trend = &s;
      }
      if (!trend) throw Error(ErrorCode::InvalidArgument, "overlap report has no trend flag");
      v.pass = trend->pass.value_or(false);
      v.detail = " " + trend->name + " medians=" + trend->extra.value("medians", json::array()).dump();
      return v;
    });

    attempt(7, "exponential functional at C=1", [&](Verdict v) {
      const auto r = run("prop-exp", load(ctx, "prop_exp.json"), ctx.threads, ctx.out);
      const auto& m = require(r, "median_statistic");
      v.pass = r.passed();
      v.detail = " median=" + num(m.estimate) + " target=" + num(m.target.value_or(NAN)) +
                 " failed=" + failed_flags(r);
      return v;
    });

    attempt(8, "conditioned walk meander oracle", [&](Verdict v) {
      const auto r = run("spine-check", load(ctx, "spine_check.json"), ctx.threads, ctx.out);
      const auto& ks = require(r, "meander_oracle_ks_rayleigh");
      v.pass = ks.estimate < kMeanderOracleKs;
      v.detail = " ks=" + num(ks.estimate);
      return v;
    });

    attempt(9, "negative control", [&](Verdict v) {
      auto doc = load(ctx, "identities.json");
      doc["experiment"]["inject_h0_zero"] = true;
      const auto r = run("identities", doc, ctx.threads, ctx.out / "negative_control");
      // Passing means the corrupted run was caught.
      v.pass = !r.passed();
      v.detail = " suite_failed=" + std::string(r.passed() ? "no" : "yes") +
                 " flags=" + failed_flags(r);
      return v;
    });

    attempt(10, "determinism across thread counts", [&](Verdict v) {
      bool same = true;
      std::size_t files = 0;
      for (const auto& [name, file] : {std::pair<std::string, std::string>{"simulate", "simulate.json"},
                                       {"overlap", "overlap.json"}}) {
        const auto doc = load(ctx, file);
        const fs::path base = ctx.out / "determinism";
        const auto a = run(name, doc, 1, base / "t1_a");
        run(name, doc, 1, base / "t1_b");
        run(name, doc, 8, base / "t8");
        for (const auto& table : a.tables) {
          const std::string csv = name + "_" + table.name + ".csv";
          const std::string ref = slurp(base / "t1_a" / csv);
          same = same && !ref.empty() && ref == slurp(base / "t1_b" / csv) &&
                 ref == slurp(base / "t8" / csv);
          ++files;
        }
      }
      v.pass = same && files > 0;
      v.detail = " tables_compared=" + std::to_string(files);
      return v;
    });
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }

  std::size_t passed = 0;
  std::ofstream summary(ctx.out / "acceptance.txt");
  for (const auto& v : verdicts) {
    passed += v.pass;
    summary << (v.pass ? "PASS" : "FAIL") << " [" << v.id << "] " << v.title << ":" << v.detail
            << "\n";
  }
  std::cout << passed << "/" << verdicts.size() << " criteria passed" << std::endl;
  summary << passed << "/" << verdicts.size() << " criteria passed\n";
  return strict && passed != verdicts.size() ? 1 : 0;
}
