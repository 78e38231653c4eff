// SPDX-License-Identifier: Apache-2.0
#include "brw/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "brw/kahan.hpp"
#include "brw/martingale.hpp"
#include "brw/meander.hpp"
#include "brw/polymer.hpp"
#include "brw/spine.hpp"
#include "experiment_util.hpp"

namespace brw {

using nlohmann::json;
using namespace detail;

// ---------------------------------------------------------------- config

namespace {

template <class T>
T sim_value(const json& sim, const char* key, T fallback) {
  if (!sim.contains(key) || sim.at(key).is_null()) return fallback;
  try {
    return sim.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("sim.") + key + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed,
                              unsigned threads) {
  if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  if (!doc.contains("model") || !doc.at("model").is_object()) {
    throw Error(ErrorCode::ConfigError, "config needs a `model` object");
  }
  if (!doc.contains("sim") || !doc.at("sim").is_object()) {
    throw Error(ErrorCode::ConfigError, "config needs a `sim` object");
  }
  ExperimentConfig config;
  config.model_block = doc.at("model");
  const json& sim = doc.at("sim");
  config.sim.max_gen = sim_value<std::size_t>(sim, "max_gen", config.sim.max_gen);
  config.sim.replicates = sim_value<std::size_t>(sim, "replicates", config.sim.replicates);
  config.sim.max_particles = sim_value<std::size_t>(sim, "max_particles", config.sim.max_particles);
  if (sim.contains("barrier_alpha") && !sim.at("barrier_alpha").is_null()) {
    config.sim.barrier_alpha = sim_value<double>(sim, "barrier_alpha", 0.0);
  }
  if (seed) {
    config.sim.seed = *seed;
  } else if (sim.contains("seed")) {
    config.sim.seed = sim_value<std::uint64_t>(sim, "seed", 0);
  } else {
    throw Error(ErrorCode::ConfigError, "sim.seed is required (or pass --seed)");
  }
  if (doc.contains("experiment")) {
    if (!doc.at("experiment").is_object()) {
      throw Error(ErrorCode::ConfigError, "`experiment` must be an object");
    }
    config.experiment = doc.at("experiment");
  }
  config.threads = std::max(1u, threads);
  try {
    (void)config.model();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, std::string("model: ") + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("model: ") + e.what());
  }
  return config;
}

json ExperimentConfig::to_json() const {
  json sim_json = {{"max_gen", sim.max_gen},
                   {"replicates", sim.replicates},
                   {"seed", sim.seed},
                   {"max_particles", sim.max_particles},
                   {"barrier_alpha", nullptr}};
  if (sim.barrier_alpha) sim_json["barrier_alpha"] = *sim.barrier_alpha;
  return {{"model", model_block}, {"sim", sim_json}, {"experiment", experiment}};
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(to_json().dump()); }

// ---------------------------------------------------------------- output

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string hex64(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << value;
  return out.str();
}

namespace {

std::string cell_text(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

json cell_json(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  if (const auto* d = std::get_if<double>(&cell)) {
    return std::isfinite(*d) ? json(*d) : json(format_number(*d));
  }
  return std::get<std::string>(cell);
}

json finite_or_text(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

}  // namespace

void Table::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
    out << '\n';
  }
}

void Table::write_jsonl(std::ostream& out) const {
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < row.size() && c < columns.size(); ++c) {
      obj[columns[c]] = cell_json(row[c]);
    }
    out << obj.dump() << '\n';
  }
}

bool RunReport::passed() const noexcept {
  return std::all_of(statistics.begin(), statistics.end(),
                     [](const Statistic& s) { return !s.pass || *s.pass; });
}

const Statistic* RunReport::find(const std::string& name) const noexcept {
  for (const auto& s : statistics) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

namespace {

json statistic_json(const Statistic& s) {
  json obj = {{"name", s.name},
              {"estimate", finite_or_text(s.estimate)},
              {"standard_error", finite_or_text(s.standard_error)}};
  if (s.target) obj["target"] = finite_or_text(*s.target);
  if (!s.tolerance.empty()) obj["tolerance"] = s.tolerance;
  if (s.pass) obj["pass"] = *s.pass;
  if (!s.extra.empty()) obj["extra"] = s.extra;
  return obj;
}

}  // namespace

json RunReport::to_json() const {
  json stats = json::array();
  for (const auto& s : statistics) stats.push_back(statistic_json(s));
  return {{"experiment", experiment},
          {"version", kVersion},
          {"seed", seed},
          {"config_hash", hex64(config_hash)},
          {"wall_clock_seconds", wall_clock_seconds},
          {"passed", passed()},
          {"parameters", parameters},
          {"statistics", stats}};
}

void write_report(const RunReport& report, const std::filesystem::path& dir,
                  OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
    return out;
  };
  const std::string prefix = report.experiment + "_";
  for (const auto& table : report.tables) {
    if (format == OutputFormat::Csv) {
      auto out = open(prefix + table.name + ".csv");
      table.write_csv(out);
    } else {
      auto out = open(prefix + table.name + ".jsonl");
      table.write_jsonl(out);
    }
  }
  for (const auto& [name, contents] : report.attachments) {
    auto out = open(prefix + name);
    out << contents;
  }
  auto out = open(prefix + "report.jsonl");
  out << json{{"type", "run"},
              {"experiment", report.experiment},
              {"config_hash", hex64(report.config_hash)},
              {"seed", report.seed},
              {"version", kVersion},
              {"wall_clock_seconds", report.wall_clock_seconds},
              {"passed", report.passed()},
              {"parameters", report.parameters}}
             .dump()
      << '\n';
  for (const auto& s : report.statistics) {
    json obj = statistic_json(s);
    obj["type"] = "statistic";
    out << obj.dump() << '\n';
  }
}

// ---------------------------------------------------------------- helpers

namespace {

// Binary trees double every generation; deeper runs do not fit in memory.
constexpr std::size_t kMaxDeskDepth = 22;

void require_desk_scale(const ExperimentConfig& config) {
  if (config.sim.max_gen > kMaxDeskDepth) {
    throw Error(ErrorCode::ConfigError, "sim.max_gen must be at most " + std::to_string(kMaxDeskDepth));
  }
}

double sigma_of(const BoundaryModel& model) { return std::sqrt(model.sigma2()); }

std::string suffix(double v) { return format_number(v); }

Statistic median_stat(std::string name, const std::vector<double>& values,
                      std::optional<double> target = std::nullopt) {
  const auto m = median_with_ci(values);
  Statistic s = info(std::move(name), m.median, m.standard_error, target);
  s.extra["ci_lower"] = m.lower;
  s.extra["ci_upper"] = m.upper;
  s.extra["count"] = values.size();
  return s;
}

}  // namespace

// ---------------------------------------------------------------- simulate

RunReport run_simulate(const ExperimentConfig& config) {
  Stopwatch clock;
  RunReport report = start_report("simulate", config);
  const BoundaryModel model = config.model();
  const json& ex = config.experiment;
  const auto betas = param<std::vector<double>>(ex, "betas", {0.5, 1.0});
  const bool survive = param<bool>(ex, "condition_on_survival", false);
  const bool dump = param<bool>(ex, "dump_first", false);
  const std::size_t n = config.sim.max_gen;
  const std::size_t reps = config.sim.replicates;
  const SimulationOptions options = simulation_options(config);
  std::optional<RenewalTable> table;
  if (options.barrier_alpha && ex.contains("renewal")) {
    table = renewal_from_block(model, sub_block(ex, "renewal"), config.sim.seed, config.threads);
  }
  std::vector<MartingaleSeries> series(reps);
  std::vector<std::size_t> attempts(reps, 1);
  std::string first_dump;
  const std::uint64_t seed = stream_key(config.sim.seed, 0x73696dull);
  parallel_for(reps, config.threads, [&](std::size_t r) {
    Forest forest = survive ? simulate_surviving(model, n, seed, r, options, &attempts[r])
                            : simulate(model, n, stream_key(seed, r), options);
    series[r] = compute_series(forest, betas, model, options.barrier_alpha,
                               table ? &*table : nullptr);
    if (dump && r == 0) {
      std::ostringstream out(std::ios::binary);
      forest.write_dump(out);
      first_dump = out.str();
    }
  });

  Table t{"series", {"replicate", "generation", "beta", "W_beta", "W", "D", "W_alpha", "D_alpha"}, {}};
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& s = series[r];
    for (std::size_t k = 0; k <= n; ++k) {
      for (std::size_t b = 0; b < betas.size(); ++b) {
        std::vector<Cell> row{static_cast<std::int64_t>(r), static_cast<std::int64_t>(k),
                              betas[b], s.w_beta[b][k], s.w[k], s.d[k]};
        row.push_back(s.w_alpha.empty() ? Cell{std::string()} : Cell{s.w_alpha[k]});
        row.push_back(s.d_alpha.empty() ? Cell{std::string()} : Cell{s.d_alpha[k]});
        t.rows.push_back(std::move(row));
      }
    }
  }
  report.tables.push_back(std::move(t));
  if (!first_dump.empty()) report.attachments["forest_0.bin"] = std::move(first_dump);

  const double z = param<double>(ex, "z", 3.0);
  for (std::size_t b = 0; b < betas.size(); ++b) {
    std::vector<double> last(reps);
    for (std::size_t r = 0; r < reps; ++r) last[r] = series[r].w_beta[b][n];
    const auto est = mean_and_se(last);
    const std::string name = "mean_W_beta_" + suffix(betas[b]);
    // Conditioning on survival biases the mean upwards, so no target then.
    if (!survive && !options.barrier_alpha) {
      report.statistics.push_back(within_se(name, est.mean, est.standard_error, 1.0, z));
    } else {
      report.statistics.push_back(info(name, est.mean, est.standard_error));
    }
  }
  std::size_t extinct = 0, total_attempts = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    if (series[r].w[n] == 0.0) ++extinct;
    total_attempts += attempts[r];
  }
  const double p = static_cast<double>(extinct) / static_cast<double>(std::max<std::size_t>(1, reps));
  report.statistics.push_back(
      info("extinct_fraction", p, std::sqrt(p * (1.0 - p) / static_cast<double>(std::max<std::size_t>(1, reps)))));
  if (survive) {
    report.statistics.push_back(info("survival_attempts_per_forest",
                                     static_cast<double>(total_attempts) / static_cast<double>(std::max<std::size_t>(1, reps)),
                                     0.0));
  }
  report.wall_clock_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- theorem-a

RunReport run_theorem_a(const ExperimentConfig& config) {
  Stopwatch clock;
  RunReport report = start_report("theorem-a", config);
  require_desk_scale(config);
  const BoundaryModel model = config.model();
  const json& ex = config.experiment;
  auto n_values = param<std::vector<std::size_t>>(ex, "n_values", {12, 16, 20});
  if (n_values.empty()) throw Error(ErrorCode::ConfigError, "experiment.n_values is empty");
  std::sort(n_values.begin(), n_values.end());
  const double tol = param<double>(ex, "tolerance", 0.35);
  const std::size_t n_max = require_depth(config, n_values.back());
  const std::size_t reps = config.sim.replicates;
  const double target = std::sqrt(2.0 / (std::numbers::pi * model.sigma2()));

  std::vector<std::vector<double>> w(reps), d(reps);
  const std::uint64_t seed = stream_key(config.sim.seed, 0x74686d61ull);
  const std::size_t attempts =
      for_surviving(model, n_max, seed, reps, config, [&](std::size_t r, const Forest& f) {
        const auto s = compute_series(f, {}, model);
        for (auto k : n_values) {
          w[r].push_back(s.w[k]);
          d[r].push_back(s.d[k]);
        }
      });

  Table t{"ratios", {"replicate", "n", "W", "D", "ratio"}, {}};
  std::vector<std::vector<double>> ratios(n_values.size(), std::vector<double>(reps));
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < n_values.size(); ++i) {
      const double ratio = std::sqrt(static_cast<double>(n_values[i])) * w[r][i] / d[r][i];
      ratios[i][r] = ratio;
      t.rows.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(n_values[i]),
                        w[r][i], d[r][i], ratio});
    }
  }
  report.tables.push_back(std::move(t));
  report.statistics.push_back(info("target", target, 0.0));
  std::vector<double> errors;
  std::vector<double> error_se;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const std::string name = "median_ratio_n" + std::to_string(n_values[i]);
    Statistic s = median_stat(name, ratios[i], target);
    if (i + 1 == n_values.size() && n_values[i] > 1) {
      s.pass = std::fabs(s.estimate - target) <= tol * target;
      s.tolerance = "relative " + format_number(tol);
    }
    if (n_values[i] > 1) {
      errors.push_back(std::fabs(s.estimate - target));
      error_se.push_back(s.standard_error);
    }
    report.statistics.push_back(std::move(s));
  }
  if (errors.size() >= 2) {
    double worst = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 1; i < errors.size(); ++i) {
      worst = std::max(worst, errors[i] - errors[i - 1]);
      ok = ok && errors[i] <= errors[i - 1];
    }
    Statistic s = flag("abs_error_nonincreasing", ok, worst, error_se.back(),
                       "|median - target| non-increasing in n");
    s.extra["abs_errors"] = errors;
    report.statistics.push_back(std::move(s));
  }
  report.statistics.push_back(info("survival_rate",
                                   static_cast<double>(reps) / static_cast<double>(std::max<std::size_t>(1, attempts)),
                                   0.0));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- first order

RunReport run_first_order(const ExperimentConfig& config) {
  Stopwatch clock;
  RunReport report = start_report("first-order", config);
  require_desk_scale(config);
  const BoundaryModel model = config.model();
  const json& ex = config.experiment;
  const auto betas = param<std::vector<double>>(ex, "betas", {0.5});
  const auto cs = param<std::vector<double>>(ex, "C_values", {1.0, 2.0, 5.0});
  const double chain_c = param<double>(ex, "chain_C", 50.0);
  const double identity_tol = param<double>(ex, "identity_tolerance", 1e-10);
  const std::size_t depth = require_depth(config, param<std::size_t>(ex, "n", config.sim.max_gen));
  const std::size_t reps = config.sim.replicates;
  const double sigma = sigma_of(model);

  struct Case {
    double beta, c, alpha, phi;
    std::size_t n;
  };
  std::vector<Case> cases;
  for (double beta : betas) {
    if (!(beta < 1.0) || !model.domain().contains(beta)) {
      throw Error(ErrorCode::BetaOutsideDomain, "first-order needs beta < 1 inside the domain");
    }
    for (double c : cs) {
      const double alpha = 1.0 - beta;
      const auto n = static_cast<std::size_t>(std::floor(c / (alpha * alpha) + 1e-9));
      if (n > depth) {
        throw Error(ErrorCode::BudgetExceeded,
                    "n(alpha, C) = " + std::to_string(n) + " exceeds the simulated depth " +
                        std::to_string(depth) + " for beta " + format_number(beta) + ", C " +
                        format_number(c));
      }
      if (n == 0) throw Error(ErrorCode::ConfigError, "C too small: n(alpha, C) = 0");
      cases.push_back({beta, c, alpha, model.log_laplace(beta), n});
    }
  }

  struct Row {
    double w_beta, scaled, two_d, prop, rel_diff;
  };
  std::vector<std::vector<Row>> rows(reps, std::vector<Row>(cases.size()));
  const std::uint64_t seed = stream_key(config.sim.seed, 0x666f7264ull);
  for_surviving(model, depth, seed, reps, config, [&](std::size_t r, const Forest& f) {
    const auto s = compute_series(f, betas, model);
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const Case& k = cases[c];
      const auto b = static_cast<std::size_t>(
          std::find(betas.begin(), betas.end(), k.beta) - betas.begin());
      const Generation& gen = f.generation(k.n);
      CompensatedSum tilted, prop;
      const double scale = std::sqrt(k.c) / std::sqrt(static_cast<double>(k.n));
      for (double v : gen.position) {
        tilted += std::exp(-v + k.alpha * v);
        prop += std::exp(-v + scale * v);
      }
      const double direct = s.w_beta[b][k.n];
      const double nphi = k.phi * static_cast<double>(k.n);
      const double way2 = std::exp(-nphi) * tilted.value();
      const double stat = tilted.value() / s.w[k.n];
      const double way3 = std::exp(-nphi) * s.w[k.n] * stat;
      const double rel = std::max(std::fabs(way2 - direct), std::fabs(way3 - direct)) /
                         std::fabs(direct);
      rows[r][c] = {direct, direct / k.alpha, 2.0 * s.d_proxy(), prop.value() / s.w[k.n], rel};
    }
  });

  Table t{"first_order", {"replicate", "beta", "C", "n", "W_beta", "W_beta_over_alpha", "two_D_proxy", "prop_stat", "rel_diff"}, {}};
  double worst_rel = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const Row& row = rows[r][c];
      worst_rel = std::max(worst_rel, row.rel_diff);
      t.rows.push_back({static_cast<std::int64_t>(r), cases[c].beta, cases[c].c,
                        static_cast<std::int64_t>(cases[c].n), row.w_beta, row.scaled, row.two_d,
                        row.prop, row.rel_diff});
    }
  }
  report.tables.push_back(std::move(t));
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const std::string tag = "_beta" + suffix(cases[c].beta) + "_C" + suffix(cases[c].c);
    std::vector<double> scaled(reps), two_d(reps), diff(reps), prop(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      scaled[r] = rows[r][c].scaled;
      two_d[r] = rows[r][c].two_d;
      diff[r] = scaled[r] - two_d[r];
      prop[r] = rows[r][c].prop;
    }
    const auto a = mean_and_se(scaled);
    const auto b = mean_and_se(two_d);
    const auto dd = mean_and_se(diff);
    report.statistics.push_back(info("mean_W_beta_over_alpha" + tag, a.mean, a.standard_error));
    report.statistics.push_back(info("mean_two_D_proxy" + tag, b.mean, b.standard_error));
    report.statistics.push_back(info("mean_difference" + tag, dd.mean, dd.standard_error));
    report.statistics.push_back(
        median_stat("median_prop_stat" + tag, prop, meander_exp_moment(sigma * std::sqrt(cases[c].c))));
  }
  report.statistics.push_back(at_most("algebraic_identity_max_rel_diff", worst_rel, identity_tol));
  const double f = constants_chain(chain_c, model.sigma2());
  Statistic chain = info("constants_chain_f_C" + suffix(chain_c), f, 0.0, 2.0);
  chain.pass = std::fabs(f - 2.0) < 1e-6;
  chain.tolerance = "absolute 1e-06";
  report.statistics.push_back(std::move(chain));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- meander fdd

namespace {

/// P(R_t <= a) and its SE from a weighted meander batch.
MeanEstimate weighted_probability(const MeanderBatch& batch, std::size_t j, double a) {
  double sw = 0.0, hit = 0.0;
  for (const auto& s : batch.samples) {
    sw += s.weight;
    if (s.values[j] <= a) hit += s.weight;
  }
  const double p = hit / sw;
  double var = 0.0;
  for (const auto& s : batch.samples) {
    const double dev = (s.values[j] <= a ? 1.0 : 0.0) - p;
    var += s.weight * s.weight * dev * dev;
  }
  return {p, std::sqrt(var) / sw};
}

std::size_t index_of(const std::vector<double>& grid, double t) {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (std::fabs(grid[j] - t) < 1e-12) return j;
  }
  throw Error(ErrorCode::ConfigError, "time " + format_number(t) + " is not on the t grid");
}

}  // namespace

RunReport run_meander_fdd(const ExperimentConfig& config) {
  Stopwatch clock;
  RunReport report = start_report("meander-fdd", config);
  require_desk_scale(config);
  const BoundaryModel model = config.model();
  const json& ex = config.experiment;
  const std::size_t n = require_depth(config, param<std::size_t>(ex, "n", config.sim.max_gen));
  auto t_grid = param<std::vector<double>>(ex, "t_grid", {0.25, 0.5, 0.75, 1.0});
  std::sort(t_grid.begin(), t_grid.end());
  if (t_grid.empty() || !(t_grid.front() > 0.0) || t_grid.back() > 1.0) {
    throw Error(ErrorCode::ConfigError, "experiment.t_grid must lie in (0, 1]");
  }
  const double x_max = param<double>(ex, "x_max", 4.0);
  const double x_step = param<double>(ex, "x_step", 0.05);
  const double tol = param<double>(ex, "tolerance", 0.15);
  const json product = sub_block(ex, "product");
  const double t_f = param<double>(product, "t_f", 0.5);
  const double a_f = param<double>(product, "a", 1.0);
  const double t_g = param<double>(product, "t_g", 1.0);
  const double b_g = param<double>(product, "b", 1.5);
  const double z = param<double>(ex, "z", 3.0);
  const std::size_t meander_samples = param<std::size_t>(ex, "meander_samples", 50000);
  const std::size_t resolution = param<std::size_t>(ex, "meander_resolution", kMeanderResolution);
  const std::size_t jf = index_of(t_grid, t_f);
  const std::size_t jg = index_of(t_grid, t_g);
  const std::size_t reps = config.sim.replicates;
  // Polymer trajectories are already divided by sqrt(n).
  const double scale = sigma_of(model);
  const auto bins = static_cast<std::size_t>(std::llround(x_max / x_step));
  const std::size_t d = t_grid.size();

  // cdf[r][j * (bins + 1) + i] = mu_n(V_t / sigma <= i * x_step).
  std::vector<std::vector<double>> cdf(reps);
  std::vector<double> prod(reps), unit_err(reps);
  const std::uint64_t seed = stream_key(config.sim.seed, 0x66646400ull);
  for_surviving(model, n, seed, reps, config, [&](std::size_t r, const Forest& f) {
    const PolymerPoints points = polymer_points(f, t_grid);
    auto& c = cdf[r];
    c.assign(d * (bins + 1), 0.0);
    double total = 0.0, mass_f = 0.0, mass_g = 0.0;
    for (std::size_t leaf = 0; leaf < points.leaves(); ++leaf) {
      const double w = points.weights[leaf];
      total += w;
      const auto row = points.row(leaf);
      for (std::size_t j = 0; j < d; ++j) {
        const double y = row[j] / scale;
        const double pos = std::ceil(y / x_step - 1e-12);
        const auto bin = pos <= 0.0 ? std::size_t{0} : static_cast<std::size_t>(pos);
        if (bin <= bins) c[j * (bins + 1) + bin] += w;
      }
      if (row[jf] / scale <= a_f) mass_f += w;
      if (row[jg] / scale <= b_g) mass_g += w;
    }
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 1; i <= bins; ++i) c[j * (bins + 1) + i] += c[j * (bins + 1) + i - 1];
    }
    prod[r] = mass_f * mass_g;
    unit_err[r] = std::fabs(total - 1.0);
  });

  Table t{"fdd", {"t", "x", "empirical", "empirical_se", "meander"}, {}};
  std::vector<double> column(reps);
  for (std::size_t j = 0; j < d; ++j) {
    double dist = 0.0, dist_se = 0.0;
    for (std::size_t i = 0; i <= bins; ++i) {
      for (std::size_t r = 0; r < reps; ++r) column[r] = cdf[r][j * (bins + 1) + i];
      const auto est = mean_and_se(column);
      const double x = static_cast<double>(i) * x_step;
      const double ref = meander_marginal_cdf(t_grid[j], x);
      t.rows.push_back({t_grid[j], x, est.mean, est.standard_error, ref});
      if (std::fabs(est.mean - ref) > dist) {
        dist = std::fabs(est.mean - ref);
        dist_se = est.standard_error;
      }
    }
    const std::string name = "cdf_distance_t" + suffix(t_grid[j]);
    if (t_grid[j] == 1.0) {
      report.statistics.push_back(at_most(name, dist, tol, dist_se));
    } else {
      report.statistics.push_back(info(name, dist, dist_se));
    }
  }
  report.tables.push_back(std::move(t));
  report.statistics.push_back(
      at_most("unit_functional_max_error", *std::max_element(unit_err.begin(), unit_err.end()), 1e-12));

  // Product of two one-particle functionals against independent meanders.
  Rng rng_a(stream_key(config.sim.seed, 0x6d65616eull, 1));
  Rng rng_b(stream_key(config.sim.seed, 0x6d65616eull, 2));
  const MeanderBatch first = sample_meander(t_grid, rng_a, meander_samples, resolution);
  const MeanderBatch second = sample_meander(t_grid, rng_b, meander_samples, resolution);
  const MeanEstimate pf = weighted_probability(first, jf, a_f);
  const MeanEstimate pg = weighted_probability(second, jg, b_g);
  const double mc_target = pf.mean * pg.mean;
  const double mc_se = std::hypot(pf.standard_error * pg.mean, pg.standard_error * pf.mean);
  const auto est = mean_and_se(prod);
  Statistic ps = identity_stat("product_functional", {est.mean, est.standard_error},
                               {mc_target, mc_se}, z);
  ps.extra["closed_form"] = meander_marginal_cdf(t_f, a_f) * meander_marginal_cdf(t_g, b_g);
  report.statistics.push_back(std::move(ps));
  report.statistics.push_back(info("meander_ess", first.ess, 0.0));
  std::vector<double> ends, weights;
  const std::size_t j1 = d - 1;
  for (const auto& s : first.samples) {
    ends.push_back(s.values[j1]);
    weights.push_back(s.weight);
  }
  if (t_grid.back() == 1.0) {
    report.statistics.push_back(info("meander_sampler_ks_rayleigh",
                                     ks_statistic_weighted(ends, weights, rayleigh_cdf), 0.0));
  }
  report.wall_clock_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- overlap

RunReport run_overlap(const ExperimentConfig& config) {
  Stopwatch clock;
  RunReport report = start_report("overlap", config);
  require_desk_scale(config);
  const BoundaryModel model = config.model();
  const json& ex = config.experiment;
  auto n_values = param<std::vector<std::size_t>>(ex, "n_values", {8, 12, 16});
  std::sort(n_values.begin(), n_values.end());
  const auto deltas = param<std::vector<double>>(ex, "deltas", {0.0, 0.25, 0.5, 0.75, 1.0});
  const double trend_delta = param<double>(ex, "trend_delta", 0.5);
  const std::size_t brute_forests = param<std::size_t>(ex, "bruteforce_forests", 20);
  const std::size_t brute_depth = param<std::size_t>(ex, "bruteforce_depth", 6);
  const std::size_t reps = config.sim.replicates;
  for (auto n : n_values) require_depth(config, n);

  std::vector<std::vector<std::vector<double>>> pm(
      n_values.size(), std::vector<std::vector<double>>(deltas.size(), std::vector<double>(reps)));
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const std::uint64_t seed = stream_key(config.sim.seed, 0x6f766c00ull, n_values[i]);
    for_surviving(model, n_values[i], seed, reps, config, [&](std::size_t r, const Forest& f) {
      const auto out = overlap_pair_mass(f, deltas);
      for (std::size_t k = 0; k < deltas.size(); ++k) pm[i][k][r] = out[k].pair_mass;
    });
  }
  Table t{"pair_mass", {"replicate", "n", "delta", "pair_mass"}, {}};
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t k = 0; k < deltas.size(); ++k) {
        t.rows.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(n_values[i]),
                          deltas[k], pm[i][k][r]});
      }
    }
  }
  report.tables.push_back(std::move(t));
  std::vector<double> trend;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      Statistic s = median_stat(
          "median_pair_mass_n" + std::to_string(n_values[i]) + "_delta" + suffix(deltas[k]),
          pm[i][k]);
      if (deltas[k] == trend_delta) trend.push_back(s.estimate);
      report.statistics.push_back(std::move(s));
    }
  }
  // delta = 0 keeps every pair.
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (deltas[k] != 0.0) continue;
    double worst = 0.0;
    for (const auto& per_n : pm) {
      for (double v : per_n[k]) worst = std::max(worst, std::fabs(v - 1.0));
    }
    report.statistics.push_back(at_most("delta_zero_max_error", worst, 1e-12));
  }
  if (trend.size() == n_values.size() && trend.size() >= 2) {
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < trend.size(); ++i) {
      ok = ok && trend[i] < trend[i - 1];
      worst = std::max(worst, trend[i] - trend[i - 1]);
    }
    Statistic s = flag("median_strictly_decreasing_delta" + suffix(trend_delta), ok, worst, 0.0,
                       "strictly decreasing in n");
    s.extra["medians"] = trend;
    report.statistics.push_back(std::move(s));
  }
  // Recursion against the quadratic double loop on small forests.
  double worst_rel = 0.0;
  for (std::size_t r = 0; r < brute_forests; ++r) {
    const Forest f = simulate_surviving(model, brute_depth,
                                        stream_key(config.sim.seed, 0x62727574ull), r,
                                        simulation_options(config));
    const Generation& leaves = f.leaves();
    const std::size_t m = leaves.size();
    std::vector<std::vector<std::size_t>> anc(brute_depth + 1, std::vector<std::size_t>(m));
    for (std::size_t x = 0; x < m; ++x) {
      std::size_t idx = x;
      for (std::size_t k = brute_depth; k >= 1; --k) {
        anc[k][x] = idx;
        idx = f.generation(k).parent[idx];
      }
      anc[0][x] = 0;
    }
    CompensatedSum w;
    for (double v : leaves.position) w += std::exp(-v);
    for (double delta : deltas) {
      const double cut = std::ceil(delta * static_cast<double>(brute_depth) - 1e-9);
      CompensatedSum pairs;
      for (std::size_t u = 0; u < m; ++u) {
        for (std::size_t v = 0; v < m; ++v) {
          bool keep;
          if (cut > static_cast<double>(brute_depth)) {
            keep = u == v;
          } else {
            keep = anc[static_cast<std::size_t>(std::max(0.0, cut))][u] ==
                   anc[static_cast<std::size_t>(std::max(0.0, cut))][v];
          }
          if (keep) pairs += std::exp(-leaves.position[u] - leaves.position[v]);
        }
      }
      const double brute = pairs.value() / (w.value() * w.value());
      const double fast = overlap_pair_mass(f, delta).pair_mass;
      worst_rel = std::max(worst_rel, std::fabs(fast - brute) / brute);
    }
  }
  if (brute_forests > 0) {
    report.statistics.push_back(at_most("bruteforce_max_rel_diff", worst_rel, 1e-12));
  }
  report.wall_clock_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- prop-exp

RunReport run_prop_exp(const ExperimentConfig& config) {
  Stopwatch clock;
  RunReport report = start_report("prop-exp", config);
  require_desk_scale(config);
  const BoundaryModel model = config.model();
  const json& ex = config.experiment;
  const double c = param<double>(ex, "C", 1.0);
  const std::size_t n = require_depth(config, param<std::size_t>(ex, "n", config.sim.max_gen));
  const double tol = param<double>(ex, "tolerance", 0.30);
  const auto p_values = param<std::vector<double>>(ex, "p_values", {2.0, 4.0});
  const std::size_t reps = config.sim.replicates;
  const double sigma = sigma_of(model);
  const double target = meander_exp_moment(sigma * c);
  const double root_n = std::sqrt(static_cast<double>(n));

  std::vector<double> stat(reps), zero_err(reps);
  std::vector<std::vector<double>> trunc(reps, std::vector<double>(p_values.size()));
  const std::uint64_t seed = stream_key(config.sim.seed, 0x70657870ull);
  for_surviving(model, n, seed, reps, config, [&](std::size_t r, const Forest& f) {
    const Generation& leaves = f.leaves();
    CompensatedSum w, s, s0;
    std::vector<CompensatedSum> tr(p_values.size());
    for (double v : leaves.position) {
      const double e = std::exp(-v);
      const double tilted = std::exp(-v + c * v / root_n);
      w += e;
      s += tilted;
      s0 += std::exp(-v + 0.0 * v / root_n);
      for (std::size_t k = 0; k < p_values.size(); ++k) {
        if (v / root_n >= p_values[k]) tr[k] += tilted;
      }
    }
    stat[r] = s.value() / w.value();
    zero_err[r] = std::fabs(s0.value() / w.value() - 1.0);
    for (std::size_t k = 0; k < p_values.size(); ++k) trunc[r][k] = tr[k].value() / w.value();
  });

  Table t{"prop_exp", {"replicate", "statistic"}, {}};
  for (double p : p_values) t.columns.push_back("truncation_p" + suffix(p));
  bool monotone = true;
  std::size_t violations = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    std::vector<Cell> row{static_cast<std::int64_t>(r), stat[r]};
    for (std::size_t k = 0; k < p_values.size(); ++k) {
      row.push_back(trunc[r][k]);
      if (k > 0 && p_values[k] > p_values[k - 1] && trunc[r][k] > trunc[r][k - 1]) {
        monotone = false;
        ++violations;
      }
    }
    t.rows.push_back(std::move(row));
  }
  report.tables.push_back(std::move(t));
  Statistic med = median_stat("median_statistic", stat, target);
  med.pass = std::fabs(med.estimate - target) <= tol * target;
  med.tolerance = "relative " + format_number(tol);
  report.statistics.push_back(std::move(med));
  for (std::size_t k = 0; k < p_values.size(); ++k) {
    std::vector<double> col(reps);
    for (std::size_t r = 0; r < reps; ++r) col[r] = trunc[r][k];
    const auto e = mean_and_se(col);
    report.statistics.push_back(info("mean_truncation_p" + suffix(p_values[k]), e.mean, e.standard_error));
  }
  report.statistics.push_back(flag("truncation_monotone_in_p", monotone,
                                   static_cast<double>(violations), 0.0,
                                   "mass non-increasing in p on every forest"));
  report.statistics.push_back(
      at_most("c_zero_max_error", *std::max_element(zero_err.begin(), zero_err.end()), 1e-12));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- renewal

RunReport run_renewal(const ExperimentConfig& config) {
  Stopwatch clock;
  RunReport report = start_report("renewal", config);
  const BoundaryModel model = config.model();
  const json& ex = config.experiment;
  const auto harmonic_points = param<std::vector<double>>(ex, "harmonic_points", {0.0, 1.0, 2.0, 5.0});
  const std::size_t harmonic_samples = param<std::size_t>(ex, "harmonic_samples", 1000000);
  const auto theta_points = param<std::vector<double>>(ex, "theta_points", {1.0, 2.0, 5.0});
  const double z = param<double>(ex, "z", 3.0);
  const RenewalTable table = renewal_from_block(model, ex, config.sim.seed, config.threads);

  Table t{"renewal", {"u", "h0", "se", "n_ladders"}, {}};
  const auto u = table.u_grid();
  for (std::size_t i = 0; i < u.size(); ++i) {
    t.rows.push_back({u[i], table.h0_values()[i], table.standard_errors()[i],
                      table.ladder_counts()[i]});
  }
  report.tables.push_back(std::move(t));

  const double sigma = sigma_of(model);
  if (model.gaussian_displacements()) {
    // Symmetric continuous steps: E[ladder height] = sigma / sqrt 2 and
    // P(S_1..S_n >= 0) ~ 1 / sqrt(pi n).
    report.statistics.push_back(within_se("c0", table.c0(), table.c0_se(), std::sqrt(2.0) / sigma, z));
    report.statistics.push_back(within_se("theta", table.theta(), table.theta_se(),
                                          1.0 / std::sqrt(std::numbers::pi), z));
  } else {
    report.statistics.push_back(info("c0", table.c0(), table.c0_se()));
    report.statistics.push_back(info("theta", table.theta(), table.theta_se()));
  }
  Statistic pinned = info("h0_at_zero", table.h0(0.0), 0.0, 1.0);
  pinned.pass = table.h0(0.0) == 1.0;
  pinned.tolerance = "exact";
  report.statistics.push_back(std::move(pinned));
  for (double point : harmonic_points) {
    const auto check = harmonicity_check(model, table, point, harmonic_samples, config.sim.seed);
    Statistic s = within_se("harmonicity_u" + suffix(point), check.expectation.mean,
                            check.combined_se, check.table_value, z);
    report.statistics.push_back(std::move(s));
  }
  std::vector<std::pair<double, MeanEstimate>> thetas;
  for (double point : theta_points) {
    const auto it = std::lower_bound(u.begin(), u.end(), point - 1e-12);
    if (it == u.end() || std::fabs(*it - point) > 1e-9) {
      throw Error(ErrorCode::ConfigError, "theta point " + format_number(point) + " is not on the grid");
    }
    const auto idx = static_cast<std::size_t>(it - u.begin());
    const MeanEstimate th{table.theta_at(idx), table.theta_se_at(idx)};
    thetas.emplace_back(point, th);
    report.statistics.push_back(info("theta_u" + suffix(point), th.mean, th.standard_error));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    for (std::size_t j = i + 1; j < thetas.size(); ++j) {
      const auto& a = thetas[i].second;
      const auto& b = thetas[j].second;
      worst = std::max(worst, std::fabs(a.mean - b.mean) / std::hypot(a.standard_error, b.standard_error));
    }
  }
  if (thetas.size() >= 2) {
    report.statistics.push_back(at_most("theta_max_pairwise_z", worst, z));
  }
  double c1 = std::numeric_limits<double>::infinity(), c1_upper = 0.0, bias = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ratio = table.h0_values()[i] / (1.0 + u[i]);
    c1 = std::min(c1, ratio);
    c1_upper = std::max(c1_upper, ratio);
    bias = std::max(bias, table.tail_bias()[i]);
  }
  report.statistics.push_back(info("shape_c1", c1, 0.0));
  report.statistics.push_back(info("shape_C1", c1_upper, 0.0));
  report.statistics.push_back(info("max_tail_bias", bias, 0.0));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- spine

RunReport run_spine_check(const ExperimentConfig& config) {
  Stopwatch clock;
  RunReport report = start_report("spine-check", config);
  const BoundaryModel model = config.model();
  const json& ex = config.experiment;
  const double alpha = param<double>(ex, "alpha", 2.0);
  const std::size_t n = param<std::size_t>(ex, "n", 10);
  const std::size_t draws = param<std::size_t>(ex, "draws", 10000);
  const std::size_t walks = param<std::size_t>(ex, "walks", 100000);
  const double ks_tol = param<double>(ex, "ks_tolerance", 0.03);
  const double beta = param<double>(ex, "beta", 0.5);
  const std::size_t qbeta_n = param<std::size_t>(ex, "qbeta_n", 4);
  const std::size_t qbeta_forests = param<std::size_t>(ex, "qbeta_forests", 20000);
  const double z = param<double>(ex, "z", 3.0);
  SpineOptions options;
  const std::string method = param<std::string>(ex, "method", "auto");
  if (method == "exact") {
    options.method = TiltMethod::Exact;
  } else if (method == "resampling") {
    options.method = TiltMethod::ImportanceResampling;
  } else if (method != "auto") {
    throw Error(ErrorCode::ConfigError, "experiment.method must be auto, exact or resampling");
  }
  options.batch = param<std::size_t>(ex, "batch", 64);
  const RenewalTable table =
      renewal_from_block(model, sub_block(ex, "renewal"), config.sim.seed, config.threads);

  std::vector<SpineRealization> spines(draws);
  std::vector<double> cond_end(draws);
  parallel_for(draws, config.threads, [&](std::size_t i) {
    Rng rng(stream_key(config.sim.seed, 0x7370696eull, i));
    spines[i] = sample_spine_qalpha(model, table, alpha, n, rng, options);
    Rng walk_rng(stream_key(config.sim.seed, 0x636f6e64ull, i));
    cond_end[i] = conditioned_walk(model, table, alpha, n, walk_rng).back();
  });
  std::vector<double> spine_end(draws);
  double min_spine = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    spine_end[i] = spines[i].spine.back();
    for (double v : spines[i].spine) min_spine = std::min(min_spine, v);
  }
  report.statistics.push_back(at_most("ks_spine_vs_conditioned_walk",
                                      ks_two_sample(spine_end, cond_end), ks_tol));
  Statistic barrier = info("min_spine_position", min_spine, 0.0, -alpha);
  barrier.pass = min_spine >= -alpha;
  barrier.tolerance = ">= -alpha";
  report.statistics.push_back(std::move(barrier));

  // Path identity against plain weighted walks.
  const std::vector<std::string> g_names = {"end_below_2", "end_square_capped", "max_below_4"};
  const std::vector<PathFunction> gs = {
      [](std::span<const double> p) { return p.back() <= 2.0 ? 1.0 : 0.0; },
      [](std::span<const double> p) { return std::min(p.back() * p.back(), 16.0) / 16.0; },
      [](std::span<const double> p) { return *std::max_element(p.begin(), p.end()) <= 4.0 ? 1.0 : 0.0; },
  };
  const auto rhs = h_weighted_walk_means(model, table, alpha, n, walks,
                                         stream_key(config.sim.seed, 0x706c6169ull),
                                         config.threads, gs);
  for (std::size_t g = 0; g < gs.size(); ++g) {
    std::vector<double> lhs(draws);
    for (std::size_t i = 0; i < draws; ++i) lhs[i] = gs[g](spines[i].spine) * spines[i].weight;
    report.statistics.push_back(
        identity_stat("path_identity_" + g_names[g], estimate_of(lhs), rhs[g], z));
  }

  // Q_beta: spine law against weighted sums over plain trees.
  std::vector<double> qb_lhs(draws), qb_inc(draws);
  parallel_for(draws, config.threads, [&](std::size_t i) {
    Rng rng(stream_key(config.sim.seed, 0x71626574ull, i));
    const auto s = sample_spine_qbeta(model, beta, qbeta_n, rng, options);
    qb_lhs[i] = s.spine.back() <= 1.0 ? 1.0 : 0.0;
    qb_inc[i] = s.spine.size() > 1 ? s.spine[1] : 0.0;
  });
  const double phi = model.log_laplace(beta);
  std::vector<double> qb_rhs(qbeta_forests);
  parallel_for(qbeta_forests, config.threads, [&](std::size_t i) {
    const Forest f = simulate(model, qbeta_n, stream_key(config.sim.seed, 0x71627266ull, i));
    CompensatedSum acc;
    for (double v : f.leaves().position) {
      if (v <= 1.0) acc += std::exp(-beta * v - phi * static_cast<double>(qbeta_n));
    }
    qb_rhs[i] = acc.value();
  });
  report.statistics.push_back(
      identity_stat("qbeta_identity_end_below_1", estimate_of(qb_lhs), estimate_of(qb_rhs), z));
  {
    const auto inc = mean_and_se(qb_inc);
    if (model.gaussian_displacements()) {
      report.statistics.push_back(within_se("qbeta_increment_mean", inc.mean, inc.standard_error,
                                            model.displacement_variance() * (1.0 - beta), z));
    } else {
      report.statistics.push_back(
          within_se("qbeta_increment_mean", inc.mean, inc.standard_error, -phi_prime(model, beta), z));
    }
  }

  // Fixed-horizon conditioning from the h-transform: reweighting by 1/h_0(S_n)
  // turns "stay above 0 forever" into "stay above 0 up to n".
  const std::size_t oracle_n = param<std::size_t>(ex, "meander_oracle_n", 10000);
  const std::size_t oracle_paths = param<std::size_t>(ex, "meander_oracle_paths", 10000);
  const double oracle_tol = param<double>(ex, "meander_oracle_tolerance", 0.05);
  if (oracle_n > 0 && oracle_paths > 0) {
    std::vector<double> ends(oracle_paths), weights(oracle_paths);
    const double norm = sigma_of(model) * std::sqrt(static_cast<double>(oracle_n));
    parallel_for(oracle_paths, config.threads, [&](std::size_t i) {
      Rng rng(stream_key(config.sim.seed, 0x6f726163ull, i));
      const double end = conditioned_walk(model, table, 0.0, oracle_n, rng).back();
      ends[i] = end / norm;
      weights[i] = 1.0 / table.h0(end);
    });
    Statistic ks = at_most("meander_oracle_ks_rayleigh", ks_statistic_weighted(ends, weights, rayleigh_cdf),
                           oracle_tol);
    ks.extra["ess"] = effective_sample_size(weights);
    ks.extra["ks_unweighted_maxwell"] = ks_statistic(ends, maxwell_cdf);
    report.statistics.push_back(std::move(ks));
  }

  std::ostringstream csv, diag;
  if (!spines.empty()) {
    write_spine_csv(csv, spines.front());
    write_spine_diagnostics(diag, spines.front());
  }
  report.attachments["spine.csv"] = csv.str();
  report.attachments["spine_diagnostics.jsonl"] = diag.str();
  Table t{"spine_ends", {"draw", "spine_end", "conditioned_walk_end", "weight"}, {}};
  for (std::size_t i = 0; i < draws; ++i) {
    t.rows.push_back({static_cast<std::int64_t>(i), spine_end[i], cond_end[i], spines[i].weight});
  }
  report.tables.push_back(std::move(t));
  report.wall_clock_seconds = clock.seconds();
  return report;
}

// ---------------------------------------------------------------- dispatch

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"simulate", "theorem-a", "first-order",
                                                 "meander-fdd", "overlap", "prop-exp",
                                                 "renewal", "spine-check", "identities"};
  return names;
}

RunReport run_experiment(const std::string& name, const ExperimentConfig& config) {
  if (name == "simulate") return run_simulate(config);
  if (name == "theorem-a") return run_theorem_a(config);
  if (name == "first-order") return run_first_order(config);
  if (name == "meander-fdd") return run_meander_fdd(config);
  if (name == "overlap") return run_overlap(config);
  if (name == "prop-exp") return run_prop_exp(config);
  if (name == "renewal") return run_renewal(config);
  if (name == "spine-check") return run_spine_check(config);
  if (name == "identities") return run_identity_suite(config);
  throw Error(ErrorCode::ConfigError, "unknown experiment: " + name);
}

}  // namespace brw
