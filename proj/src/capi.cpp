// SPDX-License-Identifier: Apache-2.0
#include "brw/brw.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "brw/error.hpp"
#include "brw/experiments.hpp"
#include "brw/forest.hpp"
#include "brw/martingale.hpp"
#include "brw/meander.hpp"
#include "brw/model.hpp"
#include "brw/polymer.hpp"
#include "brw/walk.hpp"

struct brw_model {
  brw::BoundaryModel model;
};
struct brw_forest {
  brw::Forest forest;
};
struct brw_series {
  brw::MartingaleSeries series;
};
struct brw_renewal {
  brw::RenewalTable table;
};
struct brw_report {
  brw::RunReport report;
  std::string json;
};

namespace {

thread_local std::string last_error;

brw_status status_of(brw::ErrorCode code) {
  using brw::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return BRW_INVALID_ARGUMENT;
    case ErrorCode::NoSolution: return BRW_NO_SOLUTION;
    case ErrorCode::Unbounded: return BRW_UNBOUNDED;
    case ErrorCode::ParticleCapExceeded: return BRW_PARTICLE_CAP_EXCEEDED;
    case ErrorCode::AllExtinct: return BRW_ALL_EXTINCT;
    case ErrorCode::InvalidNode: return BRW_INVALID_NODE;
    case ErrorCode::BetaOutsideDomain: return BRW_BETA_OUTSIDE_DOMAIN;
    case ErrorCode::ExtinctForest: return BRW_EXTINCT_FOREST;
    case ErrorCode::HorizonTooSmall: return BRW_HORIZON_TOO_SMALL;
    case ErrorCode::WeightCollapse: return BRW_WEIGHT_COLLAPSE;
    case ErrorCode::BudgetExceeded: return BRW_BUDGET_EXCEEDED;
    case ErrorCode::DomainError: return BRW_DOMAIN_ERROR;
    case ErrorCode::ConfigError: return BRW_CONFIG_ERROR;
    case ErrorCode::IoError: return BRW_IO_ERROR;
  }
  return BRW_INTERNAL_ERROR;
}

brw_status fail(brw_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class Fn>
brw_status guard(Fn&& fn) {
  try {
    fn();
    return BRW_OK;
  } catch (const brw::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(BRW_CONFIG_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BRW_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(BRW_INTERNAL_ERROR, e.what());
  }
}

#define BRW_REQUIRE(cond, msg) \
  if (!(cond)) return fail(BRW_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* brw_version(void) { return brw::kVersion; }

const char* brw_status_string(brw_status status) {
  switch (status) {
    case BRW_OK: return "ok";
    case BRW_INVALID_ARGUMENT: return "invalid argument";
    case BRW_NO_SOLUTION: return "no solution";
    case BRW_UNBOUNDED: return "unbounded";
    case BRW_PARTICLE_CAP_EXCEEDED: return "particle cap exceeded";
    case BRW_ALL_EXTINCT: return "all extinct";
    case BRW_INVALID_NODE: return "invalid node";
    case BRW_BETA_OUTSIDE_DOMAIN: return "beta outside domain";
    case BRW_EXTINCT_FOREST: return "extinct forest";
    case BRW_HORIZON_TOO_SMALL: return "horizon too small";
    case BRW_WEIGHT_COLLAPSE: return "weight collapse";
    case BRW_BUDGET_EXCEEDED: return "budget exceeded";
    case BRW_DOMAIN_ERROR: return "domain error";
    case BRW_CONFIG_ERROR: return "config error";
    case BRW_IO_ERROR: return "io error";
    case BRW_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* brw_last_error(void) { return last_error.c_str(); }

brw_status brw_model_create(const char* family, double s2, brw_model** out) {
  BRW_REQUIRE(family && out, "null argument");
  return guard([&] {
    nlohmann::json block = {{"family", family}, {"s2", s2}};
    *out = new brw_model{brw::model_from_config(block)};
  });
}

brw_status brw_model_from_json(const char* json, brw_model** out) {
  BRW_REQUIRE(json && out, "null argument");
  return guard([&] { *out = new brw_model{brw::model_from_config(nlohmann::json::parse(json))}; });
}

void brw_model_free(brw_model* model) { delete model; }

double brw_model_sigma2(const brw_model* model) { return model ? model->model.sigma2() : NAN; }

brw_status brw_model_log_laplace(const brw_model* model, double beta, double* out) {
  BRW_REQUIRE(model && out, "null argument");
  return guard([&] {
    if (!model->model.domain().contains(beta)) {
      throw brw::Error(brw::ErrorCode::BetaOutsideDomain, "beta outside the domain of Phi");
    }
    *out = model->model.log_laplace(beta);
  });
}

brw_status brw_simulate(const brw_model* model, size_t n, uint64_t seed, double barrier_alpha,
                        size_t max_particles, brw_forest** out) {
  BRW_REQUIRE(model && out, "null argument");
  return guard([&] {
    brw::SimulationOptions options;
    if (!std::isnan(barrier_alpha)) options.barrier_alpha = barrier_alpha;
    if (max_particles) options.max_particles = max_particles;
    *out = new brw_forest{brw::simulate(model->model, n, seed, options)};
  });
}

brw_status brw_simulate_surviving(const brw_model* model, size_t n, uint64_t seed,
                                  size_t replicate, brw_forest** out) {
  BRW_REQUIRE(model && out, "null argument");
  return guard([&] {
    *out = new brw_forest{brw::simulate_surviving(model->model, n, seed, replicate)};
  });
}

void brw_forest_free(brw_forest* forest) { delete forest; }

size_t brw_forest_depth(const brw_forest* forest) { return forest ? forest->forest.depth() : 0; }

size_t brw_forest_generation_size(const brw_forest* forest, size_t k) {
  if (!forest || k > forest->forest.depth()) return 0;
  return forest->forest.generation(k).size();
}

const double* brw_forest_positions(const brw_forest* forest, size_t k) {
  if (!forest || k > forest->forest.depth()) return nullptr;
  return forest->forest.generation(k).position.data();
}

const uint32_t* brw_forest_parents(const brw_forest* forest, size_t k) {
  if (!forest || k > forest->forest.depth()) return nullptr;
  return forest->forest.generation(k).parent.data();
}

brw_status brw_forest_write_dump(const brw_forest* forest, const char* path) {
  BRW_REQUIRE(forest && path, "null argument");
  return guard([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw brw::Error(brw::ErrorCode::IoError, std::string("cannot write ") + path);
    forest->forest.write_dump(out);
  });
}

brw_status brw_forest_read_dump(const char* path, brw_forest** out) {
  BRW_REQUIRE(path && out, "null argument");
  return guard([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw brw::Error(brw::ErrorCode::IoError, std::string("cannot read ") + path);
    *out = new brw_forest{brw::Forest::read_dump(in)};
  });
}

brw_status brw_series_compute(const brw_forest* forest, const brw_model* model,
                              const double* betas, size_t n_betas, brw_series** out) {
  BRW_REQUIRE(forest && model && out && (betas || n_betas == 0), "null argument");
  return guard([&] {
    *out = new brw_series{
        brw::compute_series(forest->forest, std::span<const double>(betas, n_betas), model->model)};
  });
}

void brw_series_free(brw_series* series) { delete series; }

double brw_series_w(const brw_series* series, size_t k) {
  if (!series || k >= series->series.w.size()) return NAN;
  return series->series.w[k];
}

double brw_series_d(const brw_series* series, size_t k) {
  if (!series || k >= series->series.d.size()) return NAN;
  return series->series.d[k];
}

double brw_series_w_beta(const brw_series* series, size_t beta_index, size_t k) {
  if (!series || beta_index >= series->series.w_beta.size() ||
      k >= series->series.w_beta[beta_index].size()) {
    return NAN;
  }
  return series->series.w_beta[beta_index][k];
}

brw_status brw_overlap_pair_mass(const brw_forest* forest, double delta, double* out) {
  BRW_REQUIRE(forest && out, "null argument");
  return guard([&] { *out = brw::overlap_pair_mass(forest->forest, delta).pair_mass; });
}

brw_status brw_polymer_sample(const brw_forest* forest, const brw_model* model, double beta,
                              size_t count, uint64_t seed, size_t* leaf_indices) {
  BRW_REQUIRE(forest && model && (leaf_indices || count == 0), "null argument");
  return guard([&] {
    brw::Rng rng(seed);
    const auto draws = brw::sample_polymer(forest->forest, beta, model->model, count, rng);
    for (size_t i = 0; i < draws.size(); ++i) leaf_indices[i] = draws[i].node.index;
  });
}

brw_status brw_renewal_estimate(const brw_model* model, double u_max, double u_step, size_t walks,
                                size_t horizon, uint64_t seed, unsigned threads,
                                brw_renewal** out) {
  BRW_REQUIRE(model && out, "null argument");
  return guard([&] {
    brw::RenewalOptions options;
    options.walks = walks;
    options.horizon = horizon;
    options.threads = threads;
    const auto grid = brw::uniform_grid(u_max, u_step);
    *out = new brw_renewal{brw::estimate_renewal(model->model, grid, options, seed)};
  });
}

void brw_renewal_free(brw_renewal* table) { delete table; }

double brw_renewal_h0(const brw_renewal* table, double u) { return table ? table->table.h0(u) : NAN; }
double brw_renewal_c0(const brw_renewal* table) { return table ? table->table.c0() : NAN; }
double brw_renewal_theta(const brw_renewal* table) { return table ? table->table.theta() : NAN; }

brw_status brw_renewal_write_csv(const brw_renewal* table, const char* path) {
  BRW_REQUIRE(table && path, "null argument");
  return guard([&] {
    std::ofstream out(path);
    if (!out) throw brw::Error(brw::ErrorCode::IoError, std::string("cannot write ") + path);
    table->table.write_csv(out);
  });
}

brw_status brw_meander_cdf(double t, double x, double* out) {
  BRW_REQUIRE(out, "null argument");
  return guard([&] { *out = brw::meander_marginal_cdf(t, x); });
}

brw_status brw_meander_exp_moment(double a, double* out) {
  BRW_REQUIRE(out, "null argument");
  return guard([&] { *out = brw::meander_exp_moment(a); });
}

size_t brw_experiment_count(void) { return brw::experiment_names().size(); }

const char* brw_experiment_name(size_t index) {
  const auto& names = brw::experiment_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

brw_status brw_run_experiment(const char* name, const char* config_json,
                              const brw_run_options* options, brw_report** out) {
  BRW_REQUIRE(name && config_json && out, "null argument");
  return guard([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw brw::Error(brw::ErrorCode::ConfigError, std::string("config is not JSON: ") + e.what());
    }
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    brw::OutputFormat format = brw::OutputFormat::Csv;
    if (options) {
      if (options->has_seed) seed = options->seed;
      threads = options->threads ? options->threads : 1;
      if (options->format) {
        const std::string f = options->format;
        if (f == "jsonl") {
          format = brw::OutputFormat::Jsonl;
        } else if (f != "csv") {
          throw brw::Error(brw::ErrorCode::ConfigError, "format must be csv or jsonl");
        }
      }
    }
    const auto& names = brw::experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw brw::Error(brw::ErrorCode::ConfigError, std::string("unknown experiment: ") + name);
    }
    const brw::ExperimentConfig config = brw::parse_config(doc, seed, threads);
    auto report = std::make_unique<brw_report>();
    report->report = brw::run_experiment(name, config);
    if (options && options->out_dir) brw::write_report(report->report, options->out_dir, format);
    report->json = report->report.to_json().dump();
    *out = report.release();
  });
}

void brw_report_free(brw_report* report) { delete report; }

const char* brw_report_json(const brw_report* report) {
  return report ? report->json.c_str() : nullptr;
}

int brw_report_passed(const brw_report* report) {
  return report && report->report.passed() ? 1 : 0;
}

}  // extern "C"
