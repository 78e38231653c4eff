// SPDX-License-Identifier: Apache-2.0
#include "brw/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brw/error.hpp"
#include "brw/kahan.hpp"

namespace brw {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::ParticleCapExceeded: return "ParticleCapExceeded";
    case ErrorCode::AllExtinct: return "AllExtinct";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::BetaOutsideDomain: return "BetaOutsideDomain";
    case ErrorCode::ExtinctForest: return "ExtinctForest";
    case ErrorCode::HorizonTooSmall: return "HorizonTooSmall";
    case ErrorCode::WeightCollapse: return "WeightCollapse";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

const char* to_string(Family family) noexcept {
  switch (family) {
    case Family::BinaryGaussian: return "binary_gaussian";
    case Family::PoissonGaussian: return "poisson_gaussian";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

namespace {

double atoms_laplace(const std::vector<OffspringAtom>& atoms, double beta) {
  CompensatedSum sum;
  for (const auto& atom : atoms) {
    for (double v : atom.displacements) {
      sum += atom.probability * std::exp(-beta * v);
    }
  }
  return std::log(sum.value());
}

}  // namespace

BoundaryModel::BoundaryModel(CustomLaw law) : family_(Family::Custom) {
  if (!law.atoms.empty()) {
    double total = 0.0;
    double mean = 0.0;
    for (const auto& atom : law.atoms) {
      if (!(atom.probability >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "negative atom probability");
      }
      total += atom.probability;
      mean += atom.probability * static_cast<double>(atom.displacements.size());
    }
    if (std::fabs(total - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument,
                  "atom probabilities must sum to 1");
    }
    if (!law.mean_offspring) law.mean_offspring = mean;
    if (!law.log_laplace) {
      law.log_laplace = [atoms = law.atoms](double beta) {
        return atoms_laplace(atoms, beta);
      };
    }
    if (!law.sample) {
      std::vector<double> cumulative;
      double acc = 0.0;
      for (const auto& atom : law.atoms) cumulative.push_back(acc += atom.probability);
      law.sample = [atoms = law.atoms, cumulative](Rng& rng,
                                                   std::vector<double>& out) {
        const double u = rng.uniform() * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - cumulative.begin()), atoms.size() - 1);
        out = atoms[idx].displacements;
      };
    }
    double second = 0.0;
    for (const auto& atom : law.atoms) {
      for (double v : atom.displacements) {
        second += atom.probability * v * v * std::exp(-v);
      }
    }
    sigma2_ = second;
  }
  if (!law.sample || !law.log_laplace || !law.mean_offspring) {
    throw Error(ErrorCode::InvalidArgument,
                "custom law needs atoms, or sample + log_laplace + mean_offspring");
  }
  mean_offspring_ = *law.mean_offspring;
  domain_ = law.domain;
  custom_ = std::make_shared<const CustomLaw>(std::move(law));
  if (custom_->atoms.empty()) sigma2_ = phi_second(*this, 1.0);
}

double BoundaryModel::log_laplace(double beta) const {
  switch (family_) {
    case Family::BinaryGaussian:
    case Family::PoissonGaussian:
      return std::log(mean_offspring_) - beta * disp_mean_ +
             0.5 * beta * beta * disp_var_;
    case Family::Custom:
      if (!domain_.contains(beta)) return std::numeric_limits<double>::infinity();
      return custom_->log_laplace(beta);
  }
  return std::numeric_limits<double>::infinity();
}

void BoundaryModel::sample_offspring(Rng& rng, std::vector<double>& out) const {
  out.clear();
  switch (family_) {
    case Family::BinaryGaussian: {
      const double sd = std::sqrt(disp_var_);
      out.push_back(rng.normal(disp_mean_, sd));
      out.push_back(rng.normal(disp_mean_, sd));
      return;
    }
    case Family::PoissonGaussian: {
      const double sd = std::sqrt(disp_var_);
      const auto count = rng.poisson(mean_offspring_);
      for (std::uint64_t i = 0; i < count; ++i) {
        out.push_back(rng.normal(disp_mean_, sd));
      }
      return;
    }
    case Family::Custom:
      custom_->sample(rng, out);
      return;
  }
}

nlohmann::json BoundaryModel::to_config() const {
  nlohmann::json block;
  block["family"] = to_string(family_);
  if (family_ == Family::Custom) {
    block["name"] = custom_->name;
    if (!custom_->atoms.empty()) {
      auto atoms = nlohmann::json::array();
      for (const auto& atom : custom_->atoms) {
        atoms.push_back({{"displacements", atom.displacements},
                         {"probability", atom.probability}});
      }
      block["atoms"] = atoms;
    }
  } else {
    block["s2"] = s2_;
    if (family_ == Family::PoissonGaussian) block["poisson_mean"] = mean_offspring_;
  }
  return block;
}

BoundaryModel normalize_boundary(Family family, std::optional<double> s2,
                                 std::optional<double> poisson_mean) {
  BoundaryModel model;
  model.family_ = family;
  const double ln2 = std::numbers::ln2;
  switch (family) {
    case Family::BinaryGaussian: {
      // 2 e^{-mu + s2/2} = 1 and mu = s2 force mu = s2 = 2 ln 2.
      const double forced = 2.0 * ln2;
      if (s2 && std::fabs(*s2 - forced) > 1e-9 * forced) {
        throw Error(ErrorCode::NoSolution,
                    "binary Gaussian model is boundary only for s2 = 2 ln 2");
      }
      if (poisson_mean) {
        throw Error(ErrorCode::NoSolution,
                    "poisson_mean does not apply to the binary family");
      }
      model.s2_ = forced;
      model.mean_offspring_ = 2.0;
      break;
    }
    case Family::PoissonGaussian: {
      double value = 0.0;
      if (poisson_mean) {
        if (!(*poisson_mean > 1.0)) {
          throw Error(ErrorCode::NoSolution,
                      "mean offspring must exceed 1 for a boundary model");
        }
        value = 2.0 * std::log(*poisson_mean);
        if (s2 && std::fabs(*s2 - value) > 1e-9 * value) {
          throw Error(ErrorCode::NoSolution,
                      "s2 and poisson_mean are inconsistent (need s2 = 2 ln m)");
        }
      } else if (s2) {
        value = *s2;
      } else {
        value = 2.0 * ln2;
      }
      if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorCode::NoSolution,
                    "Poisson-Gaussian model needs s2 > 0 (mean offspring > 1)");
      }
      model.s2_ = value;
      model.mean_offspring_ = std::exp(0.5 * value);
      break;
    }
    case Family::Custom:
      throw Error(ErrorCode::InvalidArgument,
                  "custom laws are normalized through normalize_boundary(CustomLaw)");
  }
  model.disp_mean_ = model.s2_;
  model.disp_var_ = model.s2_;
  model.sigma2_ = model.s2_;
  return model;
}

BoundaryModel normalize_boundary(const CustomLaw& law) {
  BoundaryModel model(law);
  bool any_finite = false;
  for (double beta : {0.25, 0.5, 0.75, 1.0, 1.05}) {
    if (std::isfinite(model.log_laplace(beta))) any_finite = true;
  }
  if (!any_finite) {
    throw Error(ErrorCode::Unbounded, "Phi is infinite on (0, 1 + delta)");
  }
  const double phi1 = model.log_laplace(1.0);
  const double dphi1 = phi_prime(model, 1.0);
  if (!(std::fabs(phi1) < 1e-10) || !(std::fabs(dphi1) < 1e-8)) {
    throw Error(ErrorCode::NoSolution,
                "custom law violates the boundary conditions Phi(1)=Phi'(1)=0");
  }
  if (!(model.mean_offspring() > 1.0)) {
    throw Error(ErrorCode::NoSolution, "mean offspring must exceed 1");
  }
  if (!(model.sigma2() > 0.0) || !std::isfinite(model.sigma2())) {
    throw Error(ErrorCode::NoSolution, "sigma^2 must be positive and finite");
  }
  return model;
}

BoundaryModel model_from_config(const nlohmann::json& block) {
  if (!block.is_object() || !block.contains("family")) {
    throw Error(ErrorCode::ConfigError, "model.family is required");
  }
  const auto family = block.at("family").get<std::string>();
  auto opt = [&](const char* key) -> std::optional<double> {
    if (block.contains(key) && !block.at(key).is_null()) {
      return block.at(key).get<double>();
    }
    return std::nullopt;
  };
  if (family == "binary_gaussian" || family == "BinaryGaussian") {
    return normalize_boundary(Family::BinaryGaussian, opt("s2"), opt("poisson_mean"));
  }
  if (family == "poisson_gaussian" || family == "PoissonGaussian") {
    return normalize_boundary(Family::PoissonGaussian, opt("s2"), opt("poisson_mean"));
  }
  if (family == "custom" || family == "Custom") {
    if (!block.contains("atoms")) {
      throw Error(ErrorCode::ConfigError, "custom models in config need model.atoms");
    }
    CustomLaw law;
    law.name = block.value("name", std::string("custom"));
    for (const auto& atom : block.at("atoms")) {
      law.atoms.push_back({atom.at("displacements").get<std::vector<double>>(),
                           atom.at("probability").get<double>()});
    }
    return normalize_boundary(law);
  }
  throw Error(ErrorCode::ConfigError, "unknown model.family '" + family + "'");
}

double phi_prime(const BoundaryModel& model, double beta, double step) {
  return (model.log_laplace(beta + step) - model.log_laplace(beta - step)) /
         (2.0 * step);
}

double phi_second(const BoundaryModel& model, double beta, double step) {
  return (model.log_laplace(beta + step) - 2.0 * model.log_laplace(beta) +
          model.log_laplace(beta - step)) /
         (step * step);
}

bool ConditionReport::all_finite() const noexcept {
  return conclusive && std::all_of(moments.begin(), moments.end(), [](const auto& m) {
           return m.finite_with_confidence;
         });
}

namespace {

// A moment is flagged finite when the estimate is well resolved and no single
// sample dominates the sum. Infinite moments show up as a few huge terms.
constexpr std::size_t kMinSamplesForVerdict = 1000;
constexpr double kMaxRelativeError = 0.05;
constexpr double kMaxTermShare = 0.05;

MomentEstimate summarize(std::string name, const std::vector<double>& values) {
  MomentEstimate m;
  m.name = std::move(name);
  const auto n = static_cast<double>(values.size());
  CompensatedSum sum;
  double largest = 0.0;
  for (double v : values) {
    sum += v;
    largest = std::max(largest, std::fabs(v));
  }
  m.estimate = sum.value() / n;
  CompensatedSum sq;
  for (double v : values) sq += (v - m.estimate) * (v - m.estimate);
  m.standard_error = values.size() > 1 ? std::sqrt(sq.value() / (n - 1.0) / n)
                                       : std::numeric_limits<double>::infinity();
  m.max_term_share = sum.value() > 0.0 ? largest / sum.value() : 1.0;
  const bool resolved =
      m.estimate > 0.0 ? m.standard_error / m.estimate < kMaxRelativeError
                       : m.standard_error == 0.0;
  m.finite_with_confidence = values.size() >= kMinSamplesForVerdict &&
                             std::isfinite(m.estimate) && resolved &&
                             (m.estimate == 0.0 || m.max_term_share < kMaxTermShare);
  return m;
}

}  // namespace

ConditionReport check_conditions(const BoundaryModel& model, std::size_t samples,
                                 Rng& rng, const ConditionOptions& options) {
  ConditionReport report;
  report.samples = samples;
  report.delta_minus = options.delta_minus;
  report.epsilon0 = options.epsilon0;
  std::vector<double> x_log2, xt_log, extra;
  x_log2.reserve(samples);
  xt_log.reserve(samples);
  extra.reserve(samples);
  std::vector<double> children;
  const double tilt = 1.0 - 2.0 * options.delta_minus;
  const double power = 1.0 + 2.0 * options.epsilon0;
  for (std::size_t i = 0; i < samples; ++i) {
    model.sample_offspring(rng, children);
    double x = 0.0, xt = 0.0, y = 0.0;
    for (double v : children) {
      const double e = std::exp(-v);
      x += e;
      xt += std::max(0.0, v) * e;
      y += std::exp(-tilt * v);
    }
    const double lx = x > 1.0 ? std::log(x) : 0.0;
    const double lxt = xt > 1.0 ? std::log(xt) : 0.0;
    x_log2.push_back(x * lx * lx);
    xt_log.push_back(xt * lxt);
    extra.push_back(std::pow(y, power));
  }
  if (samples == 0) return report;
  report.moments.push_back(summarize("E[X log+^2 X]", x_log2));
  report.moments.push_back(summarize("E[X~ log+ X~]", xt_log));
  report.moments.push_back(summarize("E[(sum e^{-(1-2d)V})^{1+2e}]", extra));
  report.conclusive = samples >= kMinSamplesForVerdict;
  return report;
}

}  // namespace brw
