// SPDX-License-Identifier: Apache-2.0
#include "brw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brw/error.hpp"
#include "brw/forest.hpp"
#include "brw/kahan.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"

namespace brw {

ManyToOneLaw::ManyToOneLaw(const BoundaryModel& model, std::size_t batch)
    : model_(&model), batch_(std::max<std::size_t>(1, batch)) {
  const CustomLaw* law = model.custom();
  if (law && !law->atoms.empty()) {
    double acc = 0.0;
    for (const auto& atom : law->atoms) {
      for (double v : atom.displacements) {
        acc += atom.probability * std::exp(-v);
        cumulative_.push_back(acc);
        values_.push_back(v);
      }
    }
  }
}

double ManyToOneLaw::step_sd() const noexcept { return std::sqrt(model_->sigma2()); }

double ManyToOneLaw::sample(Rng& rng) const {
  if (model_->gaussian_displacements()) {
    // e^{-v} N(s2, s2)(dv) times the mean offspring e^{s2/2} is N(0, s2).
    return rng.normal(0.0, std::sqrt(model_->displacement_variance()));
  }
  if (!cumulative_.empty()) {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative_.begin()), values_.size() - 1);
    return values_[idx];
  }
  // Size-biased selection: pick an offspring set with probability
  // proportional to X = sum e^{-V} within the batch, then a child within it
  // proportional to e^{-V}.
  std::vector<std::vector<double>> sets(batch_);
  std::vector<double> cumulative(batch_);
  double acc = 0.0;
  for (std::size_t b = 0; b < batch_; ++b) {
    model_->sample_offspring(rng, sets[b]);
    for (double v : sets[b]) acc += std::exp(-v);
    cumulative[b] = acc;
  }
  if (!(acc > 0.0)) {
    throw Error(ErrorCode::WeightCollapse, "all offspring sets in the batch are empty");
  }
  const double pick = rng.uniform() * acc;
  const auto b = std::min<std::size_t>(
      static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
                               cumulative.begin()),
      batch_ - 1);
  const auto& set = sets[b];
  double total = 0.0;
  for (double v : set) total += std::exp(-v);
  double target = rng.uniform() * total;
  for (double v : set) {
    target -= std::exp(-v);
    if (target <= 0.0) return v;
  }
  return set.back();
}

void sample_walk(const ManyToOneLaw& law, std::size_t n, Rng& rng,
                 std::vector<double>& path) {
  path.resize(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += law.sample(rng);
    path[i] = s;
  }
}

double IdentityCheck::z_score() const noexcept {
  const double se = std::hypot(lhs.standard_error, rhs.standard_error);
  const double diff = std::fabs(lhs.mean - rhs.mean);
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

bool IdentityCheck::agrees(double z) const noexcept { return z_score() <= z; }

IdentityCheck many_to_one_check(const BoundaryModel& model, std::size_t n,
                                const PathFunction& g, std::size_t samples,
                                std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  std::vector<double> lhs(samples), rhs(samples);
  const ManyToOneLaw law(model);
  parallel_for(samples, threads, [&](std::size_t i) {
    const Forest forest = simulate(model, n, stream_key(seed, 0, i));
    const auto& leaves = forest.leaves();
    std::vector<double> path(n);
    CompensatedSum sum;
    for (std::size_t x = 0; x < leaves.size(); ++x) {
      std::size_t idx = x;
      for (std::size_t k = n; k >= 1; --k) {
        const auto& gen = forest.generation(k);
        path[k - 1] = gen.position[idx];
        idx = gen.parent[idx];
      }
      sum += g(path);
    }
    lhs[i] = sum.value();

    Rng rng(stream_key(seed, 1, i));
    std::vector<double> walk;
    sample_walk(law, n, rng, walk);
    const double sn = n == 0 ? 0.0 : walk.back();
    const double value = g(walk);
    rhs[i] = value == 0.0 ? 0.0 : std::exp(sn) * value;
  });
  IdentityCheck check;
  const auto l = mean_and_se(lhs);
  const auto r = mean_and_se(rhs);
  check.lhs = {l.mean, l.standard_error};
  check.rhs = {r.mean, r.standard_error};
  return check;
}

double HarmonicityCheck::z_score() const noexcept {
  const double diff = std::fabs(table_value - expectation.mean);
  if (combined_se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / combined_se;
}

HarmonicityCheck harmonicity_check(const BoundaryModel& model,
                                   const RenewalTable& table, double u,
                                   std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  const ManyToOneLaw law(model);
  Rng rng(stream_key(seed, 0x4861726dull, static_cast<std::uint64_t>(std::llround(u * 1e6))));
  std::vector<double> values(samples);
  CompensatedSum se_acc;
  std::size_t admitted = 0;
  for (auto& value : values) {
    const double step = law.sample(rng);
    if (step >= -u) {
      value = table.h0(u + step);
      se_acc += table.se_at(u + step);
      ++admitted;
    } else {
      value = 0.0;
    }
  }
  HarmonicityCheck check;
  check.u = u;
  check.table_value = table.h0(u);
  const auto est = mean_and_se(values);
  check.expectation = {est.mean, est.standard_error};
  // Both sides carry the table's estimation error; the right side through an
  // average of grid errors weighted by the admitted mass.
  const double rhs_table_se =
      admitted ? se_acc.value() / static_cast<double>(samples) : 0.0;
  check.combined_se = std::sqrt(est.standard_error * est.standard_error +
                                table.se_at(u) * table.se_at(u) +
                                rhs_table_se * rhs_table_se);
  return check;
}

namespace {

double rejection_step(const ManyToOneLaw& law, const RenewalTable& table,
                      double alpha, double u, Rng& rng) {
  const double sd = law.step_sd();
  const double base = table.h_alpha(alpha, u);
  const double slope = table.lipschitz();
  // Envelope M(y) = base + slope * max(y, 0) dominates h_alpha(u + y) because
  // h_0 is non-decreasing and `slope`-Lipschitz. Proposal density is
  // proportional to phi(y) M(y): a normal / half-Rayleigh mixture.
  const double normal_mass = base;
  const double rayleigh_mass = slope * sd / std::sqrt(2.0 * std::numbers::pi);
  const double p_normal = normal_mass / (normal_mass + rayleigh_mass);
  for (;;) {
    double y;
    if (rng.uniform() < p_normal) {
      y = rng.normal(0.0, sd);
    } else {
      y = sd * std::sqrt(-2.0 * std::log(rng.uniform()));
    }
    const double v = u + y;
    if (v < -alpha) continue;
    const double envelope = base + slope * std::max(y, 0.0);
    const double accept = table.h_alpha(alpha, v) / envelope;
    if (rng.uniform() <= accept) return v;
  }
}

double resampling_step(const ManyToOneLaw& law, const RenewalTable& table,
                       double alpha, double u, Rng& rng,
                       const ConditionedWalkOptions& options) {
  std::size_t batch = std::max<std::size_t>(1, options.batch);
  std::vector<double> candidates, cumulative;
  for (std::size_t attempt = 0; attempt <= options.max_batch_doublings; ++attempt) {
    candidates.resize(batch);
    cumulative.resize(batch);
    double acc = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
      const double v = u + law.sample(rng);
      candidates[i] = v;
      acc += v >= -alpha ? table.h_alpha(alpha, v) : 0.0;
      cumulative[i] = acc;
    }
    if (acc > 0.0) {
      const double pick = rng.uniform() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
      const auto idx = std::min<std::size_t>(
          static_cast<std::size_t>(it - cumulative.begin()), batch - 1);
      return candidates[idx];
    }
    batch *= 2;
  }
  throw Error(ErrorCode::WeightCollapse,
              "every resampling candidate fell below the barrier");
}

}  // namespace

double conditioned_step(const ManyToOneLaw& law, const RenewalTable& table,
                        double alpha, double u, Rng& rng,
                        const ConditionedWalkOptions& options) {
  auto method = options.method;
  if (method == ConditionedWalkMethod::Auto) {
    method = law.gaussian() ? ConditionedWalkMethod::Rejection
                            : ConditionedWalkMethod::ImportanceResampling;
  }
  if (method == ConditionedWalkMethod::Rejection) {
    if (!law.gaussian()) {
      throw Error(ErrorCode::InvalidArgument,
                  "rejection sampling needs a Gaussian step law");
    }
    return rejection_step(law, table, alpha, u, rng);
  }
  return resampling_step(law, table, alpha, u, rng, options);
}

std::vector<double> conditioned_walk(const BoundaryModel& model,
                                     const RenewalTable& table, double alpha,
                                     std::size_t n, Rng& rng,
                                     const ConditionedWalkOptions& options) {
  if (alpha < 0.0) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
  const ManyToOneLaw law(model);
  std::vector<double> path(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    path[i] = conditioned_step(law, table, alpha, path[i - 1], rng, options);
  }
  return path;
}

}  // namespace brw
