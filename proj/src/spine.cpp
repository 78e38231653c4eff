// SPDX-License-Identifier: Apache-2.0
#include "brw/spine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "brw/error.hpp"
#include "brw/stats.hpp"

namespace brw {

namespace {

// Weight of one child at displacement v from a parent at u; zero excludes it.
using ChildWeight = std::function<double(double u, double v)>;

struct Step {
  double child = 0.0;               // absolute position of the spine child
  std::vector<double> brothers;     // absolute positions
  double ratio = 1.0;               // batch mean weight / reference
  double ess = -1.0;                // < 0 when exact
};

std::size_t pick_index(std::span<const double> cumulative, Rng& rng) {
  const double target = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

Step atom_step(const CustomLaw& law, double u, const ChildWeight& weight, Rng& rng) {
  std::vector<double> cumulative;
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  double acc = 0.0;
  for (std::size_t a = 0; a < law.atoms.size(); ++a) {
    const auto& atom = law.atoms[a];
    for (std::size_t j = 0; j < atom.displacements.size(); ++j) {
      const double w = atom.probability * weight(u, atom.displacements[j]);
      if (w <= 0.0) continue;
      acc += w;
      cumulative.push_back(acc);
      slots.emplace_back(a, j);
    }
  }
  if (cumulative.empty()) {
    throw Error(ErrorCode::WeightCollapse, "no offspring configuration has positive weight");
  }
  const auto [a, j] = slots[pick_index(cumulative, rng)];
  Step step;
  const auto& disp = law.atoms[a].displacements;
  step.child = u + disp[j];
  for (std::size_t i = 0; i < disp.size(); ++i) {
    if (i != j) step.brothers.push_back(u + disp[i]);
  }
  return step;
}

Step resampling_step(const BoundaryModel& model, double u, const ChildWeight& weight,
                     double reference, Rng& rng, const SpineOptions& options) {
  std::size_t batch = std::max<std::size_t>(1, options.batch);
  std::vector<std::vector<double>> sets;
  std::vector<double> totals, cumulative;
  for (std::size_t attempt = 0; attempt <= options.max_batch_doublings; ++attempt) {
    sets.resize(batch);
    totals.resize(batch);
    cumulative.resize(batch);
    double acc = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      model.sample_offspring(rng, sets[b]);
      double total = 0.0;
      for (double v : sets[b]) total += weight(u, v);
      totals[b] = total;
      acc += total;
      cumulative[b] = acc;
    }
    if (acc > 0.0) {
      const auto& set = sets[pick_index(cumulative, rng)];
      std::vector<double> inner;
      double inner_acc = 0.0;
      for (double v : set) {
        inner_acc += weight(u, v);
        inner.push_back(inner_acc);
      }
      const std::size_t j = pick_index(inner, rng);
      Step step;
      step.child = u + set[j];
      for (std::size_t i = 0; i < set.size(); ++i) {
        if (i != j) step.brothers.push_back(u + set[i]);
      }
      step.ratio = acc / static_cast<double>(batch) / reference;
      step.ess = effective_sample_size(totals);
      return step;
    }
    batch *= 2;
  }
  throw Error(ErrorCode::WeightCollapse,
              "every offspring set in the resampling batch has zero weight");
}

// Untilted brothers of a Gaussian-family spine child.
void plain_brothers(const BoundaryModel& model, double u, Rng& rng,
                    std::vector<double>& out) {
  out.clear();
  const double mean = model.displacement_mean();
  const double sd = std::sqrt(model.displacement_variance());
  if (model.family() == Family::BinaryGaussian) {
    out.push_back(u + rng.normal(mean, sd));
    return;
  }
  // Mecke: a Poisson process size-biased by one of its points is the same
  // process plus an independent extra point.
  const auto count = rng.poisson(model.mean_offspring());
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(u + rng.normal(mean, sd));
}

TiltMethod resolve(const BoundaryModel& model, TiltMethod method) {
  const CustomLaw* law = model.custom();
  const bool exact_available = model.gaussian_displacements() || (law && !law->atoms.empty());
  if (method == TiltMethod::Auto) {
    return exact_available ? TiltMethod::Exact : TiltMethod::ImportanceResampling;
  }
  if (method == TiltMethod::Exact && !exact_available) {
    throw Error(ErrorCode::InvalidArgument,
                "exact tilting needs a Gaussian family or a finite-atom law");
  }
  return method;
}

}  // namespace

SpineRealization sample_spine_qalpha(const BoundaryModel& model, const RenewalTable& table,
                                     double alpha, std::size_t n, Rng& rng,
                                     const SpineOptions& options) {
  if (alpha < 0.0) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
  const TiltMethod method = resolve(model, options.method);
  SpineRealization out;
  out.measure = SpineMeasure::QAlpha;
  out.parameter = alpha;
  out.spine.assign(1, 0.0);
  const ChildWeight weight = [&](double u, double v) {
    const double x = u + v;
    return x >= -alpha ? std::exp(-v) * table.h_alpha(alpha, x) : 0.0;
  };
  const ManyToOneLaw law(model);
  ConditionedWalkOptions walk_options;
  walk_options.method = ConditionedWalkMethod::Rejection;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = out.spine.back();
    Step step;
    if (method == TiltMethod::Exact && model.gaussian_displacements()) {
      step.child = conditioned_step(law, table, alpha, u, rng, walk_options);
      plain_brothers(model, u, rng, step.brothers);
    } else if (method == TiltMethod::Exact) {
      step = atom_step(*model.custom(), u, weight, rng);
    } else {
      step = resampling_step(model, u, weight, table.h_alpha(alpha, u), rng, options);
      out.weight *= step.ratio;
      out.ess.push_back(step.ess);
    }
    out.spine.push_back(step.child);
    out.brothers.push_back(std::move(step.brothers));
  }
  return out;
}

SpineRealization sample_spine_qbeta(const BoundaryModel& model, double beta, std::size_t n,
                                    Rng& rng, const SpineOptions& options) {
  if (!model.domain().contains(beta) || !std::isfinite(model.log_laplace(beta))) {
    throw Error(ErrorCode::BetaOutsideDomain, "beta is outside the model domain");
  }
  const TiltMethod method = resolve(model, options.method);
  const double phi = model.log_laplace(beta);
  SpineRealization out;
  out.measure = SpineMeasure::QBeta;
  out.parameter = beta;
  out.spine.assign(1, 0.0);
  const ChildWeight weight = [&](double, double v) { return std::exp(-beta * v - phi); };
  for (std::size_t i = 0; i < n; ++i) {
    const double u = out.spine.back();
    Step step;
    if (method == TiltMethod::Exact && model.gaussian_displacements()) {
      // e^{-beta v} N(s2, s2)(dv) is proportional to N(s2 (1 - beta), s2).
      const double s2 = model.displacement_variance();
      step.child = u + rng.normal(s2 * (1.0 - beta), std::sqrt(s2));
      plain_brothers(model, u, rng, step.brothers);
    } else if (method == TiltMethod::Exact) {
      step = atom_step(*model.custom(), u, weight, rng);
    } else {
      step = resampling_step(model, u, weight, 1.0, rng, options);
      out.weight *= step.ratio;
      out.ess.push_back(step.ess);
    }
    out.spine.push_back(step.child);
    out.brothers.push_back(std::move(step.brothers));
  }
  return out;
}

SpineTree grow_spine_tree(const BoundaryModel& model, const SpineRealization& spine,
                          std::uint64_t seed) {
  const std::size_t n = spine.depth();
  std::vector<std::vector<std::uint32_t>> parents(n);
  std::vector<std::vector<double>> positions(n);
  std::vector<double> prev_pos{0.0};
  std::vector<std::uint64_t> prev_label{0};
  std::size_t spine_index = 0;
  std::size_t stored = 1;
  constexpr std::size_t kCap = std::size_t{1} << 24;
  std::vector<double> displacements;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> next_pos;
    std::vector<std::uint64_t> next_label;
    std::size_t next_spine = 0;
    for (std::size_t i = 0; i < prev_pos.size(); ++i) {
      const auto add = [&](double pos, std::uint64_t rank) {
        parents[k].push_back(static_cast<std::uint32_t>(i));
        next_pos.push_back(pos);
        next_label.push_back(hash_combine(prev_label[i], rank));
      };
      if (i == spine_index) {
        next_spine = next_pos.size();
        add(spine.spine[k + 1], 0);
        std::uint64_t rank = 1;
        for (double b : spine.brothers[k]) add(b, rank++);
        continue;
      }
      Rng rng(stream_key(seed, k, prev_label[i]));
      model.sample_offspring(rng, displacements);
      std::uint64_t rank = 0;
      for (double v : displacements) add(prev_pos[i] + v, rank++);
    }
    stored += next_pos.size();
    if (stored > kCap) throw ParticleCapExceeded(k, kCap);
    positions[k] = next_pos;
    prev_pos = std::move(next_pos);
    prev_label = std::move(next_label);
    spine_index = next_spine;
  }
  return SpineTree{Forest::from_generations(parents, positions), NodeId{n, spine_index}};
}

void write_spine_csv(std::ostream& out, const SpineRealization& spine) {
  out << "level,spine_V,n_brothers,brother_Vs\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < spine.spine.size(); ++i) {
    line.str("");
    line << i << ',' << spine.spine[i] << ',';
    if (i == 0) {
      line << "0,";
    } else {
      const auto& bro = spine.brothers[i - 1];
      line << bro.size() << ',';
      for (std::size_t j = 0; j < bro.size(); ++j) line << (j ? ";" : "") << bro[j];
    }
    line << '\n';
    out << line.str();
  }
}

void write_spine_diagnostics(std::ostream& out, const SpineRealization& spine) {
  for (std::size_t i = 0; i < spine.ess.size(); ++i) {
    out << nlohmann::json{{"level", i + 1}, {"ess", spine.ess[i]}}.dump() << '\n';
  }
  out << nlohmann::json{{"measure", spine.measure == SpineMeasure::QAlpha ? "Q_alpha" : "Q_beta"},
                        {"parameter", spine.parameter},
                        {"depth", spine.depth()},
                        {"weight", spine.weight},
                        {"exact", spine.ess.empty()}}
             .dump()
      << '\n';
}

}  // namespace brw
