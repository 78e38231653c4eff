// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "brw/error.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"
#include "brw/walk.hpp"

namespace brw {

RenewalTable::RenewalTable(std::vector<double> u_grid, std::vector<double> h0,
                           std::vector<double> se, std::vector<double> n_ladders,
                           std::vector<double> tail_bias, double c0, double c0_se,
                           double theta, double theta_se)
    : u_(std::move(u_grid)),
      h_(std::move(h0)),
      se_(std::move(se)),
      ladders_(std::move(n_ladders)),
      bias_(std::move(tail_bias)),
      c0_(c0),
      c0_se_(c0_se),
      theta_(theta),
      theta_se_(theta_se) {
  const auto n = u_.size();
  if (n == 0 || h_.size() != n || se_.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "renewal table columns must be non-empty and equal");
  }
  if (ladders_.empty()) ladders_.assign(n, 0.0);
  if (bias_.empty()) bias_.assign(n, 0.0);
  if (u_.front() != 0.0 || !std::is_sorted(u_.begin(), u_.end())) {
    throw Error(ErrorCode::InvalidArgument, "u grid must start at 0 and ascend");
  }
}

double RenewalTable::h0(double u) const noexcept {
  if (u < 0.0) return 0.0;
  if (u >= u_.back()) return h_.back() + c0_ * (u - u_.back());
  auto it = std::upper_bound(u_.begin(), u_.end(), u);
  const auto hi = static_cast<std::size_t>(it - u_.begin());
  const auto lo = hi - 1;
  const double frac = (u - u_[lo]) / (u_[hi] - u_[lo]);
  return h_[lo] + frac * (h_[hi] - h_[lo]);
}

double RenewalTable::se_at(double u) const noexcept {
  if (u <= 0.0) return se_.front();
  if (u >= u_.back()) return se_.back();
  auto it = std::lower_bound(u_.begin(), u_.end(), u);
  auto idx = static_cast<std::size_t>(it - u_.begin());
  if (idx > 0 && u - u_[idx - 1] < u_[idx] - u) --idx;
  return se_[idx];
}

double RenewalTable::lipschitz() const noexcept {
  double slope = std::max(0.0, c0_);
  for (std::size_t i = 1; i < u_.size(); ++i) {
    slope = std::max(slope, (h_[i] - h_[i - 1]) / (u_[i] - u_[i - 1]));
  }
  return slope;
}

void RenewalTable::override_value(std::size_t index, double value) {
  h_.at(index) = value;
}

void RenewalTable::set_survival(std::vector<double> fraction, std::size_t horizon,
                                std::size_t walks) {
  if (fraction.size() != u_.size()) {
    throw Error(ErrorCode::InvalidArgument, "survival column must match the grid");
  }
  survival_ = std::move(fraction);
  horizon_ = horizon;
  walks_ = walks;
}

double RenewalTable::theta_at(std::size_t index) const {
  if (survival_.empty()) throw Error(ErrorCode::InvalidArgument, "table has no survival data");
  return std::sqrt(static_cast<double>(horizon_)) * survival_.at(index) / h_.at(index);
}

double RenewalTable::theta_se_at(std::size_t index) const {
  if (survival_.empty()) throw Error(ErrorCode::InvalidArgument, "table has no survival data");
  const double p = survival_.at(index);
  const double se_p = std::sqrt(p * (1.0 - p) / static_cast<double>(walks_));
  return std::sqrt(static_cast<double>(horizon_)) * se_p / h_.at(index);
}

void RenewalTable::write_csv(std::ostream& out) const {
  out << "u,h0,se,n_ladders\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < u_.size(); ++i) {
    line.str("");
    line << u_[i] << ',' << h_[i] << ',' << se_[i] << ',' << ladders_[i] << '\n';
    out << line.str();
  }
}

std::vector<double> uniform_grid(double u_max, double step) {
  if (!(u_max > 0.0) || !(step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "grid needs u_max > 0 and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::llround(u_max / step));
  std::vector<double> grid(count + 1);
  for (std::size_t i = 0; i <= count; ++i) grid[i] = static_cast<double>(i) * step;
  return grid;
}

namespace {

constexpr std::size_t kBatches = 16;

struct WalkRecord {
  std::vector<double> ladders;  // successive strict minima, all < 0
  double final_min = 0.0;
  bool reached_horizon = false;
  double checkpoint_min = 0.0;
  bool reached_checkpoint = false;
};

WalkRecord run_ladder_walk(const ManyToOneLaw& law, double u_max, std::size_t horizon,
                           std::size_t checkpoint, Rng& rng) {
  WalkRecord record;
  double s = 0.0;
  double running_min = 0.0;
  for (std::size_t j = 1; j <= horizon; ++j) {
    if (j == checkpoint + 1) {
      record.checkpoint_min = running_min;
      record.reached_checkpoint = true;
    }
    s += law.sample(rng);
    if (s < running_min) {
      running_min = s;
      if (s < -u_max) {
        record.final_min = running_min;
        return record;
      }
      record.ladders.push_back(s);
    }
  }
  record.final_min = running_min;
  record.reached_horizon = true;
  if (!record.reached_checkpoint) {
    record.checkpoint_min = running_min;
    record.reached_checkpoint = true;
  }
  return record;
}

// Interpolate on a raw (u, h) table with linear extension of the last slope.
double raw_interp(std::span<const double> u, std::span<const double> h, double x) {
  if (x <= 0.0) return h.front();
  if (x >= u.back()) {
    const auto n = u.size();
    const double slope = n > 1 ? (h[n - 1] - h[n - 2]) / (u[n - 1] - u[n - 2]) : 0.0;
    return h.back() + slope * (x - u.back());
  }
  auto it = std::upper_bound(u.begin(), u.end(), x);
  const auto hi = static_cast<std::size_t>(it - u.begin());
  const auto lo = hi - 1;
  const double frac = (x - u[lo]) / (u[hi] - u[lo]);
  return h[lo] + frac * (h[hi] - h[lo]);
}

double weighted_slope(std::span<const double> u, std::span<const double> h,
                      std::span<const double> se, std::size_t from) {
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = from; i < u.size(); ++i) {
    const double w = se[i] > 0.0 ? 1.0 / (se[i] * se[i]) : 1.0;
    sw += w;
    sx += w * u[i];
    sy += w * h[i];
    sxx += w * u[i] * u[i];
    sxy += w * u[i] * h[i];
  }
  const double denom = sw * sxx - sx * sx;
  return denom != 0.0 ? (sw * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

RenewalTable estimate_renewal(const BoundaryModel& model,
                              std::span<const double> u_grid,
                              const RenewalOptions& options, std::uint64_t seed) {
  if (u_grid.size() < 2 || u_grid.front() != 0.0 ||
      !std::is_sorted(u_grid.begin(), u_grid.end())) {
    throw Error(ErrorCode::InvalidArgument, "u_grid must start at 0, ascend and hold >= 2 points");
  }
  if (options.horizon < 1000) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1000");
  }
  if (options.walks < kBatches) {
    throw Error(ErrorCode::InvalidArgument, "need at least 16 walks");
  }
  const ManyToOneLaw law(model);
  const std::size_t G = u_grid.size();
  const std::size_t W = options.walks;
  const double u_max = u_grid.back();
  const std::size_t checkpoint = std::min(options.survival_horizon, options.horizon);
  if (checkpoint == 0) throw Error(ErrorCode::InvalidArgument, "survival_horizon must be >= 1");

  std::vector<WalkRecord> records(W);
  parallel_for(W, options.threads, [&](std::size_t w) {
    Rng rng(stream_key(seed, 0x6c616464ull, w));
    records[w] = run_ladder_walk(law, u_max, options.horizon, checkpoint, rng);
  });

  // Per-walk ladder counts on the grid: count_w(u) = #{ladders >= -u}.
  std::vector<double> sum(G, 0.0), sum_sq(G, 0.0), alive(G, 0.0);
  std::vector<std::vector<double>> batch_sum(kBatches, std::vector<double>(G, 0.0));
  std::vector<std::vector<double>> batch_alive(kBatches, std::vector<double>(G, 0.0));
  std::vector<double> counts(G);
  for (std::size_t w = 0; w < W; ++w) {
    const auto& rec = records[w];
    std::fill(counts.begin(), counts.end(), 0.0);
    for (double ladder : rec.ladders) {
      auto it = std::lower_bound(u_grid.begin(), u_grid.end(), -ladder);
      if (it != u_grid.end()) counts[static_cast<std::size_t>(it - u_grid.begin())] += 1.0;
    }
    double running = 0.0;
    const std::size_t b = w % kBatches;
    for (std::size_t i = 0; i < G; ++i) {
      running += counts[i];
      sum[i] += running;
      sum_sq[i] += running * running;
      batch_sum[b][i] += running;
      if (rec.reached_checkpoint && rec.checkpoint_min >= -u_grid[i]) {
        alive[i] += 1.0;
        batch_alive[b][i] += 1.0;
      }
    }
  }

  const auto n = static_cast<double>(W);
  std::vector<double> raw(G), se(G);
  for (std::size_t i = 0; i < G; ++i) {
    const double mean = sum[i] / n;
    raw[i] = 1.0 + mean;
    const double var = std::max(0.0, sum_sq[i] / n - mean * mean) * n / (n - 1.0);
    se[i] = std::sqrt(var / n);
  }
  for (std::size_t i = 1; i < G; ++i) raw[i] = std::max(raw[i], raw[i - 1]);

  // Plug-in tail: a walk still above -u at the horizon with running minimum m
  // has about h_0(u + m) - 1 ladder epochs left in [-u, m).
  std::vector<double> tail(G, 0.0);
  std::vector<std::vector<double>> batch_tail(kBatches, std::vector<double>(G, 0.0));
  for (std::size_t w = 0; w < W; ++w) {
    const auto& rec = records[w];
    if (!rec.reached_horizon) continue;
    const std::size_t b = w % kBatches;
    for (std::size_t i = 0; i < G; ++i) {
      if (rec.final_min < -u_grid[i]) continue;
      const double rest = raw_interp(u_grid, raw, u_grid[i] + rec.final_min) - 1.0;
      tail[i] += rest;
      batch_tail[b][i] += rest;
    }
  }
  std::vector<double> h0(G), bias(G), ladders(G);
  bool horizon_ok = true;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < G; ++i) {
    const double correction = tail[i] / n;
    h0[i] = raw[i] + correction;
    bias[i] = 0.5 * correction;
    h0[i] -= bias[i];  // midpoint of [uncorrected, fully corrected]
    ladders[i] = sum[i];
    if (bias[i] > se[i] && bias[i] > 0.0) {
      horizon_ok = false;
      worst_ratio = std::max(worst_ratio, se[i] > 0.0 ? bias[i] / se[i] : 1e300);
    }
  }
  h0[0] = 1.0;
  se[0] = 0.0;
  for (std::size_t i = 1; i < G; ++i) h0[i] = std::max(h0[i], h0[i - 1]);
  if (!horizon_ok && options.enforce_horizon) {
    std::ostringstream msg;
    msg << "renewal tail bias exceeds the standard error (worst ratio " << worst_ratio
        << "); increase the horizon";
    throw Error(ErrorCode::HorizonTooSmall, msg.str());
  }

  const std::size_t from = G - std::max<std::size_t>(2, G / 3);
  const double c0 = weighted_slope(u_grid, h0, se, from);

  // theta from P(min_{j <= H} S_j >= -u) ~ theta h_0(u) / sqrt(H) at the checkpoint H.
  const double root_h = std::sqrt(static_cast<double>(checkpoint));
  auto theta_of = [&](const std::vector<double>& alive_counts, double walks,
                      const std::vector<double>& h) {
    double acc = 0.0;
    for (std::size_t i = 0; i < G; ++i) acc += root_h * (alive_counts[i] / walks) / h[i];
    return acc / static_cast<double>(G);
  };
  const double theta = theta_of(alive, n, h0);

  // Batch means for the uncertainty of c0 and theta.
  std::vector<double> c0_batches, theta_batches;
  for (std::size_t b = 0; b < kBatches; ++b) {
    const double nb = static_cast<double>(W / kBatches + (b < W % kBatches ? 1 : 0));
    std::vector<double> hb(G);
    for (std::size_t i = 0; i < G; ++i) {
      hb[i] = 1.0 + batch_sum[b][i] / nb + 0.5 * batch_tail[b][i] / nb;
    }
    hb[0] = 1.0;
    c0_batches.push_back(weighted_slope(u_grid, hb, se, from));
    theta_batches.push_back(theta_of(batch_alive[b], nb, hb));
  }
  const double c0_se = mean_and_se(c0_batches).standard_error;
  const double theta_se = mean_and_se(theta_batches).standard_error;

  RenewalTable table(std::vector<double>(u_grid.begin(), u_grid.end()), std::move(h0),
                     std::move(se), std::move(ladders), std::move(bias), c0, c0_se, theta,
                     theta_se);
  std::vector<double> fraction(G);
  for (std::size_t i = 0; i < G; ++i) fraction[i] = alive[i] / n;
  table.set_survival(std::move(fraction), checkpoint, W);
  return table;
}

}  // namespace brw
