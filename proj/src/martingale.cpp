// SPDX-License-Identifier: Apache-2.0
#include "brw/martingale.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "brw/error.hpp"
#include "brw/kahan.hpp"

namespace brw {

MartingaleSeries compute_series(const Forest& forest, std::span<const double> betas,
                                const BoundaryModel& model, std::optional<double> alpha,
                                const RenewalTable* table) {
  MartingaleSeries series;
  series.betas.assign(betas.begin(), betas.end());
  std::vector<double> phi(betas.size());
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const double beta = betas[b];
    phi[b] = model.domain().contains(beta) ? model.log_laplace(beta)
                                           : std::numeric_limits<double>::infinity();
    if (!std::isfinite(phi[b])) {
      std::ostringstream msg;
      msg << "beta " << beta << " is outside the domain of the log-Laplace transform";
      throw Error(ErrorCode::BetaOutsideDomain, msg.str());
    }
  }
  if (alpha && *alpha < 0.0) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
  const std::size_t n = forest.depth();
  series.w_beta.assign(betas.size(), std::vector<double>(n + 1, 0.0));
  series.w.assign(n + 1, 0.0);
  series.d.assign(n + 1, 0.0);
  if (alpha) {
    series.alpha = alpha;
    series.w_alpha.assign(n + 1, 0.0);
    if (table) series.d_alpha.assign(n + 1, 0.0);
  }

  std::vector<CompensatedSum> wb(betas.size());
  for (std::size_t k = 0; k <= n; ++k) {
    const Generation& gen = forest.generation(k);
    for (auto& acc : wb) acc = CompensatedSum{};
    CompensatedSum w, d, wa, da;
    for (std::size_t i = 0; i < gen.size(); ++i) {
      const double v = gen.position[i];
      const double e = std::exp(-v);
      w += e;
      d += v * e;
      for (std::size_t b = 0; b < betas.size(); ++b) {
        wb[b] += std::exp(-betas[b] * v - phi[b] * static_cast<double>(k));
      }
      if (alpha && gen.path_min[i] >= -*alpha) {
        wa += e;
        if (table) da += table->h_alpha(*alpha, v) * e;
      }
    }
    series.w[k] = w.value();
    series.d[k] = d.value();
    for (std::size_t b = 0; b < betas.size(); ++b) series.w_beta[b][k] = wb[b].value();
    if (alpha) {
      series.w_alpha[k] = wa.value();
      if (table) series.d_alpha[k] = da.value();
    }
  }
  return series;
}

void MartingaleSeries::write_csv(std::ostream& out, std::optional<std::uint64_t> seed,
                                 bool header) const {
  if (header) {
    if (seed) out << "seed,";
    out << "generation,beta,W_beta,W,D,W_alpha,D_alpha\n";
  }
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t k = 0; k < w.size(); ++k) {
    for (std::size_t b = 0; b < betas.size(); ++b) {
      line.str("");
      if (seed) line << *seed << ',';
      line << k << ',' << betas[b] << ',' << w_beta[b][k] << ',' << w[k] << ',' << d[k]
           << ',';
      if (!w_alpha.empty()) line << w_alpha[k];
      line << ',';
      if (!d_alpha.empty()) line << d_alpha[k];
      line << '\n';
      out << line.str();
    }
  }
}

double SubtreeMass::total() const noexcept {
  CompensatedSum sum;
  for (double m : mass) sum += m;
  return sum.value();
}

std::vector<std::vector<double>> mass_tree(const Forest& forest, double beta) {
  const std::size_t n = forest.depth();
  std::vector<std::vector<double>> masses(n + 1);
  const Generation& leaves = forest.generation(n);
  masses[n].resize(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    masses[n][i] = std::exp(-beta * leaves.position[i]);
  }
  for (std::size_t k = n; k >= 1; --k) {
    const Generation& gen = forest.generation(k);
    auto& up = masses[k - 1];
    up.assign(forest.generation(k - 1).size(), 0.0);
    // Children of one parent are contiguous, so a run-wise compensated sum
    // costs nothing extra.
    std::size_t i = 0;
    while (i < gen.size()) {
      const std::uint32_t p = gen.parent[i];
      CompensatedSum sum;
      for (; i < gen.size() && gen.parent[i] == p; ++i) sum += masses[k][i];
      up[p] = sum.value();
    }
  }
  return masses;
}

SubtreeMass subtree_mass(const Forest& forest, std::size_t level, double beta) {
  if (level > forest.depth()) {
    throw Error(ErrorCode::InvalidArgument, "level exceeds the forest depth");
  }
  auto masses = mass_tree(forest, beta);
  return SubtreeMass{level, std::move(masses[level])};
}

}  // namespace brw
