// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brw/rng.hpp"

namespace brw {

/// P(R_t <= x) for the Brownian meander R on [0, 1]. Rayleigh at t = 1.
/// Throws DomainError unless t in (0, 1] and x >= 0.
double meander_marginal_cdf(double t, double x);
double meander_marginal_pdf(double t, double x);

double rayleigh_cdf(double x);
/// Law of |B_1| for a 3-dimensional Brownian motion (Maxwell).
double maxwell_cdf(double x);

/// E[e^{a R_1}] = 1 + a sqrt(2 pi) e^{a^2/2} Phi(a), a >= 0.
double meander_exp_moment(double a);
/// log E[e^{a R_1}], stable for large a.
double meander_log_exp_moment(double a);

/// f(C) = e^{-C s2/2} sqrt(2/(pi s2 C)) E[e^{sqrt(s2 C) R_1}], evaluated from
/// the moment in log space. Tends to 2 as C grows.
double constants_chain(double c, double sigma2);
/// Same quantity in the simplified form 2 Phi(sqrt(s2 C)) + sqrt(2/(pi s2 C)) e^{-s2 C/2}.
double constants_chain_closed(double c, double sigma2);

struct MeanderSample {
  std::vector<double> values;  ///< R at each point of the t grid
  double weight = 0.0;         ///< self-normalized within the batch (mean 1)
  double raw_weight = 0.0;     ///< sqrt(pi/2) / R_1, mean 1 under Bessel-3
};

struct MeanderBatch {
  std::vector<double> t_grid;
  std::vector<MeanderSample> samples;
  double ess = 0.0;
};

inline constexpr std::size_t kMeanderResolution = 1024;

/*!
 * Bessel-3 paths (norm of a 3-d Brownian motion from 0) observed on t_grid,
 * reweighted by 1/R_1 into meander paths. Paths are built on the union of a
 * uniform grid of `resolution` steps and t_grid; resolution 0 uses t_grid
 * only. Marginals at grid points are exact at any resolution.
 */
MeanderBatch sample_meander(std::span<const double> t_grid, Rng& rng, std::size_t batch,
                            std::size_t resolution = kMeanderResolution);

}  // namespace brw
