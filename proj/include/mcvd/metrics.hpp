#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcvd/arrival_models.hpp"
#include "mcvd/config.hpp"
#include "mcvd/special_functions.hpp"
#include "mcvd/types.hpp"

namespace mcvd {

/// Empirical CDF of integer counts on [0, support_max].
struct EmpiricalCdf {
  std::int64_t support_max = 0;
  std::vector<std::int64_t> counts_at_or_below;
  std::int64_t num_trials = 0;

  double operator()(std::int64_t x) const noexcept {
    if (x < 0) return 0.0;
    if (x > support_max) return 1.0;
    return static_cast<double>(counts_at_or_below[static_cast<std::size_t>(x)]) /
           static_cast<double>(num_trials);
  }

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(counts_at_or_below.size());
    for (std::int64_t x = 0; x <= support_max; ++x) out.push_back((*this)(x));
    return out;
  }
};

inline EmpiricalCdf empirical_cdf(std::span<const std::int64_t> samples, std::int64_t support_max) {
  if (samples.empty()) throw DomainError("empirical_cdf: no samples");
  if (support_max < 0) throw DomainError("empirical_cdf: negative support");
  EmpiricalCdf cdf;
  cdf.support_max = support_max;
  cdf.num_trials = static_cast<std::int64_t>(samples.size());
  cdf.counts_at_or_below.assign(static_cast<std::size_t>(support_max) + 1, 0);
  for (auto s : samples) {
    if (s < 0 || s > support_max) {
      throw DomainError("empirical_cdf: sample " + std::to_string(s) + " outside [0, " +
                        std::to_string(support_max) + "]");
    }
    ++cdf.counts_at_or_below[static_cast<std::size_t>(s)];
  }
  for (std::size_t x = 1; x < cdf.counts_at_or_below.size(); ++x) {
    cdf.counts_at_or_below[x] += cdf.counts_at_or_below[x - 1];
  }
  return cdf;
}

/// Root-mean-square CDF gap over a shared integer support [0, N]:
/// sqrt(sum_x (a(x) - b(x))^2 / (N + 1)).
inline double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DomainError("rmse: supports differ (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + " points)");
  }
  if (a.empty()) throw DomainError("rmse: empty support");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

/// Analytical RMSE(Gaussian, Binomial) - RMSE(Poisson, Binomial) for a single
/// emission of n molecules with hitting probability p. Positive values mean
/// the Poisson model is the closer one.
inline double delta_boundary(std::int64_t n, double p) {
  if (n < 1) throw DomainError("delta_boundary: n must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("delta_boundary: p must lie in (0,1)");
  const double nd = static_cast<double>(n);
  const double lambda = nd * p;
  const double sd = std::sqrt(nd * p * (1.0 - p));
  double sum_gauss = 0.0;
  double sum_poisson = 0.0;
  for (std::int64_t x = 0; x <= n; ++x) {
    const double xd = static_cast<double>(x);
    const double binom = special::reg_inc_beta(1.0 - p, nd - xd, 1.0 + xd);
    const double gauss = special::gaussian_q((lambda - xd) / sd);
    const double poisson = special::reg_upper_inc_gamma(xd + 1.0, lambda);
    sum_gauss += (binom - gauss) * (binom - gauss);
    sum_poisson += (binom - poisson) * (binom - poisson);
  }
  return std::sqrt(sum_gauss / (nd + 1.0)) - std::sqrt(sum_poisson / (nd + 1.0));
}

struct RmseReport {
  double binomial = 0.0;
  double poisson = 0.0;
  double gaussian = 0.0;
  SimConfig config;

  double of(ModelKind kind) const noexcept {
    switch (kind) {
      case ModelKind::binomial: return binomial;
      case ModelKind::poisson: return poisson;
      case ModelKind::gaussian: return gaussian;
    }
    return 0.0;
  }
};

/// Scores the three model CDFs against an empirical CDF over [0, history.total()].
inline RmseReport score_models(const EmpiricalCdf& empirical, const EmissionHistory& history,
                               const ChannelResponse& channel, const SimConfig& config = {}) {
  if (empirical.support_max != history.total()) {
    throw DomainError("score_models: empirical support does not match the emission total");
  }
  const auto sim = empirical.values();
  RmseReport report;
  report.config = config;
  report.binomial = rmse(sim, model_cdf(ModelKind::binomial, history, channel).values());
  report.poisson = rmse(sim, model_cdf(ModelKind::poisson, history, channel).values());
  report.gaussian = rmse(sim, model_cdf(ModelKind::gaussian, history, channel).values());
  return report;
}

}  // namespace mcvd
