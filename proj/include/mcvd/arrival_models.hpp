#pragma once

// Distribution of the received count in the current slot under an emission
// history: the exact sum of independent binomials and its Poisson and
// Gaussian approximations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcvd/special_functions.hpp"
#include "mcvd/types.hpp"

namespace mcvd {

enum class ModelKind { binomial, poisson, gaussian };

inline constexpr ModelKind kAllModels[] = {ModelKind::binomial, ModelKind::poisson,
                                           ModelKind::gaussian};

constexpr std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::binomial: return "binomial";
    case ModelKind::poisson: return "poisson";
    case ModelKind::gaussian: return "gaussian";
  }
  return "?";
}

/// Molecules emitted per slot; amounts.front() is the oldest slot and
/// amounts.back() the current one.
struct EmissionHistory {
  std::vector<std::int64_t> amounts;

  std::int64_t total() const noexcept {
    std::int64_t s = 0;
    for (auto a : amounts) s += a;
    return s;
  }
};

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

struct ModelOptions {
  /// Truncate the binomial convolution at mean + cap_sigmas * sd, folding the
  /// tail mass into the last bin. CDF values below the cap stay exact.
  bool cap_support = false;
  double cap_sigmas = 12.0;
};

/// P(N <= x) for integer x. Tabulated over [0, support_max]; below 0 it is 0
/// and above the support the model is evaluated directly.
class CountCdf {
 public:
  CountCdf(ModelKind kind, std::vector<double> values, MeanVar moments)
      : kind_(kind), values_(std::move(values)), moments_(moments) {}

  ModelKind kind() const noexcept { return kind_; }
  std::int64_t support_max() const noexcept {
    return static_cast<std::int64_t>(values_.size()) - 1;
  }
  std::span<const double> values() const noexcept { return values_; }
  double mean() const noexcept { return moments_.mean; }
  double variance() const noexcept { return moments_.variance; }

  double operator()(std::int64_t x) const {
    if (x < 0) return 0.0;
    if (x <= support_max()) return values_[static_cast<std::size_t>(x)];
    if (moments_.variance == 0.0) return 1.0;
    switch (kind_) {
      case ModelKind::binomial: return 1.0;
      case ModelKind::poisson: return special::poisson_cdf(x, moments_.mean);
      case ModelKind::gaussian:
        return special::normal_cdf(static_cast<double>(x), moments_.mean,
                                   std::sqrt(moments_.variance));
    }
    return 1.0;
  }

 private:
  ModelKind kind_;
  std::vector<double> values_;
  MeanVar moments_;
};

namespace detail {

inline void check_inputs(const EmissionHistory& history, const ChannelResponse& channel) {
  if (history.amounts.empty()) throw DomainError("emission history is empty");
  for (auto a : history.amounts) {
    if (a < 0) throw DomainError("emission amounts must be non-negative");
  }
  check_channel(channel);
}

// Hitting fraction seen by emission k (0-based, oldest first) in the current
// slot: phi_{i-k+1} with i = history length. Taps past the channel are 0.
inline double tap(const EmissionHistory& history, const ChannelResponse& channel, std::size_t k) {
  return channel.at_slot(history.amounts.size() - k);
}

inline std::vector<double> binomial_pmf(std::int64_t n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (p <= 0.0) {
    pmf.front() = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf.back() = 1.0;
    return pmf;
  }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::int64_t j = 0; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    const double log_term = lgn - std::lgamma(jd + 1.0) -
                            std::lgamma(static_cast<double>(n - j) + 1.0) + jd * lp +
                            static_cast<double>(n - j) * lq;
    pmf[static_cast<std::size_t>(j)] = std::exp(log_term);
  }
  return pmf;
}

// pmf of a + b, truncated at index `cap` with the overflow folded into it.
inline std::vector<double> convolve(std::span<const double> a, std::span<const double> b,
                                    std::size_t cap) {
  const std::size_t len = std::min(a.size() + b.size() - 1, cap + 1);
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[std::min(i + j, len - 1)] += a[i] * b[j];
    }
  }
  return out;
}

}  // namespace detail

/// Mean and variance of the current-slot count. Binomial and Gaussian share
/// sum N_k phi (1 - phi); Poisson has variance equal to its mean.
inline MeanVar model_mean_var(ModelKind kind, const EmissionHistory& history,
                              const ChannelResponse& channel) {
  detail::check_inputs(history, channel);
  MeanVar mv;
  for (std::size_t k = 0; k < history.amounts.size(); ++k) {
    const double n = static_cast<double>(history.amounts[k]);
    const double p = detail::tap(history, channel, k);
    mv.mean += n * p;
    mv.variance += n * p * (1.0 - p);
  }
  if (kind == ModelKind::poisson) mv.variance = mv.mean;
  return mv;
}

/// CDF of the received count over [0, history.total()].
inline CountCdf model_cdf(ModelKind kind, const EmissionHistory& history,
                          const ChannelResponse& channel, const ModelOptions& opts = {}) {
  const MeanVar mv = model_mean_var(kind, history, channel);
  const std::int64_t total = history.total();
  const auto size = static_cast<std::size_t>(total) + 1;

  // Nothing can arrive: unit mass at zero for every model.
  if (mv.mean == 0.0) return CountCdf(kind, std::vector<double>(size, 1.0), mv);

  std::vector<double> cdf(size, 0.0);
  switch (kind) {
    case ModelKind::binomial: {
      std::size_t cap = size - 1;
      if (opts.cap_support) {
        const double limit = std::ceil(mv.mean + opts.cap_sigmas * std::sqrt(mv.variance));
        cap = std::min(cap, static_cast<std::size_t>(std::max(0.0, limit)));
      }
      std::vector<double> pmf{1.0};
      for (std::size_t k = 0; k < history.amounts.size(); ++k) {
        const double p = detail::tap(history, channel, k);
        const std::int64_t n = history.amounts[k];
        if (n == 0 || p == 0.0) continue;
        pmf = detail::convolve(pmf, detail::binomial_pmf(n, p), cap);
      }
      double acc = 0.0;
      for (std::size_t x = 0; x < size; ++x) {
        if (x < pmf.size()) acc += pmf[x];
        cdf[x] = std::min(acc, 1.0);
      }
      break;
    }
    case ModelKind::poisson:
      for (std::size_t x = 0; x < size; ++x) {
        cdf[x] = special::poisson_cdf(static_cast<std::int64_t>(x), mv.mean);
      }
      break;
    case ModelKind::gaussian: {
      if (mv.variance <= 0.0) {
        throw DomainError("gaussian model is degenerate (zero variance with mean " +
                          std::to_string(mv.mean) + ")");
      }
      const double sd = std::sqrt(mv.variance);
      for (std::size_t x = 0; x < size; ++x) {
        cdf[x] = special::normal_cdf(static_cast<double>(x), mv.mean, sd);
      }
      break;
    }
  }
  return CountCdf(kind, std::move(cdf), mv);
}

}  // namespace mcvd
