#pragma once

// BCSK threshold detection under intersymbol interference: exact error
// probabilities per arrival model, and a continuous-transmission Monte Carlo
// counterpart driven by the particle simulator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcvd/arrival_models.hpp"
#include "mcvd/config.hpp"
#include "mcvd/parallel.hpp"
#include "mcvd/rng.hpp"
#include "mcvd/sim_core.hpp"
#include "mcvd/types.hpp"

namespace mcvd {

using Bit = std::uint8_t;

struct BitSequence {
  std::vector<Bit> bits;
};

/// Received symbol for a slot count: 0 if count <= threshold, else 1.
constexpr Bit demodulate(std::int64_t count, std::int64_t threshold) noexcept {
  return count > threshold ? Bit{1} : Bit{0};
}

inline constexpr int kMaxEnumeratedEta = 20;

/// Emission amounts of a history followed by the current bit.
inline EmissionHistory emission_history(const BitSequence& previous, Bit current,
                                        const ErrorAnalysisConfig& cfg) {
  EmissionHistory h;
  h.amounts.reserve(previous.bits.size() + 1);
  for (Bit b : previous.bits) h.amounts.push_back(b ? cfg.amount_one : cfg.amount_zero);
  h.amounts.push_back(current ? cfg.amount_one : cfg.amount_zero);
  return h;
}

/// Error probability of the current slot at each threshold, given the
/// previous bits (oldest first): 1 - F(xi) for a sent 0 and F(xi) for a 1.
inline std::vector<double> conditional_error_curve(ModelKind model, const BitSequence& previous,
                                                   Bit current,
                                                   std::span<const std::int64_t> thresholds,
                                                   const ChannelResponse& channel,
                                                   const ErrorAnalysisConfig& cfg) {
  const CountCdf cdf = model_cdf(model, emission_history(previous, current, cfg), channel);
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (auto xi : thresholds) {
    const double f = cdf(xi);
    out.push_back(current ? f : 1.0 - f);
  }
  return out;
}

inline double conditional_error(ModelKind model, const BitSequence& previous, Bit current,
                                std::int64_t threshold, const ChannelResponse& channel,
                                const ErrorAnalysisConfig& cfg) {
  const std::int64_t t[] = {threshold};
  return conditional_error_curve(model, previous, current, t, channel, cfg).front();
}

/// Average error probability at every threshold of cfg, enumerating all
/// 2^eta previous-bit patterns weighted by the bit prior.
inline std::vector<double> average_error_curve(ModelKind model, const ErrorAnalysisConfig& cfg,
                                               const ChannelResponse& channel) {
  validate(cfg);
  if (cfg.eta > kMaxEnumeratedEta) {
    throw ConfigError("eta", "exhaustive enumeration supports eta <= " +
                                 std::to_string(kMaxEnumeratedEta) +
                                 "; use simulate_ber for deeper memory");
  }
  const auto thresholds = cfg.resolved_thresholds();
  std::vector<double> pe(thresholds.size(), 0.0);
  const double prior = cfg.bit_prior;
  const std::uint64_t patterns = std::uint64_t{1} << cfg.eta;
  BitSequence previous;
  previous.bits.resize(static_cast<std::size_t>(cfg.eta));
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double weight = 1.0;
    for (int j = 0; j < cfg.eta; ++j) {
      const Bit b = static_cast<Bit>((mask >> j) & 1U);
      previous.bits[static_cast<std::size_t>(j)] = b;
      weight *= b ? prior : 1.0 - prior;
    }
    if (weight == 0.0) continue;
    for (Bit current : {Bit{0}, Bit{1}}) {
      const double w = weight * (current ? prior : 1.0 - prior);
      if (w == 0.0) continue;
      const auto cond = conditional_error_curve(model, previous, current, thresholds, channel, cfg);
      for (std::size_t t = 0; t < pe.size(); ++t) pe[t] += w * cond[t];
    }
  }
  for (auto& p : pe) p = std::clamp(p, 0.0, 1.0);
  return pe;
}

inline double average_error(ModelKind model, const ErrorAnalysisConfig& cfg,
                            std::int64_t threshold, const ChannelResponse& channel) {
  ErrorAnalysisConfig single = cfg;
  single.thresholds = {threshold};
  return average_error_curve(model, single, channel).front();
}

enum class BerSeries { binomial, poisson, gaussian, simulation };

constexpr BerSeries series_of(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::binomial: return BerSeries::binomial;
    case ModelKind::poisson: return BerSeries::poisson;
    case ModelKind::gaussian: return BerSeries::gaussian;
  }
  return BerSeries::binomial;
}

constexpr std::string_view to_string(BerSeries s) noexcept {
  switch (s) {
    case BerSeries::binomial: return "binomial";
    case BerSeries::poisson: return "poisson";
    case BerSeries::gaussian: return "gaussian";
    case BerSeries::simulation: return "simulation";
  }
  return "?";
}

/// P_e against threshold for the three models and the simulator. Series that
/// were not computed are left empty.
struct BerCurve {
  std::vector<std::int64_t> thresholds;
  std::vector<double> pe_binomial;
  std::vector<double> pe_poisson;
  std::vector<double> pe_gaussian;
  std::vector<double> pe_sim;
  std::vector<double> pe_sim_ci_low;
  std::vector<double> pe_sim_ci_high;
  std::int64_t scored_bits = 0;

  const std::vector<double>& series(BerSeries s) const noexcept {
    switch (s) {
      case BerSeries::binomial: return pe_binomial;
      case BerSeries::poisson: return pe_poisson;
      case BerSeries::gaussian: return pe_gaussian;
      case BerSeries::simulation: return pe_sim;
    }
    return pe_sim;
  }
  std::vector<double>& series(BerSeries s) noexcept {
    return const_cast<std::vector<double>&>(std::as_const(*this).series(s));
  }
};

/// Threshold with the smallest P_e in a series; ties go to the smaller threshold.
inline std::int64_t optimal_threshold(const BerCurve& curve, BerSeries series) {
  const auto& pe = curve.series(series);
  if (pe.empty() || pe.size() != curve.thresholds.size()) {
    throw DomainError("optimal_threshold: series '" + std::string(to_string(series)) +
                      "' is empty or misaligned");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < pe.size(); ++i) {
    if (pe[i] < pe[best] ||
        (pe[i] == pe[best] && curve.thresholds[i] < curve.thresholds[best])) {
      best = i;
    }
  }
  return curve.thresholds[best];
}

/// Wilson score interval for errors / trials at z standard deviations.
inline std::pair<double, double> wilson_interval(std::int64_t errors, std::int64_t trials,
                                                 double z = 1.959963984540054) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Exact endpoints at the extremes; the formula leaves rounding residue.
  const double lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = errors == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

/// Random BCSK bits with P(1) = prior from the dedicated bit substream.
inline BitSequence random_bits(std::int64_t count, double prior, std::uint64_t seed) {
  RandomStream rng(seed, StreamDomain::bits, 0, 0);
  BitSequence seq;
  seq.bits.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) seq.bits.push_back(rng.uniform() < prior ? 1 : 0);
  return seq;
}

/// Per-slot absorption counts of a continuous BCSK transmission. Slot k emits
/// N_{b_k} molecules at (k-1) t_s; each molecule is tracked for
/// sim.num_slots slots. Molecule m of slot k uses substream (seed, ber, k, m).
inline std::vector<std::int64_t> simulate_received_counts(const BitSequence& bits,
                                                          const ErrorAnalysisConfig& cfg,
                                                          const SimConfig& sim,
                                                          std::size_t workers = 1) {
  validate(sim);
  validate(cfg);
  const std::size_t n = bits.bits.size();
  const Propagator prop(sim);
  const std::int64_t per_slot = sim.steps_per_slot();
  const std::int64_t horizon = sim.horizon_steps();

  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::int64_t> counts(n, 0);
  std::mutex merge;
  parallel_for(blocks, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::int64_t> local(n, 0);
    for (std::size_t k = begin * kBlock; k < std::min(n, end * kBlock); ++k) {
      const std::int64_t amount = bits.bits[k] ? cfg.amount_one : cfg.amount_zero;
      for (std::int64_t m = 0; m < amount; ++m) {
        RandomStream rng(sim.rng_seed, StreamDomain::ber_particles, k,
                         static_cast<std::uint64_t>(m));
        const std::int64_t hit = prop.first_hit_step(rng, horizon);
        if (hit == 0) continue;
        const std::size_t slot = k + static_cast<std::size_t>(slot_of_step(hit, per_slot));
        if (slot < n) ++local[slot];
      }
    }
    // Integer sums: the merge order cannot change the result.
    const std::lock_guard lock(merge);
    for (std::size_t i = 0; i < n; ++i) counts[i] += local[i];
  });
  return counts;
}

/// Empirical P_e per threshold over slots eta+1..n (the first eta slots lack
/// a full interference history and are discarded).
inline BerCurve score_ber(const BitSequence& bits, std::span<const std::int64_t> counts,
                          const ErrorAnalysisConfig& cfg) {
  BerCurve curve;
  curve.thresholds = cfg.resolved_thresholds();
  const std::size_t first = std::min(bits.bits.size(), static_cast<std::size_t>(cfg.eta));
  curve.scored_bits = static_cast<std::int64_t>(bits.bits.size() - first);
  for (auto xi : curve.thresholds) {
    std::int64_t errors = 0;
    for (std::size_t i = first; i < bits.bits.size(); ++i) {
      errors += demodulate(counts[i], xi) != bits.bits[i];
    }
    const auto [lo, hi] = wilson_interval(errors, curve.scored_bits);
    curve.pe_sim.push_back(curve.scored_bits > 0 ? static_cast<double>(errors) /
                                                       static_cast<double>(curve.scored_bits)
                                                 : 0.0);
    curve.pe_sim_ci_low.push_back(lo);
    curve.pe_sim_ci_high.push_back(hi);
  }
  return curve;
}

/// Monte Carlo BER of a continuous transmission of num_bits random bits (or
/// the forced sequence, if given). Fills the simulation series only.
inline BerCurve simulate_ber(const ErrorAnalysisConfig& cfg, const SimConfig& sim,
                             std::int64_t num_bits, std::size_t workers = 1,
                             const std::optional<BitSequence>& forced = std::nullopt) {
  if (num_bits < 1 && !forced) throw ConfigError("num_bits", "must be >= 1");
  const BitSequence bits = forced ? *forced : random_bits(num_bits, cfg.bit_prior, sim.rng_seed);
  const auto counts = simulate_received_counts(bits, cfg, sim, workers);
  return score_ber(bits, counts, cfg);
}

/// Fills the three model series of `curve` at its thresholds.
inline void add_model_curves(BerCurve& curve, const ErrorAnalysisConfig& cfg,
                             const ChannelResponse& channel) {
  ErrorAnalysisConfig at = cfg;
  at.thresholds = curve.thresholds;
  for (ModelKind kind : kAllModels) curve.series(series_of(kind)) = average_error_curve(kind, at, channel);
}

}  // namespace mcvd
