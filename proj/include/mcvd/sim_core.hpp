#pragma once

// Monte Carlo engine for 3-D Brownian motion with constant drift towards an
// absorbing spherical receiver.
//
// Each step adds N(v * dt, 2 D dt) independently per axis; a particle whose
// post-step position lies within the receiver sphere is absorbed and its hit
// time is the end of that step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mcvd/config.hpp"
#include "mcvd/parallel.hpp"
#include "mcvd/rng.hpp"
#include "mcvd/types.hpp"

namespace mcvd {

struct ParticleState {
  Vec3 position{};
  bool absorbed = false;
  std::optional<double> hit_time;  // s, set once absorbed
  std::int64_t elapsed_steps = 0;
};

struct HitHistogram {
  std::vector<std::int64_t> slot_counts;
  std::int64_t total_emitted = 0;
  std::int64_t unabsorbed = 0;

  std::int64_t absorbed() const noexcept {
    std::int64_t s = 0;
    for (auto c : slot_counts) s += c;
    return s;
  }

  HitHistogram& operator+=(const HitHistogram& o) {
    if (slot_counts.size() < o.slot_counts.size()) slot_counts.resize(o.slot_counts.size(), 0);
    for (std::size_t i = 0; i < o.slot_counts.size(); ++i) slot_counts[i] += o.slot_counts[i];
    total_emitted += o.total_emitted;
    unabsorbed += o.unabsorbed;
    return *this;
  }

  friend bool operator==(const HitHistogram&, const HitHistogram&) = default;
};

/// Single Euler step of the drift-diffusion model. The caller must pass an
/// unabsorbed particle; absorbed particles are returned unchanged.
inline ParticleState step_particle(ParticleState state, const SimConfig& cfg, RandomStream& rng) {
  if (state.absorbed) return state;
  const double sigma = std::sqrt(2.0 * cfg.diffusion_coefficient * cfg.time_step);
  const Vec3 mean = cfg.time_step * cfg.drift_velocity;
  const double dx = rng.normal();
  const double dy = rng.normal();
  const double dz = rng.normal();
  state.position += Vec3{mean.x + sigma * dx, mean.y + sigma * dy, mean.z + sigma * dz};
  ++state.elapsed_steps;
  if (state.position.norm2() <= cfg.receiver_radius * cfg.receiver_radius) {
    state.absorbed = true;
    state.hit_time = static_cast<double>(state.elapsed_steps) * cfg.time_step;
  }
  return state;
}

/// Precomputed per-config propagation kernel.
///
/// With far_field_skip, a particle whose gap to the receiver surface exceeds
/// kSkipSigmas * sigma * sqrt(k) + |v| * k * dt is advanced k steps in one
/// Gaussian draw. The k-step endpoint has exactly the law of k single steps;
/// the union bound 12 Q(8.5) < 1e-16 caps the chance that any skipped grid
/// point would have been inside the receiver.
class Propagator {
 public:
  static constexpr double kSkipSigmas = 14.75;  // 8.5 * sqrt(3)
  static constexpr int kMaxSkipLevel = 14;      // up to 2^14 steps per jump
  static constexpr double kBridgeCutoff = 40.0;

  explicit Propagator(const SimConfig& cfg)
      : source_(cfg.source_position()),
        drift_step_(cfg.time_step * cfg.drift_velocity),
        sigma_(std::sqrt(2.0 * cfg.diffusion_coefficient * cfg.time_step)),
        radius_(cfg.receiver_radius),
        radius2_(cfg.receiver_radius * cfg.receiver_radius),
        skip_(cfg.far_field_skip),
        bridge_(cfg.bridge_correction) {
    const double speed = cfg.drift_velocity.norm();
    for (int level = 1; level <= kMaxSkipLevel; ++level) {
      const double k = std::ldexp(1.0, level);
      reach_[level - 1] = kSkipSigmas * sigma_ * std::sqrt(k) + speed * k * cfg.time_step;
    }
    const double near = radius_ + reach_[0];
    skip_threshold2_ = near * near;
    // Past this radius the crossing exponent exceeds kBridgeCutoff unless the
    // last step moved more than ~6.7 sigma radially.
    const double zone = radius_ + std::sqrt(kBridgeCutoff / 2.0) * sigma_ * 2.0;
    bridge_zone2_ = zone * zone;
  }

  /// Tracks one particle from the source for at most max_steps steps.
  /// Returns the 1-based step at which it was absorbed, or 0.
  std::int64_t first_hit_step(RandomStream& rng, std::int64_t max_steps) const {
    Vec3 pos = source_;
    std::int64_t step = 0;
    while (step < max_steps) {
      if (skip_ && pos.norm2() > skip_threshold2_) {
        const double gap = pos.norm() - radius_;
        int level = 0;
        while (level < kMaxSkipLevel && reach_[level] <= gap) ++level;
        if (level > 0) {
          const std::int64_t k = std::min<std::int64_t>(std::int64_t{1} << level, max_steps - step);
          const double kd = static_cast<double>(k);
          const double s = sigma_ * std::sqrt(kd);
          const double dx = rng.normal();
          const double dy = rng.normal();
          const double dz = rng.normal();
          pos += Vec3{kd * drift_step_.x + s * dx, kd * drift_step_.y + s * dy,
                      kd * drift_step_.z + s * dz};
          step += k;
          if (pos.norm2() <= radius2_) return step;
          continue;
        }
      }
      const Vec3 prev = pos;
      const double dx = rng.normal();
      const double dy = rng.normal();
      const double dz = rng.normal();
      pos += Vec3{drift_step_.x + sigma_ * dx, drift_step_.y + sigma_ * dy,
                  drift_step_.z + sigma_ * dz};
      ++step;
      const double r2 = pos.norm2();
      if (r2 <= radius2_) return step;
      if (bridge_ && r2 < bridge_zone2_ && crossed_between(prev, std::sqrt(r2), rng)) return step;
    }
    return 0;
  }

  /// Probability that the Brownian bridge between two outside points touched
  /// the sphere, in the locally planar approximation exp(-2 g0 g1 / sigma^2).
  double crossing_probability(double gap_before, double gap_after) const noexcept {
    return std::exp(-2.0 * gap_before * gap_after / (sigma_ * sigma_));
  }

 private:
  bool crossed_between(const Vec3& prev, double r_after, RandomStream& rng) const {
    const double g0 = prev.norm() - radius_;
    const double g1 = r_after - radius_;
    const double exponent = 2.0 * g0 * g1 / (sigma_ * sigma_);
    if (exponent > kBridgeCutoff) return false;
    return rng.uniform() < std::exp(-exponent);
  }

  Vec3 source_;
  Vec3 drift_step_;
  double sigma_;
  double radius_;
  double radius2_;
  bool skip_;
  bool bridge_;
  double bridge_zone2_ = 0.0;
  std::array<double, kMaxSkipLevel> reach_{};
  double skip_threshold2_ = 0.0;
};

/// Maps a 1-based hit step to a 0-based slot: slot i covers steps
/// ((i-1) * S, i * S].
inline std::int64_t slot_of_step(std::int64_t step, std::int64_t steps_per_slot) noexcept {
  return (step - 1) / steps_per_slot;
}

namespace detail {

inline HitHistogram run_particles(const SimConfig& cfg, StreamDomain domain, std::uint64_t trial,
                                  std::int64_t first, std::int64_t last) {
  const Propagator prop(cfg);
  const std::int64_t per_slot = cfg.steps_per_slot();
  const std::int64_t horizon = cfg.horizon_steps();
  HitHistogram h;
  h.slot_counts.assign(static_cast<std::size_t>(cfg.num_slots), 0);
  h.total_emitted = last - first;
  for (std::int64_t p = first; p < last; ++p) {
    RandomStream rng(cfg.rng_seed, domain, trial, static_cast<std::uint64_t>(p));
    const std::int64_t hit = prop.first_hit_step(rng, horizon);
    if (hit == 0) {
      ++h.unabsorbed;
    } else {
      ++h.slot_counts[static_cast<std::size_t>(slot_of_step(hit, per_slot))];
    }
  }
  return h;
}

}  // namespace detail

/// One emission of cfg.num_molecules from the source; particle p of trial t
/// uses substream (seed, emission, t, p).
inline HitHistogram simulate_emission(const SimConfig& cfg, std::uint64_t trial_index = 0) {
  validate(cfg);
  return detail::run_particles(cfg, StreamDomain::emission, trial_index, 0, cfg.num_molecules);
}

/// cfg.num_trials independent emissions, trial-indexed.
inline std::vector<HitHistogram> simulate_trials(const SimConfig& cfg, std::size_t workers = 1) {
  validate(cfg);
  std::vector<HitHistogram> out(static_cast<std::size_t>(cfg.num_trials));
  parallel_for(out.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      out[t] = detail::run_particles(cfg, StreamDomain::emission, t, 0, cfg.num_molecules);
    }
  });
  return out;
}

/// Received count in one slot (0-based) for every trial.
inline std::vector<std::int64_t> slot_samples(const std::vector<HitHistogram>& trials,
                                              std::size_t slot = 0) {
  std::vector<std::int64_t> out;
  out.reserve(trials.size());
  for (const auto& h : trials) out.push_back(slot < h.slot_counts.size() ? h.slot_counts[slot] : 0);
  return out;
}

/// Slot counts among the first prefixes[j] molecules of each trial, for
/// every prefix j (ascending). Trial t simulates max(prefixes) molecules on
/// the same substreams simulate_trials uses, so column j equals the slot
/// samples of a run with num_molecules = prefixes[j]. Columns of one trial
/// share molecules and are therefore correlated.
inline std::vector<std::vector<std::int64_t>> prefix_slot_counts(
    const SimConfig& cfg, const std::vector<std::int64_t>& prefixes, std::size_t workers = 1,
    std::size_t slot = 0) {
  validate(cfg);
  if (prefixes.empty() || !std::is_sorted(prefixes.begin(), prefixes.end()) ||
      prefixes.front() < 0) {
    throw ConfigError("ntx_values", "prefix sizes must be non-negative and ascending");
  }
  if (slot >= static_cast<std::size_t>(cfg.num_slots)) {
    throw ConfigError("num_slots", "requested slot is beyond the simulated horizon");
  }
  const Propagator prop(cfg);
  const std::int64_t per_slot = cfg.steps_per_slot();
  const std::int64_t horizon = cfg.horizon_steps();
  std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(cfg.num_trials));
  parallel_for(out.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      auto& row = out[t];
      row.assign(prefixes.size(), 0);
      std::int64_t hits = 0;
      std::size_t j = 0;
      for (std::int64_t p = 0; p < prefixes.back(); ++p) {
        while (j < prefixes.size() && prefixes[j] == p) row[j++] = hits;
        RandomStream rng(cfg.rng_seed, StreamDomain::emission, t, static_cast<std::uint64_t>(p));
        const std::int64_t hit = prop.first_hit_step(rng, horizon);
        if (hit != 0 && static_cast<std::size_t>(slot_of_step(hit, per_slot)) == slot) ++hits;
      }
      while (j < prefixes.size()) row[j++] = hits;
    }
  });
  return out;
}

inline constexpr std::int64_t kMinProbeMolecules = 10000;

/// Slot histogram of num_probe_molecules independent probe particles.
/// Blocks of particles run on separate workers and merge by integer addition.
inline HitHistogram probe_histogram(const SimConfig& cfg, std::int64_t num_probe_molecules,
                                    std::size_t workers = 1,
                                    std::int64_t min_probes = kMinProbeMolecules) {
  validate(cfg);
  if (num_probe_molecules < min_probes) {
    throw ConfigError("num_probe_molecules",
                      "at least " + std::to_string(min_probes) + " probes required");
  }
  constexpr std::int64_t kBlock = 4096;
  const auto blocks = static_cast<std::size_t>((num_probe_molecules + kBlock - 1) / kBlock);
  std::vector<HitHistogram> partial(blocks);
  parallel_for(blocks, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      const std::int64_t first = static_cast<std::int64_t>(b) * kBlock;
      const std::int64_t last = std::min(num_probe_molecules, first + kBlock);
      partial[b] = detail::run_particles(cfg, StreamDomain::probe, 0, first, last);
    }
  });
  HitHistogram total;
  total.slot_counts.assign(static_cast<std::size_t>(cfg.num_slots), 0);
  for (const auto& p : partial) total += p;
  return total;
}

inline ChannelResponse to_channel_response(const HitHistogram& h) {
  ChannelResponse r;
  r.phi.reserve(h.slot_counts.size());
  const auto n = static_cast<double>(h.total_emitted);
  for (auto c : h.slot_counts) r.phi.push_back(n > 0 ? static_cast<double>(c) / n : 0.0);
  return r;
}

/// phi_i = hits in slot i / probes, for i = 1..cfg.num_slots.
inline ChannelResponse estimate_phi(const SimConfig& cfg, std::int64_t num_probe_molecules,
                                    std::size_t workers = 1,
                                    std::int64_t min_probes = kMinProbeMolecules) {
  return to_channel_response(probe_histogram(cfg, num_probe_molecules, workers, min_probes));
}

/// Running fraction of emitted particles absorbed by the end of each slot.
inline std::vector<double> cumulative_hit_fraction(const HitHistogram& h) {
  std::vector<double> out;
  out.reserve(h.slot_counts.size());
  std::int64_t acc = 0;
  for (auto c : h.slot_counts) {
    acc += c;
    out.push_back(h.total_emitted > 0
                      ? static_cast<double>(acc) / static_cast<double>(h.total_emitted)
                      : 0.0);
  }
  return out;
}

}  // namespace mcvd
