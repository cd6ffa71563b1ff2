#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mcvd/types.hpp"

namespace mcvd {

/// Physical and protocol parameters of one emission experiment.
///
/// Lengths are in um, times in s. The receiver is centered at the origin and
/// the point source sits on the negative x-axis at center distance
/// receiver_radius + distance, so a drift of (+v, 0, 0) points at the receiver.
struct SimConfig {
  double diffusion_coefficient = 79.4;  // um^2/s
  double receiver_radius = 10.0;        // um
  double distance = 5.0;                // um, source to receiver surface
  Vec3 drift_velocity{};                // um/s
  double time_step = 1e-4;              // s
  double symbol_duration = 0.5;         // s
  int num_slots = 1;
  std::int64_t num_molecules = 100;
  std::int64_t num_trials = 10000;
  std::uint64_t rng_seed = 1;

  /// Advance particles that are provably out of reach of the receiver by
  /// several steps at once (exact endpoint law; missed-hit probability per
  /// jump below 1e-15).
  bool far_field_skip = true;

  /// Also absorb, with the Brownian-bridge crossing probability, particles
  /// whose path touched the receiver between two outside grid points. Without
  /// it the end-of-step test alone undercounts hits by O(sqrt(dt)).
  bool bridge_correction = true;

  double center_distance() const noexcept { return receiver_radius + distance; }
  Vec3 source_position() const noexcept { return {-center_distance(), 0.0, 0.0}; }

  /// Number of time steps per symbol slot; t_s must be a whole multiple of dt.
  std::int64_t steps_per_slot() const noexcept {
    return static_cast<std::int64_t>(std::llround(symbol_duration / time_step));
  }
  std::int64_t horizon_steps() const noexcept { return steps_per_slot() * num_slots; }

  /// Scalar drift v means (+v, 0, 0): from the source toward the receiver.
  void set_axial_drift(double v) noexcept { drift_velocity = {v, 0.0, 0.0}; }
};

inline void validate(const SimConfig& cfg) {
  auto positive = [](double v, const char* key, const char* unit) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(key, "must be a positive finite value in " + std::string(unit));
    }
  };
  positive(cfg.diffusion_coefficient, "diffusion_coefficient", "um^2/s");
  positive(cfg.receiver_radius, "receiver_radius", "um");
  if (!(cfg.distance > 0.0) || !std::isfinite(cfg.distance)) {
    throw ConfigError("distance", "source must lie outside the receiver (distance > 0 um)");
  }
  positive(cfg.time_step, "time_step", "s");
  positive(cfg.symbol_duration, "symbol_duration", "s");
  const auto& v = cfg.drift_velocity;
  if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
    throw ConfigError("drift_velocity", "components must be finite (um/s)");
  }
  if (cfg.time_step > cfg.symbol_duration / 100.0 * (1.0 + 1e-12)) {
    throw ConfigError("time_step", "must not exceed symbol_duration / 100");
  }
  const double ratio = cfg.symbol_duration / cfg.time_step;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio) {
    throw ConfigError("time_step", "symbol_duration must be a whole multiple of time_step");
  }
  if (cfg.num_slots < 1) throw ConfigError("num_slots", "must be >= 1");
  if (cfg.num_molecules < 0) throw ConfigError("num_molecules", "must be >= 0");
  if (cfg.num_trials < 1) throw ConfigError("num_trials", "must be >= 1");
}

/// BCSK detection parameters.
struct ErrorAnalysisConfig {
  int eta = 5;
  std::vector<std::int64_t> thresholds;  // empty: every integer in [0, amount_one]
  double bit_prior = 0.5;                // P(X = 1)
  std::int64_t amount_zero = 0;          // N_0, molecules for bit 0
  std::int64_t amount_one = 100;         // N_1, molecules for bit 1

  std::vector<std::int64_t> resolved_thresholds() const {
    if (!thresholds.empty()) return thresholds;
    std::vector<std::int64_t> out;
    for (std::int64_t t = 0; t <= amount_one; ++t) out.push_back(t);
    return out;
  }
};

inline void validate(const ErrorAnalysisConfig& cfg) {
  if (cfg.eta < 0) throw ConfigError("eta", "must be >= 0");
  if (!(cfg.bit_prior >= 0.0 && cfg.bit_prior <= 1.0)) {
    throw ConfigError("bit_prior", "must lie in [0,1]");
  }
  if (cfg.amount_zero < 0 || cfg.amount_one < 0) {
    throw ConfigError("amounts", "molecule counts must be >= 0");
  }
  const std::int64_t max_threshold =
      std::max(cfg.amount_zero, cfg.amount_one) * static_cast<std::int64_t>(cfg.eta + 1);
  for (auto t : cfg.thresholds) {
    if (t < 0 || t > max_threshold) {
      throw ConfigError("threshold_range", "threshold " + std::to_string(t) +
                                               " outside [0, " + std::to_string(max_threshold) +
                                               "]");
    }
  }
}

}  // namespace mcvd
