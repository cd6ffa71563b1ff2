#pragma once

// Seeded random streams for the Monte Carlo engine.
//
// Every particle draws from its own substream, keyed by
// (seed, domain, trial, particle), so a run partitioned across any number
// of workers consumes exactly the same numbers as a serial run.

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace mcvd {

/// SplitMix64 finalizer. Used to expand keys into xoshiro state.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix_key(std::uint64_t acc, std::uint64_t word) noexcept {
  std::uint64_t s = acc ^ (word + 0x632BE59BD9B4E019ULL + (acc << 6) + (acc >> 2));
  return splitmix64(s);
}

/// Seed for an independent sub-run (e.g. one sweep point) of a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) noexcept {
  return mix_key(mix_key(0x5EEDED5EEDULL, base), tag);
}

/// xoshiro256++ (period 2^256 - 1). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256pp(std::uint64_t seed = 0) noexcept { reseed(seed); }

  constexpr void reseed(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  friend constexpr bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

/// Independent draw domains, so e.g. the bit source of a BER run never
/// shares a substream with the particles it drives.
enum class StreamDomain : std::uint64_t {
  emission = 1,
  probe = 2,
  bits = 3,
  ber_particles = 4,
};

/// A generator plus standard-normal sampler for one substream.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamDomain domain, std::uint64_t trial,
               std::uint64_t particle) noexcept
      : engine_(derive(seed, domain, trial, particle)) {}

  static constexpr std::uint64_t derive(std::uint64_t seed, StreamDomain domain,
                                        std::uint64_t trial, std::uint64_t particle) noexcept {
    std::uint64_t k = mix_key(0x6D63766400000000ULL, seed);
    k = mix_key(k, static_cast<std::uint64_t>(domain));
    k = mix_key(k, trial);
    return mix_key(k, particle);
  }

  double normal() { return normal_(engine_); }
  double uniform() noexcept { return engine_.uniform(); }
  Xoshiro256pp& engine() noexcept { return engine_; }

 private:
  Xoshiro256pp engine_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mcvd
