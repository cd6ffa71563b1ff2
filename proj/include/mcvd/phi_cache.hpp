#pragma once

// Memoized channel-response estimates, optionally persisted as one JSON file
// per key. Entries store the integer hit histogram, so a cache hit rebuilds a
// bit-identical phi vector.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "mcvd/config.hpp"
#include "mcvd/sim_core.hpp"

namespace mcvd {

/// Canonical text of everything that determines an estimate_phi result.
/// Doubles are written as hex floats so distinct values never collide.
inline std::string phi_cache_key(const SimConfig& cfg, std::int64_t probes) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "D=%a;rr=%a;d=%a;v=%a,%a,%a;dt=%a;ts=%a;slots=%d;probes=%lld;seed=%llu;skip=%d;"
                "bridge=%d",
                cfg.diffusion_coefficient, cfg.receiver_radius, cfg.distance,
                cfg.drift_velocity.x, cfg.drift_velocity.y, cfg.drift_velocity.z, cfg.time_step,
                cfg.symbol_duration, cfg.num_slots, static_cast<long long>(probes),
                static_cast<unsigned long long>(cfg.rng_seed), cfg.far_field_skip ? 1 : 0,
                cfg.bridge_correction ? 1 : 0);
  return buf;
}

class PhiCache {
 public:
  /// In-memory only when `directory` is empty. With `bypass`, every lookup
  /// recomputes and nothing is stored.
  explicit PhiCache(std::filesystem::path directory = {}, bool bypass = false)
      : directory_(std::move(directory)), bypass_(bypass) {
    if (!directory_.empty()) std::filesystem::create_directories(directory_);
  }

  ChannelResponse get(const SimConfig& cfg, std::int64_t probes, std::size_t workers = 1) {
    return to_channel_response(histogram(cfg, probes, workers));
  }

  HitHistogram histogram(const SimConfig& cfg, std::int64_t probes, std::size_t workers = 1) {
    if (bypass_) {
      ++misses_;
      return probe_histogram(cfg, probes, workers);
    }
    const std::string key = phi_cache_key(cfg, probes);
    if (auto it = memory_.find(key); it != memory_.end()) {
      ++hits_;
      return it->second;
    }
    if (auto stored = load(key)) {
      ++hits_;
      return memory_[key] = *stored;
    }
    ++misses_;
    HitHistogram h = probe_histogram(cfg, probes, workers);
    store(key, h);
    return memory_[key] = h;
  }

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  std::filesystem::path file_for(const std::string& key) const {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char c : key) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
    char name[32];
    std::snprintf(name, sizeof name, "phi_%016llx.json", static_cast<unsigned long long>(h));
    return directory_ / name;
  }

  std::optional<HitHistogram> load(const std::string& key) const {
    if (directory_.empty()) return std::nullopt;
    std::ifstream f(file_for(key));
    if (!f) return std::nullopt;
    try {
      const auto doc = nlohmann::json::parse(f);
      if (doc.at("key").get<std::string>() != key) return std::nullopt;
      HitHistogram h;
      h.slot_counts = doc.at("slot_counts").get<std::vector<std::int64_t>>();
      h.total_emitted = doc.at("total_emitted").get<std::int64_t>();
      h.unabsorbed = doc.at("unabsorbed").get<std::int64_t>();
      return h;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
  }

  void store(const std::string& key, const HitHistogram& h) const {
    if (directory_.empty()) return;
    const nlohmann::json doc = {{"key", key},
                                {"slot_counts", h.slot_counts},
                                {"total_emitted", h.total_emitted},
                                {"unabsorbed", h.unabsorbed}};
    std::ofstream f(file_for(key));
    if (f) f << doc.dump() << "\n";
  }

  std::filesystem::path directory_;
  bool bypass_;
  std::map<std::string, HitHistogram> memory_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace mcvd
