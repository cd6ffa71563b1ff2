#pragma once

// Flat `key = value` configuration. Keys are the field names of SimConfig
// and ErrorAnalysisConfig plus a few sweep parameters; a value may end with
// its documented unit (e.g. `distance = 8 um`), and any other unit is an error.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mcvd/config.hpp"
#include "mcvd/types.hpp"

namespace mcvd {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

/// Everything a recipe can be configured with.
struct ResolvedConfig {
  SimConfig sim;
  ErrorAnalysisConfig error;
  std::int64_t num_probe_molecules = 200000;
  std::int64_t num_bits = 20000;
  std::vector<std::int64_t> ntx_values;
  std::vector<double> velocity_values;
  std::vector<double> distance_values;
};

/// Validated parameter ranges, enforced unless out-of-range values are explicitly allowed.
struct ParameterRanges {
  double distance_min = 1.0;
  double distance_max = 10.0;
  double drift_max = 10.0;
  std::int64_t molecules_min = 2;
  std::int64_t molecules_max = 1000;
  double symbol_duration_min = 0.4;
  double symbol_duration_max = 0.5;
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

struct KeySpec {
  enum class Kind { real, integer, real_list, integer_list, vector3, boolean, seed, range };
  Kind kind;
  const char* unit;  // "" when unitless
};

inline const std::map<std::string, KeySpec, std::less<>>& key_specs() {
  using K = KeySpec::Kind;
  static const std::map<std::string, KeySpec, std::less<>> specs = {
      {"diffusion_coefficient", {K::real, "um^2/s"}},
      {"receiver_radius", {K::real, "um"}},
      {"distance", {K::real, "um"}},
      {"drift_velocity", {K::vector3, "um/s"}},
      {"time_step", {K::real, "s"}},
      {"symbol_duration", {K::real, "s"}},
      {"num_slots", {K::integer, ""}},
      {"num_molecules", {K::integer, ""}},
      {"num_trials", {K::integer, ""}},
      {"rng_seed", {K::seed, ""}},
      {"far_field_skip", {K::boolean, ""}},
      {"bridge_correction", {K::boolean, ""}},
      {"eta", {K::integer, ""}},
      {"threshold_range", {K::range, ""}},
      {"bit_prior", {K::real, ""}},
      {"amounts", {K::integer_list, ""}},
      {"num_probe_molecules", {K::integer, ""}},
      {"num_bits", {K::integer, ""}},
      {"ntx_values", {K::integer_list, ""}},
      {"velocity_values", {K::real_list, "um/s"}},
      {"distance_values", {K::real_list, "um"}},
  };
  return specs;
}

// Splits off a trailing unit token, checking it against the expected one.
inline std::string strip_unit(const std::string& key, const std::string& raw, const char* unit) {
  std::string value = trim(raw);
  const auto space = value.find_last_of(" \t");
  if (space == std::string::npos) {
    // Attached suffix, e.g. "4um".
    const std::string_view u(unit);
    if (!u.empty() && value.size() > u.size() && value.ends_with(u)) {
      return trim(value.substr(0, value.size() - u.size()));
    }
    return value;
  }
  const std::string tail = value.substr(space + 1);
  const bool numeric_tail = !tail.empty() && (std::isdigit(static_cast<unsigned char>(tail.back())) ||
                                              tail.back() == '.');
  if (numeric_tail || tail.back() == ',') return value;
  if (std::string_view(unit).empty()) {
    throw ConfigError(key, "takes no unit, got '" + tail + "'");
  }
  if (tail != unit) {
    throw ConfigError(key, "unit '" + tail + "' does not match expected unit '" + unit + "'");
  }
  return trim(value.substr(0, space));
}

inline double parse_real(const std::string& key, const std::string& s, const char* unit) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a number" +
                               (std::string_view(unit).empty() ? std::string()
                                                               : std::string(" in ") + unit) +
                               ", got '" + t + "'");
  }
  return v;
}

inline std::int64_t parse_integer(const std::string& key, const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ConfigError(key, "expected an integer, got '" + t + "'");
  }
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
  std::string t = trim(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key, "expected true/false, got '" + t + "'");
}

// "a:b" or "a..b" is the inclusive integer range; otherwise a comma list.
inline std::vector<std::int64_t> parse_range(const std::string& key, const std::string& s) {
  for (std::string_view sep : {std::string_view(".."), std::string_view(":")}) {
    const auto pos = s.find(sep);
    if (pos != std::string::npos) {
      const auto lo = parse_integer(key, s.substr(0, pos));
      const auto hi = parse_integer(key, s.substr(pos + sep.size()));
      if (hi < lo) throw ConfigError(key, "empty range");
      std::vector<std::int64_t> out;
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
      return out;
    }
  }
  std::vector<std::int64_t> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_integer(key, part));
  return out;
}

inline void apply(ResolvedConfig& cfg, const KeyValue& kv) {
  const auto& specs = key_specs();
  const auto it = specs.find(kv.key);
  if (it == specs.end()) {
    throw ConfigError(kv.key, "unknown key" +
                                  (kv.line > 0 ? " (line " + std::to_string(kv.line) + ")"
                                               : std::string()));
  }
  const auto& key = kv.key;
  const auto& spec = it->second;
  const std::string v = strip_unit(key, kv.value, spec.unit);
  auto real = [&] { return parse_real(key, v, spec.unit); };
  auto integer = [&] { return parse_integer(key, v); };

  if (key == "diffusion_coefficient") cfg.sim.diffusion_coefficient = real();
  else if (key == "receiver_radius") cfg.sim.receiver_radius = real();
  else if (key == "distance") cfg.sim.distance = real();
  else if (key == "drift_velocity") {
    const auto parts = split(v, ',');
    if (parts.size() == 1) {
      cfg.sim.set_axial_drift(parse_real(key, parts[0], spec.unit));
    } else if (parts.size() == 3) {
      cfg.sim.drift_velocity = {parse_real(key, parts[0], spec.unit),
                                parse_real(key, parts[1], spec.unit),
                                parse_real(key, parts[2], spec.unit)};
    } else {
      throw ConfigError(key, "expected a scalar axial speed or three components in um/s");
    }
  } else if (key == "time_step") cfg.sim.time_step = real();
  else if (key == "symbol_duration") cfg.sim.symbol_duration = real();
  else if (key == "num_slots") cfg.sim.num_slots = static_cast<int>(integer());
  else if (key == "num_molecules") cfg.sim.num_molecules = integer();
  else if (key == "num_trials") cfg.sim.num_trials = integer();
  else if (key == "rng_seed") {
    const auto t = trim(v);
    char* end = nullptr;
    const unsigned long long s = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || t[0] == '-' || end != t.c_str() + t.size()) {
      throw ConfigError(key, "expected a non-negative 64-bit integer");
    }
    cfg.sim.rng_seed = s;
  } else if (key == "far_field_skip") cfg.sim.far_field_skip = parse_bool(key, v);
  else if (key == "bridge_correction") cfg.sim.bridge_correction = parse_bool(key, v);
  else if (key == "eta") cfg.error.eta = static_cast<int>(integer());
  else if (key == "threshold_range") cfg.error.thresholds = parse_range(key, v);
  else if (key == "bit_prior") cfg.error.bit_prior = real();
  else if (key == "amounts") {
    const auto parts = split(v, ',');
    if (parts.size() != 2) throw ConfigError(key, "expected 'N0, N1' molecule counts");
    cfg.error.amount_zero = parse_integer(key, parts[0]);
    cfg.error.amount_one = parse_integer(key, parts[1]);
  } else if (key == "num_probe_molecules") cfg.num_probe_molecules = integer();
  else if (key == "num_bits") cfg.num_bits = integer();
  else if (key == "ntx_values") {
    cfg.ntx_values.clear();
    for (const auto& p : split(v, ',')) cfg.ntx_values.push_back(parse_integer(key, p));
  } else if (key == "velocity_values" || key == "distance_values") {
    auto& target = key == "velocity_values" ? cfg.velocity_values : cfg.distance_values;
    target.clear();
    for (const auto& p : split(v, ',')) target.push_back(parse_real(key, p, spec.unit));
  }
}

}  // namespace detail

/// Parses `key = value` lines; `#` starts a comment.
inline std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number), "expected 'key = value'");
    }
    KeyValue kv{detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)), number};
    if (kv.key.empty()) throw ConfigError("line " + std::to_string(number), "missing key");
    out.push_back(std::move(kv));
  }
  return out;
}

inline std::vector<KeyValue> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("--config", "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_key_values(ss.str());
}

/// "key=value" command-line override.
inline KeyValue parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(std::string(text), "override must look like key=value");
  }
  return {detail::trim(text.substr(0, eq)), detail::trim(text.substr(eq + 1)), 0};
}

inline void check_ranges(const ResolvedConfig& cfg, const ParameterRanges& r = {}) {
  auto in = [](double v, double lo, double hi) { return v >= lo - 1e-12 && v <= hi + 1e-12; };
  auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError(key, what + " (outside the validated range; pass --allow-out-of-range)");
  };
  if (!in(cfg.sim.distance, r.distance_min, r.distance_max)) fail("distance", "must be 1..10 um");
  if (cfg.sim.drift_velocity.norm() > r.drift_max + 1e-12) {
    fail("drift_velocity", "speed must be 0..10 um/s");
  }
  if (cfg.sim.num_molecules < r.molecules_min || cfg.sim.num_molecules > r.molecules_max) {
    fail("num_molecules", "must be 2..1000 molecules");
  }
  if (!in(cfg.sim.symbol_duration, r.symbol_duration_min, r.symbol_duration_max)) {
    fail("symbol_duration", "must be 0.4..0.5 s");
  }
  if (cfg.error.amount_one < r.molecules_min || cfg.error.amount_one > r.molecules_max) {
    fail("amounts", "N1 must be 2..1000 molecules");
  }
  for (auto d : cfg.distance_values) {
    if (!in(d, r.distance_min, r.distance_max)) fail("distance_values", "must be 1..10 um");
  }
  for (auto v : cfg.velocity_values) {
    if (!in(std::abs(v), 0.0, r.drift_max)) fail("velocity_values", "must be 0..10 um/s");
  }
  for (auto n : cfg.ntx_values) {
    if (n < r.molecules_min || n > r.molecules_max) fail("ntx_values", "must be 2..1000");
  }
}

/// Applies key-values on top of `defaults` and validates the result.
inline ResolvedConfig validate_config(const std::vector<KeyValue>& input,
                                      ResolvedConfig defaults = {},
                                      bool allow_out_of_range = false) {
  ResolvedConfig cfg = std::move(defaults);
  for (const auto& kv : input) detail::apply(cfg, kv);
  validate(cfg.sim);
  validate(cfg.error);
  if (cfg.num_probe_molecules < 1) throw ConfigError("num_probe_molecules", "must be >= 1");
  if (cfg.num_bits < 1) throw ConfigError("num_bits", "must be >= 1");
  if (!allow_out_of_range) check_ranges(cfg);
  return cfg;
}

}  // namespace mcvd
