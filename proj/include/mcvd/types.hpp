#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mcvd {

/// Invalid user-supplied parameter. `key()` names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Argument outside a mathematical domain (e.g. p outside (0,1)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) noexcept {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) noexcept { return a += b; }
  friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) noexcept {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Vec3 operator*(double s, const Vec3& v) noexcept {
    return {s * v.x, s * v.y, s * v.z};
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  constexpr double norm2() const noexcept { return x * x + y * y + z * z; }
  double norm() const noexcept { return std::sqrt(norm2()); }
};

/// Expected per-slot hitting fractions phi_1..phi_eta of a single emission.
struct ChannelResponse {
  std::vector<double> phi;

  std::size_t size() const noexcept { return phi.size(); }
  bool empty() const noexcept { return phi.empty(); }

  /// phi_i with 1-based slot index; slots past the stored memory are 0.
  double at_slot(std::size_t i) const noexcept {
    return (i >= 1 && i <= phi.size()) ? phi[i - 1] : 0.0;
  }

  friend bool operator==(const ChannelResponse&, const ChannelResponse&) = default;
};

/// Throws DomainError unless every phi is in [0,1] and the total is at most 1.
inline void check_channel(const ChannelResponse& channel) {
  double total = 0.0;
  for (std::size_t i = 0; i < channel.phi.size(); ++i) {
    const double p = channel.phi[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("hitting fraction phi_" + std::to_string(i + 1) + " = " +
                        std::to_string(p) + " is outside [0,1]");
    }
    total += p;
  }
  if (total > 1.0 + 1e-12) {
    throw DomainError("hitting fractions sum to " + std::to_string(total) + " > 1");
  }
}

}  // namespace mcvd
