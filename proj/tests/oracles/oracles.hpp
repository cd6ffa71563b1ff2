#pragma once

// Reference implementations used only by tests. Nothing here includes or
// calls production code: each oracle is a direct, slow, definitional
// computation.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

inline constexpr int kMaxBruteForceN = 60;

/// Exact C(n, k) in 64-bit integers; exact for n <= 60 with no overflow.
inline std::uint64_t choose_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    // c = C(n-k+i-1, i-1); the product stays below 2^63 for n <= 60.
    c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return c;
}

/// P(B(n, p) <= x) by term-by-term summation with exact coefficients,
/// accumulated in long double. Rejects n > 60.
inline double binom_cdf_bruteforce(int n, double p, int x) {
  if (n < 0 || n > kMaxBruteForceN) throw std::invalid_argument("binom_cdf_bruteforce: n must be 0..60");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binom_cdf_bruteforce: p outside [0,1]");
  if (x < 0) return 0.0;
  if (x >= n) return 1.0;
  long double sum = 0.0L;
  const long double pl = p;
  const long double ql = 1.0L - pl;
  for (int j = 0; j <= x; ++j) {
    sum += static_cast<long double>(choose_u64(n, j)) * std::pow(pl, j) * std::pow(ql, n - j);
  }
  return static_cast<double>(sum);
}

/// Same sum with arbitrary-size integer coefficients and 50-digit floats,
/// for n beyond the 64-bit guard.
inline double binom_cdf_bruteforce_wide(int n, double p, int x) {
  using boost::multiprecision::cpp_bin_float_50;
  using boost::multiprecision::cpp_int;
  if (n < 0) throw std::invalid_argument("binom_cdf_bruteforce_wide: n must be >= 0");
  if (x < 0) return 0.0;
  if (x >= n) return 1.0;
  cpp_bin_float_50 sum = 0;
  const cpp_bin_float_50 pl = p;
  const cpp_bin_float_50 ql = 1 - pl;
  cpp_int coef = 1;
  for (int j = 0; j <= x; ++j) {
    if (j > 0) coef = coef * (n - j + 1) / j;
    sum += cpp_bin_float_50(coef) * pow(pl, j) * pow(ql, n - j);
  }
  return static_cast<double>(sum);
}

/// P(Poisson(lambda) <= k) by direct summation of e^-l l^j / j! in 50 digits.
inline double poisson_cdf_direct(int k, double lambda) {
  using boost::multiprecision::cpp_bin_float_50;
  if (lambda < 0.0) throw std::invalid_argument("poisson_cdf_direct: lambda < 0");
  if (k < 0) return 0.0;
  const cpp_bin_float_50 l = lambda;
  cpp_bin_float_50 term = exp(-l);
  cpp_bin_float_50 sum = term;
  for (int j = 1; j <= k; ++j) {
    term = term * l / j;
    sum += term;
  }
  return static_cast<double>(sum);
}

/// Standard normal upper tail from the C library erfc.
inline double normal_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Expected fraction of molecules absorbed by time t without drift, point
/// source at center distance r0 from a sphere of radius rr.
inline double nodrift_hit_fraction(double rr, double r0, double D, double t) {
  if (!(rr > 0.0) || !(r0 > rr) || !(D > 0.0)) {
    throw std::invalid_argument("nodrift_hit_fraction: need r0 > rr > 0 and D > 0");
  }
  if (!(t > 0.0)) throw std::invalid_argument("nodrift_hit_fraction: t must be > 0");
  if (std::isinf(t)) return rr / r0;
  return rr / r0 * std::erfc((r0 - rr) / std::sqrt(4.0 * D * t));
}

inline constexpr std::int64_t kMaxEnumeratedStates = 1000000;

/// Exact CDF of a sum of independent binomials (amounts[k], phis[k]) by
/// enumerating every joint outcome. Returns F(0..sum amounts).
inline std::vector<double> sum_binom_enumerate(const std::vector<int>& amounts,
                                               const std::vector<double>& phis) {
  if (amounts.size() != phis.size()) throw std::invalid_argument("sum_binom_enumerate: size mismatch");
  std::int64_t states = 1;
  int total = 0;
  for (int n : amounts) {
    if (n < 0 || n > 10) throw std::invalid_argument("sum_binom_enumerate: amounts must be 0..10");
    states *= n + 1;
    total += n;
    if (states > kMaxEnumeratedStates) {
      throw std::invalid_argument("sum_binom_enumerate: state space exceeds 1e6");
    }
  }
  std::vector<double> pmf(static_cast<std::size_t>(total) + 1, 0.0);
  for (std::int64_t s = 0; s < states; ++s) {
    std::int64_t rest = s;
    long double prob = 1.0L;
    int count = 0;
    for (std::size_t k = 0; k < amounts.size(); ++k) {
      const int n = amounts[k];
      const int j = static_cast<int>(rest % (n + 1));
      rest /= n + 1;
      prob *= static_cast<long double>(choose_u64(n, j)) * std::pow(static_cast<long double>(phis[k]), j) *
              std::pow(1.0L - phis[k], n - j);
      count += j;
    }
    pmf[static_cast<std::size_t>(count)] += static_cast<double>(prob);
  }
  std::vector<double> cdf(pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) cdf[i] = (acc += pmf[i]);
  return cdf;
}

/// Binomial PMF by the ratio recurrence in 50-digit floats.
inline std::vector<double> binom_pmf_recurrence(int n, double p) {
  using boost::multiprecision::cpp_bin_float_50;
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf[static_cast<std::size_t>(n)] = 1.0;
    return pmf;
  }
  const cpp_bin_float_50 pp = p;
  const cpp_bin_float_50 q = 1 - pp;
  cpp_bin_float_50 term = pow(q, n);
  for (int j = 0; j <= n; ++j) {
    pmf[static_cast<std::size_t>(j)] = static_cast<double>(term);
    term = term * (n - j) / (j + 1) * pp / q;
  }
  return pmf;
}

enum class Model { binomial, poisson, gaussian };

/// P(count <= x) when the current slot receives contributions from emissions
/// amounts[k] (oldest first) with hitting probabilities phis_for[k].
inline double mixture_cdf(Model model, const std::vector<int>& amounts,
                          const std::vector<double>& phis_for, int x) {
  double mean = 0.0;
  double var = 0.0;
  for (std::size_t k = 0; k < amounts.size(); ++k) {
    mean += amounts[k] * phis_for[k];
    var += amounts[k] * phis_for[k] * (1.0 - phis_for[k]);
  }
  if (x < 0) return 0.0;
  if (mean == 0.0) return 1.0;
  switch (model) {
    case Model::poisson: return poisson_cdf_direct(x, mean);
    case Model::gaussian: return 1.0 - normal_tail((x - mean) / std::sqrt(var));
    case Model::binomial: {
      std::vector<double> pmf{1.0};
      for (std::size_t k = 0; k < amounts.size(); ++k) {
        const auto b = binom_pmf_recurrence(amounts[k], phis_for[k]);
        std::vector<double> next(pmf.size() + b.size() - 1, 0.0);
        for (std::size_t i = 0; i < pmf.size(); ++i) {
          for (std::size_t j = 0; j < b.size(); ++j) next[i + j] += pmf[i] * b[j];
        }
        pmf = std::move(next);
      }
      double acc = 0.0;
      for (std::size_t i = 0; i < pmf.size() && static_cast<int>(i) <= x; ++i) acc += pmf[i];
      return std::min(acc, 1.0);
    }
  }
  return 0.0;
}

/// Average BCSK error probability at threshold xi by explicit enumeration of
/// all (eta + 1)-bit patterns. phi[0] is the current-slot hitting fraction,
/// phi[k] the fraction k slots after emission.
inline double mixture_error(Model model, int eta, double prior, int n0, int n1,
                            const std::vector<double>& phi, int xi) {
  double pe = 0.0;
  const int patterns = 1 << (eta + 1);
  for (int mask = 0; mask < patterns; ++mask) {
    // Bit j of mask is the symbol sent j slots before the current one.
    double weight = 1.0;
    std::vector<int> amounts;
    std::vector<double> phis_for;
    for (int j = eta; j >= 0; --j) {
      const bool one = (mask >> j) & 1;
      weight *= one ? prior : 1.0 - prior;
      amounts.push_back(one ? n1 : n0);
      phis_for.push_back(static_cast<std::size_t>(j) < phi.size() ? phi[static_cast<std::size_t>(j)] : 0.0);
    }
    if (weight == 0.0) continue;
    const bool current = mask & 1;
    const double f = mixture_cdf(model, amounts, phis_for, xi);
    pe += weight * (current ? f : 1.0 - f);
  }
  return pe;
}

}  // namespace oracle
