#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace channelcf {

// Identity string recorded in every report so results can be tied to the
// exact generator. mt19937_64 is fully specified by the standard; the
// bounded draw below avoids std::uniform_int_distribution, whose output
// is implementation-defined.
inline constexpr std::string_view kRngIdentity =
    "mt19937_64(splitmix64(seed,stream))/lemire-bounded";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  // Distinct streams (e.g. run indices) under the same seed give
  // statistically independent sequences.
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

  std::uint64_t next() { return engine_(); }

  // Unbiased uniform draw in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t bounded(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = -n % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform in [0, 1) with 53 random bits.
  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [-spread, spread].
  double symmetric(double spread) { return (2.0 * real() - 1.0) * spread; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace channelcf
