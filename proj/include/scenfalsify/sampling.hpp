#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "scenfalsify/error.hpp"
#include "scenfalsify/scenario.hpp"

namespace scenfalsify {

/// SplitMix64 (Steele, Lea, Flood), used for seeding and seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mixes a stream index into a base seed; distinct streams are decorrelated.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (stream * 0xd1b54a32d192ed03ULL);
  splitmix64(s);
  return splitmix64(s);
}

/// xoshiro256** 1.0 (Blackman & Vigna). Output is identical on every platform,
/// unlike the distributions in <random>.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Van der Corput radical inverse of `index` in `base`.
inline double radical_inverse(std::uint64_t index, unsigned base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return result;
}

/// First `k` primes, used as Halton bases per coordinate.
inline std::vector<unsigned> first_primes(std::size_t k) {
  std::vector<unsigned> primes;
  for (unsigned n = 2; primes.size() < k; ++n) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(n);
  }
  return primes;
}

struct ParamVector {
  std::vector<double> values;
  std::int64_t case_id = 0;
  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

enum class SamplerStrategy { uniform_random, halton };

inline std::string_view to_string(SamplerStrategy s) {
  return s == SamplerStrategy::halton ? "halton" : "uniform";
}

inline SamplerStrategy parse_sampler_strategy(std::string_view s) {
  if (s == "uniform" || s == "uniform-random") return SamplerStrategy::uniform_random;
  if (s == "halton") return SamplerStrategy::halton;
  throw Error("unknown sampler '" + std::string(s) + "' (expected uniform or halton)");
}

struct SamplerConfig {
  SamplerStrategy strategy = SamplerStrategy::uniform_random;
  std::uint64_t seed = 0;
  std::int64_t count = 1;
};

/// Affine map of a unit coordinate into an axis.
inline double map_unit(const ParamAxis& axis, double u) {
  double v = axis.lo + u * (axis.hi - axis.lo);
  return v > axis.hi ? axis.hi : v;
}

/// Draws cfg.count vectors inside the box, case ids 1..count. The Halton
/// stream starts at index 1 and skips nothing; the seed only affects the
/// uniform-random strategy.
inline std::vector<ParamVector> sample(const ParamSpace& space, const SamplerConfig& cfg) {
  if (cfg.count < 1) throw Error("sample count must be at least 1");
  std::vector<ParamVector> out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  Xoshiro256 rng(cfg.seed);
  auto bases = first_primes(space.size());
  for (std::int64_t i = 0; i < cfg.count; ++i) {
    ParamVector pv;
    pv.case_id = i + 1;
    pv.values.reserve(space.size());
    for (std::size_t d = 0; d < space.size(); ++d) {
      double u = cfg.strategy == SamplerStrategy::halton
                     ? radical_inverse(static_cast<std::uint64_t>(i + 1), bases[d])
                     : rng.uniform01();
      pv.values.push_back(map_unit(space[d], u));
    }
    out.push_back(std::move(pv));
  }
  return out;
}

}  // namespace scenfalsify
