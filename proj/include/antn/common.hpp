#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace antn {

using Complex = std::complex<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad run configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-finite values, non-convergence (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File or stream failure (CLI exit code 4).
class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// xoshiro256** generator with an explicit 32-byte state so that streams can
/// be serialized and derived deterministically. normal() draws a fresh
/// Box-Muller pair every call (no cached spare), keeping the state the sole
/// source of randomness.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) s = detail::splitmix64(sm);
  }

  /// Independent stream keyed by (seed, a, b); used for per-sample batches.
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t sm = seed ^ (a * 0x9e3779b97f4a7c15ull) ^
                       (b * 0xd1b54a32d192ed03ull);
    Rng r;
    for (auto& s : r.state_) s = detail::splitmix64(sm);
    return r;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; one value per two uniforms.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Bernoulli draw: true with probability p.
  bool bernoulli(double p) { return uniform() < p; }

  const std::uint64_t* state() const { return state_; }
  void set_state(const std::uint64_t s[4]) {
    for (int i = 0; i < 4; ++i) state_[i] = s[i];
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace antn
