#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace sno {

/// PCG64 (XSL-RR 128/64) generator, as in the reference pcg64 engine.
///
/// Seeding follows the reference `pcg64(seed, stream)` constructor, so the
/// same (seed, stream) pair yields the same sequence on every platform.
/// Independent streams of one seed are selected with `stream`; the synthetic
/// scenario generator uses fixed stream ids per component (see synth.hpp).
class Pcg64 {
 public:
  using result_type = std::uint64_t;

  explicit Pcg64(std::uint64_t seed = 0x853c49e6748fea9bULL, std::uint64_t stream = 0xda3e39cb94b95bdbULL)
      : inc_((static_cast<u128>(stream) << 1) | 1U) {
    step();
    state_ += seed;
    step();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    step();
    const auto hi = static_cast<std::uint64_t>(state_ >> 64);
    const auto lo = static_cast<std::uint64_t>(state_);
    const unsigned rot = static_cast<unsigned>(state_ >> 122);
    const std::uint64_t xsl = hi ^ lo;
    return (xsl >> rot) | (xsl << ((64U - rot) & 63U));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal deviate (Marsaglia polar method). std::normal_distribution
  /// is implementation-defined, so it is not used for reproducible data.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  /// Exponential deviate with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  using u128 = unsigned __int128;

  static constexpr u128 kMultiplier =
      (static_cast<u128>(0x2360ED051FC65DA4ULL) << 64) | 0x4385DF649FCCF645ULL;

  void step() { state_ = state_ * kMultiplier + inc_; }

  u128 state_ = 0;
  u128 inc_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sno
