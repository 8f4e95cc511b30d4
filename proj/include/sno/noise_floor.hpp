#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sno {

enum class FloorMode { erosion, dilation };

struct FloorConfig {
  double timeframe_s = 60.0;
  double alpha_f_db = 6.0;
  double n_std = 10.0;
  FloorMode mode = FloorMode::erosion;
  double dilation_divisor_db = 10.0;
  double power_epsilon = 1e-20;

  /// Throws ConfigError on hard violations (timeframe <= 0, n_std < 0, ...).
  void validate() const;
  /// Soft violations, e.g. alpha_f outside 1..10 dB.
  std::vector<std::string> warnings() const;
};

/// Thresholds for one frame, all evaluated at sigma_x2 = p_est_mean.
struct Thresholds {
  double p_thr = 0.0;
  double q_thr = 0.0;
  double p_est_mean = 0.0;
};

/// Sliding window length in frames for the timeframe, forced odd and >= 1.
int floor_window_frames(const FloorConfig& config, int sample_rate, int frame_samples);

/// Centered sliding min (or max) over an odd window, fed one value at a time.
/// Windows are truncated at the stream edges, which is the same as replicating
/// the boundary values. Output i is available once input i + half is pushed;
/// amortized O(1) per sample (monotonic queue).
template <typename Compare>
class CenteredExtremum {
 public:
  explicit CenteredExtremum(int window) : half_(static_cast<std::size_t>(window / 2)) {}

  /// Pushes one value; returns true and sets `out` when an output is ready.
  bool push(double value, double& out) {
    while (!queue_.empty() && !better_(queue_.back().value, value)) queue_.pop_back();
    queue_.push_back({pushed_, value});
    ++pushed_;
    if (pushed_ <= half_) return false;
    out = emit();
    return true;
  }

  /// Flushes outputs for the last `half` inputs.
  std::vector<double> finish() {
    std::vector<double> rest;
    while (emitted_ < pushed_) rest.push_back(emit());
    return rest;
  }

  std::size_t buffered() const { return queue_.size(); }

 private:
  struct Entry {
    std::size_t index;
    double value;
  };

  double emit() {
    const std::size_t j = emitted_++;
    while (queue_.front().index + half_ < j) queue_.pop_front();
    return queue_.front().value;
  }

  std::size_t half_;
  std::size_t pushed_ = 0;
  std::size_t emitted_ = 0;
  std::deque<Entry> queue_;
  Compare better_;
};

// Ties keep the newer entry, so strict comparisons are used for eviction.
using SlidingMin = CenteredExtremum<std::less<double>>;
using SlidingMax = CenteredExtremum<std::greater<double>>;

/// Centered sliding minimum. Throws std::invalid_argument on empty input or an
/// even / non-positive window.
std::vector<double> erode(std::span<const double> powers, int window_frames);

/// Centered sliding maximum, mirror of erode.
std::vector<double> dilate(std::span<const double> powers, int window_frames);

/// P_est from one local extremum: alpha_f * P_min (erosion) or
/// P_max / divisor (dilation), clamped below by power_epsilon.
double floor_from_extremum(double extremum, const FloorConfig& config);

std::vector<double> estimate_floor(std::span<const double> local_extrema, const FloorConfig& config);

/// P_thr = P_est + n_std sigma_P, Q_thr = Q_mean + n_std sigma_Q with the
/// noise statistics evaluated at sigma_x2 = p_est_mean.
Thresholds thresholds_from_floor(double p_est_mean, int frame_samples, int superblock_frames, double n_std);

inline double db_to_power_ratio(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace sno
