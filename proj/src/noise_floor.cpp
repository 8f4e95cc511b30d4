#include "sno/noise_floor.hpp"

#include <cmath>
#include <stdexcept>

#include "sno/error.hpp"
#include "sno/noise_stats.hpp"

namespace sno {

void FloorConfig::validate() const {
  if (!(timeframe_s > 0.0)) throw ConfigError("timeframe_s must be positive");
  if (!(n_std >= 0.0) || !std::isfinite(n_std)) throw ConfigError("n_std must be finite and >= 0");
  if (!std::isfinite(alpha_f_db)) throw ConfigError("alpha_f_db must be finite");
  if (!std::isfinite(dilation_divisor_db)) throw ConfigError("dilation_divisor_db must be finite");
  if (!(power_epsilon > 0.0)) throw ConfigError("power_epsilon must be positive");
}

std::vector<std::string> FloorConfig::warnings() const {
  std::vector<std::string> w;
  if (mode == FloorMode::erosion && (alpha_f_db < 1.0 || alpha_f_db > 10.0)) {
    w.push_back("alpha_f_db outside the usual 1..10 dB range");
  }
  return w;
}

int floor_window_frames(const FloorConfig& config, int sample_rate, int frame_samples) {
  const double frames = config.timeframe_s * sample_rate / frame_samples;
  auto w = static_cast<long long>(std::llround(frames));
  if (w < 1) w = 1;
  if (w % 2 == 0) ++w;
  return static_cast<int>(w);
}

namespace {

template <typename Filter>
std::vector<double> run_filter(std::span<const double> powers, int window) {
  if (powers.empty()) throw std::invalid_argument("morphological filter of an empty sequence");
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("window must be odd and >= 1");
  Filter filter(window);
  std::vector<double> out;
  out.reserve(powers.size());
  double v = 0.0;
  for (double p : powers) {
    if (filter.push(p, v)) out.push_back(v);
  }
  for (double r : filter.finish()) out.push_back(r);
  return out;
}

}  // namespace

std::vector<double> erode(std::span<const double> powers, int window_frames) {
  return run_filter<SlidingMin>(powers, window_frames);
}

std::vector<double> dilate(std::span<const double> powers, int window_frames) {
  return run_filter<SlidingMax>(powers, window_frames);
}

double floor_from_extremum(double extremum, const FloorConfig& config) {
  const double est = config.mode == FloorMode::erosion
                         ? db_to_power_ratio(config.alpha_f_db) * extremum
                         : extremum / db_to_power_ratio(config.dilation_divisor_db);
  return est < config.power_epsilon ? config.power_epsilon : est;
}

std::vector<double> estimate_floor(std::span<const double> local_extrema, const FloorConfig& config) {
  std::vector<double> out;
  out.reserve(local_extrema.size());
  for (double e : local_extrema) out.push_back(floor_from_extremum(e, config));
  return out;
}

Thresholds thresholds_from_floor(double p_est_mean, int frame_samples, int superblock_frames, double n_std) {
  if (!(p_est_mean > 0.0)) throw std::invalid_argument("p_est_mean must be positive");
  const NoiseParams params{p_est_mean, frame_samples, superblock_frames};
  const PowerStats ps = power_stats(params);
  const VarStats vs = var_stats(params);
  return {ps.p_mean + n_std * std::sqrt(ps.p_var), vs.q_mean + n_std * std::sqrt(vs.q_var), p_est_mean};
}

}  // namespace sno
