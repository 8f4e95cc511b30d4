#include "sno/noise_stats.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace sno {

void NoiseParams::validate() const {
  if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2)) {
    throw std::invalid_argument("sigma_x2 must be positive and finite");
  }
  if (frame_samples < 2) throw std::invalid_argument("frame_samples must be >= 2");
  if (superblock_frames < 2) throw std::invalid_argument("superblock_frames must be >= 2");
}

GammaPowerModel GammaPowerModel::from(const NoiseParams& params) {
  params.validate();
  const double n = params.frame_samples;
  return {n / 2.0, n / (2.0 * params.sigma_x2)};
}

double frame_power(std::span<const double> frame) {
  if (frame.empty()) throw std::invalid_argument("frame_power of an empty frame");
  double acc = 0.0;
  for (double x : frame) acc += x * x;
  return acc / static_cast<double>(frame.size());
}

PowerStats power_stats(const NoiseParams& params) {
  const auto model = GammaPowerModel::from(params);
  return {model.mean(), model.variance()};
}

VarStats var_stats(const NoiseParams& params) {
  params.validate();
  const double n = params.frame_samples;
  const double k = params.superblock_frames;
  const double s4 = params.sigma_x2 * params.sigma_x2;
  return {2.0 * s4 / n, 8.0 * (n + 6.0) * s4 * s4 / (n * n * n * k)};
}

double gamma_power_pdf(const GammaPowerModel& model, double p) {
  if (!(p > 0.0)) return 0.0;
  const double b = model.shape;
  const double a = model.rate;
  return std::exp(b * std::log(a) + (b - 1.0) * std::log(p) - a * p - std::lgamma(b));
}

RunningEstimate update_mean(RunningEstimate est, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite observation");
  const std::int64_t k = est.mean_count() + 1;
  if (k == 1) {
    est.mean = x;
  } else {
    est.mean += (x - est.mean) / static_cast<double>(k);
  }
  return est;
}

RunningEstimate update_var(RunningEstimate est, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite observation");
  const std::int64_t k = est.var_count() + 1;
  if (k == 1) {
    est.var_center = x;
    est.var = 0.0;
    return est;
  }
  const double kd = static_cast<double>(k);
  est.var_center += (x - est.var_center) / kd;
  const double d = x - est.var_center;
  double v = (kd - 2.0) / (kd - 1.0) * est.var + kd / ((kd - 1.0) * (kd - 1.0)) * d * d;
  assert(v >= -1e-15);
  est.var = v < 0.0 ? 0.0 : v;
  return est;
}

RunningEstimate update(RunningEstimate est, double x) {
  est = update_mean(est, x);
  est = update_var(est, x);
  ++est.n;
  return est;
}

RunningEstimate init_ml(double first) { return update(RunningEstimate{}, first); }

RunningEstimate init_map(double prior_mean, double prior_var, std::int64_t prior_count_mean,
                         std::int64_t prior_count_var) {
  if (!std::isfinite(prior_mean) || !std::isfinite(prior_var)) {
    throw std::invalid_argument("non-finite prior");
  }
  if (prior_var < 0.0) throw std::invalid_argument("negative prior variance");
  if (prior_count_mean < 1 || prior_count_var < 1) {
    throw std::invalid_argument("phantom sample counts must be >= 1");
  }
  RunningEstimate est;
  est.mean = prior_mean;
  est.var = prior_var;
  est.var_center = prior_mean;
  est.prior_count_mean = prior_count_mean;
  est.prior_count_var = prior_count_var;
  return est;
}

}  // namespace sno
