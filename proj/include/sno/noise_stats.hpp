#pragma once

#include <cstdint>
#include <span>

namespace sno {

/// Stationary Gaussian noise model: amplitude variance, samples per frame (N)
/// and frames per superblock (K).
struct NoiseParams {
  double sigma_x2 = 1.0;
  int frame_samples = 1024;
  int superblock_frames = 8;

  /// Throws std::invalid_argument unless sigma_x2 > 0, N >= 2 and K >= 2.
  void validate() const;
};

/// Gamma law of the frame power estimate: shape b = N/2, rate a = N/(2 sigma_x2).
struct GammaPowerModel {
  double shape = 0.0;
  double rate = 0.0;

  static GammaPowerModel from(const NoiseParams& params);

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
};

struct PowerStats {
  double p_mean = 0.0;
  double p_var = 0.0;
};

struct VarStats {
  double q_mean = 0.0;
  double q_var = 0.0;
};

/// Mean of squared samples. Throws std::invalid_argument on an empty frame.
double frame_power(std::span<const double> frame);

/// Expected frame power and its variance: (sigma_x2, 2 sigma_x2^2 / N).
PowerStats power_stats(const NoiseParams& params);

/// Expected power variance over K frames and the variance of that estimate:
/// (2 sigma_x2^2 / N, 8 (N + 6) sigma_x2^4 / (N^3 K)).
VarStats var_stats(const NoiseParams& params);

/// Gamma density a^b p^(b-1) e^(-a p) / Gamma(b) for p > 0, else 0.
double gamma_power_pdf(const GammaPowerModel& model, double p);

/// Recursive mean/variance state.
///
/// With zero prior counts this is the plain ML recursion (m_1 = x_1,
/// var_1 = 0). With prior counts it is the MAP form: the recursion continues
/// from prior_count phantom observations that carry the prior moments. The
/// mean and the variance keep separate counts; the variance recursion tracks
/// its own centre with count prior_count_var + n, which coincides with `mean`
/// whenever the two counts are equal.
struct RunningEstimate {
  std::int64_t n = 0;  // real observations
  double mean = 0.0;
  double var = 0.0;
  std::int64_t prior_count_mean = 0;
  std::int64_t prior_count_var = 0;
  double var_center = 0.0;

  std::int64_t mean_count() const { return prior_count_mean + n; }
  std::int64_t var_count() const { return prior_count_var + n; }
};

/// Mean step for the next observation (count mean_count() + 1). Does not
/// advance `n`; use `update` for the joint step.
RunningEstimate update_mean(RunningEstimate est, double x);

/// Variance step for the next observation (count var_count() + 1):
/// var_k = (k-2)/(k-1) var_{k-1} + k/(k-1)^2 (x - m_k)^2, m_k updated first.
RunningEstimate update_var(RunningEstimate est, double x);

/// update_mean, then update_var, then ++n.
RunningEstimate update(RunningEstimate est, double x);

/// ML state after one observation.
RunningEstimate init_ml(double first);

/// MAP state carrying phantom samples. Throws std::invalid_argument on a
/// negative prior variance or a count below one.
RunningEstimate init_map(double prior_mean, double prior_var, std::int64_t prior_count_mean,
                         std::int64_t prior_count_var);

}  // namespace sno
