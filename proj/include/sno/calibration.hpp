#pragma once

#include <optional>

namespace sno {

/// Prior odds O(T) = P(T) / P(not T) used when training, and the odds the
/// scores should reflect when deployed.
struct OddsSpec {
  double train_odds = 1.0;
  double deploy_odds = 1.0;

  /// Throws std::invalid_argument unless both odds are positive and finite.
  void validate() const;
};

/// 1 / (1 + exp(-x)) without overflow for large |x|.
double sigmoid(double x);

/// log(p / (1 - p)).
double logit(double p);

/// Posterior from log-likelihood ratio and log prior odds:
/// 1 / (1 + exp(-(llr + log_odds))). Throws std::invalid_argument on
/// non-finite input.
double posterior_from_llr(double llr, double log_odds);

/// LR * O = p / (1 - p). Throws std::domain_error unless 0 < p < 1.
double lr_odds_product(double posterior);

/// Shifts the posterior's log-odds by log(deploy_odds) - log(train_odds).
/// Throws std::domain_error unless 0 < p < 1; when `clamp_eps` is set, inputs
/// are first clamped to [eps, 1 - eps] instead.
double recalibrate(double posterior, const OddsSpec& odds, std::optional<double> clamp_eps = std::nullopt);

}  // namespace sno
