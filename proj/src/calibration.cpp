#include "sno/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sno {

void OddsSpec::validate() const {
  const auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(train_odds) || !ok(deploy_odds)) throw std::invalid_argument("odds must be positive and finite");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("posterior must lie strictly between 0 and 1");
}

}  // namespace

double logit(double p) {
  check_probability(p);
  return std::log(p) - std::log1p(-p);
}

double posterior_from_llr(double llr, double log_odds) {
  if (!std::isfinite(llr) || !std::isfinite(log_odds)) throw std::invalid_argument("non-finite score");
  return sigmoid(llr + log_odds);
}

double lr_odds_product(double posterior) {
  check_probability(posterior);
  return posterior / (1.0 - posterior);
}

double recalibrate(double posterior, const OddsSpec& odds, std::optional<double> clamp_eps) {
  odds.validate();
  if (clamp_eps) {
    if (!(*clamp_eps > 0.0 && *clamp_eps < 0.5)) throw std::invalid_argument("clamp epsilon must be in (0, 0.5)");
    if (std::isnan(posterior)) throw std::domain_error("posterior is NaN");
    posterior = std::clamp(posterior, *clamp_eps, 1.0 - *clamp_eps);
  }
  check_probability(posterior);
  if (odds.train_odds == odds.deploy_odds) return posterior;
  const double bias = std::log(odds.deploy_odds) - std::log(odds.train_odds);
  return sigmoid(logit(posterior) + bias);
}

}  // namespace sno
