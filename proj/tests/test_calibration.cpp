#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sno/calibration.hpp"
#include "sno/rng.hpp"

using namespace sno;

TEST_CASE("recalibration worked example") {
  CHECK(std::abs(recalibrate(0.5, {1.0, 1.0 / 19.0}) - 0.05) < 1e-12);
  CHECK(std::abs(posterior_from_llr(0.0, std::log(1.0 / 19.0)) - 0.05) < 1e-12);
  CHECK(recalibrate(0.3, {2.0, 2.0}) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("sigmoid and logit") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(std::isfinite(sigmoid(-800.0)));
  CHECK(sigmoid(-40.0) > 0.0);
  for (double p : {1e-12, 0.01, 0.3, 0.5, 0.9, 1 - 1e-9}) CHECK(sigmoid(logit(p)) == doctest::Approx(p).epsilon(1e-12));
  CHECK(logit(0.5) == 0.0);
}

TEST_CASE("likelihood-ratio odds product") {
  CHECK(lr_odds_product(0.75) == doctest::Approx(3.0));
  CHECK(lr_odds_product(0.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(lr_odds_product(0.0), std::domain_error);
  CHECK_THROWS_AS(lr_odds_product(1.0), std::domain_error);
}

TEST_CASE("recalibration domain and clamping") {
  const OddsSpec o{1.0, 1.0 / 19};
  CHECK_THROWS_AS(recalibrate(0.0, o), std::domain_error);
  CHECK_THROWS_AS(recalibrate(1.0, o), std::domain_error);
  CHECK_THROWS_AS(recalibrate(1.5, o), std::domain_error);
  CHECK(recalibrate(1.0, o, 1e-6) == doctest::Approx(recalibrate(1 - 1e-6, o)));
  CHECK(recalibrate(0.0, o, 1e-6) == doctest::Approx(recalibrate(1e-6, o)));
  CHECK_THROWS_AS(recalibrate(0.5, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(recalibrate(0.5, {1.0, -2.0}), std::invalid_argument);
  CHECK_THROWS_AS(posterior_from_llr(NAN, 0.0), std::invalid_argument);
}

TEST_CASE("recalibration composes and preserves ranking") {
  Pcg64 rng(9, 1);
  std::vector<double> p(2000);
  for (double& v : p) v = rng.uniform(1e-6, 1 - 1e-6);
  std::sort(p.begin(), p.end());
  const OddsSpec ab{1.0, 0.2};
  const OddsSpec bc{0.2, 3.0};
  const OddsSpec ac{1.0, 3.0};
  double prev = -1.0;
  for (double v : p) {
    const double r = recalibrate(v, ab);
    CHECK(r <= v);
    CHECK(r >= prev);
    prev = r;
    CHECK(recalibrate(r, bc) == doctest::Approx(recalibrate(v, ac)).epsilon(1e-10));
  }
}
