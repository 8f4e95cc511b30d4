#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sno/noise_stats.hpp"
#include "sno/rng.hpp"

using namespace sno;

TEST_CASE("frame power") {
  const std::vector<double> f{1.0, -2.0, 3.0, 0.0};
  CHECK(frame_power(f) == doctest::Approx(3.5));
  CHECK_THROWS_AS(frame_power(std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("closed-form power and variance statistics") {
  const NoiseParams p{1.0, 20, 5};
  const PowerStats ps = power_stats(p);
  CHECK(ps.p_mean == doctest::Approx(1.0));
  CHECK(ps.p_var == doctest::Approx(0.1));
  const VarStats vs = var_stats(p);
  CHECK(vs.q_mean == doctest::Approx(0.1));
  CHECK(vs.q_var == doctest::Approx(8.0 * 26 / (8000.0 * 5)));

  const NoiseParams q{4.0, 100, 10};
  CHECK(power_stats(q).p_var == doctest::Approx(2 * 16.0 / 100));
  CHECK(var_stats(q).q_var == doctest::Approx(8.0 * 106 * 256 / (1e6 * 10)));

  CHECK_THROWS_AS(power_stats(NoiseParams{0.0, 20, 5}), std::invalid_argument);
  CHECK_THROWS_AS(var_stats(NoiseParams{1.0, 1, 5}), std::invalid_argument);
}

TEST_CASE("gamma model matches the reference distribution") {
  for (double s2 : {0.25, 1.0, 4.0}) {
    for (int n : {2, 20, 256}) {
      const auto m = GammaPowerModel::from(NoiseParams{s2, n, 4});
      CHECK(m.mean() == doctest::Approx(s2));
      CHECK(m.variance() == doctest::Approx(2 * s2 * s2 / n));
      const boost::math::gamma_distribution<double> ref(n / 2.0, 2 * s2 / n);
      for (double p : {0.1 * s2, 0.5 * s2, s2, 1.7 * s2, 3 * s2}) {
        CHECK(gamma_power_pdf(m, p) == doctest::Approx(boost::math::pdf(ref, p)).epsilon(1e-10));
      }
      CHECK(gamma_power_pdf(m, 0.0) == 0.0);
      CHECK(gamma_power_pdf(m, -1.0) == 0.0);
    }
  }
}

TEST_CASE("ML recursion equals batch formulas") {
  Pcg64 rng(17, 1);
  for (int stream = 0; stream < 50; ++stream) {
    std::vector<double> xs(500);
    for (double& x : xs) x = 3.0 + 2.0 * rng.normal();
    RunningEstimate est = init_ml(xs[0]);
    CHECK(est.var == 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      est = update(est, xs[i]);
      if (i % 97 == 0 || i + 1 == xs.size()) {
        const auto ref = oracle::batch(std::span(xs).first(i + 1));
        CHECK(est.mean == doctest::Approx(ref.mean).epsilon(1e-9));
        CHECK(est.var == doctest::Approx(ref.var).epsilon(1e-9));
      }
    }
    CHECK(est.n == 500);
  }
}

TEST_CASE("MAP recursion equals the phantom-sample batch") {
  Pcg64 rng(23, 1);
  struct Prior {
    double mean, var;
    long nm, nv;
  };
  for (const Prior pr : {Prior{0.0, 1.0, 10, 10}, Prior{5.0, 0.2, 3, 40}, Prior{-1.0, 9.0, 100, 1}, Prior{2.0, 0.0, 1, 5}}) {
    CAPTURE(pr.nm);
    CAPTURE(pr.nv);
    std::vector<double> xs(400);
    for (double& x : xs) x = 1.0 + 1.5 * rng.normal();
    RunningEstimate est = init_map(pr.mean, pr.var, pr.nm, pr.nv);
    CHECK(est.mean == pr.mean);
    CHECK(est.var == pr.var);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      est = update(est, xs[i]);
      const auto ref = oracle::map_batch(pr.mean, pr.var, pr.nm, pr.nv, std::span(xs).first(i + 1));
      CHECK(est.mean == doctest::Approx(ref.mean).epsilon(1e-9));
      CHECK(est.var == doctest::Approx(ref.var).epsilon(1e-9));
    }
  }
}

TEST_CASE("MAP estimates approach ML with many observations") {
  Pcg64 rng(29, 1);
  RunningEstimate map = init_map(100.0, 50.0, 5, 5);
  std::vector<double> xs(200000);
  for (double& x : xs) x = rng.normal();
  RunningEstimate ml = init_ml(xs[0]);
  map = update(map, xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    ml = update(ml, xs[i]);
    map = update(map, xs[i]);
  }
  CHECK(std::abs(map.mean - ml.mean) < 5e-3);
  CHECK(std::abs(map.var - ml.var) < 0.3);
}

TEST_CASE("recursion argument checks") {
  CHECK_THROWS_AS(init_map(0.0, -1.0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_map(0.0, 1.0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_map(0.0, 1.0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(update(init_ml(1.0), std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(update(init_ml(1.0), INFINITY), std::invalid_argument);
}
