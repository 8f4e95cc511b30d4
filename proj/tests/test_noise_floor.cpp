#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sno/error.hpp"
#include "sno/noise_floor.hpp"
#include "sno/noise_stats.hpp"
#include "sno/rng.hpp"

using namespace sno;

namespace {

std::vector<double> random_powers(std::size_t n, std::uint64_t seed) {
  Pcg64 rng(seed, 7);
  std::vector<double> x(n);
  for (double& v : x) v = rng.exponential(1.0);
  return x;
}

}  // namespace

TEST_CASE("erosion and dilation examples") {
  const std::vector<double> x{5, 4, 3, 6, 7};
  CHECK(erode(x, 3) == std::vector<double>{4, 3, 3, 3, 6});
  CHECK(dilate(x, 3) == std::vector<double>{5, 5, 6, 7, 7});
  CHECK(erode(x, 1) == x);
  CHECK(erode(x, 99) == std::vector<double>(5, 3));
}

TEST_CASE("sliding extrema match the brute-force window") {
  for (int w : {1, 3, 5, 11, 31, 101, 1001}) {
    CAPTURE(w);
    const auto x = random_powers(700, static_cast<std::uint64_t>(w));
    CHECK(erode(x, w) == oracle::extremum(x, w, true));
    CHECK(dilate(x, w) == oracle::extremum(x, w, false));
  }
  std::vector<double> ties(50, 2.0);
  ties[10] = 1.0;
  ties[11] = 1.0;
  CHECK(erode(ties, 7) == oracle::extremum(ties, 7, true));
}

TEST_CASE("morphological identities") {
  const auto x = random_powers(500, 3);
  std::vector<double> neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
  for (int w : {3, 9, 25}) {
    const auto d = dilate(x, w);
    const auto e = erode(neg, w);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(d[i] == -e[i]);
    CHECK(erode(erode(x, w), w) == erode(x, 2 * w - 1));
    const auto er = erode(x, w);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(er[i] <= x[i]);
  }
}

TEST_CASE("streaming extremum equals the batch one") {
  const auto x = random_powers(300, 4);
  SlidingMin m(21);
  std::vector<double> out;
  double v = 0.0;
  for (double p : x) {
    if (m.push(p, v)) out.push_back(v);
  }
  CHECK(out.size() == x.size() - 10);
  for (double r : m.finish()) out.push_back(r);
  CHECK(out == erode(x, 21));
}

TEST_CASE("extremum argument checks") {
  const std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(erode(x, 2), std::invalid_argument);
  CHECK_THROWS_AS(dilate(x, 0), std::invalid_argument);
  CHECK_THROWS_AS(erode(std::span<const double>{}, 3), std::invalid_argument);
}

TEST_CASE("floor window length") {
  FloorConfig c;
  CHECK(floor_window_frames(c, 8000, 256) == 1875);
  CHECK(floor_window_frames(c, 8000, 1024) == 469);
  c.timeframe_s = 64 * 256 / 8000.0;
  CHECK(floor_window_frames(c, 8000, 256) == 65);
  c.timeframe_s = 1e-6;
  CHECK(floor_window_frames(c, 8000, 256) == 1);
}

TEST_CASE("floor from the local extremum") {
  FloorConfig c;
  CHECK(floor_from_extremum(1.0, c) == doctest::Approx(std::pow(10.0, 0.6)));
  c.mode = FloorMode::dilation;
  CHECK(floor_from_extremum(10.0, c) == doctest::Approx(1.0));
  c.mode = FloorMode::erosion;
  CHECK(floor_from_extremum(0.0, c) == c.power_epsilon);
  const std::vector<double> mins{1.0, 2.0};
  const auto f = estimate_floor(mins, c);
  CHECK(f[1] == doctest::Approx(2 * std::pow(10.0, 0.6)));
  CHECK(db_to_power_ratio(10.0) == doctest::Approx(10.0));
}

TEST_CASE("threshold worked example") {
  const Thresholds t = thresholds_from_floor(1.0, 100, 10, 3.0);
  CHECK(t.p_thr == doctest::Approx(1.42426).epsilon(1e-5));
  CHECK(t.q_thr == doctest::Approx(0.04763).epsilon(1e-4));
  CHECK(t.p_est_mean == 1.0);
}

TEST_CASE("threshold scaling laws") {
  for (double c : {0.01, 0.1, 10.0, 1000.0}) {
    const Thresholds a = thresholds_from_floor(0.7, 256, 4, 2.5);
    const Thresholds b = thresholds_from_floor(0.7 * c, 256, 4, 2.5);
    CHECK(b.p_thr == doctest::Approx(c * a.p_thr).epsilon(1e-12));
    CHECK(b.q_thr == doctest::Approx(c * c * a.q_thr).epsilon(1e-12));
  }
  const Thresholds lo = thresholds_from_floor(1.0, 256, 4, 1.0);
  const Thresholds hi = thresholds_from_floor(1.0, 256, 4, 2.0);
  CHECK(hi.p_thr > lo.p_thr);
  CHECK(hi.q_thr > lo.q_thr);
  const Thresholds zero = thresholds_from_floor(1.0, 256, 4, 0.0);
  CHECK(zero.p_thr == 1.0);
  CHECK(zero.q_thr == doctest::Approx(var_stats({1.0, 256, 4}).q_mean));
}

TEST_CASE("floor configuration checks") {
  FloorConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.warnings().empty());
  c.alpha_f_db = 12.0;
  CHECK(c.warnings().size() == 1);
  c.n_std = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FloorConfig{};
  c.timeframe_s = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
