#include <doctest.h>

#include <cmath>
#include <vector>

#include "sno/error.hpp"
#include "sno/rng.hpp"
#include "sno/synth.hpp"

using namespace sno;

namespace {

double variance(std::span<const double> x) {
  long double s = 0, ss = 0;
  for (double v : x) s += v;
  const long double m = s / x.size();
  for (double v : x) ss += (v - m) * (v - m);
  return static_cast<double>(ss / x.size());
}

double kurtosis(std::span<const double> x) {
  long double s = 0, m2 = 0, m4 = 0;
  for (double v : x) s += v;
  const long double m = s / x.size();
  for (double v : x) {
    const long double d = v - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= x.size();
  m4 /= x.size();
  return static_cast<double>(m4 / (m2 * m2));
}

}  // namespace

TEST_CASE("pcg64 reference sequence") {
  Pcg64 rng(42, 54);
  CHECK(rng() == 0x86b1da1d72062b68ULL);
  CHECK(rng() == 0x1304aa46c9853d39ULL);
  CHECK(rng() == 0xa3670e9e0dd50358ULL);
  CHECK(rng() == 0xf9090e529a7dae00ULL);
}

TEST_CASE("pcg64 deviates") {
  Pcg64 rng(1, 2);
  std::vector<double> n(200000);
  for (double& v : n) v = rng.normal();
  CHECK(std::abs(variance(n) - 1.0) < 0.02);
  CHECK(std::abs(kurtosis(n) - 3.0) < 0.1);
  double u_min = 1, u_max = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
  }
  CHECK(u_min >= 0.0);
  CHECK(u_max < 1.0);
}

TEST_CASE("generation is deterministic in the seed") {
  Scenario sc;
  sc.duration_s = 20.0;
  sc.snaps.rate_hz = 0.3;
  sc.events = {{5.0, 2.0, EventKind::chirp, 200.0, 600.0, 15.0}};
  const SynthResult a = generate(sc);
  const SynthResult b = generate(sc);
  CHECK(a.stream.samples == b.stream.samples);
  CHECK(a.snaps.size() == b.snaps.size());
  sc.seed = 2;
  CHECK(generate(sc).stream.samples != a.stream.samples);
  CHECK(a.stream.samples.size() == 160000);
  REQUIRE(a.truth.segments.size() == 1);
  CHECK(a.truth.segments[0] == Interval{5.0, 7.0});
}

TEST_CASE("background noise is Gaussian with the scheduled variance") {
  Scenario sc;
  sc.duration_s = 40.0;
  sc.noise = {{0.0, 1e-5}, {20.0, 4e-5}};
  const SynthResult r = generate(sc);
  const std::span<const double> all(r.stream.samples);
  const auto first = all.first(160000);
  const auto second = all.subspan(160000);
  CHECK(variance(first) == doctest::Approx(1e-5).epsilon(0.02));
  CHECK(variance(second) == doctest::Approx(4e-5).epsilon(0.02));
  CHECK(std::abs(kurtosis(first) - 3.0) < 0.1);
  CHECK(sc.sigma2_at(25.0) == 4e-5);
  CHECK(r.clipped_samples == 0);
}

TEST_CASE("tone SNR is measured in the analysis band") {
  Scenario sc;
  sc.duration_s = 60.0;
  sc.seed = 3;
  sc.events = {{10.0, 20.0, EventKind::tone, 400.0, 400.0, 0.0}};
  const SynthResult r = generate(sc);
  const BandpassSpec band = BandpassSpec::defaults();
  CHECK(std::abs(measure_snr_db(r.stream, r.truth, &band)) < 0.5);

  sc.events[0].snr_db = 10.0;
  const SynthResult r10 = generate(sc);
  CHECK(std::abs(measure_snr_db(r10.stream, r10.truth, &band) - 10.0) < 0.5);
}

TEST_CASE("snaps are distractors, not truth") {
  Scenario sc;
  sc.duration_s = 300.0;
  sc.snaps.rate_hz = 0.1;
  sc.events = {{100.0, 2.0, EventKind::tone, 400.0, 400.0, 20.0}};
  const SynthResult r = generate(sc);
  CHECK(r.truth.segments.size() == 1);
  CHECK(r.snaps.size() > 10);
  for (const auto& s : r.snaps) {
    CHECK(s.kind == EventKind::snap);
    CHECK(s.duration_s <= sc.snaps.max_duration_s);
    CHECK((s.start_s + s.duration_s <= 100.0 || s.start_s >= 102.0));
  }
}

TEST_CASE("add_noise reaches the target in-band SNR") {
  Scenario sc;
  sc.duration_s = 120.0;
  sc.seed = 4;
  sc.events = {{20.0, 10.0, EventKind::tone, 400.0, 400.0, 20.0}, {70.0, 10.0, EventKind::chirp, 200.0, 600.0, 20.0}};
  const SynthResult r = generate(sc);
  const BandpassSpec band = BandpassSpec::defaults();
  const AudioStream noisy = add_noise(r.stream, 10.0, r.truth, 1, &band);
  CHECK(std::abs(measure_snr_db(noisy, r.truth, &band) - 10.0) < 0.1);

  const double current = measure_snr_db(r.stream, r.truth, &band);
  CHECK(added_noise_variance(r.stream, current, r.truth, &band) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(add_noise(r.stream, current + 5.0, r.truth, 1, &band), std::invalid_argument);
  CHECK_THROWS_AS(add_noise(r.stream, 5.0, Annotation{}, 1, &band), std::invalid_argument);
  CHECK(add_noise(r.stream, 10.0, r.truth, 1, &band).samples == noisy.samples);

  const AudioStream broad = add_noise(r.stream, 5.0, r.truth, 2);
  CHECK(std::abs(measure_snr_db(broad, r.truth) - 5.0) < 0.1);
}

TEST_CASE("scenario validation and JSON round trip") {
  Scenario sc;
  sc.events = {{1.0, 2.0, EventKind::tone, 400, 400, 10}, {2.5, 1.0, EventKind::tone, 400, 400, 10}};
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  sc.events = {{59.5, 2.0, EventKind::tone, 400, 400, 10}};
  CHECK_THROWS_AS(sc.validate(), ConfigError);

  Scenario good;
  good.duration_s = 30.0;
  good.seed = 99;
  good.noise = {{0.0, 2e-5}, {10.0, 1e-5}};
  good.snaps.rate_hz = 0.2;
  good.events = {{3.0, 1.0, EventKind::chirp, 200, 500, 12.5}};
  const Scenario back = scenario_from_json(scenario_to_json(good));
  CHECK(generate(back).stream.samples == generate(good).stream.samples);
  CHECK_THROWS_AS(scenario_from_json(nlohmann::json{{"events", {{{"start_s", 1.0}}}}}), ConfigError);
}

TEST_CASE("random layouts") {
  RandomScenarioSpec spec;
  spec.seed = 6;
  const Scenario sc = random_scenario(spec);
  CHECK(sc.events.size() == 12);
  CHECK_NOTHROW(sc.validate());
  for (const auto& e : sc.events) {
    CHECK(e.duration_s >= spec.min_event_s);
    CHECK(e.duration_s <= spec.max_event_s);
    CHECK(e.snr_db == spec.snr_db);
  }
  spec.events = 1000;
  CHECK_THROWS_AS(random_scenario(spec), ConfigError);
}

TEST_CASE("clipping is counted") {
  Scenario sc;
  sc.duration_s = 5.0;
  sc.noise = {{0.0, 0.5}};
  CHECK(generate(sc).clipped_samples > 0);
}
