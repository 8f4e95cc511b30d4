#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sno/audio.hpp"
#include "sno/eval.hpp"

namespace sno {

enum class EventKind { tone, chirp, snap };

struct ScenarioEvent {
  double start_s = 0.0;
  double duration_s = 1.0;
  EventKind kind = EventKind::tone;
  // Tone frequency is the band centre; chirps sweep linearly low -> high.
  double f_lo_hz = 300.0;
  double f_hi_hz = 300.0;
  double snr_db = 20.0;
};

/// Noise variance sigma2 from start_s until the next step.
struct NoiseStep {
  double start_s = 0.0;
  double sigma2 = 1e-5;
};

/// Poisson "snap" distractors: short wideband bursts.
struct SnapConfig {
  double rate_hz = 0.0;
  double min_duration_s = 0.002;
  double max_duration_s = 0.010;
  double min_snr_db = 25.0;
  double max_snr_db = 35.0;
};

/// Synthetic soundscape description.
///
/// SNR is the ratio of mean event power to the background noise power inside
/// the analysis band [band_low_hz, band_high_hz]; for white noise of variance
/// sigma2 that band holds sigma2 * (high - low) / (rate / 2).
///
/// Random streams of one seed: 1 background noise, 2 snap arrivals and
/// bursts, 3 event phases, 4 add_noise, 5 random_scenario layout.
struct Scenario {
  double duration_s = 60.0;
  int sample_rate = 8000;
  std::vector<NoiseStep> noise{NoiseStep{}};
  std::vector<ScenarioEvent> events;
  SnapConfig snaps;
  double band_low_hz = 100.0;
  double band_high_hz = 700.0;
  double taper_s = 0.02;
  std::uint64_t seed = 1;

  /// Throws ConfigError on an invalid schedule, events outside the duration,
  /// overlapping events or non-finite SNRs.
  void validate() const;
  double sigma2_at(double t) const;
};

inline constexpr std::uint64_t kNoiseStream = 1;
inline constexpr std::uint64_t kSnapStream = 2;
inline constexpr std::uint64_t kEventStream = 3;
inline constexpr std::uint64_t kAddNoiseStream = 4;
inline constexpr std::uint64_t kLayoutStream = 5;

struct SynthResult {
  AudioStream stream;
  Annotation truth;  // tone and chirp events only
  std::vector<ScenarioEvent> snaps;  // every rendered snap, explicit or Poisson
  std::size_t clipped_samples = 0;
};

/// Deterministic in the scenario (including its seed).
SynthResult generate(const Scenario& scenario);

/// Layout helper: `events` tone/chirp calls, one per equal time slot at a random
/// offset, with Poisson snaps at `snap_rate_hz`.
struct RandomScenarioSpec {
  double duration_s = 600.0;
  int events = 12;
  double snr_db = 20.0;
  double min_event_s = 1.0;
  double max_event_s = 2.5;
  double snap_rate_hz = 0.05;
  double noise_sigma2 = 1e-5;
  int sample_rate = 8000;
  std::uint64_t seed = 1;
};

Scenario random_scenario(const RandomScenarioSpec& spec);

/// 10 log10((S - B) / B), S the mean power over the annotated samples and B
/// over the rest, measured after `band` when given.
double measure_snr_db(const AudioStream& stream, const Annotation& signal_segments,
                      const BandpassSpec* band = nullptr);

/// Adds white Gaussian noise so that measure_snr_db(result, segments, band)
/// equals target_snr_db in expectation. Throws std::invalid_argument when the
/// target exceeds the current SNR or the annotation is empty.
AudioStream add_noise(const AudioStream& stream, double target_snr_db, const Annotation& signal_segments,
                      std::uint64_t seed, const BandpassSpec* band = nullptr);

/// Variance of the white noise add_noise would add (0 when target == current).
double added_noise_variance(const AudioStream& stream, double target_snr_db, const Annotation& signal_segments,
                            const BandpassSpec* band = nullptr);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario read_scenario(const std::filesystem::path& path);

}  // namespace sno
