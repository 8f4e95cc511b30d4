#pragma once

#include <vector>

#include "sno/audio.hpp"
#include "sno/synth.hpp"

namespace testdata {

/// Small mixed scenario: tones, a chirp, snaps and a noise step.
inline sno::Scenario mixed_scenario(std::uint64_t seed, double duration_s = 120.0) {
  sno::Scenario sc;
  sc.duration_s = duration_s;
  sc.seed = seed;
  sc.noise = {{0.0, 1e-5}, {duration_s * 0.6, 3e-5}};
  sc.snaps.rate_hz = 0.05;
  sc.events = {
      {duration_s * 0.10, 1.5, sno::EventKind::tone, 400.0, 400.0, 20.0},
      {duration_s * 0.35, 2.0, sno::EventKind::chirp, 250.0, 600.0, 12.0},
      {duration_s * 0.70, 1.2, sno::EventKind::tone, 300.0, 300.0, 8.0},
  };
  return sc;
}

inline sno::AudioStream filtered(const sno::AudioStream& s) {
  return sno::bandpass(s, sno::BandpassSpec::defaults());
}

}  // namespace testdata
