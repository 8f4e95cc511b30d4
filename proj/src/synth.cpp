#include "sno/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sno/error.hpp"
#include "sno/noise_floor.hpp"
#include "sno/rng.hpp"

namespace sno {

namespace {

bool overlaps(double s0, double e0, double s1, double e1) { return s0 < e1 && s1 < e0; }

std::size_t to_sample(double t, int rate) {
  return static_cast<std::size_t>(std::llround(std::max(0.0, t) * rate));
}

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::tone:
      return "tone";
    case EventKind::chirp:
      return "chirp";
    case EventKind::snap:
      return "snap";
  }
  return "tone";
}

EventKind kind_from(const std::string& s) {
  if (s == "tone") return EventKind::tone;
  if (s == "chirp") return EventKind::chirp;
  if (s == "snap") return EventKind::snap;
  throw ConfigError("unknown event kind '" + s + "'");
}

// White burst of variance burst_sigma2 over [start, start + duration).
void render_snap(std::vector<double>& out, int rate, double start, double duration, double burst_sigma2,
                 Pcg64& rng) {
  const std::size_t a = to_sample(start, rate);
  const std::size_t b = std::min(out.size(), to_sample(start + duration, rate));
  const double sd = std::sqrt(burst_sigma2);
  for (std::size_t i = a; i < b; ++i) out[i] += sd * rng.normal();
}

}  // namespace

void Scenario::validate() const {
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) throw ConfigError("scenario duration must be >= 0");
  if (sample_rate <= 0) throw ConfigError("scenario sample rate must be positive");
  if (noise.empty()) throw ConfigError("noise schedule is empty");
  if (noise.front().start_s > 0.0) throw ConfigError("noise schedule must start at 0 s");
  for (std::size_t i = 0; i < noise.size(); ++i) {
    if (!(noise[i].sigma2 > 0.0) || !std::isfinite(noise[i].sigma2)) {
      throw ConfigError("noise sigma2 must be positive and finite");
    }
    if (i > 0 && !(noise[i].start_s > noise[i - 1].start_s)) {
      throw ConfigError("noise schedule steps must be strictly ascending");
    }
  }
  if (!(band_low_hz > 0.0 && band_low_hz < band_high_hz && band_high_hz < sample_rate / 2.0)) {
    throw ConfigError("analysis band must satisfy 0 < low < high < rate/2");
  }
  if (snaps.rate_hz < 0.0 || snaps.min_duration_s <= 0.0 || snaps.max_duration_s < snaps.min_duration_s ||
      snaps.max_snr_db < snaps.min_snr_db || !std::isfinite(snaps.min_snr_db) ||
      !std::isfinite(snaps.max_snr_db)) {
    throw ConfigError("invalid snap configuration");
  }
  if (taper_s < 0.0) throw ConfigError("taper_s must be >= 0");
  std::vector<ScenarioEvent> sorted = events;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.start_s < b.start_s; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& e = sorted[i];
    if (!(e.duration_s > 0.0) || e.start_s < 0.0 || e.start_s + e.duration_s > duration_s + 1e-9) {
      throw ConfigError("event at " + std::to_string(e.start_s) + " s lies outside the scenario");
    }
    if (!std::isfinite(e.snr_db)) throw ConfigError("event SNR must be finite");
    if (e.kind != EventKind::snap &&
        !(e.f_lo_hz > 0.0 && e.f_lo_hz <= e.f_hi_hz && e.f_hi_hz < sample_rate / 2.0)) {
      throw ConfigError("event frequencies must satisfy 0 < low <= high < rate/2");
    }
    if (i > 0 && sorted[i - 1].start_s + sorted[i - 1].duration_s > e.start_s) {
      throw ConfigError("events overlap at " + std::to_string(e.start_s) + " s");
    }
  }
}

double Scenario::sigma2_at(double t) const {
  double s = noise.front().sigma2;
  for (const auto& step : noise) {
    if (step.start_s <= t) s = step.sigma2;
  }
  return s;
}

SynthResult generate(const Scenario& scenario) {
  scenario.validate();
  const int rate = scenario.sample_rate;
  const auto n = static_cast<std::size_t>(std::floor(scenario.duration_s * rate));
  SynthResult out;
  out.stream.sample_rate = rate;
  out.stream.samples.resize(n);
  auto& x = out.stream.samples;

  Pcg64 noise_rng(scenario.seed, kNoiseStream);
  std::size_t step = 0;
  double sd = std::sqrt(scenario.noise.front().sigma2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    while (step + 1 < scenario.noise.size() && scenario.noise[step + 1].start_s <= t) {
      ++step;
      sd = std::sqrt(scenario.noise[step].sigma2);
    }
    x[i] = sd * noise_rng.normal();
  }

  const double band_fraction = (scenario.band_high_hz - scenario.band_low_hz) / (rate / 2.0);
  Pcg64 event_rng(scenario.seed, kEventStream);
  Pcg64 snap_rng(scenario.seed, kSnapStream);
  std::vector<Interval> truth;
  std::vector<ScenarioEvent> snaps;

  for (const auto& e : scenario.events) {
    if (e.kind == EventKind::snap) {
      snaps.push_back(e);
      continue;
    }
    const std::size_t a = to_sample(e.start_s, rate);
    const std::size_t b = std::min(n, to_sample(e.start_s + e.duration_s, rate));
    if (b <= a) continue;
    const double phase0 = 2.0 * std::numbers::pi * event_rng.uniform();
    const double len = static_cast<double>(b - a) / rate;
    const double f0 = e.kind == EventKind::tone ? 0.5 * (e.f_lo_hz + e.f_hi_hz) : e.f_lo_hz;
    const double sweep = e.kind == EventKind::tone ? 0.0 : (e.f_hi_hz - e.f_lo_hz) / len;
    const double taper = std::min(scenario.taper_s, len / 2.0);

    std::vector<double> wave(b - a);
    double energy = 0.0;
    for (std::size_t i = 0; i < wave.size(); ++i) {
      const double t = static_cast<double>(i) / rate;
      double w = 1.0;
      if (taper > 0.0) {
        const double edge = std::min(t, len - t);
        if (edge < taper) w = 0.5 - 0.5 * std::cos(std::numbers::pi * std::max(0.0, edge) / taper);
      }
      wave[i] = w * std::sin(phase0 + 2.0 * std::numbers::pi * (f0 * t + 0.5 * sweep * t * t));
      energy += wave[i] * wave[i];
    }
    const double unit_power = energy / static_cast<double>(wave.size());
    const double noise_in_band = scenario.sigma2_at(e.start_s) * band_fraction;
    const double target = noise_in_band * db_to_power_ratio(e.snr_db);
    const double gain = unit_power > 0.0 ? std::sqrt(target / unit_power) : 0.0;
    for (std::size_t i = 0; i < wave.size(); ++i) x[a + i] += gain * wave[i];
    truth.push_back({e.start_s, e.start_s + e.duration_s});
  }

  if (scenario.snaps.rate_hz > 0.0) {
    const auto& sc = scenario.snaps;
    double t = 0.0;
    for (;;) {
      t += snap_rng.exponential(sc.rate_hz);
      if (t >= scenario.duration_s) break;
      const double dur = snap_rng.uniform(sc.min_duration_s, sc.max_duration_s);
      const double snr = snap_rng.uniform(sc.min_snr_db, sc.max_snr_db);
      if (t + dur > scenario.duration_s) continue;
      bool clash = false;
      for (const auto& e : scenario.events) clash = clash || overlaps(t, t + dur, e.start_s, e.start_s + e.duration_s);
      for (const auto& s : snaps) clash = clash || overlaps(t, t + dur, s.start_s, s.start_s + s.duration_s);
      if (!clash) snaps.push_back({t, dur, EventKind::snap, 0.0, 0.0, snr});
    }
  }
  std::sort(snaps.begin(), snaps.end(),
            [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.start_s < b.start_s; });
  for (const auto& s : snaps) {
    render_snap(x, rate, s.start_s, s.duration_s, scenario.sigma2_at(s.start_s) * db_to_power_ratio(s.snr_db),
                snap_rng);
  }

  for (double& v : x) {
    if (v > 1.0 || v < -1.0) {
      v = std::clamp(v, -1.0, 1.0);
      ++out.clipped_samples;
    }
  }
  out.truth.segments = normalize(std::move(truth));
  out.snaps = std::move(snaps);
  return out;
}

Scenario random_scenario(const RandomScenarioSpec& spec) {
  if (spec.events < 0 || spec.duration_s <= 0.0 || spec.min_event_s <= 0.0 || spec.max_event_s < spec.min_event_s) {
    throw ConfigError("invalid random scenario spec");
  }
  Scenario sc;
  sc.duration_s = spec.duration_s;
  sc.sample_rate = spec.sample_rate;
  sc.noise = {{0.0, spec.noise_sigma2}};
  sc.snaps.rate_hz = spec.snap_rate_hz;
  sc.seed = spec.seed;

  Pcg64 rng(spec.seed, kLayoutStream);
  if (spec.events > 0) {
    const double slot = spec.duration_s / spec.events;
    if (slot < spec.max_event_s + 1.0) throw ConfigError("too many events for the duration");
    for (int i = 0; i < spec.events; ++i) {
      ScenarioEvent e;
      e.duration_s = rng.uniform(spec.min_event_s, spec.max_event_s);
      // Keep at least half a second of noise on each side inside the slot.
      e.start_s = i * slot + 0.5 + rng.uniform() * (slot - e.duration_s - 1.0);
      e.kind = rng.uniform() < 0.5 ? EventKind::tone : EventKind::chirp;
      if (e.kind == EventKind::tone) {
        e.f_lo_hz = e.f_hi_hz = rng.uniform(150.0, 600.0);
      } else {
        e.f_lo_hz = rng.uniform(120.0, 300.0);
        e.f_hi_hz = e.f_lo_hz + rng.uniform(100.0, 300.0);
      }
      e.snr_db = spec.snr_db;
      sc.events.push_back(e);
    }
  }
  return sc;
}

namespace {

struct BandPowers {
  double signal = 0.0;
  double background = 0.0;
};

BandPowers band_powers(const AudioStream& stream, const Annotation& segments, const BandpassSpec* band) {
  if (segments.segments.empty()) throw std::invalid_argument("SNR needs a non-empty annotation");
  const AudioStream y = band ? bandpass(stream, *band) : stream;
  std::vector<char> in_signal(y.samples.size(), 0);
  for (const auto& iv : segments.segments) {
    const std::size_t a = std::min(y.samples.size(), to_sample(iv.start_s, y.sample_rate));
    const std::size_t b = std::min(y.samples.size(), to_sample(iv.end_s, y.sample_rate));
    std::fill(in_signal.begin() + static_cast<std::ptrdiff_t>(a), in_signal.begin() + static_cast<std::ptrdiff_t>(b), 1);
  }
  double s = 0.0;
  double bg = 0.0;
  std::size_t ns = 0;
  std::size_t nb = 0;
  for (std::size_t i = 0; i < y.samples.size(); ++i) {
    const double p = y.samples[i] * y.samples[i];
    if (in_signal[i]) {
      s += p;
      ++ns;
    } else {
      bg += p;
      ++nb;
    }
  }
  if (ns == 0 || nb == 0) throw std::invalid_argument("SNR needs both signal and background samples");
  return {s / static_cast<double>(ns), bg / static_cast<double>(nb)};
}

}  // namespace

double measure_snr_db(const AudioStream& stream, const Annotation& signal_segments, const BandpassSpec* band) {
  const BandPowers p = band_powers(stream, signal_segments, band);
  if (!(p.signal > p.background) || !(p.background > 0.0)) {
    throw std::invalid_argument("signal power does not exceed background power");
  }
  return 10.0 * std::log10((p.signal - p.background) / p.background);
}

double added_noise_variance(const AudioStream& stream, double target_snr_db, const Annotation& signal_segments,
                            const BandpassSpec* band) {
  if (!std::isfinite(target_snr_db)) throw std::invalid_argument("target SNR must be finite");
  const BandPowers p = band_powers(stream, signal_segments, band);
  if (!(p.signal > p.background) || !(p.background > 0.0)) {
    throw std::invalid_argument("signal power does not exceed background power");
  }
  const double current = 10.0 * std::log10((p.signal - p.background) / p.background);
  if (target_snr_db > current + 1e-9) {
    throw std::invalid_argument("add_noise can only lower the SNR (current " + std::to_string(current) + " dB)");
  }
  const double gain = band ? noise_power_gain(*band) : 1.0;
  const double v = ((p.signal - p.background) / db_to_power_ratio(target_snr_db) - p.background) / gain;
  // Round-off around target == current.
  return v > 0.0 ? v : 0.0;
}

AudioStream add_noise(const AudioStream& stream, double target_snr_db, const Annotation& signal_segments,
                      std::uint64_t seed, const BandpassSpec* band) {
  const double v = added_noise_variance(stream, target_snr_db, signal_segments, band);
  AudioStream out = stream;
  if (v == 0.0) return out;
  Pcg64 rng(seed, kAddNoiseStream);
  const double sd = std::sqrt(v);
  for (double& x : out.samples) x += sd * rng.normal();
  return out;
}

// ---------------------------------------------------------------------------

Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    Scenario sc;
    sc.duration_s = j.value("duration_s", sc.duration_s);
    sc.sample_rate = j.value("sample_rate", sc.sample_rate);
    sc.seed = j.value("seed", sc.seed);
    sc.band_low_hz = j.value("band_low_hz", sc.band_low_hz);
    sc.band_high_hz = j.value("band_high_hz", sc.band_high_hz);
    sc.taper_s = j.value("taper_s", sc.taper_s);
    if (j.contains("noise_sigma2")) sc.noise = {{0.0, j.at("noise_sigma2").get<double>()}};
    if (j.contains("noise_schedule")) {
      sc.noise.clear();
      for (const auto& s : j.at("noise_schedule")) sc.noise.push_back({s.at("start_s"), s.at("sigma2")});
    }
    if (j.contains("snaps")) {
      const auto& s = j.at("snaps");
      sc.snaps.rate_hz = s.value("rate_hz", sc.snaps.rate_hz);
      sc.snaps.min_duration_s = s.value("min_duration_s", sc.snaps.min_duration_s);
      sc.snaps.max_duration_s = s.value("max_duration_s", sc.snaps.max_duration_s);
      sc.snaps.min_snr_db = s.value("min_snr_db", sc.snaps.min_snr_db);
      sc.snaps.max_snr_db = s.value("max_snr_db", sc.snaps.max_snr_db);
    }
    if (j.contains("events")) {
      for (const auto& e : j.at("events")) {
        ScenarioEvent ev;
        ev.start_s = e.at("start_s");
        ev.duration_s = e.at("duration_s");
        ev.kind = kind_from(e.value("kind", std::string("tone")));
        ev.f_lo_hz = e.value("f_lo_hz", ev.f_lo_hz);
        ev.f_hi_hz = e.value("f_hi_hz", ev.f_lo_hz);
        ev.snr_db = e.value("snr_db", ev.snr_db);
        sc.events.push_back(ev);
      }
    }
    if (j.contains("random")) {
      const auto& r = j.at("random");
      RandomScenarioSpec spec;
      spec.duration_s = sc.duration_s;
      spec.sample_rate = sc.sample_rate;
      spec.seed = sc.seed;
      spec.noise_sigma2 = sc.noise.front().sigma2;
      spec.events = r.value("events", spec.events);
      spec.snr_db = r.value("snr_db", spec.snr_db);
      spec.min_event_s = r.value("min_event_s", spec.min_event_s);
      spec.max_event_s = r.value("max_event_s", spec.max_event_s);
      spec.snap_rate_hz = r.value("snap_rate_hz", sc.snaps.rate_hz);
      Scenario generated = random_scenario(spec);
      generated.noise = sc.noise;
      generated.band_low_hz = sc.band_low_hz;
      generated.band_high_hz = sc.band_high_hz;
      generated.taper_s = sc.taper_s;
      generated.snaps.min_duration_s = sc.snaps.min_duration_s;
      generated.snaps.max_duration_s = sc.snaps.max_duration_s;
      generated.snaps.min_snr_db = sc.snaps.min_snr_db;
      generated.snaps.max_snr_db = sc.snaps.max_snr_db;
      generated.events.insert(generated.events.end(), sc.events.begin(), sc.events.end());
      sc = std::move(generated);
    }
    sc.validate();
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad scenario: ") + e.what());
  }
}

nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["duration_s"] = sc.duration_s;
  j["sample_rate"] = sc.sample_rate;
  j["seed"] = sc.seed;
  j["band_low_hz"] = sc.band_low_hz;
  j["band_high_hz"] = sc.band_high_hz;
  j["taper_s"] = sc.taper_s;
  j["noise_schedule"] = nlohmann::json::array();
  for (const auto& s : sc.noise) j["noise_schedule"].push_back({{"start_s", s.start_s}, {"sigma2", s.sigma2}});
  j["snaps"] = {{"rate_hz", sc.snaps.rate_hz},
                {"min_duration_s", sc.snaps.min_duration_s},
                {"max_duration_s", sc.snaps.max_duration_s},
                {"min_snr_db", sc.snaps.min_snr_db},
                {"max_snr_db", sc.snaps.max_snr_db}};
  j["events"] = nlohmann::json::array();
  for (const auto& e : sc.events) {
    j["events"].push_back({{"start_s", e.start_s},
                           {"duration_s", e.duration_s},
                           {"kind", kind_name(e.kind)},
                           {"f_lo_hz", e.f_lo_hz},
                           {"f_hi_hz", e.f_hi_hz},
                           {"snr_db", e.snr_db}});
  }
  return j;
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::filesystem::filesystem_error("cannot open scenario", path,
                                            std::make_error_code(std::errc::no_such_file_or_directory));
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace sno
