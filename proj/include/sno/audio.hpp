#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

namespace sno {

/// Mono sample stream normalized to [-1, 1].
struct AudioStream {
  int sample_rate = 8000;
  std::vector<double> samples;
  int channel_count = 1;  // channels in the source before down-mixing

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// One second-order section, b0 + b1 z^-1 + b2 z^-2 over a0 + a1 z^-1 + a2 z^-2.
struct BiquadSection {
  double b0 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a0 = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;

  /// True when both feedback roots lie strictly inside the unit circle.
  bool stable() const;
};

struct BandpassSpec {
  double low_cut_hz = 100.0;
  double high_cut_hz = 700.0;
  int design_rate = 8000;
  std::vector<BiquadSection> sections;

  /// Throws ConfigError on bad cut-offs or an unstable section.
  void validate() const;

  /// Shipped 8th-order elliptic design, 100-700 Hz at 8 kHz.
  static BandpassSpec defaults();
};

/// Anti-alias FIR taps keyed by integer decimation ratio.
struct DecimationTaps {
  std::map<int, std::vector<double>> by_ratio;

  /// Shipped 63-tap Hamming-window low-pass sets, cut-off 0.45 * 8 kHz.
  static DecimationTaps defaults();
};

struct IngestConfig {
  int target_rate = 8000;
  BandpassSpec bandpass = BandpassSpec::defaults();
  DecimationTaps taps = DecimationTaps::defaults();
};

enum class WavEncoding { pcm16, float32 };

/// Reads RIFF/WAVE PCM16 or float32 with one or two channels. Channels are
/// averaged; PCM16 is scaled by 1/32768.
AudioStream read_wav(const std::filesystem::path& path);

/// Decodes an in-memory RIFF/WAVE image (same rules as read_wav).
AudioStream decode_wav(std::span<const unsigned char> bytes);

/// Writes a mono stream. PCM16 samples are round(x * 32768) clamped to the
/// int16 range, which reproduces PCM16 input bit-exactly.
void write_wav(const std::filesystem::path& path, const AudioStream& stream,
               WavEncoding encoding = WavEncoding::pcm16);

std::vector<unsigned char> encode_wav(const AudioStream& stream, WavEncoding encoding);

/// Centered FIR anti-alias filter then keep every M-th sample,
/// M = stream.sample_rate / target_rate. Throws UnsupportedRateError for a
/// non-integer ratio or a ratio without shipped taps.
AudioStream decimate(const AudioStream& stream, int target_rate,
                     const DecimationTaps& taps = DecimationTaps::defaults());

/// Streaming cascade of second-order sections (transposed direct form II).
class SosFilter {
 public:
  explicit SosFilter(const BandpassSpec& spec);

  double process(double x);
  void process(std::span<double> block);
  void reset();

 private:
  struct Section {
    BiquadSection coef;
    double s1 = 0.0;
    double s2 = 0.0;
  };
  std::vector<Section> sections_;
};

/// Applies the section cascade with zero initial state. Throws ConfigError when
/// the stream rate differs from spec.design_rate.
AudioStream bandpass(const AudioStream& stream, const BandpassSpec& spec);

/// decimate (when needed) followed by bandpass.
AudioStream preprocess(const AudioStream& stream, const IngestConfig& config);

/// Energy of the cascade's impulse response, i.e. the fraction of unit-variance
/// white-noise power that passes the filter.
double noise_power_gain(const BandpassSpec& spec, std::size_t length = 1 << 16);

}  // namespace sno
