#include "sno/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "sno/error.hpp"

namespace sno {

namespace {

#include "default_coefficients.inc"

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

struct WavFormat {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

}  // namespace

bool BiquadSection::stable() const {
  if (a0 == 0.0 || !std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(a2)) return false;
  const double c1 = a1 / a0;
  const double c2 = a2 / a0;
  // Jury conditions for z^2 + c1 z + c2.
  return std::abs(c2) < 1.0 && std::abs(c1) < 1.0 + c2;
}

void BandpassSpec::validate() const {
  if (design_rate <= 0) throw ConfigError("bandpass design rate must be positive");
  if (!(low_cut_hz > 0.0 && low_cut_hz < high_cut_hz && high_cut_hz < design_rate / 2.0)) {
    throw ConfigError("bandpass cut-offs must satisfy 0 < low < high < rate/2");
  }
  if (sections.empty()) throw ConfigError("bandpass has no sections");
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (!sections[i].stable()) {
      throw ConfigError("bandpass section " + std::to_string(i) + " is unstable");
    }
  }
}

BandpassSpec BandpassSpec::defaults() {
  BandpassSpec spec;
  for (const auto& c : kBandpassSections) {
    spec.sections.push_back({c[0], c[1], c[2], c[3], c[4], c[5]});
  }
  return spec;
}

DecimationTaps DecimationTaps::defaults() {
  DecimationTaps taps;
  auto put = [&](int ratio, const std::array<double, 63>& t) {
    taps.by_ratio[ratio] = std::vector<double>(t.begin(), t.end());
  };
  put(2, kDecimateTaps2);
  put(3, kDecimateTaps3);
  put(4, kDecimateTaps4);
  put(5, kDecimateTaps5);
  put(6, kDecimateTaps6);
  put(8, kDecimateTaps8);
  put(10, kDecimateTaps10);
  put(12, kDecimateTaps12);
  return taps;
}

AudioStream decode_wav(std::span<const unsigned char> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file");
  }

  WavFormat fmt;
  bool have_fmt = false;
  std::span<const unsigned char> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      throw CorruptFileError("chunk '" + std::string(reinterpret_cast<const char*>(chunk), 4) +
                             "' extends past end of file");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw CorruptFileError("fmt chunk too short");
      const unsigned char* f = bytes.data() + body;
      fmt.format = read_u16(f);
      fmt.channels = read_u16(f + 2);
      fmt.sample_rate = read_u32(f + 4);
      fmt.block_align = read_u16(f + 12);
      fmt.bits = read_u16(f + 14);
      if (fmt.format == kFormatExtensible) {
        if (size < 40) throw CorruptFileError("extensible fmt chunk too short");
        fmt.format = read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.subspan(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1U);
  }

  if (!have_fmt) throw CorruptFileError("missing fmt chunk");
  if (!have_data) throw CorruptFileError("missing data chunk");
  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool f32 = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !f32) {
    throw FormatError("unsupported encoding (format " + std::to_string(fmt.format) + ", " +
                      std::to_string(fmt.bits) + " bits)");
  }
  if (fmt.channels < 1 || fmt.channels > 2) {
    throw FormatError("unsupported channel count " + std::to_string(fmt.channels));
  }
  if (fmt.sample_rate == 0) throw FormatError("zero sample rate");

  const std::size_t width = fmt.bits / 8;
  const std::size_t frame_bytes = width * fmt.channels;
  const std::size_t frames = data.size() / frame_bytes;

  AudioStream out;
  out.sample_rate = static_cast<int>(fmt.sample_rate);
  out.channel_count = fmt.channels;
  out.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      const unsigned char* p = data.data() + i * frame_bytes + c * width;
      double v = 0.0;
      if (pcm16) {
        v = static_cast<std::int16_t>(read_u16(p)) / 32768.0;
      } else {
        const std::uint32_t bits = read_u32(p);
        float f = 0.0F;
        std::memcpy(&f, &bits, sizeof f);
        if (!std::isfinite(f)) throw CorruptFileError("non-finite float sample");
        v = std::clamp(static_cast<double>(f), -1.0, 1.0);
      }
      acc += v;
    }
    out.samples[i] = acc / fmt.channels;
  }
  return out;
}

AudioStream read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::filesystem::filesystem_error("cannot open", path, std::make_error_code(std::errc::no_such_file_or_directory));
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

std::vector<unsigned char> encode_wav(const AudioStream& stream, WavEncoding encoding) {
  const bool pcm16 = encoding == WavEncoding::pcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const std::uint16_t block_align = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(stream.samples.size() * block_align);

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(stream.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(stream.sample_rate) * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double x : stream.samples) {
    if (pcm16) {
      const double scaled = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    } else {
      const auto f = static_cast<float>(x);
      std::uint32_t u = 0;
      std::memcpy(&u, &f, sizeof u);
      put_u32(out, u);
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioStream& stream, WavEncoding encoding) {
  const auto bytes = encode_wav(stream, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

AudioStream decimate(const AudioStream& stream, int target_rate, const DecimationTaps& taps) {
  if (target_rate <= 0 || stream.sample_rate % target_rate != 0) {
    throw UnsupportedRateError("cannot decimate " + std::to_string(stream.sample_rate) + " Hz to " +
                               std::to_string(target_rate) + " Hz (non-integer ratio)");
  }
  const int ratio = stream.sample_rate / target_rate;
  if (ratio == 1) return stream;
  const auto it = taps.by_ratio.find(ratio);
  if (it == taps.by_ratio.end()) {
    throw UnsupportedRateError("no anti-alias taps shipped for decimation ratio " + std::to_string(ratio));
  }
  const std::vector<double>& h = it->second;
  const auto center = static_cast<std::ptrdiff_t>(h.size() / 2);
  const auto n_in = static_cast<std::ptrdiff_t>(stream.samples.size());

  AudioStream out;
  out.sample_rate = target_rate;
  out.channel_count = stream.channel_count;
  out.samples.resize((stream.samples.size() + static_cast<std::size_t>(ratio) - 1) / static_cast<std::size_t>(ratio));
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(i) * ratio + center;
    double acc = 0.0;
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(h.size()); ++k) {
      const std::ptrdiff_t j = n - k;
      if (j >= 0 && j < n_in) acc += h[static_cast<std::size_t>(k)] * stream.samples[static_cast<std::size_t>(j)];
    }
    out.samples[i] = acc;
  }
  return out;
}

SosFilter::SosFilter(const BandpassSpec& spec) {
  for (const auto& s : spec.sections) {
    BiquadSection c = s;
    c.b0 /= s.a0;
    c.b1 /= s.a0;
    c.b2 /= s.a0;
    c.a1 /= s.a0;
    c.a2 /= s.a0;
    c.a0 = 1.0;
    sections_.push_back({c});
  }
}

double SosFilter::process(double x) {
  for (auto& s : sections_) {
    const double y = s.coef.b0 * x + s.s1;
    s.s1 = s.coef.b1 * x - s.coef.a1 * y + s.s2;
    s.s2 = s.coef.b2 * x - s.coef.a2 * y;
    x = y;
  }
  return x;
}

void SosFilter::process(std::span<double> block) {
  for (double& x : block) x = process(x);
}

void SosFilter::reset() {
  for (auto& s : sections_) s.s1 = s.s2 = 0.0;
}

AudioStream bandpass(const AudioStream& stream, const BandpassSpec& spec) {
  if (stream.sample_rate != spec.design_rate) {
    throw ConfigError("stream rate " + std::to_string(stream.sample_rate) +
                      " Hz does not match band-pass design rate " + std::to_string(spec.design_rate) + " Hz");
  }
  AudioStream out = stream;
  SosFilter filter(spec);
  filter.process(out.samples);
  return out;
}

AudioStream preprocess(const AudioStream& stream, const IngestConfig& config) {
  config.bandpass.validate();
  if (stream.sample_rate == config.target_rate) return bandpass(stream, config.bandpass);
  return bandpass(decimate(stream, config.target_rate, config.taps), config.bandpass);
}

double noise_power_gain(const BandpassSpec& spec, std::size_t length) {
  SosFilter filter(spec);
  double energy = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    const double y = filter.process(i == 0 ? 1.0 : 0.0);
    energy += y * y;
  }
  return energy;
}

}  // namespace sno
