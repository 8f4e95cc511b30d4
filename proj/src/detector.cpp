#include "sno/detector.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "sno/error.hpp"
#include "sno/noise_stats.hpp"

namespace sno {

void DetectorConfig::validate() const {
  if (frame_samples < 2) throw ConfigError("detector.frame_samples must be >= 2");
  if (superblock_frames < 2) throw ConfigError("detector.superblock_frames must be >= 2");
  if (!(min_event_s >= 0.0)) throw ConfigError("detector.min_event_s must be >= 0");
  if (!(merge_gap_s >= 0.0)) throw ConfigError("detector.merge_gap_s must be >= 0");
  floor.validate();
}

std::vector<double> frame_stream(const AudioStream& stream, int frame_samples) {
  if (frame_samples < 2) throw std::invalid_argument("frame_samples must be >= 2");
  const auto n = static_cast<std::size_t>(frame_samples);
  const std::size_t frames = stream.samples.size() / n;
  std::vector<double> powers(frames);
  const std::span<const double> all(stream.samples);
  for (std::size_t i = 0; i < frames; ++i) powers[i] = frame_power(all.subspan(i * n, n));
  return powers;
}

SuperblockStats window_stats(std::span<const double> powers, std::size_t start_frame) {
  RunningEstimate est;
  for (double p : powers) est = update(est, p);
  return {est.mean, est.var, start_frame};
}

std::vector<SuperblockStats> superblock_stats(std::span<const double> powers, int superblock_frames, bool sliding) {
  if (superblock_frames < 2) throw std::invalid_argument("superblock_frames must be >= 2");
  const auto k = static_cast<std::size_t>(superblock_frames);
  std::vector<SuperblockStats> out;
  if (powers.size() < k) return out;
  const std::size_t step = sliding ? 1 : k;
  for (std::size_t s = 0; s + k <= powers.size(); s += step) out.push_back(window_stats(powers.subspan(s, k), s));
  return out;
}

Hypothesis classify(const SuperblockStats& stats, const Thresholds& thr) {
  return (stats.p_k < thr.p_thr && stats.q_k < thr.q_thr) ? Hypothesis::h0 : Hypothesis::h1;
}

Hypothesis classify_frame(const FrameFeatures& frame, const DetectorConfig& config, double n_std) {
  if (!frame.has_superblock) return Hypothesis::h0;
  const Thresholds thr = thresholds_from_floor(frame.p_est, config.frame_samples, config.superblock_frames, n_std);
  const SuperblockStats stats{config.frame_power_test ? frame.power : frame.p_k, frame.q_k, 0};
  return classify(stats, thr);
}

// ---------------------------------------------------------------------------

SegmentAssembler::SegmentAssembler(const DetectorConfig& config, double frame_duration_s,
                                   std::size_t provisional_frames)
    : frame_duration_s_(frame_duration_s),
      min_event_s_(config.min_event_s),
      merge_gap_frames_(static_cast<std::size_t>(std::floor(config.merge_gap_s / frame_duration_s + 1e-9))),
      provisional_frames_(provisional_frames) {}

void SegmentAssembler::push(Hypothesis label, double power) {
  const std::size_t i = index_++;
  if (label == Hypothesis::h1) {
    if (open_ && gap_ > 0) {
      // gap_ <= merge_gap_frames_ here, otherwise the segment was closed.
      sum_ += gap_sum_;
      peak_ = std::max(peak_, gap_peak_);
      count_ += gap_;
    }
    if (!open_) {
      open_ = true;
      start_ = i;
      sum_ = 0.0;
      peak_ = power;
      count_ = 0;
    }
    sum_ += power;
    peak_ = std::max(peak_, power);
    ++count_;
    last_h1_ = i;
    gap_ = 0;
    gap_sum_ = 0.0;
    gap_peak_ = 0.0;
    return;
  }
  if (!open_) return;
  gap_sum_ += power;
  gap_peak_ = gap_ == 0 ? power : std::max(gap_peak_, power);
  ++gap_;
  if (gap_ > merge_gap_frames_) close();
}

void SegmentAssembler::close() {
  open_ = false;
  gap_ = 0;
  gap_sum_ = 0.0;
  gap_peak_ = 0.0;
  const std::size_t frames = last_h1_ - start_ + 1;
  const double duration = static_cast<double>(frames) * frame_duration_s_;
  if (duration + 1e-9 < min_event_s_) return;
  Segment seg;
  seg.start_s = static_cast<double>(start_) * frame_duration_s_;
  seg.end_s = static_cast<double>(last_h1_ + 1) * frame_duration_s_;
  seg.label = SegmentLabel::detection;
  seg.peak_power = peak_;
  seg.mean_power = sum_ / static_cast<double>(count_);
  seg.provisional = start_ < provisional_frames_;
  segments_.push_back(seg);
}

void SegmentAssembler::finish() {
  if (open_) close();
}

std::vector<Segment> SegmentAssembler::take() {
  std::vector<Segment> out;
  out.swap(segments_);
  return out;
}

std::vector<Segment> assemble_segments(std::span<const Hypothesis> labels, const DetectorConfig& config,
                                       double frame_duration_s, std::span<const double> powers) {
  if (!powers.empty() && powers.size() != labels.size()) {
    throw std::invalid_argument("labels and powers differ in length");
  }
  SegmentAssembler assembler(config, frame_duration_s);
  for (std::size_t i = 0; i < labels.size(); ++i) assembler.push(labels[i], powers.empty() ? 0.0 : powers[i]);
  assembler.finish();
  return assembler.take();
}

// ---------------------------------------------------------------------------

namespace {

// Start frame of the superblock that labels frame j, or nullopt when there is
// none. `total` is the number of frames when known (end of stream).
std::optional<std::size_t> superblock_start(std::size_t j, std::size_t k, bool sliding,
                                            std::optional<std::size_t> total) {
  if (sliding) {
    const std::size_t back = (k - 1) / 2;
    std::size_t s = j >= back ? j - back : 0;
    if (total) {
      if (*total < k) return std::nullopt;
      s = std::min(s, *total - k);
    }
    return s;
  }
  const std::size_t s = (j / k) * k;
  if (total && s + k > *total) return std::nullopt;
  return s;
}

}  // namespace

FrameAnalysis analyze(const AudioStream& stream, const DetectorConfig& config) {
  config.validate();
  FrameAnalysis out;
  out.sample_rate = stream.sample_rate;
  out.config = config;
  const std::vector<double> powers = frame_stream(stream, config.frame_samples);
  if (powers.empty()) return out;

  const int window = floor_window_frames(config.floor, stream.sample_rate, config.frame_samples);
  const std::vector<double> extrema =
      config.floor.mode == FloorMode::erosion ? erode(powers, window) : dilate(powers, window);
  out.provisional_frames = std::min(powers.size(), static_cast<std::size_t>(window / 2));

  const auto k = static_cast<std::size_t>(config.superblock_frames);
  const std::span<const double> all(powers);
  out.frames.resize(powers.size());
  for (std::size_t j = 0; j < powers.size(); ++j) {
    FrameFeatures& f = out.frames[j];
    f.power = powers[j];
    f.p_est = floor_from_extremum(extrema[j], config.floor);
    if (const auto s = superblock_start(j, k, config.sliding_superblocks, powers.size())) {
      const SuperblockStats st = window_stats(all.subspan(*s, k), *s);
      f.p_k = st.p_k;
      f.q_k = st.q_k;
      f.has_superblock = true;
    }
  }
  return out;
}

std::vector<Hypothesis> label_frames(const FrameAnalysis& analysis, double n_std) {
  std::vector<Hypothesis> labels;
  labels.reserve(analysis.frames.size());
  for (const auto& f : analysis.frames) labels.push_back(classify_frame(f, analysis.config, n_std));
  return labels;
}

std::vector<Segment> segments_at(const FrameAnalysis& analysis, double n_std) {
  if (analysis.frames.empty()) return {};
  SegmentAssembler assembler(analysis.config, analysis.frame_duration_s(), analysis.provisional_frames);
  for (const auto& f : analysis.frames) assembler.push(classify_frame(f, analysis.config, n_std), f.power);
  assembler.finish();
  return assembler.take();
}

// ---------------------------------------------------------------------------

namespace {

std::variant<SlidingMin, SlidingMax> make_extremum(const FloorConfig& floor, int window) {
  if (floor.mode == FloorMode::erosion) return SlidingMin(window);
  return SlidingMax(window);
}

}  // namespace

Detector::Detector(const DetectorConfig& config, int sample_rate)
    : config_((config.validate(), config)),
      sample_rate_(sample_rate),
      half_window_(static_cast<std::size_t>(floor_window_frames(config.floor, sample_rate, config.frame_samples) / 2)),
      lookahead_(std::max(half_window_, static_cast<std::size_t>(config.superblock_frames - 1))),
      extremum_(make_extremum(config.floor, floor_window_frames(config.floor, sample_rate, config.frame_samples))),
      assembler_(config, static_cast<double>(config.frame_samples) / sample_rate, half_window_) {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  frame_buf_.reserve(static_cast<std::size_t>(config.frame_samples));
  scratch_.resize(static_cast<std::size_t>(config.superblock_frames));
}

void Detector::push(std::span<const double> samples) {
  if (finished_) throw std::logic_error("Detector::push after finish");
  for (double x : samples) {
    frame_buf_.push_back(x);
    if (static_cast<int>(frame_buf_.size()) == config_.frame_samples) {
      const double p = frame_power(frame_buf_);
      frame_buf_.clear();
      on_power(p);
    }
  }
}

void Detector::on_power(double power) {
  powers_.push_back(power);
  ++powers_seen_;
  double extremum = 0.0;
  const bool ready = std::visit([&](auto& f) { return f.push(power, extremum); }, extremum_);
  if (ready) on_floor(extremum);
  finalize_ready(false);
  track_memory();
}

void Detector::on_floor(double extremum) { floors_.push_back(floor_from_extremum(extremum, config_.floor)); }

FrameFeatures Detector::features(std::size_t j) const {
  FrameFeatures f;
  f.power = powers_[j - powers_base_];
  f.p_est = floors_[j - floors_base_];
  const auto k = static_cast<std::size_t>(config_.superblock_frames);
  const std::optional<std::size_t> total = finished_ ? std::optional<std::size_t>(powers_seen_) : std::nullopt;
  if (const auto s = superblock_start(j, k, config_.sliding_superblocks, total)) {
    for (std::size_t i = 0; i < k; ++i) scratch_[i] = powers_[*s + i - powers_base_];
    const SuperblockStats st = window_stats(scratch_, *s);
    f.p_k = st.p_k;
    f.q_k = st.q_k;
    f.has_superblock = true;
  }
  return f;
}

void Detector::finalize_ready(bool at_end) {
  while (next_final_ < powers_seen_ && (at_end || next_final_ + lookahead_ < powers_seen_)) {
    const std::size_t j = next_final_;
    const FrameFeatures f = features(j);
    assembler_.push(classify_frame(f, config_, config_.floor.n_std), f.power);
    ++next_final_;

    const std::size_t keep_from = next_final_ >= static_cast<std::size_t>(config_.superblock_frames)
                                      ? next_final_ - static_cast<std::size_t>(config_.superblock_frames)
                                      : 0;
    while (powers_base_ < keep_from) {
      powers_.pop_front();
      ++powers_base_;
    }
    while (floors_base_ < next_final_) {
      floors_.pop_front();
      ++floors_base_;
    }
  }
}

void Detector::track_memory() {
  const std::size_t ext = std::visit([](const auto& f) { return f.buffered(); }, extremum_);
  peak_buffered_ = std::max(peak_buffered_, powers_.size() + floors_.size() + ext);
}

std::vector<Segment> Detector::finish() {
  if (!finished_) {
    finished_ = true;
    for (double e : std::visit([](auto& f) { return f.finish(); }, extremum_)) on_floor(e);
    track_memory();
    finalize_ready(true);
    assembler_.finish();
  }
  return assembler_.take();
}

std::vector<Segment> detect(const AudioStream& stream, const DetectorConfig& config) {
  Detector detector(config, stream.sample_rate);
  detector.push(stream.samples);
  return detector.finish();
}

}  // namespace sno
