#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <variant>
#include <vector>

#include "sno/audio.hpp"
#include "sno/noise_floor.hpp"

namespace sno {

enum class Hypothesis { h0, h1 };

struct DetectorConfig {
  int frame_samples = 256;
  int superblock_frames = 4;
  double min_event_s = 0.5;
  double merge_gap_s = 0.2;
  FloorConfig floor;
  // Per-frame labels from a superblock centred on each frame; false gives one
  // label per block of K frames.
  bool sliding_superblocks = true;
  // Test the raw frame power against P_thr instead of the superblock mean.
  bool frame_power_test = false;

  void validate() const;
};

struct SuperblockStats {
  double p_k = 0.0;
  double q_k = 0.0;
  std::size_t start_frame = 0;
};

enum class SegmentLabel { detection, silence };

struct Segment {
  double start_s = 0.0;
  double end_s = 0.0;
  SegmentLabel label = SegmentLabel::detection;
  double peak_power = 0.0;
  double mean_power = 0.0;
  // Started while the noise-floor window was still truncated by the stream start.
  bool provisional = false;
};

/// Powers of consecutive non-overlapping N-sample frames; a trailing partial
/// frame is dropped.
std::vector<double> frame_stream(const AudioStream& stream, int frame_samples);

/// Mean and unbiased variance of a window of powers via the recursive estimator.
SuperblockStats window_stats(std::span<const double> powers, std::size_t start_frame = 0);

/// Sliding: one record per window of K consecutive powers (records for windows
/// ending at frames K-1 .. M-1). Block: one record per complete block of K.
std::vector<SuperblockStats> superblock_stats(std::span<const double> powers, int superblock_frames, bool sliding);

/// H0 iff p_k < p_thr and q_k < q_thr.
Hypothesis classify(const SuperblockStats& stats, const Thresholds& thr);

/// Turns per-frame labels into detection segments: maximal H1 runs, merged
/// across gaps of at most merge_gap_s, then runs shorter than min_event_s are
/// dropped. `powers` (optional, aligned with labels) fill peak/mean power.
std::vector<Segment> assemble_segments(std::span<const Hypothesis> labels, const DetectorConfig& config,
                                       double frame_duration_s, std::span<const double> powers = {});

/// Streaming version of assemble_segments.
class SegmentAssembler {
 public:
  SegmentAssembler(const DetectorConfig& config, double frame_duration_s, std::size_t provisional_frames = 0);

  void push(Hypothesis label, double power);
  void finish();

  const std::vector<Segment>& segments() const { return segments_; }
  std::vector<Segment> take();

 private:
  void close();

  double frame_duration_s_;
  double min_event_s_;
  std::size_t merge_gap_frames_;
  std::size_t provisional_frames_;

  std::size_t index_ = 0;
  bool open_ = false;
  std::size_t start_ = 0;
  std::size_t last_h1_ = 0;
  double sum_ = 0.0;
  double peak_ = 0.0;
  std::size_t count_ = 0;
  std::size_t gap_ = 0;
  double gap_sum_ = 0.0;
  double gap_peak_ = 0.0;
  std::vector<Segment> segments_;
};

/// n_std-independent per-frame quantities.
struct FrameFeatures {
  double power = 0.0;
  double p_k = 0.0;
  double q_k = 0.0;
  double p_est = 0.0;  // noise floor estimate, doubles as sigma_x2
  bool has_superblock = false;
};

Hypothesis classify_frame(const FrameFeatures& frame, const DetectorConfig& config, double n_std);

/// Whole-stream frame analysis. Thresholding for any n_std is then cheap,
/// which is what the PR sweep relies on.
struct FrameAnalysis {
  int sample_rate = 0;
  DetectorConfig config;
  std::vector<FrameFeatures> frames;
  std::size_t provisional_frames = 0;

  double frame_duration_s() const { return static_cast<double>(config.frame_samples) / sample_rate; }
};

FrameAnalysis analyze(const AudioStream& stream, const DetectorConfig& config);

std::vector<Hypothesis> label_frames(const FrameAnalysis& analysis, double n_std);

std::vector<Segment> segments_at(const FrameAnalysis& analysis, double n_std);

/// Single-pass detector. Samples are pushed in blocks of any size; memory is
/// bounded by the floor window and superblock length, not the stream length.
/// Frame labels are final once the centred floor window has been seen, so
/// segments trail the input by half a timeframe.
class Detector {
 public:
  Detector(const DetectorConfig& config, int sample_rate);

  void push(std::span<const double> samples);
  /// Flushes the tail and returns all segments not yet taken.
  std::vector<Segment> finish();
  /// Segments completed so far.
  std::vector<Segment> take_segments() { return assembler_.take(); }

  std::size_t frames_seen() const { return powers_seen_; }
  /// Largest number of buffered per-frame values held at any time.
  std::size_t peak_buffered() const { return peak_buffered_; }

 private:
  void on_power(double power);
  void on_floor(double extremum);
  void finalize_ready(bool at_end);
  FrameFeatures features(std::size_t j) const;
  void track_memory();

  DetectorConfig config_;
  int sample_rate_;
  std::size_t half_window_;
  std::size_t lookahead_;

  double frame_acc_ = 0.0;
  int frame_fill_ = 0;

  std::variant<SlidingMin, SlidingMax> extremum_;
  std::vector<double> frame_buf_;
  mutable std::vector<double> scratch_;
  std::deque<double> powers_;
  std::size_t powers_base_ = 0;
  std::size_t powers_seen_ = 0;
  std::deque<double> floors_;
  std::size_t floors_base_ = 0;
  std::size_t next_final_ = 0;
  bool finished_ = false;

  SegmentAssembler assembler_;
  std::size_t peak_buffered_ = 0;
};

/// Runs the streaming detector over a whole (preprocessed) stream.
std::vector<Segment> detect(const AudioStream& stream, const DetectorConfig& config);

}  // namespace sno
