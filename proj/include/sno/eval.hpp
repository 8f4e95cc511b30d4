#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sno/audio.hpp"
#include "sno/detector.hpp"

namespace sno {

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - start_s; }
  bool operator==(const Interval&) const = default;
};

/// Ground-truth segmentation. `segments` is kept normalized: sorted,
/// non-overlapping, touching or overlapping intervals merged.
struct Annotation {
  std::vector<Interval> segments;
  std::string source;
};

struct FuzzyConfig {
  // Width of the linear membership ramp centred on each boundary; 0 is crisp.
  double ramp_s = 0.0;
};

struct EvalPoint {
  double n_std = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Sorts, drops empty intervals and merges overlapping or touching ones.
std::vector<Interval> normalize(std::vector<Interval> intervals);

std::vector<Interval> to_intervals(std::span<const Segment> segments);

/// Integral of the membership envelope of one segmentation (its fuzzy duration).
double fuzzy_duration(std::span<const Interval> segments, const FuzzyConfig& config);

/// Integral over time of min(mu_S, mu_C), where each segmentation's membership
/// is the max of trapezoids with ramps of width ramp_s centred on the segment
/// boundaries. Inputs must be normalized. Exact (piecewise-linear integration).
double fuzzy_intersection(std::span<const Interval> detected, std::span<const Interval> truth,
                          const FuzzyConfig& config);

/// precision = |S n C| / |S|, recall = |S n C| / |C|. An empty S gives
/// precision 1 when C is empty too, else 0; likewise an empty C gives recall 1
/// only when S is empty.
PrecisionRecall precision_recall(std::span<const Interval> detected, std::span<const Interval> truth,
                                 const FuzzyConfig& config);

/// Uniform n_std grid, `points` values from lo to hi inclusive.
std::vector<double> make_grid(double lo, double hi, int points);
/// 25 points over [0, 12].
std::vector<double> default_grid();

/// One precision/recall point per grid value. Frame features are computed once
/// and re-thresholded per n_std. Throws std::invalid_argument on an empty or
/// non-ascending grid.
std::vector<EvalPoint> sweep(const AudioStream& stream, const Annotation& truth, const DetectorConfig& config,
                             std::span<const double> n_std_grid, const FuzzyConfig& fuzzy = {});

std::vector<EvalPoint> sweep(const FrameAnalysis& analysis, const Annotation& truth,
                             std::span<const double> n_std_grid, const FuzzyConfig& fuzzy = {});

/// CSV with a header containing `start_s` and `end_s` (other columns ignored).
Annotation read_annotation_csv(std::istream& in, const std::string& source = {});
/// Tab-separated selection table with "Begin Time (s)" / "End Time (s)" columns.
Annotation read_selection_table(std::istream& in, const std::string& source = {});
/// Picks the reader from the header line.
Annotation read_annotation(const std::filesystem::path& path);

/// `start_s,end_s` with round-trip precision.
void write_annotation_csv(std::ostream& out, const Annotation& annotation);

void write_pr_csv(std::ostream& out, std::span<const EvalPoint> points);
void write_pr_json(std::ostream& out, std::span<const EvalPoint> points);

}  // namespace sno
