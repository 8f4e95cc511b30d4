#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sno/audio.hpp"
#include "sno/calibration.hpp"
#include "sno/detector.hpp"
#include "sno/eval.hpp"

namespace sno::cli {

enum class OutputFormat { csv, json, raven };

OutputFormat parse_output_format(const std::string& s);
std::string to_string(OutputFormat f);
FloorMode parse_floor_mode(const std::string& s);
std::string to_string(FloorMode m);

/// Merged view of every module's settings plus run options.
struct RunConfig {
  IngestConfig ingest;
  DetectorConfig detector;
  FuzzyConfig fuzzy;
  double grid_min = 0.0;
  double grid_max = 12.0;
  int grid_points = 25;
  OddsSpec odds;
  std::optional<double> clamp_eps;
  std::uint64_t seed = 1;
  int jobs = 1;
  OutputFormat output_format = OutputFormat::csv;

  /// Throws ConfigError when a field breaks its module invariants.
  void validate() const;
  std::vector<double> grid() const { return make_grid(grid_min, grid_max, grid_points); }
};

/// Overlays keys present in `j` onto `config`. Records "<key>" for every key
/// taken from the file in `touched` when given.
void apply_json(RunConfig& config, const nlohmann::json& j, std::vector<std::string>* touched = nullptr);
nlohmann::json to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path, std::vector<std::string>* touched = nullptr);

// Segment tables -----------------------------------------------------------

/// `start_s,end_s,label,peak_power,mean_power`, six decimals.
void write_segments_csv(std::ostream& out, std::span<const Segment> segments);
void write_segments_json(std::ostream& out, std::span<const Segment> segments);
/// Tab-separated `Selection`, `Begin Time (s)`, `End Time (s)`.
void write_segments_raven(std::ostream& out, std::span<const Segment> segments);
void write_segments(std::ostream& out, std::span<const Segment> segments, OutputFormat format);

/// Rewrites `id,posterior` rows with recalibrated posteriors.
void recalibrate_csv(std::istream& in, std::ostream& out, const OddsSpec& odds, std::optional<double> clamp_eps);

struct BenchReport {
  double audio_s = 0.0;
  double wall_s = 0.0;
  std::size_t frames = 0;
  std::size_t segments = 0;

  double realtime_factor() const { return wall_s > 0.0 ? audio_s / wall_s : 0.0; }
};

/// Detection over `duration_s` of in-memory white noise; generation is not
/// timed. Best of `repeats` runs.
BenchReport run_bench(double duration_s, const DetectorConfig& config, int sample_rate, std::uint64_t seed,
                      int repeats = 1);

/// Entry point. Exit codes: 0 success, 1 runtime error, 2 usage or
/// configuration error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace sno::cli
