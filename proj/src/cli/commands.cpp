#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sno/cli.hpp"
#include "sno/error.hpp"
#include "sno/rng.hpp"
#include "sno/synth.hpp"

namespace sno::cli {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;
namespace fs = std::filesystem;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Bad command-line usage discovered after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code_for(std::exception_ptr e, std::string& message) {
  try {
    std::rethrow_exception(e);
  } catch (const UsageError& x) {
    message = x.what();
    return 2;
  } catch (const ConfigError& x) {
    message = x.what();
    return 2;
  } catch (const std::invalid_argument& x) {
    message = x.what();
    return 2;
  } catch (const std::exception& x) {
    message = x.what();
    return 1;
  } catch (...) {
    message = "unknown error";
    return 1;
  }
}

/// A setting that can come from a flag, an SNO_* variable, the config file or
/// the built-in default, in that order of precedence.
struct Override {
  Override(std::string f, std::string e, std::string k, std::string d)
      : flag(std::move(f)), env(std::move(e)), key(std::move(k)), description(std::move(d)) {}

  std::string flag;
  std::string env;
  std::string key;  // dotted config key
  std::string description;
  std::string value;
  CLI::Option* option = nullptr;
};

json::json_pointer pointer_for(const std::string& key) {
  std::string p = "/" + key;
  for (char& ch : p) {
    if (ch == '.') ch = '/';
  }
  return json::json_pointer(p);
}

void apply_override(RunConfig& config, const Override& o) {
  const json current = to_json(config);
  const auto ptr = pointer_for(o.key);
  json value;
  if (current.at(ptr).is_string()) {
    value = o.value;
  } else if (const auto slash = o.value.find('/'); slash != std::string::npos && current.at(ptr).is_number_float()) {
    // Ratios such as 1/19 for odds.
    try {
      std::size_t a = 0;
      std::size_t b = 0;
      const std::string num = o.value.substr(0, slash);
      const std::string den = o.value.substr(slash + 1);
      const double n = std::stod(num, &a);
      const double d = std::stod(den, &b);
      if (a != num.size() || b != den.size()) throw std::invalid_argument(o.value);
      value = n / d;
    } catch (const std::exception&) {
      throw ConfigError(o.flag + ": '" + o.value + "' is not a number or ratio");
    }
  } else {
    try {
      value = json::parse(o.value);
    } catch (const json::parse_error&) {
      throw ConfigError(o.flag + ": '" + o.value + "' is not a number");
    }
    if (!value.is_number()) throw ConfigError(o.flag + ": '" + o.value + "' is not a number");
    if (current.at(ptr).is_number_integer() && !value.is_number_integer()) {
      throw ConfigError(o.flag + ": '" + o.value + "' is not an integer");
    }
    if (current.at(ptr).is_number_unsigned() && !value.is_number_unsigned()) {
      throw ConfigError(o.flag + ": '" + o.value + "' is not a non-negative integer");
    }
  }
  json patch;
  patch[ptr] = value;
  apply_json(config, patch);
}

struct Context {
  RunConfig config;
  std::map<std::string, std::string> sources;  // key -> default|file|env|flag
  bool quiet = false;

  bool explicit_seed() const { return sources.at("run.seed") != "default"; }
  void log(const std::string& line) const {
    if (!quiet) std::cerr << "sno: " << line << '\n';
  }
};

template <typename F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::unique_ptr<std::ostream> open_output(const std::string& path) {
  if (path.empty() || path == "-") return nullptr;
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

/// Writes through `path` when given, else stdout.
template <typename F>
void emit(const std::string& path, F&& write) {
  if (auto file = open_output(path)) {
    write(*file);
    file->flush();
    if (!*file) throw std::runtime_error("write to " + path + " failed");
  } else {
    write(std::cout);
    std::cout.flush();
  }
}

std::string extension_for(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return ".csv";
    case OutputFormat::json: return ".json";
    case OutputFormat::raven: return ".txt";
  }
  return ".csv";
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

// detect ---------------------------------------------------------------------

struct DetectArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string output_dir;
  bool no_preprocess = false;
};

struct DetectResult {
  std::vector<Segment> segments;
  double audio_s = 0.0;
  double wall_s = 0.0;
  std::string rendered;
  std::exception_ptr error;
};

std::vector<Segment> detect_stream(const AudioStream& input, const RunConfig& config, bool preprocess_input) {
  const AudioStream stream = preprocess_input ? preprocess(input, config.ingest) : input;
  Detector detector(config.detector, stream.sample_rate);
  constexpr std::size_t kBlock = 1 << 16;
  const std::span<const double> all(stream.samples);
  for (std::size_t i = 0; i < all.size(); i += kBlock) detector.push(all.subspan(i, std::min(kBlock, all.size() - i)));
  return detector.finish();
}

int cmd_detect(const Context& ctx, const DetectArgs& args) {
  const RunConfig& cfg = ctx.config;
  if (!args.output.empty() && args.inputs.size() > 1) {
    throw UsageError("--output takes a single input; use --output-dir for several");
  }
  if (args.output.empty() && args.output_dir.empty() && args.inputs.size() > 1) {
    throw UsageError("several inputs need --output-dir");
  }
  if (!args.output_dir.empty()) fs::create_directories(args.output_dir);

  std::vector<DetectResult> results(args.inputs.size());
  parallel_for(args.inputs.size(), cfg.jobs, [&](std::size_t i) {
    DetectResult& r = results[i];
    try {
      const AudioStream input = read_wav(args.inputs[i]);
      const auto t0 = Clock::now();
      r.segments = detect_stream(input, cfg, !args.no_preprocess);
      r.wall_s = seconds_since(t0);
      r.audio_s = input.duration_s();
      std::ostringstream table;
      write_segments(table, r.segments, cfg.output_format);
      r.rendered = table.str();
      if (!args.output_dir.empty()) {
        const fs::path out = fs::path(args.output_dir) / (fs::path(args.inputs[i]).stem().string() +
                                                          extension_for(cfg.output_format));
        emit(out.string(), [&](std::ostream& os) { os << r.rendered; });
      }
    } catch (...) {
      r.error = std::current_exception();
    }
  });

  int code = 0;
  double audio = 0.0;
  double wall = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const DetectResult& r = results[i];
    if (r.error) {
      std::string message;
      code = std::max(code, exit_code_for(r.error, message));
      std::cerr << "sno: " << args.inputs[i] << ": " << message << '\n';
      continue;
    }
    if (args.output_dir.empty()) emit(args.output, [&](std::ostream& os) { os << r.rendered; });
    audio += r.audio_s;
    wall += r.wall_s;
    const double rate = r.wall_s > 0.0 ? r.audio_s / r.wall_s : 0.0;
    ctx.log(args.inputs[i] + ": " + std::to_string(r.segments.size()) + " segments, " + fmt(r.audio_s) +
            " s audio in " + fmt(r.wall_s, 4) + " s (" + fmt(rate, 1) + " audio-s/s)");
  }
  if (results.size() > 1) {
    ctx.log("total: " + fmt(audio) + " s audio, " + fmt(wall, 4) + " s processing over " +
            std::to_string(results.size()) + " files");
  }
  return code;
}

// evaluate -------------------------------------------------------------------

struct EvaluateArgs {
  std::string detected;
  std::string truth;
  std::string output;
};

int cmd_evaluate(const Context& ctx, const EvaluateArgs& args) {
  const Annotation detected = read_annotation(args.detected);
  const Annotation truth = read_annotation(args.truth);
  const PrecisionRecall pr = precision_recall(detected.segments, truth.segments, ctx.config.fuzzy);
  emit(args.output, [&](std::ostream& os) {
    if (ctx.config.output_format == OutputFormat::json) {
      os << json{{"precision", pr.precision}, {"recall", pr.recall}, {"ramp_s", ctx.config.fuzzy.ramp_s}}.dump(2)
         << '\n';
    } else {
      os << "precision,recall\n" << fmt(pr.precision, 6) << ',' << fmt(pr.recall, 6) << '\n';
    }
  });
  return 0;
}

// sweep ----------------------------------------------------------------------

struct SweepArgs {
  std::string input;
  std::string truth;
  std::string scenario;
  std::string output;
  std::optional<double> snr_db;
  bool no_preprocess = false;
};

int cmd_sweep(const Context& ctx, const SweepArgs& args) {
  const RunConfig& cfg = ctx.config;
  if (cfg.output_format == OutputFormat::raven) throw UsageError("sweep writes csv or json");
  AudioStream stream;
  Annotation truth;
  if (!args.scenario.empty()) {
    if (!args.input.empty() || !args.truth.empty()) throw UsageError("--scenario replaces the input and --truth");
    Scenario scenario = read_scenario(args.scenario);
    if (ctx.explicit_seed()) scenario.seed = cfg.seed;
    SynthResult synth = generate(scenario);
    stream = std::move(synth.stream);
    truth = std::move(synth.truth);
  } else {
    if (args.input.empty() || args.truth.empty()) throw UsageError("sweep needs an input WAV with --truth, or --scenario");
    stream = read_wav(args.input);
    truth = read_annotation(args.truth);
  }

  if (!args.no_preprocess && stream.sample_rate != cfg.ingest.target_rate) {
    stream = decimate(stream, cfg.ingest.target_rate, cfg.ingest.taps);
  }
  if (args.snr_db) {
    const BandpassSpec* band = args.no_preprocess ? nullptr : &cfg.ingest.bandpass;
    stream = add_noise(stream, *args.snr_db, truth, cfg.seed, band);
  }
  if (!args.no_preprocess) stream = bandpass(stream, cfg.ingest.bandpass);

  const FrameAnalysis analysis = analyze(stream, cfg.detector);
  const std::vector<double> grid = cfg.grid();
  const std::vector<EvalPoint> points = sweep(analysis, truth, grid, cfg.fuzzy);
  emit(args.output, [&](std::ostream& os) {
    if (cfg.output_format == OutputFormat::json) {
      write_pr_json(os, points);
    } else {
      write_pr_csv(os, points);
    }
  });

  const EvalPoint* best = nullptr;
  for (const EvalPoint& p : points) {
    if (!best || std::min(p.precision, p.recall) > std::min(best->precision, best->recall)) best = &p;
  }
  if (best) {
    ctx.log("best n_std " + fmt(best->n_std) + ": precision " + fmt(best->precision) + ", recall " +
            fmt(best->recall));
  }
  return 0;
}

// synth ----------------------------------------------------------------------

struct SynthArgs {
  std::string scenario;
  std::string out_wav;
  std::string out_csv;
  std::string out_scenario;
  std::string encoding = "float32";
  RandomScenarioSpec random;
};

int cmd_synth(const Context& ctx, SynthArgs args) {
  WavEncoding encoding;
  if (args.encoding == "float32") {
    encoding = WavEncoding::float32;
  } else if (args.encoding == "pcm16") {
    encoding = WavEncoding::pcm16;
  } else {
    throw UsageError("--encoding must be pcm16 or float32");
  }

  Scenario scenario;
  if (!args.scenario.empty()) {
    scenario = read_scenario(args.scenario);
    if (ctx.explicit_seed()) scenario.seed = ctx.config.seed;
  } else {
    args.random.seed = ctx.config.seed;
    scenario = random_scenario(args.random);
  }
  const SynthResult r = generate(scenario);
  write_wav(args.out_wav, r.stream, encoding);
  emit(args.out_csv, [&](std::ostream& os) { write_annotation_csv(os, r.truth); });
  if (!args.out_scenario.empty()) {
    emit(args.out_scenario, [&](std::ostream& os) { os << scenario_to_json(scenario).dump(2) << '\n'; });
  }
  ctx.log("synth: " + fmt(r.stream.duration_s()) + " s, " + std::to_string(r.truth.segments.size()) + " events, " +
          std::to_string(r.snaps.size()) + " snaps");
  if (r.clipped_samples > 0) ctx.log("warning: " + std::to_string(r.clipped_samples) + " samples clipped");
  return 0;
}

// calibrate ------------------------------------------------------------------

struct CalibrateArgs {
  std::string input;
  std::string output;
};

int cmd_calibrate(const Context& ctx, const CalibrateArgs& args) {
  const RunConfig& cfg = ctx.config;
  std::ostringstream buffer;
  if (args.input == "-") {
    recalibrate_csv(std::cin, buffer, cfg.odds, cfg.clamp_eps);
  } else {
    std::ifstream in(args.input);
    if (!in) throw std::runtime_error("cannot open " + args.input);
    recalibrate_csv(in, buffer, cfg.odds, cfg.clamp_eps);
  }
  emit(args.output, [&](std::ostream& os) { os << buffer.str(); });
  return 0;
}

// bench ----------------------------------------------------------------------

struct BenchArgs {
  double duration_s = 3600.0;
  int repeats = 3;
  int sample_rate = 8000;
  std::string output;
};

int cmd_bench(const Context& ctx, const BenchArgs& args) {
  if (!(args.duration_s >= 0.0)) throw UsageError("--duration-s must be >= 0");
  if (args.repeats < 1) throw UsageError("--repeat must be >= 1");
  const BenchReport r = run_bench(args.duration_s, ctx.config.detector, args.sample_rate, ctx.config.seed, args.repeats);
  emit(args.output, [&](std::ostream& os) {
    if (ctx.config.output_format == OutputFormat::json) {
      os << json{{"audio_s", r.audio_s},
                 {"wall_s", r.wall_s},
                 {"realtime_factor", r.realtime_factor()},
                 {"frames", r.frames},
                 {"segments", r.segments}}
                .dump(2)
         << '\n';
    } else {
      os << "audio_s,wall_s,realtime_factor,frames,segments\n"
         << fmt(r.audio_s) << ',' << fmt(r.wall_s, 6) << ',' << fmt(r.realtime_factor(), 1) << ',' << r.frames << ','
         << r.segments << '\n';
    }
  });
  return 0;
}

}  // namespace

BenchReport run_bench(double duration_s, const DetectorConfig& config, int sample_rate, std::uint64_t seed,
                      int repeats) {
  BenchReport report;
  if (!(duration_s > 0.0)) return report;
  config.validate();
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  std::vector<double> samples(n);
  Pcg64 rng(seed, kNoiseStream);
  const double sigma = std::sqrt(1e-5);
  for (double& x : samples) x = sigma * rng.normal();

  report.audio_s = static_cast<double>(n) / sample_rate;
  report.wall_s = std::numeric_limits<double>::infinity();
  constexpr std::size_t kBlock = 1 << 16;
  const std::span<const double> all(samples);
  for (int rep = 0; rep < std::max(1, repeats); ++rep) {
    const auto t0 = Clock::now();
    Detector detector(config, sample_rate);
    for (std::size_t i = 0; i < n; i += kBlock) detector.push(all.subspan(i, std::min(kBlock, n - i)));
    const auto segments = detector.finish();
    const double wall = seconds_since(t0);
    if (wall < report.wall_s) report.wall_s = wall;
    report.frames = detector.frames_seen();
    report.segments = segments.size();
  }
  return report;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Streaming acoustic event detector with an adaptive noise floor", "sno"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON config file [env: SNO_CONFIG]")->check(CLI::ExistingFile);
  app.add_flag("-q,--quiet", quiet, "No startup log or summaries on stderr");

  std::vector<Override> overrides{
      {"--seed", "SNO_SEED", "run.seed", "Random seed"},
      {"--jobs", "SNO_JOBS", "run.jobs", "Worker threads for multi-file runs"},
      {"--output-format", "SNO_OUTPUT_FORMAT", "run.output_format", "csv, json or raven"},
      {"--timeframe-s", "SNO_TIMEFRAME_S", "floor.timeframe_s", "Noise-floor window length (s)"},
      {"--alpha-f-db", "SNO_ALPHA_F_DB", "floor.alpha_f_db", "Floor offset above the local minimum (dB)"},
      {"--n-std", "SNO_N_STD", "floor.n_std", "Threshold in standard deviations"},
      {"--floor-mode", "SNO_FLOOR_MODE", "floor.mode", "erosion or dilation"},
      {"--frame-samples", "SNO_FRAME_SAMPLES", "detector.frame_samples", "Samples per frame"},
      {"--superblock-frames", "SNO_SUPERBLOCK_FRAMES", "detector.superblock_frames", "Frames per superblock"},
      {"--min-event-s", "SNO_MIN_EVENT_S", "detector.min_event_s", "Shortest reported event (s)"},
      {"--merge-gap-s", "SNO_MERGE_GAP_S", "detector.merge_gap_s", "Merge events closer than this (s)"},
      {"--ramp-s", "SNO_RAMP_S", "eval.ramp_s", "Fuzzy boundary ramp width (s), 0 for crisp"},
      {"--grid-min", "SNO_GRID_MIN", "eval.grid_min", "First n_std of the sweep grid"},
      {"--grid-max", "SNO_GRID_MAX", "eval.grid_max", "Last n_std of the sweep grid"},
      {"--grid-points", "SNO_GRID_POINTS", "eval.grid_points", "Sweep grid size"},
      {"--train-odds", "SNO_TRAIN_ODDS", "calibration.train_odds", "Prior odds at training time"},
      {"--deploy-odds", "SNO_DEPLOY_ODDS", "calibration.deploy_odds", "Prior odds at deployment"},
      {"--clamp-eps", "SNO_CLAMP_EPS", "calibration.clamp_eps", "Clamp posteriors to [eps, 1 - eps]"},
  };
  for (Override& o : overrides) {
    o.option = app.add_option(o.flag, o.value, o.description + " [env: " + o.env + "]");
  }

  DetectArgs detect_args;
  auto* detect = app.add_subcommand("detect", "Detect events in WAV files");
  detect->add_option("inputs", detect_args.inputs, "Input WAV files")->required()->check(CLI::ExistingFile);
  detect->add_option("-o,--output", detect_args.output, "Segment table path (single input)");
  detect->add_option("--output-dir", detect_args.output_dir, "Directory for one segment table per input");
  detect->add_flag("--no-preprocess", detect_args.no_preprocess, "Skip decimation and band-pass filtering");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Precision and recall of a segmentation against ground truth");
  evaluate->add_option("--detected", eval_args.detected, "Detected segments (CSV or selection table)")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--truth", eval_args.truth, "Ground truth (CSV or selection table)")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("-o,--output", eval_args.output, "Report path");

  SweepArgs sweep_args;
  double sweep_snr = 0.0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Precision/recall over the n_std grid");
  sweep_cmd->add_option("input", sweep_args.input, "Input WAV")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--truth", sweep_args.truth, "Ground truth for the input")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--scenario", sweep_args.scenario, "Synthesize the input from a scenario file")
      ->check(CLI::ExistingFile);
  auto* snr_opt = sweep_cmd->add_option("--snr-db", sweep_snr, "Add noise down to this in-band SNR first");
  sweep_cmd->add_flag("--no-preprocess", sweep_args.no_preprocess, "Skip decimation and band-pass filtering");
  sweep_cmd->add_option("-o,--output", sweep_args.output, "Report path");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a synthetic WAV and its annotation");
  synth->add_option("--scenario", synth_args.scenario, "Scenario file; default is a random layout")
      ->check(CLI::ExistingFile);
  synth->add_option("--out-wav", synth_args.out_wav, "Output WAV")->required();
  synth->add_option("--out-csv", synth_args.out_csv, "Output annotation CSV")->required();
  synth->add_option("--out-scenario", synth_args.out_scenario, "Also write the rendered scenario");
  synth->add_option("--encoding", synth_args.encoding, "pcm16 or float32")->capture_default_str();
  synth->add_option("--duration-s", synth_args.random.duration_s, "Random layout: length (s)")->capture_default_str();
  synth->add_option("--events", synth_args.random.events, "Random layout: event count")->capture_default_str();
  synth->add_option("--snr-db", synth_args.random.snr_db, "Random layout: event SNR (dB)")->capture_default_str();
  synth->add_option("--snap-rate-hz", synth_args.random.snap_rate_hz, "Random layout: snap rate (1/s)")
      ->capture_default_str();

  CalibrateArgs cal_args;
  auto* calibrate = app.add_subcommand("calibrate", "Recalibrate posteriors for new prior odds");
  calibrate->add_option("input", cal_args.input, "CSV with a posterior column, or - for stdin")->required();
  calibrate->add_option("-o,--output", cal_args.output, "Output CSV");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Time detection on in-memory noise");
  bench->add_option("--duration-s", bench_args.duration_s, "Audio length (s)")->required();
  bench->add_option("--repeat", bench_args.repeats, "Report the fastest of this many runs")->capture_default_str();
  bench->add_option("--sample-rate", bench_args.sample_rate, "Sample rate (Hz)")->capture_default_str();
  bench->add_option("-o,--output", bench_args.output, "Report path");

  auto* show = app.add_subcommand("show-config", "Print the effective configuration as JSON");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, std::cerr);
    return code == 0 ? 0 : 2;
  }

  Context ctx;
  ctx.quiet = quiet;
  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv("SNO_CONFIG"); env && *env) config_path = env;
    }
    std::vector<std::string> touched;
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw ConfigError("config file " + config_path + " does not exist");
      ctx.config = load_config(config_path, &touched);
    }
    for (const Override& o : overrides) ctx.sources[o.key] = "default";
    for (const std::string& key : touched) {
      if (ctx.sources.count(key)) ctx.sources[key] = "file";
    }
    for (Override& o : overrides) {
      if (o.option->count() > 0) {
        ctx.sources[o.key] = "flag";
      } else if (const char* env = std::getenv(o.env.c_str()); env && *env) {
        o.value = env;
        ctx.sources[o.key] = "env";
      } else {
        continue;
      }
      apply_override(ctx.config, o);
    }
    ctx.config.validate();
    if (snr_opt->count() > 0) sweep_args.snr_db = sweep_snr;

    if (!config_path.empty()) ctx.log("config file " + config_path);
    const json effective = to_json(ctx.config);
    for (const Override& o : overrides) {
      ctx.log("  " + o.key + " = " + effective.at(pointer_for(o.key)).dump() + " (" + ctx.sources[o.key] + ")");
    }
    for (const std::string& w : ctx.config.detector.floor.warnings()) ctx.log("warning: " + w);

    if (detect->parsed()) return cmd_detect(ctx, detect_args);
    if (evaluate->parsed()) return cmd_evaluate(ctx, eval_args);
    if (sweep_cmd->parsed()) return cmd_sweep(ctx, sweep_args);
    if (synth->parsed()) return cmd_synth(ctx, synth_args);
    if (calibrate->parsed()) return cmd_calibrate(ctx, cal_args);
    if (bench->parsed()) return cmd_bench(ctx, bench_args);
    if (show->parsed()) {
      std::cout << effective.dump(2) << '\n';
      return 0;
    }
    return 2;
  } catch (...) {
    std::string message;
    const int code = exit_code_for(std::current_exception(), message);
    std::cerr << "sno: error: " << message << '\n';
    return code;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("sno");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sno::cli
