#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include "sno/cli.hpp"
#include "sno/error.hpp"

namespace sno::cli {

using nlohmann::json;

OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "raven") return OutputFormat::raven;
  throw ConfigError("unknown output format '" + s + "' (csv|json|raven)");
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::raven: return "raven";
  }
  return "csv";
}

FloorMode parse_floor_mode(const std::string& s) {
  if (s == "erosion") return FloorMode::erosion;
  if (s == "dilation") return FloorMode::dilation;
  throw ConfigError("unknown floor mode '" + s + "' (erosion|dilation)");
}

std::string to_string(FloorMode m) { return m == FloorMode::erosion ? "erosion" : "dilation"; }

void RunConfig::validate() const {
  if (ingest.target_rate <= 0) throw ConfigError("ingest.target_rate must be positive");
  ingest.bandpass.validate();
  if (ingest.bandpass.design_rate != ingest.target_rate) {
    throw ConfigError("ingest.bandpass.design_rate must equal ingest.target_rate");
  }
  detector.validate();
  if (!(fuzzy.ramp_s >= 0.0)) throw ConfigError("eval.ramp_s must be >= 0");
  if (grid_points < 1) throw ConfigError("eval.grid_points must be >= 1");
  if (!(grid_min <= grid_max) || !std::isfinite(grid_min) || !std::isfinite(grid_max)) {
    throw ConfigError("eval grid bounds must be finite with grid_min <= grid_max");
  }
  if (grid_points > 1 && grid_min == grid_max) throw ConfigError("eval grid with several points needs grid_min < grid_max");
  try {
    odds.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("calibration: ") + e.what());
  }
  if (clamp_eps && !(*clamp_eps > 0.0 && *clamp_eps < 0.5)) {
    throw ConfigError("calibration.clamp_eps must lie in (0, 0.5)");
  }
  if (jobs < 1) throw ConfigError("run.jobs must be >= 1");
}

namespace {

class Reader {
 public:
  Reader(const json& j, std::string prefix, std::vector<std::string>* touched)
      : j_(j), prefix_(std::move(prefix)), touched_(touched) {
    if (!j_.is_object()) throw ConfigError("config section '" + prefix_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + name(key) + "': " + e.what());
    }
    if (touched_) touched_->push_back(name(key));
  }

  const json* section(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + name(key) + "'");
    }
  }

 private:
  const json& j_;
  std::string prefix_;
  std::vector<std::string>* touched_;
  std::set<std::string> seen_;
};

BiquadSection section_from_json(const json& j, std::size_t index) {
  if (!j.is_array() || j.size() != 6) {
    throw ConfigError("ingest.bandpass.sections[" + std::to_string(index) + "] must hold b0 b1 b2 a0 a1 a2");
  }
  const auto v = j.get<std::vector<double>>();
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

}  // namespace

void apply_json(RunConfig& c, const json& j, std::vector<std::string>* touched) {
  Reader root(j, "", touched);

  if (const json* s = root.section("ingest")) {
    Reader r(*s, "ingest", touched);
    r.get("target_rate", c.ingest.target_rate);
    if (const json* b = r.section("bandpass")) {
      Reader rb(*b, "ingest.bandpass", touched);
      rb.get("low_cut_hz", c.ingest.bandpass.low_cut_hz);
      rb.get("high_cut_hz", c.ingest.bandpass.high_cut_hz);
      rb.get("design_rate", c.ingest.bandpass.design_rate);
      if (const json* secs = rb.section("sections")) {
        if (!secs->is_array()) throw ConfigError("ingest.bandpass.sections must be an array");
        c.ingest.bandpass.sections.clear();
        for (std::size_t i = 0; i < secs->size(); ++i) {
          c.ingest.bandpass.sections.push_back(section_from_json((*secs)[i], i));
        }
        if (touched) touched->push_back("ingest.bandpass.sections");
      }
      rb.reject_unknown();
    }
    if (const json* t = r.section("decimation_taps")) {
      if (!t->is_object()) throw ConfigError("ingest.decimation_taps must map ratio -> taps");
      c.ingest.taps.by_ratio.clear();
      for (const auto& [key, taps] : t->items()) {
        int ratio = 0;
        try {
          std::size_t used = 0;
          ratio = std::stoi(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw ConfigError("ingest.decimation_taps key '" + key + "' is not an integer ratio");
        }
        if (ratio < 2) throw ConfigError("ingest.decimation_taps ratio must be >= 2");
        if (!taps.is_array() || taps.empty()) throw ConfigError("ingest.decimation_taps." + key + " must be non-empty");
        c.ingest.taps.by_ratio[ratio] = taps.get<std::vector<double>>();
      }
      if (touched) touched->push_back("ingest.decimation_taps");
    }
    r.reject_unknown();
  }

  if (const json* s = root.section("detector")) {
    Reader r(*s, "detector", touched);
    r.get("frame_samples", c.detector.frame_samples);
    r.get("superblock_frames", c.detector.superblock_frames);
    r.get("min_event_s", c.detector.min_event_s);
    r.get("merge_gap_s", c.detector.merge_gap_s);
    r.get("sliding_superblocks", c.detector.sliding_superblocks);
    r.get("frame_power_test", c.detector.frame_power_test);
    r.reject_unknown();
  }

  if (const json* s = root.section("floor")) {
    Reader r(*s, "floor", touched);
    FloorConfig& f = c.detector.floor;
    r.get("timeframe_s", f.timeframe_s);
    r.get("alpha_f_db", f.alpha_f_db);
    r.get("n_std", f.n_std);
    std::string mode = to_string(f.mode);
    r.get("mode", mode);
    f.mode = parse_floor_mode(mode);
    r.get("dilation_divisor_db", f.dilation_divisor_db);
    r.get("power_epsilon", f.power_epsilon);
    r.reject_unknown();
  }

  if (const json* s = root.section("eval")) {
    Reader r(*s, "eval", touched);
    r.get("ramp_s", c.fuzzy.ramp_s);
    r.get("grid_min", c.grid_min);
    r.get("grid_max", c.grid_max);
    r.get("grid_points", c.grid_points);
    r.reject_unknown();
  }

  if (const json* s = root.section("calibration")) {
    Reader r(*s, "calibration", touched);
    r.get("train_odds", c.odds.train_odds);
    r.get("deploy_odds", c.odds.deploy_odds);
    if (const json* e = r.section("clamp_eps")) {
      if (e->is_null()) {
        c.clamp_eps.reset();
      } else if (e->is_number()) {
        c.clamp_eps = e->get<double>();
      } else {
        throw ConfigError("calibration.clamp_eps must be a number or null");
      }
      if (touched) touched->push_back("calibration.clamp_eps");
    }
    r.reject_unknown();
  }

  if (const json* s = root.section("run")) {
    Reader r(*s, "run", touched);
    r.get("seed", c.seed);
    r.get("jobs", c.jobs);
    std::string format = to_string(c.output_format);
    r.get("output_format", format);
    c.output_format = parse_output_format(format);
    r.reject_unknown();
  }

  root.reject_unknown();
}

json to_json(const RunConfig& c) {
  json sections = json::array();
  for (const auto& s : c.ingest.bandpass.sections) sections.push_back({s.b0, s.b1, s.b2, s.a0, s.a1, s.a2});
  json taps = json::object();
  for (const auto& [ratio, t] : c.ingest.taps.by_ratio) taps[std::to_string(ratio)] = t;

  return {
      {"ingest",
       {{"target_rate", c.ingest.target_rate},
        {"bandpass",
         {{"low_cut_hz", c.ingest.bandpass.low_cut_hz},
          {"high_cut_hz", c.ingest.bandpass.high_cut_hz},
          {"design_rate", c.ingest.bandpass.design_rate},
          {"sections", sections}}},
        {"decimation_taps", taps}}},
      {"detector",
       {{"frame_samples", c.detector.frame_samples},
        {"superblock_frames", c.detector.superblock_frames},
        {"min_event_s", c.detector.min_event_s},
        {"merge_gap_s", c.detector.merge_gap_s},
        {"sliding_superblocks", c.detector.sliding_superblocks},
        {"frame_power_test", c.detector.frame_power_test}}},
      {"floor",
       {{"timeframe_s", c.detector.floor.timeframe_s},
        {"alpha_f_db", c.detector.floor.alpha_f_db},
        {"n_std", c.detector.floor.n_std},
        {"mode", to_string(c.detector.floor.mode)},
        {"dilation_divisor_db", c.detector.floor.dilation_divisor_db},
        {"power_epsilon", c.detector.floor.power_epsilon}}},
      {"eval",
       {{"ramp_s", c.fuzzy.ramp_s},
        {"grid_min", c.grid_min},
        {"grid_max", c.grid_max},
        {"grid_points", c.grid_points}}},
      {"calibration",
       {{"train_odds", c.odds.train_odds},
        {"deploy_odds", c.odds.deploy_odds},
        {"clamp_eps", c.clamp_eps ? json(*c.clamp_eps) : json(nullptr)}}},
      {"run", {{"seed", c.seed}, {"jobs", c.jobs}, {"output_format", to_string(c.output_format)}}},
  };
}

RunConfig load_config(const std::filesystem::path& path, std::vector<std::string>* touched) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  RunConfig c;
  apply_json(c, j, touched);
  c.validate();
  return c;
}

}  // namespace sno::cli
