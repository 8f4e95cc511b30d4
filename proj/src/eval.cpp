#include "sno/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sno/error.hpp"

namespace sno {

std::vector<Interval> normalize(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& i) { return !(i.end_s > i.start_s); });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start_s < b.start_s; });
  std::vector<Interval> out;
  for (const Interval& i : intervals) {
    if (!out.empty() && i.start_s <= out.back().end_s) {
      out.back().end_s = std::max(out.back().end_s, i.end_s);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<Interval> to_intervals(std::span<const Segment> segments) {
  std::vector<Interval> out;
  out.reserve(segments.size());
  for (const Segment& s : segments) {
    if (s.label == SegmentLabel::detection) out.push_back({s.start_s, s.end_s});
  }
  return normalize(std::move(out));
}

namespace {

double crisp_overlap(std::span<const Interval> a, std::span<const Interval> b) {
  double total = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].start_s, b[j].start_s);
    const double hi = std::min(a[i].end_s, b[j].end_s);
    if (hi > lo) total += hi - lo;
    if (a[i].end_s < b[j].end_s) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

double crisp_duration(std::span<const Interval> a) {
  double total = 0.0;
  for (const Interval& i : a) total += i.duration();
  return total;
}

// Trapezoid membership of one interval.
double membership(const Interval& seg, double ramp, double t) {
  const double rise = (t - (seg.start_s - ramp / 2)) / ramp;
  const double fall = ((seg.end_s + ramp / 2) - t) / ramp;
  return std::clamp(std::min(rise, fall), 0.0, 1.0);
}

struct Line {
  double v0;
  double v1;
};

// Membership lines of every interval whose support overlaps [x0, x1]. On such
// an elementary interval each trapezoid is linear.
void active_lines(std::span<const Interval> set, double ramp, double x0, double x1, std::size_t& cursor,
                  std::vector<Line>& out) {
  out.clear();
  while (cursor < set.size() && set[cursor].end_s + ramp / 2 <= x0) ++cursor;
  for (std::size_t i = cursor; i < set.size() && set[i].start_s - ramp / 2 < x1; ++i) {
    out.push_back({membership(set[i], ramp, x0), membership(set[i], ramp, x1)});
  }
}

double envelope(const std::vector<Line>& lines, double u) {
  double m = 0.0;
  for (const Line& l : lines) m = std::max(m, l.v0 + (l.v1 - l.v0) * u);
  return m;
}

void corners(std::span<const Interval> set, double ramp, std::vector<double>& out) {
  for (const Interval& i : set) {
    out.push_back(i.start_s - ramp / 2);
    out.push_back(i.start_s + ramp / 2);
    out.push_back(i.end_s - ramp / 2);
    out.push_back(i.end_s + ramp / 2);
    out.push_back((i.start_s + i.end_s) / 2);
  }
}

// Integral of min(mu_a, mu_b); a null `b` stands for membership 1 everywhere.
double fuzzy_integral(std::span<const Interval> a, const std::span<const Interval>* b, double ramp) {
  std::vector<double> xs;
  corners(a, ramp, xs);
  if (b) corners(*b, ramp, xs);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::size_t ca = 0;
  std::size_t cb = 0;
  std::vector<Line> la;
  std::vector<Line> lb;
  std::vector<double> us;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double x0 = xs[k];
    const double x1 = xs[k + 1];
    active_lines(a, ramp, x0, x1, ca, la);
    if (la.empty()) continue;
    if (b) {
      active_lines(*b, ramp, x0, x1, cb, lb);
      if (lb.empty()) continue;
    } else {
      lb.assign(1, Line{1.0, 1.0});
    }
    // Both envelopes and their minimum are linear between pairwise crossings.
    la.push_back({0.0, 0.0});
    us.assign({0.0, 1.0});
    std::vector<Line> all(la);
    all.insert(all.end(), lb.begin(), lb.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        const double d0 = all[i].v0 - all[j].v0;
        const double d1 = all[i].v1 - all[j].v1;
        if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) us.push_back(d0 / (d0 - d1));
      }
    }
    std::sort(us.begin(), us.end());
    double prev_u = 0.0;
    double prev_f = std::min(envelope(la, 0.0), envelope(lb, 0.0));
    for (std::size_t q = 1; q < us.size(); ++q) {
      const double u = us[q];
      const double f = std::min(envelope(la, u), envelope(lb, u));
      total += 0.5 * (prev_f + f) * (u - prev_u) * (x1 - x0);
      prev_u = u;
      prev_f = f;
    }
  }
  return total;
}

}  // namespace

double fuzzy_duration(std::span<const Interval> segments, const FuzzyConfig& config) {
  if (config.ramp_s <= 0.0) return crisp_duration(segments);
  return fuzzy_integral(segments, nullptr, config.ramp_s);
}

double fuzzy_intersection(std::span<const Interval> detected, std::span<const Interval> truth,
                          const FuzzyConfig& config) {
  if (config.ramp_s < 0.0) throw std::invalid_argument("ramp_s must be >= 0");
  if (config.ramp_s == 0.0) return crisp_overlap(detected, truth);
  return fuzzy_integral(detected, &truth, config.ramp_s);
}

PrecisionRecall precision_recall(std::span<const Interval> detected, std::span<const Interval> truth,
                                 const FuzzyConfig& config) {
  const double inter = fuzzy_intersection(detected, truth, config);
  const double s = fuzzy_duration(detected, config);
  const double c = fuzzy_duration(truth, config);
  PrecisionRecall pr;
  if (detected.empty()) {
    pr.precision = truth.empty() ? 1.0 : 0.0;
  } else {
    pr.precision = s > 0.0 ? std::min(1.0, inter / s) : 0.0;
  }
  if (truth.empty()) {
    pr.recall = detected.empty() ? 1.0 : 0.0;
  } else {
    pr.recall = c > 0.0 ? std::min(1.0, inter / c) : 0.0;
  }
  return pr;
}

std::vector<double> make_grid(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return g;
}

std::vector<double> default_grid() { return make_grid(0.0, 12.0, 25); }

std::vector<EvalPoint> sweep(const FrameAnalysis& analysis, const Annotation& truth,
                             std::span<const double> n_std_grid, const FuzzyConfig& fuzzy) {
  if (n_std_grid.empty()) throw std::invalid_argument("empty n_std grid");
  if (!std::is_sorted(n_std_grid.begin(), n_std_grid.end())) {
    throw std::invalid_argument("n_std grid must be ascending");
  }
  std::vector<EvalPoint> out;
  out.reserve(n_std_grid.size());
  for (double n : n_std_grid) {
    const auto detected = to_intervals(segments_at(analysis, n));
    const PrecisionRecall pr = precision_recall(detected, truth.segments, fuzzy);
    out.push_back({n, pr.precision, pr.recall});
  }
  return out;
}

std::vector<EvalPoint> sweep(const AudioStream& stream, const Annotation& truth, const DetectorConfig& config,
                             std::span<const double> n_std_grid, const FuzzyConfig& fuzzy) {
  if (n_std_grid.empty()) throw std::invalid_argument("empty n_std grid");
  return sweep(analyze(stream, config), truth, n_std_grid, fuzzy);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

double parse_time(const std::string& text, std::size_t line_no) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw FormatError("line " + std::to_string(line_no) + ": bad time value '" + t + "'");
  }
  return v;
}

Annotation read_table(std::istream& in, char sep, const std::string& begin_col, const std::string& end_col,
                      const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, sep);
  std::ptrdiff_t bi = -1;
  std::ptrdiff_t ei = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = trim(header[i]);
    if (h == begin_col) bi = static_cast<std::ptrdiff_t>(i);
    if (h == end_col) ei = static_cast<std::ptrdiff_t>(i);
  }
  if (bi < 0 || ei < 0) throw FormatError("annotation header lacks '" + begin_col + "' / '" + end_col + "'");

  Annotation ann;
  ann.source = source;
  std::vector<Interval> raw;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, sep);
    const auto need = static_cast<std::size_t>(std::max(bi, ei));
    if (fields.size() <= need) throw FormatError("line " + std::to_string(line_no) + ": too few columns");
    const double s = parse_time(fields[static_cast<std::size_t>(bi)], line_no);
    const double e = parse_time(fields[static_cast<std::size_t>(ei)], line_no);
    if (e < s) throw FormatError("line " + std::to_string(line_no) + ": end before start");
    raw.push_back({s, e});
  }
  ann.segments = normalize(std::move(raw));
  return ann;
}

}  // namespace

Annotation read_annotation_csv(std::istream& in, const std::string& source) {
  return read_table(in, ',', "start_s", "end_s", source);
}

Annotation read_selection_table(std::istream& in, const std::string& source) {
  return read_table(in, '\t', "Begin Time (s)", "End Time (s)", source);
}

Annotation read_annotation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::filesystem::filesystem_error("cannot open annotation", path,
                                            std::make_error_code(std::errc::no_such_file_or_directory));
  }
  std::string first;
  std::getline(in, first);
  in.clear();
  in.seekg(0);
  if (first.find('\t') != std::string::npos && first.find("Begin Time (s)") != std::string::npos) {
    return read_selection_table(in, path.string());
  }
  return read_annotation_csv(in, path.string());
}

void write_annotation_csv(std::ostream& out, const Annotation& annotation) {
  out << "start_s,end_s\n";
  const auto old = out.precision(17);
  for (const Interval& i : annotation.segments) out << i.start_s << ',' << i.end_s << '\n';
  out.precision(old);
}

void write_pr_csv(std::ostream& out, std::span<const EvalPoint> points) {
  out << "n_std,precision,recall\n" << std::fixed << std::setprecision(6);
  for (const EvalPoint& p : points) out << p.n_std << ',' << p.precision << ',' << p.recall << '\n';
  out << std::defaultfloat;
}

void write_pr_json(std::ostream& out, std::span<const EvalPoint> points) {
  nlohmann::json j = nlohmann::json::array();
  for (const EvalPoint& p : points) j.push_back({{"n_std", p.n_std}, {"precision", p.precision}, {"recall", p.recall}});
  out << j.dump(2) << '\n';
}

}  // namespace sno
