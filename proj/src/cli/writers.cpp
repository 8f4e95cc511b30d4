#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "sno/cli.hpp"
#include "sno/error.hpp"

namespace sno::cli {

namespace {

const char* label_name(SegmentLabel l) { return l == SegmentLabel::detection ? "detection" : "silence"; }

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

void write_segments_csv(std::ostream& out, std::span<const Segment> segments) {
  out << "start_s,end_s,label,peak_power,mean_power\n";
  for (const Segment& s : segments) {
    out << fixed6(s.start_s) << ',' << fixed6(s.end_s) << ',' << label_name(s.label) << ',' << fixed6(s.peak_power)
        << ',' << fixed6(s.mean_power) << '\n';
  }
}

void write_segments_json(std::ostream& out, std::span<const Segment> segments) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Segment& s : segments) {
    arr.push_back({{"start_s", s.start_s},
                   {"end_s", s.end_s},
                   {"label", label_name(s.label)},
                   {"peak_power", s.peak_power},
                   {"mean_power", s.mean_power},
                   {"provisional", s.provisional}});
  }
  out << arr.dump(2) << '\n';
}

void write_segments_raven(std::ostream& out, std::span<const Segment> segments) {
  out << "Selection\tBegin Time (s)\tEnd Time (s)\n";
  int n = 1;
  for (const Segment& s : segments) out << n++ << '\t' << fixed6(s.start_s) << '\t' << fixed6(s.end_s) << '\n';
}

void write_segments(std::ostream& out, std::span<const Segment> segments, OutputFormat format) {
  switch (format) {
    case OutputFormat::csv: write_segments_csv(out, segments); break;
    case OutputFormat::json: write_segments_json(out, segments); break;
    case OutputFormat::raven: write_segments_raven(out, segments); break;
  }
}

void recalibrate_csv(std::istream& in, std::ostream& out, const OddsSpec& odds, std::optional<double> clamp_eps) {
  odds.validate();
  std::string line;
  if (!std::getline(in, line)) throw FormatError("score CSV is empty");
  const auto header = split(line, ',');
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == "posterior") col = i;
  }
  if (col == header.size()) throw FormatError("score CSV header lacks a 'posterior' column");
  out << line.substr(0, line.find_last_not_of('\r') + 1) << '\n';

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw FormatError("score CSV row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(header.size()));
    }
    const std::string v = trim(fields[col]);
    double p = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), p);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
      throw FormatError("score CSV row " + std::to_string(row) + ": bad posterior '" + v + "'");
    }
    fields[col] = shortest(recalibrate(p, odds, clamp_eps));
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  }
}

}  // namespace sno::cli
