#include <doctest.h>

#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "scenarios.hpp"
#include "sno/error.hpp"
#include "sno/eval.hpp"
#include "sno/rng.hpp"

using namespace sno;

namespace {

std::vector<Interval> random_segments(Pcg64& rng, int count, double span) {
  std::vector<Interval> v;
  for (int i = 0; i < count; ++i) {
    const double a = rng.uniform(0.0, span);
    v.push_back({a, a + rng.uniform(0.01, span / 5)});
  }
  return normalize(v);
}

}  // namespace

TEST_CASE("normalize sorts, merges and drops empty intervals") {
  const auto n = normalize({{5, 6}, {1, 2}, {2, 3}, {2.5, 2.7}, {4, 4}, {7, 6}});
  REQUIRE(n.size() == 2);
  CHECK(n[0] == Interval{1, 3});
  CHECK(n[1] == Interval{5, 6});
}

TEST_CASE("crisp precision and recall") {
  const std::vector<Interval> truth{{0, 1}, {2, 3}};
  SUBCASE("one detection spanning grouped calls") {
    const std::vector<Interval> det{{0, 3}};
    const auto pr = precision_recall(det, truth, {});
    CHECK(pr.precision == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(pr.recall == 1.0);
  }
  SUBCASE("half of one call") {
    const std::vector<Interval> det{{0.5, 1.0}};
    const auto pr = precision_recall(det, truth, {});
    CHECK(pr.precision == 1.0);
    CHECK(pr.recall == doctest::Approx(0.25));
  }
  SUBCASE("identical segmentations") {
    const auto pr = precision_recall(truth, truth, {});
    CHECK(pr.precision == 1.0);
    CHECK(pr.recall == 1.0);
  }
}

TEST_CASE("empty segmentation conventions") {
  const std::vector<Interval> none;
  const std::vector<Interval> some{{1, 2}};
  auto pr = precision_recall(none, none, {});
  CHECK(pr.precision == 1.0);
  CHECK(pr.recall == 1.0);
  pr = precision_recall(none, some, {});
  CHECK(pr.precision == 0.0);
  CHECK(pr.recall == 0.0);
  pr = precision_recall(some, none, {});
  CHECK(pr.precision == 0.0);
  CHECK(pr.recall == 0.0);
}

TEST_CASE("crisp mode matches a millisecond grid") {
  Pcg64 rng(77, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random_segments(rng, 1 + trial % 5, 20.0);
    const auto c = random_segments(rng, 1 + trial % 4, 20.0);
    const auto pr = precision_recall(s, c, {});
    const auto ref = oracle::crisp_grid(s, c, 0.0, 25.0);
    CHECK(pr.precision == doctest::Approx(ref.precision).epsilon(1e-3));
    CHECK(pr.recall == doctest::Approx(ref.recall).epsilon(1e-3));
  }
}

TEST_CASE("fuzzy ramp matches trapezoid-rule integration") {
  const std::vector<Interval> truth{{1.0, 2.0}, {4.0, 4.3}};
  const std::vector<Interval> det{{1.2, 2.6}, {3.9, 4.1}};
  const FuzzyConfig f{0.5};
  const auto pr = precision_recall(det, truth, f);
  const auto ref = oracle::fuzzy_trapezoid(det, truth, 0.5, 0.0, 6.0, 1e-3);
  CHECK(pr.precision == doctest::Approx(ref.precision).epsilon(1e-6));
  CHECK(pr.recall == doctest::Approx(ref.recall).epsilon(1e-6));
  // A segment shorter than the ramp never reaches full membership.
  const auto short_seg = std::vector<Interval>{{4.0, 4.3}};
  CHECK(fuzzy_duration(short_seg, f) == doctest::Approx(0.32).epsilon(1e-12));
  CHECK(fuzzy_duration(std::vector<Interval>{{1.0, 2.0}}, f) == doctest::Approx(1.0).epsilon(1e-12));

  Pcg64 rng(78, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_segments(rng, 3, 10.0);
    const auto c = random_segments(rng, 3, 10.0);
    const double r = rng.uniform(0.05, 1.0);
    const auto a = precision_recall(s, c, {r});
    const auto b = oracle::fuzzy_trapezoid(s, c, r, -2.0, 15.0, 1e-3);
    CHECK(a.precision == doctest::Approx(b.precision).epsilon(1e-5));
    CHECK(a.recall == doctest::Approx(b.recall).epsilon(1e-5));
  }
}

TEST_CASE("fuzzy scores approach crisp ones as the ramp shrinks") {
  Pcg64 rng(79, 1);
  const auto s = random_segments(rng, 4, 10.0);
  const auto c = random_segments(rng, 4, 10.0);
  const auto crisp = precision_recall(s, c, {});
  const auto tiny = precision_recall(s, c, {1e-7});
  CHECK(tiny.precision == doctest::Approx(crisp.precision).epsilon(1e-5));
  CHECK(tiny.recall == doctest::Approx(crisp.recall).epsilon(1e-5));
  const auto same = precision_recall(c, c, {0.5});
  CHECK(same.precision == doctest::Approx(1.0));
  CHECK(same.recall == doctest::Approx(1.0));
}

TEST_CASE("sweep grid") {
  const auto g = default_grid();
  REQUIRE(g.size() == 25);
  CHECK(g.front() == 0.0);
  CHECK(g[1] == doctest::Approx(0.5));
  CHECK(g.back() == 12.0);
  CHECK(make_grid(2.0, 2.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(make_grid(0, 1, 0), std::invalid_argument);
}

TEST_CASE("sweep output and recall monotonicity") {
  const SynthResult r = generate(testdata::mixed_scenario(4));
  const AudioStream s = testdata::filtered(r.stream);
  const auto grid = default_grid();
  const auto pts = sweep(s, r.truth, DetectorConfig{}, grid);
  REQUIRE(pts.size() == grid.size());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].n_std == grid[i]);
    CHECK(pts[i].recall <= pts[i - 1].recall + 1e-12);
  }
  const FrameAnalysis a = analyze(s, DetectorConfig{});
  const auto direct = precision_recall(to_intervals(segments_at(a, 3.0)), r.truth.segments, {});
  const auto via = sweep(a, r.truth, std::vector<double>{3.0});
  CHECK(via[0].precision == direct.precision);
  CHECK(via[0].recall == direct.recall);

  CHECK_THROWS_AS(sweep(a, r.truth, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(a, r.truth, std::vector<double>{2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("annotation readers") {
  SUBCASE("csv with extra columns") {
    std::istringstream in("label,start_s,end_s\ncall,2.0,3.0\ncall,0.5,1.0\n\ncall,2.5,3.5\n");
    const Annotation a = read_annotation_csv(in);
    REQUIRE(a.segments.size() == 2);
    CHECK(a.segments[0] == Interval{0.5, 1.0});
    CHECK(a.segments[1] == Interval{2.0, 3.5});
  }
  SUBCASE("selection table") {
    std::istringstream in(
        "Selection\tView\tChannel\tBegin Time (s)\tEnd Time (s)\tLow Freq (Hz)\n"
        "1\tSpectrogram 1\t1\t1.25\t2.5\t200\n"
        "2\tSpectrogram 1\t1\t4.0\t4.75\t200\n");
    const Annotation a = read_selection_table(in);
    REQUIRE(a.segments.size() == 2);
    CHECK(a.segments[1] == Interval{4.0, 4.75});
  }
  SUBCASE("bad input") {
    std::istringstream no_cols("a,b\n1,2\n");
    CHECK_THROWS_AS(read_annotation_csv(no_cols), FormatError);
    std::istringstream bad_num("start_s,end_s\n1,x\n");
    CHECK_THROWS_AS(read_annotation_csv(bad_num), FormatError);
    std::istringstream reversed("start_s,end_s\n2,1\n");
    CHECK_THROWS_AS(read_annotation_csv(reversed), FormatError);
  }
  SUBCASE("csv round trip") {
    Annotation a;
    a.segments = {{0.1, 0.30000000000000004}, {1.0 / 3, 2.0}};
    std::ostringstream out;
    write_annotation_csv(out, a);
    std::istringstream in(out.str());
    CHECK(read_annotation_csv(in).segments == a.segments);
  }
}

TEST_CASE("precision-recall writers") {
  const std::vector<EvalPoint> pts{{0.0, 0.5, 1.0}, {0.5, 0.75, 0.875}};
  std::ostringstream csv;
  write_pr_csv(csv, pts);
  CHECK(csv.str() == "n_std,precision,recall\n0.000000,0.500000,1.000000\n0.500000,0.750000,0.875000\n");
  std::ostringstream json;
  write_pr_json(json, pts);
  CHECK(json.str().find("\"precision\"") != std::string::npos);
}
