#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "attnfiqa/error.hpp"
#include "attnfiqa/scoring.hpp"
#include "support.hpp"

using namespace attnfiqa;

namespace {

AttentionCapture capture_of(std::vector<Matrix> heads) {
  AttentionCapture cap;
  cap.block = 1;
  cap.heads = std::move(heads);
  return cap;
}

Matrix filled(std::size_t n, float v) {
  Matrix m(n, n);
  for (auto& x : m.values()) x = v;
  return m;
}

double loop_sum(const AttentionCapture& cap) {
  double s = 0.0;
  for (const Matrix& a : cap.heads)
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j);
  return s;
}

// Quartile oracle written out by index: position q(n-1), split into floor and fraction.
double indexed_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - double(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

}  // namespace

TEST_CASE("flatten_attention layout") {
  CHECK(flatten_attention(capture_of({Matrix{{3}}, Matrix{{5}}})) == std::vector<float>{3, 5});
  CHECK(flatten_attention(capture_of({Matrix{{1, 2}, {3, 4}}})) == std::vector<float>{1, 2, 3, 4});
  const auto two = flatten_attention(capture_of({Matrix{{1, 2}, {3, 4}}, Matrix{{5, 6}, {7, 8}}}));
  CHECK(two == std::vector<float>{1, 2, 3, 4, 5, 6, 7, 8});

  testing::Rng rng(41);
  const AttentionCapture cap = testing::random_capture(rng, 4, 9);
  const auto v = flatten_attention(cap);
  REQUIRE(v.size() == 4 * 81);
  double s = 0.0;
  for (float x : v) s += x;
  const double want = loop_sum(cap);
  CHECK(std::abs(s - want) <= 1e-4 * std::max(1.0, std::abs(want)));
}

TEST_CASE("aggregate: hand arithmetic on [1,2,3,4]") {
  const std::vector<float> v{1, 2, 3, 4};
  CHECK(aggregate(v, Metric::kMean) == 2.5);
  CHECK(aggregate(v, Metric::kMax) == 4.0);
  CHECK(aggregate(v, Metric::kMedian) == 2.5);
  // Population std = sqrt(1.25) = 1.118034; inverse 0.894427.
  CHECK(aggregate(v, Metric::kInvStd) == doctest::Approx(0.894427191).epsilon(1e-9));
  CHECK(aggregate(std::vector<float>{4, 1, 3}, Metric::kMedian) == 3.0);
}

TEST_CASE("aggregate: constant vector") {
  const std::vector<float> c(10, -1.75f);
  CHECK(aggregate(c, Metric::kMean) == -1.75);
  CHECK(aggregate(c, Metric::kMax) == -1.75);
  CHECK(aggregate(c, Metric::kMedian) == -1.75);
  CHECK_THROWS_AS(aggregate(c, Metric::kInvStd), DegenerateError);
  CHECK_THROWS_AS(aggregate(std::vector<float>{}, Metric::kMean), ShapeError);
}

TEST_CASE("concat mean equals the explicit double sum (property)") {
  testing::Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const AttentionCapture cap = testing::random_capture(rng, 1 + trial % 8, 1 + trial % 13, -20.0f, 20.0f);
    const double n = double(cap.num_heads() * cap.num_tokens() * cap.num_tokens());
    const double want = loop_sum(cap) / n;
    const double got = concat_quality(cap, Metric::kMean).value;
    CHECK(std::abs(got - want) <= 1e-6 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("per-head quality") {
  const AttentionCapture cap = capture_of({filled(3, 1.0f), filled(3, 3.0f)});
  CHECK(per_head_quality(cap, 1, Metric::kMean).value == 1.0);
  CHECK(per_head_quality(cap, 2, Metric::kMean).value == 3.0);
  CHECK(concat_quality(cap, Metric::kMean).value == 2.0);
  CHECK(per_head_quality(cap, 2, Metric::kMean).strategy == Strategy::per_head(2));
  CHECK_THROWS_AS(per_head_quality(cap, 0, Metric::kMean), IndexError);
  CHECK_THROWS_AS(per_head_quality(cap, 3, Metric::kMean), IndexError);

  testing::Rng rng(43);
  const AttentionCapture r = testing::random_capture(rng, 3, 7);
  for (std::size_t h = 1; h <= 3; ++h) {
    double s = 0.0;
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) s += r.heads[h - 1](i, j);
    CHECK(std::abs(per_head_quality(r, h, Metric::kMean).value - s / 49.0) <= 1e-6);
  }
}

TEST_CASE("average of heads") {
  CHECK(avg_of_heads_quality(capture_of({filled(2, 1.0f), filled(2, 3.0f)}), Metric::kMean).value == 2.0);

  // Maxima 5 and 9: averaging per-head maxima gives 7, concatenation gives 9.
  const AttentionCapture cap = capture_of({Matrix{{0, 5}, {1, 2}}, Matrix{{9, 0}, {3, 4}}});
  CHECK(avg_of_heads_quality(cap, Metric::kMax).value == 7.0);
  CHECK(concat_quality(cap, Metric::kMax).value == 9.0);
}

TEST_CASE("mean of equal-size head means equals the concatenated mean (property)") {
  testing::Rng rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const AttentionCapture cap = testing::random_capture(rng, 1 + trial % 8, 2 + trial % 11, -50.0f, 50.0f);
    const double a = avg_of_heads_quality(cap, Metric::kMean).value;
    const double c = concat_quality(cap, Metric::kMean).value;
    CHECK(std::abs(a - c) <= 1e-6 * std::max(1.0, std::abs(c)));
  }
}

TEST_CASE("score_capture dispatch and names") {
  testing::Rng rng(45);
  const AttentionCapture cap = testing::random_capture(rng, 4, 5);
  for (Metric m : kAllMetrics) {
    CHECK(score_capture(cap, Strategy::concat(), m).value == concat_quality(cap, m).value);
    CHECK(score_capture(cap, Strategy::per_head(3), m).value == per_head_quality(cap, 3, m).value);
    CHECK(score_capture(cap, Strategy::avg_of_heads(), m).value == avg_of_heads_quality(cap, m).value);
    CHECK(parse_metric(metric_name(m)) == m);
  }
  CHECK(parse_strategy("concat") == Strategy::concat());
  CHECK(parse_strategy("head:3") == Strategy::per_head(3));
  CHECK(parse_strategy("avg_of_heads") == Strategy::avg_of_heads());
  CHECK(Strategy::per_head(7).name() == "head:7");
  CHECK_THROWS_AS(parse_metric("average"), FormatError);
  CHECK_THROWS_AS(parse_strategy("head:0"), FormatError);
  CHECK_THROWS_AS(parse_strategy("head:x"), FormatError);
  CHECK_THROWS_AS(parse_strategy("sum"), FormatError);
}

TEST_CASE("scoring is order-independent over a batch") {
  testing::Rng rng(46);
  std::vector<AttentionCapture> batch;
  for (int i = 0; i < 6; ++i) batch.push_back(testing::random_capture(rng, 2, 4));
  std::vector<double> forward, backward;
  for (const auto& c : batch) forward.push_back(concat_quality(c, Metric::kMean).value);
  for (auto it = batch.rbegin(); it != batch.rend(); ++it) backward.push_back(concat_quality(*it, Metric::kMean).value);
  std::reverse(backward.begin(), backward.end());
  CHECK(forward == backward);
}

TEST_CASE("normalize_scores") {
  CHECK(normalize_scores(std::vector<double>{2, 4, 6}) == std::vector<double>{0, 0.5, 1});
  CHECK(normalize_scores(std::vector<double>{7, 7}) == std::vector<double>{0.5, 0.5});
  CHECK(normalize_scores(std::vector<double>{3}) == std::vector<double>{0.5});

  testing::Rng rng(47);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> raw(2 + trial);
    for (auto& x : raw) x = u(rng);
    const auto norm = normalize_scores(raw);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      CHECK((norm[i] >= 0.0 && norm[i] <= 1.0));
      for (std::size_t j = 0; j < raw.size(); ++j)
        if (raw[i] < raw[j]) CHECK(norm[i] < norm[j]);
    }
  }
}

TEST_CASE("group statistics") {
  const std::vector<double> one{3, 1, 2};
  const std::vector<std::string> g1(3, "a");
  const auto s1 = group_statistics(one, g1);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].count == 3);
  CHECK(s1[0].mean == 2.0);
  CHECK(s1[0].median == 2.0);
  CHECK(s1[0].min == 1.0);
  CHECK(s1[0].max == 3.0);

  const std::vector<double> shifted{0.25, 1.25, 4.5, 5.5, 2.0, 3.0};
  const std::vector<std::string> labels{"A", "B", "A", "B", "A", "B"};
  const auto s2 = group_statistics(shifted, labels);
  REQUIRE(s2.size() == 2);
  CHECK(s2[0].group == "A");
  CHECK(s2[1].mean == doctest::Approx(s2[0].mean + 1.0));
  CHECK(s2[1].median == doctest::Approx(s2[0].median + 1.0));

  testing::Rng rng(48);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> seven(7);
  for (auto& x : seven) x = u(rng);
  const auto s3 = group_statistics(seven, std::vector<std::string>(7, "g"));
  CHECK(s3[0].q1 == doctest::Approx(indexed_quantile(seven, 0.25)));
  CHECK(s3[0].q3 == doctest::Approx(indexed_quantile(seven, 0.75)));
  CHECK(s3[0].median == doctest::Approx(indexed_quantile(seven, 0.5)));

  CHECK_THROWS_AS(group_statistics(one, std::vector<std::string>(2, "a")), ShapeError);
  CHECK_THROWS_AS(group_statistics(one, std::vector<std::string>{"a", "", "b"}), FormatError);
}

TEST_CASE("quantile_sorted on hand values") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 4.0);
  CHECK(quantile_sorted(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_sorted(v, 0.5) == doctest::Approx(2.5));
}
