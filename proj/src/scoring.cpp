#include "attnfiqa/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "attnfiqa/error.hpp"
#include "attnfiqa/kernels.hpp"

namespace attnfiqa {

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kMean:
      return "mean";
    case Metric::kMax:
      return "max";
    case Metric::kMedian:
      return "median";
    case Metric::kInvStd:
      return "inv_std";
  }
  return "unknown";
}

Metric parse_metric(std::string_view s) {
  for (Metric m : kAllMetrics) {
    if (metric_name(m) == s) return m;
  }
  throw FormatError("unknown metric '" + std::string(s) + "' (expected mean, max, median, inv_std)");
}

std::string Strategy::name() const {
  switch (kind) {
    case Kind::kConcat:
      return "concat";
    case Kind::kPerHead:
      return "head:" + std::to_string(head);
    case Kind::kAvgOfHeads:
      return "avg_of_heads";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "concat") return Strategy::concat();
  if (s == "avg_of_heads") return Strategy::avg_of_heads();
  if (s.starts_with("head:")) {
    const auto digits = s.substr(5);
    std::size_t h = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), h);
    if (res.ec == std::errc{} && res.ptr == digits.data() + digits.size() && h >= 1) {
      return Strategy::per_head(h);
    }
  }
  throw FormatError("unknown strategy '" + std::string(s) + "' (expected concat, head:<h>, avg_of_heads)");
}

std::vector<float> flatten_attention(const AttentionCapture& cap) {
  cap.validate();
  std::vector<float> v;
  v.reserve(cap.num_heads() * cap.heads.front().size());
  for (const auto& h : cap.heads) v.insert(v.end(), h.values().begin(), h.values().end());
  return v;
}

double aggregate(std::span<const float> v, Metric metric) {
  if (v.empty()) throw ShapeError("cannot aggregate an empty attention vector");
  const KernelTable& k = active_kernels();
  switch (metric) {
    case Metric::kMean:
      return k.sum(v.data(), v.size()) / static_cast<double>(v.size());
    case Metric::kMax:
      return k.max_value(v.data(), v.size());
    case Metric::kMedian: {
      std::vector<float> tmp(v.begin(), v.end());
      const std::size_t mid = tmp.size() / 2;
      std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid), tmp.end());
      const double upper = tmp[mid];
      if (tmp.size() % 2 == 1) return upper;
      const double lower = *std::max_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid));
      return 0.5 * (lower + upper);
    }
    case Metric::kInvStd: {
      const double mean = k.sum(v.data(), v.size()) / static_cast<double>(v.size());
      const double sd = std::sqrt(k.sum_sq_dev(v.data(), v.size(), mean) / static_cast<double>(v.size()));
      if (sd < 1e-12) throw DegenerateError("inv_std undefined: attention values have zero dispersion");
      return 1.0 / sd;
    }
  }
  throw Error("unknown metric");
}

QualityScore concat_quality(const AttentionCapture& cap, Metric metric) {
  return {aggregate(flatten_attention(cap), metric), Strategy::concat(), metric, cap.block};
}

QualityScore per_head_quality(const AttentionCapture& cap, std::size_t head, Metric metric) {
  cap.validate();
  if (head < 1 || head > cap.num_heads()) {
    throw IndexError("head " + std::to_string(head) + " outside [1, " + std::to_string(cap.num_heads()) + "]");
  }
  return {aggregate(cap.heads[head - 1].values(), metric), Strategy::per_head(head), metric, cap.block};
}

QualityScore avg_of_heads_quality(const AttentionCapture& cap, Metric metric) {
  cap.validate();
  double total = 0.0;
  for (std::size_t h = 1; h <= cap.num_heads(); ++h) total += per_head_quality(cap, h, metric).value;
  return {total / static_cast<double>(cap.num_heads()), Strategy::avg_of_heads(), metric, cap.block};
}

QualityScore score_capture(const AttentionCapture& cap, const Strategy& strategy, Metric metric) {
  switch (strategy.kind) {
    case Strategy::Kind::kConcat:
      return concat_quality(cap, metric);
    case Strategy::Kind::kPerHead:
      return per_head_quality(cap, strategy.head, metric);
    case Strategy::Kind::kAvgOfHeads:
      return avg_of_heads_quality(cap, metric);
  }
  throw Error("unknown strategy");
}

std::vector<double> normalize_scores(std::span<const double> scores) {
  if (scores.empty()) return {};
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double min = *lo;
  const double range = *hi - *lo;
  std::vector<double> out(scores.size(), 0.5);
  if (range > 0.0) {
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - min) / range;
  }
  return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<GroupSummary> group_statistics(std::span<const double> scores,
                                           std::span<const std::string> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("group_statistics: " + std::to_string(scores.size()) + " scores but " +
                     std::to_string(labels.size()) + " labels");
  }
  std::map<std::string, std::vector<double>> groups;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i].empty()) throw FormatError("empty group label at row " + std::to_string(i));
    groups[labels[i]].push_back(scores[i]);
  }
  std::vector<GroupSummary> out;
  for (auto& [label, values] : groups) {
    std::sort(values.begin(), values.end());
    GroupSummary g;
    g.group = label;
    g.count = values.size();
    double total = 0.0;
    for (double v : values) total += v;
    g.mean = total / static_cast<double>(values.size());
    g.median = quantile_sorted(values, 0.5);
    g.q1 = quantile_sorted(values, 0.25);
    g.q3 = quantile_sorted(values, 0.75);
    g.min = values.front();
    g.max = values.back();
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace attnfiqa
