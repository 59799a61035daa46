#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attnfiqa/vit.hpp"

namespace attnfiqa {

enum class Metric { kMean, kMax, kMedian, kInvStd };

inline constexpr Metric kAllMetrics[] = {Metric::kMean, Metric::kMax, Metric::kMedian, Metric::kInvStd};

std::string_view metric_name(Metric m);
/// Accepts mean, max, median, inv_std. Throws FormatError otherwise.
Metric parse_metric(std::string_view s);

/// How heads are combined before (concat) or after (avg_of_heads) aggregation.
struct Strategy {
  enum class Kind { kConcat, kPerHead, kAvgOfHeads };
  Kind kind = Kind::kConcat;
  std::size_t head = 0;  // 1-based, only for kPerHead

  static Strategy concat() { return {Kind::kConcat, 0}; }
  static Strategy per_head(std::size_t h) { return {Kind::kPerHead, h}; }
  static Strategy avg_of_heads() { return {Kind::kAvgOfHeads, 0}; }

  /// "concat", "head:<h>", "avg_of_heads"
  std::string name() const;
  friend bool operator==(const Strategy&, const Strategy&) = default;
};

Strategy parse_strategy(std::string_view s);

struct QualityScore {
  double value = 0.0;
  Strategy strategy;
  Metric metric = Metric::kMean;
  std::size_t block = 0;
};

/// All H * N^2 pre-softmax values, head-major then row-major.
std::vector<float> flatten_attention(const AttentionCapture& cap);

/// mean | max | median (even length: mean of the two middle values) |
/// inv_std (1 / population std; DegenerateError when std < 1e-12).
double aggregate(std::span<const float> v, Metric metric);

QualityScore concat_quality(const AttentionCapture& cap, Metric metric);
/// `head` is 1-based; IndexError outside [1, H].
QualityScore per_head_quality(const AttentionCapture& cap, std::size_t head, Metric metric);
QualityScore avg_of_heads_quality(const AttentionCapture& cap, Metric metric);
QualityScore score_capture(const AttentionCapture& cap, const Strategy& strategy, Metric metric);

/// Min-max scaling to [0, 1]; a constant list maps to 0.5 everywhere.
std::vector<double> normalize_scores(std::span<const double> scores);

struct GroupSummary {
  std::string group;
  std::size_t count = 0;
  double mean = 0, median = 0, q1 = 0, q3 = 0, min = 0, max = 0;
};

/// Quantile by linear interpolation between order statistics at q * (n - 1).
double quantile_sorted(std::span<const double> sorted, double q);

/// One summary per label, labels in lexicographic order.
std::vector<GroupSummary> group_statistics(std::span<const double> scores,
                                           std::span<const std::string> labels);

}  // namespace attnfiqa
