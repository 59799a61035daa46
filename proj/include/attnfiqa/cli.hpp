#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attnfiqa/scoring.hpp"

namespace attnfiqa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

namespace fs = std::filesystem;

/// Provenance record written next to every output as flat key=value text.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> entries;

  void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
  /// Adds the timestamp and kernel backend, then writes the file.
  void write(const fs::path& path) const;
};

struct ScoreOptions {
  fs::path config;
  fs::path weights;
  fs::path image_list;
  fs::path out_csv;
  Strategy strategy = Strategy::concat();
  Metric metric = Metric::kMean;
  std::optional<std::size_t> block;  // unset = final block
  std::size_t jobs = 1;
};

struct HeatmapOptions {
  fs::path config;
  fs::path weights;
  fs::path image_list;
  fs::path out_dir;
  double alpha = 0.5;
  std::optional<std::size_t> block;
  std::size_t jobs = 1;
};

struct EdcOptions {
  fs::path embeddings;
  fs::path ids;
  fs::path pairs;
  fs::path qualities;
  fs::path out_csv;
  std::optional<fs::path> summary_csv;  // default: <out_csv>.summary.csv
  double target_fmr = 1e-3;
  std::vector<double> grid;  // empty = 0, 0.01, ..., 0.98
  double max_discard = 0.3;
  bool scale_1000 = false;
  bool match_stem = false;  // join quality rows to ids by file stem
};

struct AblateOptions {
  fs::path config;
  fs::path weights;
  fs::path image_list;
  fs::path out_csv;
  std::optional<std::size_t> block;
  std::size_t jobs = 1;
};

struct GroupStatsOptions {
  fs::path scores_csv;
  fs::path labels_csv;
  fs::path out_csv;
};

int cmd_score(const ScoreOptions& opts, std::ostream& err);
int cmd_heatmap(const HeatmapOptions& opts, std::ostream& err);
int cmd_edc(const EdcOptions& opts, std::ostream& out, std::ostream& err);
int cmd_ablate(const AblateOptions& opts, std::ostream& err);
int cmd_group_stats(const GroupStatsOptions& opts, std::ostream& err);
/// Prints the expected tensor names and shapes for a config.
int cmd_manifest(const fs::path& config, std::ostream& out, std::ostream& err);

/// Reads an image list: one path per line, blank lines and '#' comments skipped.
std::vector<std::string> read_image_list(const fs::path& path);

/// Full command-line entry point. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace attnfiqa::cli
