#pragma once

// Verification metrics and error-versus-discard (EDC) evaluation.
//
// Conventions: a comparison is a match when similarity >= threshold, so
// FMR counts impostor similarities >= t and FNMR counts genuine similarities
// strictly below t.

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "attnfiqa/matrix.hpp"

namespace attnfiqa {

/// Sample ids with one embedding row each.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  /// Throws FormatError on duplicate ids or zero vectors, ShapeError when
  /// ids.size() != vectors.rows().
  EmbeddingSet(std::vector<std::string> ids, Matrix vectors);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return vectors_.cols(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Matrix& vectors() const { return vectors_; }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  /// Throws FormatError naming the id when unknown.
  std::span<const float> vector(const std::string& id) const;

 private:
  std::vector<std::string> ids_;
  Matrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Embeddings live in an AFQW container holding one [count x dim] tensor
/// named "embeddings"; ids come from a UTF-8 sidecar, one per line.
EmbeddingSet load_embeddings(const std::filesystem::path& container, const std::filesystem::path& ids);
void save_embeddings(const EmbeddingSet& emb, const std::filesystem::path& container,
                     const std::filesystem::path& ids);

enum class PairLabel { kGenuine, kImpostor };

struct Pair {
  std::string a;
  std::string b;
  PairLabel label = PairLabel::kGenuine;
};

/// CSV rows "id_a,id_b,label" with label genuine|impostor (also 1|0).
/// An optional header row starting with "id_a" is skipped.
std::vector<Pair> parse_pairs_csv(std::string_view text);
std::vector<Pair> read_pairs_csv(const std::filesystem::path& path);

double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Fraction of impostor similarities >= t.
double fmr_at_threshold(std::span<const double> impostor_sims, double t);
/// Fraction of genuine similarities < t.
double fnmr_at_threshold(std::span<const double> genuine_sims, double t);

/// Smallest candidate t from the impostor similarities with FMR(t) <= target.
/// When even the largest similarity gives FMR > target, returns the next
/// double above it (FMR 0).
double calibrate_threshold(std::span<const double> impostor_sims, double target_fmr);

/// Pair reduced to sample indices and a precomputed similarity.
struct ScoredPair {
  std::size_t a = 0;
  std::size_t b = 0;
  bool genuine = true;
  double similarity = 0.0;
};

struct EdcPoint {
  double discard_fraction = 0.0;
  double fnmr = 0.0;
  std::size_t discarded = 0;         // samples removed
  std::size_t genuine_remaining = 0;  // genuine pairs still alive
};

struct EdcCurve {
  std::vector<EdcPoint> points;
  double threshold = 0.0;
  double target_fmr = 0.0;
};

/// r = 0, 0.01, ..., 0.98.
std::vector<double> default_discard_grid();

/// Number of samples removed at discard fraction r out of n: floor(r * n),
/// with a 1e-9 guard so that e.g. 0.29 * 100 counts as 29.
std::size_t discard_count(double r, std::size_t n);

/// Samples are ranked by (quality ascending, id ascending); at each grid
/// point the floor(r * n) lowest-ranked samples are removed together with
/// every pair touching them. The threshold is calibrated once on all impostor
/// pairs. When no genuine pair survives, the previous FNMR is carried forward.
EdcCurve edc_curve(std::span<const std::string> sample_ids, std::span<const double> sample_quality,
                   std::span<const ScoredPair> pairs, double target_fmr, std::span<const double> grid);

/// Convenience overload: samples are the distinct ids referenced by `pairs`.
/// Throws FormatError for an id without embedding or quality.
EdcCurve edc_curve(const EmbeddingSet& emb, std::span<const Pair> pairs,
                   const std::map<std::string, double>& qualities, double target_fmr,
                   std::span<const double> grid);

/// Trapezoidal area under FNMR(r) over [0, max_discard], interpolating
/// linearly at max_discard when it falls between grid points. Raw area, not
/// normalized. Throws Error when the curve does not reach max_discard.
double pauc(const EdcCurve& curve, double max_discard = 0.3);
/// pauc up to the last grid point.
double auc(const EdcCurve& curve);

}  // namespace attnfiqa
