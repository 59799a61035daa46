#include "attnfiqa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "attnfiqa/error.hpp"
#include "attnfiqa/tensor_file.hpp"
#include "io_util.hpp"

namespace attnfiqa {

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids, Matrix vectors)
    : ids_(std::move(ids)), vectors_(std::move(vectors)) {
  if (ids_.size() != vectors_.rows()) {
    throw ShapeError(std::to_string(ids_.size()) + " ids for " + std::to_string(vectors_.rows()) +
                     " embedding rows");
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw FormatError("duplicate sample id '" + ids_[i] + "'");
    const auto row = vectors_.row(i);
    if (std::all_of(row.begin(), row.end(), [](float v) { return v == 0.0f; })) {
      throw FormatError("zero embedding for sample '" + ids_[i] + "'");
    }
  }
}

std::span<const float> EmbeddingSet::vector(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw FormatError("unknown sample id '" + id + "'");
  return vectors_.row(it->second);
}

EmbeddingSet load_embeddings(const std::filesystem::path& container, const std::filesystem::path& ids) {
  auto tensors = read_tensor_file(container);
  auto it = std::find_if(tensors.begin(), tensors.end(), [](const auto& t) { return t.name == "embeddings"; });
  if (it == tensors.end()) throw ManifestError(container.string() + ": no tensor named 'embeddings'");
  if (it->shape.size() != 2) throw ShapeError("'embeddings' must be a [count x dim] tensor");

  std::vector<std::string> names;
  std::istringstream in(detail::read_file(ids));
  std::string line;
  while (std::getline(in, line)) {
    const auto id = detail::trim(line);
    if (!id.empty()) names.emplace_back(id);
  }
  return EmbeddingSet(std::move(names), Matrix(it->shape[0], it->shape[1], std::move(it->data)));
}

void save_embeddings(const EmbeddingSet& emb, const std::filesystem::path& container,
                     const std::filesystem::path& ids) {
  const NamedTensor t{"embeddings", {emb.size(), emb.dim()},
                      {emb.vectors().values().begin(), emb.vectors().values().end()}};
  write_tensor_file(container, std::span(&t, 1));
  std::string text;
  for (const auto& id : emb.ids()) text += id + "\n";
  detail::write_file(ids, text);
}

std::vector<Pair> parse_pairs_csv(std::string_view text) {
  std::vector<Pair> pairs;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto l = detail::trim(line);
    if (l.empty()) continue;
    const auto fields = detail::split(l, ',');
    if (fields.size() != 3) throw FormatError("pairs line " + std::to_string(line_no) + ": expected id_a,id_b,label");
    const std::string a(detail::trim(fields[0]));
    const std::string b(detail::trim(fields[1]));
    const std::string label(detail::trim(fields[2]));
    if (line_no == 1 && a == "id_a") continue;
    Pair p{a, b, PairLabel::kGenuine};
    if (label == "genuine" || label == "1") {
      p.label = PairLabel::kGenuine;
    } else if (label == "impostor" || label == "0") {
      p.label = PairLabel::kImpostor;
    } else {
      throw FormatError("pairs line " + std::to_string(line_no) + ": bad label '" + label + "'");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<Pair> read_pairs_csv(const std::filesystem::path& path) {
  return parse_pairs_csv(detail::read_file(path));
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw ShapeError("cosine_similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error("cosine_similarity: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double fmr_at_threshold(std::span<const double> impostor_sims, double t) {
  if (impostor_sims.empty()) throw Error("FMR of an empty impostor set");
  const auto hits = std::count_if(impostor_sims.begin(), impostor_sims.end(), [t](double s) { return s >= t; });
  return static_cast<double>(hits) / static_cast<double>(impostor_sims.size());
}

double fnmr_at_threshold(std::span<const double> genuine_sims, double t) {
  if (genuine_sims.empty()) throw Error("FNMR of an empty genuine set");
  const auto misses = std::count_if(genuine_sims.begin(), genuine_sims.end(), [t](double s) { return s < t; });
  return static_cast<double>(misses) / static_cast<double>(genuine_sims.size());
}

double calibrate_threshold(std::span<const double> impostor_sims, double target_fmr) {
  if (impostor_sims.empty()) throw Error("cannot calibrate a threshold without impostor comparisons");
  if (!(target_fmr > 0.0 && target_fmr < 1.0)) throw Error("target FMR must lie in (0, 1)");
  std::vector<double> s(impostor_sims.begin(), impostor_sims.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  // Candidate s[i] (first occurrence of its value) accepts the n - i impostors at or above it.
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && s[i] == s[i - 1]) continue;
    if (static_cast<double>(s.size() - i) / n <= target_fmr) return s[i];
  }
  return std::nextafter(s.back(), std::numeric_limits<double>::infinity());
}

std::vector<double> default_discard_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 98; ++i) grid.push_back(i / 100.0);
  return grid;
}

std::size_t discard_count(double r, std::size_t n) {
  return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
}

EdcCurve edc_curve(std::span<const std::string> sample_ids, std::span<const double> sample_quality,
                   std::span<const ScoredPair> pairs, double target_fmr, std::span<const double> grid) {
  const std::size_t n = sample_ids.size();
  if (sample_quality.size() != n) throw ShapeError("one quality per sample required");
  if (grid.empty()) throw Error("empty discard grid");
  if (grid.front() != 0.0) throw Error("discard grid must start at 0");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > 1.0 || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw Error("discard grid must be strictly increasing within [0, 1]");
    }
  }
  for (double q : sample_quality) {
    if (!std::isfinite(q)) throw FormatError("non-finite quality score");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (sample_quality[x] != sample_quality[y]) return sample_quality[x] < sample_quality[y];
    return sample_ids[x] < sample_ids[y];
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

  std::vector<double> impostor;
  for (const auto& p : pairs) {
    if (p.a >= n || p.b >= n) throw IndexError("pair references an unknown sample index");
    if (!p.genuine) impostor.push_back(p.similarity);
  }
  const std::size_t genuine_total = pairs.size() - impostor.size();
  if (genuine_total == 0) throw Error("EDC needs at least one genuine pair");

  EdcCurve curve;
  curve.target_fmr = target_fmr;
  curve.threshold = calibrate_threshold(impostor, target_fmr);

  // A pair survives discarding d samples iff both ranks are >= d, i.e. its
  // lower rank is >= d. Suffix sums over that rank give survivors per d.
  std::vector<std::size_t> alive(n + 1, 0), misses(n + 1, 0);
  for (const auto& p : pairs) {
    if (!p.genuine) continue;
    const std::size_t low = std::min(rank[p.a], rank[p.b]);
    ++alive[low];
    if (p.similarity < curve.threshold) ++misses[low];
  }
  for (std::size_t d = n; d-- > 0;) {
    alive[d] += alive[d + 1];
    misses[d] += misses[d + 1];
  }

  double last = 0.0;
  for (double r : grid) {
    const std::size_t d = std::min(discard_count(r, n), n);
    EdcPoint pt{r, last, d, alive[d]};
    if (alive[d] > 0) pt.fnmr = static_cast<double>(misses[d]) / static_cast<double>(alive[d]);
    last = pt.fnmr;
    curve.points.push_back(pt);
  }
  return curve;
}

EdcCurve edc_curve(const EmbeddingSet& emb, std::span<const Pair> pairs,
                   const std::map<std::string, double>& qualities, double target_fmr,
                   std::span<const double> grid) {
  std::map<std::string, std::size_t> index;
  for (const auto& p : pairs) {
    index.emplace(p.a, 0);
    index.emplace(p.b, 0);
  }
  std::vector<std::string> ids;
  std::vector<double> quality;
  for (auto& [id, idx] : index) {
    if (!emb.contains(id)) throw FormatError("unknown id '" + id + "' in pairs (no embedding)");
    const auto q = qualities.find(id);
    if (q == qualities.end()) throw FormatError("missing quality for id '" + id + "'");
    idx = ids.size();
    ids.push_back(id);
    quality.push_back(q->second);
  }
  std::vector<ScoredPair> scored;
  scored.reserve(pairs.size());
  for (const auto& p : pairs) {
    scored.push_back({index.at(p.a), index.at(p.b), p.label == PairLabel::kGenuine,
                      cosine_similarity(emb.vector(p.a), emb.vector(p.b))});
  }
  return edc_curve(ids, quality, scored, target_fmr, grid);
}

double pauc(const EdcCurve& curve, double max_discard) {
  const auto& pts = curve.points;
  if (pts.empty() || pts.front().discard_fraction != 0.0) throw Error("EDC curve must start at r = 0");
  if (max_discard < 0.0) throw Error("max_discard must be non-negative");
  constexpr double kSnap = 1e-12;
  if (max_discard > pts.back().discard_fraction + kSnap) {
    throw Error("EDC curve ends at r = " + detail::format_double(pts.back().discard_fraction) +
                ", before max_discard = " + detail::format_double(max_discard));
  }
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double r0 = pts[i].discard_fraction;
    const double r1 = pts[i + 1].discard_fraction;
    if (r0 >= max_discard - kSnap) break;
    const double f0 = pts[i].fnmr;
    const double f1 = pts[i + 1].fnmr;
    if (r1 <= max_discard + kSnap) {
      area += 0.5 * (f0 + f1) * (r1 - r0);
    } else {
      const double fm = f0 + (f1 - f0) * (max_discard - r0) / (r1 - r0);
      area += 0.5 * (f0 + fm) * (max_discard - r0);
      break;
    }
  }
  return area;
}

double auc(const EdcCurve& curve) {
  if (curve.points.empty()) throw Error("empty EDC curve");
  return pauc(curve, curve.points.back().discard_fraction);
}

}  // namespace attnfiqa
