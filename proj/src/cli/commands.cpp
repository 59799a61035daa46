#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "attnfiqa/cli.hpp"
#include "attnfiqa/error.hpp"
#include "attnfiqa/eval.hpp"
#include "attnfiqa/heatmap.hpp"
#include "attnfiqa/image.hpp"
#include "attnfiqa/vit.hpp"
#include "attnfiqa/weights.hpp"
#include "io_util.hpp"

namespace attnfiqa::cli {
namespace {

using detail::format_double;

struct Model {
  ModelConfig cfg;
  WeightSet weights;
};

Model load_model(const fs::path& config, const fs::path& weights) {
  Model m;
  m.cfg = load_config(config);
  m.weights = load_weights(weights, m.cfg);
  return m;
}

fs::path manifest_path(const fs::path& output) {
  fs::path p = output;
  p += ".manifest";
  return p;
}

std::string join_paths(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ";") + i;
  return s;
}

// Runs fn over every path on up to `jobs` threads. Results keep input order;
// failures are reported on `err` with their path.
template <typename Fn>
auto run_batch(const std::vector<std::string>& paths, std::size_t jobs, Fn fn, std::ostream& err, bool& failed) {
  using T = decltype(fn(paths.front()));
  std::vector<std::optional<T>> results(paths.size());
  std::vector<std::string> errors(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      try {
        results[i] = fn(paths[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(paths.size(), 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  failed = false;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!results[i]) {
      err << "error: " << paths[i] << ": " << errors[i] << '\n';
      failed = true;
    }
  }
  return results;
}

ForwardOptions forward_options(std::optional<std::size_t> block) {
  ForwardOptions o;
  o.capture_block = block;
  return o;
}

std::size_t resolve_block(const ModelConfig& cfg, std::optional<std::size_t> block) {
  return block.value_or(cfg.num_blocks);
}

void check_block(const ModelConfig& cfg, std::optional<std::size_t> block) {
  if (block && (*block < 1 || *block > cfg.num_blocks)) {
    throw IndexError("capture block " + std::to_string(*block) + " outside [1, " +
                     std::to_string(cfg.num_blocks) + "]");
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Minimal comma-separated reader (no quoting). `header_key` names the first
// column of an optional header row.
CsvTable read_csv(const fs::path& path, std::string_view header_key) {
  CsvTable t;
  std::istringstream in(detail::read_file(path));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto l = detail::trim(line);
    if (l.empty()) continue;
    auto fields = detail::split(l, ',');
    for (auto& f : fields) f = std::string(detail::trim(f));
    if (first && !fields.empty() && fields[0] == header_key) {
      t.header = std::move(fields);
    } else {
      t.rows.push_back(std::move(fields));
    }
    first = false;
  }
  return t;
}

double parse_double_field(const std::string& s, const fs::path& file) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw FormatError(file.string() + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::vector<std::string> read_image_list(const fs::path& path) {
  std::vector<std::string> out;
  std::istringstream in(detail::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto l = detail::trim(line);
    if (l.empty() || l.front() == '#') continue;
    out.emplace_back(l);
  }
  return out;
}

int cmd_score(const ScoreOptions& opts, std::ostream& err) {
  std::vector<std::string> images;
  Model model;
  try {
    images = read_image_list(opts.image_list);
    model = load_model(opts.config, opts.weights);
    check_block(model.cfg, opts.block);
    if (opts.strategy.kind == Strategy::Kind::kPerHead && opts.strategy.head > model.cfg.num_heads) {
      err << "usage error: head " << opts.strategy.head << " outside [1, " << model.cfg.num_heads << "]\n";
      return kExitUsage;
    }
  } catch (const IndexError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }

  bool failed = false;
  const auto scores = run_batch(
      images, opts.jobs,
      [&](const std::string& p) {
        const auto fwd = forward_with_capture(load_image(p, model.cfg), model.weights, model.cfg,
                                              forward_options(opts.block));
        return score_capture(fwd.capture, opts.strategy, opts.metric);
      },
      err, failed);

  std::string csv = "path,raw_score,strategy,metric,block\n";
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!scores[i]) continue;
    const auto& s = *scores[i];
    csv += images[i] + "," + format_double(s.value) + "," + s.strategy.name() + "," +
           std::string(metric_name(s.metric)) + "," + std::to_string(s.block) + "\n";
  }
  try {
    detail::write_file(opts.out_csv, csv);
    RunManifest m{"score", {}};
    m.add("config", opts.config.string());
    m.add("weights", opts.weights.string());
    m.add("image_list", opts.image_list.string());
    m.add("inputs", join_paths(images));
    m.add("outputs", opts.out_csv.string());
    m.add("strategy", opts.strategy.name());
    m.add("metric", std::string(metric_name(opts.metric)));
    m.add("block", std::to_string(resolve_block(model.cfg, opts.block)));
    m.write(manifest_path(opts.out_csv));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return failed ? kExitDataError : kExitOk;
}

int cmd_heatmap(const HeatmapOptions& opts, std::ostream& err) {
  if (!(opts.alpha >= 0.0 && opts.alpha <= 1.0)) {
    err << "usage error: alpha must lie in [0, 1]\n";
    return kExitUsage;
  }
  std::vector<std::string> images;
  Model model;
  try {
    images = read_image_list(opts.image_list);
    model = load_model(opts.config, opts.weights);
    check_block(model.cfg, opts.block);
  } catch (const IndexError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  if (images.empty()) return kExitOk;

  struct Item {
    Raster original;
    PatchMap map;
    double score;
  };
  bool failed = false;
  const auto items = run_batch(
      images, opts.jobs,
      [&](const std::string& p) {
        Raster raster = read_ppm(p);
        const auto fwd = forward_with_capture(preprocess(raster, model.cfg), model.weights, model.cfg,
                                              forward_options(opts.block));
        return Item{std::move(raster),
                    patch_participation(fwd.capture, model.cfg.grid_height(), model.cfg.grid_width()),
                    concat_quality(fwd.capture, Metric::kMean).value};
      },
      err, failed);

  std::vector<PatchMap> maps;
  std::vector<double> raw;
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i]) continue;
    maps.push_back(items[i]->map);
    raw.push_back(items[i]->score);
    ok.push_back(i);
  }
  try {
    fs::create_directories(opts.out_dir);
    std::string csv = "path,raw_score,normalized_score,heatmap,overlay\n";
    std::vector<std::string> outputs;
    if (!maps.empty()) {
      const ColorScale scale = build_color_scale(maps);
      const std::vector<double> norm = normalize_scores(raw);
      for (std::size_t k = 0; k < ok.size(); ++k) {
        const std::size_t i = ok[k];
        char prefix[16];
        std::snprintf(prefix, sizeof(prefix), "%04zu_", i);
        const std::string stem = prefix + fs::path(images[i]).stem().string();
        const fs::path heat_path = opts.out_dir / (stem + "_heatmap.ppm");
        const fs::path over_path = opts.out_dir / (stem + "_overlay.ppm");
        const Raster heat = render_heatmap(maps[k], scale, model.cfg.patch_size);
        write_ppm(heat, heat_path);
        write_ppm(overlay(items[i]->original, heat, opts.alpha), over_path);
        csv += images[i] + "," + format_double(raw[k]) + "," + format_double(norm[k]) + "," +
               heat_path.filename().string() + "," + over_path.filename().string() + "\n";
        outputs.push_back(heat_path.string());
        outputs.push_back(over_path.string());
      }
      RunManifest m{"heatmap", {}};
      m.add("config", opts.config.string());
      m.add("weights", opts.weights.string());
      m.add("image_list", opts.image_list.string());
      m.add("inputs", join_paths(images));
      m.add("outputs", join_paths(outputs));
      m.add("alpha", format_double(opts.alpha));
      m.add("block", std::to_string(resolve_block(model.cfg, opts.block)));
      m.add("scale_min", format_double(scale.min));
      m.add("scale_max", format_double(scale.max));
      m.write(opts.out_dir / "run.manifest");
    }
    detail::write_file(opts.out_dir / "scores.csv", csv);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return failed ? kExitDataError : kExitOk;
}

int cmd_edc(const EdcOptions& opts, std::ostream& out, std::ostream& err) {
  if (!(opts.target_fmr > 0.0 && opts.target_fmr < 1.0)) {
    err << "usage error: target FMR must lie in (0, 1)\n";
    return kExitUsage;
  }
  try {
    const EmbeddingSet emb = load_embeddings(opts.embeddings, opts.ids);
    const std::vector<Pair> pairs = read_pairs_csv(opts.pairs);
    for (const auto& p : pairs) {
      for (const auto* id : {&p.a, &p.b}) {
        if (!emb.contains(*id)) {
          err << "error: unknown id '" << *id << "' in " << opts.pairs.string() << '\n';
          return kExitDataError;
        }
      }
    }

    std::map<std::string, double> qualities;
    const CsvTable qt = read_csv(opts.qualities, "path");
    for (const auto& row : qt.rows) {
      if (row.size() < 2) throw FormatError(opts.qualities.string() + ": expected path,raw_score,...");
      const std::string key = opts.match_stem ? fs::path(row[0]).stem().string() : row[0];
      if (!qualities.emplace(key, parse_double_field(row[1], opts.qualities)).second) {
        throw FormatError(opts.qualities.string() + ": duplicate quality for '" + key + "'");
      }
    }

    const std::vector<double> grid = opts.grid.empty() ? default_discard_grid() : opts.grid;
    const EdcCurve curve = edc_curve(emb, pairs, qualities, opts.target_fmr, grid);
    const double area = auc(curve);
    const double partial = pauc(curve, opts.max_discard);

    std::string csv = "r,fnmr\n";
    for (const auto& p : curve.points) csv += format_double(p.discard_fraction) + "," + format_double(p.fnmr) + "\n";
    detail::write_file(opts.out_csv, csv);

    std::string header = "threshold,target_fmr,fnmr_at_0,auc,pauc,max_discard";
    std::string values = format_double(curve.threshold) + "," + format_double(curve.target_fmr) + "," +
                         format_double(curve.points.front().fnmr) + "," + format_double(area) + "," +
                         format_double(partial) + "," + format_double(opts.max_discard);
    if (opts.scale_1000) {
      header += ",auc_x1000,pauc_x1000";
      values += "," + format_double(area * 1e3) + "," + format_double(partial * 1e3);
    }
    fs::path summary = opts.summary_csv.value_or(fs::path(opts.out_csv.string() + ".summary.csv"));
    detail::write_file(summary, header + "\n" + values + "\n");
    out << header << '\n' << values << '\n';

    RunManifest m{"edc", {}};
    m.add("embeddings", opts.embeddings.string());
    m.add("ids", opts.ids.string());
    m.add("pairs", opts.pairs.string());
    m.add("qualities", opts.qualities.string());
    m.add("outputs", opts.out_csv.string() + ";" + summary.string());
    m.add("target_fmr", format_double(opts.target_fmr));
    m.add("max_discard", format_double(opts.max_discard));
    m.add("grid_points", std::to_string(grid.size()));
    m.write(manifest_path(opts.out_csv));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int cmd_ablate(const AblateOptions& opts, std::ostream& err) {
  std::vector<std::string> images;
  Model model;
  try {
    images = read_image_list(opts.image_list);
    model = load_model(opts.config, opts.weights);
    check_block(model.cfg, opts.block);
  } catch (const IndexError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }

  std::vector<Strategy> strategies{Strategy::concat()};
  for (std::size_t h = 1; h <= model.cfg.num_heads; ++h) strategies.push_back(Strategy::per_head(h));
  strategies.push_back(Strategy::avg_of_heads());

  bool failed = false;
  const auto captures = run_batch(
      images, opts.jobs,
      [&](const std::string& p) {
        return forward_with_capture(load_image(p, model.cfg), model.weights, model.cfg,
                                    forward_options(opts.block))
            .capture;
      },
      err, failed);

  std::string csv = "path,strategy,metric,block,value,flag\n";
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!captures[i]) continue;
    for (const auto& s : strategies) {
      for (Metric m : kAllMetrics) {
        std::string value, flag;
        try {
          value = format_double(score_capture(*captures[i], s, m).value);
        } catch (const DegenerateError&) {
          value = "nan";
          flag = "degenerate";
        }
        csv += images[i] + "," + s.name() + "," + std::string(metric_name(m)) + "," +
               std::to_string(captures[i]->block) + "," + value + "," + flag + "\n";
      }
    }
  }
  try {
    detail::write_file(opts.out_csv, csv);
    RunManifest man{"ablate", {}};
    man.add("config", opts.config.string());
    man.add("weights", opts.weights.string());
    man.add("image_list", opts.image_list.string());
    man.add("inputs", join_paths(images));
    man.add("outputs", opts.out_csv.string());
    man.add("block", std::to_string(resolve_block(model.cfg, opts.block)));
    man.write(manifest_path(opts.out_csv));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return failed ? kExitDataError : kExitOk;
}

int cmd_group_stats(const GroupStatsOptions& opts, std::ostream& err) {
  try {
    const CsvTable scores = read_csv(opts.scores_csv, "path");
    const CsvTable labels = read_csv(opts.labels_csv, "path");

    std::map<std::string, std::string> label_of;
    for (const auto& row : labels.rows) {
      if (row.size() < 2 || row[1].empty()) {
        throw FormatError(opts.labels_csv.string() + ": expected path,group");
      }
      if (!label_of.emplace(row[0], row[1]).second) {
        throw FormatError(opts.labels_csv.string() + ": duplicate label for '" + row[0] + "'");
      }
    }

    std::vector<double> values;
    std::vector<std::string> groups;
    std::set<std::string> matched;
    std::vector<std::string> unmatched;
    for (const auto& row : scores.rows) {
      if (row.size() < 2) throw FormatError(opts.scores_csv.string() + ": expected path,raw_score,...");
      const auto it = label_of.find(row[0]);
      if (it == label_of.end()) {
        unmatched.push_back(row[0] + " (no label)");
        continue;
      }
      matched.insert(row[0]);
      values.push_back(parse_double_field(row[1], opts.scores_csv));
      groups.push_back(it->second);
    }
    for (const auto& [path, group] : label_of) {
      if (!matched.count(path)) unmatched.push_back(path + " (no score)");
    }
    if (!unmatched.empty()) {
      err << "error: " << unmatched.size() << " unmatched key(s):\n";
      for (const auto& u : unmatched) err << "  " << u << '\n';
      return kExitDataError;
    }

    std::string csv = "group,count,mean,median,q1,q3,min,max\n";
    for (const auto& g : group_statistics(values, groups)) {
      csv += g.group + "," + std::to_string(g.count) + "," + format_double(g.mean) + "," +
             format_double(g.median) + "," + format_double(g.q1) + "," + format_double(g.q3) + "," +
             format_double(g.min) + "," + format_double(g.max) + "\n";
    }
    detail::write_file(opts.out_csv, csv);
    RunManifest m{"group-stats", {}};
    m.add("scores", opts.scores_csv.string());
    m.add("labels", opts.labels_csv.string());
    m.add("outputs", opts.out_csv.string());
    m.write(manifest_path(opts.out_csv));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int cmd_manifest(const fs::path& config, std::ostream& out, std::ostream& err) {
  try {
    const ModelConfig cfg = load_config(config);
    out << "# N=" << cfg.num_patches() << " D=" << cfg.embed_dim << " heads=" << cfg.num_heads
        << " hidden=" << cfg.mlp_hidden() << '\n';
    for (const auto& spec : weight_manifest(cfg)) out << spec.name << ' ' << shape_string(spec.shape) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attention-based face image quality assessment"};
  app.require_subcommand(1);

  auto metric_check = CLI::Validator(
      [](std::string& s) {
        try {
          parse_metric(s);
        } catch (const FormatError& e) {
          return std::string(e.what());
        }
        return std::string();
      },
      "METRIC");
  auto strategy_check = CLI::Validator(
      [](std::string& s) {
        try {
          parse_strategy(s);
        } catch (const FormatError& e) {
          return std::string(e.what());
        }
        return std::string();
      },
      "STRATEGY");

  std::string metric = "mean";
  std::string strategy = "concat";

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score images with one strategy/metric");
  score_cmd->add_option("--config", score.config, "Model config (key=value)")->required();
  score_cmd->add_option("--weights", score.weights, "AFQW weight container")->required();
  score_cmd->add_option("--images", score.image_list, "Text file, one PPM path per line")->required();
  score_cmd->add_option("--out", score.out_csv, "Output CSV")->required();
  score_cmd->add_option("--strategy", strategy, "concat | head:<h> | avg_of_heads")->check(strategy_check);
  score_cmd->add_option("--metric", metric, "mean | max | median | inv_std")->check(metric_check);
  score_cmd->add_option("--block", score.block, "Capture block (1-based, default: last)")->check(CLI::PositiveNumber);
  score_cmd->add_option("--jobs", score.jobs, "Worker threads")->check(CLI::PositiveNumber);

  HeatmapOptions heat;
  auto* heat_cmd = app.add_subcommand("heatmap", "Render attention heatmaps and overlays");
  heat_cmd->add_option("--config", heat.config, "Model config (key=value)")->required();
  heat_cmd->add_option("--weights", heat.weights, "AFQW weight container")->required();
  heat_cmd->add_option("--images", heat.image_list, "Text file, one PPM path per line")->required();
  heat_cmd->add_option("--out-dir", heat.out_dir, "Directory for heatmaps, overlays and scores.csv")->required();
  heat_cmd->add_option("--alpha", heat.alpha, "Overlay weight of the heatmap")->check(CLI::Range(0.0, 1.0));
  heat_cmd->add_option("--block", heat.block, "Capture block (1-based, default: last)")->check(CLI::PositiveNumber);
  heat_cmd->add_option("--jobs", heat.jobs, "Worker threads")->check(CLI::PositiveNumber);

  EdcOptions edc;
  std::string summary;
  auto* edc_cmd = app.add_subcommand("edc", "Error-versus-discard curve, AUC and pAUC");
  edc_cmd->add_option("--embeddings", edc.embeddings, "AFQW container with an 'embeddings' tensor")->required();
  edc_cmd->add_option("--ids", edc.ids, "Sample ids, one per line")->required();
  edc_cmd->add_option("--pairs", edc.pairs, "CSV id_a,id_b,label")->required();
  edc_cmd->add_option("--qualities", edc.qualities, "Score CSV (path,raw_score,...)")->required();
  edc_cmd->add_option("--out", edc.out_csv, "Curve CSV")->required();
  edc_cmd->add_option("--summary", summary, "Summary CSV (default <out>.summary.csv)");
  edc_cmd->add_option("--target-fmr", edc.target_fmr, "FMR for threshold calibration");
  edc_cmd->add_option("--grid", edc.grid, "Discard fractions (default 0,0.01,...,0.98)")->delimiter(',');
  edc_cmd->add_option("--max-discard", edc.max_discard, "pAUC cutoff")->check(CLI::Range(0.0, 1.0));
  edc_cmd->add_flag("--scale-1000", edc.scale_1000, "Also report AUC/pAUC x 1000");
  edc_cmd->add_flag("--match-stem", edc.match_stem, "Match quality rows to ids by file stem");

  AblateOptions abl;
  auto* abl_cmd = app.add_subcommand("ablate", "All head strategies x aggregation metrics");
  abl_cmd->add_option("--config", abl.config, "Model config (key=value)")->required();
  abl_cmd->add_option("--weights", abl.weights, "AFQW weight container")->required();
  abl_cmd->add_option("--images", abl.image_list, "Text file, one PPM path per line")->required();
  abl_cmd->add_option("--out", abl.out_csv, "Output CSV")->required();
  abl_cmd->add_option("--block", abl.block, "Capture block (1-based, default: last)")->check(CLI::PositiveNumber);
  abl_cmd->add_option("--jobs", abl.jobs, "Worker threads")->check(CLI::PositiveNumber);

  GroupStatsOptions gs;
  auto* gs_cmd = app.add_subcommand("group-stats", "Per-group score distribution summary");
  gs_cmd->add_option("--scores", gs.scores_csv, "Score CSV (path,raw_score,...)")->required();
  gs_cmd->add_option("--labels", gs.labels_csv, "CSV path,group")->required();
  gs_cmd->add_option("--out", gs.out_csv, "Output CSV")->required();

  std::string manifest_config;
  auto* man_cmd = app.add_subcommand("manifest", "List tensor names and shapes expected for a config");
  man_cmd->add_option("--config", manifest_config, "Model config (key=value)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (score_cmd->parsed()) {
    score.metric = parse_metric(metric);
    score.strategy = parse_strategy(strategy);
    return cmd_score(score, err);
  }
  if (heat_cmd->parsed()) return cmd_heatmap(heat, err);
  if (edc_cmd->parsed()) {
    if (!summary.empty()) edc.summary_csv = summary;
    return cmd_edc(edc, out, err);
  }
  if (abl_cmd->parsed()) return cmd_ablate(abl, err);
  if (gs_cmd->parsed()) return cmd_group_stats(gs, err);
  if (man_cmd->parsed()) return cmd_manifest(manifest_config, out, err);
  return kExitUsage;
}

}  // namespace attnfiqa::cli
