/**
 * @file cli.hpp
 * @brief Batch front door: subcommands wiring the library into reports.
 *
 * Exit codes: 0 success; 1 the inputs parsed but hold nothing usable
 * (empty corpora, no overlap, no seeds); 2 malformed input (bad flags,
 * unreadable files, schema breaches) and unexpected failures.
 *
 * Every command is deterministic given its flags: map-ordered iteration,
 * explicit PRNG seeds, and full-precision CSV cells via shortest round-trip
 * formatting. Two runs with the same arguments produce identical bytes.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankbias/bias_metrics.hpp"
#include "rankbias/corpus_io.hpp"
#include "rankbias/error.hpp"
#include "rankbias/evaluation.hpp"
#include "rankbias/leaning.hpp"
#include "rankbias/model.hpp"
#include "rankbias/rankers.hpp"
#include "rankbias/report.hpp"

namespace rankbias::cli {

namespace fs = std::filesystem;

// ── options ─────────────────────────────────────────────────────────────────

struct Options {
  // input paths; empty string means "not supplied"
  std::string items;
  std::string users;
  std::string topics;
  std::string snapshots;
  std::string stream;
  std::string seeds_dem;
  std::string seeds_rep;
  std::string scores;
  std::string truth;
  std::string judgments;
  std::string content_judgments;
  std::string categories;
  std::string report_in;
  std::string config_file;
  std::string out_dir;
  std::string format = "table";
  std::string what = "users";
  std::string strategies = "most-retweeted,most-favorited,reverse-chronological";

  int rank_depth = kDefaultPageSize;
  double threshold = kDefaultNeutralThreshold;
  int min_followings = kDefaultMinFollowings;
  std::vector<double> candidates;
  std::int64_t sample_size = 1000;
  std::uint64_t seed = 0;

  SynthConfig synth;
};

namespace detail {

inline std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

inline void require_flag(const std::string& value, const char* flag) {
  if (value.empty()) {
    throw InvalidParams(std::string("missing required option ") + flag);
  }
}

inline void print_warnings(const std::vector<LoadWarning>& warnings) {
  for (const auto& w : warnings) {
    std::cerr << "warning: " << w.file;
    if (w.line > 0) std::cerr << ":" << w.line;
    std::cerr << ": " << w.message << '\n';
  }
}

/// Applies config-file values to options the user did not pass explicitly.
class ConfigBindings {
 public:
  template <typename T>
  void bind(CLI::Option* option, const char* key, T& target) {
    actions_.push_back([option, key, &target](const nlohmann::json& cfg) {
      if (option->count() > 0) return;
      const auto it = cfg.find(key);
      if (it == cfg.end()) return;
      try {
        it->get_to(target);
      } catch (const nlohmann::json::exception&) {
        throw InvalidConfig(std::string("config key '") + key + "' has the wrong type");
      }
    });
  }

  void apply(const std::string& config_file) const {
    if (config_file.empty()) return;
    std::ifstream in(config_file);
    if (!in) throw ParseError("cannot read " + config_file);
    const auto cfg = nlohmann::json::parse(in, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object()) {
      throw InvalidConfig(config_file + ": config must be a JSON object");
    }
    for (const auto& action : actions_) action(cfg);
  }

 private:
  std::vector<std::function<void(const nlohmann::json&)>> actions_;
};

inline std::string percent(double v) { return format_fixed(v, 2); }

inline void write_file(const fs::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ParseError("cannot write " + file.string());
  out << content;
}

/// Emits stdout per --format and, when out_dir is set, both renderings.
inline void emit_table(const Table& table, const std::string& name,
                       const Options& opts) {
  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / (name + ".csv"), render_csv(table));
    write_file(fs::path(opts.out_dir) / (name + ".txt"), render_text(table));
  }
  std::cout << (opts.format == "csv" ? render_csv(table) : render_text(table));
}

}  // namespace detail

// ── infer ───────────────────────────────────────────────────────────────────

inline void cmd_infer(const Options& opts) {
  detail::require_flag(opts.users, "--users");
  detail::require_flag(opts.topics, "--topics");
  detail::require_flag(opts.seeds_dem, "--seeds-dem");
  detail::require_flag(opts.seeds_rep, "--seeds-rep");

  BundlePaths paths;
  paths.users = detail::opt_path(opts.users);
  paths.topics = detail::opt_path(opts.topics);
  paths.seeds_dem = detail::opt_path(opts.seeds_dem);
  paths.seeds_rep = detail::opt_path(opts.seeds_rep);
  const LoadResult loaded = load_bundle(paths);
  detail::print_warnings(loaded.warnings);
  const CorpusBundle& b = loaded.bundle;

  if (b.users.empty()) throw EmptyPopulation("no users loaded from " + opts.users);
  if (b.seed_dem.empty()) throw EmptySeedSet("no usable seed ids in " + opts.seeds_dem);
  if (b.seed_rep.empty()) throw EmptySeedSet("no usable seed ids in " + opts.seeds_rep);

  const auto graph = follow_graph(b);
  ContextBuildInfo info;
  const InferenceContext ctx = build_inference_context(
      graph, b.topic_labels, b.seed_dem, b.seed_rep, opts.threshold,
      opts.min_followings, opts.users, &info);
  if (info.dem_seeds_skipped + info.rep_seeds_skipped > 0) {
    std::cerr << "warning: skipped " << info.dem_seeds_skipped << " dem / "
              << info.rep_seeds_skipped << " rep seed(s) with unusable profiles\n";
  }

  std::map<UserId, ScoreRecord> scores;
  std::int64_t inferred = 0;
  for (const auto& [user, record] : b.users) {
    const InferenceResult r = infer_user(user, graph, b.topic_labels, ctx);
    ScoreRecord s;
    s.user = user;
    s.label = r.label;
    s.raw = r.raw;
    if (r.normalized) s.normalized = r.normalized->value;
    if (r.label != LeaningLabel::Uninferable) ++inferred;
    scores.emplace(user, std::move(s));
  }

  const fs::path out_dir = opts.out_dir.empty() ? fs::path(".") : fs::path(opts.out_dir);
  fs::create_directories(out_dir);
  write_scores_jsonl(scores, out_dir / "scores.jsonl");

  nlohmann::ordered_json norm;
  norm["max_abs_raw"] = ctx.norm.max_abs_raw;
  norm["population_id"] = ctx.norm.population_id;
  norm["neutral_threshold"] = ctx.neutral_threshold;
  norm["min_followings"] = ctx.min_followings;
  detail::write_file(out_dir / "norm_params.json", norm.dump(2) + "\n");

  const auto total = static_cast<std::int64_t>(b.users.size());
  const double coverage = 100.0 * static_cast<double>(inferred) / static_cast<double>(total);
  std::cout << "inferred " << inferred << " of " << total << " users (coverage "
            << detail::percent(coverage) << "%)\n";
}

// ── metrics ─────────────────────────────────────────────────────────────────

namespace detail {

/// Drops ranked-list and corpus references to items the store does not hold.
/// The underlying operations are strict; the front door filters and reports.
inline std::int64_t filter_unknown_items(CorpusBundle& b) {
  std::int64_t dropped = 0;
  const auto keep = [&](std::vector<ItemId>& ids) {
    std::vector<ItemId> kept;
    kept.reserve(ids.size());
    for (auto& id : ids) {
      if (b.items.contains(id)) {
        kept.push_back(std::move(id));
      } else {
        ++dropped;
      }
    }
    ids = std::move(kept);
  };
  for (auto& snap : b.snapshots) keep(snap.ranked_items);
  for (auto& [query, corpus] : b.input_corpora) keep(corpus.items);
  return dropped;
}

inline std::map<QueryId, std::string> read_category_map(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot read " + file);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw SchemaViolation(file + ": category map must be a JSON object");
  }
  std::map<QueryId, std::string> out;
  for (const auto& [query, category] : j.items()) {
    if (!category.is_string()) {
      throw SchemaViolation(file + ": category for '" + query + "' must be a string");
    }
    out[query] = category.get<std::string>();
  }
  return out;
}

inline std::vector<BiasReport> per_query_reports(CorpusBundle& b, int rank_depth) {
  attach_source_bias(b);
  if (const auto dropped = filter_unknown_items(b); dropped > 0) {
    std::cerr << "warning: filtered " << dropped << " unknown item reference(s)\n";
  }
  std::map<QueryId, std::vector<RankedSnapshot>> by_query;
  for (const auto& snap : b.snapshots) by_query[snap.query].push_back(snap);

  std::vector<BiasReport> reports;
  for (const auto& [query, corpus] : b.input_corpora) {
    const auto it = by_query.find(query);
    try {
      if (it == by_query.end()) {
        throw NoUsableSnapshots("no snapshots captured for " + query);
      }
      reports.push_back(time_averaged_metrics(it->second, corpus, b.items, rank_depth));
    } catch (const UnusableData& e) {
      std::cerr << "warning: skipping query '" << query << "': " << e.what() << '\n';
    }
  }
  if (reports.empty()) throw NoUsableSnapshots("no query yields usable data");
  return reports;
}

}  // namespace detail

inline void cmd_metrics(const Options& opts) {
  detail::require_flag(opts.items, "--items");
  detail::require_flag(opts.snapshots, "--snapshots");
  detail::require_flag(opts.stream, "--stream");
  detail::require_flag(opts.scores, "--scores");

  BundlePaths paths;
  paths.items = detail::opt_path(opts.items);
  paths.snapshots = detail::opt_path(opts.snapshots);
  paths.stream = detail::opt_path(opts.stream);
  paths.scores = detail::opt_path(opts.scores);
  LoadResult loaded = load_bundle(paths);
  detail::print_warnings(loaded.warnings);

  const auto reports = detail::per_query_reports(loaded.bundle, opts.rank_depth);

  Table table;
  const bool grouped = !opts.categories.empty();
  std::map<QueryId, std::string> category_of;
  if (grouped) category_of = detail::read_category_map(opts.categories);

  const auto row_cells = [](const BiasReport& r) {
    return std::vector<std::string>{
        format_double(r.tob.value),      format_double(r.tib.value),
        format_double(r.trb),            std::to_string(r.snapshot_count),
        std::to_string(r.skipped_snapshots), format_double(r.scored_item_fraction)};
  };

  if (!grouped) {
    table.header = {"query", "TOB", "TIB", "TRB", "snapshots", "skipped", "scored_fraction"};
    for (const auto& r : reports) {
      std::vector<std::string> row{r.query};
      const auto cells = row_cells(r);
      row.insert(row.end(), cells.begin(), cells.end());
      table.rows.push_back(std::move(row));
    }
  } else {
    table.header = {"category", "query", "TOB", "TIB", "TRB",
                    "snapshots", "skipped", "scored_fraction"};
    std::map<std::string, std::vector<const BiasReport*>> blocks;
    for (const auto& r : reports) {
      const auto it = category_of.find(r.query);
      blocks[it == category_of.end() ? "other" : it->second].push_back(&r);
    }
    for (const auto& [category, members] : blocks) {
      double tob = 0.0;
      double tib = 0.0;
      double trb = 0.0;
      for (const BiasReport* r : members) {
        std::vector<std::string> row{category, r->query};
        const auto cells = row_cells(*r);
        row.insert(row.end(), cells.begin(), cells.end());
        table.rows.push_back(std::move(row));
        tob += r->tob.value;
        tib += r->tib.value;
        trb += r->trb;
      }
      const auto n = static_cast<double>(members.size());
      table.rows.push_back({category, "Average", format_double(tob / n),
                            format_double(tib / n), format_double(trb / n), "", "", ""});
    }
  }

  detail::emit_table(table, "metrics", opts);
}

// ── rerank ──────────────────────────────────────────────────────────────────

inline void cmd_rerank(const Options& opts) {
  detail::require_flag(opts.items, "--items");
  detail::require_flag(opts.stream, "--stream");
  detail::require_flag(opts.scores, "--scores");

  std::vector<std::string> names;
  {
    std::stringstream ss(opts.strategies);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (!token.empty()) names.push_back(token);
    }
  }
  if (names.empty()) throw InvalidParams("--strategies lists no strategy");
  std::vector<RankingStrategy> strategies;
  for (const auto& name : names) {
    const auto parsed = parse_ranking_strategy(name);
    if (!parsed) throw InvalidParams("unknown strategy '" + name + "'");
    if (*parsed == RankingStrategy::Observed && opts.snapshots.empty()) {
      throw InvalidParams("strategy 'observed' needs --snapshots");
    }
    strategies.push_back(*parsed);
  }

  BundlePaths paths;
  paths.items = detail::opt_path(opts.items);
  paths.stream = detail::opt_path(opts.stream);
  paths.scores = detail::opt_path(opts.scores);
  paths.snapshots = detail::opt_path(opts.snapshots);
  LoadResult loaded = load_bundle(paths);
  detail::print_warnings(loaded.warnings);
  CorpusBundle& b = loaded.bundle;

  attach_source_bias(b);
  if (const auto dropped = detail::filter_unknown_items(b); dropped > 0) {
    std::cerr << "warning: filtered " << dropped << " unknown item reference(s)\n";
  }
  std::map<QueryId, std::vector<RankedSnapshot>> by_query;
  for (const auto& snap : b.snapshots) by_query[snap.query].push_back(snap);

  Table table;
  table.header = {"query", "TIB"};
  for (const auto s : strategies) table.header.push_back(std::string("TRB:") + to_string(s));

  for (const auto& [query, corpus] : b.input_corpora) {
    std::vector<BiasScore> corpus_scores;
    for (const auto& id : corpus.items) {
      if (const auto& sb = b.items.at(id).source_bias) corpus_scores.push_back(*sb);
    }
    if (corpus_scores.empty()) {
      std::cerr << "warning: skipping query '" << query << "': no scored items\n";
      continue;
    }
    const BiasScore tib = input_bias(corpus_scores);
    std::vector<std::string> row{query, format_double(tib.value)};
    for (const auto s : strategies) {
      try {
        if (s == RankingStrategy::Observed) {
          const auto it = by_query.find(query);
          if (it == by_query.end()) {
            throw NoUsableSnapshots("no snapshots captured for " + query);
          }
          const BiasReport r = time_averaged_metrics(it->second, corpus, b.items,
                                                     opts.rank_depth);
          row.push_back(format_double(r.trb));
        } else {
          row.push_back(format_double(
              strategy_ranking_bias(corpus, b.items, s, opts.rank_depth, tib)));
        }
      } catch (const UnusableData& e) {
        std::cerr << "warning: query '" << query << "', strategy '" << to_string(s)
                  << "': " << e.what() << '\n';
        row.emplace_back();
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw EmptyCorpus("no query yields usable data");

  detail::emit_table(table, "rerank", opts);
}

// ── evaluate ────────────────────────────────────────────────────────────────

namespace detail {

inline std::map<std::string, JudgmentSet> read_judgments(
    const fs::path& file, std::vector<LoadWarning>& warnings) {
  namespace rd = rankbias::detail;
  std::map<std::string, JudgmentSet> out;
  rd::read_jsonl(file, warnings, [&](const nlohmann::json& rec, std::int64_t line) {
    JudgmentSet set;
    set.subject = rd::require_id(rec, "subject", file, line);
    const auto votes = rd::require_string_array(rec, "judgments", file, line);
    if (votes.empty()) rd::schema_fail(file, line, "'judgments' must not be empty");
    for (const auto& vote : votes) {
      const auto j = parse_judgment(vote);
      if (!j) rd::schema_fail(file, line, "unknown judgment '" + vote + "'");
      set.judgments.push_back(*j);
    }
    if (const auto [pos, fresh] = out.insert_or_assign(set.subject, set); !fresh) {
      warnings.push_back({file.string(), line,
                          "duplicate subject '" + set.subject + "', later record kept"});
    }
  });
  if (out.empty()) {
    warnings.push_back({file.string(), 0, "file contained no judgments"});
  }
  return out;
}

inline const char* kLabelColumns[3] = {"republican", "neutral", "democratic"};

}  // namespace detail

inline void cmd_evaluate(const Options& opts) {
  detail::require_flag(opts.scores, "--scores");
  detail::require_flag(opts.judgments, "--judgments");

  BundlePaths paths;
  paths.scores = detail::opt_path(opts.scores);
  paths.ground_truth = detail::opt_path(opts.truth);
  paths.items = detail::opt_path(opts.items);
  LoadResult loaded = load_bundle(paths);
  std::vector<LoadWarning> warnings = std::move(loaded.warnings);
  const CorpusBundle& b = loaded.bundle;

  const auto judged = detail::read_judgments(opts.judgments, warnings);
  detail::print_warnings(warnings);

  std::map<UserId, double> crowd;
  for (const auto& [subject, set] : judged) crowd[subject] = amt_score(set);
  std::map<UserId, LeaningLabel> labels;
  std::map<UserId, BiasScore> normalized;
  for (const auto& [user, rec] : b.scores) {
    labels[user] = rec.label;
    if (rec.normalized) normalized[user] = BiasScore{*rec.normalized};
  }

  std::string text;

  // confusion of stored labels against crowd bins
  const ConfusionMatrix m = confusion(labels, crowd);
  const auto pct = m.percentage();
  Table confusion_table;
  confusion_table.header = {"crowd_bin", "republican", "neutral", "democratic",
                            "republican_pct", "neutral_pct", "democratic_pct"};
  for (int r = 0; r < 3; ++r) {
    confusion_table.rows.push_back(
        {bin_label(BinningScheme::ThreeBin, r),
         std::to_string(m.counts[r][0]), std::to_string(m.counts[r][1]),
         std::to_string(m.counts[r][2]), format_double(pct[r][0]),
         format_double(pct[r][1]), format_double(pct[r][2])});
  }
  text += "confusion (rows: crowd bins, columns: inferred labels)\n";
  text += render_text(confusion_table);
  text += "pairs counted: " + std::to_string(m.overlap) +
          ", uninferable excluded: " + std::to_string(m.excluded_uninferable) + "\n";
  text += "diagonal sum: " + detail::percent(m.diagonal_sum()) + "\n\n";

  // cutoff sweep over the raw normalized scores
  if (!normalized.empty()) {
    const std::vector<double> candidates =
        opts.candidates.empty()
            ? std::vector<double>(kDefaultThresholdCandidates.begin(),
                                  kDefaultThresholdCandidates.end())
            : opts.candidates;
    const ThresholdSelection sel = select_threshold(normalized, crowd, candidates);
    Table sweep;
    sweep.header = {"candidate", "diagonal_sum"};
    auto sorted = candidates;
    std::sort(sorted.begin(), sorted.end());
    for (const double x : sorted) {
      std::map<UserId, LeaningLabel> at_x;
      for (const auto& [user, score] : normalized) at_x[user] = discretize(score, x);
      sweep.rows.push_back({format_double(x),
                            format_double(confusion(at_x, crowd).diagonal_sum())});
    }
    text += "threshold sweep\n";
    text += render_text(sweep);
    text += "selected threshold: " + format_double(sel.threshold) + " (diagonal " +
            detail::percent(sel.diagonal_sum) + ")\n\n";
    if (!opts.out_dir.empty()) {
      fs::create_directories(opts.out_dir);
      detail::write_file(fs::path(opts.out_dir) / "thresholds.csv", render_csv(sweep));
    }
  }

  // coverage/accuracy against curated truth
  if (!opts.truth.empty()) {
    const CoverageAccuracy ca = coverage_accuracy(labels, b.ground_truth);
    Table cov;
    cov.header = {"class", "total", "inferred", "correct", "coverage", "accuracy"};
    const auto add_stats = [&cov](const std::string& name, const ClassStats& s) {
      cov.rows.push_back({name, std::to_string(s.total), std::to_string(s.inferred),
                          std::to_string(s.correct), format_double(s.coverage()),
                          s.accuracy() ? format_double(*s.accuracy()) : ""});
    };
    for (const auto& [label, stats] : ca.per_class) add_stats(to_string(label), stats);
    add_stats("overall", ca.overall);
    text += "coverage and accuracy against truth labels\n";
    text += render_text(cov);
    if (ca.macro_accuracy) {
      text += "macro accuracy: " + detail::percent(*ca.macro_accuracy) + "\n";
    }
    text += "excluded: " + std::to_string(ca.truth_only) + " truth-only, " +
            std::to_string(ca.inferred_only) + " inferred-only, " +
            std::to_string(ca.excluded_uninferable_truth) + " uninferable truth\n\n";
    if (!opts.out_dir.empty()) {
      fs::create_directories(opts.out_dir);
      detail::write_file(fs::path(opts.out_dir) / "coverage.csv", render_csv(cov));
    }
  }

  // judged content against the author's label
  if (!opts.content_judgments.empty()) {
    detail::require_flag(opts.items, "--items");
    std::vector<LoadWarning> content_warnings;
    const auto content_judged =
        detail::read_judgments(opts.content_judgments, content_warnings);
    detail::print_warnings(content_warnings);

    std::map<ItemId, BiasScore> content_scores;
    std::map<ItemId, LeaningLabel> source_labels;
    for (const auto& [item_id, set] : content_judged) {
      content_scores[item_id] = BiasScore{amt_score(set)};
      const auto item = b.items.find(item_id);
      if (item == b.items.end()) continue;  // skipped silently, like confusion()
      const auto score = b.scores.find(item->second.author);
      // an unknown author reads as uninferable: excluded and counted
      source_labels[item_id] = score == b.scores.end() ? LeaningLabel::Uninferable
                                                       : score->second.label;
    }
    const SourceContentCrosstab tab = source_content_crosstab(content_scores, source_labels);
    Table cross;
    cross.header = {"content_bin", "tweets", "share", "republican", "neutral",
                    "democratic", "republican_pct", "neutral_pct", "democratic_pct"};
    for (int r = 0; r < 7; ++r) {
      const CrosstabRow& row = tab.rows[static_cast<std::size_t>(r)];
      const auto rp = row.percentage();
      cross.rows.push_back({bin_label(BinningScheme::SevenBin, r),
                            std::to_string(row.total()), format_double(tab.tweet_share(r)),
                            std::to_string(row.republican), std::to_string(row.neutral),
                            std::to_string(row.democratic), format_double(rp[0]),
                            format_double(rp[1]), format_double(rp[2])});
    }
    text += "judged content vs source label\n";
    text += render_text(cross);
    text += "items counted: " + std::to_string(tab.overlap) +
            ", uninferable sources excluded: " + std::to_string(tab.excluded_uninferable) +
            "\n\n";
    if (!opts.out_dir.empty()) {
      fs::create_directories(opts.out_dir);
      detail::write_file(fs::path(opts.out_dir) / "crosstab.csv", render_csv(cross));
    }
  }

  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    detail::write_file(fs::path(opts.out_dir) / "evaluation.txt", text);
    detail::write_file(fs::path(opts.out_dir) / "confusion.csv", render_csv(confusion_table));
  }
  std::cout << text;
}

// ── corpus-bias ─────────────────────────────────────────────────────────────

inline void cmd_corpus_bias(const Options& opts) {
  detail::require_flag(opts.scores, "--scores");
  BiasPopulation what = BiasPopulation::Users;
  if (opts.what == "items") {
    what = BiasPopulation::Items;
  } else if (opts.what != "users") {
    throw InvalidParams("--what must be 'users' or 'items'");
  }

  BundlePaths paths;
  paths.scores = detail::opt_path(opts.scores);
  if (what == BiasPopulation::Users) {
    detail::require_flag(opts.users, "--users");
    paths.users = detail::opt_path(opts.users);
  } else {
    detail::require_flag(opts.items, "--items");
    paths.items = detail::opt_path(opts.items);
  }
  LoadResult loaded = load_bundle(paths);
  detail::print_warnings(loaded.warnings);
  if (what == BiasPopulation::Items) attach_source_bias(loaded.bundle);

  const CorpusBiasSample s =
      sample_corpus_bias(loaded.bundle, what, opts.sample_size, opts.seed);
  std::cout << "corpus bias (" << opts.what << ") = " << format_double(s.mean.value)
            << " over " << s.sampled << " sampled of " << s.population
            << " (scored " << s.scored << ", unscored " << s.unscored << ")\n";
}

// ── synth ───────────────────────────────────────────────────────────────────

inline void cmd_synth(const Options& opts) {
  detail::require_flag(opts.out_dir, "--out-dir");
  const CorpusBundle bundle = synth_bundle(opts.synth);
  auto written = save_bundle(bundle, opts.out_dir);
  written.push_back(write_synth_meta(opts.synth, opts.out_dir));
  std::cout << "wrote " << written.size() << " files to " << opts.out_dir << "\n";
}

// ── report ──────────────────────────────────────────────────────────────────

inline void cmd_report(const Options& opts) {
  detail::require_flag(opts.report_in, "--in");
  std::ifstream in(opts.report_in, std::ios::binary);
  if (!in) throw ParseError("cannot read " + opts.report_in);
  std::ostringstream buf;
  buf << in.rdbuf();
  const Table table = parse_csv(buf.str());
  std::cout << (opts.format == "csv" ? render_csv(table) : render_text(table));
}

// ── wiring ──────────────────────────────────────────────────────────────────

inline int run_cli(int argc, char** argv) {
  CLI::App app{"bias metrics for ranked political search feeds"};
  app.require_subcommand(1);
  Options opts;
  detail::ConfigBindings cfg;
  int rc = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_file,
                    "JSON object with defaults; explicit flags win");
  };
  const auto bind_path = [&](CLI::App* sub, const char* flag, const char* key,
                             std::string& target, const char* help) {
    cfg.bind(sub->add_option(flag, target, help), key, target);
  };

  // infer
  auto* infer = app.add_subcommand("infer", "score users by who they follow");
  add_common(infer);
  bind_path(infer, "--users", "users", opts.users, "users.jsonl (follow graph)");
  bind_path(infer, "--topics", "topics", opts.topics, "topic_labels.jsonl");
  bind_path(infer, "--seeds-dem", "seeds_dem", opts.seeds_dem, "seed list, one id per line");
  bind_path(infer, "--seeds-rep", "seeds_rep", opts.seeds_rep, "seed list, one id per line");
  bind_path(infer, "--out-dir", "out_dir", opts.out_dir, "where scores.jsonl lands");
  cfg.bind(infer->add_option("--threshold", opts.threshold,
                             "neutral cutoff on the normalized score"),
           "threshold", opts.threshold);
  cfg.bind(infer->add_option("--min-followings", opts.min_followings,
                             "distinct followings needed to infer"),
           "min_followings", opts.min_followings);
  infer->callback([&] {
    cfg.apply(opts.config_file);
    cmd_infer(opts);
  });

  // metrics
  auto* metrics = app.add_subcommand("metrics", "per-query input/output/ranking bias");
  add_common(metrics);
  bind_path(metrics, "--items", "items", opts.items, "items.jsonl");
  bind_path(metrics, "--snapshots", "snapshots", opts.snapshots, "snapshots.jsonl");
  bind_path(metrics, "--stream", "stream", opts.stream, "stream.jsonl membership");
  bind_path(metrics, "--scores", "scores", opts.scores, "scores.jsonl from infer");
  bind_path(metrics, "--categories", "categories", opts.categories,
            "JSON object query->category for Average rows");
  bind_path(metrics, "--out-dir", "out_dir", opts.out_dir, "emit metrics.csv and metrics.txt");
  cfg.bind(metrics->add_option("--rank-depth", opts.rank_depth, "top ranks scored"),
           "rank_depth", opts.rank_depth);
  metrics->add_option("--format", opts.format, "stdout rendering: table or csv")
      ->check(CLI::IsMember({"table", "csv"}));
  metrics->callback([&] {
    cfg.apply(opts.config_file);
    cmd_metrics(opts);
  });

  // rerank
  auto* rerank = app.add_subcommand("rerank", "ranking bias under alternative strategies");
  add_common(rerank);
  bind_path(rerank, "--items", "items", opts.items, "items.jsonl");
  bind_path(rerank, "--stream", "stream", opts.stream, "stream.jsonl membership");
  bind_path(rerank, "--scores", "scores", opts.scores, "scores.jsonl from infer");
  bind_path(rerank, "--snapshots", "snapshots", opts.snapshots,
            "snapshots.jsonl, enables the observed strategy");
  bind_path(rerank, "--out-dir", "out_dir", opts.out_dir, "emit rerank.csv and rerank.txt");
  cfg.bind(rerank->add_option("--strategies", opts.strategies,
                              "comma list: observed, most-retweeted, most-favorited, "
                              "reverse-chronological"),
           "strategies", opts.strategies);
  cfg.bind(rerank->add_option("--rank-depth", opts.rank_depth, "page size compared"),
           "rank_depth", opts.rank_depth);
  rerank->add_option("--format", opts.format, "stdout rendering: table or csv")
      ->check(CLI::IsMember({"table", "csv"}));
  rerank->callback([&] {
    cfg.apply(opts.config_file);
    cmd_rerank(opts);
  });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score inference against judgments");
  add_common(evaluate);
  bind_path(evaluate, "--scores", "scores", opts.scores, "scores.jsonl from infer");
  bind_path(evaluate, "--judgments", "judgments", opts.judgments,
            "judgments.jsonl keyed by user");
  bind_path(evaluate, "--truth", "truth", opts.truth, "ground_truth.jsonl");
  bind_path(evaluate, "--content-judgments", "content_judgments", opts.content_judgments,
            "judgments.jsonl keyed by tweet");
  bind_path(evaluate, "--items", "items", opts.items,
            "items.jsonl, joins tweets to authors for the crosstab");
  bind_path(evaluate, "--out-dir", "out_dir", opts.out_dir, "emit evaluation reports");
  cfg.bind(evaluate->add_option("--thresholds", opts.candidates,
                                "candidate neutral cutoffs for the sweep"),
           "thresholds", opts.candidates);
  evaluate->callback([&] {
    cfg.apply(opts.config_file);
    cmd_evaluate(opts);
  });

  // corpus-bias
  auto* corpus_bias = app.add_subcommand("corpus-bias", "mean bias of a sampled population");
  add_common(corpus_bias);
  bind_path(corpus_bias, "--users", "users", opts.users, "users.jsonl");
  bind_path(corpus_bias, "--items", "items", opts.items, "items.jsonl");
  bind_path(corpus_bias, "--scores", "scores", opts.scores, "scores.jsonl from infer");
  cfg.bind(corpus_bias->add_option("--what", opts.what, "population: users or items"),
           "what", opts.what);
  cfg.bind(corpus_bias->add_option("--sample-size", opts.sample_size,
                                   "sample size before degenerating to the full population"),
           "sample_size", opts.sample_size);
  cfg.bind(corpus_bias->add_option("--seed", opts.seed, "sampling seed"), "seed", opts.seed);
  corpus_bias->callback([&] {
    cfg.apply(opts.config_file);
    cmd_corpus_bias(opts);
  });

  // synth
  auto* synth = app.add_subcommand("synth", "generate a planted synthetic corpus");
  add_common(synth);
  bind_path(synth, "--out-dir", "out_dir", opts.out_dir, "output directory");
  SynthConfig& sc = opts.synth;
  cfg.bind(synth->add_option("--seed", sc.seed, "generator seed"), "seed", sc.seed);
  cfg.bind(synth->add_option("--n-users", sc.n_users, "population size"), "n_users",
           sc.n_users);
  cfg.bind(synth->add_option("--n-seed-users", sc.n_seed_users, "seed users per side"),
           "n_seed_users", sc.n_seed_users);
  cfg.bind(synth->add_option("--n-celebrities", sc.n_celebrities, "celebrities per side"),
           "n_celebrities", sc.n_celebrities);
  cfg.bind(synth->add_option("--n-topics", sc.n_topics, "topics per side"), "n_topics",
           sc.n_topics);
  cfg.bind(synth->add_option("--followings-per-user", sc.followings_per_user,
                             "follows drawn per regular user"),
           "followings_per_user", sc.followings_per_user);
  cfg.bind(synth->add_option("--frac-dem", sc.frac_dem, "democratic share"), "frac_dem",
           sc.frac_dem);
  cfg.bind(synth->add_option("--frac-rep", sc.frac_rep, "republican share"), "frac_rep",
           sc.frac_rep);
  cfg.bind(synth->add_option("--frac-neutral", sc.frac_neutral, "neutral share"),
           "frac_neutral", sc.frac_neutral);
  cfg.bind(synth->add_option("--separation", sc.separation,
                             "0 identical sides .. 1 disjoint sides"),
           "separation", sc.separation);
  cfg.bind(synth->add_option("--frac-lurkers", sc.frac_lurkers,
                             "share of users with thin follow lists"),
           "frac_lurkers", sc.frac_lurkers);
  cfg.bind(synth->add_option("--lurker-followings", sc.lurker_followings,
                             "follow budget for lurkers"),
           "lurker_followings", sc.lurker_followings);
  cfg.bind(synth->add_option("--n-queries", sc.n_queries, "queries generated"), "n_queries",
           sc.n_queries);
  cfg.bind(synth->add_option("--items-per-query", sc.items_per_query, "items per query"),
           "items_per_query", sc.items_per_query);
  cfg.bind(synth->add_option("--snapshots-per-query", sc.snapshots_per_query,
                             "ranked snapshots per query"),
           "snapshots_per_query", sc.snapshots_per_query);
  cfg.bind(synth->add_option("--page-size", sc.page_size, "items per snapshot"),
           "page_size", sc.page_size);
  cfg.bind(synth->add_option("--engagement-max", sc.engagement_max,
                             "log-uniform engagement ceiling"),
           "engagement_max", sc.engagement_max);
  cfg.bind(synth->add_option("--start-time", sc.start_time, "first snapshot epoch seconds"),
           "start_time", sc.start_time);
  cfg.bind(synth->add_option("--snapshot-interval", sc.snapshot_interval,
                             "seconds between snapshots"),
           "snapshot_interval", sc.snapshot_interval);
  synth->callback([&] {
    cfg.apply(opts.config_file);
    cmd_synth(opts);
  });

  // report
  auto* report = app.add_subcommand("report", "re-render a CSV report");
  report->add_option("--in", opts.report_in, "CSV file to render")->required();
  report->add_option("--format", opts.format, "table or csv")
      ->check(CLI::IsMember({"table", "csv"}));
  report->callback([&] { cmd_report(opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UnusableData& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const MalformedInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 2;
  }
  return rc;
}

}  // namespace rankbias::cli
