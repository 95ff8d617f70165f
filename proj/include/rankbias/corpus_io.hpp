/**
 * @file corpus_io.hpp
 * @brief Loading, saving, synthesising, and sampling corpora.
 *
 * On-disk form is JSON Lines, one record per line, UTF-8:
 *   items.jsonl        {"tweet_id","user_id","created_at","retweet_count",
 *                       "favorite_count","text"?}
 *   users.jsonl        {"user_id","followings":[...]}
 *   topic_labels.jsonl {"user_id","topics":[...]}
 *   seeds_dem.txt / seeds_rep.txt   one user_id per line
 *   snapshots.jsonl    {"query","captured_at","ranked_tweet_ids":[...]}
 *   stream.jsonl       {"query","tweet_id"}
 *   scores.jsonl       {"user_id","raw","normalized","label"}
 *   ground_truth.jsonl {"user_id","label"}
 *
 * Failure policy: an unreadable file is fatal (ParseError); a line that is
 * not JSON is skipped with a warning; a line that parses but breaks the
 * record schema is fatal (SchemaViolation) naming file and line. Duplicate
 * ids: the later record wins, counted. Dangling cross-references are
 * warnings here; operations that need them resolved stay strict.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankbias/error.hpp"
#include "rankbias/model.hpp"
#include "rankbias/prng.hpp"

namespace rankbias {

// ── bundle shape ────────────────────────────────────────────────────────────

struct UserRecord {
  UserId id;
  std::vector<UserId> followings;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct ScoreRecord {
  UserId user;
  std::optional<double> raw;         // absent for uninferable users
  std::optional<double> normalized;  // in [-1,1] when present
  LeaningLabel label = LeaningLabel::Uninferable;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

struct CorpusBundle {
  std::map<ItemId, Item> items;
  std::map<UserId, UserRecord> users;
  std::map<UserId, std::vector<Topic>> topic_labels;
  std::vector<RankedSnapshot> snapshots;
  std::map<QueryId, InputCorpus> input_corpora;
  std::vector<UserId> seed_dem;
  std::vector<UserId> seed_rep;
  std::map<UserId, ScoreRecord> scores;
  std::map<UserId, LeaningLabel> ground_truth;

  friend bool operator==(const CorpusBundle&, const CorpusBundle&) = default;
};

struct LoadWarning {
  std::string file;
  std::int64_t line = 0;  // 0 means the whole file
  std::string message;
};

struct BundlePaths {
  std::optional<std::filesystem::path> items;
  std::optional<std::filesystem::path> users;
  std::optional<std::filesystem::path> topics;
  std::optional<std::filesystem::path> snapshots;
  std::optional<std::filesystem::path> stream;
  std::optional<std::filesystem::path> seeds_dem;
  std::optional<std::filesystem::path> seeds_rep;
  std::optional<std::filesystem::path> scores;
  std::optional<std::filesystem::path> ground_truth;
};

struct LoadResult {
  CorpusBundle bundle;
  std::vector<LoadWarning> warnings;
  std::int64_t duplicate_records = 0;
};

// ── record plumbing ─────────────────────────────────────────────────────────

namespace detail {

inline std::string loc(const std::filesystem::path& file, std::int64_t line) {
  return file.string() + ":" + std::to_string(line);
}

[[noreturn]] inline void schema_fail(const std::filesystem::path& file,
                                     std::int64_t line, const std::string& what) {
  throw SchemaViolation(loc(file, line) + ": " + what);
}

inline const nlohmann::json& require_field(const nlohmann::json& rec,
                                           const char* key,
                                           const std::filesystem::path& file,
                                           std::int64_t line) {
  const auto it = rec.find(key);
  if (it == rec.end()) schema_fail(file, line, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string require_id(const nlohmann::json& rec, const char* key,
                              const std::filesystem::path& file, std::int64_t line) {
  const auto& v = require_field(rec, key, file, line);
  if (!v.is_string()) schema_fail(file, line, std::string("'") + key + "' must be a string");
  auto s = v.get<std::string>();
  if (s.empty()) schema_fail(file, line, std::string("'") + key + "' must not be empty");
  return s;
}

inline std::int64_t require_int(const nlohmann::json& rec, const char* key,
                                const std::filesystem::path& file, std::int64_t line) {
  const auto& v = require_field(rec, key, file, line);
  if (!v.is_number_integer()) {
    schema_fail(file, line, std::string("'") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

inline std::int64_t require_count(const nlohmann::json& rec, const char* key,
                                  const std::filesystem::path& file,
                                  std::int64_t line) {
  const std::int64_t v = require_int(rec, key, file, line);
  if (v < 0) schema_fail(file, line, std::string("'") + key + "' must be >= 0");
  return v;
}

inline std::vector<std::string> require_string_array(
    const nlohmann::json& rec, const char* key,
    const std::filesystem::path& file, std::int64_t line) {
  const auto& v = require_field(rec, key, file, line);
  if (!v.is_array()) schema_fail(file, line, std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& el : v) {
    if (!el.is_string() || el.get<std::string>().empty()) {
      schema_fail(file, line, std::string("'") + key + "' must hold non-empty strings");
    }
    out.push_back(el.get<std::string>());
  }
  return out;
}

inline std::optional<double> optional_number(const nlohmann::json& rec,
                                             const char* key,
                                             const std::filesystem::path& file,
                                             std::int64_t line) {
  const auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    schema_fail(file, line, std::string("'") + key + "' must be a number or null");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) schema_fail(file, line, std::string("'") + key + "' must be finite");
  return v;
}

inline LeaningLabel require_label(const nlohmann::json& rec, const char* key,
                                  const std::filesystem::path& file,
                                  std::int64_t line) {
  const auto text = require_id(rec, key, file, line);
  const auto label = parse_leaning_label(text);
  if (!label) schema_fail(file, line, "unknown label '" + text + "'");
  return *label;
}

/// Runs per_record over every JSON object in the file. Blank lines are
/// skipped silently, non-JSON lines with a warning.
template <typename Fn>
void read_jsonl(const std::filesystem::path& file,
                std::vector<LoadWarning>& warnings, Fn&& per_record) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot read " + file.string());
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      warnings.push_back({file.string(), lineno, "not valid JSON, line skipped"});
      continue;
    }
    if (!rec.is_object()) schema_fail(file, lineno, "record is not a JSON object");
    per_record(rec, lineno);
  }
}

/// Dedupes in place, preserving first occurrence; returns how many were cut.
inline std::int64_t dedupe_preserving_order(std::vector<std::string>& values) {
  std::set<std::string> seen;
  std::int64_t cut = 0;
  std::vector<std::string> kept;
  kept.reserve(values.size());
  for (auto& v : values) {
    if (seen.insert(v).second) {
      kept.push_back(std::move(v));
    } else {
      ++cut;
    }
  }
  values = std::move(kept);
  return cut;
}

// Dangling-reference warnings can be as numerous as the corpus; keep the
// first few per category and summarise the rest.
inline constexpr std::int64_t kIntegrityWarningCap = 10;

class CappedWarnings {
 public:
  CappedWarnings(std::vector<LoadWarning>& sink, std::string file)
      : sink_(sink), file_(std::move(file)) {}

  void add(const std::string& message) {
    ++total_;
    if (total_ <= kIntegrityWarningCap) sink_.push_back({file_, 0, message});
  }

  ~CappedWarnings() {
    if (total_ > kIntegrityWarningCap) {
      sink_.push_back({file_, 0,
                       "... and " + std::to_string(total_ - kIntegrityWarningCap) +
                           " more of the same"});
    }
  }

 private:
  std::vector<LoadWarning>& sink_;
  std::string file_;
  std::int64_t total_ = 0;
};

}  // namespace detail

// ── seed lists ──────────────────────────────────────────────────────────────

inline std::vector<UserId> read_seed_list(const std::filesystem::path& file,
                                          std::vector<LoadWarning>& warnings) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot read " + file.string());
  std::vector<UserId> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    out.push_back(line.substr(first, last - first + 1));
  }
  if (const auto cut = detail::dedupe_preserving_order(out); cut > 0) {
    warnings.push_back({file.string(), 0,
                        std::to_string(cut) + " duplicate seed id(s) dropped"});
  }
  return out;
}

// ── bundle loading ──────────────────────────────────────────────────────────

inline LoadResult load_bundle(const BundlePaths& paths) {
  LoadResult result;
  CorpusBundle& b = result.bundle;
  auto& warnings = result.warnings;

  if (paths.items) {
    detail::read_jsonl(*paths.items, warnings, [&](const nlohmann::json& rec,
                                                   std::int64_t line) {
      Item it;
      it.id = detail::require_id(rec, "tweet_id", *paths.items, line);
      it.author = detail::require_id(rec, "user_id", *paths.items, line);
      it.created_at = detail::require_int(rec, "created_at", *paths.items, line);
      it.retweet_count = detail::require_count(rec, "retweet_count", *paths.items, line);
      it.favorite_count = detail::require_count(rec, "favorite_count", *paths.items, line);
      if (const auto t = rec.find("text"); t != rec.end() && !t->is_null()) {
        if (!t->is_string()) detail::schema_fail(*paths.items, line, "'text' must be a string");
        it.text = t->get<std::string>();
      }
      if (const auto [pos, fresh] = b.items.insert_or_assign(it.id, it); !fresh) {
        ++result.duplicate_records;
        warnings.push_back({paths.items->string(), line,
                            "duplicate tweet_id '" + it.id + "', later record kept"});
      }
    });
  }

  if (paths.users) {
    detail::read_jsonl(*paths.users, warnings, [&](const nlohmann::json& rec,
                                                   std::int64_t line) {
      UserRecord u;
      u.id = detail::require_id(rec, "user_id", *paths.users, line);
      u.followings = detail::require_string_array(rec, "followings", *paths.users, line);
      if (const auto cut = detail::dedupe_preserving_order(u.followings); cut > 0) {
        warnings.push_back({paths.users->string(), line,
                            "user '" + u.id + "': " + std::to_string(cut) +
                                " duplicate following(s) dropped"});
      }
      if (const auto [pos, fresh] = b.users.insert_or_assign(u.id, u); !fresh) {
        ++result.duplicate_records;
        warnings.push_back({paths.users->string(), line,
                            "duplicate user_id '" + u.id + "', later record kept"});
      }
    });
  }

  if (paths.topics) {
    detail::read_jsonl(*paths.topics, warnings, [&](const nlohmann::json& rec,
                                                    std::int64_t line) {
      const auto user = detail::require_id(rec, "user_id", *paths.topics, line);
      auto topics = detail::require_string_array(rec, "topics", *paths.topics, line);
      for (auto& t : topics) t = fold_topic(t);
      if (const auto cut = detail::dedupe_preserving_order(topics); cut > 0) {
        warnings.push_back({paths.topics->string(), line,
                            "user '" + user + "': " + std::to_string(cut) +
                                " duplicate topic(s) dropped after case folding"});
      }
      if (const auto [pos, fresh] = b.topic_labels.insert_or_assign(user, topics); !fresh) {
        ++result.duplicate_records;
        warnings.push_back({paths.topics->string(), line,
                            "duplicate user_id '" + user + "', later record kept"});
      }
    });
  }

  if (paths.snapshots) {
    detail::read_jsonl(*paths.snapshots, warnings, [&](const nlohmann::json& rec,
                                                       std::int64_t line) {
      RankedSnapshot snap;
      snap.query = detail::require_id(rec, "query", *paths.snapshots, line);
      snap.captured_at = detail::require_int(rec, "captured_at", *paths.snapshots, line);
      snap.ranked_items =
          detail::require_string_array(rec, "ranked_tweet_ids", *paths.snapshots, line);
      const std::set<ItemId> unique(snap.ranked_items.begin(), snap.ranked_items.end());
      if (unique.size() != snap.ranked_items.size()) {
        detail::schema_fail(*paths.snapshots, line, "duplicate item in ranked list");
      }
      if (snap.ranked_items.empty()) {
        warnings.push_back({paths.snapshots->string(), line, "snapshot with empty ranked list"});
      }
      b.snapshots.push_back(std::move(snap));
    });
  }

  if (paths.stream) {
    std::map<QueryId, std::set<ItemId>> seen;
    detail::read_jsonl(*paths.stream, warnings, [&](const nlohmann::json& rec,
                                                    std::int64_t line) {
      const auto query = detail::require_id(rec, "query", *paths.stream, line);
      auto item = detail::require_id(rec, "tweet_id", *paths.stream, line);
      if (!seen[query].insert(item).second) {
        ++result.duplicate_records;
        warnings.push_back({paths.stream->string(), line,
                            "duplicate membership ('" + query + "', '" + item + "')"});
        return;
      }
      auto& corpus = b.input_corpora[query];
      corpus.query = query;
      corpus.items.push_back(std::move(item));
    });
  }

  if (paths.seeds_dem) b.seed_dem = read_seed_list(*paths.seeds_dem, warnings);
  if (paths.seeds_rep) b.seed_rep = read_seed_list(*paths.seeds_rep, warnings);

  if (paths.scores) {
    detail::read_jsonl(*paths.scores, warnings, [&](const nlohmann::json& rec,
                                                    std::int64_t line) {
      ScoreRecord s;
      s.user = detail::require_id(rec, "user_id", *paths.scores, line);
      s.label = detail::require_label(rec, "label", *paths.scores, line);
      s.raw = detail::optional_number(rec, "raw", *paths.scores, line);
      s.normalized = detail::optional_number(rec, "normalized", *paths.scores, line);
      if (s.normalized && (*s.normalized < -1.0 || *s.normalized > 1.0)) {
        detail::schema_fail(*paths.scores, line, "'normalized' must lie in [-1,1]");
      }
      if (s.label != LeaningLabel::Uninferable && !s.normalized) {
        detail::schema_fail(*paths.scores, line, "labelled record missing 'normalized'");
      }
      if (const auto [pos, fresh] = b.scores.insert_or_assign(s.user, s); !fresh) {
        ++result.duplicate_records;
        warnings.push_back({paths.scores->string(), line,
                            "duplicate user_id '" + s.user + "', later record kept"});
      }
    });
  }

  if (paths.ground_truth) {
    detail::read_jsonl(*paths.ground_truth, warnings, [&](const nlohmann::json& rec,
                                                          std::int64_t line) {
      const auto user = detail::require_id(rec, "user_id", *paths.ground_truth, line);
      const auto label = detail::require_label(rec, "label", *paths.ground_truth, line);
      if (const auto [pos, fresh] = b.ground_truth.insert_or_assign(user, label); !fresh) {
        ++result.duplicate_records;
        warnings.push_back({paths.ground_truth->string(), line,
                            "duplicate user_id '" + user + "', later record kept"});
      }
    });
  }

  // A supplied but empty file is almost always a collection mistake.
  const auto warn_if_empty = [&warnings](const std::optional<std::filesystem::path>& p,
                                         bool empty, const char* what) {
    if (p && empty) {
      warnings.push_back({p->string(), 0, std::string("file contained no ") + what});
    }
  };
  warn_if_empty(paths.items, b.items.empty(), "items");
  warn_if_empty(paths.users, b.users.empty(), "users");
  warn_if_empty(paths.topics, b.topic_labels.empty(), "topic labels");
  warn_if_empty(paths.snapshots, b.snapshots.empty(), "snapshots");
  warn_if_empty(paths.stream, b.input_corpora.empty(), "membership records");
  warn_if_empty(paths.seeds_dem, b.seed_dem.empty(), "seed ids");
  warn_if_empty(paths.seeds_rep, b.seed_rep.empty(), "seed ids");
  warn_if_empty(paths.scores, b.scores.empty(), "scores");
  warn_if_empty(paths.ground_truth, b.ground_truth.empty(), "ground-truth labels");

  // Cross-reference scan. Only judge a reference when both ends were loaded.
  if (paths.items && paths.users) {
    detail::CappedWarnings cap(warnings, paths.items->string());
    for (const auto& [id, item] : b.items) {
      if (!b.users.contains(item.author)) {
        cap.add("item '" + id + "' authored by unknown user '" + item.author + "'");
      }
    }
  }
  if (paths.snapshots && paths.items) {
    detail::CappedWarnings cap(warnings, paths.snapshots->string());
    for (const auto& snap : b.snapshots) {
      for (const auto& id : snap.ranked_items) {
        if (!b.items.contains(id)) {
          cap.add("snapshot ('" + snap.query + "', " + std::to_string(snap.captured_at) +
                  ") references unknown item '" + id + "'");
        }
      }
    }
  }
  if (paths.stream && paths.items) {
    detail::CappedWarnings cap(warnings, paths.stream->string());
    for (const auto& [query, corpus] : b.input_corpora) {
      for (const auto& id : corpus.items) {
        if (!b.items.contains(id)) {
          cap.add("corpus '" + query + "' references unknown item '" + id + "'");
        }
      }
    }
  }
  if (paths.users) {
    if (paths.seeds_dem) {
      detail::CappedWarnings cap(warnings, paths.seeds_dem->string());
      for (const auto& id : b.seed_dem) {
        if (!b.users.contains(id)) cap.add("seed '" + id + "' not in users");
      }
    }
    if (paths.seeds_rep) {
      detail::CappedWarnings cap(warnings, paths.seeds_rep->string());
      for (const auto& id : b.seed_rep) {
        if (!b.users.contains(id)) cap.add("seed '" + id + "' not in users");
      }
    }
    if (paths.topics) {
      detail::CappedWarnings cap(warnings, paths.topics->string());
      for (const auto& [user, topics] : b.topic_labels) {
        if (!b.users.contains(user)) cap.add("topic label for unknown user '" + user + "'");
      }
    }
    if (paths.scores) {
      detail::CappedWarnings cap(warnings, paths.scores->string());
      for (const auto& [user, rec] : b.scores) {
        if (!b.users.contains(user)) cap.add("score for unknown user '" + user + "'");
      }
    }
  }
  if (paths.seeds_dem && paths.seeds_rep) {
    const std::set<UserId> dem(b.seed_dem.begin(), b.seed_dem.end());
    for (const auto& id : b.seed_rep) {
      if (dem.contains(id)) {
        warnings.push_back({paths.seeds_rep->string(), 0,
                            "seed '" + id + "' appears in both seed lists"});
      }
    }
  }

  return result;
}

// ── bundle saving ───────────────────────────────────────────────────────────

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);  // pin '\n' on every platform
  if (!out) throw ParseError("cannot write " + file.string());
  return out;
}

}  // namespace detail

/// Writes score records as one JSON object per line, null for absent numbers.
inline std::filesystem::path write_scores_jsonl(
    const std::map<UserId, ScoreRecord>& scores, const std::filesystem::path& file) {
  using nlohmann::ordered_json;
  auto out = detail::open_out(file);
  for (const auto& [user, s] : scores) {
    ordered_json j;
    j["user_id"] = s.user;
    j["raw"] = s.raw ? ordered_json(*s.raw) : ordered_json(nullptr);
    j["normalized"] = s.normalized ? ordered_json(*s.normalized) : ordered_json(nullptr);
    j["label"] = to_string(s.label);
    out << j.dump() << '\n';
  }
  return file;
}

/// Writes every non-empty section under dir with deterministic ordering.
/// Returns the paths written. save -> load -> save is byte-stable.
inline std::vector<std::filesystem::path> save_bundle(
    const CorpusBundle& b, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> written;
  using nlohmann::ordered_json;

  if (!b.items.empty()) {
    const fs::path p = dir / "items.jsonl";
    auto out = detail::open_out(p);
    for (const auto& [id, it] : b.items) {
      ordered_json j;
      j["tweet_id"] = it.id;
      j["user_id"] = it.author;
      j["created_at"] = it.created_at;
      j["retweet_count"] = it.retweet_count;
      j["favorite_count"] = it.favorite_count;
      if (it.text) j["text"] = *it.text;
      out << j.dump() << '\n';
    }
    written.push_back(p);
  }

  if (!b.users.empty()) {
    const fs::path p = dir / "users.jsonl";
    auto out = detail::open_out(p);
    for (const auto& [id, u] : b.users) {
      ordered_json j;
      j["user_id"] = u.id;
      j["followings"] = u.followings;
      out << j.dump() << '\n';
    }
    written.push_back(p);
  }

  if (!b.topic_labels.empty()) {
    const fs::path p = dir / "topic_labels.jsonl";
    auto out = detail::open_out(p);
    for (const auto& [user, topics] : b.topic_labels) {
      ordered_json j;
      j["user_id"] = user;
      j["topics"] = topics;
      out << j.dump() << '\n';
    }
    written.push_back(p);
  }

  if (!b.snapshots.empty()) {
    const fs::path p = dir / "snapshots.jsonl";
    auto out = detail::open_out(p);
    auto sorted = b.snapshots;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const RankedSnapshot& a, const RankedSnapshot& z) {
                       if (a.query != z.query) return a.query < z.query;
                       return a.captured_at < z.captured_at;
                     });
    for (const auto& snap : sorted) {
      ordered_json j;
      j["query"] = snap.query;
      j["captured_at"] = snap.captured_at;
      j["ranked_tweet_ids"] = snap.ranked_items;
      out << j.dump() << '\n';
    }
    written.push_back(p);
  }

  if (!b.input_corpora.empty()) {
    const fs::path p = dir / "stream.jsonl";
    auto out = detail::open_out(p);
    for (const auto& [query, corpus] : b.input_corpora) {
      auto items = corpus.items;  // membership is set-like: store sorted
      std::sort(items.begin(), items.end());
      for (const auto& id : items) {
        ordered_json j;
        j["query"] = query;
        j["tweet_id"] = id;
        out << j.dump() << '\n';
      }
    }
    written.push_back(p);
  }

  const auto write_seeds = [&](const std::vector<UserId>& seeds, const char* name) {
    if (seeds.empty()) return;
    const fs::path p = dir / name;
    auto out = detail::open_out(p);
    for (const auto& id : seeds) out << id << '\n';
    written.push_back(p);
  };
  write_seeds(b.seed_dem, "seeds_dem.txt");
  write_seeds(b.seed_rep, "seeds_rep.txt");

  if (!b.scores.empty()) {
    written.push_back(write_scores_jsonl(b.scores, dir / "scores.jsonl"));
  }

  if (!b.ground_truth.empty()) {
    const fs::path p = dir / "ground_truth.jsonl";
    auto out = detail::open_out(p);
    for (const auto& [user, label] : b.ground_truth) {
      ordered_json j;
      j["user_id"] = user;
      j["label"] = to_string(label);
      out << j.dump() << '\n';
    }
    written.push_back(p);
  }

  return written;
}

/// The follow graph view the inference modules consume.
inline std::map<UserId, std::vector<UserId>> follow_graph(const CorpusBundle& b) {
  std::map<UserId, std::vector<UserId>> graph;
  for (const auto& [id, user] : b.users) graph[id] = user.followings;
  return graph;
}

/// Copies each author's normalized score onto their items so ranked lists
/// can be scored. Returns how many items stayed unscored.
inline std::size_t attach_source_bias(CorpusBundle& b) {
  std::size_t unscored = 0;
  for (auto& [id, item] : b.items) {
    const auto it = b.scores.find(item.author);
    if (it != b.scores.end() && it->second.normalized) {
      item.source_bias = BiasScore{*it->second.normalized};
    } else {
      item.source_bias.reset();
      ++unscored;
    }
  }
  return unscored;
}

// ── synthetic corpora ───────────────────────────────────────────────────────

/// Knobs for the planted-world generator. Two disjoint celebrity pools carry
/// side-specific topic vocabularies; a user's side decides how often their
/// follows land in the own-side pool: p = (1 + separation) / 2. At
/// separation 1 the sides never mix (vocabularies disjoint downstream); at 0
/// both sides follow both pools evenly (identical profiles in expectation).
struct SynthConfig {
  std::uint64_t seed = 42;
  std::int64_t n_users = 200;          // population, excluding seeds and celebrities
  std::int64_t n_seed_users = 10;      // per side
  std::int64_t n_celebrities = 20;     // per side
  std::int64_t n_topics = 8;           // per side
  std::int64_t followings_per_user = 15;
  double frac_dem = 0.45;
  double frac_rep = 0.45;
  double frac_neutral = 0.10;
  double separation = 1.0;
  double frac_lurkers = 0.0;           // share with too few follows to infer
  std::int64_t lurker_followings = 3;
  std::int64_t n_queries = 2;
  std::int64_t items_per_query = 50;
  std::int64_t snapshots_per_query = 4;
  std::int64_t page_size = kDefaultPageSize;
  std::int64_t engagement_max = 1000;
  std::int64_t start_time = 1446350400;  // fixed anchor so runs replay
  std::int64_t snapshot_interval = 600;
};

inline std::vector<std::string> validate(const SynthConfig& cfg) {
  std::vector<std::string> problems;
  const auto need = [&](bool ok, const char* msg) {
    if (!ok) problems.emplace_back(msg);
  };
  need(cfg.n_users >= 1, "n_users must be >= 1");
  need(cfg.n_seed_users >= 1, "n_seed_users must be >= 1");
  need(cfg.n_celebrities >= 1, "n_celebrities must be >= 1");
  need(cfg.n_topics >= 1, "n_topics must be >= 1");
  need(cfg.n_topics <= 2 * cfg.n_celebrities,
       "n_topics must be <= 2 * n_celebrities or some topics go unused");
  need(cfg.followings_per_user >= 1, "followings_per_user must be >= 1");
  need(cfg.followings_per_user <= 2 * cfg.n_celebrities,
       "followings_per_user cannot exceed the number of celebrities");
  need(cfg.frac_dem >= 0.0 && cfg.frac_rep >= 0.0 && cfg.frac_neutral >= 0.0,
       "mixture fractions must be >= 0");
  need(std::abs(cfg.frac_dem + cfg.frac_rep + cfg.frac_neutral - 1.0) <= 1e-9,
       "mixture fractions must sum to 1");
  need(cfg.separation >= 0.0 && cfg.separation <= 1.0, "separation must lie in [0,1]");
  need(cfg.frac_lurkers >= 0.0 && cfg.frac_lurkers <= 1.0,
       "frac_lurkers must lie in [0,1]");
  need(cfg.lurker_followings >= 0 &&
           cfg.lurker_followings <= 2 * cfg.n_celebrities,
       "lurker_followings must lie in [0, 2 * n_celebrities]");
  need(cfg.n_queries >= 0, "n_queries must be >= 0");
  need(cfg.n_queries == 0 || cfg.items_per_query >= 1,
       "items_per_query must be >= 1 when queries are generated");
  need(cfg.snapshots_per_query >= 0, "snapshots_per_query must be >= 0");
  need(cfg.page_size >= 1, "page_size must be >= 1");
  need(cfg.engagement_max >= 0, "engagement_max must be >= 0");
  need(cfg.snapshot_interval >= 1, "snapshot_interval must be >= 1");
  return problems;
}

namespace detail {

inline std::string pad_id(const char* prefix, std::int64_t n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return prefix + digits;
}

/// Log-uniform engagement in [0, max]: heavy tail of popular items, most
/// items near zero, matching how retweet counts actually spread.
inline std::int64_t log_uniform(Prng& rng, std::int64_t max) {
  if (max <= 0) return 0;
  const double u = rng.next_unit();
  const auto v = static_cast<std::int64_t>(
                     std::pow(static_cast<double>(max) + 1.0, u)) - 1;
  return std::clamp<std::int64_t>(v, 0, max);
}

/// Class counts by largest remainder, so totals always hit n exactly and
/// each class is within 1 of its exact share.
inline std::array<std::int64_t, 3> mixture_counts(std::int64_t n,
                                                  const std::array<double, 3>& fracs) {
  std::array<std::int64_t, 3> counts{};
  std::array<std::pair<double, int>, 3> rema{};
  std::int64_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double share = fracs[static_cast<std::size_t>(i)] * static_cast<double>(n);
    counts[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(share));
    assigned += counts[static_cast<std::size_t>(i)];
    rema[static_cast<std::size_t>(i)] = {share - std::floor(share), i};
  }
  std::stable_sort(rema.begin(), rema.end(),
                   [](const auto& a, const auto& z) { return a.first > z.first; });
  for (std::int64_t r = 0; r < n - assigned; ++r) {
    ++counts[static_cast<std::size_t>(rema[static_cast<std::size_t>(r % 3)].second)];
  }
  return counts;
}

}  // namespace detail

/// Deterministic planted world: same config, same bytes. Ground truth covers
/// the population and the seed users; celebrities are followed, not judged.
inline CorpusBundle synth_bundle(const SynthConfig& cfg) {
  if (const auto problems = validate(cfg); !problems.empty()) {
    std::string joined = "synth config invalid:";
    for (const auto& p : problems) joined += " " + p + ";";
    throw InvalidConfig(joined);
  }

  CorpusBundle b;
  Prng rng(cfg.seed);
  const std::int64_t C = cfg.n_celebrities;

  // Celebrity pools with side-specific vocabularies. Each celebrity carries
  // two topics; consecutive offsets cover the whole vocabulary.
  std::vector<UserId> dem_pool;
  std::vector<UserId> rep_pool;
  for (std::int64_t i = 0; i < C; ++i) {
    const UserId cd = detail::pad_id("cd", i, 3);
    const UserId cr = detail::pad_id("cr", i, 3);
    dem_pool.push_back(cd);
    rep_pool.push_back(cr);
    b.users[cd] = UserRecord{cd, {}};
    b.users[cr] = UserRecord{cr, {}};
    b.topic_labels[cd] = {detail::pad_id("left_", (2 * i) % cfg.n_topics, 2),
                          detail::pad_id("left_", (2 * i + 1) % cfg.n_topics, 2)};
    b.topic_labels[cr] = {detail::pad_id("right_", (2 * i) % cfg.n_topics, 2),
                          detail::pad_id("right_", (2 * i + 1) % cfg.n_topics, 2)};
    detail::dedupe_preserving_order(b.topic_labels[cd]);
    detail::dedupe_preserving_order(b.topic_labels[cr]);
  }

  // Seed users walk their own pool round-robin so every celebrity has at
  // least one seed follower once n_seed_users * followings >= pool size.
  const std::int64_t seed_follows = std::min(cfg.followings_per_user, C);
  for (std::int64_t i = 0; i < cfg.n_seed_users; ++i) {
    const UserId sd = detail::pad_id("sd", i, 3);
    const UserId sr = detail::pad_id("sr", i, 3);
    UserRecord rd{sd, {}};
    UserRecord rr{sr, {}};
    for (std::int64_t k = 0; k < seed_follows; ++k) {
      const auto idx = static_cast<std::size_t>((i * seed_follows + k) % C);
      rd.followings.push_back(dem_pool[idx]);
      rr.followings.push_back(rep_pool[idx]);
    }
    b.users[sd] = rd;
    b.users[sr] = rr;
    b.seed_dem.push_back(sd);
    b.seed_rep.push_back(sr);
    b.ground_truth[sd] = LeaningLabel::Democratic;
    b.ground_truth[sr] = LeaningLabel::Republican;
  }

  // Population: planted labels in index blocks, follows drawn per user.
  const auto counts = detail::mixture_counts(
      cfg.n_users, {cfg.frac_dem, cfg.frac_rep, cfg.frac_neutral});
  std::vector<UserId> population;
  population.reserve(static_cast<std::size_t>(cfg.n_users));
  for (std::int64_t i = 0; i < cfg.n_users; ++i) {
    const UserId uid = detail::pad_id("u", i, 6);
    const LeaningLabel planted =
        i < counts[0] ? LeaningLabel::Democratic
        : i < counts[0] + counts[1] ? LeaningLabel::Republican
                                    : LeaningLabel::Neutral;
    const bool lurker = rng.next_unit() < cfg.frac_lurkers;
    const std::int64_t budget =
        lurker ? cfg.lurker_followings : cfg.followings_per_user;

    const double p_own =
        planted == LeaningLabel::Neutral ? 0.5 : (1.0 + cfg.separation) / 2.0;
    std::int64_t own = 0;
    for (std::int64_t k = 0; k < budget; ++k) {
      if (rng.next_unit() < p_own) ++own;
    }
    own = std::min(own, C);
    std::int64_t other = std::min(budget - own, C);

    const auto& own_pool = planted == LeaningLabel::Republican ? rep_pool : dem_pool;
    const auto& other_pool = planted == LeaningLabel::Republican ? dem_pool : rep_pool;
    UserRecord rec{uid, {}};
    for (const auto idx : rng.sample_indices(static_cast<std::size_t>(C),
                                             static_cast<std::size_t>(own))) {
      rec.followings.push_back(own_pool[idx]);
    }
    for (const auto idx : rng.sample_indices(static_cast<std::size_t>(C),
                                             static_cast<std::size_t>(other))) {
      rec.followings.push_back(other_pool[idx]);
    }
    b.users[uid] = rec;
    b.ground_truth[uid] = planted;
    population.push_back(uid);
  }

  // Items, per-query streams, and ranked snapshots. Every item predates the
  // first snapshot so pages differ only by the per-snapshot rank noise.
  std::int64_t tweet_counter = 0;
  const double noise_scale =
      std::max(1.0, static_cast<double>(cfg.engagement_max) * 0.5);
  for (std::int64_t q = 0; q < cfg.n_queries; ++q) {
    const QueryId query = detail::pad_id("q", q + 1, 2);
    InputCorpus corpus{query, {}};
    std::vector<ItemId> query_items;
    for (std::int64_t j = 0; j < cfg.items_per_query; ++j) {
      Item it;
      it.id = detail::pad_id("t", tweet_counter++, 7);
      it.author = population[rng.uniform_index(population.size())];
      it.created_at =
          cfg.start_time - 86400 + static_cast<std::int64_t>(rng.uniform_below(86400));
      it.retweet_count = detail::log_uniform(rng, cfg.engagement_max);
      it.favorite_count = detail::log_uniform(rng, cfg.engagement_max);
      corpus.items.push_back(it.id);
      query_items.push_back(it.id);
      b.items[it.id] = std::move(it);
    }
    b.input_corpora[query] = corpus;

    for (std::int64_t k = 0; k < cfg.snapshots_per_query; ++k) {
      std::vector<std::pair<double, ItemId>> scored;
      scored.reserve(query_items.size());
      for (const auto& id : query_items) {
        const Item& it = b.items[id];
        const double score =
            static_cast<double>(it.retweet_count + it.favorite_count) +
            noise_scale * rng.next_unit();
        scored.emplace_back(score, id);
      }
      std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& z) {
        if (a.first != z.first) return a.first > z.first;
        return a.second < z.second;
      });
      RankedSnapshot snap;
      snap.query = query;
      snap.captured_at = cfg.start_time + k * cfg.snapshot_interval;
      const auto take = std::min<std::size_t>(scored.size(),
                                              static_cast<std::size_t>(cfg.page_size));
      for (std::size_t i = 0; i < take; ++i) snap.ranked_items.push_back(scored[i].second);
      b.snapshots.push_back(std::move(snap));
    }
  }

  return b;
}

/// Sidecar describing how a synthetic bundle came to be.
inline std::filesystem::path write_synth_meta(const SynthConfig& cfg,
                                              const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p = dir / "meta.json";
  auto out = detail::open_out(p);
  nlohmann::ordered_json j;
  j["generator"] = "mt19937_64";
  j["seed"] = cfg.seed;
  j["config"] = {{"n_users", cfg.n_users},
                 {"n_seed_users", cfg.n_seed_users},
                 {"n_celebrities", cfg.n_celebrities},
                 {"n_topics", cfg.n_topics},
                 {"followings_per_user", cfg.followings_per_user},
                 {"frac_dem", cfg.frac_dem},
                 {"frac_rep", cfg.frac_rep},
                 {"frac_neutral", cfg.frac_neutral},
                 {"separation", cfg.separation},
                 {"frac_lurkers", cfg.frac_lurkers},
                 {"lurker_followings", cfg.lurker_followings},
                 {"n_queries", cfg.n_queries},
                 {"items_per_query", cfg.items_per_query},
                 {"snapshots_per_query", cfg.snapshots_per_query},
                 {"page_size", cfg.page_size},
                 {"engagement_max", cfg.engagement_max},
                 {"start_time", cfg.start_time},
                 {"snapshot_interval", cfg.snapshot_interval}};
  out << j.dump(2) << '\n';
  return p;
}

// ── corpus-level bias sampling ──────────────────────────────────────────────

enum class BiasPopulation { Users, Items };

struct CorpusBiasSample {
  BiasScore mean;
  std::int64_t population = 0;
  std::int64_t sampled = 0;
  std::int64_t scored = 0;
  std::int64_t unscored = 0;  // sampled members without a usable score
};

/// Mean bias over a uniform sample without replacement (the full population
/// when it is not larger than sample_size). Members without a score stay in
/// the sample but only the scored ones enter the mean.
inline CorpusBiasSample sample_corpus_bias(const CorpusBundle& bundle,
                                           BiasPopulation what,
                                           std::int64_t sample_size = 1000,
                                           std::uint64_t seed = 0) {
  if (sample_size < 1) throw InvalidParams("sample_corpus_bias: sample_size must be >= 1");

  std::vector<std::optional<double>> scores;
  if (what == BiasPopulation::Users) {
    scores.reserve(bundle.users.size());
    for (const auto& [id, user] : bundle.users) {
      const auto it = bundle.scores.find(id);
      if (it != bundle.scores.end() && it->second.normalized) {
        scores.push_back(*it->second.normalized);
      } else {
        scores.push_back(std::nullopt);
      }
    }
  } else {
    scores.reserve(bundle.items.size());
    for (const auto& [id, item] : bundle.items) {
      if (item.source_bias) {
        scores.push_back(item.source_bias->value);
      } else {
        scores.push_back(std::nullopt);
      }
    }
  }
  if (scores.empty()) throw EmptyPopulation("sample_corpus_bias: empty population");

  CorpusBiasSample out;
  out.population = static_cast<std::int64_t>(scores.size());

  double sum = 0.0;
  const auto tally = [&](const std::optional<double>& s) {
    ++out.sampled;
    if (s) {
      sum += *s;
      ++out.scored;
    } else {
      ++out.unscored;
    }
  };
  if (out.population <= sample_size) {
    for (const auto& s : scores) tally(s);
  } else {
    Prng rng(seed);
    auto picked = rng.sample_indices(scores.size(),
                                     static_cast<std::size_t>(sample_size));
    std::sort(picked.begin(), picked.end());  // population order, like the full pass
    for (const auto idx : picked) tally(scores[idx]);
  }
  if (out.scored == 0) {
    throw EmptyPopulation("sample_corpus_bias: no scored member in the sample");
  }
  out.mean = BiasScore{sum / static_cast<double>(out.scored)};
  return out;
}

}  // namespace rankbias
