#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vtsql/model/result_set.hpp"
#include "vtsql/sql/store.hpp"

namespace vtsql::ner {

enum class Confidence { Exact, Fuzzy, Unresolved };
std::string_view confidence_name(Confidence c);

// A database row an entity refers to.
struct EntityRef {
  std::string table;  // shp_data or ship_ais
  std::string key;    // id or mmsi, as text
  std::string name;   // stored surface form
  friend bool operator==(const EntityRef&, const EntityRef&) = default;
};

struct Candidate {
  std::string tag_path;
  std::optional<EntityRef> ref;
  std::string canonical;  // lexicon canonical form, or the stored name
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct EntityAnnotation {
  std::size_t start = 0;  // byte offsets, [start, end)
  std::size_t end = 0;
  std::string surface;
  std::string tag_path;
  std::optional<EntityRef> resolution;
  Confidence confidence = Confidence::Exact;
  std::string canonical;
  std::optional<int> minutes;            // TEMPORAL/WINDOW
  std::vector<Candidate> alternatives;   // other readings of the same span

  bool ambiguous() const { return !alternatives.empty(); }
};

nlohmann::json to_json(const EntityAnnotation& a);

struct LexiconEntry {
  std::string term;
  std::string tag_path;
  std::string canonical;
};

// Tab-separated "term<TAB>tag_path[<TAB>canonical]"; '#' starts a comment.
std::vector<LexiconEntry> parse_lexicon(std::string_view text);
std::vector<LexiconEntry> load_lexicon(const std::string& path);

// Normalized surface form -> candidate readings. Built from shp_data
// names, ship_ais names and the type lexicon; immutable once built.
class Gazetteer {
 public:
  static Gazetteer build(const sql::Snapshot& snapshot, const std::vector<LexiconEntry>& lexicon);
  static Gazetteer from_lexicon(const std::vector<LexiconEntry>& lexicon);

  std::uint64_t version() const { return version_; }
  const std::vector<Candidate>* lookup(std::string_view normalized) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t max_tokens() const { return max_tokens_; }

  struct Vessel {
    std::string mmsi;
    std::string name;
    std::string soundex;
  };
  const std::vector<Vessel>& vessels() const { return vessels_; }

  void add(const std::string& surface, Candidate c);

 private:
  std::uint64_t version_ = 0;
  std::map<std::string, std::vector<Candidate>> entries_;
  std::vector<Vessel> vessels_;
  std::size_t max_tokens_ = 1;
};

// Rebuilds the gazetteer when the store publishes a new snapshot version.
class GazetteerCache {
 public:
  explicit GazetteerCache(std::vector<LexiconEntry> lexicon) : lexicon_(std::move(lexicon)) {}
  std::shared_ptr<const Gazetteer> get(const sql::Snapshot& snapshot);

 private:
  std::vector<LexiconEntry> lexicon_;
  std::mutex mutex_;
  std::shared_ptr<const Gazetteer> current_;
};

// Tokens are runs of letters, digits, '_', '-' and inner apostrophes,
// lower-cased.
std::string normalize_surface(std::string_view text);

// Longest match over normalized tokens (plural endings folded), Soundex
// matching of capitalized words against vessel names, temporal windows.
// Overlaps are resolved by longer span, then deeper tag, then leftmost.
// Result is ordered by start offset.
std::vector<EntityAnnotation> annotate(std::string_view text, const Gazetteer& gazetteer);

struct Probe {
  std::size_t annotation = 0;  // index into the annotation list
  std::string table;
  std::string sql;
};

// One existence probe per table for every annotation that is fuzzy,
// unresolved, ambiguous or lacks a database reference. Vessel types and
// temporal windows are never probed.
std::vector<Probe> verification_queries(const std::vector<EntityAnnotation>& annotations);

struct ProbeOutcome {
  Probe probe;
  std::optional<ResultSet> rows;  // nullopt when the probe failed
  std::string error;
};

// One bullet per annotation: surface, tag, resolution or "not found in
// database", and any probe matches.
std::string facts_prompt(const std::vector<EntityAnnotation>& annotations,
                         const std::vector<ProbeOutcome>& probes);

}  // namespace vtsql::ner
