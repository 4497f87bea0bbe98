#include "vtsql/ner/ner.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/sql/geo.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::ner {
namespace {

struct Token {
  std::size_t start, end;
  std::string norm;
  std::string raw;
};

bool word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!word_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size()) {
      const auto c = static_cast<unsigned char>(text[i]);
      if (word_char(c)) {
        ++i;
      } else if ((c == '-' || c == '\'') && i + 1 < text.size() &&
                 word_char(static_cast<unsigned char>(text[i + 1]))) {
        ++i;
      } else {
        break;
      }
    }
    Token t{start, i, to_lower(text.substr(start, i - start)), std::string(text.substr(start, i - start))};
    if (t.norm.size() > 2 && t.norm.ends_with("'s")) t.norm.resize(t.norm.size() - 2);
    out.push_back(std::move(t));
  }
  return out;
}

std::string singular(const std::string& w) {
  if (w.size() > 4 && w.ends_with("ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() >= 4 && w.back() == 's' && !w.ends_with("ss") && !w.ends_with("us")) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

std::size_t depth(const std::string& tag) {
  return static_cast<std::size_t>(std::count(tag.begin(), tag.end(), '/')) + 1;
}

std::string leaf(const std::string& tag) {
  const auto p = tag.rfind('/');
  return p == std::string::npos ? std::string() : tag.substr(p + 1);
}

std::string root(const std::string& tag) { return tag.substr(0, tag.find('/')); }

std::string region_tag(const std::string& region_code, ShapeKind kind) {
  const std::string code = to_upper(region_code);
  if (code == "PILOT_STATION" || code == "BERTH" || code == "BUOY" || code == "LIGHTHOUSE") {
    return "FACILITY/" + code;
  }
  if (code.empty()) return kind == ShapeKind::Point ? "FACILITY" : "REGION";
  return "REGION/" + code;
}

// Better reading first: database-backed, deeper tag, then lexical order.
bool better(const Candidate& a, const Candidate& b) {
  if (a.ref.has_value() != b.ref.has_value()) return a.ref.has_value();
  if (depth(a.tag_path) != depth(b.tag_path)) return depth(a.tag_path) > depth(b.tag_path);
  if (a.tag_path != b.tag_path) return a.tag_path < b.tag_path;
  const std::string ka = a.ref ? a.ref->table + a.ref->key : "";
  const std::string kb = b.ref ? b.ref->table + b.ref->key : "";
  if (ka != kb) return ka < kb;
  return a.canonical < b.canonical;
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a",     "an",    "the",   "list",  "show",   "give",  "find",  "what",   "where", "which",
      "who",   "how",   "is",    "are",   "was",    "were",  "me",    "you",    "could", "can",
      "please", "all",  "of",    "in",    "and",    "or",    "to",    "for",    "with",  "at",
      "on",    "by",    "near",  "from",  "any",    "i",     "mmsi",  "imo",    "eta",   "cpa",
      "tcpa",  "ais",   "sog",   "cog",   "vts",    "id",    "utc",   "gps",    "sql",   "kn",
      "nm",    "ok",    "now",   "today", "tomorrow", "would", "do",  "does",   "tell",  "get"};
  return words;
}

bool name_like(const Token& t) {
  if (t.raw.empty() || !std::isupper(static_cast<unsigned char>(t.raw[0]))) return false;
  if (stopwords().count(t.norm)) return false;
  return std::all_of(t.raw.begin(), t.raw.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '-' || c == '\'';
  });
}

bool all_caps(const std::string& s) {
  return std::none_of(s.begin(), s.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)); });
}

bool sentence_start(std::string_view text, const std::vector<Token>& tokens, std::size_t i) {
  if (i == 0) return true;
  for (std::size_t k = tokens[i - 1].end; k < tokens[i].start; ++k) {
    if (text[k] == '.' || text[k] == '?' || text[k] == '!' || text[k] == ':' || text[k] == '-' ||
        static_cast<unsigned char>(text[k]) >= 0x80) {
      return true;
    }
  }
  return false;
}

struct Match {
  std::size_t start, end;
  std::vector<Candidate> readings;  // best first
  Confidence confidence = Confidence::Exact;
  std::optional<int> minutes;
  std::string canonical;
};

EntityAnnotation to_annotation(std::string_view text, Match m) {
  EntityAnnotation a;
  a.start = m.start;
  a.end = m.end;
  a.surface = std::string(text.substr(m.start, m.end - m.start));
  a.confidence = m.confidence;
  a.minutes = m.minutes;
  if (!m.readings.empty()) {
    const Candidate& best = m.readings.front();
    a.tag_path = best.tag_path;
    a.resolution = best.ref;
    a.canonical = m.canonical.empty() ? best.canonical : m.canonical;
    a.alternatives.assign(m.readings.begin() + 1, m.readings.end());
  }
  return a;
}

struct TemporalHit {
  std::size_t start, end;
  int minutes;
};

std::vector<TemporalHit> temporal_windows(std::string_view text) {
  static const std::regex re(
      R"(\b(?:(?:within|in)\s+(?:the\s+)?next|within|next)\s+(half\s+an|an|a|one|two|three|\d+)\s*(minutes|minute|mins|min|hours|hour|hrs|hr|h)\b)",
      std::regex::icase);
  std::vector<TemporalHit> out;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string qty = to_lower(m[1].str());
    const std::string unit = to_lower(m[2].str());
    double n = 0;
    if (qty.rfind("half", 0) == 0) {
      n = 0.5;
    } else if (qty == "an" || qty == "a" || qty == "one") {
      n = 1;
    } else if (qty == "two") {
      n = 2;
    } else if (qty == "three") {
      n = 3;
    } else {
      n = std::stod(qty);
    }
    const bool hours = unit[0] == 'h';
    out.push_back({static_cast<std::size_t>(m.position(0)),
                   static_cast<std::size_t>(m.position(0) + m.length(0)),
                   static_cast<int>(hours ? n * 60 : n)});
  }
  return out;
}

}  // namespace

std::string_view confidence_name(Confidence c) {
  switch (c) {
    case Confidence::Exact: return "EXACT";
    case Confidence::Fuzzy: return "FUZZY";
    case Confidence::Unresolved: return "UNRESOLVED";
  }
  return "?";
}

nlohmann::json to_json(const EntityAnnotation& a) {
  using nlohmann::json;
  auto ref_json = [](const std::optional<EntityRef>& r) -> json {
    if (!r) return nullptr;
    return {{"table", r->table}, {"key", r->key}, {"name", r->name}};
  };
  json alts = json::array();
  for (const auto& c : a.alternatives) {
    alts.push_back({{"tag_path", c.tag_path}, {"resolution", ref_json(c.ref)}, {"canonical", c.canonical}});
  }
  return {{"span", {a.start, a.end}},
          {"surface", a.surface},
          {"tag_path", a.tag_path},
          {"resolution", ref_json(a.resolution)},
          {"confidence", std::string(confidence_name(a.confidence))},
          {"canonical", a.canonical},
          {"minutes", a.minutes ? json(*a.minutes) : json(nullptr)},
          {"alternatives", alts}};
}

std::vector<LexiconEntry> parse_lexicon(std::string_view text) {
  std::vector<LexiconEntry> out;
  std::size_t line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cols = split(t, '\t');
    if (cols.size() < 2 || trim(cols[0]).empty() || trim(cols[1]).empty()) {
      throw Error(Errc::Config, "lexicon line " + std::to_string(line_no) + ": expected term<TAB>tag_path");
    }
    LexiconEntry e{trim(cols[0]), trim(cols[1]), cols.size() > 2 ? trim(cols[2]) : ""};
    if (depth(e.tag_path) > 2) {
      throw Error(Errc::Config, "lexicon line " + std::to_string(line_no) + ": tag deeper than two levels");
    }
    if (e.canonical.empty()) e.canonical = e.term;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<LexiconEntry> load_lexicon(const std::string& path) { return parse_lexicon(read_file(path)); }

std::string normalize_surface(std::string_view text) {
  std::string out;
  for (const auto& t : tokenize(text)) {
    if (!out.empty()) out += ' ';
    out += t.norm;
  }
  return out;
}

void Gazetteer::add(const std::string& surface, Candidate c) {
  const std::string key = normalize_surface(surface);
  if (key.empty()) return;
  auto& list = entries_[key];
  if (std::find(list.begin(), list.end(), c) == list.end()) {
    list.push_back(std::move(c));
    std::sort(list.begin(), list.end(), better);
  }
  max_tokens_ = std::max(max_tokens_, static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1);
}

const std::vector<Candidate>* Gazetteer::lookup(std::string_view normalized) const {
  const auto it = entries_.find(std::string(normalized));
  return it == entries_.end() ? nullptr : &it->second;
}

Gazetteer Gazetteer::from_lexicon(const std::vector<LexiconEntry>& lexicon) {
  Gazetteer g;
  for (const auto& e : lexicon) g.add(e.term, Candidate{e.tag_path, std::nullopt, e.canonical});
  return g;
}

Gazetteer Gazetteer::build(const sql::Snapshot& snapshot, const std::vector<LexiconEntry>& lexicon) {
  Gazetteer g;
  g.version_ = snapshot.version();
  const auto shapes = snapshot.shapes();
  auto shape_ref = [&](const std::string& name) -> std::optional<EntityRef> {
    for (const auto& s : shapes) {
      if (iequals(s.name, name)) return EntityRef{"shp_data", std::to_string(s.id), s.name};
    }
    return std::nullopt;
  };
  for (const auto& e : lexicon) {
    Candidate c{e.tag_path, std::nullopt, e.canonical};
    const std::string r = root(e.tag_path);
    if (r == "REGION" || r == "FACILITY") c.ref = shape_ref(e.canonical);
    g.add(e.term, std::move(c));
  }
  for (const auto& s : shapes) {
    Candidate c{region_tag(s.region_code, s.obj_type()), EntityRef{"shp_data", std::to_string(s.id), s.name}, s.name};
    g.add(s.name, c);
    if (s.name.find('_') != std::string::npos) {
      std::string spaced = s.name;
      std::replace(spaced.begin(), spaced.end(), '_', ' ');
      g.add(spaced, c);
    }
  }
  for (const auto& v : snapshot.vessels()) {
    const std::string mmsi = std::to_string(v.mmsi);
    g.add(v.ship_name, Candidate{"VESSEL_NAME", EntityRef{"ship_ais", mmsi, v.ship_name}, v.ship_name});
    g.vessels_.push_back({mmsi, v.ship_name, sql::soundex(v.ship_name)});
  }
  return g;
}

std::shared_ptr<const Gazetteer> GazetteerCache::get(const sql::Snapshot& snapshot) {
  std::lock_guard lock(mutex_);
  if (!current_ || current_->version() != snapshot.version()) {
    current_ = std::make_shared<const Gazetteer>(Gazetteer::build(snapshot, lexicon_));
  }
  return current_;
}

std::vector<EntityAnnotation> annotate(std::string_view text, const Gazetteer& gazetteer) {
  const auto tokens = tokenize(text);
  std::vector<Match> candidates;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string key;
    const std::size_t max_len = std::min(gazetteer.max_tokens(), tokens.size() - i);
    for (std::size_t len = 1; len <= max_len; ++len) {
      if (len > 1) key += ' ';
      const std::string& last = tokens[i + len - 1].norm;
      const std::vector<Candidate>* hit = gazetteer.lookup(key + last);
      if (!hit) {
        const std::string sing = singular(last);
        if (sing != last) hit = gazetteer.lookup(key + sing);
      }
      key += last;
      if (hit) candidates.push_back({tokens[i].start, tokens[i + len - 1].end, *hit, Confidence::Exact, {}, {}});
    }
  }
  for (const auto& t : temporal_windows(text)) {
    Match m{t.start, t.end, {Candidate{"TEMPORAL/WINDOW", std::nullopt, std::to_string(t.minutes) + " minutes"}},
            Confidence::Exact, t.minutes, {}};
    candidates.push_back(std::move(m));
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const Match& a, const Match& b) {
    const std::size_t la = a.end - a.start, lb = b.end - b.start;
    if (la != lb) return la > lb;
    const std::size_t da = depth(a.readings.front().tag_path), db = depth(b.readings.front().tag_path);
    if (da != db) return da > db;
    return a.start < b.start;
  });
  std::vector<Match> chosen;
  auto overlaps = [&](std::size_t s, std::size_t e) {
    return std::any_of(chosen.begin(), chosen.end(), [&](const Match& m) { return s < m.end && m.start < e; });
  };
  for (auto& m : candidates) {
    if (!overlaps(m.start, m.end)) chosen.push_back(std::move(m));
  }

  // Capitalized words nobody claimed: try vessel names by Soundex, else
  // keep them as unresolved names so a probe can look for them.
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto usable = [&](std::size_t k) {
      if (!name_like(tokens[k]) || overlaps(tokens[k].start, tokens[k].end)) return false;
      return !(sentence_start(text, tokens, k) && !all_caps(tokens[k].raw));
    };
    if (!usable(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < tokens.size() && usable(j + 1) && !sentence_start(text, tokens, j + 1)) ++j;
    // longest window first, starting at i
    bool matched = false;
    for (std::size_t end = std::min(j, i + 3); end + 1 > i && !matched; --end) {
      std::string surface;
      for (std::size_t k = i; k <= end; ++k) surface += tokens[k].raw;
      const std::string code = sql::soundex(surface);
      std::vector<const Gazetteer::Vessel*> hits;
      for (const auto& v : gazetteer.vessels()) {
        if (v.soundex == code) hits.push_back(&v);
      }
      if (hits.empty()) {
        if (end == i) break;
        continue;
      }
      const std::string joined = std::string(text.substr(tokens[i].start, tokens[end].end - tokens[i].start));
      std::stable_sort(hits.begin(), hits.end(), [&](const auto* a, const auto* b) {
        return edit_distance(to_upper(joined), to_upper(a->name)) < edit_distance(to_upper(joined), to_upper(b->name));
      });
      Match m{tokens[i].start, tokens[end].end, {}, Confidence::Fuzzy, {}, {}};
      for (const auto* h : hits) m.readings.push_back({"VESSEL_NAME", EntityRef{"ship_ais", h->mmsi, h->name}, h->name});
      chosen.push_back(std::move(m));
      i = end + 1;
      matched = true;
    }
    if (matched) continue;
    Match m{tokens[i].start, tokens[j].end, {Candidate{"VESSEL_NAME", std::nullopt, ""}}, Confidence::Unresolved, {}, {}};
    m.canonical = std::string(text.substr(tokens[i].start, tokens[j].end - tokens[i].start));
    chosen.push_back(std::move(m));
    i = j + 1;
  }

  std::sort(chosen.begin(), chosen.end(), [](const Match& a, const Match& b) { return a.start < b.start; });
  std::vector<EntityAnnotation> out;
  for (auto& m : chosen) out.push_back(to_annotation(text, std::move(m)));
  return out;
}

std::vector<Probe> verification_queries(const std::vector<EntityAnnotation>& annotations) {
  std::vector<Probe> out;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& a = annotations[i];
    const std::string r = root(a.tag_path);
    if (r == "VESSEL_TYPE" || r == "TEMPORAL") continue;
    const bool settled = a.confidence == Confidence::Exact && a.resolution && !a.ambiguous();
    if (settled) continue;
    std::vector<std::string> tables;
    auto want = [&](const std::string& tag) {
      const std::string rt = root(tag);
      const std::string table = rt == "VESSEL_NAME" ? "ship_ais" : "shp_data";
      if (std::find(tables.begin(), tables.end(), table) == tables.end()) tables.push_back(table);
    };
    want(a.tag_path);
    for (const auto& c : a.alternatives) want(c.tag_path);
    if (a.confidence == Confidence::Unresolved) {
      want("VESSEL_NAME");
      want("REGION");
    }
    const std::string needle = a.confidence == Confidence::Unresolved || a.canonical.empty() ? a.surface : a.canonical;
    const std::string like = sql_quote("%" + to_lower(needle) + "%");
    for (const auto& table : tables) {
      Probe p{i, table, {}};
      if (table == "ship_ais") {
        p.sql = "SELECT mmsi, ship_name FROM ship_ais WHERE SOUNDS_LIKE(ship_name, " + sql_quote(a.surface) +
                ") OR ship_name LIKE " + like;
      } else {
        p.sql = "SELECT name, obj_type, region_code FROM shp_data WHERE name LIKE " + like;
        const std::string lf = leaf(a.tag_path);
        if (root(a.tag_path) != "VESSEL_NAME" && !lf.empty()) p.sql += " OR region_code = " + sql_quote(lf);
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string facts_prompt(const std::vector<EntityAnnotation>& annotations, const std::vector<ProbeOutcome>& probes) {
  std::string out;
  auto describe = [](const std::optional<EntityRef>& ref) {
    if (!ref) return std::string();
    const char* key = ref->table == "ship_ais" ? " mmsi " : " id ";
    return ref->table + key + ref->key + " (" + ref->name + ")";
  };
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& a = annotations[i];
    std::string line = "- \"" + a.surface + "\": " + a.tag_path;
    if (a.confidence != Confidence::Exact) line += " (" + to_lower(confidence_name(a.confidence)) + ")";
    bool found = a.resolution.has_value();
    if (a.minutes) {
      line += ", window of " + std::to_string(*a.minutes) + " minutes";
    } else if (a.resolution) {
      line += ", " + describe(a.resolution);
    } else if (root(a.tag_path) == "VESSEL_TYPE") {
      line += ", term " + a.canonical;
      found = true;
    }
    for (const auto& c : a.alternatives) {
      line += "; could also be " + c.tag_path;
      if (c.ref) line += " " + describe(c.ref);
    }
    for (const auto& p : probes) {
      if (p.probe.annotation != i) continue;
      if (!p.rows) {
        line += "; check of " + p.probe.table + " failed";
        continue;
      }
      if (p.rows->empty()) continue;
      found = true;
      std::vector<std::string> cells;
      for (std::size_t r = 0; r < p.rows->size() && r < 5; ++r) {
        std::vector<std::string> vals;
        for (const auto& v : p.rows->rows()[r]) vals.push_back(display_value(v));
        cells.push_back(join(vals, " / "));
      }
      line += "; " + p.probe.table + " has " + join(cells, ", ");
    }
    if (!found && !a.minutes) line += ", not found in database";
    out += line + "\n";
  }
  return out;
}

}  // namespace vtsql::ner
