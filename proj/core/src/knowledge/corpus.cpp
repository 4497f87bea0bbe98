#include "vtsql/knowledge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <set>

#include "vtsql/error.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::knowledge {
namespace {

[[noreturn]] void bad(const std::string& source, const std::string& what) {
  throw Error(Errc::Config, "corpus " + source + ": " + what);
}

// Function words only; domain words like "in" or "next" never decide a
// ranking on their own anyway.
bool is_stopword(std::string_view w) {
  static const std::set<std::string_view> words{
      "a",     "an",    "and",  "are",  "at",    "be",   "by",   "can", "could", "do",   "does",
      "for",   "from",  "have", "how",  "i",     "in",   "is",   "it",  "me",    "my",   "of",
      "on",    "or",    "our",  "show", "some",  "that", "the",  "their", "them", "there", "these",
      "this",  "those", "to",   "us",   "was",   "were", "what", "when", "where", "which", "who",
      "will",  "with",  "would", "you", "your",  "list", "all",  "any", "may",   "please"};
  return words.contains(w);
}

// Crude plural folding so "VLCCs" meets "VLCC".
std::vector<std::string> index_terms(std::string_view text) {
  auto toks = word_tokens(text);
  for (auto& t : toks) {
    if (t.size() > 3 && t.back() == 's' && t[t.size() - 2] != 's') t.pop_back();
  }
  return toks;
}

}  // namespace

std::string_view doc_kind_name(DocKind k) {
  switch (k) {
    case DocKind::Terminology: return "TERMINOLOGY";
    case DocKind::Rule: return "RULE";
    case DocKind::Notice: return "NOTICE";
    case DocKind::Procedure: return "PROCEDURE";
  }
  return "?";
}

bool KnowledgeDoc::in_force(Timestamp at) const {
  if (effective_from && at < *effective_from) return false;
  if (effective_to && *effective_to < at) return false;
  return true;
}

KnowledgeDoc parse_doc(std::string_view text, const std::string& source) {
  auto lines = split(text, '\n');
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  if (lines.empty() || trim(lines[0]) != "---") bad(source, "missing front matter");
  std::size_t i = 1;
  std::map<std::string, std::string> meta;
  for (; i < lines.size() && trim(lines[i]) != "---"; ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) bad(source, "malformed front matter line '" + line + "'");
    meta[to_lower(trim(line.substr(0, colon)))] = trim(line.substr(colon + 1));
  }
  if (i >= lines.size()) bad(source, "unterminated front matter");
  KnowledgeDoc d;
  d.doc_id = meta["doc_id"];
  d.title = meta["title"];
  if (d.doc_id.empty()) bad(source, "doc_id is required");
  const std::string kind = to_upper(meta["kind"]);
  if (kind == "TERMINOLOGY") d.kind = DocKind::Terminology;
  else if (kind == "RULE") d.kind = DocKind::Rule;
  else if (kind == "NOTICE") d.kind = DocKind::Notice;
  else if (kind == "PROCEDURE") d.kind = DocKind::Procedure;
  else bad(source, "unknown kind '" + meta["kind"] + "'");
  for (const char* key : {"effective_from", "effective_to"}) {
    const auto it = meta.find(key);
    if (it == meta.end() || it->second.empty()) continue;
    const auto ts = parse_timestamp(it->second);
    if (!ts) bad(source, std::string("malformed ") + key);
    (std::string_view(key) == "effective_from" ? d.effective_from : d.effective_to) = *ts;
  }
  std::vector<std::string> body(lines.begin() + static_cast<std::ptrdiff_t>(i) + 1, lines.end());
  d.body = trim(join(body, "\n"));
  return d;
}

Corpus::Corpus(std::vector<KnowledgeDoc> docs) : docs_(std::move(docs)) {
  std::set<std::string> ids;
  for (const auto& d : docs_) {
    if (!ids.insert(d.doc_id).second) bad(d.doc_id, "duplicate doc_id");
    if (d.kind == DocKind::Notice && (!d.effective_from || !d.effective_to)) {
      bad(d.doc_id, "NOTICE documents need effective_from and effective_to");
    }
    if (d.effective_from && d.effective_to && *d.effective_to < *d.effective_from) {
      bad(d.doc_id, "effective window ends before it starts");
    }
  }
}

Corpus Corpus::load_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(Errc::Io, "corpus directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".md") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<KnowledgeDoc> docs;
  for (const auto& f : files) docs.push_back(parse_doc(read_file(f.string()), f.filename().string()));
  return Corpus(std::move(docs));
}

const KnowledgeDoc* Corpus::find(std::string_view doc_id) const {
  for (const auto& d : docs_) {
    if (d.doc_id == doc_id) return &d;
  }
  return nullptr;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Bm25Index::Bm25Index(const Corpus& corpus, double k1, double b) : corpus_(corpus), k1_(k1), b_(b) {
  std::size_t total = 0;
  for (const auto& d : corpus_.docs()) {
    std::map<std::string, std::size_t> tf;
    const auto toks = index_terms(d.title + "\n" + d.body);
    for (const auto& t : toks) ++tf[t];
    for (const auto& [t, n] : tf) ++df_[t];
    len_.push_back(toks.size());
    total += toks.size();
    tf_.push_back(std::move(tf));
  }
  avg_len_ = tf_.empty() ? 0 : static_cast<double>(total) / static_cast<double>(tf_.size());
}

double Bm25Index::score(std::size_t doc, const std::vector<std::string>& query_terms) const {
  const double n_docs = static_cast<double>(tf_.size());
  double s = 0;
  for (const auto& q : query_terms) {
    const auto it = tf_[doc].find(q);
    if (it == tf_[doc].end()) continue;
    const double df = static_cast<double>(df_.at(q));
    const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    const double f = static_cast<double>(it->second);
    const double norm = avg_len_ > 0 ? static_cast<double>(len_[doc]) / avg_len_ : 1.0;
    s += idf * f * (k1_ + 1) / (f + k1_ * (1 - b_ + b_ * norm));
  }
  return s;
}

std::vector<ScoredDoc> Bm25Index::retrieve(std::string_view query, std::size_t k,
                                           std::optional<Timestamp> at) const {
  if (corpus_.empty()) throw Error(Errc::EmptyCorpus, "retrieval over an empty corpus");
  if (k == 0) throw Error(Errc::Config, "retrieve needs k >= 1");
  // repeated query words count once
  auto terms = word_tokens(query);
  std::erase_if(terms, [](const std::string& t) { return is_stopword(t); });
  terms = index_terms(join(terms, " "));
  std::erase_if(terms, [](const std::string& t) { return is_stopword(t); });
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  std::vector<ScoredDoc> hits;
  for (std::size_t i = 0; i < tf_.size(); ++i) {
    const KnowledgeDoc& d = corpus_.docs()[i];
    if (at && !d.in_force(*at)) continue;
    const double s = score(i, terms);
    if (s > 0) hits.push_back({&d, s});
  }
  std::sort(hits.begin(), hits.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc->doc_id < b.doc->doc_id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

}  // namespace vtsql::knowledge
