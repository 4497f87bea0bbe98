#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vtsql/model/value.hpp"

namespace vtsql::knowledge {

enum class DocKind { Terminology, Rule, Notice, Procedure };
std::string_view doc_kind_name(DocKind k);

struct KnowledgeDoc {
  std::string doc_id;
  DocKind kind = DocKind::Terminology;
  std::string title;
  std::string body;
  std::optional<Timestamp> effective_from;
  std::optional<Timestamp> effective_to;

  // Undated documents are always in force.
  bool in_force(Timestamp at) const;
};

// "---\nkey: value\n...\n---\nbody". Keys: doc_id, kind, title,
// effective_from, effective_to. Throws CONFIG naming `source`.
KnowledgeDoc parse_doc(std::string_view text, const std::string& source);

// Validated, immutable document set: unique ids, NOTICE docs carry an
// effective window, windows are ordered.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<KnowledgeDoc> docs);

  // Every *.md file in the directory, in file-name order.
  static Corpus load_dir(const std::string& dir);

  const std::vector<KnowledgeDoc>& docs() const { return docs_; }
  const KnowledgeDoc* find(std::string_view doc_id) const;
  bool empty() const { return docs_.empty(); }

 private:
  std::vector<KnowledgeDoc> docs_;
};

// Lower-case runs of letters and digits.
std::vector<std::string> word_tokens(std::string_view text);

struct ScoredDoc {
  const KnowledgeDoc* doc = nullptr;
  double score = 0;
};

class Retriever {
 public:
  virtual ~Retriever() = default;
  // Top-k documents with positive score, best first. When `at` is given,
  // documents not in force at that instant are skipped.
  virtual std::vector<ScoredDoc> retrieve(std::string_view query, std::size_t k,
                                          std::optional<Timestamp> at = std::nullopt) const = 0;
};

// Okapi BM25 over title + body with plural endings folded; query function
// words are dropped. idf = ln(1 + (N - n + 0.5) / (n + 0.5)).
// Ties are broken by ascending doc_id.
class Bm25Index final : public Retriever {
 public:
  explicit Bm25Index(const Corpus& corpus, double k1 = 1.2, double b = 0.75);

  std::vector<ScoredDoc> retrieve(std::string_view query, std::size_t k,
                                  std::optional<Timestamp> at = std::nullopt) const override;
  double score(std::size_t doc, const std::vector<std::string>& query_terms) const;

 private:
  const Corpus& corpus_;
  double k1_, b_;
  double avg_len_ = 0;
  std::vector<std::map<std::string, std::size_t>> tf_;
  std::vector<std::size_t> len_;
  std::map<std::string, std::size_t> df_;
};

}  // namespace vtsql::knowledge
