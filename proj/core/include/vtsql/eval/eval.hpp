#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vtsql/llm/llm.hpp"
#include "vtsql/model/result_set.hpp"
#include "vtsql/pipeline/pipeline.hpp"

namespace vtsql::eval {

// |gold ∩ pred| / |gold| over canonical rows; gold must be non-empty.
double base_score(const ResultSet& gold, const ResultSet& pred);
// |gold| / |pred|. GUARD_VIOLATION unless pred_count > gold_count > 0.
double penalty_factor(std::size_t gold_count, std::size_t pred_count);
// 0..100. A missing prediction (failed episode) scores 0. Empty gold
// scores 100 against an empty prediction and 0 otherwise.
double match_score(const ResultSet& gold, const std::optional<ResultSet>& pred);

enum class Style { Operational, Command, Formal };
std::string_view style_name(Style s);
Style parse_style(std::string_view name);  // CONFIG

struct TestItem {
  std::string id;
  Style style = Style::Operational;
  std::string question;
  std::string gold_sql;
};

// JSON Lines of {"id", "style", "question", "gold_sql"}; blank lines and
// lines starting with '#' are skipped. Ids must be unique.
std::vector<TestItem> parse_testset(std::string_view jsonl);
std::vector<TestItem> load_testset(const std::string& path);

struct ItemScore {
  std::string id;
  Style style = Style::Operational;
  llm::Representation representation = llm::Representation::Basic;
  double score = 0;
  bool failed = false;
  std::string failure;
  std::size_t gold_rows = 0;
  std::size_t pred_rows = 0;
  std::size_t overlap = 0;
  std::size_t iterations = 0;
  std::size_t llm_calls = 0;
  std::string sql;
};

struct ScoreReport {
  std::string label;  // backend name, first column of the text table
  std::vector<ItemScore> items;
  std::map<llm::Representation, std::map<Style, double>> cells;
  std::map<llm::Representation, double> per_representation;
  std::map<Style, double> per_style;
  double overall = 0;
  double elapsed_ms = 0;

  // Recomputes the aggregates from items.
  void aggregate();
  // Elapsed time goes under "timings" and is left out when not wanted.
  nlohmann::json to_json(bool include_timings = true) const;
  // One row per backend, one column per representation, then the average;
  // followed by a style breakdown.
  std::string to_table() const;
};

struct BenchmarkOptions {
  std::vector<llm::Representation> representations{llm::Representation::Basic};
  std::optional<Style> style;  // only items of this style
  pipeline::PipelineConfig config;
  std::string label = "scripted";
  std::size_t threads = 1;
  // Called after each item, e.g. to keep traces. Must be thread-safe when
  // threads > 1.
  std::function<void(const TestItem&, const ItemScore&, const pipeline::EpisodeTrace&)> on_item;
};

ScoreReport run_benchmark(const std::vector<TestItem>& items, const BenchmarkOptions& options,
                          const pipeline::Resources& resources);

}  // namespace vtsql::eval
