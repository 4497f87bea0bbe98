#include "vtsql/eval/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/sql/executor.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::eval {
namespace {

using nlohmann::json;

std::size_t overlap(const ResultSet& a, const ResultSet& b) {
  const auto& x = a.canonical_rows();
  const auto& y = b.canonical_rows();
  std::size_t n = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else ++n, ++i, ++j;
  }
  return n;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pad(std::string s, std::size_t w, bool right = false) {
  if (s.size() >= w) return s;
  const std::string fill(w - s.size(), ' ');
  return right ? fill + s : s + fill;
}

}  // namespace

double base_score(const ResultSet& gold, const ResultSet& pred) {
  if (gold.empty()) throw Error(Errc::GuardViolation, "base score needs a non-empty gold set");
  return static_cast<double>(overlap(gold, pred)) / static_cast<double>(gold.size());
}

double penalty_factor(std::size_t gold_count, std::size_t pred_count) {
  if (gold_count == 0 || pred_count <= gold_count) {
    throw Error(Errc::GuardViolation, "penalty factor needs |pred| > |gold| > 0, got " + std::to_string(pred_count) +
                                          " and " + std::to_string(gold_count));
  }
  const double g = static_cast<double>(gold_count);
  return 1.0 / (1.0 + (static_cast<double>(pred_count) - g) / g);
}

double match_score(const ResultSet& gold, const std::optional<ResultSet>& pred) {
  if (!pred) return 0;
  if (gold.empty()) return pred->empty() ? 100 : 0;
  const double b = base_score(gold, *pred);
  if (pred->size() > gold.size()) return 100 * b * penalty_factor(gold.size(), pred->size());
  return 100 * b;
}

std::string_view style_name(Style s) {
  switch (s) {
    case Style::Operational: return "OPERATIONAL";
    case Style::Command: return "COMMAND";
    case Style::Formal: return "FORMAL";
  }
  return "?";
}

Style parse_style(std::string_view name) {
  for (auto s : {Style::Operational, Style::Command, Style::Formal}) {
    if (iequals(name, style_name(s))) return s;
  }
  throw Error(Errc::Config, "unknown query style '" + std::string(name) + "'");
}

std::vector<TestItem> parse_testset(std::string_view jsonl) {
  std::vector<TestItem> out;
  std::size_t line_no = 0;
  for (const auto& raw : split(jsonl, '\n')) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const json j = json::parse(line, nullptr, false);
    const auto where = "test set line " + std::to_string(line_no);
    if (j.is_discarded() || !j.is_object()) throw Error(Errc::Config, where + ": not a JSON object");
    TestItem it;
    try {
      it.id = j.at("id").get<std::string>();
      it.style = parse_style(j.at("style").get<std::string>());
      it.question = j.at("question").get<std::string>();
      it.gold_sql = j.at("gold_sql").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(Errc::Config, where + ": " + e.what());
    }
    if (std::any_of(out.begin(), out.end(), [&](const TestItem& o) { return o.id == it.id; })) {
      throw Error(Errc::Config, where + ": duplicate id '" + it.id + "'");
    }
    out.push_back(std::move(it));
  }
  return out;
}

std::vector<TestItem> load_testset(const std::string& path) { return parse_testset(read_file(path)); }

void ScoreReport::aggregate() {
  std::map<llm::Representation, std::map<Style, std::vector<double>>> by_cell;
  std::map<llm::Representation, std::vector<double>> by_rep;
  std::map<Style, std::vector<double>> by_style;
  std::vector<double> all;
  for (const auto& s : items) {
    by_cell[s.representation][s.style].push_back(s.score);
    by_rep[s.representation].push_back(s.score);
    by_style[s.style].push_back(s.score);
    all.push_back(s.score);
  }
  cells.clear();
  per_representation.clear();
  per_style.clear();
  for (const auto& [r, m] : by_cell) {
    for (const auto& [st, v] : m) cells[r][st] = mean(v);
  }
  for (const auto& [r, v] : by_rep) per_representation[r] = mean(v);
  for (const auto& [st, v] : by_style) per_style[st] = mean(v);
  overall = mean(all);
}

json ScoreReport::to_json(bool include_timings) const {
  json items_json = json::array();
  json failures = json::array();
  for (const auto& s : items) {
    items_json.push_back({{"id", s.id},
                          {"style", std::string(style_name(s.style))},
                          {"representation", std::string(llm::representation_name(s.representation))},
                          {"score", s.score},
                          {"gold_rows", s.gold_rows},
                          {"pred_rows", s.pred_rows},
                          {"overlap", s.overlap},
                          {"iterations", s.iterations},
                          {"llm_calls", s.llm_calls},
                          {"sql", s.sql}});
    if (s.failed) {
      failures.push_back({{"id", s.id},
                          {"representation", std::string(llm::representation_name(s.representation))},
                          {"failure", s.failure}});
    }
  }
  json cells_json = json::object();
  for (const auto& [r, m] : cells) {
    json row = json::object();
    for (const auto& [st, v] : m) row[std::string(style_name(st))] = v;
    cells_json[std::string(llm::representation_name(r))] = row;
  }
  json reps = json::object();
  for (const auto& [r, v] : per_representation) reps[std::string(llm::representation_name(r))] = v;
  json styles = json::object();
  for (const auto& [st, v] : per_style) styles[std::string(style_name(st))] = v;
  json j{{"label", label},      {"overall", overall},   {"per_representation", reps},
         {"per_style", styles}, {"cells", cells_json},  {"items", items_json},
         {"failures", failures}};
  if (include_timings) j["timings"] = {{"elapsed_ms", elapsed_ms}};
  return j;
}

std::string ScoreReport::to_table() const {
  constexpr std::size_t w = 10;
  const std::size_t lw = std::max<std::size_t>(label.size(), 11) + 2;
  std::string out = pad("Backend", lw);
  for (const auto& [r, v] : per_representation) out += pad(std::string(llm::representation_name(r)), w, true);
  out += pad("Average", w, true) + "\n";
  out += pad(label, lw);
  for (const auto& [r, v] : per_representation) out += pad(fixed2(v), w, true);
  out += pad(fixed2(overall), w, true) + "\n\n";
  out += pad("Style", lw);
  for (const auto& [r, v] : per_representation) out += pad(std::string(llm::representation_name(r)), w, true);
  out += "\n";
  for (const auto& [st, sv] : per_style) {
    out += pad(std::string(style_name(st)), lw);
    for (const auto& [r, v] : per_representation) {
      const auto& row = cells.at(r);
      const auto it = row.find(st);
      out += pad(it == row.end() ? "-" : fixed2(it->second), w, true);
    }
    out += "\n";
  }
  return out;
}

ScoreReport run_benchmark(const std::vector<TestItem>& items, const BenchmarkOptions& options,
                          const pipeline::Resources& resources) {
  const auto started = std::chrono::steady_clock::now();
  struct Job {
    const TestItem* item;
    llm::Representation rep;
  };
  std::vector<Job> jobs;
  for (auto rep : options.representations) {
    for (const auto& it : items) {
      if (!options.style || *options.style == it.style) jobs.push_back({&it, rep});
    }
  }

  ScoreReport report;
  report.label = options.label;
  report.items.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      const Job& job = jobs[i];
      ItemScore& s = report.items[i];
      s.id = job.item->id;
      s.style = job.item->style;
      s.representation = job.rep;
      pipeline::PipelineConfig cfg = options.config;
      cfg.representation = job.rep;
      const pipeline::EpisodeTrace trace = pipeline::run_episode(job.item->question, cfg, resources,
                                                                 style_name(job.item->style));
      s.iterations = trace.iterations.size();
      s.llm_calls = trace.llm_calls;
      s.sql = trace.sql;
      try {
        if (!resources.snapshot) throw Error(Errc::Config, "no store snapshot");
        const ResultSet gold = sql::execute_sql(job.item->gold_sql, *resources.snapshot, {trace.now, std::nullopt});
        s.gold_rows = gold.size();
        if (trace.result) {
          s.pred_rows = trace.result->size();
          s.overlap = overlap(gold, *trace.result);
        } else {
          s.failed = true;
          s.failure = trace.failure;
        }
        s.score = match_score(gold, trace.result);
      } catch (const Error& e) {
        s.failed = true;
        s.failure = "gold: " + std::string(errc_name(e.code())) + ": " + e.what();
        s.score = 0;
      }
      if (options.on_item) options.on_item(*job.item, s, trace);
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(options.threads, jobs.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  report.aggregate();
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace vtsql::eval
