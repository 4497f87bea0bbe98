#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vtsql/model/schema.hpp"

namespace vtsql::llm {

enum class Representation { Basic, Code, Markdown, Alpaca, Text };

std::string_view representation_name(Representation r);
// Case-insensitive; throws CONFIG for an unknown name.
Representation parse_representation(std::string_view name);
const std::vector<Representation>& all_representations();

// Schema block of a prompt. Byte-stable per (registry, representation).
std::string render_schema(const SchemaRegistry& schema, Representation r);

// Language the model is asked to answer in.
enum class Target { Sair, Sql };
std::string_view target_name(Target t);

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct PromptBundle {
  Representation representation = Representation::Basic;
  Target target = Target::Sair;
  std::string question;
  std::string schema_block;
  std::vector<std::string> facts;      // one line per entity annotation
  std::vector<std::string> knowledge;  // retrieved snippets
  std::vector<std::string> rules;      // rule fragments, SAIR text
  std::string tools;                   // tool listing, empty when none offered
  std::string system;
  std::string user;
  // Follow-up turns after the first user message: model replies, tool
  // results and rethink feedback, in order.
  std::vector<ChatMessage> turns;

  std::vector<ChatMessage> messages() const;
  nlohmann::json to_json() const;
};

// Fills schema_block, system and user from the other fields.
void render_prompt(PromptBundle& bundle, const SchemaRegistry& schema = SchemaRegistry::vessel_traffic());

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const PromptBundle& bundle) = 0;
  virtual std::string describe() const = 0;
};

// Stable key of a request; only the representation, target and question
// take part so scripts survive changes to the surrounding prompt text.
std::string fingerprint(std::string_view representation, std::string_view target, std::string_view question);

// Canned replies keyed by fingerprint. Each key holds a queue served in
// order, one reply per complete() call. A "*" representation or target
// matches any value; each concrete request keeps its own cursor into a
// wildcard queue.
class ScriptedBackend final : public LlmBackend {
 public:
  struct Script {
    std::string representation = "*";
    std::string target = "*";
    std::string question;
    std::vector<std::string> replies;
  };

  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<Script> scripts);
  // {"scripts": [{"representation"?, "target"?, "question", "replies": [...]}]}
  // or a bare array; "reply" is accepted for a single-reply queue.
  static ScriptedBackend from_json(const nlohmann::json& j);
  static ScriptedBackend load(const std::string& path);

  void add(Script s);
  // SCRIPT_MISS when no script matches or its queue is exhausted.
  std::string complete(const PromptBundle& bundle) override;
  std::string describe() const override { return "scripted"; }

  // Scripts with replies that were never served.
  std::vector<std::string> unused() const;
  std::size_t calls() const;
  void reset();

 private:
  const Script* match(const PromptBundle& b, std::string& cursor_key) const;

  std::vector<Script> scripts_;
  std::map<std::string, std::size_t> index_;  // fingerprint -> script
  std::map<std::string, std::size_t> cursors_;
  std::vector<std::size_t> served_;            // max replies served per script
  std::size_t calls_ = 0;
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
};

struct HttpBackendConfig {
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string model = "gpt-4o";
  std::string token_env = "VTSQL_LLM_TOKEN";
  std::chrono::milliseconds timeout{60000};
  int max_retries = 3;
  std::chrono::milliseconds backoff{500};  // doubled after each failed attempt
  double temperature = 0.0;
};

// OpenAI-compatible chat completions. Retries on transport failures, 429
// and 5xx; other statuses fail fast with HTTP_ERROR.
class HttpBackend final : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  std::string complete(const PromptBundle& bundle) override;
  std::string describe() const override;
  int attempts() const { return attempts_; }

 private:
  HttpBackendConfig config_;
  int attempts_ = 0;
};

// {"kind": "scripted", "script": path} or {"kind": "openai", "base_url",
// "model", "token_env", "timeout_ms", "max_retries", "backoff_ms"}.
// Relative script paths resolve against base_dir.
std::unique_ptr<LlmBackend> make_backend(const nlohmann::json& descriptor, const std::string& base_dir = ".");

}  // namespace vtsql::llm
