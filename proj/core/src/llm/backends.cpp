#include <cstdlib>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/llm/llm.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::llm {
namespace {

using nlohmann::json;

std::string script_key(const ScriptedBackend::Script& s) {
  return s.representation + "/" + s.target + ": " + s.question;
}

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // no trailing slash
};

Url split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(Errc::Config, "backend base_url needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  Url u{url.substr(0, slash), slash == std::string::npos ? "" : url.substr(slash)};
  while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
  return u;
}

bool retriable(int status) { return status == 429 || status >= 500; }

}  // namespace

std::string fingerprint(std::string_view representation, std::string_view target, std::string_view question) {
  std::string data = to_upper(representation) + '\x1f' + to_upper(target) + '\x1f' + trim(question);
  return hex64(fnv1a64(data));
}

ScriptedBackend::ScriptedBackend(std::vector<Script> scripts) {
  for (auto& s : scripts) add(std::move(s));
}

void ScriptedBackend::add(Script s) {
  if (s.replies.empty()) throw Error(Errc::Config, "script without replies: " + s.question);
  const std::string fp = fingerprint(s.representation, s.target, s.question);
  if (index_.contains(fp)) throw Error(Errc::Config, "duplicate script: " + script_key(s));
  index_[fp] = scripts_.size();
  scripts_.push_back(std::move(s));
  served_.push_back(0);
}

ScriptedBackend ScriptedBackend::from_json(const json& j) {
  const json& list = j.is_object() ? j.at("scripts") : j;
  if (!list.is_array()) throw Error(Errc::Config, "scripts must be an array");
  ScriptedBackend b;
  for (const auto& e : list) {
    Script s;
    s.representation = e.value("representation", "*");
    s.target = e.value("target", "*");
    s.question = e.at("question").get<std::string>();
    if (e.contains("replies")) s.replies = e["replies"].get<std::vector<std::string>>();
    if (e.contains("reply")) s.replies.push_back(e["reply"].get<std::string>());
    b.add(std::move(s));
  }
  return b;
}

ScriptedBackend ScriptedBackend::load(const std::string& path) {
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::Config, "malformed script file " + path);
  return from_json(j);
}

const ScriptedBackend::Script* ScriptedBackend::match(const PromptBundle& b, std::string& cursor_key) const {
  const std::string rep(representation_name(b.representation));
  const std::string target(target_name(b.target));
  cursor_key = fingerprint(rep, target, b.question);
  for (const auto& [r, t] : {std::pair{rep, target}, {std::string("*"), target}, {rep, std::string("*")},
                             {std::string("*"), std::string("*")}}) {
    const auto it = index_.find(fingerprint(r, t, b.question));
    if (it != index_.end()) return &scripts_[it->second];
  }
  return nullptr;
}

std::string ScriptedBackend::complete(const PromptBundle& bundle) {
  std::lock_guard lock(*mu_);
  ++calls_;
  std::string cursor_key;
  const Script* s = match(bundle, cursor_key);
  if (!s) {
    throw Error(Errc::ScriptMiss, "no script for " + std::string(representation_name(bundle.representation)) + "/" +
                                      std::string(target_name(bundle.target)) + ": " + bundle.question);
  }
  const std::size_t at = cursors_[cursor_key]++;
  if (at >= s->replies.size()) throw Error(Errc::ScriptMiss, "script exhausted: " + script_key(*s));
  auto& served = served_[static_cast<std::size_t>(s - scripts_.data())];
  served = std::max(served, at + 1);
  return s->replies[at];
}

std::vector<std::string> ScriptedBackend::unused() const {
  std::lock_guard lock(*mu_);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scripts_.size(); ++i) {
    if (served_[i] < scripts_[i].replies.size()) out.push_back(script_key(scripts_[i]));
  }
  return out;
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(*mu_);
  return calls_;
}

void ScriptedBackend::reset() {
  std::lock_guard lock(*mu_);
  cursors_.clear();
  std::fill(served_.begin(), served_.end(), 0);
  calls_ = 0;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  split_url(config_.base_url);
  if (config_.max_retries < 0) throw Error(Errc::Config, "max_retries must be >= 0");
}

std::string HttpBackend::describe() const { return config_.model + " @ " + config_.base_url; }

std::string HttpBackend::complete(const PromptBundle& bundle) {
  const Url url = split_url(config_.base_url);
  httplib::Client cli(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (const char* token = std::getenv(config_.token_env.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  json messages = json::array();
  for (const auto& m : bundle.messages()) messages.push_back({{"role", m.role}, {"content", m.content}});
  const std::string body =
      json{{"model", config_.model}, {"messages", messages}, {"temperature", config_.temperature}}.dump();

  auto delay = config_.backoff;
  for (int attempt = 0;; ++attempt) {
    ++attempts_;
    const auto res = cli.Post(url.path + "/chat/completions", headers, body, "application/json");
    const bool last = attempt >= config_.max_retries;
    if (!res) {
      const auto err = res.error();
      if (last) {
        if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
          throw Error(Errc::Timeout, "chat endpoint timed out: " + httplib::to_string(err));
        }
        throw Error(Errc::HttpError, "chat endpoint unreachable: " + httplib::to_string(err));
      }
    } else if (res->status == 200) {
      const json j = json::parse(res->body, nullptr, false);
      if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
        throw Error(Errc::HttpError, "malformed chat completion response").with_status(res->status);
      }
      return j["choices"][0]["message"]["content"].get<std::string>();
    } else if (last || !retriable(res->status)) {
      throw Error(Errc::HttpError, "chat endpoint returned HTTP " + std::to_string(res->status))
          .with_status(res->status);
    }
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

std::unique_ptr<LlmBackend> make_backend(const json& d, const std::string& base_dir) {
  const std::string kind = d.value("kind", "scripted");
  if (kind == "scripted") {
    std::filesystem::path p = d.at("script").get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return std::make_unique<ScriptedBackend>(ScriptedBackend::load(p.string()));
  }
  if (kind == "openai") {
    HttpBackendConfig c;
    c.base_url = d.value("base_url", c.base_url);
    c.model = d.value("model", c.model);
    c.token_env = d.value("token_env", c.token_env);
    c.timeout = std::chrono::milliseconds(d.value("timeout_ms", c.timeout.count()));
    c.max_retries = d.value("max_retries", c.max_retries);
    c.backoff = std::chrono::milliseconds(d.value("backoff_ms", c.backoff.count()));
    c.temperature = d.value("temperature", c.temperature);
    return std::make_unique<HttpBackend>(c);
  }
  throw Error(Errc::Config, "unknown backend kind '" + kind + "'");
}

}  // namespace vtsql::llm
