#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "whatif/agents.hpp"

namespace whatif::agents {

namespace {

constexpr std::string_view kQueryMarker = "### QUESTION\nQUESTION: ";

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

}  // namespace

std::string query_of(const std::string& prompt) {
  const auto at = prompt.rfind(kQueryMarker);
  if (at == std::string::npos) return prompt;
  const auto start = at + kQueryMarker.size();
  const auto end = prompt.find('\n', start);
  return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

std::size_t attempt_of(const std::string& prompt) {
  std::size_t n = 0;
  for (auto at = prompt.find(kFeedbackMarker); at != std::string::npos;
       at = prompt.find(kFeedbackMarker, at + 1)) {
    ++n;
  }
  return n;
}

// --- ScriptedLlm -------------------------------------------------------------

ScriptedLlm::ScriptedLlm(std::vector<Rule> rules, std::string default_reply,
                         std::shared_ptr<LlmClient> fallback)
    : rules_(std::move(rules)),
      default_reply_(std::move(default_reply)),
      fallback_(std::move(fallback)) {
  for (const auto& r : rules_) {
    if (r.responses.empty()) {
      throw Error(ErrorKind::DataFormat, "mock rule '" + r.pattern + "' has no responses");
    }
    try {
      compiled_.emplace_back(r.pattern, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error(ErrorKind::DataFormat, "mock rule '" + r.pattern + "': " + e.what());
    }
  }
}

std::shared_ptr<ScriptedLlm> ScriptedLlm::from_json(std::string_view json_text,
                                                    std::shared_ptr<LlmClient> fallback) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::DataFormat, std::string("mock script: ") + e.what());
  }
  std::vector<Rule> rules;
  try {
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
      Rule rule{r.at("match").get<std::string>(), {}};
      const auto& resp = r.at("responses");
      if (resp.is_string()) {
        rule.responses.push_back(resp.get<std::string>());
      } else {
        rule.responses = resp.get<std::vector<std::string>>();
      }
      rules.push_back(std::move(rule));
    }
    return std::make_shared<ScriptedLlm>(std::move(rules), j.value("default", std::string()),
                                         std::move(fallback));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::DataFormat, std::string("mock script: ") + e.what());
  }
}

std::shared_ptr<ScriptedLlm> ScriptedLlm::load(const std::string& path,
                                               std::shared_ptr<LlmClient> fallback) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read mock script " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), std::move(fallback));
}

std::string ScriptedLlm::complete(const std::string& prompt, int max_tokens, double temperature) {
  const std::string query = query_of(prompt);
  const std::size_t attempt = attempt_of(prompt);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (std::regex_search(query, compiled_[i])) {
      const auto& r = rules_[i].responses;
      return r[std::min(attempt, r.size() - 1)];
    }
  }
  if (fallback_) return fallback_->complete(prompt, max_tokens, temperature);
  return default_reply_;
}

// --- TruthLlm ----------------------------------------------------------------

void TruthLlm::add(std::string question, std::string program) {
  answers_.insert_or_assign(std::move(question), std::move(program));
}

std::string TruthLlm::complete(const std::string& prompt, int, double) {
  const auto it = answers_.find(query_of(prompt));
  return it == answers_.end() ? std::string() : it->second;
}

// --- LiveLlm -----------------------------------------------------------------

LiveLlm::Config LiveLlm::config_from_env() {
  Config c;
  c.url = env_or("WHATIF_LLM_URL", "");
  c.key = env_or("WHATIF_LLM_KEY", "");
  c.model = env_or("WHATIF_LLM_MODEL", c.model);
  c.timeout_s = std::atoi(env_or("WHATIF_LLM_TIMEOUT", "60").c_str());
  if (c.timeout_s <= 0) c.timeout_s = 60;
  return c;
}

LiveLlm::LiveLlm(Config config, std::ostream* log) : config_(std::move(config)), log_(log) {}

std::string LiveLlm::complete(const std::string& prompt, int max_tokens, double temperature) {
  if (config_.url.empty()) throw Error(ErrorKind::LlmUnavailable, "WHATIF_LLM_URL is not set");
  // scheme://host[:port]/path
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::LlmUnavailable, "malformed LLM URL " + config_.url);
  }
  const auto path_start = config_.url.find('/', scheme_end + 3);
  const std::string origin = config_.url.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : config_.url.substr(path_start);

  nlohmann::json body = {
      {"model", config_.model},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
      {"max_tokens", max_tokens},
      {"temperature", temperature},
  };
  httplib::Client client(origin);
  client.set_connection_timeout(config_.timeout_s);
  client.set_read_timeout(config_.timeout_s);
  httplib::Headers headers;
  if (!config_.key.empty()) headers.emplace("Authorization", "Bearer " + config_.key);
  if (log_ != nullptr) *log_ << "--- prompt ---\n" << prompt << "\n";
  const auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::LlmUnavailable,
                "LLM request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::LlmUnavailable,
                "LLM endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    std::string text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (log_ != nullptr) *log_ << "--- completion ---\n" << text << "\n";
    return text;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::LlmUnavailable, std::string("unexpected LLM response: ") + e.what());
  }
}

}  // namespace whatif::agents
