#pragma once

// In-memory chat sessions behind a JSON-over-HTTP API. Endpoints and payloads
// are documented in docs/api.md.

#include <json.hpp>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "whatif/agents.hpp"

namespace httplib {
class Server;
}

namespace whatif::service {

struct Options {
  std::string data_dir;  // empty = default_data_dir()
  // Examples per question, picked by similarity from the scenario's macro
  // expansions. 0 sends zero-shot prompts.
  std::size_t shots = 0;
  std::size_t char_budget = agents::kDefaultCharBudget;
  agents::InterpretMode interpret = agents::InterpretMode::Template;
};

struct Reply {
  int status = 200;
  nlohmann::ordered_json body;
};

// Thread-safe. Requests on different sessions run concurrently; requests on
// one session are serialized.
class Service {
 public:
  Service(std::shared_ptr<agents::LlmClient> llm, Options options = {});
  ~Service();

  Reply create_session(const nlohmann::json& request);
  Reply plan(const std::string& id);
  Reply ask(const std::string& id, const nlohmann::json& request);
  Reply commit(const std::string& id);
  Reply remove(const std::string& id);
  Reply health() const;

  // Registers every route on `server`; serves `static_dir` at / when given.
  void mount(httplib::Server& server, const std::string& static_dir = {});

 private:
  struct Session;
  struct ScenarioEntry;

  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<const ScenarioEntry> scenario(const std::string& id);

  std::shared_ptr<agents::LlmClient> llm_;
  Options options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<const ScenarioEntry>> scenarios_;
  std::uint64_t next_id_ = 1;
};

nlohmann::ordered_json to_json(const PlanGraph& plan);
nlohmann::ordered_json to_json(const agents::AnswerReport& report, bool show_thoughts);

// "30 L + 100 D" style label for one arc.
std::string flow_label(const PlanArc& arc);

}  // namespace whatif::service
