#include "whatif/service.hpp"

#include <httplib.h>

#include "whatif/benchmark.hpp"

namespace whatif::service {

using ojson = nlohmann::ordered_json;

struct Service::ScenarioEntry {
  std::shared_ptr<const Scenario> scenario;
  std::vector<agents::Example> pool;  // few-shot candidates, empty when shots = 0
};

struct Service::Session {
  std::mutex mutex;
  std::string id;
  std::shared_ptr<const ScenarioEntry> entry;
  agents::Workspace workspace;
  std::vector<std::pair<std::string, agents::AnswerReport>> history;
  std::optional<agents::AnswerReport> pending;

  Session(std::string id_, std::shared_ptr<const ScenarioEntry> e)
      : id(std::move(id_)), entry(std::move(e)), workspace(entry->scenario) {}
};

namespace {

Reply error_reply(int status, std::string_view kind, const std::string& message) {
  return {status, ojson{{"error", {{"kind", kind}, {"message", message}}}}};
}

Reply error_reply(const Error& e) {
  int status = 500;
  switch (e.kind()) {
    case ErrorKind::UnknownScenario:
    case ErrorKind::DataFormat: status = 400; break;
    case ErrorKind::SensitiveDataDenied: status = 422; break;
    default: break;
  }
  return error_reply(status, to_string(e.kind()), e.what());
}

Reply no_session(const std::string& id) {
  return error_reply(404, "NotFound", "no session '" + id + "'");
}

template <class T>
ojson optional_json(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

}  // namespace

std::string flow_label(const PlanArc& arc) {
  std::string out;
  for (const auto& f : arc.flows) {
    if (!out.empty()) out += " + ";
    out += format_number(f.quantity);
    if (!f.label.empty()) out += " " + f.label;
  }
  return out;
}

ojson to_json(const PlanGraph& plan) {
  ojson nodes = ojson::array();
  for (const auto& n : plan.nodes) nodes.push_back({{"id", n.id}, {"kind", n.kind}});
  ojson arcs = ojson::array();
  for (const auto& a : plan.arcs) {
    ojson flows = ojson::array();
    for (const auto& f : a.flows) flows.push_back({{"label", f.label}, {"quantity", f.quantity}});
    arcs.push_back({{"from", a.from},
                    {"to", a.to},
                    {"label", flow_label(a)},
                    {"cost", a.cost},
                    {"flows", std::move(flows)}});
  }
  ojson breakdown = ojson::array();
  for (const auto& c : plan.breakdown) breakdown.push_back({{"name", c.name}, {"value", c.value}});
  return {{"nodes", std::move(nodes)},
          {"arcs", std::move(arcs)},
          {"breakdown", std::move(breakdown)},
          {"total", plan.total}};
}

ojson to_json(const agents::AnswerReport& r, bool show_thoughts) {
  ojson out = {{"status", agents::to_string(r.status)}, {"question", r.question}};
  if (r.status == agents::AnswerStatus::Answered) out["solve_status"] = to_string(r.solve_status);
  out["baseline_objective"] = optional_json(r.baseline_objective);
  out["whatif_objective"] = optional_json(r.whatif_objective);
  out["delta_abs"] = optional_json(r.delta_abs);
  out["delta_pct"] = optional_json(r.delta_pct);
  ojson diff = ojson::array();
  for (const auto& c : r.plan_diff) {
    diff.push_back({{"from", c.from},
                    {"to", c.to},
                    {"label", c.label},
                    {"before", c.before},
                    {"after", c.after}});
  }
  out["plan_diff"] = std::move(diff);
  out["attempts"] = r.attempts;
  out["narrative"] = r.narrative;
  if (r.error_kind) {
    out["error"] = {{"kind", to_string(*r.error_kind)}, {"message", r.error}};
  }
  if (show_thoughts) {
    out["program"] = r.program_text;
    ojson log = ojson::array();
    for (std::size_t i = 0; i < r.log.size(); ++i) {
      const auto& a = r.log[i];
      log.push_back({{"attempt", i + 1},
                     {"prompt", a.prompt},
                     {"response", a.response},
                     {"program", a.program},
                     {"error", a.error}});
    }
    out["thoughts"] = std::move(log);
  }
  return out;
}

Service::Service(std::shared_ptr<agents::LlmClient> llm, Options options)
    : llm_(std::move(llm)), options_(std::move(options)) {
  if (options_.data_dir.empty()) options_.data_dir = default_data_dir().string();
}

Service::~Service() = default;

std::shared_ptr<Service::Session> Service::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<const Service::ScenarioEntry> Service::scenario(const std::string& id) {
  {
    std::shared_lock lock(mutex_);
    if (const auto it = scenarios_.find(id); it != scenarios_.end()) return it->second;
  }
  // Loaded outside the lock: solving a baseline can take a moment.
  auto entry = std::make_shared<ScenarioEntry>();
  entry->scenario = std::make_shared<const Scenario>(load_scenario(id, options_.data_dir));
  if (options_.shots > 0) {
    const Scenario& sc = *entry->scenario;
    for (const auto& m : bench::load_macros(sc.id, options_.data_dir)) {
      for (const auto& q : bench::expand(m, sc, sc.baseline, 10, 1)) {
        entry->pool.push_back({q.id, q.type, q.text, q.program_text});
      }
    }
  }
  std::unique_lock lock(mutex_);
  return scenarios_.emplace(id, std::move(entry)).first->second;
}

Reply Service::create_session(const nlohmann::json& request) {
  try {
    const std::string scenario_id = request.value("scenario", std::string("coffee"));
    auto entry = scenario(scenario_id);
    std::string id;
    {
      std::unique_lock lock(mutex_);
      id = "s" + std::to_string(next_id_++);
    }
    auto session = std::make_shared<Session>(id, std::move(entry));
    const SolveResult& base = session->workspace.baseline();
    ojson body = {{"session", id},
                  {"scenario", scenario_id},
                  {"status", to_string(base.status)},
                  {"objective", optional_json(base.objective)}};
    std::unique_lock lock(mutex_);
    sessions_.emplace(id, std::move(session));
    return {201, std::move(body)};
  } catch (const Error& e) {
    return error_reply(e);
  } catch (const nlohmann::json::exception& e) {
    return error_reply(400, "BadRequest", e.what());
  }
}

Reply Service::plan(const std::string& id) {
  const auto s = find(id);
  if (!s) return no_session(id);
  std::lock_guard lock(s->mutex);
  const auto& ws = s->workspace;
  const SolveResult& base = ws.baseline();
  ojson body = base.optimal() ? to_json(plan_view(ws.scenario(), ws.model(), *base.assignment))
                              : ojson{{"nodes", ojson::array()}, {"arcs", ojson::array()},
                                      {"breakdown", ojson::array()}, {"total", nullptr}};
  body["session"] = id;
  body["scenario"] = ws.scenario().id;
  body["status"] = to_string(base.status);
  body["objective"] = optional_json(base.objective);
  body["committed"] = dsl::render(ws.committed());
  body["pending"] = s->pending.has_value();
  return {200, std::move(body)};
}

Reply Service::ask(const std::string& id, const nlohmann::json& request) {
  const auto s = find(id);
  if (!s) return no_session(id);
  if (!request.contains("question") || !request["question"].is_string()) {
    return error_reply(400, "BadRequest", "'question' must be a string");
  }
  const std::string question = request["question"].get<std::string>();
  const bool thoughts = request.value("show_thoughts", false);

  std::lock_guard lock(s->mutex);
  try {
    agents::AskConfig cfg;
    cfg.char_budget = options_.char_budget;
    cfg.interpret = options_.interpret;
    if (options_.shots > 0) {
      static const agents::HashedEmbedding embedder;
      const agents::Example query{"", "", question, ""};
      const std::size_t k = std::min(options_.shots, s->entry->pool.size());
      cfg.examples = agents::select_examples(s->entry->pool, query, k,
                                             agents::SelectionMode::Nearest,
                                             agents::Distribution::Any, 0, embedder);
    }
    agents::AnswerReport report = agents::ask(question, s->workspace, *llm_, cfg);
    ojson body = to_json(report, thoughts);
    const bool committable =
        report.status == agents::AnswerStatus::Answered && report.whatif_objective.has_value();
    body["pending"] = committable;
    body["session"] = id;
    const int status = report.status == agents::AnswerStatus::Denied ? 422 : 200;
    s->pending.reset();
    if (committable) s->pending = report;
    s->history.emplace_back(question, std::move(report));
    return {status, std::move(body)};
  } catch (const Error& e) {
    return error_reply(e);
  }
}

Reply Service::commit(const std::string& id) {
  const auto s = find(id);
  if (!s) return no_session(id);
  std::lock_guard lock(s->mutex);
  if (!s->pending) return error_reply(409, "NothingPending", "no what-if is waiting to be committed");
  const agents::AnswerReport& r = *s->pending;
  s->workspace.commit(r.program, *r.model,
                      SolveResult{r.solve_status, r.whatif_objective, r.assignment});
  s->pending.reset();
  const SolveResult& base = s->workspace.baseline();
  return {200, ojson{{"session", id},
                     {"objective", optional_json(base.objective)},
                     {"committed", dsl::render(s->workspace.committed())}}};
}

Reply Service::remove(const std::string& id) {
  std::unique_lock lock(mutex_);
  if (sessions_.erase(id) == 0) return no_session(id);
  return {204, nullptr};
}

Reply Service::health() const {
  std::shared_lock lock(mutex_);
  return {200, ojson{{"status", "ok"},
                     {"sessions", sessions_.size()},
                     {"llm", llm_->live() ? "live" : "mock"}}};
}

void Service::mount(httplib::Server& server, const std::string& static_dir) {
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body.dump(), "application/json");
  };
  // Empty bodies count as {}; anything else must be a JSON object.
  auto body_of = [](const httplib::Request& req, httplib::Response& res,
                    nlohmann::json& out) -> bool {
    if (req.body.empty()) {
      out = nlohmann::json::object();
      return true;
    }
    out = nlohmann::json::parse(req.body, nullptr, false);
    if (out.is_discarded() || !out.is_object()) {
      res.status = 400;
      res.set_content(
          ojson{{"error", {{"kind", "BadRequest"}, {"message", "body must be a JSON object"}}}}
              .dump(),
          "application/json");
      return false;
    }
    return true;
  };

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.Get("/health", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, health());
  });
  server.Post("/sessions", [this, send, body_of](const httplib::Request& req,
                                                 httplib::Response& res) {
    nlohmann::json body;
    if (body_of(req, res, body)) send(res, create_session(body));
  });
  server.Get(R"(/sessions/([^/]+)/plan)",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, plan(req.matches[1]));
             });
  server.Post(R"(/sessions/([^/]+)/ask)",
              [this, send, body_of](const httplib::Request& req, httplib::Response& res) {
                nlohmann::json body;
                if (body_of(req, res, body)) send(res, ask(req.matches[1], body));
              });
  server.Post(R"(/sessions/([^/]+)/commit)",
              [this, send](const httplib::Request& req, httplib::Response& res) {
                send(res, commit(req.matches[1]));
              });
  server.Delete(R"(/sessions/([^/]+))",
                [this, send](const httplib::Request& req, httplib::Response& res) {
                  send(res, remove(req.matches[1]));
                });
  if (!static_dir.empty() && !server.set_mount_point("/", static_dir)) {
    throw Error(ErrorKind::IoError, "cannot serve static files from " + static_dir);
  }
}

}  // namespace whatif::service
