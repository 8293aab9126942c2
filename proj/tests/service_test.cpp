#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "support/coffee.hpp"
#include "whatif/service.hpp"

using namespace whatif;
using json = nlohmann::json;

namespace {

const std::string kExclusive =
    "Assume cafe cafe2 can exclusively buy coffee from roasting facility roastery1, and "
    "conversely, roasting facility roastery1 can only sell its coffee to cafe cafe2. How does "
    "that affect the outcome?";

// A live server on an ephemeral localhost port, torn down with the fixture.
struct Server {
  service::Service svc;
  httplib::Server http;
  std::thread thread;
  int port = 0;

  Server()
      : svc(std::make_shared<agents::ScriptedLlm>(
            std::vector<agents::ScriptedLlm::Rule>{
                {"exclusively", {testing_support::kExclusiveProgram}},
                {"doubled", {"SCALE light_coffee_needed_for_cafe[*] BY 2"}}},
            "")) {
    svc.mount(http);
    port = http.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { http.listen_after_bind(); });
    http.wait_until_ready();
  }
  ~Server() {
    http.stop();
    thread.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30);
    return c;
  }
};

json body(const httplib::Result& r) {
  REQUIRE(r);
  return r->body.empty() ? json() : json::parse(r->body);
}

std::string new_session(httplib::Client& c) {
  const auto r = c.Post("/sessions", R"({"scenario": "coffee"})", "application/json");
  REQUIRE(r);
  REQUIRE(r->status == 201);
  return body(r)["session"];
}

json post(httplib::Client& c, const std::string& path, const json& payload, int expect) {
  const auto r = c.Post(path, payload.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == expect);
  return body(r);
}

}  // namespace

TEST_CASE("health and session creation") {
  Server s;
  auto c = s.client();
  const auto h = c.Get("/health");
  REQUIRE(h);
  CHECK(h->status == 200);
  CHECK(body(h)["status"] == "ok");

  const auto r = c.Post("/sessions", R"({"scenario": "coffee"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 201);
  const json j = body(r);
  CHECK(j["objective"].get<double>() == 2470);
  CHECK(j["status"] == "optimal");
  CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
}

TEST_CASE("plan payload lists non-zero arcs and a consistent breakdown") {
  Server s;
  auto c = s.client();
  const std::string id = new_session(c);
  const json plan = body(c.Get("/sessions/" + id + "/plan"));
  CHECK(plan["objective"].get<double>() == 2470);
  CHECK(plan["nodes"].size() == 8);
  CHECK_FALSE(plan["arcs"].empty());
  double sum = 0;
  for (const auto& item : plan["breakdown"]) sum += item["value"].get<double>();
  CHECK(sum == doctest::Approx(plan["total"].get<double>()));
  CHECK(plan["total"].get<double>() == doctest::Approx(2470));
  bool labeled = false;
  for (const auto& a : plan["arcs"]) {
    double q = 0;
    for (const auto& f : a["flows"]) q += f["quantity"].get<double>();
    CHECK(q > 0);
    labeled = labeled || a["label"].get<std::string>().find(" L + ") != std::string::npos;
  }
  CHECK(labeled);
}

TEST_CASE("ask, commit, and the plan follows") {
  Server s;
  auto c = s.client();
  const std::string id = new_session(c);

  const json quiet = post(c, "/sessions/" + id + "/ask", {{"question", kExclusive}}, 200);
  CHECK(quiet["status"] == "answered");
  CHECK(quiet["whatif_objective"].get<double>() == 2570);
  CHECK(quiet["delta_abs"].get<double>() == doctest::Approx(100));
  CHECK(quiet["delta_pct"].get<double>() == doctest::Approx(4.05).epsilon(0.001));
  CHECK(quiet["pending"] == true);
  CHECK_FALSE(quiet.contains("program"));
  CHECK_FALSE(quiet.contains("thoughts"));
  CHECK(quiet["narrative"].get<std::string>().find("≈ 4%") != std::string::npos);

  const json loud =
      post(c, "/sessions/" + id + "/ask", {{"question", kExclusive}, {"show_thoughts", true}}, 200);
  CHECK(loud["program"].get<std::string>().find("FIX y_light[roastery1,* != cafe2] = 0") !=
        std::string::npos);
  REQUIRE(loud["thoughts"].size() == 1);
  CHECK(loud["thoughts"][0]["prompt"].get<std::string>().find("### QUESTION") != std::string::npos);

  const json committed = post(c, "/sessions/" + id + "/commit", json::object(), 200);
  CHECK(committed["objective"].get<double>() == 2570);
  const json plan = body(c.Get("/sessions/" + id + "/plan"));
  CHECK(plan["objective"].get<double>() == quiet["whatif_objective"].get<double>());
  CHECK(plan["pending"] == false);
  CHECK(plan["committed"].get<std::string>().find("roastery1") != std::string::npos);

  post(c, "/sessions/" + id + "/commit", json::object(), 409);
}

TEST_CASE("infeasible what-ifs cannot be committed") {
  Server s;
  auto c = s.client();
  const std::string id = new_session(c);
  const json r = post(c, "/sessions/" + id + "/ask", {{"question", "What if demand doubled?"}}, 200);
  CHECK(r["solve_status"] == "infeasible");
  CHECK(r["pending"] == false);
  post(c, "/sessions/" + id + "/commit", json::object(), 409);
}

TEST_CASE("denials come back as 422 with the approval message") {
  Server s;
  auto c = s.client();
  const std::string id = new_session(c);
  const json r =
      post(c, "/sessions/" + id + "/ask", {{"question", "Give me the phone of supplier1"}}, 422);
  CHECK(r["status"] == "denied");
  CHECK(r["error"]["kind"] == "SensitiveDataDenied");
  CHECK(r["narrative"].get<std::string>().find("Approval required!") != std::string::npos);
}

TEST_CASE("bad requests and unknown sessions") {
  Server s;
  auto c = s.client();
  CHECK(c.Get("/sessions/nope/plan")->status == 404);
  post(c, "/sessions/nope/ask", {{"question", "x"}}, 404);
  post(c, "/sessions/nope/commit", json::object(), 404);
  CHECK(c.Delete("/sessions/nope")->status == 404);

  post(c, "/sessions", {{"scenario", "atlantis"}}, 400);
  const auto bad = c.Post("/sessions", "{not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  const std::string id = new_session(c);
  post(c, "/sessions/" + id + "/ask", {{"show_thoughts", true}}, 400);

  CHECK(c.Delete("/sessions/" + id)->status == 204);
  CHECK(c.Get("/sessions/" + id + "/plan")->status == 404);
}

TEST_CASE("sessions are isolated, also under concurrent requests") {
  Server s;
  auto c = s.client();
  const std::string a = new_session(c);
  const std::string b = new_session(c);
  post(c, "/sessions/" + a + "/ask", {{"question", kExclusive}}, 200);
  post(c, "/sessions/" + a + "/commit", json::object(), 200);
  CHECK(body(c.Get("/sessions/" + b + "/plan"))["objective"].get<double>() == 2470);

  std::vector<std::thread> workers;
  std::vector<int> ok(6, 0);
  for (int i = 0; i < 6; ++i) {
    workers.emplace_back([&, i] {
      auto cl = s.client();
      const auto created = cl.Post("/sessions", "{}", "application/json");
      if (!created || created->status != 201) return;
      const std::string id = json::parse(created->body)["session"];
      for (int k = 0; k < 3; ++k) {
        const auto r = cl.Post("/sessions/" + id + "/ask", json{{"question", kExclusive}}.dump(),
                               "application/json");
        if (!r || r->status != 200) return;
        if (json::parse(r->body)["whatif_objective"].get<double>() != 2570) return;
      }
      ok[i] = 1;
    });
  }
  for (auto& w : workers) w.join();
  for (int v : ok) CHECK(v == 1);
  CHECK(body(c.Get("/health"))["sessions"].get<int>() == 8);
}
