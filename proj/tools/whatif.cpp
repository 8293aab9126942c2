// whatif: solve scenarios, run what-if programs, expand question macros,
// run the accuracy benchmark and serve the HTTP API.

#include <CLI11.hpp>
#include <httplib.h>

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "whatif/benchmark.hpp"
#include "whatif/service.hpp"

using namespace whatif;
using ojson = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
}

std::string data_dir_or_default(const std::string& dir) {
  return dir.empty() ? default_data_dir().string() : dir;
}

// Ground-truth mock over every macro expansion the service would use.
std::shared_ptr<agents::TruthLlm> scenario_truth(const std::vector<std::string>& ids,
                                                 const std::string& data_dir) {
  auto llm = std::make_shared<agents::TruthLlm>();
  for (const auto& id : ids) {
    const Scenario sc = load_scenario(id, data_dir);
    for (const auto& m : bench::load_macros(id, data_dir)) {
      for (const auto& q : bench::expand(m, sc, sc.baseline, 10, 1)) llm->add(q.text, q.program_text);
    }
  }
  return llm;
}

// live | mock:truth | mock:<script.json>. Scripts fall back to `truth` for
// questions they do not match.
std::shared_ptr<agents::LlmClient> make_llm(const std::string& spec,
                                            const std::function<std::shared_ptr<agents::LlmClient>()>& truth) {
  if (spec == "live") {
    return std::make_shared<agents::LiveLlm>(agents::LiveLlm::config_from_env(), nullptr);
  }
  if (spec == "mock:truth") return truth();
  if (spec.rfind("mock:", 0) == 0) return agents::ScriptedLlm::load(spec.substr(5), truth());
  throw Error(ErrorKind::DataFormat,
              "--llm must be live, mock:truth or mock:<script.json>, not '" + spec + "'");
}

int cmd_solve(const std::string& id, const std::string& data_dir, bool trace, bool json) {
  const Scenario sc = load_scenario(id, data_dir_or_default(data_dir));
  SolverConfig cfg;
  if (trace) cfg.trace = &std::cerr;
  const SolveResult r = solve(sc.build(), cfg);
  const double ms = std::chrono::duration<double, std::milli>(r.solve_time).count();
  if (json) {
    ojson out = {{"scenario", id}, {"status", to_string(r.status)}, {"nodes_explored", r.nodes_explored},
                 {"solve_time_ms", ms}};
    out["objective"] = r.objective ? ojson(*r.objective) : ojson(nullptr);
    if (r.optimal()) out["plan"] = service::to_json(plan_view(sc, *r.assignment));
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "status " << to_string(r.status) << "\n";
  if (r.objective) std::cout << "objective " << format_number(*r.objective) << "\n";
  std::cout << "nodes " << r.nodes_explored << "\n";
  if (r.optimal()) {
    for (const auto& a : plan_view(sc, *r.assignment).arcs) {
      std::cout << "  " << a.from << " -> " << a.to << ": " << service::flow_label(a) << "\n";
    }
  }
  return 0;
}

int cmd_whatif(const std::string& id, const std::string& program_file,
               const std::string& data_dir) {
  const Scenario sc = load_scenario(id, data_dir_or_default(data_dir));
  const dsl::EditProgram program = dsl::parse(read_file(program_file));
  const SolveResult after = solve(dsl::apply(program, sc).model);
  const SolveResult& before = sc.baseline;
  std::cout << "baseline " << (before.objective ? format_number(*before.objective) : "none")
            << " (" << to_string(before.status) << ")\n";
  std::cout << "what-if  " << (after.objective ? format_number(*after.objective) : "none") << " ("
            << to_string(after.status) << ")\n";
  if (before.objective && after.objective) {
    const double delta = *after.objective - *before.objective;
    std::cout << "delta    " << format_number(delta);
    if (*before.objective != 0.0) {
      char pct[32];
      std::snprintf(pct, sizeof pct, "%+.2f%%", 100.0 * delta / *before.objective);
      std::cout << " (" << pct << ")";
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_expand(const std::string& id, const std::string& macro_name, std::size_t count,
               std::uint64_t seed, const std::string& out, const std::string& data_dir) {
  const std::string dir = data_dir_or_default(data_dir);
  const Scenario sc = load_scenario(id, dir);
  ojson items = ojson::array();
  bool found = false;
  for (const auto& m : bench::load_macros(id, dir)) {
    if (m.name != macro_name && m.type != macro_name) continue;
    found = true;
    for (const auto& q : bench::expand(m, sc, sc.baseline, count, seed)) {
      items.push_back({{"id", q.id},
                       {"macro", q.macro},
                       {"type", q.type},
                       {"question", q.text},
                       {"program", q.program_text},
                       {"values", q.seed_trace}});
    }
  }
  if (!found) throw Error(ErrorKind::GeneratorError, "no macro or type '" + macro_name + "' in " + id);
  const std::string text = items.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
    std::cerr << items.size() << " questions written to " << out << "\n";
  }
  return 0;
}

int cmd_bench(const std::string& config_file, const std::string& llm_spec, const std::string& out,
              const std::string& data_dir, bool serial) {
  auto configs = bench::load_sweep(config_file);
  if (!data_dir.empty()) {
    for (auto& c : configs) c.data_dir = data_dir;
  }
  const agents::HashedEmbedding embedder;
  std::shared_ptr<agents::LlmClient> truth;
  auto llm = make_llm(llm_spec, [&]() -> std::shared_ptr<agents::LlmClient> {
    if (!truth) truth = bench::truth_llm(configs.front());
    return truth;
  });
  std::vector<bench::EvalReport> reports;
  for (const auto& c : configs) {
    reports.push_back(serial ? bench::evaluate_serial(c, *llm, embedder)
                             : bench::evaluate(c, *llm, embedder));
    const auto& r = reports.back();
    std::cout << "shots " << c.shots << " mode " << agents::to_string(c.mode) << " distribution "
              << agents::to_string(c.distribution) << " AC " << format_number(r.accuracy) << "\n";
  }
  bench::export_report(reports, bench::ReportFormat::Json, out + ".json");
  bench::export_report(reports, bench::ReportFormat::Csv, out + ".csv");
  std::cerr << "reports written to " << out << ".json and " << out << ".csv\n";
  return 0;
}

int cmd_ask(const std::string& id, const std::string& question, const std::string& llm_spec,
            const std::string& data_dir, bool thoughts) {
  const std::string dir = data_dir_or_default(data_dir);
  auto llm = make_llm(llm_spec, [&] { return scenario_truth({id}, dir); });
  const agents::Workspace ws(std::make_shared<const Scenario>(load_scenario(id, dir)));
  const auto report = agents::ask(question, ws, *llm);
  std::cout << service::to_json(report, thoughts).dump(2) << "\n";
  return report.status == agents::AnswerStatus::Failed ? 1 : 0;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& llm_spec, std::size_t shots,
              const std::string& static_dir, const std::string& data_dir) {
  const std::string dir = data_dir_or_default(data_dir);
  auto llm = make_llm(llm_spec, [&] { return scenario_truth(scenario_ids(), dir); });
  service::Options opts;
  opts.data_dir = dir;
  opts.shots = shots;
  service::Service svc(llm, opts);
  httplib::Server server;
  svc.mount(server, static_dir);
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cerr << "listening on http://" << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    throw Error(ErrorKind::IoError, "cannot listen on " + host + ":" + std::to_string(port));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"What-if analysis for supply-chain optimization models"};
  app.require_subcommand(1);
  std::string data_dir;
  app.add_option("--data-dir", data_dir, "Directory with scenarios/ and macros/")
      ->envname("WHATIF_DATA_DIR");

  std::string scenario;
  bool trace = false, json = false;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a scenario's baseline");
  solve_cmd->add_option("scenario", scenario)->required();
  solve_cmd->add_flag("--trace", trace, "Print one line per branch-and-bound node to stderr");
  solve_cmd->add_flag("--json", json, "JSON output with the plan graph");

  std::string program;
  auto* whatif_cmd = app.add_subcommand("whatif", "Apply an edit program and compare objectives");
  whatif_cmd->add_option("scenario", scenario)->required();
  whatif_cmd->add_option("--program", program, "Edit program file")->required()->check(CLI::ExistingFile);

  std::string macro, expand_out;
  std::size_t count = 10;
  std::uint64_t seed = 1;
  auto* expand_cmd = app.add_subcommand("expand", "Generate questions from a macro");
  expand_cmd->add_option("scenario", scenario)->required();
  expand_cmd->add_option("--macro", macro, "Macro name or type")->required();
  expand_cmd->add_option("--count", count, "Number of questions");
  expand_cmd->add_option("--seed", seed, "Generator seed");
  expand_cmd->add_option("--out", expand_out, "Output file (default stdout)");

  std::string config, out, llm_spec = "mock:truth";
  bool serial = false;
  auto* bench_cmd = app.add_subcommand("bench", "Run the accuracy benchmark");
  bench_cmd->add_option("--config", config, "Sweep file (JSON)")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--llm", llm_spec, "live | mock:truth | mock:<script.json>");
  bench_cmd->add_option("--out", out, "Report path prefix (.json and .csv are added)")
      ->default_val("report");
  bench_cmd->add_flag("--serial", serial, "Use the single-threaded evaluator");

  std::string question;
  bool thoughts = false;
  auto* ask_cmd = app.add_subcommand("ask", "Ask one what-if question");
  ask_cmd->add_option("scenario", scenario)->required();
  ask_cmd->add_option("question", question)->required();
  ask_cmd->add_option("--llm", llm_spec, "live | mock:truth | mock:<script.json>");
  ask_cmd->add_flag("--thoughts", thoughts, "Include the program and attempt log");

  std::string host = "127.0.0.1", static_dir;
  int port = 8080;
  std::size_t shots = 0;
  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP API");
  serve_cmd->add_option("--port", port, "TCP port");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--llm", llm_spec, "live | mock:truth | mock:<script.json>");
  serve_cmd->add_option("--shots", shots, "Few-shot examples per question");
  serve_cmd->add_option("--static", static_dir, "Directory of UI assets to serve at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return cmd_solve(scenario, data_dir, trace, json);
    if (*whatif_cmd) return cmd_whatif(scenario, program, data_dir);
    if (*expand_cmd) return cmd_expand(scenario, macro, count, seed, expand_out, data_dir);
    if (*bench_cmd) return cmd_bench(config, llm_spec, out, data_dir, serial);
    if (*ask_cmd) return cmd_ask(scenario, question, llm_spec, data_dir, thoughts);
    if (*serve_cmd) return cmd_serve(host, port, llm_spec, shots, static_dir, data_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
