// Serial vs OpenMP for the two data-parallel kernels: protocol evaluation and
// similarity scoring. With one core both variants should run at the same speed.

#include <benchmark/benchmark.h>

#include "whatif/benchmark.hpp"

using namespace whatif;

namespace {

bench::ExperimentConfig protocol_config() {
  bench::ExperimentConfig c;
  c.experiments = 2;
  c.questions_per_set = 5;
  c.pool_per_set = 5;
  c.shots = 3;
  c.mode = agents::SelectionMode::Nearest;
  return c;
}

void BM_evaluate(benchmark::State& state, bool parallel) {
  const auto cfg = protocol_config();
  auto llm = bench::truth_llm(cfg);
  const agents::HashedEmbedding emb;
  for (auto _ : state) {
    auto r = parallel ? bench::evaluate(cfg, *llm, emb) : bench::evaluate_serial(cfg, *llm, emb);
    benchmark::DoNotOptimize(r.accuracy);
  }
}
BENCHMARK_CAPTURE(BM_evaluate, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_evaluate, openmp, true)->Unit(benchmark::kMillisecond);

void BM_similarity(benchmark::State& state, bool parallel) {
  const agents::HashedEmbedding emb;
  std::vector<std::vector<float>> docs;
  for (int i = 0; i < state.range(0); ++i) {
    docs.push_back(emb.embed("What if roastery " + std::to_string(i % 7) + " ships to cafe " +
                             std::to_string(i % 13) + " only?"));
  }
  const auto query = emb.embed("What if roastery 3 only ships to cafe 5?");
  for (auto _ : state) {
    auto s = parallel ? agents::similarity_scores(query, docs)
                      : agents::similarity_scores_serial(query, docs);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_similarity, serial, false)->Arg(1000)->Arg(100000);
BENCHMARK_CAPTURE(BM_similarity, openmp, true)->Arg(1000)->Arg(100000);

void BM_solve(benchmark::State& state) {
  const Scenario sc = load_scenario("coffee");
  const Model m = sc.build();
  for (auto _ : state) {
    auto r = solve(m);
    benchmark::DoNotOptimize(r.objective);
  }
}
BENCHMARK(BM_solve)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
