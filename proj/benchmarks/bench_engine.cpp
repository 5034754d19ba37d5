#include <benchmark/benchmark.h>

#include "aba/pack_io.hpp"
#include "aba/simulator.hpp"

namespace {

const aba::ValidatedPack& demo() {
  static const aba::ValidatedPack pack = aba::ValidatedPack::validate(aba::load_pack(ABA_DEMO_PACK));
  return pack;
}

// One prompt plus one answer, alternating right and wrong every third trial.
void BM_PromptAnswer(benchmark::State& state) {
  aba::SessionConfig config;
  config.rng_seed = 1;
  aba::Session session(config, demo());
  aba::Timestamp now{0};
  std::size_t n = 0;
  for (auto _ : state) {
    const aba::Prompt prompt = session.next_prompt(now);
    now += std::chrono::seconds(5);
    const std::size_t choice = (++n % 3 == 0) ? (prompt.item.correct_index + 1) % prompt.item.choices.size()
                                              : prompt.item.correct_index;
    benchmark::DoNotOptimize(session.submit_answer(choice, now));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PromptAnswer);

void BM_ComputeMetrics(benchmark::State& state) {
  aba::SessionConfig config;
  config.rng_seed = 2;
  aba::Session session(config, demo());
  aba::Timestamp now{0};
  for (int i = 0; i < state.range(0); ++i) {
    const aba::Prompt prompt = session.next_prompt(now);
    now += std::chrono::seconds(10);
    session.submit_answer(i % 4 == 0 ? (prompt.item.correct_index + 1) % 2 : prompt.item.correct_index, now);
  }
  for (auto _ : state) benchmark::DoNotOptimize(aba::compute_metrics(session));
}
BENCHMARK(BM_ComputeMetrics)->Arg(100)->Arg(10000);

void BM_RunTrial(benchmark::State& state) {
  aba::sim::TrialPlan plan;
  plan.replications = static_cast<int>(state.range(0));
  plan.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(aba::sim::run_trial(plan, demo()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunTrial)->Args({200, 1})->Args({200, 4})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
