#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "upac/bandit_agent.hpp"
#include "upac/confidence.hpp"
#include "upac/eluder.hpp"
#include "upac/envs.hpp"
#include "upac/vtr_agent.hpp"

using namespace upac;

namespace {

// Inserts into one level with a refit per insert, then queries a width.
void BM_LevelInsertAndWidth(benchmark::State& state) {
  const auto cls = random_finite_class(static_cast<std::size_t>(state.range(0)), 8, 1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (auto _ : state) {
    LevelPartition p(cls.num_hypotheses(), RadiusSchedule::constant(5.0));
    for (std::size_t i = 0; i < 256; ++i) {
      const InputId x = static_cast<InputId>(i % 8);
      p.insert(1, i, x, cls.column(x), cls.evaluate(0, x) + noise(rng));
    }
    benchmark::DoNotOptimize(p.width(1, cls.column(3)));
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_LevelInsertAndWidth)->Arg(16)->Arg(121)->Arg(1024);

void BM_BanditRound(benchmark::State& state) {
  const auto cls = linear_sphere_class(2, 8, 11);
  BanditAgent agent(cls, {});
  BanditEnv env(cls, 40, 1.0, {}, 3);
  std::vector<InputId> actions(cls.num_inputs());
  std::iota(actions.begin(), actions.end(), InputId{0});
  for (auto _ : state) {
    const auto choice = agent.select_action(actions);
    benchmark::DoNotOptimize(agent.observe(choice.action, env.sample_reward(choice.action)));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BanditRound);

void BM_EluderExact(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto cls = random_finite_class(8, m, 5);
  std::vector<InputId> universe(m);
  std::iota(universe.begin(), universe.end(), InputId{0});
  for (auto _ : state) benchmark::DoNotOptimize(eluder_dimension_exact(cls, universe, 0.1));
}
BENCHMARK(BM_EluderExact)->DenseRange(4, 10, 2);

void BM_EluderGreedy(benchmark::State& state) {
  const auto cls = random_finite_class(64, 64, 5);
  std::vector<InputId> universe(64);
  std::iota(universe.begin(), universe.end(), InputId{0});
  for (auto _ : state) benchmark::DoNotOptimize(eluder_dimension_greedy(cls, universe, 0.1));
}
BENCHMARK(BM_EluderGreedy);

void BM_VtrEpisode(benchmark::State& state) {
  const auto fam = linear_mixture_family(3, 2, 2, 7, 4);
  VtrAgent agent(fam.candidates, fam.reward, 4, {});
  MixtureMDPEnv env(fam.candidates[2], fam.reward, 4, {}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(agent.run_episode(env, 2));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_VtrEpisode);

}  // namespace

BENCHMARK_MAIN();
