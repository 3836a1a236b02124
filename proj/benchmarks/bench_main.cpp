#include <benchmark/benchmark.h>

#include "seatplan/generator.hpp"
#include "seatplan/model.hpp"
#include "seatplan/rng.hpp"
#include "seatplan/scene.hpp"
#include "seatplan/scoring.hpp"
#include "seatplan/solvers.hpp"
#include "seatplan/world.hpp"

using namespace seatplan;

namespace {

const World& world() {
  static const World w = load_world(SEATPLAN_DATA_DIR "/world.json");
  return w;
}

Generated instance(int level) {
  return generate_instance(difficulty_level(level), world(), instance_seed(1, level, 0), {}, instance_id(level, 0));
}

// Level picked to land on each template: A, C, E.
constexpr int kLevels[] = {10, 38, 66};

}  // namespace

static void BM_Score(benchmark::State& state) {
  auto g = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(score_instance(g.instance, g.truth.assignment));
}
BENCHMARK(BM_Score)->Arg(kLevels[0])->Arg(kLevels[1])->Arg(kLevels[2]);

static void BM_ModelScore(benchmark::State& state) {
  auto g = instance(static_cast<int>(state.range(0)));
  auto m = SeatingModel::ground_truth(g.instance);
  const auto p = m.from_assignment(g.truth.assignment);
  for (auto _ : state) benchmark::DoNotOptimize(m.score(p));
}
BENCHMARK(BM_ModelScore)->Arg(kLevels[0])->Arg(kLevels[1])->Arg(kLevels[2]);

static void BM_Exact(benchmark::State& state) {
  auto g = instance(static_cast<int>(state.range(0)));
  auto m = SeatingModel::ground_truth(g.instance);
  for (auto _ : state) benchmark::DoNotOptimize(solve_exact(m, 2'000'000));
}
BENCHMARK(BM_Exact)->Arg(kLevels[0])->Arg(kLevels[1])->Unit(benchmark::kMillisecond);

static void BM_Anneal(benchmark::State& state) {
  auto g = instance(static_cast<int>(state.range(0)));
  auto m = SeatingModel::ground_truth(g.instance);
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(solve_local_search(m, {}, rng));
  }
}
BENCHMARK(BM_Anneal)->Arg(kLevels[0])->Arg(kLevels[1])->Arg(kLevels[2])->Unit(benchmark::kMillisecond);

static void BM_Generate(benchmark::State& state) {
  const auto level = difficulty_level(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_instance(level, world(), ++seed, {}, "bench"));
}
BENCHMARK(BM_Generate)->Arg(kLevels[0])->Arg(kLevels[1])->Arg(kLevels[2])->Unit(benchmark::kMillisecond);

static void BM_Observe(benchmark::State& state) {
  auto g = instance(kLevels[2]);
  const auto& s = g.instance.scene;
  const auto& vp = s.viewpoints.front().id;
  int h = 0;
  for (auto _ : state) benchmark::DoNotOptimize(viewpoint_observe(s, vp, h++ % kHeadingCount));
}
BENCHMARK(BM_Observe);

static void BM_Adjacency(benchmark::State& state) {
  auto g = instance(kLevels[2]);
  for (auto _ : state) benchmark::DoNotOptimize(seat_adjacency(g.instance.scene));
}
BENCHMARK(BM_Adjacency);

BENCHMARK_MAIN();
