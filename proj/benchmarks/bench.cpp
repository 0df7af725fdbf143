#include <benchmark/benchmark.h>

#include "scenecode/codecs.hpp"
#include "scenecode/hungarian.hpp"
#include "scenecode/metrics.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/rng.hpp"
#include "scenecode/scenegen.hpp"

using namespace scenecode;

namespace {

Scene tier5() {
  GenConfig g;
  g.tier = 5;
  g.seed = 3;
  return generate_scene(g);
}

void BM_Serialize(benchmark::State& state) {
  const auto lang = kAllLanguages[static_cast<std::size_t>(state.range(0))];
  const Scene s = tier5();
  for (auto _ : state) benchmark::DoNotOptimize(serialize(lang, s));
  state.SetLabel(std::string(to_string(lang)));
}
BENCHMARK(BM_Serialize)->DenseRange(0, 5);

void BM_Parse(benchmark::State& state) {
  const auto lang = kAllLanguages[static_cast<std::size_t>(state.range(0))];
  const std::string text = serialize(lang, tier5());
  for (auto _ : state) benchmark::DoNotOptimize(parse(lang, text));
  state.SetLabel(std::string(to_string(lang)));
}
BENCHMARK(BM_Parse)->DenseRange(0, 5);

void BM_Hungarian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> cost(n * n);
  for (auto& c : cost) c = rng.uniform(0, 10);
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(cost, n, n));
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(4, 64);

void BM_ComponentScores(benchmark::State& state) {
  const Scene gt = tier5();
  Scene pred = gt;
  for (auto& o : pred.objects) o.position.x += 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(component_scores(pred, gt));
}
BENCHMARK(BM_ComponentScores);

void BM_JudgeResponse(benchmark::State& state) {
  const Scene s = tier5();
  GenConfig g;
  g.tier = 5;
  const auto items = generate_qa(s, camera_poses(s, g).front(), 0).items;
  const auto mode = InferenceMode::code_cot(SceneCodeLanguage::threejs);
  const std::string response = serialize(SceneCodeLanguage::threejs, s) + "\nFinal answer: ";
  for (auto _ : state) {
    for (const auto& q : items) benchmark::DoNotOptimize(judge_response(q, mode, response + q.gt_answer));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(items.size()));
}
BENCHMARK(BM_JudgeResponse);

}  // namespace

BENCHMARK_MAIN();
