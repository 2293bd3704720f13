#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "badgesim/evaluation.hpp"
#include "badgesim/game.hpp"
#include "badgesim/knapsack.hpp"
#include "badgesim/mechanism.hpp"
#include "badgesim/peer_fit.hpp"
#include "badgesim/rng.hpp"
#include "badgesim/sequence_mining.hpp"
#include "badgesim/synthetic.hpp"
#include "badgesim/value_model.hpp"

using namespace badgesim;

namespace {

const Dataset& synthetic(std::size_t users) {
  static std::map<std::size_t, std::unique_ptr<Dataset>> cache;
  auto& slot = cache[users];
  if (!slot) {
    SyntheticConfig c;
    c.n_users = users;
    slot = std::make_unique<Dataset>(generate_synthetic(c));
  }
  return *slot;
}

void BM_Knapsack(benchmark::State& state) {
  Rng rng(1);
  std::vector<KnapsackItem> items(static_cast<std::size_t>(state.range(0)));
  for (auto& it : items) it = {rng.uniform01(), 0.3 * rng.uniform01()};
  for (auto _ : state) benchmark::DoNotOptimize(solve_knapsack(items, 1.0));
}
BENCHMARK(BM_Knapsack)->Arg(15)->Arg(100);

void BM_Prefixspan(benchmark::State& state) {
  auto seqs = build_sequences(synthetic(static_cast<std::size_t>(state.range(0))));
  const std::size_t support = default_min_support(seqs.size());
  for (auto _ : state) benchmark::DoNotOptimize(prefixspan(seqs, support, 5));
}
BENCHMARK(BM_Prefixspan)->Arg(500)->Arg(4240)->Unit(benchmark::kMillisecond);

void BM_Auc(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> pos(static_cast<std::size_t>(state.range(0))), neg(pos.size());
  for (auto& x : pos) x = rng.uniform01();
  for (auto& x : neg) x = rng.uniform01();
  for (auto _ : state) benchmark::DoNotOptimize(auc(pos, neg));
}
BENCHMARK(BM_Auc)->Arg(1000)->Arg(100000);

void BM_PeerFit(benchmark::State& state) {
  auto pts = PeerCurvePoints::from_y({0.55, 0.12, 0.06, 0.04, 0.03, 0.02, 0.02, 0.02, 0.02, 0.02, 0.10});
  auto family = static_cast<PeerFamily>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_peer_function(pts, family));
}
BENCHMARK(BM_PeerFit)->DenseRange(0, 3);

void BM_Dynamics(benchmark::State& state) {
  const Dataset& d = synthetic(500);
  auto values = ValueModel::build(d, {});
  auto params = infer_params(d, {});
  BadgeGame game(values, params, Mechanism::uniform(d.badge_count(), 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(run_dynamics(game, {}));
}
BENCHMARK(BM_Dynamics)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
