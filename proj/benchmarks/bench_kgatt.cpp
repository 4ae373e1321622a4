#include <benchmark/benchmark.h>

#include <algorithm>
#include <map>

#include "kgatt/attention.hpp"
#include "kgatt/encoder.hpp"
#include "kgatt/evaluation.hpp"
#include "kgatt/perturbation.hpp"
#include "kgatt/training.hpp"

namespace {

using namespace kgatt;

/// DD world of `nodes` entities; gold edges are the training targets.
const KnowledgeGraph& world(std::size_t nodes) {
  static std::map<std::size_t, KnowledgeGraph> cache;
  auto it = cache.find(nodes);
  if (it == cache.end()) {
    Rng rng(7);
    const auto graph = generate_dd(0.75, 0.0, nodes, rng);
    const auto split = split_dd(graph, 0.5, 0.25, rng);
    it = cache.emplace(nodes, dd_knowledge_graph(graph, split)).first;
  }
  return it->second;
}

ModelParameters params_for(const KnowledgeGraph& kg, std::size_t dim) {
  Rng rng(3);
  auto p = init_parameters(kg, dim, true, rng);
  for (auto& v : p.attention.values) v = 0.5 + uniform_unit(rng);
  return p;
}

void BM_Normalize(benchmark::State& state) {
  const auto& kg = world(static_cast<std::size_t>(state.range(0)));
  const auto p = params_for(kg, 8);
  for (auto _ : state) benchmark::DoNotOptimize(normalize(p.attention, kg));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kg.num_edges()));
}
BENCHMARK(BM_Normalize)->Arg(1000)->Arg(5000);

void BM_EncodeAll(benchmark::State& state) {
  const auto& kg = world(1000);
  const auto p = params_for(kg, static_cast<std::size_t>(state.range(0)));
  const auto c = normalize(p.attention, kg).coefficients;
  for (auto _ : state) benchmark::DoNotOptimize(encode_all(p, kg, c));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kg.num_edges()));
}
BENCHMARK(BM_EncodeAll)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_ComputeGradients(benchmark::State& state) {
  const auto& kg = world(1000);
  TrainConfig config;
  config.dim = static_cast<std::size_t>(state.range(0));
  const auto p = params_for(kg, config.dim);
  const auto pool = kg.positive_pool();
  Rng rng(11);
  const auto n = std::min(config.batch_size, pool.size());
  const auto batch = make_batch(std::span(pool).first(n), config.negatives, kg.num_entities(), rng);
  const auto masks = sample_dropout_masks(p, kg, config.embedding_dropout, config.link_dropout, rng);
  for (auto _ : state) benchmark::DoNotOptimize(compute_gradients(p, kg, batch, config, masks));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch.triples.size()));
}
BENCHMARK(BM_ComputeGradients)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const auto& kg = world(1000);
  const auto p = params_for(kg, 50);
  const auto c = normalize(p.attention, kg).coefficients;
  const EvalOptions opts{static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(p, kg, Split::test, DecoderKind::distmult, c, opts));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * state.range(0)));
}
BENCHMARK(BM_Evaluate)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
