#include "kgatt/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace kgatt {
namespace {

constexpr std::pair<ConditionKind, std::string_view> kConditionNames[] = {
    {ConditionKind::full, "full"},     {ConditionKind::half, "half"},   {ConditionKind::skip, "skip"},
    {ConditionKind::noised, "noised"}, {ConditionKind::sweep, "sweep"},
};

std::size_t floor_count(double fraction, std::size_t n) {
  // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

std::uint64_t pair_key(EntityId a, EntityId b) { return (std::uint64_t{a} << 32) | b; }

}  // namespace

std::string_view to_string(ConditionKind kind) {
  for (const auto& [k, name] : kConditionNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::string condition_names() {
  std::string out;
  for (const auto& [k, name] : kConditionNames) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

ConditionKind parse_condition(std::string_view name) {
  for (const auto& [k, n] : kConditionNames) {
    if (n == name) return k;
  }
  throw Error("unknown condition '" + std::string(name) + "'; valid conditions: " + condition_names());
}

std::vector<Triple> corrupt_triples(const KnowledgeGraph& kg, std::size_t volume, Rng& rng) {
  std::vector<Triple> out;
  if (volume == 0) return out;
  const auto& train = kg.split(Split::train);
  if (train.empty()) throw Error("cannot corrupt an empty training split");
  if (kg.num_entities() < 2) throw Error("corruption needs at least two entities");
  std::unordered_set<Triple, TripleHash> known;
  for (Split s : {Split::train, Split::valid, Split::test}) known.insert(kg.split(s).begin(), kg.split(s).end());
  std::unordered_set<Triple, TripleHash> produced;
  out.reserve(volume);
  const std::size_t max_attempts = std::max<std::size_t>(10000, 100 * volume);
  std::bernoulli_distribution corrupt_subject(0.5);
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < volume; ++attempt) {
    Triple t = train[uniform_index(rng, train.size())];
    EntityId& slot = corrupt_subject(rng) ? t.subject : t.object;
    slot = static_cast<EntityId>(uniform_index(rng, kg.num_entities()));
    if (known.contains(t) || !produced.insert(t).second) continue;
    out.push_back(t);
  }
  if (out.size() < volume) {
    throw Error("could only generate " + std::to_string(out.size()) + " of " + std::to_string(volume) +
                " distinct corrupted triples");
  }
  return out;
}

Condition build_condition(const KnowledgeGraph& kg, ConditionKind kind, double fraction, Rng& rng) {
  const auto& train = kg.split(Split::train);
  const std::size_t n = train.size();
  Condition c;
  c.kind = kind;
  c.fraction = kind == ConditionKind::sweep ? fraction : 0.0;

  auto add_facts = [&c](std::span<const Triple> triples, EdgeFlags flags, std::string_view tag) {
    for (const auto& t : triples) c.facts.push_back({t, flags, std::string(tag)});
  };

  if (kind == ConditionKind::full || kind == ConditionKind::sweep) {
    if (kind == ConditionKind::sweep && !(fraction >= 0.0)) throw Error("sweep fraction must be non-negative");
    add_facts(train, kTargetEdge, tags::clean);
    if (kind == ConditionKind::sweep) add_facts(corrupt_triples(kg, floor_count(fraction, n), rng), kTargetEdge, tags::noise);
    return c;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t kept = n / 2;
  std::vector<Triple> first, second;
  for (std::size_t i = 0; i < n; ++i) (i < kept ? first : second).push_back(train[order[i]]);

  add_facts(first, kTargetEdge, tags::clean);
  if (kind == ConditionKind::skip) add_facts(second, kAdjacencyOnlyEdge, tags::held_out);
  if (kind == ConditionKind::noised) {
    add_facts(corrupt_triples(kg, second.size(), rng), kAdjacencyOnlyEdge, tags::noise);
  }
  return c;
}

KnowledgeGraph apply_condition(const KnowledgeGraph& kg, const Condition& condition) {
  KnowledgeGraph out(kg.vocabulary());
  for (Split s : {Split::train, Split::valid, Split::test}) out.split(s) = kg.split(s);
  out.set_facts(condition.facts);
  return out;
}

DDGraph generate_dd(double p, double q, std::size_t target_n, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) throw Error("p and q must lie in [0, 1]");
  if (target_n < 2) throw Error("target node count must be at least 2");
  if (p == 0.0 && q == 0.0 && target_n > 2) throw Error("p = q = 0 can never attach a new node");

  DDGraph g;
  std::vector<std::vector<EntityId>> adj = {{1}, {0}};
  g.edges.emplace_back(0, 1);
  g.parent = {DDGraph::kNoParent, DDGraph::kNoParent};

  std::bernoulli_distribution link_parent(q);
  std::bernoulli_distribution link_neighbor(p);
  std::vector<EntityId> links;
  while (adj.size() < target_n) {
    const auto old = static_cast<EntityId>(uniform_index(rng, adj.size()));
    links.clear();
    if (link_parent(rng)) links.push_back(old);
    for (EntityId nb : adj[old]) {
      if (link_neighbor(rng)) links.push_back(nb);
    }
    if (links.empty()) continue;
    const auto fresh = static_cast<EntityId>(adj.size());
    std::sort(links.begin(), links.end());
    adj.push_back(links);
    for (EntityId v : links) {
      adj[v].push_back(fresh);  // fresh is the largest id, so lists stay sorted
      g.edges.emplace_back(v, fresh);
    }
    g.parent.push_back(old);
  }
  g.num_nodes = adj.size();
  return g;
}

DDSplit split_dd(const DDGraph& graph, double gold_frac, double add_frac, Rng& rng) {
  if (gold_frac < 0.0 || add_frac < 0.0 || gold_frac + add_frac > 1.0 + 1e-12) {
    throw Error("gold_frac and add_frac must be non-negative and sum to at most 1");
  }
  const std::size_t e = graph.edges.size();
  std::vector<std::size_t> order(e);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_gold = std::min(e, floor_count(gold_frac, e));
  const std::size_t n_add = std::min(e - n_gold, floor_count(add_frac, e));

  DDSplit split;
  for (std::size_t i = 0; i < n_gold; ++i) split.gold.push_back(graph.edges[order[i]]);
  for (std::size_t i = n_gold; i < n_gold + n_add; ++i) split.add.push_back(graph.edges[order[i]]);

  const std::size_t n = graph.num_nodes;
  const std::size_t pairs = n * (n - 1) / 2;
  if (pairs < e || pairs - e < n_add) throw Error("not enough non-edges to draw the noise set");
  std::unordered_set<std::uint64_t> taken;
  for (const auto& [a, b] : graph.edges) taken.insert(pair_key(a, b));
  const std::size_t max_attempts = std::max<std::size_t>(10000, 1000 * n_add);
  for (std::size_t attempt = 0; attempt < max_attempts && split.noise.size() < n_add; ++attempt) {
    auto a = static_cast<EntityId>(uniform_index(rng, n));
    auto b = static_cast<EntityId>(uniform_index(rng, n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!taken.insert(pair_key(a, b)).second) continue;
    split.noise.emplace_back(a, b);
  }
  if (split.noise.size() < n_add) throw Error("noise sampling did not converge");
  return split;
}

KnowledgeGraph dd_knowledge_graph(const DDGraph& graph, const DDSplit& split) {
  Vocabulary vocab;
  for (std::size_t i = 0; i < graph.num_nodes; ++i) vocab.intern_entity("n" + std::to_string(i));
  const RelationId rel = vocab.intern_relation(kInteractionRelation);
  KnowledgeGraph kg(std::move(vocab));

  std::vector<Fact> facts;
  auto add_both = [&](const std::vector<std::pair<EntityId, EntityId>>& edges, EdgeFlags flags,
                      std::string_view tag, std::vector<Triple>* split_out) {
    for (const auto& [a, b] : edges) {
      for (const Triple t : {Triple{a, rel, b}, Triple{b, rel, a}}) {
        facts.push_back({t, flags, std::string(tag)});
        if (split_out) split_out->push_back(t);
      }
    }
  };
  add_both(split.gold, kTargetEdge, tags::gold, &kg.split(Split::train));
  add_both(split.add, kAdjacencyOnlyEdge, tags::add, &kg.split(Split::test));
  add_both(split.noise, kAdjacencyOnlyEdge, tags::noise, nullptr);
  kg.set_facts(std::move(facts));
  kg.build_index(false);
  return kg;
}

double edge_vertex_ratio(const DDGraph& graph) {
  if (graph.num_nodes == 0) return 0.0;
  return static_cast<double>(graph.edges.size()) / static_cast<double>(graph.num_nodes);
}

}  // namespace kgatt
