#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "kgatt/perturbation.hpp"
#include "test_graphs.hpp"

namespace kgatt {
namespace {

using testing::random_graph;

std::size_t count_targets(const Condition& c) {
  std::size_t n = 0;
  for (const auto& f : c.facts) n += f.flags.train_target ? 1 : 0;
  return n;
}

std::map<std::string, std::size_t> count_tags(const Condition& c) {
  std::map<std::string, std::size_t> out;
  for (const auto& f : c.facts) ++out[f.provenance];
  return out;
}

TEST(Corrupt, ZeroVolumeIsEmpty) {
  const auto kg = random_graph(20, 2, 40, 1);
  Rng rng(1);
  EXPECT_TRUE(corrupt_triples(kg, 0, rng).empty());
}

TEST(Corrupt, OutputsAreNovelAndDistinct) {
  auto kg = random_graph(30, 3, 80, 2);
  kg.split(Split::test) = {Triple{0, 0, 1}, Triple{2, 1, 3}};
  const std::set<Triple> known = [&] {
    std::set<Triple> s;
    for (Split sp : {Split::train, Split::valid, Split::test}) s.insert(kg.split(sp).begin(), kg.split(sp).end());
    return s;
  }();
  Rng rng(2);
  const auto noise = corrupt_triples(kg, 60, rng);
  ASSERT_EQ(noise.size(), 60u);
  std::set<Triple> seen;
  for (const auto& t : noise) {
    EXPECT_FALSE(known.count(t));
    EXPECT_TRUE(seen.insert(t).second);
  }
}

TEST(Corrupt, UnreachableVolumeThrows) {
  const auto kg = testing::make_graph({{"a", "r", "b"}});
  Rng rng(3);
  EXPECT_THROW(corrupt_triples(kg, 100, rng), Error);
}

TEST(Conditions, VolumesMatchRecipe) {
  const auto kg = random_graph(60, 4, 201, 4);
  const std::size_t n = kg.split(Split::train).size();
  Rng rng(4);

  const auto full = build_condition(kg, ConditionKind::full, 0.0, rng);
  EXPECT_EQ(full.facts.size(), n);
  EXPECT_EQ(count_targets(full), n);

  const auto half = build_condition(kg, ConditionKind::half, 0.0, rng);
  EXPECT_EQ(half.facts.size(), n / 2);
  EXPECT_EQ(count_targets(half), n / 2);

  const auto skip = build_condition(kg, ConditionKind::skip, 0.0, rng);
  EXPECT_EQ(skip.facts.size(), n);
  EXPECT_EQ(count_targets(skip), n / 2);
  EXPECT_EQ(count_tags(skip)[std::string(tags::held_out)], n - n / 2);

  const auto noised = build_condition(kg, ConditionKind::noised, 0.0, rng);
  EXPECT_EQ(count_targets(noised), n / 2);
  EXPECT_EQ(count_tags(noised)[std::string(tags::noise)], n - n / 2);
  for (const auto& f : noised.facts) EXPECT_EQ(f.provenance == tags::noise, f.flags.adjacency_only);

  const auto sweep = build_condition(kg, ConditionKind::sweep, 0.3, rng);
  const auto expected = static_cast<std::size_t>(std::floor(1.3 * static_cast<double>(n)));
  EXPECT_EQ(sweep.facts.size(), expected);
  EXPECT_EQ(count_targets(sweep), expected);
}

TEST(Conditions, SweepZeroEqualsFull) {
  const auto kg = random_graph(30, 2, 70, 5);
  Rng a(5), b(5);
  EXPECT_EQ(build_condition(kg, ConditionKind::sweep, 0.0, a).facts,
            build_condition(kg, ConditionKind::full, 0.0, b).facts);
}

TEST(Conditions, ReproducibleFromSeed) {
  const auto kg = random_graph(30, 2, 70, 6);
  for (auto kind : {ConditionKind::half, ConditionKind::skip, ConditionKind::noised, ConditionKind::sweep}) {
    Rng a(11), b(11);
    EXPECT_EQ(build_condition(kg, kind, 0.2, a).facts, build_condition(kg, kind, 0.2, b).facts);
  }
}

TEST(Conditions, TagsPartitionFacts) {
  const auto kg = random_graph(40, 3, 90, 7);
  Rng rng(7);
  const std::set<std::string_view> allowed{tags::clean, tags::held_out, tags::noise};
  for (auto kind : {ConditionKind::full, ConditionKind::half, ConditionKind::skip, ConditionKind::noised,
                    ConditionKind::sweep}) {
    const auto c = build_condition(kg, kind, 0.25, rng);
    std::size_t total = 0;
    for (const auto& [tag, count] : count_tags(c)) {
      EXPECT_TRUE(allowed.count(tag)) << tag;
      total += count;
    }
    EXPECT_EQ(total, c.facts.size());
  }
}

TEST(Conditions, ApplyIndexesAsAdjacency) {
  const auto kg = random_graph(40, 3, 90, 8);
  Rng rng(8);
  auto applied = apply_condition(kg, build_condition(kg, ConditionKind::skip, 0.0, rng));
  applied.build_index(true);
  EXPECT_EQ(applied.num_forward_edges(), 90u);
  EXPECT_EQ(applied.positive_pool().size(), 45u);
  EXPECT_EQ(applied.vocabulary(), kg.vocabulary());
}

TEST(Conditions, UnknownNameListsValidOnes) {
  try {
    parse_condition("quarter");
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    for (const char* name : {"full", "half", "skip", "noised", "sweep"}) EXPECT_NE(msg.find(name), std::string::npos);
  }
  EXPECT_EQ(parse_condition("noised"), ConditionKind::noised);
}

TEST(DuplicationDivergence, ForcedTriangle) {
  Rng rng(1);
  const auto g = generate_dd(1.0, 1.0, 3, rng);
  EXPECT_EQ(g.num_nodes, 3u);
  const std::set<std::pair<EntityId, EntityId>> edges(g.edges.begin(), g.edges.end());
  EXPECT_EQ(edges, (std::set<std::pair<EntityId, EntityId>>{{0, 1}, {0, 2}, {1, 2}}));
}

TEST(DuplicationDivergence, ParentOnlyWhenPIsZero) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto g = generate_dd(0.0, 1.0, 3, rng);
    ASSERT_EQ(g.edges.size(), 2u);
    const EntityId old = g.parent[2];
    EXPECT_LT(old, 2u);
    EXPECT_EQ(g.edges[1], (std::pair<EntityId, EntityId>{old, 2}));
  }
}

TEST(DuplicationDivergence, EdgesAreSimpleAndOrdered) {
  Rng rng(3);
  const auto g = generate_dd(0.5, 0.3, 200, rng);
  EXPECT_EQ(g.num_nodes, 200u);
  EXPECT_EQ(g.parent.size(), 200u);
  std::set<std::pair<EntityId, EntityId>> seen;
  std::vector<int> degree(g.num_nodes, 0);
  for (const auto& [a, b] : g.edges) {
    EXPECT_LT(a, b);
    EXPECT_LT(b, g.num_nodes);
    EXPECT_TRUE(seen.insert({a, b}).second);
    ++degree[a];
    ++degree[b];
  }
  for (int d : degree) EXPECT_GT(d, 0);
}

TEST(DuplicationDivergence, DegenerateParametersThrow) {
  Rng rng(1);
  EXPECT_THROW(generate_dd(0.0, 0.0, 5, rng), Error);
  EXPECT_THROW(generate_dd(1.5, 0.0, 5, rng), Error);
  EXPECT_EQ(generate_dd(0.0, 0.0, 2, rng).edges.size(), 1u);
}

TEST(DDSplit, GoldOnly) {
  Rng rng(2);
  const auto g = generate_dd(0.6, 0.2, 100, rng);
  const auto s = split_dd(g, 1.0, 0.0, rng);
  EXPECT_EQ(s.gold.size(), g.edges.size());
  EXPECT_TRUE(s.add.empty());
  EXPECT_TRUE(s.noise.empty());
}

TEST(DDSplit, CountsAndDisjointness) {
  Rng rng(3);
  const auto g = generate_dd(0.6, 0.2, 300, rng);
  const auto s = split_dd(g, 0.5, 0.25, rng);
  const auto e = static_cast<double>(g.edges.size());
  EXPECT_EQ(s.gold.size(), static_cast<std::size_t>(std::floor(0.5 * e)));
  EXPECT_EQ(s.add.size(), static_cast<std::size_t>(std::floor(0.25 * e)));
  EXPECT_EQ(s.noise.size(), s.add.size());
  const std::set<std::pair<EntityId, EntityId>> truth(g.edges.begin(), g.edges.end());
  std::set<std::pair<EntityId, EntityId>> noise;
  for (const auto& p : s.noise) {
    EXPECT_LT(p.first, p.second);
    EXPECT_FALSE(truth.count(p));
    EXPECT_TRUE(noise.insert(p).second);
  }
  std::set<std::pair<EntityId, EntityId>> parts(s.gold.begin(), s.gold.end());
  for (const auto& p : s.add) EXPECT_TRUE(parts.insert(p).second);
  for (const auto& p : parts) EXPECT_TRUE(truth.count(p));
}

TEST(DDSplit, InvalidFractionsThrow) {
  Rng rng(4);
  const auto g = generate_dd(0.6, 0.2, 50, rng);
  EXPECT_THROW(split_dd(g, 0.8, 0.3, rng), Error);
}

TEST(DDKnowledgeGraph, BothDirectionsWithFlags) {
  Rng rng(5);
  const auto g = generate_dd(0.6, 0.2, 80, rng);
  const auto s = split_dd(g, 0.5, 0.25, rng);
  const auto kg = dd_knowledge_graph(g, s);
  EXPECT_EQ(kg.num_entities(), 80u);
  EXPECT_EQ(kg.num_relations(), 1u);
  EXPECT_EQ(kg.num_encoder_relations(), 1u);
  EXPECT_EQ(kg.num_edges(), 2 * (s.gold.size() + s.add.size() + s.noise.size()));
  EXPECT_EQ(kg.split(Split::train).size(), 2 * s.gold.size());
  EXPECT_EQ(kg.split(Split::test).size(), 2 * s.add.size());
  for (const auto& rec : kg.edges()) {
    EXPECT_EQ(rec.flags.train_target, rec.provenance == tags::gold);
    EXPECT_TRUE(rec.provenance == tags::gold || rec.provenance == tags::add || rec.provenance == tags::noise);
  }
}

TEST(DuplicationDivergence, SeedsAreReproducible) {
  Rng a(42), b(42);
  const auto x = generate_dd(0.75, 0.0, 300, a);
  const auto y = generate_dd(0.75, 0.0, 300, b);
  EXPECT_EQ(x.edges, y.edges);
  EXPECT_EQ(x.parent, y.parent);
}

}  // namespace
}  // namespace kgatt
