#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <sstream>

#include "kgatt/graph_store.hpp"
#include "test_graphs.hpp"

namespace kgatt {
namespace {

using testing::make_graph;
using testing::random_graph;

TEST(Vocabulary, InternsInFirstSeenOrder) {
  Vocabulary v;
  EXPECT_EQ(v.intern_entity("B"), 0u);
  EXPECT_EQ(v.intern_entity("A"), 1u);
  EXPECT_EQ(v.intern_entity("B"), 0u);
  EXPECT_EQ(v.entity_name(1), "A");
  EXPECT_EQ(v.find_entity("A"), 1u);
  EXPECT_FALSE(v.find_entity("C").has_value());
  for (EntityId id = 0; id < v.num_entities(); ++id) EXPECT_EQ(*v.find_entity(v.entity_name(id)), id);
}

TEST(LoadTriples, ParsesChain) {
  std::istringstream in("A\tr\tB\nB\tr\tC\n");
  Vocabulary v;
  const auto frag = parse_triples(in, v);
  EXPECT_EQ(v.num_entities(), 3u);
  EXPECT_EQ(v.num_relations(), 1u);
  ASSERT_EQ(frag.triples.size(), 2u);
  EXPECT_EQ(frag.triples[1], (Triple{1, 0, 2}));
}

TEST(LoadTriples, EmptyInput) {
  std::istringstream in("");
  Vocabulary v;
  const auto frag = parse_triples(in, v);
  EXPECT_TRUE(frag.triples.empty());
  EXPECT_EQ(frag.report.triples, 0u);
}

TEST(LoadTriples, CountsDuplicates) {
  std::istringstream in("A\tr\tB\r\nA\tr\tB\n\nA\tr\tB\n");
  Vocabulary v;
  const auto frag = parse_triples(in, v);
  EXPECT_EQ(frag.triples.size(), 1u);
  EXPECT_EQ(frag.report.duplicates, 2u);
}

TEST(LoadTriples, MalformedLineReportsLineNumber) {
  std::istringstream in("A\tr\tB\nA r B\n");
  Vocabulary v;
  try {
    parse_triples(in, v);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadTriples, MissingFileThrows) {
  Vocabulary v;
  EXPECT_THROW(load_triples("/nonexistent/kgatt.tsv", v), Error);
}

TEST(EncoderIndex, InverseAugmentation) {
  const auto kg = make_graph({{"A", "r", "B"}}, true);
  const EntityId a = *kg.vocabulary().find_entity("A");
  const EntityId b = *kg.vocabulary().find_entity("B");
  ASSERT_EQ(kg.incoming(b).size(), 1u);
  const auto& fwd = kg.edge(kg.incoming(b)[0]);
  EXPECT_EQ(fwd.source(), a);
  EXPECT_EQ(fwd.encoder_relation, 0u);
  EXPECT_EQ(fwd.direction, Direction::forward);
  ASSERT_EQ(kg.incoming(a).size(), 1u);
  const auto& inv = kg.edge(kg.incoming(a)[0]);
  EXPECT_EQ(inv.source(), b);
  EXPECT_EQ(inv.encoder_relation, 1u);
  EXPECT_EQ(inv.direction, Direction::inverse);
  EXPECT_EQ(inv.mirror, fwd.id);
  EXPECT_EQ(fwd.mirror, inv.id);
  EXPECT_EQ(kg.num_encoder_relations(), 2u);
}

TEST(EncoderIndex, WithoutInverse) {
  const auto kg = make_graph({{"A", "r", "B"}}, false);
  EXPECT_EQ(kg.incoming(*kg.vocabulary().find_entity("A")).size(), 0u);
  EXPECT_EQ(kg.num_encoder_relations(), 1u);
}

TEST(EncoderIndex, ChainHasSingleIncomingAtEnd) {
  const auto kg = make_graph({{"A", "r", "B"}, {"B", "r", "C"}}, false);
  EXPECT_EQ(kg.incoming(*kg.vocabulary().find_entity("C")).size(), 1u);
}

TEST(EncoderIndex, DuplicateFactsCollapse) {
  KnowledgeGraph kg;
  auto& v = kg.vocabulary();
  const Triple t{v.intern_entity("A"), v.intern_relation("r"), v.intern_entity("B")};
  kg.set_facts({{t, kTargetEdge, "x"}, {t, kTargetEdge, "y"}});
  kg.build_index(true);
  EXPECT_EQ(kg.num_forward_edges(), 1u);
  EXPECT_EQ(kg.num_edges(), 2u);
  EXPECT_EQ(kg.facts()[0].provenance, "x");
}

TEST(EncoderIndex, IndexConsistencyOnRandomGraphs) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (bool inverse : {false, true}) {
      const auto kg = random_graph(30, 4, 120, seed, inverse);
      std::size_t total = 0;
      std::vector<int> seen(kg.num_edges(), 0);
      for (EntityId i = 0; i < kg.num_entities(); ++i) {
        EdgeId prev = 0;
        bool first = true;
        for (EdgeId e : kg.incoming(i)) {
          EXPECT_EQ(kg.edge(e).destination(), i);
          if (!first) EXPECT_LT(prev, e);
          prev = e;
          first = false;
          ++seen[e];
        }
        total += kg.incoming(i).size();
      }
      EXPECT_EQ(total, kg.num_edges());
      for (int s : seen) EXPECT_EQ(s, 1);
      EXPECT_EQ(kg.num_edges(), inverse ? 2 * kg.num_forward_edges() : kg.num_forward_edges());
      std::vector<EdgeId> ids(kg.num_edges());
      for (const auto& rec : kg.edges()) ids[rec.id] = rec.id;
      for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], i);
    }
  }
}

TEST(AdjacencyOnly, MarkAllEmptiesPool) {
  auto kg = make_graph({{"A", "r", "B"}, {"B", "r", "C"}});
  std::vector<EdgeId> all(kg.num_forward_edges());
  std::iota(all.begin(), all.end(), EdgeId{0});
  mark_adjacency_only(kg, all);
  EXPECT_TRUE(kg.positive_pool().empty());
  EXPECT_EQ(kg.num_edges(), 4u);
  for (const auto& rec : kg.edges()) EXPECT_TRUE(rec.flags.adjacency_only);
}

TEST(AdjacencyOnly, MarkNoneKeepsTrainPool) {
  const auto kg = random_graph(20, 2, 40, 3);
  EXPECT_EQ(kg.positive_pool().size(), kg.split(Split::train).size());
}

TEST(AdjacencyOnly, HalfMarkedKeepsFullAdjacency) {
  auto kg = random_graph(40, 3, 100, 9);
  std::vector<EdgeId> half;
  for (EdgeId e = 0; e < 50; ++e) half.push_back(e);
  mark_adjacency_only(kg, half);
  EXPECT_EQ(kg.positive_pool().size(), 50u);
  EXPECT_EQ(kg.num_edges(), 200u);
  for (const auto& rec : kg.edges()) {
    const EdgeId forward = rec.direction == Direction::forward ? rec.id : rec.mirror;
    EXPECT_EQ(rec.flags.adjacency_only, forward < 50);
    EXPECT_NE(rec.flags.adjacency_only, rec.flags.train_target);
  }
}

TEST(AdjacencyOnly, UnknownEdgeThrows) {
  auto kg = make_graph({{"A", "r", "B"}});
  const std::vector<EdgeId> bad{1};  // the inverse record, not a forward edge
  EXPECT_THROW(mark_adjacency_only(kg, bad), Error);
}

TEST(Snapshot, RoundTripPreservesIdsFlagsAndProvenance) {
  auto kg = random_graph(25, 3, 60, 11);
  kg.split(Split::valid) = {kg.split(Split::train)[0]};
  kg.split(Split::test) = {kg.split(Split::train)[1], kg.split(Split::train)[2]};
  auto facts = kg.facts();
  facts[3].provenance = "noise";
  facts[3].flags = kAdjacencyOnlyEdge;
  facts[4].provenance = "";
  kg.set_facts(facts);
  kg.build_index(true);

  std::stringstream buf;
  write_snapshot(buf, kg);
  const auto back = read_snapshot(buf);
  EXPECT_EQ(back.vocabulary(), kg.vocabulary());
  for (Split s : {Split::train, Split::valid, Split::test}) EXPECT_EQ(back.split(s), kg.split(s));
  EXPECT_EQ(back.facts(), kg.facts());
  ASSERT_TRUE(back.indexed());
  EXPECT_TRUE(back.has_inverse());
  ASSERT_EQ(back.num_edges(), kg.num_edges());
  for (EdgeId e = 0; e < kg.num_edges(); ++e) {
    EXPECT_EQ(back.edge(e).triple, kg.edge(e).triple);
    EXPECT_EQ(back.edge(e).flags, kg.edge(e).flags);
  }
  std::stringstream again;
  write_snapshot(again, back);
  EXPECT_EQ(again.str(), [&] {
    std::stringstream s;
    write_snapshot(s, kg);
    return s.str();
  }());
}

TEST(Snapshot, RejectsGarbage) {
  std::istringstream in("not a snapshot\n");
  EXPECT_THROW(read_snapshot(in), ParseError);
}

TEST(Dataset, LoadsSplitsIntoSharedVocabulary) {
  testing::TempDir dir;
  std::ofstream(dir.path() / "train.txt") << "A\tr\tB\nB\ts\tC\n";
  std::ofstream(dir.path() / "valid.txt") << "C\tr\tD\n";
  std::ofstream(dir.path() / "test.txt") << "A\ts\tD\n";
  std::vector<LoadReport> reports;
  const auto kg = load_dataset(dir.path(), &reports);
  EXPECT_EQ(kg.num_entities(), 4u);
  EXPECT_EQ(kg.num_relations(), 2u);
  EXPECT_EQ(kg.split(Split::valid).size(), 1u);
  EXPECT_EQ(kg.positive_pool().size(), 2u);
  EXPECT_EQ(reports.size(), 3u);
}

}  // namespace
}  // namespace kgatt
