#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kgatt/common.hpp"
#include "kgatt/graph_store.hpp"

namespace kgatt {

enum class ConditionKind { full, half, skip, noised, sweep };

std::string_view to_string(ConditionKind kind);
/// Throws Error listing the valid names when `name` is unknown.
ConditionKind parse_condition(std::string_view name);
std::string condition_names();

/// Provenance tags used by conditions.
namespace tags {
inline constexpr std::string_view clean = "clean";
inline constexpr std::string_view held_out = "held-out";
inline constexpr std::string_view noise = "noise";
inline constexpr std::string_view gold = "gold";
inline constexpr std::string_view add = "add";
}  // namespace tags

/// An experimental condition: the adjacency facts (with target flags and
/// provenance) to train and message-pass over.
struct Condition {
  ConditionKind kind = ConditionKind::full;
  double fraction = 0.0;
  std::vector<Fact> facts;
};

/// `volume` corrupted training triples (subject or object replaced by a
/// uniform entity), none of which is a known train/valid/test triple and
/// none repeated.
std::vector<Triple> corrupt_triples(const KnowledgeGraph& kg, std::size_t volume, Rng& rng);

/// full:   all train triples as targets
/// half:   a uniform floor(|train|/2) subset as targets, the rest dropped
/// skip:   half's targets plus the other half adjacency-only
/// noised: half's targets plus an equal volume of noise, adjacency-only
/// sweep:  all train targets plus floor(fraction*|train|) noise as targets
Condition build_condition(const KnowledgeGraph& kg, ConditionKind kind, double fraction, Rng& rng);

/// Copy of `kg` (splits and vocabulary) whose facts are the condition's.
KnowledgeGraph apply_condition(const KnowledgeGraph& kg, const Condition& condition);

/// Undirected graph grown by duplication-divergence steps.
struct DDGraph {
  std::size_t num_nodes = 0;
  /// Undirected edges with first < second, in creation order.
  std::vector<std::pair<EntityId, EntityId>> edges;
  /// Node each node was duplicated from; the two seed nodes map to kNoParent.
  std::vector<EntityId> parent;

  static constexpr EntityId kNoParent = static_cast<EntityId>(-1);
};

/// Grows a two-node connected seed to `target_n` nodes. Each step picks a
/// uniform existing node, links the copy to it with probability q and to each
/// of its neighbours with probability p. A copy left without any link is
/// discarded and the step repeated.
DDGraph generate_dd(double p, double q, std::size_t target_n, Rng& rng);

struct DDSplit {
  std::vector<std::pair<EntityId, EntityId>> gold;
  std::vector<std::pair<EntityId, EntityId>> add;
  std::vector<std::pair<EntityId, EntityId>> noise;
};

/// Gold and Add partition a uniform shuffle of the true edges
/// (floor(gold_frac*|E|) and floor(add_frac*|E|)); Noise holds |Add| uniform
/// node pairs absent from the true graph.
DDSplit split_dd(const DDGraph& graph, double gold_frac, double add_frac, Rng& rng);

inline constexpr std::string_view kInteractionRelation = "interacts";

/// Knowledge graph over nodes "n<i>" with one relation. Every undirected edge
/// becomes two facts (one per direction): Gold as targets, Add and Noise
/// adjacency-only. Gold fills the train split, Add the test split. Indexed
/// without inverse records since both directions are already facts.
KnowledgeGraph dd_knowledge_graph(const DDGraph& graph, const DDSplit& split);

/// Edge/vertex ratio of a DD graph.
double edge_vertex_ratio(const DDGraph& graph);

}  // namespace kgatt
