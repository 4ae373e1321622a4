#pragma once

#include <vector>

#include "kgatt/common.hpp"
#include "kgatt/graph_store.hpp"

namespace kgatt {

/// Unnormalized per-edge attention scalars, one per edge record.
struct RawAttention {
  std::vector<double> values;

  friend bool operator==(const RawAttention&, const RawAttention&) = default;
};

/// Budget-normalized coefficients: for every node with a nonzero budget the
/// coefficients of its incoming edges sum to one.
struct NormalizedAttention {
  std::vector<double> coefficients;
  /// Sum of |raw| over each node's incoming edges.
  std::vector<double> budgets;
  /// Nodes with incoming edges whose raw values are all zero.
  std::vector<EntityId> zero_budget_nodes;
};

enum class OcclusionMode {
  renormalize,      ///< zero the raw scalar and redistribute the node's budget
  freeze_siblings,  ///< zero the coefficient and leave its siblings untouched
};

RawAttention init_attention(const KnowledgeGraph& kg);

NormalizedAttention normalize(std::span<const double> raw, const KnowledgeGraph& kg);
inline NormalizedAttention normalize(const RawAttention& raw, const KnowledgeGraph& kg) {
  return normalize(raw.values, kg);
}

/// Normalizes a single node's incoming coefficients into `coefficients`
/// (indexed by edge id) and returns the node's budget.
double normalize_node(std::span<const double> raw, const KnowledgeGraph& kg, EntityId node,
                      std::span<double> coefficients);

/// Fixed-attention coefficients 1/|in(i)|.
NormalizedAttention uniform_attention(const KnowledgeGraph& kg);

/// Inverted-dropout scale factors per edge: 0 with probability p, else 1/(1-p).
std::vector<double> sample_link_mask(std::size_t edges, double p, Rng& rng);

std::vector<double> apply_link_dropout(std::span<const double> coefficients, double p, Rng& rng);

void override_edge(RawAttention& raw, EdgeId edge, double value);

/// Coefficients of `node` after removing `edge`, written into `coefficients`.
void occlude_node(std::span<const double> raw, const KnowledgeGraph& kg, EdgeId edge, OcclusionMode mode,
                  std::span<double> coefficients);

}  // namespace kgatt
