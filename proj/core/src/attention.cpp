#include "kgatt/attention.hpp"

#include <cmath>
#include <string>

namespace kgatt {

RawAttention init_attention(const KnowledgeGraph& kg) {
  if (!kg.indexed()) throw Error("attention requires an indexed graph");
  return RawAttention{std::vector<double>(kg.num_edges(), 1.0)};
}

double normalize_node(std::span<const double> raw, const KnowledgeGraph& kg, EntityId node,
                      std::span<double> coefficients) {
  const auto in = kg.incoming(node);
  double budget = 0.0;
  for (EdgeId e : in) budget += std::abs(raw[e]);
  if (budget == 0.0) {
    for (EdgeId e : in) coefficients[e] = 0.0;
  } else {
    for (EdgeId e : in) coefficients[e] = std::abs(raw[e]) / budget;
  }
  return budget;
}

NormalizedAttention normalize(std::span<const double> raw, const KnowledgeGraph& kg) {
  if (raw.size() != kg.num_edges()) throw Error("attention size does not match edge count");
  for (double v : raw) {
    if (!std::isfinite(v)) throw NumericError("non-finite raw attention value");
  }
  NormalizedAttention out;
  out.coefficients.assign(kg.num_edges(), 0.0);
  out.budgets.assign(kg.num_entities(), 0.0);
  parallel_for(kg.num_entities(), [&](std::size_t i) {
    out.budgets[i] = normalize_node(raw, kg, static_cast<EntityId>(i), out.coefficients);
  });
  for (std::size_t i = 0; i < kg.num_entities(); ++i) {
    if (out.budgets[i] == 0.0 && kg.in_degree(static_cast<EntityId>(i)) > 0) {
      out.zero_budget_nodes.push_back(static_cast<EntityId>(i));
    }
  }
  return out;
}

NormalizedAttention uniform_attention(const KnowledgeGraph& kg) {
  return normalize(init_attention(kg), kg);
}

std::vector<double> sample_link_mask(std::size_t edges, double p, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw Error("dropout probability must lie in [0, 1)");
  std::vector<double> mask(edges, 1.0);
  if (p == 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - p);
  std::bernoulli_distribution drop(p);
  for (auto& m : mask) m = drop(rng) ? 0.0 : keep_scale;
  return mask;
}

std::vector<double> apply_link_dropout(std::span<const double> coefficients, double p, Rng& rng) {
  auto mask = sample_link_mask(coefficients.size(), p, rng);
  for (std::size_t e = 0; e < mask.size(); ++e) mask[e] *= coefficients[e];
  return mask;
}

void override_edge(RawAttention& raw, EdgeId edge, double value) {
  if (edge >= raw.values.size()) throw Error("unknown edge id " + std::to_string(edge));
  raw.values[edge] = value;
}

void occlude_node(std::span<const double> raw, const KnowledgeGraph& kg, EdgeId edge, OcclusionMode mode,
                  std::span<double> coefficients) {
  const EntityId node = kg.edge(edge).destination();
  if (mode == OcclusionMode::freeze_siblings) {
    normalize_node(raw, kg, node, coefficients);
    coefficients[edge] = 0.0;
    return;
  }
  // Only the occluded entry differs from `raw`; a scratch copy of the node's
  // incoming values keeps the summation order identical to normalize().
  const auto in = kg.incoming(node);
  double budget = 0.0;
  for (EdgeId e : in) budget += e == edge ? 0.0 : std::abs(raw[e]);
  for (EdgeId e : in) {
    const double v = e == edge ? 0.0 : std::abs(raw[e]);
    coefficients[e] = budget == 0.0 ? 0.0 : v / budget;
  }
}

}  // namespace kgatt
