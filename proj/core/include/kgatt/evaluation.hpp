#pragma once

#include <array>
#include <unordered_map>
#include <vector>

#include "kgatt/decoder.hpp"
#include "kgatt/encoder.hpp"
#include "kgatt/graph_store.hpp"

namespace kgatt {

enum class Side { subject, object };

std::string_view to_string(Side side);

/// Known-true triples (train, valid and test) indexed for filtered ranking.
class KnownTriples {
 public:
  KnownTriples() = default;
  explicit KnownTriples(const KnowledgeGraph& kg);

  void add(const Triple& t);
  bool contains(const Triple& t) const;

  /// Objects o with (s, r, o) known.
  std::span<const EntityId> objects(EntityId subject, RelationId relation) const;
  /// Subjects s with (s, r, o) known.
  std::span<const EntityId> subjects(RelationId relation, EntityId object) const;

 private:
  static std::uint64_t key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; }

  std::unordered_map<std::uint64_t, std::vector<EntityId>> by_subject_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> by_object_;
};

inline constexpr std::array<std::size_t, 3> kHitsAt = {1, 3, 10};

struct QueryRank {
  Triple triple;
  Side side = Side::object;
  double raw = 0.0;
  double filtered = 0.0;
};

struct EvalReport {
  double mrr_raw = 0.0;
  double mrr_filtered = 0.0;
  std::array<double, 3> hits_raw{};       ///< at kHitsAt
  std::array<double, 3> hits_filtered{};  ///< at kHitsAt
  std::vector<QueryRank> ranks;
};

/// Rank of the true answer among all N candidates on `side`:
/// 1 + #{strictly greater} + #{ties among others} / 2. With a filter, other
/// candidates forming a known-true triple are ignored.
double rank_query(const Matrix& embeddings, const Matrix& relations, DecoderKind kind, const Triple& triple,
                  Side side, const KnownTriples* filter);

/// Convenience form that encodes the graph (eval mode) first.
double rank_query(const ModelParameters& params, const KnowledgeGraph& kg, DecoderKind kind,
                  std::span<const double> coefficients, const Triple& triple, Side side, bool filtered);

EvalReport summarize_ranks(std::vector<QueryRank> ranks);

EvalReport evaluate_embeddings(const Matrix& embeddings, const Matrix& relations, DecoderKind kind,
                               std::span<const Triple> triples, const KnownTriples& known);

struct EvalOptions {
  /// Use at most this many triples from the split (0 = all).
  std::size_t max_triples = 0;
};

/// Evaluates both sides of every triple of `split` with eval-mode encoding.
EvalReport evaluate(const ModelParameters& params, const KnowledgeGraph& kg, Split split, DecoderKind kind,
                    std::span<const double> coefficients, const EvalOptions& options = {});

}  // namespace kgatt
