#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgatt/common.hpp"

namespace kgatt {

enum class Split { train, valid, test };
enum class Direction : std::uint8_t { forward, inverse };

std::string_view to_string(Split split);
std::string_view to_string(Direction direction);

/// Bijective name <-> dense id mapping for entities and relations.
/// Ids are assigned in first-seen order.
class Vocabulary {
 public:
  EntityId intern_entity(std::string_view name);
  RelationId intern_relation(std::string_view name);

  std::optional<EntityId> find_entity(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;

  const std::string& entity_name(EntityId id) const { return entities_.at(id); }
  const std::string& relation_name(RelationId id) const { return relations_.at(id); }

  std::size_t num_entities() const noexcept { return entities_.size(); }
  std::size_t num_relations() const noexcept { return relations_.size(); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.entities_ == b.entities_ && a.relations_ == b.relations_;
  }

 private:
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::unordered_map<std::string, RelationId> relation_ids_;
};

struct EdgeFlags {
  bool train_target = true;
  bool adjacency_only = false;

  friend bool operator==(const EdgeFlags&, const EdgeFlags&) = default;
};

inline constexpr EdgeFlags kTargetEdge{true, false};
inline constexpr EdgeFlags kAdjacencyOnlyEdge{false, true};

/// A forward adjacency edge prior to indexing.
struct Fact {
  Triple triple;
  EdgeFlags flags;
  std::string provenance;

  friend bool operator==(const Fact&, const Fact&) = default;
};

/// One message-passing edge. Messages flow from triple.subject to
/// triple.object; inverse records carry the swapped triple of their forward
/// twin under encoder relation r + |R|.
struct EdgeRecord {
  EdgeId id = 0;
  Triple triple;
  RelationId encoder_relation = 0;
  Direction direction = Direction::forward;
  EdgeFlags flags;
  std::string provenance;
  EdgeId mirror = kNoEdge;

  EntityId source() const noexcept { return triple.subject; }
  EntityId destination() const noexcept { return triple.object; }
};

struct LoadReport {
  std::size_t lines = 0;
  std::size_t triples = 0;
  std::size_t duplicates = 0;
};

struct TripleFragment {
  std::vector<Triple> triples;
  LoadReport report;
};

/// Parses `head<TAB>relation<TAB>tail` lines, interning names into `vocab`.
/// Blank lines are skipped; duplicates are dropped and counted.
TripleFragment parse_triples(std::istream& in, Vocabulary& vocab);
TripleFragment load_triples(const std::filesystem::path& path, Vocabulary& vocab);

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  explicit KnowledgeGraph(Vocabulary vocab) : vocab_(std::move(vocab)) {}

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  Vocabulary& vocabulary() noexcept { return vocab_; }

  std::size_t num_entities() const noexcept { return vocab_.num_entities(); }
  std::size_t num_relations() const noexcept { return vocab_.num_relations(); }
  /// Relation space seen by the encoder: 2|R| with inverse augmentation.
  std::size_t num_encoder_relations() const noexcept {
    return has_inverse_ ? 2 * num_relations() : num_relations();
  }

  std::vector<Triple>& split(Split s);
  const std::vector<Triple>& split(Split s) const;

  /// Replaces the adjacency facts (deduplicated, first occurrence wins) and
  /// drops any existing index.
  void set_facts(std::vector<Fact> facts);
  const std::vector<Fact>& facts() const noexcept { return facts_; }
  /// Uses every training triple as a target edge tagged `clean`.
  void use_train_split_as_facts();

  void build_index(bool add_inverse);
  bool indexed() const noexcept { return indexed_; }
  bool has_inverse() const noexcept { return has_inverse_; }

  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t num_forward_edges() const noexcept { return facts_.size(); }
  const std::vector<EdgeRecord>& edges() const noexcept { return edges_; }
  const EdgeRecord& edge(EdgeId id) const { return edges_.at(id); }

  /// Incoming edge ids of `node`, in increasing id order.
  std::span<const EdgeId> incoming(EntityId node) const {
    return {in_edges_.data() + in_offsets_[node], in_offsets_[node + 1] - in_offsets_[node]};
  }
  std::size_t in_degree(EntityId node) const { return in_offsets_[node + 1] - in_offsets_[node]; }

  /// Excludes forward edges (and their inverse copies) from the positive pool
  /// while keeping them in the adjacency.
  void mark_adjacency_only(std::span<const EdgeId> forward_edges);

  /// Forward target edges used as training positives.
  std::vector<Triple> positive_pool() const;

  void validate() const;

 private:
  void require_index() const;

  Vocabulary vocab_;
  std::vector<Triple> train_, valid_, test_;
  std::vector<Fact> facts_;
  std::vector<EdgeRecord> edges_;
  std::vector<std::size_t> in_offsets_;
  std::vector<EdgeId> in_edges_;
  bool indexed_ = false;
  bool has_inverse_ = false;
};

/// Returns a copy of `kg` indexed for message passing.
KnowledgeGraph build_encoder_index(KnowledgeGraph kg, bool add_inverse = true);
void mark_adjacency_only(KnowledgeGraph& kg, std::span<const EdgeId> forward_edges);

/// Loads train.txt / valid.txt / test.txt from `dir` (valid and test are
/// optional) into a shared vocabulary. Facts default to the train split.
KnowledgeGraph load_dataset(const std::filesystem::path& dir, std::vector<LoadReport>* reports = nullptr);

void write_triples(std::ostream& out, const Vocabulary& vocab, std::span<const Triple> triples);

/// Structured-text snapshot: vocabulary, splits, adjacency facts with flags
/// and provenance, and the index settings.
void write_snapshot(std::ostream& out, const KnowledgeGraph& kg);
KnowledgeGraph read_snapshot(std::istream& in);
void save_snapshot(const std::filesystem::path& path, const KnowledgeGraph& kg);
KnowledgeGraph load_snapshot(const std::filesystem::path& path);

}  // namespace kgatt
