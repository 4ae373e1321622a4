#include "kgatt/graph_store.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "kgatt/text_io.hpp"

namespace kgatt {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "?";
}

std::string_view to_string(Direction direction) {
  return direction == Direction::forward ? "forward" : "inverse";
}

EntityId Vocabulary::intern_entity(std::string_view name) {
  auto [it, inserted] = entity_ids_.try_emplace(std::string(name), static_cast<EntityId>(entities_.size()));
  if (inserted) entities_.emplace_back(name);
  return it->second;
}

RelationId Vocabulary::intern_relation(std::string_view name) {
  auto [it, inserted] = relation_ids_.try_emplace(std::string(name), static_cast<RelationId>(relations_.size()));
  if (inserted) relations_.emplace_back(name);
  return it->second;
}

std::optional<EntityId> Vocabulary::find_entity(std::string_view name) const {
  auto it = entity_ids_.find(std::string(name));
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> Vocabulary::find_relation(std::string_view name) const {
  auto it = relation_ids_.find(std::string(name));
  if (it == relation_ids_.end()) return std::nullopt;
  return it->second;
}

TripleFragment parse_triples(std::istream& in, Vocabulary& vocab) {
  TripleFragment fragment;
  std::unordered_set<Triple, TripleHash> seen;
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("expected 3 tab-separated fields, got " + std::to_string(fields.size()), line_no);
    }
    if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw ParseError("empty field", line_no);
    }
    Triple t;
    t.subject = vocab.intern_entity(fields[0]);
    t.relation = vocab.intern_relation(fields[1]);
    t.object = vocab.intern_entity(fields[2]);
    if (seen.insert(t).second) {
      fragment.triples.push_back(t);
    } else {
      ++fragment.report.duplicates;
    }
  }
  fragment.report.lines = line_no;
  fragment.report.triples = fragment.triples.size();
  return fragment;
}

TripleFragment load_triples(const std::filesystem::path& path, Vocabulary& vocab) {
  auto in = open_input(path);
  try {
    return parse_triples(in, vocab);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::vector<Triple>& KnowledgeGraph::split(Split s) {
  switch (s) {
    case Split::train: return train_;
    case Split::valid: return valid_;
    case Split::test: return test_;
  }
  return train_;
}

const std::vector<Triple>& KnowledgeGraph::split(Split s) const {
  return const_cast<KnowledgeGraph*>(this)->split(s);
}

void KnowledgeGraph::set_facts(std::vector<Fact> facts) {
  std::unordered_set<Triple, TripleHash> seen;
  facts_.clear();
  facts_.reserve(facts.size());
  for (auto& f : facts) {
    if (f.flags.adjacency_only && f.flags.train_target) {
      throw Error("edge cannot be both a training target and adjacency-only");
    }
    if (seen.insert(f.triple).second) facts_.push_back(std::move(f));
  }
  indexed_ = false;
  has_inverse_ = false;
  edges_.clear();
  in_offsets_.clear();
  in_edges_.clear();
}

void KnowledgeGraph::use_train_split_as_facts() {
  std::vector<Fact> facts;
  facts.reserve(train_.size());
  for (const auto& t : train_) facts.push_back({t, kTargetEdge, "clean"});
  set_facts(std::move(facts));
}

void KnowledgeGraph::build_index(bool add_inverse) {
  const std::size_t n = num_entities();
  const std::size_t r = num_relations();
  for (const auto& f : facts_) {
    if (f.triple.subject >= n || f.triple.object >= n || f.triple.relation >= r) {
      throw Error("fact references an id outside the vocabulary");
    }
  }
  const std::size_t forward = facts_.size();
  edges_.clear();
  edges_.reserve(add_inverse ? 2 * forward : forward);
  for (std::size_t k = 0; k < forward; ++k) {
    EdgeRecord rec;
    rec.id = static_cast<EdgeId>(k);
    rec.triple = facts_[k].triple;
    rec.encoder_relation = facts_[k].triple.relation;
    rec.direction = Direction::forward;
    rec.flags = facts_[k].flags;
    rec.provenance = facts_[k].provenance;
    rec.mirror = add_inverse ? static_cast<EdgeId>(forward + k) : kNoEdge;
    edges_.push_back(std::move(rec));
  }
  if (add_inverse) {
    for (std::size_t k = 0; k < forward; ++k) {
      const auto& f = facts_[k];
      EdgeRecord rec;
      rec.id = static_cast<EdgeId>(forward + k);
      rec.triple = {f.triple.object, f.triple.relation, f.triple.subject};
      rec.encoder_relation = static_cast<RelationId>(f.triple.relation + r);
      rec.direction = Direction::inverse;
      rec.flags = f.flags;
      rec.provenance = f.provenance;
      rec.mirror = static_cast<EdgeId>(k);
      edges_.push_back(std::move(rec));
    }
  }

  // CSR by destination; counting sort keeps edge ids ascending per node.
  in_offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) ++in_offsets_[e.destination() + 1];
  for (std::size_t i = 0; i < n; ++i) in_offsets_[i + 1] += in_offsets_[i];
  in_edges_.assign(edges_.size(), 0);
  std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  for (const auto& e : edges_) in_edges_[cursor[e.destination()]++] = e.id;

  indexed_ = true;
  has_inverse_ = add_inverse;
}

void KnowledgeGraph::require_index() const {
  if (!indexed_) throw Error("knowledge graph has not been indexed");
}

void KnowledgeGraph::mark_adjacency_only(std::span<const EdgeId> forward_edges) {
  for (EdgeId id : forward_edges) {
    if (id >= facts_.size()) throw Error("unknown forward edge id " + std::to_string(id));
  }
  for (EdgeId id : forward_edges) {
    facts_[id].flags = kAdjacencyOnlyEdge;
    if (indexed_) {
      edges_[id].flags = kAdjacencyOnlyEdge;
      if (edges_[id].mirror != kNoEdge) edges_[edges_[id].mirror].flags = kAdjacencyOnlyEdge;
    }
  }
}

std::vector<Triple> KnowledgeGraph::positive_pool() const {
  std::vector<Triple> pool;
  for (const auto& f : facts_) {
    if (f.flags.train_target) pool.push_back(f.triple);
  }
  return pool;
}

void KnowledgeGraph::validate() const {
  const std::size_t n = num_entities();
  const std::size_t r = num_relations();
  auto check = [&](const Triple& t, std::string_view what) {
    if (t.subject >= n || t.object >= n || t.relation >= r) {
      throw Error(std::string(what) + " triple references an unknown id");
    }
  };
  for (const auto* s : {&train_, &valid_, &test_}) {
    for (const auto& t : *s) check(t, "split");
  }
  for (const auto& f : facts_) check(f.triple, "adjacency");
  if (indexed_) {
    if (in_edges_.size() != edges_.size()) throw Error("incoming index size mismatch");
  }
}

KnowledgeGraph build_encoder_index(KnowledgeGraph kg, bool add_inverse) {
  kg.build_index(add_inverse);
  return kg;
}

void mark_adjacency_only(KnowledgeGraph& kg, std::span<const EdgeId> forward_edges) {
  kg.mark_adjacency_only(forward_edges);
}

KnowledgeGraph load_dataset(const std::filesystem::path& dir, std::vector<LoadReport>* reports) {
  KnowledgeGraph kg;
  const std::pair<const char*, Split> files[] = {
      {"train.txt", Split::train}, {"valid.txt", Split::valid}, {"test.txt", Split::test}};
  for (const auto& [name, split] : files) {
    const auto path = dir / name;
    if (!std::filesystem::exists(path)) {
      if (split == Split::train) throw Error("missing " + path.string());
      continue;
    }
    auto fragment = load_triples(path, kg.vocabulary());
    if (reports) reports->push_back(fragment.report);
    kg.split(split) = std::move(fragment.triples);
  }
  kg.use_train_split_as_facts();
  return kg;
}

void write_triples(std::ostream& out, const Vocabulary& vocab, std::span<const Triple> triples) {
  for (const auto& t : triples) {
    out << vocab.entity_name(t.subject) << '\t' << vocab.relation_name(t.relation) << '\t'
        << vocab.entity_name(t.object) << '\n';
  }
}

namespace {

constexpr std::string_view kSnapshotMagic = "kgatt-graph 1";

void write_id_triple(std::ostream& out, const Triple& t) {
  out << t.subject << '\t' << t.relation << '\t' << t.object;
}

class SnapshotReader {
 public:
  explicit SnapshotReader(std::istream& in) : in_(in) {}

  std::string next() {
    if (!read_line(in_, line_)) throw ParseError("unexpected end of snapshot", line_no_);
    ++line_no_;
    return line_;
  }

  /// Reads "<keyword> <count>" and returns the count.
  std::size_t header(std::string_view keyword) {
    const auto line = next();
    const auto fields = split_fields(line, ' ');
    if (fields.size() < 2 || fields[0] != keyword) {
      throw ParseError("expected section '" + std::string(keyword) + "'", line_no_);
    }
    return parse_size(fields.back());
  }

  std::vector<std::string_view> fields(std::size_t expected) {
    next();
    auto f = split_fields(line_, '\t');
    if (f.size() != expected) throw ParseError("wrong field count in snapshot", line_no_);
    return f;
  }

  Triple triple(const std::vector<std::string_view>& f) const {
    return {static_cast<EntityId>(parse_size(f[0])), static_cast<RelationId>(parse_size(f[1])),
            static_cast<EntityId>(parse_size(f[2]))};
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_snapshot(std::ostream& out, const KnowledgeGraph& kg) {
  const auto& vocab = kg.vocabulary();
  out << kSnapshotMagic << '\n';
  out << "entities " << vocab.num_entities() << '\n';
  for (std::size_t i = 0; i < vocab.num_entities(); ++i) out << vocab.entity_name(static_cast<EntityId>(i)) << '\n';
  out << "relations " << vocab.num_relations() << '\n';
  for (std::size_t i = 0; i < vocab.num_relations(); ++i) out << vocab.relation_name(static_cast<RelationId>(i)) << '\n';
  for (Split s : {Split::train, Split::valid, Split::test}) {
    const auto& triples = kg.split(s);
    out << "split " << to_string(s) << ' ' << triples.size() << '\n';
    for (const auto& t : triples) {
      write_id_triple(out, t);
      out << '\n';
    }
  }
  out << "index " << (kg.indexed() ? 1 : 0) << ' ' << (kg.has_inverse() ? 1 : 0) << '\n';
  out << "facts " << kg.facts().size() << '\n';
  for (const auto& f : kg.facts()) {
    write_id_triple(out, f.triple);
    out << '\t' << (f.flags.train_target ? 1 : 0) << '\t' << (f.flags.adjacency_only ? 1 : 0) << '\t'
        << f.provenance << '\n';
  }
  out << "end\n";
}

KnowledgeGraph read_snapshot(std::istream& in) {
  SnapshotReader reader(in);
  if (reader.next() != kSnapshotMagic) throw ParseError("not a graph snapshot", 1);
  Vocabulary vocab;
  const std::size_t n = reader.header("entities");
  for (std::size_t i = 0; i < n; ++i) {
    if (vocab.intern_entity(reader.next()) != i) throw ParseError("duplicate entity name", reader.line_no());
  }
  const std::size_t r = reader.header("relations");
  for (std::size_t i = 0; i < r; ++i) {
    if (vocab.intern_relation(reader.next()) != i) throw ParseError("duplicate relation name", reader.line_no());
  }
  KnowledgeGraph kg(std::move(vocab));
  for (Split s : {Split::train, Split::valid, Split::test}) {
    const std::size_t count = reader.header("split");
    auto& triples = kg.split(s);
    triples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) triples.push_back(reader.triple(reader.fields(3)));
  }
  const auto index_line = reader.next();
  const auto index_fields = split_fields(index_line, ' ');
  if (index_fields.size() != 3 || index_fields[0] != "index") throw ParseError("expected index line", reader.line_no());
  const bool indexed = parse_size(index_fields[1]) != 0;
  const bool inverse = parse_size(index_fields[2]) != 0;
  const std::size_t count = reader.header("facts");
  std::vector<Fact> facts;
  facts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto f = reader.fields(6);
    Fact fact;
    fact.triple = reader.triple(f);
    fact.flags.train_target = parse_size(f[3]) != 0;
    fact.flags.adjacency_only = parse_size(f[4]) != 0;
    fact.provenance = std::string(f[5]);
    facts.push_back(std::move(fact));
  }
  if (reader.next() != "end") throw ParseError("missing end marker", reader.line_no());
  kg.set_facts(std::move(facts));
  kg.validate();
  if (indexed) kg.build_index(inverse);
  return kg;
}

void save_snapshot(const std::filesystem::path& path, const KnowledgeGraph& kg) {
  auto out = open_output(path);
  write_snapshot(out, kg);
  if (!out) throw Error("failed writing " + path.string());
}

KnowledgeGraph load_snapshot(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_snapshot(in);
}

}  // namespace kgatt
