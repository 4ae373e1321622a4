#include "kgatt/evaluation.hpp"

#include <algorithm>

namespace kgatt {

std::string_view to_string(Side side) { return side == Side::subject ? "subject" : "object"; }

KnownTriples::KnownTriples(const KnowledgeGraph& kg) {
  for (Split s : {Split::train, Split::valid, Split::test}) {
    for (const auto& t : kg.split(s)) add(t);
  }
}

void KnownTriples::add(const Triple& t) {
  auto& objs = by_subject_[key(t.subject, t.relation)];
  auto it = std::lower_bound(objs.begin(), objs.end(), t.object);
  if (it != objs.end() && *it == t.object) return;
  objs.insert(it, t.object);
  auto& subs = by_object_[key(t.relation, t.object)];
  subs.insert(std::lower_bound(subs.begin(), subs.end(), t.subject), t.subject);
}

bool KnownTriples::contains(const Triple& t) const {
  const auto objs = objects(t.subject, t.relation);
  return std::binary_search(objs.begin(), objs.end(), t.object);
}

std::span<const EntityId> KnownTriples::objects(EntityId subject, RelationId relation) const {
  auto it = by_subject_.find(key(subject, relation));
  if (it == by_subject_.end()) return {};
  return it->second;
}

std::span<const EntityId> KnownTriples::subjects(RelationId relation, EntityId object) const {
  auto it = by_object_.find(key(relation, object));
  if (it == by_object_.end()) return {};
  return it->second;
}

double rank_query(const Matrix& embeddings, const Matrix& relations, DecoderKind kind, const Triple& triple,
                  Side side, const KnownTriples* filter) {
  const std::size_t n = embeddings.rows();
  const std::size_t d = embeddings.cols();
  // Scores are linear in the replaced argument: score(c) = <query, e_c>.
  std::vector<double> query(d, 0.0);
  std::vector<double> scratch_a(d, 0.0), scratch_b(d, 0.0);
  const auto rel = relations.row(triple.relation);
  if (side == Side::object) {
    const auto subj = embeddings.row(triple.subject);
    accumulate_score_gradient(kind, subj, rel, subj, 1.0, scratch_a, scratch_b, query);
  } else {
    const auto obj = embeddings.row(triple.object);
    accumulate_score_gradient(kind, obj, rel, obj, 1.0, query, scratch_a, scratch_b);
  }
  auto score_of = [&](std::size_t c) {
    const auto e = embeddings.row(c);
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += query[k] * e[k];
    return acc;
  };
  const EntityId truth = side == Side::object ? triple.object : triple.subject;
  std::vector<char> skip;
  if (filter) {
    skip.assign(n, 0);
    const auto known = side == Side::object ? filter->objects(triple.subject, triple.relation)
                                            : filter->subjects(triple.relation, triple.object);
    for (EntityId c : known) skip[c] = 1;
  }
  const double target = score_of(truth);
  std::size_t greater = 0;
  std::size_t ties = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (c == truth || (filter && skip[c])) continue;
    const double s = score_of(c);
    if (s > target) {
      ++greater;
    } else if (s == target) {
      ++ties;
    }
  }
  return 1.0 + static_cast<double>(greater) + static_cast<double>(ties) / 2.0;
}

double rank_query(const ModelParameters& params, const KnowledgeGraph& kg, DecoderKind kind,
                  std::span<const double> coefficients, const Triple& triple, Side side, bool filtered) {
  const auto embeddings = encode_all(params, kg, coefficients);
  if (!filtered) return rank_query(embeddings, params.relation, kind, triple, side, nullptr);
  const KnownTriples known(kg);
  return rank_query(embeddings, params.relation, kind, triple, side, &known);
}

EvalReport summarize_ranks(std::vector<QueryRank> ranks) {
  EvalReport report;
  if (ranks.empty()) throw Error("cannot summarize an empty set of ranks");
  for (const auto& q : ranks) {
    report.mrr_raw += 1.0 / q.raw;
    report.mrr_filtered += 1.0 / q.filtered;
    for (std::size_t h = 0; h < kHitsAt.size(); ++h) {
      const auto k = static_cast<double>(kHitsAt[h]);
      if (q.raw <= k) report.hits_raw[h] += 1.0;
      if (q.filtered <= k) report.hits_filtered[h] += 1.0;
    }
  }
  const auto count = static_cast<double>(ranks.size());
  report.mrr_raw /= count;
  report.mrr_filtered /= count;
  for (std::size_t h = 0; h < kHitsAt.size(); ++h) {
    report.hits_raw[h] /= count;
    report.hits_filtered[h] /= count;
  }
  report.ranks = std::move(ranks);
  return report;
}

EvalReport evaluate_embeddings(const Matrix& embeddings, const Matrix& relations, DecoderKind kind,
                               std::span<const Triple> triples, const KnownTriples& known) {
  if (triples.empty()) throw Error("cannot evaluate an empty split");
  std::vector<QueryRank> ranks(2 * triples.size());
  parallel_for(ranks.size(), [&](std::size_t q) {
    const auto& t = triples[q / 2];
    const Side side = q % 2 == 0 ? Side::subject : Side::object;
    ranks[q] = {t, side, rank_query(embeddings, relations, kind, t, side, nullptr),
                rank_query(embeddings, relations, kind, t, side, &known)};
  });
  return summarize_ranks(std::move(ranks));
}

EvalReport evaluate(const ModelParameters& params, const KnowledgeGraph& kg, Split split, DecoderKind kind,
                    std::span<const double> coefficients, const EvalOptions& options) {
  const auto& all = kg.split(split);
  if (all.empty()) throw Error(std::string("split '") + std::string(to_string(split)) + "' is empty");
  std::span<const Triple> triples(all);
  if (options.max_triples > 0 && options.max_triples < triples.size()) triples = triples.first(options.max_triples);
  const auto embeddings = encode_all(params, kg, coefficients);
  const KnownTriples known(kg);
  return evaluate_embeddings(embeddings, params.relation, kind, triples, known);
}

}  // namespace kgatt
