#include "kgatt/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "kgatt/text_io.hpp"

namespace kgatt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MeanStderr {
  double mean = 0.0;
  double std_error = kNaN;
};

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    out.std_error = sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

}  // namespace

InfluencerReport rank_influencers(std::span<const std::vector<double>> runs, const KnowledgeGraph& kg,
                                  EntityId entity, std::size_t k) {
  if (runs.empty()) throw Error("rank_influencers needs at least one run");
  if (entity >= kg.num_entities()) throw Error("unknown entity id " + std::to_string(entity));
  InfluencerReport report;
  report.entity = entity;
  const auto in = kg.incoming(entity);
  if (in.empty()) {
    report.notice = "entity '" + kg.vocabulary().entity_name(entity) + "' has no incoming edges";
    return report;
  }
  std::vector<InfluencerEntry> entries;
  std::vector<double> samples(runs.size());
  for (EdgeId e : in) {
    for (std::size_t r = 0; r < runs.size(); ++r) samples[r] = runs[r].at(e);
    const auto ms = mean_stderr(samples);
    entries.push_back({e, ms.mean, ms.std_error});
  }
  const std::size_t take = std::min(k, entries.size());
  auto desc = entries;
  std::stable_sort(desc.begin(), desc.end(), [](const auto& a, const auto& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.edge < b.edge;
  });
  auto asc = entries;
  std::stable_sort(asc.begin(), asc.end(), [](const auto& a, const auto& b) {
    return a.weight != b.weight ? a.weight < b.weight : a.edge < b.edge;
  });
  report.top.assign(desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(take));
  report.bottom.assign(asc.begin(), asc.begin() + static_cast<std::ptrdiff_t>(take));
  return report;
}

InfluencerReport rank_influencers(std::span<const double> coefficients, const KnowledgeGraph& kg, EntityId entity,
                                  std::size_t k) {
  const std::vector<std::vector<double>> runs{std::vector<double>(coefficients.begin(), coefficients.end())};
  return rank_influencers(runs, kg, entity, k);
}

OcclusionReport occlusion_scan(std::span<const ModelParameters> runs, const KnowledgeGraph& kg, const Triple& target,
                               const OcclusionOptions& options) {
  if (runs.empty()) throw Error("occlusion_scan needs at least one parameter snapshot");
  if (target.subject >= kg.num_entities() || target.object >= kg.num_entities() ||
      target.relation >= kg.num_relations()) {
    throw Error("occlusion target references an unknown id");
  }
  // Candidate edges: incoming edges of the subject, then of the object.
  std::vector<std::pair<EdgeId, Side>> candidates;
  for (EdgeId e : kg.incoming(target.subject)) candidates.emplace_back(e, Side::subject);
  if (target.object != target.subject) {
    for (EdgeId e : kg.incoming(target.object)) candidates.emplace_back(e, Side::object);
  }

  std::vector<std::vector<double>> deltas(candidates.size(), std::vector<double>(runs.size()));
  std::vector<double> baselines(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& params = runs[r];
    check_dimensions(params, kg);
    const std::vector<double> raw = options.attention == AttentionMode::learned
                                        ? params.attention.values
                                        : std::vector<double>(kg.num_edges(), 1.0);
    const auto base_coeff = normalize(raw, kg).coefficients;
    const auto rel = params.relation.row(target.relation);
    const auto e_s = encode_node(params, kg, base_coeff, target.subject);
    const auto e_o = encode_node(params, kg, base_coeff, target.object);
    const double baseline = probability(score(options.decoder, e_s, rel, e_o));
    baselines[r] = baseline;

    std::vector<double> coeff = base_coeff;
    std::vector<double> es_occ(params.dim()), eo_occ(params.dim());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const EdgeId edge = candidates[c].first;
      const EntityId node = kg.edge(edge).destination();
      occlude_node(raw, kg, edge, options.mode, coeff);
      if (node == target.subject) {
        encode_node_into(params, kg, coeff, target.subject, es_occ);
      } else {
        std::copy(e_s.begin(), e_s.end(), es_occ.begin());
      }
      if (node == target.object) {
        encode_node_into(params, kg, coeff, target.object, eo_occ);
      } else {
        std::copy(e_o.begin(), e_o.end(), eo_occ.begin());
      }
      deltas[c][r] = probability(score(options.decoder, es_occ, rel, eo_occ)) - baseline;
      for (EdgeId e : kg.incoming(node)) coeff[e] = base_coeff[e];
    }
  }

  OcclusionReport report;
  report.target = target;
  report.baseline = mean_stderr(baselines).mean;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto ms = mean_stderr(deltas[c]);
    report.rows.push_back({candidates[c].first, candidates[c].second, ms.mean, ms.std_error});
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
    return a.delta != b.delta ? a.delta < b.delta : a.edge < b.edge;
  });
  return report;
}

std::vector<double> edge_weights(std::span<const double> coefficients, const KnowledgeGraph& kg, WeightScale scale) {
  if (coefficients.size() != kg.num_edges()) throw Error("coefficient count does not match edge count");
  std::vector<double> out(coefficients.begin(), coefficients.end());
  if (scale == WeightScale::degree_relative) {
    for (const auto& rec : kg.edges()) out[rec.id] *= static_cast<double>(kg.in_degree(rec.destination()));
  }
  return out;
}

WeightHistograms relation_weight_distributions(std::span<const double> coefficients, const KnowledgeGraph& kg,
                                               std::size_t bins, GroupBy group_by, WeightScale scale) {
  if (bins < 1) throw Error("histogram needs at least one bin");
  const auto weights = edge_weights(coefficients, kg, scale);
  WeightHistograms out;
  out.bins = bins;
  if (weights.empty()) return out;
  out.lo = *std::min_element(weights.begin(), weights.end());
  out.hi = *std::max_element(weights.begin(), weights.end());
  const double width = (out.hi - out.lo) / static_cast<double>(bins);

  std::map<std::pair<RelationId, std::string>, std::vector<std::size_t>> counts;
  for (const auto& rec : kg.edges()) {
    std::string group = group_by == GroupBy::provenance
                            ? rec.provenance
                            : std::string(rec.flags.adjacency_only ? "adjacency_only" : "train_target");
    auto& c = counts[{rec.encoder_relation, std::move(group)}];
    if (c.empty()) c.assign(bins, 0);
    std::size_t b = 0;
    if (width > 0.0) b = std::min(bins - 1, static_cast<std::size_t>((weights[rec.id] - out.lo) / width));
    ++c[b];
  }
  for (const auto& [key, c] : counts) {
    const auto total = static_cast<double>(std::accumulate(c.begin(), c.end(), std::size_t{0}));
    for (std::size_t b = 0; b < bins; ++b) {
      HistogramRow row;
      row.encoder_relation = key.first;
      row.group = key.second;
      row.bin = b;
      row.lo = out.lo + width * static_cast<double>(b);
      row.hi = b + 1 == bins ? out.hi : out.lo + width * static_cast<double>(b + 1);
      row.count = c[b];
      row.mass = static_cast<double>(c[b]) / total;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

SelfSimilarity weight_self_similarity(std::span<const double> run_a, std::span<const double> run_b) {
  if (run_a.size() != run_b.size()) {
    throw Error("weight vectors cover different edge sets (" + std::to_string(run_a.size()) + " vs " +
                std::to_string(run_b.size()) + " edges)");
  }
  SelfSimilarity out;
  out.pairs.reserve(run_a.size());
  for (std::size_t i = 0; i < run_a.size(); ++i) out.pairs.emplace_back(run_a[i], run_b[i]);
  if (run_a.size() < 2) return out;
  const double n = static_cast<double>(run_a.size());
  const double ma = std::accumulate(run_a.begin(), run_a.end(), 0.0) / n;
  const double mb = std::accumulate(run_b.begin(), run_b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < run_a.size(); ++i) {
    const double da = run_a[i] - ma, db = run_b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return out;
  out.pearson = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  return out;
}

std::vector<double> stratified_percentiles(std::span<const double> coefficients, const KnowledgeGraph& kg) {
  if (coefficients.size() != kg.num_edges()) throw Error("coefficient count does not match edge count");
  std::unordered_map<std::size_t, std::vector<EdgeId>> strata;
  for (const auto& rec : kg.edges()) strata[kg.in_degree(rec.destination())].push_back(rec.id);
  std::vector<double> pct(kg.num_edges(), 0.5);
  for (auto& [degree, ids] : strata) {
    if (ids.size() < 2) continue;
    std::sort(ids.begin(), ids.end(), [&](EdgeId a, EdgeId b) {
      return coefficients[a] != coefficients[b] ? coefficients[a] < coefficients[b] : a < b;
    });
    const double denom = static_cast<double>(ids.size() - 1);
    for (std::size_t i = 0; i < ids.size();) {
      std::size_t j = i;
      while (j < ids.size() && coefficients[ids[j]] == coefficients[ids[i]]) ++j;
      // Tied block [i, j): #less = i, #ties among others = j - i - 1.
      const double p = (static_cast<double>(i) + static_cast<double>(j - i - 1) / 2.0) / denom;
      for (std::size_t t = i; t < j; ++t) pct[ids[t]] = p;
      i = j;
    }
  }
  return pct;
}

namespace {

std::vector<EdgeId> order_by_percentile(std::span<const double> coefficients, const KnowledgeGraph& kg,
                                        const std::vector<double>& pct) {
  const auto rel = edge_weights(coefficients, kg, WeightScale::degree_relative);
  std::vector<EdgeId> order(kg.num_edges());
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    if (pct[a] != pct[b]) return pct[a] < pct[b];
    if (rel[a] != rel[b]) return rel[a] < rel[b];
    return a < b;
  });
  return order;
}

std::size_t fraction_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

}  // namespace

LowWeightReport flag_low_weight_edges(std::span<const double> coefficients, const KnowledgeGraph& kg,
                                      double fraction) {
  if (!(fraction > 0.0 && fraction <= 0.5)) throw Error("flag fraction must lie in (0, 0.5]");
  const auto pct = stratified_percentiles(coefficients, kg);
  const auto order = order_by_percentile(coefficients, kg, pct);
  const std::size_t count = std::min(order.size(), fraction_count(fraction, order.size()));
  LowWeightReport report;
  for (std::size_t i = 0; i < count; ++i) {
    const EdgeId e = order[i];
    report.edges.push_back({e, coefficients[e], pct[e], kg.in_degree(kg.edge(e).destination())});
  }
  if (count > 0 && count < order.size()) {
    // Arbitrary cut: the last flagged edge ties an unflagged edge of its stratum.
    const EdgeId last = order[count - 1];
    const std::size_t degree = kg.in_degree(kg.edge(last).destination());
    for (std::size_t i = count; i < order.size(); ++i) {
      const EdgeId e = order[i];
      if (kg.in_degree(kg.edge(e).destination()) == degree && coefficients[e] == coefficients[last]) {
        report.low_confidence = true;
        break;
      }
    }
  }
  return report;
}

TagEnrichment tag_enrichment(std::span<const double> coefficients, const KnowledgeGraph& kg, double fraction,
                             std::string_view tag) {
  if (!(fraction > 0.0 && fraction <= 0.5)) throw Error("fraction must lie in (0, 0.5]");
  const auto pct = stratified_percentiles(coefficients, kg);
  const auto order = order_by_percentile(coefficients, kg, pct);
  const std::size_t count = std::min(order.size(), fraction_count(fraction, order.size()));
  TagEnrichment out;
  if (count == 0) return out;
  std::size_t bottom = 0, top = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (kg.edge(order[i]).provenance == tag) ++bottom;
    if (kg.edge(order[order.size() - 1 - i]).provenance == tag) ++top;
  }
  out.bottom_rate = static_cast<double>(bottom) / static_cast<double>(count);
  out.top_rate = static_cast<double>(top) / static_cast<double>(count);
  out.ratio = out.top_rate > 0.0 ? out.bottom_rate / out.top_rate : std::numeric_limits<double>::infinity();
  return out;
}

double discrimination_auc(std::span<const double> higher, std::span<const double> lower) {
  if (higher.empty() || lower.empty()) throw Error("AUC needs two non-empty samples");
  std::vector<double> a(higher.begin(), higher.end()), b(lower.begin(), lower.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // For each x in `a`, count b < x and b == x via two pointers.
  double wins = 0.0;
  std::size_t lo = 0, hi = 0;
  for (double x : a) {
    while (lo < b.size() && b[lo] < x) ++lo;
    while (hi < b.size() && b[hi] <= x) ++hi;
    wins += static_cast<double>(lo) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

std::vector<ExternalLabel> read_external_labels(std::istream& in, const Vocabulary& vocab, std::size_t* skipped) {
  std::vector<ExternalLabel> labels;
  std::size_t dropped = 0;
  std::string line;
  std::size_t line_no = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("subject,", 0) == 0) continue;
    const auto f = split_fields(line, ',');
    if (f.size() != 4) throw ParseError("expected subject,relation,object,score", line_no);
    const auto s = vocab.find_entity(f[0]);
    const auto r = vocab.find_relation(f[1]);
    const auto o = vocab.find_entity(f[2]);
    if (!s || !r || !o) {
      ++dropped;
      continue;
    }
    labels.push_back({{*s, *r, *o}, parse_double(f[3])});
  }
  if (skipped) *skipped = dropped;
  return labels;
}

std::vector<LabelRatioPoint> external_label_ratio(std::span<const double> coefficients, const KnowledgeGraph& kg,
                                                  std::span<const ExternalLabel> labels, double low_score,
                                                  std::span<const double> fractions) {
  const auto pct = stratified_percentiles(coefficients, kg);
  std::unordered_map<Triple, EdgeId, TripleHash> forward;
  for (const auto& rec : kg.edges()) {
    if (rec.direction == Direction::forward) forward.emplace(rec.triple, rec.id);
  }
  std::vector<std::pair<double, bool>> labelled;  // (percentile, is_low)
  for (const auto& l : labels) {
    auto it = forward.find(l.triple);
    if (it != forward.end()) labelled.emplace_back(pct[it->second], l.score < low_score);
  }
  std::vector<LabelRatioPoint> out;
  for (double f : fractions) {
    LabelRatioPoint p;
    p.fraction = f;
    std::size_t bottom_low = 0, top_low = 0;
    for (const auto& [q, low] : labelled) {
      if (q <= f) {
        ++p.bottom_count;
        bottom_low += low ? 1 : 0;
      }
      if (q >= 1.0 - f) {
        ++p.top_count;
        top_low += low ? 1 : 0;
      }
    }
    p.bottom_low_rate = p.bottom_count ? static_cast<double>(bottom_low) / static_cast<double>(p.bottom_count) : kNaN;
    p.top_low_rate = p.top_count ? static_cast<double>(top_low) / static_cast<double>(p.top_count) : kNaN;
    p.ratio = p.top_low_rate > 0.0 ? p.bottom_low_rate / p.top_low_rate : kNaN;
    out.push_back(p);
  }
  return out;
}

}  // namespace kgatt
