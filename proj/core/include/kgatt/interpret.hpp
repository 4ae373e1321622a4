#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgatt/attention.hpp"
#include "kgatt/decoder.hpp"
#include "kgatt/encoder.hpp"
#include "kgatt/evaluation.hpp"
#include "kgatt/graph_store.hpp"
#include "kgatt/training.hpp"

namespace kgatt {

// ---------------------------------------------------------------------------
// Influencer ranking

struct InfluencerEntry {
  EdgeId edge = 0;
  double weight = 0.0;
  /// Standard error across runs; NaN with a single run.
  double std_error = 0.0;
};

struct InfluencerReport {
  EntityId entity = 0;
  std::vector<InfluencerEntry> top;     ///< descending weight
  std::vector<InfluencerEntry> bottom;  ///< ascending weight
  std::string notice;
};

/// `runs` holds one coefficient vector per trained model over the same graph.
/// Ties are broken by ascending edge id.
InfluencerReport rank_influencers(std::span<const std::vector<double>> runs, const KnowledgeGraph& kg,
                                  EntityId entity, std::size_t k);
InfluencerReport rank_influencers(std::span<const double> coefficients, const KnowledgeGraph& kg, EntityId entity,
                                  std::size_t k);

// ---------------------------------------------------------------------------
// Occlusion

struct OcclusionRow {
  EdgeId edge = 0;
  Side endpoint = Side::subject;  ///< which endpoint of the target the edge feeds
  double delta = 0.0;             ///< occluded - baseline probability, mean over runs
  double std_error = 0.0;         ///< NaN with a single run
};

struct OcclusionReport {
  Triple target;
  double baseline = 0.0;
  std::vector<OcclusionRow> rows;  ///< ascending delta, ties by edge id
};

struct OcclusionOptions {
  DecoderKind decoder = DecoderKind::distmult;
  AttentionMode attention = AttentionMode::learned;
  OcclusionMode mode = OcclusionMode::renormalize;
};

/// Removes each incoming edge of the target's subject and object in turn and
/// measures the change in the target's probability. Only the affected node
/// is re-encoded; the parameters are never modified.
OcclusionReport occlusion_scan(std::span<const ModelParameters> runs, const KnowledgeGraph& kg, const Triple& target,
                               const OcclusionOptions& options);

// ---------------------------------------------------------------------------
// Weight distributions

enum class WeightScale {
  normalized,       ///< c_e as produced by the budget normalization
  degree_relative,  ///< c_e * |in(dest)|, i.e. 1.0 under uniform attention
};

enum class GroupBy { flags, provenance };

std::vector<double> edge_weights(std::span<const double> coefficients, const KnowledgeGraph& kg, WeightScale scale);

struct HistogramRow {
  RelationId encoder_relation = 0;
  std::string group;
  std::size_t bin = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double mass = 0.0;
};

struct WeightHistograms {
  std::size_t bins = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<HistogramRow> rows;
};

/// Per encoder relation and group, a histogram over a shared range
/// [min weight, max weight]. Masses sum to one within each (relation, group).
WeightHistograms relation_weight_distributions(std::span<const double> coefficients, const KnowledgeGraph& kg,
                                               std::size_t bins, GroupBy group_by = GroupBy::flags,
                                               WeightScale scale = WeightScale::normalized);

// ---------------------------------------------------------------------------
// Cross-seed agreement

struct SelfSimilarity {
  /// Empty when either vector is constant.
  std::optional<double> pearson;
  std::vector<std::pair<double, double>> pairs;
};

SelfSimilarity weight_self_similarity(std::span<const double> run_a, std::span<const double> run_b);

// ---------------------------------------------------------------------------
// Low-weight flagging

/// Mid-rank percentile in [0, 1] of each edge's weight among edges whose
/// destination has the same in-degree. Singleton strata get 0.5.
std::vector<double> stratified_percentiles(std::span<const double> coefficients, const KnowledgeGraph& kg);

struct FlaggedEdge {
  EdgeId edge = 0;
  double weight = 0.0;
  double percentile = 0.0;
  std::size_t stratum_degree = 0;
};

struct LowWeightReport {
  std::vector<FlaggedEdge> edges;
  /// The cut falls inside a run of tied weights, so the selection is arbitrary.
  bool low_confidence = false;
};

/// The round(fraction * |E|) edges with the lowest degree-stratified
/// percentile. fraction must lie in (0, 0.5].
LowWeightReport flag_low_weight_edges(std::span<const double> coefficients, const KnowledgeGraph& kg,
                                      double fraction);

struct TagEnrichment {
  double bottom_rate = 0.0;  ///< share of bottom-fraction edges carrying the tag
  double top_rate = 0.0;     ///< share of top-fraction edges carrying the tag
  double ratio = 0.0;        ///< bottom_rate / top_rate (inf when top_rate is 0)
};

TagEnrichment tag_enrichment(std::span<const double> coefficients, const KnowledgeGraph& kg, double fraction,
                             std::string_view tag);

/// Probability that a uniformly drawn `higher` value exceeds a uniformly
/// drawn `lower` value (ties count one half).
double discrimination_auc(std::span<const double> higher, std::span<const double> lower);

// ---------------------------------------------------------------------------
// External labels

struct ExternalLabel {
  Triple triple;
  double score = 0.0;
};

/// CSV with header `subject,relation,object,score` (names as in the graph).
/// Rows naming unknown entities or relations are skipped and counted.
std::vector<ExternalLabel> read_external_labels(std::istream& in, const Vocabulary& vocab,
                                                std::size_t* skipped = nullptr);

struct LabelRatioPoint {
  double fraction = 0.0;
  std::size_t bottom_count = 0;
  std::size_t top_count = 0;
  double bottom_low_rate = 0.0;
  double top_low_rate = 0.0;
  double ratio = 0.0;
};

/// For each weight fraction f, compares how often labelled edges in the
/// bottom-f and top-f of stratified weight percentiles carry an external
/// score below `low_score`.
std::vector<LabelRatioPoint> external_label_ratio(std::span<const double> coefficients, const KnowledgeGraph& kg,
                                                  std::span<const ExternalLabel> labels, double low_score,
                                                  std::span<const double> fractions);

}  // namespace kgatt
