#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "kgatt/evaluation.hpp"
#include "kgatt/graph_store.hpp"
#include "kgatt/interpret.hpp"
#include "kgatt/training.hpp"

namespace kgatt {

/// edge_id,subject,relation,object,direction,raw,normalized
void write_weights_csv(std::ostream& out, const KnowledgeGraph& kg, std::span<const double> raw,
                       std::span<const double> normalized);

/// entity,dim_0..dim_{d-1}
void write_embeddings_csv(std::ostream& out, const KnowledgeGraph& kg, const Matrix& embeddings);

/// edge_id,tag over forward edges.
void write_provenance_csv(std::ostream& out, const KnowledgeGraph& kg);

/// epoch,loss,val_mrr
void write_train_log(std::ostream& out, const TrainReport& report);

/// key = value metrics summary.
void write_eval_summary(std::ostream& out, const EvalReport& report);
/// subject,relation,object,side,raw_rank,filtered_rank
void write_ranks_csv(std::ostream& out, const KnowledgeGraph& kg, const EvalReport& report);

void write_occlusion_csv(std::ostream& out, const KnowledgeGraph& kg, const OcclusionReport& report);
void write_influencers_csv(std::ostream& out, const KnowledgeGraph& kg, const InfluencerReport& report);
void write_histograms_csv(std::ostream& out, const KnowledgeGraph& kg, const WeightHistograms& histograms);
void write_flagged_csv(std::ostream& out, const KnowledgeGraph& kg, const LowWeightReport& report);
void write_self_similarity_csv(std::ostream& out, const KnowledgeGraph& kg, const SelfSimilarity& similarity);
void write_label_ratio_csv(std::ostream& out, std::span<const LabelRatioPoint> points);

/// Name of an encoder relation; inverse relations get an "_inv" suffix.
std::string encoder_relation_name(const KnowledgeGraph& kg, RelationId encoder_relation);

}  // namespace kgatt
