#include "kgatt/reports.hpp"

#include <cmath>
#include <ostream>

#include "kgatt/text_io.hpp"

namespace kgatt {
namespace {

std::string num(double v) { return std::isnan(v) ? std::string("nan") : format_double(v); }

}  // namespace

std::string encoder_relation_name(const KnowledgeGraph& kg, RelationId encoder_relation) {
  const std::size_t r = kg.num_relations();
  if (encoder_relation < r) return kg.vocabulary().relation_name(encoder_relation);
  return kg.vocabulary().relation_name(static_cast<RelationId>(encoder_relation - r)) + "_inv";
}

void write_weights_csv(std::ostream& out, const KnowledgeGraph& kg, std::span<const double> raw,
                       std::span<const double> normalized) {
  const auto& v = kg.vocabulary();
  out << "edge_id,subject,relation,object,direction,raw,normalized\n";
  for (const auto& rec : kg.edges()) {
    out << rec.id << ',' << v.entity_name(rec.triple.subject) << ',' << v.relation_name(rec.triple.relation) << ','
        << v.entity_name(rec.triple.object) << ',' << to_string(rec.direction) << ',' << num(raw[rec.id]) << ','
        << num(normalized[rec.id]) << '\n';
  }
}

void write_embeddings_csv(std::ostream& out, const KnowledgeGraph& kg, const Matrix& embeddings) {
  out << "entity";
  for (std::size_t k = 0; k < embeddings.cols(); ++k) out << ",dim_" << k;
  out << '\n';
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    out << kg.vocabulary().entity_name(static_cast<EntityId>(i));
    for (double x : embeddings.row(i)) out << ',' << num(x);
    out << '\n';
  }
}

void write_provenance_csv(std::ostream& out, const KnowledgeGraph& kg) {
  out << "edge_id,tag\n";
  for (std::size_t i = 0; i < kg.facts().size(); ++i) out << i << ',' << kg.facts()[i].provenance << '\n';
}

void write_train_log(std::ostream& out, const TrainReport& report) {
  out << "epoch,loss,val_mrr\n";
  for (const auto& e : report.epochs) out << e.epoch << ',' << num(e.loss) << ',' << num(e.validation_mrr) << '\n';
}

void write_eval_summary(std::ostream& out, const EvalReport& report) {
  out << "queries = " << report.ranks.size() << '\n';
  out << "mrr_filtered = " << num(report.mrr_filtered) << '\n';
  out << "mrr_raw = " << num(report.mrr_raw) << '\n';
  for (std::size_t h = 0; h < kHitsAt.size(); ++h) {
    out << "hits@" << kHitsAt[h] << "_filtered = " << num(report.hits_filtered[h]) << '\n';
  }
  for (std::size_t h = 0; h < kHitsAt.size(); ++h) {
    out << "hits@" << kHitsAt[h] << "_raw = " << num(report.hits_raw[h]) << '\n';
  }
}

void write_ranks_csv(std::ostream& out, const KnowledgeGraph& kg, const EvalReport& report) {
  const auto& v = kg.vocabulary();
  out << "subject,relation,object,side,raw_rank,filtered_rank\n";
  for (const auto& q : report.ranks) {
    out << v.entity_name(q.triple.subject) << ',' << v.relation_name(q.triple.relation) << ','
        << v.entity_name(q.triple.object) << ',' << to_string(q.side) << ',' << num(q.raw) << ',' << num(q.filtered)
        << '\n';
  }
}

void write_occlusion_csv(std::ostream& out, const KnowledgeGraph& kg, const OcclusionReport& report) {
  const auto& v = kg.vocabulary();
  out << "edge_id,endpoint,source,relation,destination,delta,std_error\n";
  for (const auto& row : report.rows) {
    const auto& rec = kg.edge(row.edge);
    out << row.edge << ',' << to_string(row.endpoint) << ',' << v.entity_name(rec.source()) << ','
        << encoder_relation_name(kg, rec.encoder_relation) << ',' << v.entity_name(rec.destination()) << ','
        << num(row.delta) << ',' << num(row.std_error) << '\n';
  }
}

void write_influencers_csv(std::ostream& out, const KnowledgeGraph& kg, const InfluencerReport& report) {
  const auto& v = kg.vocabulary();
  out << "rank_group,rank,edge_id,source,relation,weight,std_error,provenance\n";
  auto emit = [&](std::string_view group, const std::vector<InfluencerEntry>& entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& rec = kg.edge(entries[i].edge);
      out << group << ',' << (i + 1) << ',' << rec.id << ',' << v.entity_name(rec.source()) << ','
          << encoder_relation_name(kg, rec.encoder_relation) << ',' << num(entries[i].weight) << ','
          << num(entries[i].std_error) << ',' << rec.provenance << '\n';
    }
  };
  emit("top", report.top);
  emit("bottom", report.bottom);
}

void write_histograms_csv(std::ostream& out, const KnowledgeGraph& kg, const WeightHistograms& histograms) {
  out << "relation,group,bin,lo,hi,count,mass\n";
  for (const auto& row : histograms.rows) {
    out << encoder_relation_name(kg, row.encoder_relation) << ',' << row.group << ',' << row.bin << ','
        << num(row.lo) << ',' << num(row.hi) << ',' << row.count << ',' << num(row.mass) << '\n';
  }
}

void write_flagged_csv(std::ostream& out, const KnowledgeGraph& kg, const LowWeightReport& report) {
  const auto& v = kg.vocabulary();
  out << "edge_id,source,relation,destination,weight,percentile,stratum_degree,provenance\n";
  for (const auto& f : report.edges) {
    const auto& rec = kg.edge(f.edge);
    out << f.edge << ',' << v.entity_name(rec.source()) << ',' << encoder_relation_name(kg, rec.encoder_relation)
        << ',' << v.entity_name(rec.destination()) << ',' << num(f.weight) << ',' << num(f.percentile) << ','
        << f.stratum_degree << ',' << rec.provenance << '\n';
  }
}

void write_self_similarity_csv(std::ostream& out, const KnowledgeGraph& kg, const SelfSimilarity& similarity) {
  out << "edge_id,weight_a,weight_b\n";
  for (std::size_t i = 0; i < similarity.pairs.size() && i < kg.num_edges(); ++i) {
    out << i << ',' << num(similarity.pairs[i].first) << ',' << num(similarity.pairs[i].second) << '\n';
  }
}

void write_label_ratio_csv(std::ostream& out, std::span<const LabelRatioPoint> points) {
  out << "fraction,bottom_count,top_count,bottom_low_rate,top_low_rate,ratio\n";
  for (const auto& p : points) {
    out << num(p.fraction) << ',' << p.bottom_count << ',' << p.top_count << ',' << num(p.bottom_low_rate) << ','
        << num(p.top_low_rate) << ',' << num(p.ratio) << '\n';
  }
}

}  // namespace kgatt
