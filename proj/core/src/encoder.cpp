#include "kgatt/encoder.hpp"

#include <cmath>
#include <string>

namespace kgatt {

ModelParameters init_parameters(const KnowledgeGraph& kg, std::size_t dim, bool use_bias, Rng& rng) {
  if (!kg.indexed()) throw Error("parameters require an indexed graph");
  if (dim == 0) throw Error("embedding dimension must be positive");
  ModelParameters p;
  p.base = Matrix(kg.num_entities(), dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < p.base.rows(); ++i) {
    auto row = p.base.row(i);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& v : row) {
        v = normal(rng);
        norm2 += v * v;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : row) v *= inv;
  }
  p.bias = Matrix(kg.num_entities(), dim, 0.0);
  p.diag = Matrix(kg.num_encoder_relations(), dim, 1.0);
  p.relation = Matrix(kg.num_relations(), dim, 1.0);
  p.attention = init_attention(kg);
  p.use_bias = use_bias;
  return p;
}

void check_dimensions(const ModelParameters& params, const KnowledgeGraph& kg) {
  const std::size_t d = params.dim();
  auto expect = [&](const Matrix& m, std::size_t rows, const char* name) {
    if (m.rows() != rows || m.cols() != d) {
      throw Error(std::string("parameter block '") + name + "' has shape " + std::to_string(m.rows()) + "x" +
                  std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" + std::to_string(d));
    }
  };
  expect(params.base, kg.num_entities(), "base");
  expect(params.bias, kg.num_entities(), "bias");
  expect(params.diag, kg.num_encoder_relations(), "diag");
  expect(params.relation, kg.num_relations(), "relation");
  if (params.attention.values.size() != kg.num_edges()) {
    throw Error("attention has " + std::to_string(params.attention.values.size()) + " entries for " +
                std::to_string(kg.num_edges()) + " edges");
  }
}

DropoutMasks sample_dropout_masks(const ModelParameters& params, const KnowledgeGraph& kg, double embedding_p,
                                  double link_p, Rng& rng) {
  DropoutMasks masks;
  masks.embedding = sample_link_mask(params.base.size(), embedding_p, rng);
  masks.link = sample_link_mask(kg.num_edges(), link_p, rng);
  return masks;
}

void encode_node_into(const ModelParameters& params, const KnowledgeGraph& kg, std::span<const double> coefficients,
                      EntityId node, std::span<double> out, const DropoutMasks* masks) {
  const std::size_t d = params.dim();
  if (params.use_bias) {
    const auto b = params.bias.row(node);
    std::copy(b.begin(), b.end(), out.begin());
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
  const bool link_mask = masks && !masks->link.empty();
  const bool emb_mask = masks && !masks->embedding.empty();
  for (EdgeId e : kg.incoming(node)) {
    const double w = link_mask ? coefficients[e] * masks->link[e] : coefficients[e];
    if (w == 0.0) continue;
    const auto& rec = kg.edge(e);
    const auto src = params.base.row(rec.source());
    const auto rel = params.diag.row(rec.encoder_relation);
    if (emb_mask) {
      const double* m = masks->embedding.data() + static_cast<std::size_t>(rec.source()) * d;
      for (std::size_t k = 0; k < d; ++k) out[k] += w * (src[k] * m[k]) * rel[k];
    } else {
      for (std::size_t k = 0; k < d; ++k) out[k] += w * src[k] * rel[k];
    }
  }
}

Matrix encode_all(const ModelParameters& params, const KnowledgeGraph& kg, std::span<const double> coefficients,
                  const DropoutMasks* masks) {
  check_dimensions(params, kg);
  if (coefficients.size() != kg.num_edges()) throw Error("coefficient count does not match edge count");
  Matrix out(kg.num_entities(), params.dim());
  parallel_for(kg.num_entities(), [&](std::size_t i) {
    encode_node_into(params, kg, coefficients, static_cast<EntityId>(i), out.row(i), masks);
  });
  return out;
}

Matrix encode_all(const ModelParameters& params, const KnowledgeGraph& kg, std::span<const double> coefficients,
                  const EncodeOptions& options, Rng& rng) {
  if (!options.train_mode) return encode_all(params, kg, coefficients);
  const auto masks = sample_dropout_masks(params, kg, options.embedding_dropout, options.link_dropout, rng);
  return encode_all(params, kg, coefficients, &masks);
}

std::vector<double> encode_node(const ModelParameters& params, const KnowledgeGraph& kg,
                                std::span<const double> coefficients, EntityId node) {
  if (node >= kg.num_entities()) throw Error("invalid node id " + std::to_string(node));
  std::vector<double> out(params.dim());
  encode_node_into(params, kg, coefficients, node, out);
  return out;
}

}  // namespace kgatt
