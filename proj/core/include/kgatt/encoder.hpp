#pragma once

#include <vector>

#include "kgatt/attention.hpp"
#include "kgatt/common.hpp"
#include "kgatt/graph_store.hpp"

namespace kgatt {

/// All trainable state of the single-layer attention GCN and its decoder.
///
/// The layer-0 relation transform is factored as base * diag(diag_r): entity
/// j sends base_j (.) diag_r along an edge of encoder relation r, so
///
///   e_i = bias_i + sum_{(r, j, e) in in(i)} c_e * (base_j (.) diag_r)
struct ModelParameters {
  Matrix base;      ///< N x d, rows initialized to unit L2 norm
  Matrix bias;      ///< N x d
  Matrix diag;      ///< |R_enc| x d
  Matrix relation;  ///< |R| x d decoder relation table
  RawAttention attention;
  bool use_bias = true;

  std::size_t dim() const noexcept { return base.cols(); }

  friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

ModelParameters init_parameters(const KnowledgeGraph& kg, std::size_t dim, bool use_bias, Rng& rng);

/// Throws if parameter shapes disagree with `kg`.
void check_dimensions(const ModelParameters& params, const KnowledgeGraph& kg);

/// Inverted-dropout scale factors. Empty vectors mean "no dropout".
struct DropoutMasks {
  std::vector<double> embedding;  ///< N x d, applied to base rows
  std::vector<double> link;       ///< per edge, applied after normalization
};

DropoutMasks sample_dropout_masks(const ModelParameters& params, const KnowledgeGraph& kg, double embedding_p,
                                  double link_p, Rng& rng);

struct EncodeOptions {
  bool train_mode = false;
  double embedding_dropout = 0.5;
  double link_dropout = 0.5;
};

/// Dropout-free encoding of every entity.
Matrix encode_all(const ModelParameters& params, const KnowledgeGraph& kg, std::span<const double> coefficients,
                  const DropoutMasks* masks = nullptr);

/// In train mode, samples fresh embedding and link masks from `rng`.
Matrix encode_all(const ModelParameters& params, const KnowledgeGraph& kg, std::span<const double> coefficients,
                  const EncodeOptions& options, Rng& rng);

void encode_node_into(const ModelParameters& params, const KnowledgeGraph& kg, std::span<const double> coefficients,
                      EntityId node, std::span<double> out, const DropoutMasks* masks = nullptr);

std::vector<double> encode_node(const ModelParameters& params, const KnowledgeGraph& kg,
                                std::span<const double> coefficients, EntityId node);

}  // namespace kgatt
