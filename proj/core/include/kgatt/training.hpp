#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kgatt/decoder.hpp"
#include "kgatt/encoder.hpp"
#include "kgatt/graph_store.hpp"

namespace kgatt {

enum class AttentionMode { learned, fixed_uniform };

std::string_view to_string(AttentionMode mode);
AttentionMode parse_attention_mode(std::string_view name);

struct TrainConfig {
  std::size_t dim = 300;
  std::size_t negatives = 10;
  double embedding_dropout = 0.5;
  double link_dropout = 0.5;
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t epochs = 200;
  std::size_t batch_size = 1024;
  std::uint64_t seed = 0;
  DecoderKind decoder = DecoderKind::distmult;
  AttentionMode attention = AttentionMode::learned;
  bool use_bias = true;
  /// Validate every this many epochs (0 disables validation).
  std::size_t validate_every = 1;
  /// Cap on validation triples per check (0 = all).
  std::size_t validation_triples = 0;

  void validate() const;
};

/// Ordered key/value view of a config, used for echoing and hashing.
std::vector<std::pair<std::string, std::string>> to_key_values(const TrainConfig& config);
/// Sets one field from text; returns false for an unknown key.
bool set_config_value(TrainConfig& config, std::string_view key, std::string_view value);
std::string config_fingerprint(const TrainConfig& config);

/// Corrupts subject or object (chosen uniformly) with a uniformly drawn
/// different entity. Negatives are not filtered against known triples.
std::vector<Triple> sample_negatives(const Triple& positive, std::size_t n, std::size_t num_entities, Rng& rng);

inline constexpr double kProbabilityClamp = 1e-12;

/// Mean binary cross-entropy with probabilities clamped to [1e-12, 1 - 1e-12].
double binary_cross_entropy(std::span<const double> probabilities, std::span<const double> labels);

/// The same loss evaluated from scores through softplus, so that log(1 - p)
/// keeps full precision when p is close to one. Scores are clamped to the
/// logits of the probability clamp.
double binary_cross_entropy_from_scores(std::span<const double> scores, std::span<const double> labels);

/// Score range in which the probability clamp does not bind.
bool score_within_clamp(double score);

struct Batch {
  std::vector<Triple> triples;
  std::vector<double> labels;
};

/// Each positive followed by its `negatives` corruptions.
Batch make_batch(std::span<const Triple> positives, std::size_t negatives, std::size_t num_entities, Rng& rng);

struct Gradients {
  Matrix base;
  Matrix bias;
  Matrix diag;
  Matrix relation;
  /// Empty when attention is fixed.
  std::vector<double> attention;
};

struct LossAndGradients {
  double loss = 0.0;
  Gradients gradients;
};

/// Coefficients used by the encoder under `mode`.
std::vector<double> attention_coefficients(const ModelParameters& params, const KnowledgeGraph& kg,
                                           AttentionMode mode);

/// Masked loss only (no gradients).
double batch_loss(const ModelParameters& params, const KnowledgeGraph& kg, const Batch& batch,
                  const TrainConfig& config, const DropoutMasks& masks);

/// Exact gradients of the masked batch loss with respect to every parameter
/// block, including through the attention budget normalization.
LossAndGradients compute_gradients(const ModelParameters& params, const KnowledgeGraph& kg, const Batch& batch,
                                   const TrainConfig& config, const DropoutMasks& masks);

/// Samples dropout masks from `rng` (per the config) and differentiates.
LossAndGradients compute_gradients(const ModelParameters& params, const KnowledgeGraph& kg, const Batch& batch,
                                   const TrainConfig& config, Rng& rng);

class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParameters& params, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);

  /// Applies one update. Attention is left untouched when its gradient is empty.
  void step(ModelParameters& params, const Gradients& grads);

  std::size_t steps() const noexcept { return t_; }

 private:
  struct Moments {
    std::vector<double> m, v;
  };
  void update(std::vector<double>& values, const std::vector<double>& grad, Moments& moments) const;

  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  double correction1_ = 1.0, correction2_ = 1.0;
  Moments base_, bias_, diag_, relation_, attention_;
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  /// NaN when validation did not run this epoch.
  double validation_mrr = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  double wall_seconds = 0.0;
  std::size_t best_epoch = 0;
  std::string snapshot_id;
};

struct TrainResult {
  ModelParameters params;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Trains on kg's positive pool; returns the best-validation snapshot (or the
/// final parameters when there is nothing to validate on).
TrainResult train(const TrainConfig& config, const KnowledgeGraph& kg, const EpochCallback& on_epoch = {});

std::string parameters_fingerprint(const ModelParameters& params);

}  // namespace kgatt
