#include "kgatt/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "kgatt/attention.hpp"
#include "kgatt/evaluation.hpp"
#include "kgatt/text_io.hpp"

namespace kgatt {

std::string_view to_string(AttentionMode mode) {
  return mode == AttentionMode::learned ? "learned" : "fixed";
}

AttentionMode parse_attention_mode(std::string_view name) {
  if (name == "learned") return AttentionMode::learned;
  if (name == "fixed" || name == "fixed-uniform") return AttentionMode::fixed_uniform;
  throw Error("unknown attention mode '" + std::string(name) + "' (expected learned or fixed)");
}

void TrainConfig::validate() const {
  if (dim == 0) throw Error("dim must be positive");
  if (decoder == DecoderKind::complex && dim % 2 != 0) throw Error("complex decoder requires an even dim");
  if (negatives < 1) throw Error("negatives must be at least 1");
  if (!(embedding_dropout >= 0.0 && embedding_dropout < 1.0)) throw Error("embedding_dropout must lie in [0, 1)");
  if (!(link_dropout >= 0.0 && link_dropout < 1.0)) throw Error("link_dropout must lie in [0, 1)");
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (batch_size == 0) throw Error("batch_size must be positive");
}

std::vector<std::pair<std::string, std::string>> to_key_values(const TrainConfig& c) {
  return {
      {"dim", std::to_string(c.dim)},
      {"negatives", std::to_string(c.negatives)},
      {"embedding_dropout", format_double(c.embedding_dropout)},
      {"link_dropout", format_double(c.link_dropout)},
      {"learning_rate", format_double(c.learning_rate)},
      {"adam_beta1", format_double(c.adam_beta1)},
      {"adam_beta2", format_double(c.adam_beta2)},
      {"adam_epsilon", format_double(c.adam_epsilon)},
      {"epochs", std::to_string(c.epochs)},
      {"batch_size", std::to_string(c.batch_size)},
      {"seed", std::to_string(c.seed)},
      {"decoder", std::string(to_string(c.decoder))},
      {"attention", std::string(to_string(c.attention))},
      {"use_bias", c.use_bias ? "true" : "false"},
      {"validate_every", std::to_string(c.validate_every)},
      {"validation_triples", std::to_string(c.validation_triples)},
  };
}

namespace {

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("invalid boolean '" + std::string(v) + "'");
}

}  // namespace

bool set_config_value(TrainConfig& c, std::string_view key, std::string_view value) {
  if (key == "dim") c.dim = parse_size(value);
  else if (key == "negatives") c.negatives = parse_size(value);
  else if (key == "embedding_dropout") c.embedding_dropout = parse_double(value);
  else if (key == "link_dropout") c.link_dropout = parse_double(value);
  else if (key == "learning_rate") c.learning_rate = parse_double(value);
  else if (key == "adam_beta1") c.adam_beta1 = parse_double(value);
  else if (key == "adam_beta2") c.adam_beta2 = parse_double(value);
  else if (key == "adam_epsilon") c.adam_epsilon = parse_double(value);
  else if (key == "epochs") c.epochs = parse_size(value);
  else if (key == "batch_size") c.batch_size = parse_size(value);
  else if (key == "seed") c.seed = parse_size(value);
  else if (key == "decoder") c.decoder = parse_decoder(value);
  else if (key == "attention") c.attention = parse_attention_mode(value);
  else if (key == "use_bias") c.use_bias = parse_bool(value);
  else if (key == "validate_every") c.validate_every = parse_size(value);
  else if (key == "validation_triples") c.validation_triples = parse_size(value);
  else return false;
  return true;
}

std::string config_fingerprint(const TrainConfig& config) {
  Fingerprint fp;
  for (const auto& [k, v] : to_key_values(config)) {
    fp.add(k);
    fp.add("=");
    fp.add(v);
    fp.add("\n");
  }
  return fp.hex();
}

std::vector<Triple> sample_negatives(const Triple& positive, std::size_t n, std::size_t num_entities, Rng& rng) {
  if (n < 1) throw Error("number of negatives must be at least 1");
  if (num_entities < 2) throw Error("negative sampling needs at least two entities");
  std::vector<Triple> out;
  out.reserve(n);
  std::bernoulli_distribution corrupt_subject(0.5);
  std::uniform_int_distribution<std::size_t> pick(0, num_entities - 2);
  for (std::size_t i = 0; i < n; ++i) {
    Triple t = positive;
    EntityId& slot = corrupt_subject(rng) ? t.subject : t.object;
    // Uniform over the other N-1 entities.
    auto candidate = static_cast<EntityId>(pick(rng));
    if (candidate >= slot) ++candidate;
    slot = candidate;
    out.push_back(t);
  }
  return out;
}

double binary_cross_entropy(std::span<const double> probabilities, std::span<const double> labels) {
  if (probabilities.size() != labels.size()) throw Error("probability/label size mismatch");
  if (probabilities.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = std::clamp(probabilities[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    acc -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return acc / static_cast<double>(probabilities.size());
}

namespace {

// logit(1e-12); the clamp is symmetric so the upper bound is its negation.
const double kScoreClamp = std::log(kProbabilityClamp) - std::log1p(-kProbabilityClamp);

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

bool score_within_clamp(double score) { return score > kScoreClamp && score < -kScoreClamp; }

double binary_cross_entropy_from_scores(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw Error("score/label size mismatch");
  if (scores.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], kScoreClamp, -kScoreClamp);
    // -log p = softplus(-s), -log(1 - p) = softplus(s)
    acc += labels[i] * softplus(-s) + (1.0 - labels[i]) * softplus(s);
  }
  return acc / static_cast<double>(scores.size());
}

Batch make_batch(std::span<const Triple> positives, std::size_t negatives, std::size_t num_entities, Rng& rng) {
  Batch batch;
  batch.triples.reserve(positives.size() * (negatives + 1));
  batch.labels.reserve(batch.triples.capacity());
  for (const auto& pos : positives) {
    batch.triples.push_back(pos);
    batch.labels.push_back(1.0);
    for (const auto& neg : sample_negatives(pos, negatives, num_entities, rng)) {
      batch.triples.push_back(neg);
      batch.labels.push_back(0.0);
    }
  }
  return batch;
}

std::vector<double> attention_coefficients(const ModelParameters& params, const KnowledgeGraph& kg,
                                           AttentionMode mode) {
  if (mode == AttentionMode::fixed_uniform) return uniform_attention(kg).coefficients;
  return normalize(params.attention, kg).coefficients;
}

namespace {

struct ForwardPass {
  std::vector<double> coefficients;
  std::vector<double> budgets;
  std::vector<std::int64_t> slot;  // entity -> row in `embeddings`, or -1
  std::vector<EntityId> nodes;
  Matrix embeddings;
  std::vector<double> scores;
  std::vector<double> probabilities;
  double loss = 0.0;
};

ForwardPass forward(const ModelParameters& params, const KnowledgeGraph& kg, const Batch& batch,
                    const TrainConfig& config, const DropoutMasks& masks) {
  check_dimensions(params, kg);
  if (batch.triples.empty()) throw Error("batch is empty");
  if (config.decoder == DecoderKind::complex && params.dim() % 2 != 0) {
    throw Error("complex decoder requires an even dim");
  }
  ForwardPass fp;
  if (config.attention == AttentionMode::learned) {
    auto norm = normalize(params.attention, kg);
    fp.coefficients = std::move(norm.coefficients);
    fp.budgets = std::move(norm.budgets);
  } else {
    fp.coefficients = uniform_attention(kg).coefficients;
  }
  fp.slot.assign(kg.num_entities(), -1);
  for (const auto& t : batch.triples) {
    for (EntityId v : {t.subject, t.object}) {
      if (fp.slot[v] < 0) {
        fp.slot[v] = static_cast<std::int64_t>(fp.nodes.size());
        fp.nodes.push_back(v);
      }
    }
  }
  fp.embeddings = Matrix(fp.nodes.size(), params.dim());
  for (std::size_t s = 0; s < fp.nodes.size(); ++s) {
    encode_node_into(params, kg, fp.coefficients, fp.nodes[s], fp.embeddings.row(s), &masks);
  }
  fp.scores.resize(batch.triples.size());
  fp.probabilities.resize(batch.triples.size());
  for (std::size_t b = 0; b < batch.triples.size(); ++b) {
    const auto& t = batch.triples[b];
    const double s = score(config.decoder, fp.embeddings.row(fp.slot[t.subject]), params.relation.row(t.relation),
                           fp.embeddings.row(fp.slot[t.object]));
    if (!std::isfinite(s)) throw NumericError("non-finite score in forward pass");
    fp.scores[b] = s;
    fp.probabilities[b] = probability(s);
  }
  fp.loss = binary_cross_entropy_from_scores(fp.scores, batch.labels);
  return fp;
}

void require_finite(const std::vector<double>& values, const char* block) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite gradient in parameter block '") + block + "'");
  }
}

}  // namespace

double batch_loss(const ModelParameters& params, const KnowledgeGraph& kg, const Batch& batch,
                  const TrainConfig& config, const DropoutMasks& masks) {
  return forward(params, kg, batch, config, masks).loss;
}

LossAndGradients compute_gradients(const ModelParameters& params, const KnowledgeGraph& kg, const Batch& batch,
                                   const TrainConfig& config, const DropoutMasks& masks) {
  const auto fp = forward(params, kg, batch, config, masks);
  const std::size_t d = params.dim();
  const bool learned = config.attention == AttentionMode::learned;

  LossAndGradients out;
  out.loss = fp.loss;
  auto& g = out.gradients;
  g.base = Matrix(params.base.rows(), d);
  g.bias = Matrix(params.bias.rows(), d);
  g.diag = Matrix(params.diag.rows(), d);
  g.relation = Matrix(params.relation.rows(), d);
  if (learned) g.attention.assign(kg.num_edges(), 0.0);

  // d loss / d embedding for every entity touched by the batch.
  Matrix d_emb(fp.nodes.size(), d);
  const double inv_n = 1.0 / static_cast<double>(batch.triples.size());
  for (std::size_t b = 0; b < batch.triples.size(); ++b) {
    const double p = fp.probabilities[b];
    if (!score_within_clamp(fp.scores[b])) continue;
    const double upstream = (p - batch.labels[b]) * inv_n;
    const auto& t = batch.triples[b];
    const auto ss = static_cast<std::size_t>(fp.slot[t.subject]);
    const auto so = static_cast<std::size_t>(fp.slot[t.object]);
    accumulate_score_gradient(config.decoder, fp.embeddings.row(ss), params.relation.row(t.relation),
                              fp.embeddings.row(so), upstream, d_emb.row(ss), g.relation.row(t.relation),
                              d_emb.row(so));
  }

  const bool link_mask = !masks.link.empty();
  const bool emb_mask = !masks.embedding.empty();
  std::vector<double> d_coeff;
  for (std::size_t s = 0; s < fp.nodes.size(); ++s) {
    const EntityId node = fp.nodes[s];
    const auto gi = d_emb.row(s);
    if (params.use_bias) {
      auto gb = g.bias.row(node);
      for (std::size_t k = 0; k < d; ++k) gb[k] += gi[k];
    }
    const auto in = kg.incoming(node);
    d_coeff.assign(in.size(), 0.0);
    for (std::size_t idx = 0; idx < in.size(); ++idx) {
      const EdgeId e = in[idx];
      const double lm = link_mask ? masks.link[e] : 1.0;
      const double w = fp.coefficients[e] * lm;
      if (w == 0.0) continue;
      const auto& rec = kg.edge(e);
      const auto src = params.base.row(rec.source());
      const auto rel = params.diag.row(rec.encoder_relation);
      const double* m = emb_mask ? masks.embedding.data() + static_cast<std::size_t>(rec.source()) * d : nullptr;
      auto gsrc = g.base.row(rec.source());
      auto grel = g.diag.row(rec.encoder_relation);
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double mk = m ? m[k] : 1.0;
        const double src_masked = src[k] * mk;
        dot += gi[k] * src_masked * rel[k];
        gsrc[k] += w * gi[k] * mk * rel[k];
        grel[k] += w * gi[k] * src_masked;
      }
      d_coeff[idx] = dot * lm;
    }
    if (learned && fp.budgets[node] > 0.0) {
      // c_e = |a_e| / S  =>  dL/d|a_e| = (g_e - sum_f g_f c_f) / S.
      double weighted = 0.0;
      for (std::size_t idx = 0; idx < in.size(); ++idx) weighted += d_coeff[idx] * fp.coefficients[in[idx]];
      const double inv_budget = 1.0 / fp.budgets[node];
      for (std::size_t idx = 0; idx < in.size(); ++idx) {
        const EdgeId e = in[idx];
        const double raw = params.attention.values[e];
        const double sign = raw > 0.0 ? 1.0 : (raw < 0.0 ? -1.0 : 0.0);
        g.attention[e] += sign * (d_coeff[idx] - weighted) * inv_budget;
      }
    }
  }

  require_finite(g.base.values(), "base");
  require_finite(g.bias.values(), "bias");
  require_finite(g.diag.values(), "diag");
  require_finite(g.relation.values(), "relation");
  require_finite(g.attention, "attention");
  return out;
}

LossAndGradients compute_gradients(const ModelParameters& params, const KnowledgeGraph& kg, const Batch& batch,
                                   const TrainConfig& config, Rng& rng) {
  const auto masks = sample_dropout_masks(params, kg, config.embedding_dropout, config.link_dropout, rng);
  return compute_gradients(params, kg, batch, config, masks);
}

AdamOptimizer::AdamOptimizer(const ModelParameters& params, double learning_rate, double beta1, double beta2,
                             double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  auto init = [](Moments& m, std::size_t n) {
    m.m.assign(n, 0.0);
    m.v.assign(n, 0.0);
  };
  init(base_, params.base.size());
  init(bias_, params.bias.size());
  init(diag_, params.diag.size());
  init(relation_, params.relation.size());
  init(attention_, params.attention.values.size());
}

void AdamOptimizer::update(std::vector<double>& values, const std::vector<double>& grad, Moments& mo) const {
  const double step = lr_ / correction1_;
  const double inv_c2 = 1.0 / correction2_;
  for (std::size_t i = 0; i < values.size(); ++i) {
    mo.m[i] = beta1_ * mo.m[i] + (1.0 - beta1_) * grad[i];
    mo.v[i] = beta2_ * mo.v[i] + (1.0 - beta2_) * grad[i] * grad[i];
    values[i] -= step * mo.m[i] / (std::sqrt(mo.v[i] * inv_c2) + eps_);
  }
}

void AdamOptimizer::step(ModelParameters& params, const Gradients& grads) {
  ++t_;
  correction1_ = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  correction2_ = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  update(params.base.values(), grads.base.values(), base_);
  if (params.use_bias) update(params.bias.values(), grads.bias.values(), bias_);
  update(params.diag.values(), grads.diag.values(), diag_);
  update(params.relation.values(), grads.relation.values(), relation_);
  if (!grads.attention.empty()) update(params.attention.values, grads.attention, attention_);
}

std::string parameters_fingerprint(const ModelParameters& params) {
  Fingerprint fp;
  fp.add(params.base.values());
  fp.add(params.bias.values());
  fp.add(params.diag.values());
  fp.add(params.relation.values());
  fp.add(params.attention.values);
  const char bias = params.use_bias ? 1 : 0;
  fp.add(&bias, 1);
  return fp.hex();
}

TrainResult train(const TrainConfig& config, const KnowledgeGraph& kg, const EpochCallback& on_epoch) {
  config.validate();
  if (!kg.indexed()) throw Error("training requires an indexed graph");
  const auto pool = kg.positive_pool();
  if (pool.empty()) throw Error("positive pool is empty: every edge is adjacency-only or the graph has no edges");

  const auto start = std::chrono::steady_clock::now();
  Rng rng(config.seed);
  TrainResult result;
  result.params = init_parameters(kg, config.dim, config.use_bias, rng);
  auto& params = result.params;
  AdamOptimizer adam(params, config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_epsilon);

  const bool can_validate = config.validate_every > 0 && !kg.split(Split::valid).empty();
  ModelParameters best;
  double best_mrr = -1.0;

  std::vector<std::size_t> order(pool.size());
  std::vector<Triple> positives;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      positives.clear();
      for (std::size_t i = begin; i < end; ++i) positives.push_back(pool[order[i]]);
      const auto batch = make_batch(positives, config.negatives, kg.num_entities(), rng);
      const auto lg = compute_gradients(params, kg, batch, config, rng);
      adam.step(params, lg.gradients);
      loss_sum += lg.loss * static_cast<double>(end - begin);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(pool.size());
    stats.validation_mrr = std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(stats.loss)) throw NumericError("training loss became non-finite");
    if (can_validate && (epoch % config.validate_every == 0 || epoch == config.epochs)) {
      const auto coeff = attention_coefficients(params, kg, config.attention);
      EvalOptions opts;
      opts.max_triples = config.validation_triples;
      stats.validation_mrr = evaluate(params, kg, Split::valid, config.decoder, coeff, opts).mrr_filtered;
      if (stats.validation_mrr > best_mrr) {
        best_mrr = stats.validation_mrr;
        best = params;
        result.report.best_epoch = epoch;
      }
    }
    result.report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  if (best_mrr >= 0.0) {
    params = std::move(best);
  } else {
    result.report.best_epoch = config.epochs;
  }
  result.report.snapshot_id = parameters_fingerprint(params);
  result.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace kgatt
