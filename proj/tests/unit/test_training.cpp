#include <gtest/gtest.h>

#include <cmath>

#include "kgatt/attention.hpp"
#include "kgatt/evaluation.hpp"
#include "kgatt/training.hpp"
#include "test_graphs.hpp"

namespace kgatt {
namespace {

using testing::make_graph;
using testing::random_graph;

ModelParameters perturbed_params(const KnowledgeGraph& kg, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  auto p = init_parameters(kg, d, true, rng);
  std::normal_distribution<double> normal(0.0, 0.5);
  for (auto& v : p.bias.values()) v = normal(rng);
  for (auto& v : p.diag.values()) v += normal(rng);
  for (auto& v : p.relation.values()) v += normal(rng);
  // Keep raw attention away from zero so |a| is differentiable at the probe.
  for (auto& v : p.attention.values) v = (uniform_unit(rng) < 0.3 ? -1.0 : 1.0) * (0.2 + uniform_unit(rng));
  return p;
}

TEST(Negatives, CorruptExactlyOneSlot) {
  Rng rng(1);
  const Triple pos{3, 1, 7};
  const auto negs = sample_negatives(pos, 10, 20, rng);
  ASSERT_EQ(negs.size(), 10u);
  for (const auto& n : negs) {
    EXPECT_EQ(n.relation, pos.relation);
    const int changed = (n.subject != pos.subject) + (n.object != pos.object);
    EXPECT_EQ(changed, 1);
    EXPECT_LT(n.subject, 20u);
    EXPECT_LT(n.object, 20u);
  }
}

TEST(Negatives, TwoEntitiesForceTheOtherOne) {
  Rng rng(2);
  for (const auto& n : sample_negatives(Triple{0, 0, 1}, 50, 2, rng)) {
    EXPECT_TRUE((n == Triple{1, 0, 1}) || (n == Triple{0, 0, 0}));
  }
}

TEST(Negatives, DeterministicUnderSeed) {
  Rng a(9), b(9);
  EXPECT_EQ(sample_negatives(Triple{1, 0, 2}, 30, 100, a), sample_negatives(Triple{1, 0, 2}, 30, 100, b));
}

TEST(Negatives, InvalidArgumentsThrow) {
  Rng rng(1);
  EXPECT_THROW(sample_negatives(Triple{0, 0, 0}, 3, 1, rng), Error);
  EXPECT_THROW(sample_negatives(Triple{0, 0, 1}, 0, 5, rng), Error);
}

TEST(Negatives, UniformOverOtherEntities) {
  Rng rng(3);
  std::vector<int> counts(5, 0);
  const Triple pos{0, 0, 0};
  for (const auto& n : sample_negatives(pos, 40000, 5, rng)) ++counts[n.subject != 0 ? n.subject : n.object];
  EXPECT_EQ(counts[0], 0);
  for (int e = 1; e < 5; ++e) EXPECT_NEAR(counts[e] / 40000.0, 0.25, 0.01);
}

TEST(Batch, PositiveThenItsNegatives) {
  Rng rng(4);
  const std::vector<Triple> pos{{0, 0, 1}, {2, 0, 3}};
  const auto batch = make_batch(pos, 3, 10, rng);
  ASSERT_EQ(batch.triples.size(), 8u);
  EXPECT_EQ(batch.triples[0], pos[0]);
  EXPECT_EQ(batch.triples[4], pos[1]);
  EXPECT_EQ(batch.labels, (std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0}));
}

TEST(Loss, HandValues) {
  EXPECT_NEAR(binary_cross_entropy(std::vector<double>{0.5}, std::vector<double>{1.0}), std::log(2.0), 1e-15);
  EXPECT_NEAR(binary_cross_entropy(std::vector<double>{0.5}, std::vector<double>{0.0}), std::log(2.0), 1e-15);
  EXPECT_LT(binary_cross_entropy(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 0.0}), 1e-11);
  EXPECT_NEAR(binary_cross_entropy(std::vector<double>{0.0}, std::vector<double>{1.0}), -std::log(1e-12), 1e-9);
}

TEST(Loss, MatchesScalarLoop) {
  Rng rng(5);
  std::vector<double> p(50), y(50);
  double oracle = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = 0.01 + 0.98 * uniform_unit(rng);
    y[i] = uniform_unit(rng) < 0.5 ? 1.0 : 0.0;
    oracle += y[i] == 1.0 ? -std::log(p[i]) : -std::log(1.0 - p[i]);
  }
  EXPECT_NEAR(binary_cross_entropy(p, y), oracle / 50.0, 1e-13);
}

TEST(Loss, ScoreFormMatchesProbabilityForm) {
  const std::vector<double> scores{-12.0, -3.0, -0.2, 0.0, 0.7, 5.0, 12.0};
  for (double y : {0.0, 1.0}) {
    for (double s : scores) {
      const std::vector<double> label{y}, score{s}, prob{probability(s)};
      const double a = binary_cross_entropy_from_scores(score, label);
      const double b = binary_cross_entropy(prob, label);
      EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, b)) << "s=" << s << " y=" << y;
    }
  }
  // Where the clamp binds the loss is exactly -log(1e-12); the probability
  // form cannot represent 1 - 1e-12 exactly, so compare with the constant.
  for (double s : {30.0, 40.0}) {
    EXPECT_NEAR(binary_cross_entropy_from_scores(std::vector<double>{s}, std::vector<double>{0.0}), -std::log(1e-12),
                1e-12);
    EXPECT_NEAR(binary_cross_entropy_from_scores(std::vector<double>{-s}, std::vector<double>{1.0}), -std::log(1e-12),
                1e-12);
  }
  EXPECT_FALSE(score_within_clamp(40.0));
  EXPECT_FALSE(score_within_clamp(-40.0));
  EXPECT_TRUE(score_within_clamp(27.0));
}

double max_relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1.0, std::max(std::abs(analytic), std::abs(numeric)));
}

/// Central differences over every scalar of every block.
void check_gradients(const KnowledgeGraph& kg, ModelParameters params, const TrainConfig& config,
                     std::uint64_t seed) {
  Rng rng(seed);
  auto pos = kg.positive_pool();
  pos.resize(std::min<std::size_t>(pos.size(), 6));
  const auto batch = make_batch(pos, config.negatives, kg.num_entities(), rng);
  const auto masks = sample_dropout_masks(params, kg, config.embedding_dropout, config.link_dropout, rng);
  const auto lg = compute_gradients(params, kg, batch, config, masks);
  EXPECT_NEAR(lg.loss, batch_loss(params, kg, batch, config, masks), 1e-15);

  const double h = 1e-5;
  auto probe = [&](std::vector<double>& values, const std::vector<double>& grad, const char* name) {
    ASSERT_EQ(values.size(), grad.size()) << name;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double keep = values[i];
      values[i] = keep + h;
      const double up = batch_loss(params, kg, batch, config, masks);
      values[i] = keep - h;
      const double down = batch_loss(params, kg, batch, config, masks);
      values[i] = keep;
      const double numeric = (up - down) / (2 * h);
      EXPECT_LT(max_relative_error(grad[i], numeric), 1e-5) << name << "[" << i << "] " << grad[i] << " vs " << numeric;
    }
  };
  probe(params.base.values(), lg.gradients.base.values(), "base");
  probe(params.bias.values(), lg.gradients.bias.values(), "bias");
  probe(params.diag.values(), lg.gradients.diag.values(), "diag");
  probe(params.relation.values(), lg.gradients.relation.values(), "relation");
  if (config.attention == AttentionMode::learned) {
    probe(params.attention.values, lg.gradients.attention, "attention");
  } else {
    EXPECT_TRUE(lg.gradients.attention.empty());
  }
}

TEST(Gradients, MatchFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (auto decoder : {DecoderKind::distmult, DecoderKind::complex}) {
      for (bool inverse : {false, true}) {
        const auto kg = random_graph(8, 2, 14, seed, inverse);
        TrainConfig config;
        config.dim = 4;
        config.negatives = 2;
        config.decoder = decoder;
        check_gradients(kg, perturbed_params(kg, config.dim, seed * 31), config, seed);
      }
    }
  }
}

TEST(Gradients, MatchFiniteDifferencesWithoutDropout) {
  const auto kg = random_graph(10, 3, 20, 7);
  TrainConfig config;
  config.dim = 6;
  config.negatives = 3;
  config.embedding_dropout = 0.0;
  config.link_dropout = 0.0;
  check_gradients(kg, perturbed_params(kg, config.dim, 70), config, 7);
}

TEST(Gradients, FixedAttentionHasNoAttentionGradient) {
  const auto kg = random_graph(8, 2, 14, 4);
  TrainConfig config;
  config.dim = 4;
  config.negatives = 2;
  config.attention = AttentionMode::fixed_uniform;
  check_gradients(kg, perturbed_params(kg, config.dim, 40), config, 4);
}

TEST(Gradients, ZeroRawAttentionReceivesZeroGradient) {
  const auto kg = make_graph({{"a", "r", "hub"}, {"b", "r", "hub"}, {"hub", "r", "c"}}, false);
  TrainConfig config;
  config.dim = 4;
  config.negatives = 2;
  config.embedding_dropout = 0.0;
  config.link_dropout = 0.0;
  auto params = perturbed_params(kg, config.dim, 5);
  override_edge(params.attention, 0, 0.0);
  Rng rng(5);
  const auto batch = make_batch(kg.positive_pool(), config.negatives, kg.num_entities(), rng);
  const auto lg = compute_gradients(params, kg, batch, config, rng);
  EXPECT_EQ(lg.gradients.attention[0], 0.0);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  const auto kg = make_graph({{"a", "r", "b"}}, false);
  Rng rng(1);
  auto params = init_parameters(kg, 2, true, rng);
  const auto before = params;
  Gradients g{Matrix(2, 2), Matrix(2, 2), Matrix(1, 2), Matrix(1, 2), {}};
  g.base(0, 0) = 3.0;
  g.relation(0, 1) = -0.5;
  AdamOptimizer adam(params, 0.01);
  adam.step(params, g);
  EXPECT_NEAR(params.base(0, 0), before.base(0, 0) - 0.01, 1e-9);
  EXPECT_NEAR(params.relation(0, 1), before.relation(0, 1) + 0.01, 1e-9);
  EXPECT_EQ(params.base(1, 1), before.base(1, 1));
  EXPECT_EQ(params.attention.values, before.attention.values);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Config, KeyValuesRoundTrip) {
  TrainConfig c;
  c.dim = 12;
  c.decoder = DecoderKind::complex;
  c.attention = AttentionMode::fixed_uniform;
  c.link_dropout = 0.25;
  TrainConfig back;
  for (const auto& [k, v] : to_key_values(c)) EXPECT_TRUE(set_config_value(back, k, v)) << k;
  EXPECT_EQ(config_fingerprint(back), config_fingerprint(c));
  EXPECT_FALSE(set_config_value(back, "nonsense", "1"));
  EXPECT_NE(config_fingerprint(TrainConfig{}), config_fingerprint(c));
}

TEST(Config, Validation) {
  TrainConfig c;
  c.decoder = DecoderKind::complex;
  c.dim = 3;
  EXPECT_THROW(c.validate(), Error);
  c.dim = 4;
  c.link_dropout = 1.0;
  EXPECT_THROW(c.validate(), Error);
}

TrainConfig small_config() {
  TrainConfig c;
  c.dim = 8;
  c.negatives = 4;
  c.epochs = 200;
  c.batch_size = 8;
  c.seed = 3;
  return c;
}

TEST(Train, LossDecreasesOnToyGraph) {
  const auto kg = random_graph(12, 2, 20, 21);
  std::vector<double> losses;
  train(small_config(), kg, [&](const EpochStats& s) { losses.push_back(s.loss); });
  ASSERT_EQ(losses.size(), 200u);
  EXPECT_LT(losses.back(), losses.front());
}

TEST(Train, SameSeedSameParameters) {
  const auto kg = random_graph(12, 2, 20, 22);
  auto c = small_config();
  c.epochs = 5;
  const auto a = train(c, kg);
  const auto b = train(c, kg);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.report.snapshot_id, b.report.snapshot_id);
  c.seed = 4;
  EXPECT_NE(train(c, kg).params, a.params);
}

TEST(Train, EmptyPoolThrows) {
  auto kg = make_graph({{"a", "r", "b"}});
  mark_adjacency_only(kg, std::vector<EdgeId>{0});
  EXPECT_THROW(train(small_config(), kg), Error);
}

TEST(Train, KeepsBestValidationSnapshot) {
  auto kg = random_graph(15, 2, 40, 23);
  kg.split(Split::valid) = {kg.split(Split::train)[0], kg.split(Split::train)[1]};
  auto c = small_config();
  c.epochs = 20;
  double best = -1.0;
  std::size_t best_epoch = 0;
  const auto result = train(c, kg, [&](const EpochStats& s) {
    if (s.validation_mrr > best) {
      best = s.validation_mrr;
      best_epoch = s.epoch;
    }
  });
  EXPECT_EQ(result.report.best_epoch, best_epoch);
  const auto coeff = attention_coefficients(result.params, kg, c.attention);
  EXPECT_DOUBLE_EQ(evaluate(result.params, kg, Split::valid, c.decoder, coeff).mrr_filtered, best);
}

}  // namespace
}  // namespace kgatt
