#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nmt/autodiff/gradcheck.hpp"
#include "nmt/objectives/objectives.hpp"

using namespace nmt;
using namespace nmt::objectives;
using ad::Tensor;

namespace {

Tensor col(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor::from_values({n, 1}, std::move(v));
}

Tensor random_probs(std::size_t m, std::size_t k, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> v(m * k);
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < k; ++c) s += v[r * k + c] = u(g);
    for (std::size_t c = 0; c < k; ++c) v[r * k + c] /= s;
  }
  return Tensor::from_values({m, k}, v);
}

std::vector<int> random_labels(std::size_t m, std::size_t k, std::mt19937_64& g) {
  std::uniform_int_distribution<int> u(0, static_cast<int>(k) - 1);
  std::vector<int> c(m);
  for (int& x : c) x = u(g);
  return c;
}

// Direct evaluation of the concordance formula, written independently of the
// library (two-pass, population moments).
double ccc_oracle(const std::vector<double>& p, const std::vector<double>& t) {
  const double n = static_cast<double>(p.size());
  double mp = 0, mt = 0;
  for (double v : p) mp += v / n;
  for (double v : t) mt += v / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sxy += (p[i] - mp) * (t[i] - mt) / n;
    sxx += (p[i] - mp) * (p[i] - mp) / n;
    syy += (t[i] - mt) * (t[i] - mt) / n;
  }
  return 2 * sxy / std::max(sxx + syy + (mp - mt) * (mp - mt), 1e-12);
}

Scores make_scores(std::vector<double> joint, std::vector<double> x, std::vector<std::vector<double>> y) {
  Scores s{col(std::move(joint)), col(std::move(x)), {}};
  for (auto& v : y) s.y.push_back(col(std::move(v)));
  return s;
}

Scores random_scores(std::size_t m, std::size_t streams, std::mt19937_64& g) {
  std::normal_distribution<double> n(0, 1.5);
  auto draw = [&] {
    std::vector<double> v(m);
    for (double& x : v) x = n(g);
    return v;
  };
  std::vector<std::vector<double>> y;
  for (std::size_t i = 0; i < streams; ++i) y.push_back(draw());
  return make_scores(draw(), draw(), y);
}

double batch_mean(const Tensor& t, double (*f)(double)) {
  double s = 0;
  for (double v : t.values()) s += f(v);
  return s / static_cast<double>(t.numel());
}

}  // namespace

TEST(CrossEntropy, PerfectPredictionIsZero) {
  Tensor p = Tensor::from_values({2, 3}, {1, 0, 0, 0, 0, 1});
  EXPECT_NEAR(cross_entropy(p, p).item(), 0.0, 1e-15);
}

TEST(CrossEntropy, UniformTenClasses) {
  Tensor p = Tensor::full({1, 10}, 0.1);
  EXPECT_NEAR(cross_entropy(p, models::one_hot(std::vector<int>{3}, 10)).item(), 2.302585092994046, 1e-12);
}

TEST(CrossEntropy, HandComputedExample) {
  Tensor p = Tensor::from_values({1, 3}, {0.7, 0.2, 0.1});
  EXPECT_NEAR(cross_entropy(p, models::one_hot(std::vector<int>{0}, 3)).item(), 0.35667494393873245, 1e-12);
}

TEST(CrossEntropy, FloorAppliesToZeroProbability) {
  Tensor p = Tensor::from_values({1, 2}, {1.0, 0.0});
  EXPECT_NEAR(cross_entropy(p, models::one_hot(std::vector<int>{1}, 2)).item(), -std::log(1e-12), 1e-9);
}

TEST(CrossEntropy, RejectsUnnormalisedRows) {
  Tensor p = Tensor::from_values({1, 3}, {0.7, 0.7, 0.1});
  EXPECT_THROW(cross_entropy(p, models::one_hot(std::vector<int>{0}, 3)), std::invalid_argument);
}

TEST(CrossEntropy, MatchesBruteForceOnRandomBatches) {
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + g() % 40, k = 2 + g() % 9;
    Tensor p = random_probs(m, k, g);
    auto c = random_labels(m, k, g);
    double ref = 0;
    for (std::size_t r = 0; r < m; ++r) ref -= std::log(std::max(p.at(r, static_cast<std::size_t>(c[r])), 1e-12));
    ref /= static_cast<double>(m);
    EXPECT_NEAR(cross_entropy(p, models::one_hot(c, k)).item(), ref, 1e-9);
  }
}

TEST(Ccc, IdenticalSeriesGiveOne) {
  EXPECT_NEAR(ccc(col({0.1, -0.5, 0.9}), col({0.1, -0.5, 0.9})).item(), 1.0, 1e-12);
}

TEST(Ccc, ConstantPredictionGivesZero) {
  EXPECT_NEAR(ccc(col({0.3, 0.3, 0.3}), col({0.1, -0.5, 0.9})).item(), 0.0, 1e-15);
}

TEST(Ccc, WorkedExampleMatchesFormula) {
  const std::vector<double> p{0.1, 0.4, 0.5}, t{0.0, 0.5, 0.4};
  // means 1/3 and 0.3; cov 0.0333..., var_p 0.0688..., var_t 0.0466...
  const double mp = 1.0 / 3, mt = 0.3;
  const double cov = ((0.1 - mp) * (0.0 - mt) + (0.4 - mp) * (0.5 - mt) + (0.5 - mp) * (0.4 - mt)) / 3;
  const double vp = ((0.1 - mp) * (0.1 - mp) + (0.4 - mp) * (0.4 - mp) + (0.5 - mp) * (0.5 - mp)) / 3;
  const double vt = ((0.0 - mt) * (0.0 - mt) + (0.5 - mt) * (0.5 - mt) + (0.4 - mt) * (0.4 - mt)) / 3;
  const double expect = 2 * cov / (vp + vt + (mp - mt) * (mp - mt));
  EXPECT_NEAR(ccc(col(p), col(t)).item(), expect, 1e-12);
  EXPECT_NEAR(ccc_value(p, t), expect, 1e-12);
}

TEST(Ccc, MatchesBruteForceOnRandomBatches) {
  std::mt19937_64 g(2);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + g() % 50;
    std::vector<double> p(m), t(m);
    const double shift = n(g), scale = std::exp(n(g));
    for (std::size_t i = 0; i < m; ++i) {
      t[i] = n(g);
      p[i] = shift + scale * (0.6 * t[i] + 0.8 * n(g));
    }
    const double ref = ccc_oracle(p, t);
    EXPECT_NEAR(ccc(col(p), col(t)).item(), ref, 1e-9);
    EXPECT_NEAR(ccc_value(p, t), ref, 1e-9);
  }
}

TEST(Ccc, IsSymmetric) {
  std::mt19937_64 g(3);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> p(17), t(17);
    for (auto& v : p) v = n(g);
    for (auto& v : t) v = n(g) + 0.5;
    EXPECT_NEAR(ccc_value(p, t), ccc_value(t, p), 1e-14);
  }
}

TEST(Ccc, NeedsTwoSamples) {
  EXPECT_THROW(ccc(col({0.1}), col({0.2})), std::invalid_argument);
  EXPECT_THROW(ccc_value(std::vector<double>{0.1}, std::vector<double>{0.2}), std::invalid_argument);
}

TEST(SimilarityLoss, PerfectAndAntiConcordant) {
  Tensor t = Tensor::from_values({4, 2}, {0.5, -0.2, -0.5, 0.2, 0.3, -0.6, -0.3, 0.6});
  EXPECT_NEAR(similarity_loss(t, t).item(), 0.0, 1e-12);
  EXPECT_NEAR(similarity_loss(ad::neg(t), t).item(), 2.0, 1e-12);
}

TEST(SimilarityLoss, ComposesPerDimensionOracle) {
  std::mt19937_64 g(4);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> p(16), t(16);
  for (auto& v : p) v = n(g);
  for (auto& v : t) v = n(g);
  std::vector<double> p0, p1, t0, t1;
  for (std::size_t i = 0; i < 8; ++i) {
    p0.push_back(p[2 * i]);
    p1.push_back(p[2 * i + 1]);
    t0.push_back(t[2 * i]);
    t1.push_back(t[2 * i + 1]);
  }
  const double ref = 1 - (ccc_oracle(p0, t0) + ccc_oracle(p1, t1)) / 2;
  EXPECT_NEAR(similarity_loss(Tensor::from_values({8, 2}, p), Tensor::from_values({8, 2}, t)).item(), ref, 1e-9);
  double sq = 0;
  for (std::size_t i = 0; i < 16; ++i) sq += (p[i] - t[i]) * (p[i] - t[i]);
  EXPECT_NEAR(similarity_loss(Tensor::from_values({8, 2}, p), Tensor::from_values({8, 2}, t), SimilarityKind::mse).item(),
              sq / 16, 1e-12);
}

TEST(Hinge, WorkedValues) {
  EXPECT_EQ(hinge_g(1.0), 0.0);
  EXPECT_EQ(hinge_g(0.0), -1.0);
  EXPECT_EQ(hinge_g(2.0), 0.0);
  EXPECT_EQ(hinge_h(-1.0), 0.0);
  EXPECT_EQ(hinge_h(0.0), -1.0);
  EXPECT_EQ(hinge_h(-2.0), 0.0);
  EXPECT_EQ(h_hat(0.37), -0.37);
}

TEST(Hinge, MatchesFormulasOnDenseGrid) {
  std::vector<double> z;
  for (int i = 0; i <= 6000; ++i) z.push_back(-3.0 + i * 1e-3);
  Tensor zt = Tensor::from_values({z.size()}, z);
  Tensor tg = hinge_g(zt), th = hinge_h(zt), thh = h_hat(zt);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double gz = z[i] - 1 < 0 ? z[i] - 1 : 0.0;
    const double hz = -z[i] - 1 < 0 ? -z[i] - 1 : 0.0;
    EXPECT_NEAR(hinge_g(z[i]), gz, 1e-15);
    EXPECT_NEAR(hinge_h(z[i]), hz, 1e-15);
    EXPECT_EQ(h_hat(z[i]), -z[i]);
    EXPECT_NEAR(tg.values()[i], gz, 1e-15);
    EXPECT_NEAR(th.values()[i], hz, 1e-15);
    EXPECT_EQ(thh.values()[i], -z[i]);
  }
}

TEST(DiscriminatorObjective, SaturatedSeparationIsZero) {
  Scores e = make_scores({1.0, 2.5}, {1.2, 3.0}, {{1.0, 1.1}, {5.0, 1.0}});
  Scores d = make_scores({-1.0, -4.0}, {-1.5, -1.0}, {{-1.0, -2.0}, {-1.0, -1.3}});
  EXPECT_EQ(discriminator_objective(e, d, {}).item(), 0.0);
}

TEST(DiscriminatorObjective, AllZeroScores) {
  Scores z = make_scores({0, 0}, {0, 0}, {{0, 0}, {0, 0}, {0, 0}});
  // joint + x + three y streams
  EXPECT_EQ(discriminator_objective(z, z, {}).item(), -2.0 * 5);
  EXPECT_EQ(discriminator_objective(z, z, {true, false, false}).item(), -2.0 * 4);
  EXPECT_EQ(discriminator_objective(z, z, {false, true, false}).item(), -2.0);
}

TEST(DiscriminatorObjective, JointOnlyMatchesHandEvaluation) {
  std::mt19937_64 g(5);
  Scores e = random_scores(9, 2, g), d = random_scores(9, 2, g);
  const double ref = batch_mean(e.joint, hinge_g) + batch_mean(d.joint, hinge_h);
  EXPECT_NEAR(discriminator_objective(e, d, {false, true, false}).item(), ref, 1e-12);
}

TEST(DiscriminatorObjective, NonPositiveAndZeroOnlyWhenSeparated) {
  std::mt19937_64 g(6);
  for (int trial = 0; trial < 50; ++trial) {
    Scores e = random_scores(5, 3, g), d = random_scores(5, 3, g);
    const double v = discriminator_objective(e, d, {}).item();
    EXPECT_LE(v, 0.0);
    bool separated = true;
    for (std::size_t i = 0; i < score_count(e); ++i) {
      for (double s : score_at(e, i).values()) separated &= s >= 1;
      for (double s : score_at(d, i).values()) separated &= s <= -1;
    }
    EXPECT_EQ(v == 0.0, separated);
  }
}

TEST(DiscriminatorObjective, BothFamiliesDisabledIsAnError) {
  std::mt19937_64 g(7);
  Scores e = random_scores(3, 1, g);
  EXPECT_THROW(discriminator_objective(e, e, {true, true, false}), std::invalid_argument);
}

TEST(GeneratorObjective, LambdaZeroIsSupervisedLoss) {
  std::mt19937_64 g(8);
  Scores e = random_scores(6, 2, g), d = random_scores(6, 2, g);
  EXPECT_EQ(generator_objective(Tensor::scalar(1.234), e, d, 0.0, {}).item(), 1.234);
}

TEST(GeneratorObjective, EqualScoresCancel) {
  std::mt19937_64 g(9);
  Scores e = random_scores(6, 2, g);
  EXPECT_NEAR(generator_objective(Tensor::scalar(0.5), e, e, 0.8, {}).item(), 0.5, 1e-12);
}

TEST(GeneratorObjective, HandComputedJointExample) {
  Scores e = make_scores({0.3}, {9.0}, {});
  Scores d = make_scores({-0.2}, {-9.0}, {});
  EXPECT_NEAR(generator_objective(Tensor::scalar(1.0), e, d, 0.8, {false, true, false}).item(), 1.4, 1e-12);
}

TEST(GeneratorObjective, DependsOnlyOnMeanDifferences) {
  std::mt19937_64 g(10);
  for (int trial = 0; trial < 20; ++trial) {
    Scores e = random_scores(7, 3, g), d = random_scores(7, 3, g);
    AblationFlags f{trial % 3 == 1, trial % 3 == 2, false};
    double ref = 0;
    for (std::size_t i : active_scores(e, f))
      ref += batch_mean(score_at(e, i), [](double v) { return v; }) - batch_mean(score_at(d, i), [](double v) { return v; });
    EXPECT_NEAR(generator_adversarial(e, d, f).item(), ref, 1e-12);
    EXPECT_NEAR(generator_objective(Tensor::scalar(0.25), e, d, 0.6, f).item(), 0.25 + 0.6 * ref, 1e-12);
  }
}

TEST(GeneratorObjective, NegativeLambdaIsRejected) {
  std::mt19937_64 g(11);
  Scores e = random_scores(3, 1, g);
  EXPECT_THROW(generator_objective(Tensor::scalar(0), e, e, -0.1, {}), std::invalid_argument);
}

TEST(LossBreakdown, TotalsAreConsistent) {
  std::mt19937_64 g(12);
  std::vector<models::TaskSpec> tasks{models::TaskSpec::discrete(4), models::TaskSpec::continuous(2),
                                      models::TaskSpec::discrete(4)};
  std::vector<Tensor> preds{random_probs(8, 4, g), Tensor::from_values({8, 2}, std::vector<double>(16, 0.0)),
                            random_probs(8, 4, g)};
  std::normal_distribution<double> n(0, 0.5);
  std::vector<double> pc(16), tc(16);
  for (auto& v : pc) v = std::tanh(n(g));
  for (auto& v : tc) v = std::tanh(n(g));
  preds[1] = Tensor::from_values({8, 2}, pc);
  std::vector<Tensor> targets{models::one_hot(random_labels(8, 4, g), 4), Tensor::from_values({8, 2}, tc),
                              models::one_hot(random_labels(8, 4, g), 4)};
  LossBreakdown bd;
  const double gamma = 0.7;
  const double f = supervised_loss(preds, targets, tasks, gamma, SimilarityKind::ccc, &bd).item();
  ASSERT_EQ(bd.ce_per_discrete_task.size(), 2u);
  ASSERT_EQ(bd.sim_per_continuous_task.size(), 1u);
  EXPECT_NEAR(bd.f_total, bd.ce_per_discrete_task[0] + bd.ce_per_discrete_task[1] + gamma * bd.sim_per_continuous_task[0], 1e-9);
  EXPECT_NEAR(f, bd.f_total, 1e-9);

  Scores e = random_scores(8, 3, g), d = random_scores(8, 3, g);
  const AblationFlags flags{};
  const double lambda = 0.8;
  const double total = generator_objective(Tensor::scalar(f), e, d, lambda, flags).item();
  double adv = 0;
  for (const auto& t : score_terms(e, d, flags))
    if (t.active) adv += t.generator;
  EXPECT_NEAR(total, bd.f_total + lambda * adv, 1e-9);
}

// Full objectives through the three networks on a 16-sample batch.
class FullObjectiveGradient : public ::testing::Test {
 protected:
  void SetUp() override {
    shapes.input_dim = 5;
    shapes.latent_dim = 3;
    shapes.tasks = {models::TaskSpec::discrete(4), models::TaskSpec::discrete(4), models::TaskSpec::continuous(2)};
    shapes.encoder_hidden = {10, 8};
    shapes.decoder_hidden = {9};
    shapes.stream_hidden = {7};
    shapes.stream_embed = 6;
    shapes.joint_hidden = {8};
    m = models::Models::create(shapes, 3);
    std::mt19937_64 g(4);
    std::normal_distribution<double> n(0, 1);
    std::vector<double> xv(16 * 5), y0(16 * 3), cv(16 * 2);
    for (auto& v : xv) v = n(g);
    for (auto& v : y0) v = n(g);
    for (auto& v : cv) v = std::tanh(n(g));
    x = Tensor::from_values({16, 5}, xv);
    prior = Tensor::from_values({16, 3}, y0);
    labels = {models::one_hot(random_labels(16, 4, g), 4), models::one_hot(random_labels(16, 4, g), 4),
              Tensor::from_values({16, 2}, cv)};
  }

  std::pair<Scores, Scores> scores(const models::EncoderOutput& enc) {
    return {m.discriminator.forward(x, enc.y0_sample, enc.predictions),
            m.discriminator.forward(m.decoder.forward(prior, labels), prior, labels)};
  }

  Tensor generator_loss() {
    Rng rng(77);
    auto enc = m.encoder.forward(x, rng);
    Tensor f = supervised_loss(enc.predictions, labels, shapes.tasks, 1.0, SimilarityKind::ccc);
    auto [se, sd] = scores(enc);
    return generator_objective(f, se, sd, 0.8, {});
  }

  Tensor discriminator_loss() {
    Rng rng(78);
    auto enc = m.encoder.forward(x, rng);
    auto [se, sd] = scores(enc);
    return ad::neg(discriminator_objective(se, sd, {}));
  }

  models::ModelShapes shapes;
  models::Models m;
  Tensor x, prior;
  std::vector<Tensor> labels;
};

TEST_F(FullObjectiveGradient, GeneratorLoss) {
  auto p = m.generator_parameters();
  EXPECT_LE(ad::grad_check([&] { return generator_loss(); }, p, 1e-6), 1e-4);
}

TEST_F(FullObjectiveGradient, DiscriminatorLoss) {
  auto p = m.discriminator_parameters();
  EXPECT_LE(ad::grad_check([&] { return discriminator_loss(); }, p, 1e-6), 1e-4);
}

TEST_F(FullObjectiveGradient, FrozenNetworksRecordNoGradient) {
  auto d = m.discriminator_parameters();
  auto g = m.generator_parameters();
  ad::set_requires_grad(d, false);
  ad::zero_grads(g);
  generator_loss().backward();
  for (auto* q : d) EXPECT_FALSE(q->tensor.has_grad());
  ad::set_requires_grad(d, true);

  for (auto* q : g) q->tensor.clear_grad();
  ad::set_requires_grad(g, false);
  ad::zero_grads(d);
  discriminator_loss().backward();
  for (auto* q : g) EXPECT_FALSE(q->tensor.has_grad());
  ad::set_requires_grad(g, true);
}
