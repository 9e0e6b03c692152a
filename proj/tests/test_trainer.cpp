#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "nmt/objectives/objectives.hpp"
#include "nmt/train/trainer.hpp"

namespace {

using namespace nmt;
using train::ExperimentConfig;
using train::Mode;

data::Dataset small_blobs(std::vector<double> flips, std::vector<double> outliers = {},
                          std::size_t n_train = 200) {
  data::DatasetSpec s;
  s.n_train = n_train;
  s.n_test = 300;
  s.input_dim = 8;
  s.seed = 21;
  s.noise.discrete_rates = std::move(flips);
  s.noise.continuous_rates = std::move(outliers);
  return data::generate(s);
}

ExperimentConfig small_config(Mode mode) {
  ExperimentConfig c;
  c.mode = mode;
  c.tasks = train::TaskSelection::discrete;
  c.network.latent_dim = 3;
  c.network.encoder_hidden = {16};
  c.network.decoder_hidden = {16};
  c.network.stream_hidden = {8};
  c.network.stream_embed = 8;
  c.network.joint_hidden = {8};
  c.batch_size = 16;
  c.iterations = 30;
  c.log_interval = 10;
  c.lr = 1e-3;
  c.seed = 3;
  return c;
}

std::vector<std::vector<double>> snapshot(const std::vector<ad::Parameter*>& ps) {
  std::vector<std::vector<double>> out;
  for (auto* p : ps) {
    auto v = p->tensor.values();
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

TEST(Trainer, StepCountersFollowSchedule) {
  const auto ds = small_blobs({0.4, 0.4});
  auto c = small_config(Mode::proposed);
  c.iterations = 12;
  c.d_steps_per_g_step = 3;
  const auto r = train::train_proposed(c, ds);
  EXPECT_EQ(r.counters.generator_steps, 12u);
  EXPECT_EQ(r.counters.discriminator_steps, 36u);

  auto b = small_config(Mode::noisy_baseline);
  b.iterations = 12;
  const auto rb = train::train_baseline(b, ds);
  EXPECT_EQ(rb.counters.generator_steps, 12u);
  EXPECT_EQ(rb.counters.discriminator_steps, 0u);
}

TEST(Trainer, StepsTouchOnlyTheirOwnNetworks) {
  const auto ds = small_blobs({0.4, 0.3});
  auto c = small_config(Mode::proposed);
  c.iterations = 5;
  auto init = models::Models::create(
      train::make_shapes(c, ds, train::make_layout(c, ds)), c.seed);
  auto prev_g = snapshot(init.generator_parameters());
  auto prev_d = snapshot(init.discriminator_parameters());
  int g_steps = 0, d_steps = 0;
  train::TrainOptions opts;
  opts.on_step = [&](train::StepKind kind, models::Models& m) {
    const auto g = snapshot(m.generator_parameters());
    const auto d = snapshot(m.discriminator_parameters());
    if (kind == train::StepKind::generator) {
      ++g_steps;
      EXPECT_EQ(d, prev_d) << "discriminator moved during a generator step";
      EXPECT_NE(g, prev_g);
    } else {
      ++d_steps;
      EXPECT_EQ(g, prev_g) << "generator moved during a discriminator step";
      EXPECT_NE(d, prev_d);
    }
    prev_g = g;
    prev_d = d;
  };
  train::train_proposed(c, ds, opts);
  EXPECT_EQ(g_steps, 5);
  EXPECT_EQ(d_steps, 10);
}

TEST(Trainer, ZeroLambdaWithoutDecoderIsSupervised) {
  const auto ds = small_blobs({0.4, 0.3, 0.2});
  auto p = small_config(Mode::proposed);
  p.lambda = 0.0;
  p.ablation.no_decoder = true;
  auto b = p;
  b.mode = Mode::noisy_baseline;
  auto rp = train::train_proposed(p, ds);
  auto rb = train::train_baseline(b, ds);
  EXPECT_EQ(snapshot(rp.models.encoder.parameters()), snapshot(rb.models.encoder.parameters()));
  EXPECT_EQ(rp.final_metrics.accuracy, rb.final_metrics.accuracy);
  ASSERT_EQ(rp.log.rows.size(), rb.log.rows.size());
  for (std::size_t i = 0; i < rp.log.rows.size(); ++i)
    EXPECT_EQ(rp.log.rows[i].train.f_total, rb.log.rows[i].train.f_total);
}

TEST(ForwardCorrection, IdentityMatchesNoisyBaseline) {
  const auto ds = small_blobs({0.4});
  auto f = small_config(Mode::forward_correction_baseline);
  auto b = small_config(Mode::noisy_baseline);
  auto rf = train::train_forward_correction(f, ds, {noise::TransitionMatrix::identity(4)});
  auto rb = train::train_baseline(b, ds);
  EXPECT_EQ(snapshot(rf.models.encoder.parameters()), snapshot(rb.models.encoder.parameters()));
  EXPECT_EQ(rf.log.to_csv(), rb.log.to_csv());
}

TEST(ForwardCorrection, RejectsBadTransitions) {
  const auto ds = small_blobs({0.4});
  auto f = small_config(Mode::forward_correction_baseline);
  noise::TransitionMatrix bad(4, std::vector<double>(16, 0.3));
  EXPECT_THROW(train::train_forward_correction(f, ds, {bad}), std::invalid_argument);
  EXPECT_THROW(train::train_forward_correction(f, ds, {}), std::invalid_argument);
  EXPECT_THROW(train::train_forward_correction(f, ds, {noise::uniform_flip_matrix(3, 0.2)}),
               std::invalid_argument);
}

// Marginal of T p(y|x) over the training inputs against the empirical marginal
// of the noisy labels.
TEST(ForwardCorrection, CorrectedMarginalMatchesNoisyMarginal) {
  const auto ds = small_blobs({0.4}, {}, 2000);
  auto f = small_config(Mode::forward_correction_baseline);
  f.iterations = 1500;
  f.batch_size = 64;
  f.log_interval = 1500;
  auto r = train::run_experiment(f, ds);
  const std::size_t k = 4, n = ds.train.n;
  const auto t = noise::uniform_flip_matrix(k, 0.4);
  const auto p = train::predict(r.models, ds.train.x, n);
  std::vector<double> model(k, 0.0), empirical(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t c = 0; c < k; ++c) model[j] += t.at(j, c) * p.values[0][i * k + c];
    empirical[static_cast<std::size_t>(ds.train.noisy_class[0][i])] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t j = 0; j < k; ++j) tv += std::abs(model[j] / n - empirical[j] / n);
  EXPECT_LE(0.5 * tv, 0.02);
}

train::Predictions one_hot_predictions(const std::vector<int>& cls, std::size_t k) {
  train::Predictions p;
  p.n = cls.size();
  p.tasks = {models::TaskSpec::discrete(k)};
  p.values.emplace_back(cls.size() * k, 0.0);
  for (std::size_t i = 0; i < cls.size(); ++i) p.values[0][i * k + static_cast<std::size_t>(cls[i])] = 1.0;
  return p;
}

TEST(Evaluate, PerfectPredictor) {
  const auto ds = small_blobs({});
  const auto m = train::evaluate_predictions(one_hot_predictions(ds.test.clean_class, 4), ds.test, 4);
  EXPECT_EQ(m.accuracy, 1.0);
  std::vector<long long> counts(4, 0);
  for (int c : ds.test.clean_class) ++counts[static_cast<std::size_t>(c)];
  const auto& conf = m.discrete_heads.at(0).confusion;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(conf[i][j], i == j ? counts[i] : 0);
}

TEST(Evaluate, ConstantPredictor) {
  const auto ds = small_blobs({});
  const auto m = train::evaluate_predictions(
      one_hot_predictions(std::vector<int>(ds.test.n, 2), 4), ds.test, 4);
  double freq = 0.0;
  for (int c : ds.test.clean_class) freq += c == 2;
  EXPECT_DOUBLE_EQ(m.accuracy, freq / ds.test.n);
}

TEST(Evaluate, ConfusionIdentities) {
  const auto ds = small_blobs({0.4});
  auto c = small_config(Mode::noisy_baseline);
  auto r = train::train_baseline(c, ds);
  for (const auto& h : r.final_metrics.discrete_heads) {
    long long diag = 0, total = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      long long row = 0;
      for (std::size_t j = 0; j < 4; ++j) row += h.confusion[i][j];
      long long count = 0;
      for (int l : ds.test.clean_class) count += l == static_cast<int>(i);
      EXPECT_EQ(row, count);
      diag += h.confusion[i][i];
      total += row;
    }
    EXPECT_DOUBLE_EQ(static_cast<double>(diag) / static_cast<double>(total), h.accuracy);
  }
}

TEST(Evaluate, StoredPredictionsMatchObjectiveMetrics) {
  const auto ds = small_blobs({0.2}, {0.2});
  auto c = small_config(Mode::noisy_baseline);
  c.tasks = train::TaskSelection::both;
  auto r = train::train_baseline(c, ds);
  const auto path = std::filesystem::temp_directory_path() / "nmt_test_predictions.nmt";
  train::save_predictions(r.final_predictions, path);
  const auto back = train::load_predictions(path);
  std::filesystem::remove(path);
  ASSERT_TRUE(back == r.final_predictions);
  const auto m = train::evaluate_predictions(back, ds.test, 4);
  ASSERT_TRUE(m.has_continuous);
  const std::size_t d = ds.test.cont_dim, n = ds.test.n;
  const auto& v = back.values.at(1);
  std::vector<double> ccc;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = v[i * d + j];
      b[i] = ds.test.clean_cont[i * d + j];
    }
    ccc.push_back(objectives::ccc_value(a, b));
    EXPECT_EQ(m.ccc[j], ccc.back());
  }
  EXPECT_EQ(m.mse, objectives::mse_value(v, ds.test.clean_cont));
  EXPECT_EQ(m.accuracy, r.final_metrics.accuracy);
  EXPECT_EQ(m.ccc_mean, r.final_metrics.ccc_mean);
}

TEST(Evaluate, RejectsEmptyOrMismatched) {
  const auto ds = small_blobs({});
  data::Split empty;
  EXPECT_THROW(train::evaluate_predictions(one_hot_predictions({}, 4), empty, 4), std::invalid_argument);
  EXPECT_THROW(train::evaluate_predictions(one_hot_predictions({0, 1}, 4), ds.test, 4),
               std::invalid_argument);
  EXPECT_THROW(train::evaluate_predictions(one_hot_predictions(ds.test.clean_class, 4), ds.test, 5),
               std::invalid_argument);
}

TEST(RunLog, RowBookkeeping) {
  const auto ds = small_blobs({0.4, 0.4});
  auto c = small_config(Mode::proposed);
  c.iterations = 40;
  c.log_interval = 10;
  const auto r = train::train_proposed(c, ds);
  ASSERT_EQ(r.log.rows.size(), 40u / 10u + 1u);
  for (std::size_t i = 1; i < r.log.rows.size(); ++i)
    EXPECT_GT(r.log.rows[i].iteration, r.log.rows[i - 1].iteration);
  EXPECT_EQ(r.log.rows.back().iteration, 40u);
  EXPECT_EQ(r.final_train_ce, r.log.rows.back().train_ce);
  EXPECT_EQ(r.final_metrics.accuracy, r.log.rows.back().test_accuracy);
  // Header plus one line per row.
  const auto csv = r.log.to_csv();
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.log.rows.size() + 1);
}

TEST(RunLog, FinalRowWhenIntervalDoesNotDivide) {
  const auto ds = small_blobs({0.4});
  auto c = small_config(Mode::noisy_baseline);
  c.iterations = 25;
  c.log_interval = 10;
  const auto r = train::train_baseline(c, ds);
  ASSERT_EQ(r.log.rows.size(), 4u);
  EXPECT_EQ(r.log.rows.back().iteration, 25u);
}

TEST(RunLog, DeterministicUnderSeed) {
  const auto ds = small_blobs({0.4, 0.4}, {0.3});
  auto c = small_config(Mode::proposed);
  c.tasks = train::TaskSelection::both;
  const auto a = train::train_proposed(c, ds).log.to_csv();
  const auto b = train::train_proposed(c, ds).log.to_csv();
  EXPECT_EQ(a, b);
  c.seed = 4;
  EXPECT_NE(a, train::train_proposed(c, ds).log.to_csv());
}

TEST(RunLog, MultiTaskLossesFiniteFromStart) {
  const auto ds = small_blobs({0.4}, {0.4});
  auto c = small_config(Mode::proposed);
  c.tasks = train::TaskSelection::both;
  c.batch_size = 2;
  c.iterations = 5;
  c.log_interval = 1;
  const auto r = train::train_proposed(c, ds);
  ASSERT_EQ(r.log.rows.size(), 6u);
  for (const auto& row : r.log.rows) {
    ASSERT_EQ(row.train.sim_per_continuous_task.size(), 1u);
    EXPECT_TRUE(std::isfinite(row.train.sim_per_continuous_task[0]));
    EXPECT_TRUE(std::isfinite(row.test_ccc));
    EXPECT_TRUE(std::isfinite(row.train.generator_total));
  }
  c.batch_size = 1;
  EXPECT_THROW(train::train_proposed(c, ds), std::invalid_argument);
}

TEST(Config, RejectsAblationWithoutAdversary) {
  auto c = small_config(Mode::proposed);
  c.ablation.no_joint = true;
  c.ablation.no_marginal = true;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  const auto ds = small_blobs({0.4});
  int steps = 0;
  train::TrainOptions opts;
  opts.on_step = [&](train::StepKind, models::Models&) { ++steps; };
  EXPECT_THROW(train::train_proposed(c, ds, opts), std::invalid_argument);
  EXPECT_EQ(steps, 0);
}

TEST(Config, ValidationNamesTheField) {
  auto c = small_config(Mode::proposed);
  c.lambda = -1.0;
  try {
    c.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("lambda"), std::string::npos);
  }
}

TEST(Trainer, ModeDispatchChecks) {
  const auto ds = small_blobs({0.4});
  EXPECT_THROW(train::train_proposed(small_config(Mode::noisy_baseline), ds), std::invalid_argument);
  EXPECT_THROW(train::train_baseline(small_config(Mode::proposed), ds), std::invalid_argument);
  auto c = small_config(Mode::noisy_baseline);
  c.batch_size = 1000;
  EXPECT_THROW(train::train_baseline(c, ds), std::invalid_argument);
}

TEST(Layout, HeadsPerMode) {
  const auto ds = small_blobs({0.4, 0.3, 0.2}, {0.3});
  auto c = small_config(Mode::proposed);
  c.tasks = train::TaskSelection::both;
  EXPECT_EQ(train::make_layout(c, ds).heads.size(), 4u);
  c.mode = Mode::majority_vote_baseline;
  const auto mv = train::make_layout(c, ds);
  ASSERT_EQ(mv.heads.size(), 2u);
  EXPECT_EQ(mv.heads[0].source, train::LabelSource::majority_vote);
  EXPECT_EQ(mv.heads[1].source, train::LabelSource::set_mean);
  c.mode = Mode::clean_baseline;
  c.tasks = train::TaskSelection::discrete;
  EXPECT_EQ(train::make_layout(c, ds).heads.size(), 1u);
}

TEST(Trainer, DivergenceReportsIteration) {
  const auto ds = small_blobs({0.4});
  auto c = small_config(Mode::noisy_baseline);
  c.lr = 1e300;
  c.log_interval = 1000;
  try {
    train::train_baseline(c, ds);
    FAIL() << "expected divergence";
  } catch (const train::TrainingDiverged& e) {
    EXPECT_GE(e.iteration, 1u);
    EXPECT_NE(std::string(e.what()).find("iteration " + std::to_string(e.iteration)), std::string::npos);
  }
}

}  // namespace
