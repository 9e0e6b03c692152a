#pragma once

// Alternating generator / discriminator training, the supervised baselines,
// and evaluation against the clean test split.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmt/data/dataset.hpp"
#include "nmt/models/networks.hpp"
#include "nmt/noise/noise.hpp"
#include "nmt/objectives/objectives.hpp"
#include "nmt/train/config.hpp"

namespace nmt::train {

enum class LabelSource { clean, noisy_set, majority_vote, set_mean };

// One prediction head of the encoder and the training labels it is fitted to.
struct Head {
  models::TaskSpec task;
  LabelSource source = LabelSource::clean;
  std::size_t set = 0;  // noisy set index for LabelSource::noisy_set
};

struct TaskLayout {
  std::vector<Head> heads;
  std::vector<models::TaskSpec> tasks() const;
  std::size_t discrete_count() const;
  std::size_t continuous_count() const;
};

// Proposed and noisy_baseline get one head per noisy set; clean and
// majority-vote baselines one head per label family; forward correction one
// head per noisy discrete set.
TaskLayout make_layout(const ExperimentConfig& cfg, const data::Dataset& ds);

models::ModelShapes make_shapes(const ExperimentConfig& cfg, const data::Dataset& ds,
                                const TaskLayout& layout);

// Per-head outputs on a split: (n, K) probabilities or (n, d) values.
struct Predictions {
  std::size_t n = 0;
  std::vector<models::TaskSpec> tasks;
  std::vector<std::vector<double>> values;

  bool operator==(const Predictions&) const = default;
};

Predictions predict(models::Models& m, const std::vector<double>& x, std::size_t n);

inline constexpr const char* kPredictionsMagic = "NMTPRED";
inline constexpr int kPredictionsVersion = 1;
void save_predictions(const Predictions& p, const std::filesystem::path& path);
Predictions load_predictions(const std::filesystem::path& path);

struct DiscreteMetrics {
  double accuracy = 0.0;
  std::vector<std::vector<long long>> confusion;  // [true][predicted]
};

struct ContinuousMetrics {
  std::vector<double> ccc;  // per dimension
  double ccc_mean = 0.0;
  double mse = 0.0;
};

// Headline numbers average the per-head metrics: every head is a classifier
// (or regressor) for the same underlying task.
struct MetricsReport {
  std::size_t n = 0;
  bool has_discrete = false;
  bool has_continuous = false;
  double accuracy = 0.0;    // mean head accuracy
  std::vector<double> ccc;  // per dimension, mean over heads
  double ccc_mean = 0.0;
  double mse = 0.0;
  std::vector<DiscreteMetrics> discrete_heads;
  std::vector<ContinuousMetrics> continuous_heads;
};

// Throws std::invalid_argument on an empty split or mismatched shapes.
MetricsReport evaluate_predictions(const Predictions& p, const data::Split& test, std::size_t classes);
MetricsReport evaluate(models::Models& m, const data::Split& test, std::size_t classes);

struct LogRow {
  std::uint64_t iteration = 0;
  objectives::LossBreakdown train;  // on the full training split
  double train_ce = 0.0;            // mean over discrete heads, uncorrected, vs own labels
  double test_accuracy = 0.0;
  std::vector<double> test_head_accuracy;
  double test_ccc = 0.0;
  double test_mse = 0.0;
  double g_joint_loss = 0.0;  // mean S_joint(enc) - mean S_joint(dec)
  double d_joint_loss = 0.0;  // -(mean g(S_joint(enc)) + mean h(S_joint(dec)))
};

struct RunLog {
  std::vector<LogRow> rows;
  std::string to_csv() const;
  std::vector<std::string> columns() const;
};

struct StepCounters {
  std::uint64_t generator_steps = 0;
  std::uint64_t discriminator_steps = 0;
};

enum class StepKind { generator, discriminator };

struct TrainOptions {
  // Called after every optimizer step, e.g. to check which parameters moved.
  std::function<void(StepKind, models::Models&)> on_step;
  // Overrides the oracle transition matrices for forward correction.
  std::vector<noise::TransitionMatrix> transitions;
};

struct TrainResult {
  models::Models models;
  TaskLayout layout;
  RunLog log;
  MetricsReport final_metrics;
  Predictions final_predictions;
  StepCounters counters;
  double final_train_ce = 0.0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::uint64_t iteration, objectives::LossBreakdown bd, const std::string& what);
  std::uint64_t iteration;
  objectives::LossBreakdown breakdown;
};

TrainResult train_proposed(const ExperimentConfig& cfg, const data::Dataset& ds,
                           const TrainOptions& opts = {});
TrainResult train_baseline(const ExperimentConfig& cfg, const data::Dataset& ds,
                           const TrainOptions& opts = {});
TrainResult train_forward_correction(const ExperimentConfig& cfg, const data::Dataset& ds,
                                     std::vector<noise::TransitionMatrix> transitions,
                                     const TrainOptions& opts = {});
// Dispatches on cfg.mode; forward correction uses the dataset's true flip matrices.
TrainResult run_experiment(const ExperimentConfig& cfg, const data::Dataset& ds,
                           const TrainOptions& opts = {});

std::vector<noise::TransitionMatrix> oracle_transitions(const data::Dataset& ds);

}  // namespace nmt::train
