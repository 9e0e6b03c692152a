#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmt/train/trainer.hpp"

namespace nmt::study {

struct SweepSpec {
  train::ExperimentConfig base;
  std::vector<double> lambdas{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<std::uint64_t> seeds{0, 1, 2};

  void validate() const;
};

struct SweepRow {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double final_accuracy = 0.0;
  double final_ccc = 0.0;
  double g_joint_loss = 0.0;
  double d_joint_loss = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // sorted by (lambda, seed)

  std::vector<double> lambdas() const;
  double median_accuracy(double lambda) const;
  double median_g_joint_loss(double lambda) const;
  std::string to_csv() const;
};

// Called once per finished run, e.g. to write its run directory. May be
// called from worker threads.
using RunCallback = std::function<void(double lambda, std::uint64_t seed, const train::TrainResult&)>;

SweepReport run_sweep(const SweepSpec& spec, const data::Dataset& ds, std::size_t jobs = 1,
                      const RunCallback& on_run = {});

enum class SelectionStrategy { best_median_accuracy, loss_plateau };
SelectionStrategy strategy_from_string(const std::string& s);
std::string to_string(SelectionStrategy s);

// Ties go to the smaller lambda. Throws std::invalid_argument on an empty report.
double select_lambda(const SweepReport& report, SelectionStrategy strategy);

double median(std::vector<double> v);

}  // namespace nmt::study
