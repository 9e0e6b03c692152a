#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmt/study/lambda_study.hpp"

namespace nmt::study {

// The five settings compared in the ablation table, in output order.
enum class AblationSetting { noisy_baseline, no_joint, no_marginal, no_decoder, proposed };

std::vector<AblationSetting> all_ablation_settings();
std::string to_string(AblationSetting s);
train::ExperimentConfig apply_setting(train::ExperimentConfig base, AblationSetting s);

struct AblationRow {
  AblationSetting setting;
  std::vector<double> accuracies;  // per seed, in seed order
  double median_accuracy = 0.0;
};

struct AblationReport {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;

  const AblationRow& row(AblationSetting s) const;
  std::string to_csv() const;
};

using AblationCallback =
    std::function<void(AblationSetting, std::uint64_t seed, const train::TrainResult&)>;

AblationReport run_ablation(const train::ExperimentConfig& base, const data::Dataset& ds,
                            const std::vector<std::uint64_t>& seeds, std::size_t jobs = 1,
                            const AblationCallback& on_run = {});

}  // namespace nmt::study
