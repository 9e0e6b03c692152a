#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "nmt/cli/config_file.hpp"
#include "nmt/train/trainer.hpp"

namespace nmt::cli {

struct Options {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  bool force = false;
  std::optional<std::filesystem::path> checkpoint;  // eval
  std::optional<std::filesystem::path> dataset;     // eval, overrides the config
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Each command returns normally on success and throws on failure
// (ConfigError, UsageError, train::TrainingDiverged, std::exception).
void cmd_gen_data(const Options& o, std::ostream& log);
void cmd_train(const Options& o, std::ostream& log);
void cmd_eval(const Options& o, std::ostream& log);
void cmd_ablate(const Options& o, std::ostream& log);
void cmd_sweep_lambda(const Options& o, std::ostream& log);

// Creates `dir`. An existing non-empty directory is an error unless force is
// set, in which case it is removed first.
void prepare_output_dir(const std::filesystem::path& dir, bool force);

// checkpoint.nmt, runlog.csv, metrics.json, confusion.json, predictions.nmt,
// summary.json
void write_run_dir(const std::filesystem::path& dir, train::TrainResult& res,
                   const train::ExperimentConfig& cfg);

nlohmann::ordered_json noise_stats_json(const data::Dataset& ds);

}  // namespace nmt::cli
