#pragma once

// JSON experiment files. Every section is optional; absent keys keep their
// defaults, unknown keys are rejected, and relative paths are resolved against
// the directory holding the file.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nmt/data/dataset.hpp"
#include "nmt/study/lambda_study.hpp"
#include "nmt/train/config.hpp"

namespace nmt::cli {

inline constexpr int kConfigSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigFile {
  std::filesystem::path source;
  std::filesystem::path dataset_path;
  data::DatasetSpec dataset;
  train::ExperimentConfig experiment;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<double> lambdas{0.2, 0.4, 0.6, 0.8, 1.0};
  std::optional<std::filesystem::path> out;
};

ConfigFile parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
ConfigFile load_config(const std::filesystem::path& path);

nlohmann::ordered_json experiment_to_json(const train::ExperimentConfig& c);
nlohmann::ordered_json dataset_spec_to_json(const data::DatasetSpec& s);

}  // namespace nmt::cli
