#pragma once

// Procedural multi-task datasets with clean ground truth. Every sample has one
// discrete label (class) and, when continuous_dim > 0, one continuous label
// drawn around a per-class anchor so that the two tasks are correlated.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nmt::data {

enum class Generator { blobs, patterns };

std::string to_string(Generator g);
Generator generator_from_string(const std::string& s);

// One entry per independent noisy label set.
struct NoiseConfig {
  std::vector<double> discrete_rates;    // uniform flip rate per set
  std::vector<double> continuous_rates;  // outlier replacement rate per set
  void validate() const;
  bool operator==(const NoiseConfig&) const = default;
};

struct DatasetSpec {
  Generator generator = Generator::blobs;
  std::size_t n_train = 1000;
  std::size_t n_test = 2000;
  std::size_t classes = 4;
  std::size_t input_dim = 16;  // blobs
  std::size_t side = 16;       // patterns: side x side image, flattened
  std::size_t continuous_dim = 2;
  std::vector<double> class_anchors;  // classes x continuous_dim; empty = default placement
  double anchor_jitter = 0.08;
  double blob_spread = 1.0;
  double center_distance = 6.0;  // pairwise distance between blob centres
  double pattern_noise = 0.1;
  std::uint64_t seed = 0;
  NoiseConfig noise;

  std::size_t feature_dim() const;
  // Fills class_anchors when empty and checks every invariant; throws
  // std::invalid_argument on infeasible settings.
  DatasetSpec resolved() const;
  bool operator==(const DatasetSpec&) const = default;
};

struct Split {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t cont_dim = 0;
  std::vector<double> x;  // n x dim
  std::vector<int> clean_class;
  std::vector<double> clean_cont;  // n x cont_dim
  std::vector<std::vector<int>> noisy_class;
  std::vector<std::vector<std::uint8_t>> flip_mask;
  std::vector<std::vector<double>> noisy_cont;
  std::vector<std::vector<std::uint8_t>> outlier_mask;

  bool operator==(const Split&) const = default;
};

struct Dataset {
  DatasetSpec spec;  // resolved
  Split train;
  Split test;  // never corrupted

  bool operator==(const Dataset&) const = default;
};

Dataset gen_blobs(const DatasetSpec& spec);
Dataset gen_patterns(const DatasetSpec& spec);
Dataset generate(const DatasetSpec& spec);

std::vector<double> blob_centers(const DatasetSpec& spec);  // classes x input_dim
std::vector<double> pattern_template(std::size_t cls, std::size_t side);
inline constexpr std::size_t kPatternTemplateCount = 12;

inline constexpr const char* kDatasetMagic = "NMTDATA";
inline constexpr int kDatasetVersion = 1;

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

struct RealizedNoise {
  std::vector<double> discrete_nominal, discrete_realized;
  std::vector<double> continuous_nominal, continuous_realized;
};
RealizedNoise realized_noise(const Dataset& ds);

}  // namespace nmt::data
