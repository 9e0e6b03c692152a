#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nmt/objectives/objectives.hpp"

namespace nmt::train {

enum class Mode {
  proposed,
  clean_baseline,
  noisy_baseline,
  majority_vote_baseline,
  forward_correction_baseline,
};

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

// Which label families of the dataset the run uses.
enum class TaskSelection { discrete, continuous, both };

std::string to_string(TaskSelection t);
TaskSelection task_selection_from_string(const std::string& s);

std::string to_string(objectives::SimilarityKind k);
objectives::SimilarityKind similarity_from_string(const std::string& s);

// Network widths; input_dim, tasks and the decoder output range come from the
// dataset at run time.
struct NetworkConfig {
  std::size_t latent_dim = 8;
  std::vector<std::size_t> encoder_hidden{64, 64};
  std::vector<std::size_t> decoder_hidden{64, 64};
  std::vector<std::size_t> stream_hidden{64};
  std::size_t stream_embed = 64;
  std::vector<std::size_t> joint_hidden{64};

  bool operator==(const NetworkConfig&) const = default;
};

struct ExperimentConfig {
  std::filesystem::path dataset;
  NetworkConfig network;
  Mode mode = Mode::proposed;
  TaskSelection tasks = TaskSelection::both;
  objectives::SimilarityKind sim_loss = objectives::SimilarityKind::ccc;
  objectives::AblationFlags ablation;
  double lambda = 0.8;
  double gamma = 1.0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  std::size_t batch_size = 64;
  std::size_t iterations = 2000;
  std::size_t d_steps_per_g_step = 2;
  std::size_t log_interval = 100;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

}  // namespace nmt::train
