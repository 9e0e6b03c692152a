#pragma once

// Encoder G_Y, decoder G_X and the multi-stream discriminator D, all as
// dense ReLU networks.

#include <span>
#include <string>
#include <vector>

#include "nmt/models/nn.hpp"

namespace nmt::models {

enum class TaskKind { discrete, continuous };

// One label task: K classes (discrete) or a d-vector in [-1, 1] (continuous).
struct TaskSpec {
  TaskKind kind = TaskKind::discrete;
  std::size_t size = 2;

  static TaskSpec discrete(std::size_t k) { return {TaskKind::discrete, k}; }
  static TaskSpec continuous(std::size_t d) { return {TaskKind::continuous, d}; }
  bool is_discrete() const { return kind == TaskKind::discrete; }
  void validate() const;
  bool operator==(const TaskSpec&) const = default;
};

std::string tasks_to_string(const std::vector<TaskSpec>& tasks);  // e.g. "d4,d4,c2"
std::vector<TaskSpec> tasks_from_string(const std::string& s);

struct ModelShapes {
  std::size_t input_dim = 16;
  std::size_t latent_dim = 8;
  std::vector<TaskSpec> tasks;
  std::vector<std::size_t> encoder_hidden{64, 64};
  std::vector<std::size_t> decoder_hidden{64, 64};
  std::vector<std::size_t> stream_hidden{64};  // per-variable D stream, before the embedding
  std::size_t stream_embed = 64;
  std::vector<std::size_t> joint_hidden{64};
  // Decoder output range: tanh output is mapped affinely onto [lo, hi].
  double output_lo = -1.0;
  double output_hi = 1.0;

  void validate() const;
  std::size_t label_width() const;
  bool operator==(const ModelShapes&) const = default;
};

std::size_t encoder_parameter_count(const ModelShapes& s);
std::size_t decoder_parameter_count(const ModelShapes& s);
std::size_t discriminator_parameter_count(const ModelShapes& s);

struct EncoderOutput {
  Tensor y0_mean;
  Tensor y0_logvar;  // clamped to [-10, 10]
  Tensor y0_sample;
  std::vector<Tensor> predictions;  // softmax probabilities or tanh values, per task
};

enum class LatentMode { sample, mean };

class Encoder {
 public:
  Encoder() = default;
  Encoder(const ModelShapes& shapes, Rng& init_rng);

  EncoderOutput forward(const Tensor& x, Rng& rng, LatentMode mode = LatentMode::sample) const;
  std::vector<Parameter*> parameters();
  Linear& task_head(std::size_t i) { return task_heads_.at(i); }

 private:
  ModelShapes shapes_;
  Mlp trunk_;
  Linear mean_head_;
  Linear logvar_head_;
  std::vector<Linear> task_heads_;
};

class Decoder {
 public:
  Decoder() = default;
  Decoder(const ModelShapes& shapes, Rng& init_rng);

  // labels: one (m, K) one-hot / (m, d) tensor per task.
  Tensor forward(const Tensor& y0, std::span<const Tensor> labels) const;
  std::vector<Parameter*> parameters();
  Linear& output_layer() { return net_.layer(net_.depth() - 1); }

 private:
  ModelShapes shapes_;
  Mlp net_;
};

// Per-sample scores, each of shape (m, 1). y[0] is the latent stream, y[i]
// the i-th task.
struct Scores {
  Tensor joint;
  Tensor x;
  std::vector<Tensor> y;

  std::size_t marginal_count() const { return 1 + y.size(); }
  const Tensor& marginal(std::size_t i) const { return i == 0 ? x : y.at(i - 1); }
};

class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(const ModelShapes& shapes, Rng& init_rng);

  Scores forward(const Tensor& x, const Tensor& y0, std::span<const Tensor> labels) const;
  std::vector<Parameter*> parameters();
  Mlp& joint_head() { return joint_; }

 private:
  ModelShapes shapes_;
  std::vector<Mlp> streams_;          // x, y0, task 1..T
  std::vector<Linear> marginal_heads_;
  Mlp joint_;
};

struct Models {
  ModelShapes shapes;
  Encoder encoder;
  Decoder decoder;
  Discriminator discriminator;

  static Models create(const ModelShapes& shapes, std::uint64_t seed);

  std::vector<Parameter*> generator_parameters();  // encoder then decoder
  std::vector<Parameter*> discriminator_parameters() { return discriminator.parameters(); }
  std::vector<Parameter*> all_parameters();
};

// (m, K) one-hot rows from class indices.
Tensor one_hot(std::span<const int> classes, std::size_t k);

}  // namespace nmt::models
