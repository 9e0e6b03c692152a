#pragma once

#include <string>
#include <vector>

#include "nmt/autodiff/adam.hpp"
#include "nmt/autodiff/ops.hpp"
#include "nmt/random.hpp"

namespace nmt::models {

using ad::Parameter;
using ad::Tensor;

// y = x W + b. Weights uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out));
// bias zero.
class Linear {
 public:
  Linear() = default;
  Linear(std::string name, std::size_t in, std::size_t out, Rng& rng);

  Tensor forward(const Tensor& x) const;
  void collect(std::vector<Parameter*>& out);

  std::size_t in_features() const { return weight_.tensor.shape()[0]; }
  std::size_t out_features() const { return weight_.tensor.shape()[1]; }
  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }

  static std::size_t parameter_count(std::size_t in, std::size_t out) { return in * out + out; }

 private:
  Parameter weight_;
  Parameter bias_;
};

// Stack of Linear layers with ReLU between them; relu_last also applies ReLU
// after the final layer (used for feature embeddings).
class Mlp {
 public:
  Mlp() = default;
  Mlp(const std::string& name, std::size_t in, const std::vector<std::size_t>& widths,
      bool relu_last, Rng& rng);

  Tensor forward(const Tensor& x) const;
  void collect(std::vector<Parameter*>& out);
  std::size_t out_features() const;
  bool empty() const { return layers_.empty(); }
  Linear& layer(std::size_t i) { return layers_.at(i); }
  std::size_t depth() const { return layers_.size(); }

  static std::size_t parameter_count(std::size_t in, const std::vector<std::size_t>& widths);

 private:
  std::vector<Linear> layers_;
  bool relu_last_ = false;
  std::size_t in_ = 0;
};

}  // namespace nmt::models
