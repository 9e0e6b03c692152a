#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nmt/autodiff/tensor.hpp"

namespace nmt::ad {

/// A trainable leaf tensor plus its Adam moment estimates.
struct Parameter {
  std::string name;
  Tensor tensor;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::uint64_t step_count = 0;

  Parameter() = default;
  Parameter(std::string name, Tensor t);
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam update applied in place; clears every gradient after.
/// Throws std::invalid_argument naming the first parameter without a gradient
/// (nothing is updated in that case).
void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg);

void zero_grads(std::span<Parameter* const> params);
void set_requires_grad(std::span<Parameter* const> params, bool on);

}  // namespace nmt::ad
