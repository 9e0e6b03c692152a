#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "nmt/autodiff/tensor.hpp"
#include "nmt/random.hpp"

namespace nmt::ad {

// Binary elementwise ops accept equal shapes, a trailing-axis vector on the
// right (bias broadcast over rows), or a single-element tensor on the right.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor multiply_scalar(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
Tensor neg(const Tensor& a);

Tensor concat_last_axis(std::span<const Tensor> parts);
Tensor concat_last_axis(std::initializer_list<Tensor> parts);
Tensor slice_last_axis(const Tensor& a, std::size_t begin, std::size_t end);

Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);
Tensor softmax_last_axis(const Tensor& a);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// min(a, c) / max(a, c). At the kink the clamped side wins: gradient 0.
Tensor minimum(const Tensor& a, double c);
Tensor maximum(const Tensor& a, double c);

// mean + exp(logvar / 2) * eps with eps ~ N(0, 1) drawn per element from rng.
Tensor gaussian_reparameterize(const Tensor& mean, const Tensor& logvar, Rng& rng);

enum class OpKind {
  matmul,
  add,
  multiply_scalar,
  concat_last_axis,
  relu,
  tanh,
  exp,
  log,
  softmax_last_axis,
  mean,
  sum,
  elementwise_min_with_scalar,
  gaussian_reparameterize,
};

std::string_view op_kind_name(OpKind kind);
std::vector<OpKind> all_op_kinds();

struct OpArgs {
  double scalar = 0.0;   // multiply_scalar factor / min threshold
  Rng* rng = nullptr;    // gaussian_reparameterize
};

// Generic dispatcher over the named op set.
Tensor forward_op(OpKind kind, std::span<const Tensor> inputs, const OpArgs& args = {});

}  // namespace nmt::ad
