#include "nmt/models/nn.hpp"

#include <cmath>

namespace nmt::models {

Linear::Linear(std::string name, std::size_t in, std::size_t out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> u(-a, a);
  std::vector<double> w(in * out);
  for (auto& v : w) v = u(rng);
  weight_ = Parameter(name + ".weight", Tensor::from_values({in, out}, std::move(w)));
  bias_ = Parameter(name + ".bias", Tensor::zeros({out}));
}

Tensor Linear::forward(const Tensor& x) const {
  return ad::add(ad::matmul(x, weight_.tensor), bias_.tensor);
}

void Linear::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

Mlp::Mlp(const std::string& name, std::size_t in, const std::vector<std::size_t>& widths,
         bool relu_last, Rng& rng)
    : relu_last_(relu_last), in_(in) {
  std::size_t prev = in;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    layers_.emplace_back(name + "." + std::to_string(i), prev, widths[i], rng);
    prev = widths[i];
  }
}

Tensor Mlp::forward(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].forward(h);
    if (i + 1 < layers_.size() || relu_last_) h = ad::relu(h);
  }
  return h;
}

void Mlp::collect(std::vector<Parameter*>& out) {
  for (auto& l : layers_) l.collect(out);
}

std::size_t Mlp::out_features() const {
  return layers_.empty() ? in_ : layers_.back().out_features();
}

std::size_t Mlp::parameter_count(std::size_t in, const std::vector<std::size_t>& widths) {
  std::size_t n = 0;
  for (auto w : widths) {
    n += Linear::parameter_count(in, w);
    in = w;
  }
  return n;
}

}  // namespace nmt::models
