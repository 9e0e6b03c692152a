#include "nmt/autodiff/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace nmt::ad {

Parameter::Parameter(std::string n, Tensor t)
    : name(std::move(n)),
      tensor(std::move(t)),
      adam_m(tensor.numel(), 0.0),
      adam_v(tensor.numel(), 0.0) {
  tensor.set_requires_grad(true);
}

void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg) {
  for (const Parameter* p : params)
    if (!p->tensor.has_grad())
      throw std::invalid_argument("adam_step: parameter '" + p->name + "' has no gradient");

  for (Parameter* p : params) {
    ++p->step_count;
    const double t = static_cast<double>(p->step_count);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    auto w = p->tensor.mutable_values();
    auto g = p->tensor.grad();
    for (std::size_t i = 0; i < w.size(); ++i) {
      p->adam_m[i] = cfg.beta1 * p->adam_m[i] + (1.0 - cfg.beta1) * g[i];
      p->adam_v[i] = cfg.beta2 * p->adam_v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = p->adam_m[i] / c1;
      const double v_hat = p->adam_v[i] / c2;
      w[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
    p->tensor.clear_grad();
  }
}

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->tensor.zero_grad();
}

void set_requires_grad(std::span<Parameter* const> params, bool on) {
  for (Parameter* p : params) p->tensor.set_requires_grad(on);
}

}  // namespace nmt::ad
