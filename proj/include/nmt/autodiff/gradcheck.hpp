#pragma once

#include <functional>
#include <span>

#include "nmt/autodiff/adam.hpp"
#include "nmt/autodiff/tensor.hpp"

namespace nmt::ad {

class NondeterministicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Both checkers return max_i |analytic_i - fd_i| / max(1, |fd_i|) with fd the
// central difference at step eps (eps must lie in [1e-7, 1e-3]). The function
// is evaluated twice up front; differing results raise NondeterministicError.

double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double eps);

// Perturbs each parameter in place (restoring it afterwards). Existing
// gradients on the parameters are discarded.
double grad_check(const std::function<Tensor()>& f, std::span<Parameter* const> params,
                  double eps);

}  // namespace nmt::ad
