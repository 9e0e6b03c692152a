#include "nmt/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace nmt::ad {

namespace {

void check_eps(double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3))
    throw std::invalid_argument("grad_check: eps must lie in [1e-7, 1e-3]");
}

double rel_err(double analytic, double fd) {
  return std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
}

}  // namespace

double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double eps) {
  check_eps(eps);
  auto eval = [&](const std::vector<double>& v) {
    return f(Tensor::from_values(x.shape(), v, false)).item();
  };
  std::vector<double> base(x.values().begin(), x.values().end());
  if (eval(base) != eval(base))
    throw NondeterministicError("grad_check: repeated evaluation disagrees");

  Tensor leaf = Tensor::from_values(x.shape(), base, true);
  f(leaf).backward();
  std::vector<double> analytic = leaf.has_grad()
                                     ? std::vector<double>(leaf.grad().begin(), leaf.grad().end())
                                     : std::vector<double>(base.size(), 0.0);

  double worst = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    auto v = base;
    v[i] = base[i] + eps;
    const double up = eval(v);
    v[i] = base[i] - eps;
    const double down = eval(v);
    worst = std::max(worst, rel_err(analytic[i], (up - down) / (2.0 * eps)));
  }
  return worst;
}

double grad_check(const std::function<Tensor()>& f, std::span<Parameter* const> params,
                  double eps) {
  check_eps(eps);
  if (f().item() != f().item())
    throw NondeterministicError("grad_check: repeated evaluation disagrees");

  zero_grads(params);
  f().backward();
  std::vector<std::vector<double>> analytic;
  for (Parameter* p : params) analytic.emplace_back(p->tensor.grad().begin(), p->tensor.grad().end());
  for (Parameter* p : params) p->tensor.clear_grad();

  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto w = params[k]->tensor.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double orig = w[i];
      w[i] = orig + eps;
      const double up = f().item();
      w[i] = orig - eps;
      const double down = f().item();
      w[i] = orig;
      worst = std::max(worst, rel_err(analytic[k][i], (up - down) / (2.0 * eps)));
    }
  }
  return worst;
}

}  // namespace nmt::ad
