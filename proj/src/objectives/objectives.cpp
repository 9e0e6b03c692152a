#include "nmt/objectives/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nmt::objectives {

using namespace nmt::ad;

Tensor cross_entropy(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape() || pred.dim() != 2)
    throw ShapeError("cross_entropy", pred.shape(), target.shape());
  const std::size_t m = pred.rows();
  const std::size_t k = pred.cols();
  const auto p = pred.values();
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += p[r * k + c];
    if (std::abs(s - 1.0) > 1e-6)
      throw std::invalid_argument("cross_entropy: prediction row " + std::to_string(r) +
                                  " sums to " + std::to_string(s));
  }
  const Tensor ll = mul(target, ad::log(maximum(pred, kProbFloor)));
  return multiply_scalar(sum(ll), -1.0 / static_cast<double>(m));
}

Tensor ccc(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) throw ShapeError("ccc", pred.shape(), target.shape());
  if (pred.numel() < 2) throw std::invalid_argument("ccc: needs at least 2 samples");
  if (pred.dim() > 2 || (pred.dim() == 2 && pred.cols() != 1))
    throw ShapeError("ccc: expected (m) or (m,1), got " + shape_str(pred.shape()));
  const Tensor mp = mean(pred);
  const Tensor mt = mean(target);
  const Tensor dp = sub(pred, mp);
  const Tensor dt = sub(target, mt);
  const Tensor cov = mean(mul(dp, dt));
  const Tensor denom = maximum(
      add(add(mean(square(dp)), mean(square(dt))), square(sub(mp, mt))), kDenomFloor);
  return div(multiply_scalar(cov, 2.0), denom);
}

double ccc_value(std::span<const double> p, std::span<const double> t) {
  if (p.size() != t.size()) throw std::invalid_argument("ccc_value: length mismatch");
  if (p.size() < 2) throw std::invalid_argument("ccc_value: needs at least 2 samples");
  const double n = static_cast<double>(p.size());
  double mp = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mp += p[i];
    mt += t[i];
  }
  mp /= n;
  mt /= n;
  double cov = 0.0, vp = 0.0, vt = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cov += (p[i] - mp) * (t[i] - mt);
    vp += (p[i] - mp) * (p[i] - mp);
    vt += (t[i] - mt) * (t[i] - mt);
  }
  cov /= n;
  vp /= n;
  vt /= n;
  return 2.0 * cov / std::max(vp + vt + (mp - mt) * (mp - mt), kDenomFloor);
}

Tensor mse(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) throw ShapeError("mse", pred.shape(), target.shape());
  return mean(square(sub(pred, target)));
}

double mse_value(std::span<const double> p, std::span<const double> t) {
  if (p.size() != t.size() || p.empty()) throw std::invalid_argument("mse_value: bad lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - t[i]) * (p[i] - t[i]);
  return s / static_cast<double>(p.size());
}

Tensor similarity_loss(const Tensor& pred, const Tensor& target, SimilarityKind kind) {
  if (pred.shape() != target.shape() || pred.dim() != 2)
    throw ShapeError("similarity_loss", pred.shape(), target.shape());
  if (kind == SimilarityKind::mse) return mse(pred, target);
  if (pred.rows() < 2) throw std::invalid_argument("similarity_loss: needs at least 2 samples");
  const std::size_t d = pred.cols();
  Tensor total;
  for (std::size_t j = 0; j < d; ++j) {
    Tensor c = ccc(slice_last_axis(pred, j, j + 1), slice_last_axis(target, j, j + 1));
    total = total.defined() ? add(total, c) : c;
  }
  return add_scalar(multiply_scalar(total, -1.0 / static_cast<double>(d)), 1.0);
}

double hinge_g(double z) { return std::min(0.0, z - 1.0); }
double hinge_h(double z) { return std::min(0.0, -z - 1.0); }
double h_hat(double z) { return -z; }

Tensor hinge_g(const Tensor& z) { return minimum(add_scalar(z, -1.0), 0.0); }
Tensor hinge_h(const Tensor& z) { return minimum(add_scalar(neg(z), -1.0), 0.0); }
Tensor h_hat(const Tensor& z) { return neg(z); }

std::size_t score_count(const Scores& s) { return 2 + s.y.size(); }

const Tensor& score_at(const Scores& s, std::size_t index) {
  if (index == 0) return s.joint;
  if (index == 1) return s.x;
  return s.y.at(index - 2);
}

std::string score_name(std::size_t index) {
  if (index == 0) return "joint";
  if (index == 1) return "x";
  return "y" + std::to_string(index - 2);
}

std::vector<std::size_t> active_scores(const Scores& s, const AblationFlags& flags) {
  if (flags.no_joint && flags.no_marginal)
    throw std::invalid_argument("both joint and marginal scores disabled: no adversarial signal");
  std::vector<std::size_t> out;
  if (!flags.no_joint) out.push_back(0);
  if (!flags.no_marginal)
    for (std::size_t i = 1; i < score_count(s); ++i) out.push_back(i);
  return out;
}

namespace {

void check_pair(const Scores& enc, const Scores& dec) {
  if (enc.y.size() != dec.y.size())
    throw std::invalid_argument("score bundles have different stream counts");
}

Tensor accumulate(const Tensor& total, const Tensor& term) {
  return total.defined() ? add(total, term) : term;
}

}  // namespace

Tensor discriminator_objective(const Scores& enc, const Scores& dec, const AblationFlags& flags) {
  check_pair(enc, dec);
  Tensor total;
  for (std::size_t i : active_scores(enc, flags))
    total = accumulate(total, add(mean(hinge_g(score_at(enc, i))), mean(hinge_h(score_at(dec, i)))));
  return total;
}

Tensor generator_adversarial(const Scores& enc, const Scores& dec, const AblationFlags& flags) {
  check_pair(enc, dec);
  Tensor total;
  for (std::size_t i : active_scores(enc, flags))
    total = accumulate(total, add(mean(h_hat(neg(score_at(enc, i)))), mean(h_hat(score_at(dec, i)))));
  return total;
}

Tensor generator_objective(const Tensor& f_value, const Scores& enc, const Scores& dec,
                           double lambda, const AblationFlags& flags) {
  if (lambda < 0.0) throw std::invalid_argument("generator_objective: lambda must be >= 0");
  return add(f_value, multiply_scalar(generator_adversarial(enc, dec, flags), lambda));
}

std::vector<ScoreTerm> score_terms(const Scores& enc, const Scores& dec, const AblationFlags& flags) {
  check_pair(enc, dec);
  const auto active = active_scores(enc, flags);
  auto batch_mean = [](const Tensor& t, auto fn) {
    double s = 0.0;
    for (double v : t.values()) s += fn(v);
    return s / static_cast<double>(t.numel());
  };
  std::vector<ScoreTerm> out;
  for (std::size_t i = 0; i < score_count(enc); ++i) {
    ScoreTerm t;
    t.name = score_name(i);
    t.active = std::find(active.begin(), active.end(), i) != active.end();
    const Tensor& e = score_at(enc, i);
    const Tensor& d = score_at(dec, i);
    t.generator = batch_mean(e, [](double v) { return v; }) - batch_mean(d, [](double v) { return v; });
    t.discriminator = batch_mean(e, [](double v) { return hinge_g(v); }) +
                      batch_mean(d, [](double v) { return hinge_h(v); });
    out.push_back(t);
  }
  return out;
}

Tensor supervised_loss(std::span<const Tensor> predictions, std::span<const Tensor> targets,
                       std::span<const models::TaskSpec> tasks, double gamma, SimilarityKind sim,
                       LossBreakdown* bd) {
  if (predictions.size() != tasks.size() || targets.size() != tasks.size())
    throw std::invalid_argument("supervised_loss: prediction/target/task counts differ");
  Tensor total;
  double f = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].is_discrete()) {
      Tensor ce = cross_entropy(predictions[i], targets[i]);
      if (bd) bd->ce_per_discrete_task.push_back(ce.item());
      f += ce.item();
      total = accumulate(total, ce);
    } else {
      Tensor s = similarity_loss(predictions[i], targets[i], sim);
      if (bd) bd->sim_per_continuous_task.push_back(s.item());
      f += gamma * s.item();
      total = accumulate(total, multiply_scalar(s, gamma));
    }
  }
  if (bd) bd->f_total = f;
  return total;
}

}  // namespace nmt::objectives
