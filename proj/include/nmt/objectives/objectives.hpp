#pragma once

// Supervised multi-task loss f, the hinge adversarial components g / h / h_hat,
// CCC, and the assembled generator and discriminator objectives.

#include <span>
#include <string>
#include <vector>

#include "nmt/autodiff/ops.hpp"
#include "nmt/models/networks.hpp"

namespace nmt::objectives {

using ad::Tensor;
using models::Scores;

inline constexpr double kProbFloor = 1e-12;
inline constexpr double kDenomFloor = 1e-12;

struct AblationFlags {
  bool no_joint = false;
  bool no_marginal = false;
  bool no_decoder = false;
};

enum class SimilarityKind { ccc, mse };

// Mean over rows of -log(max(p[label], 1e-12)). Rows of pred must sum to 1.
Tensor cross_entropy(const Tensor& pred_probs, const Tensor& target_onehot);

// Concordance correlation coefficient with population moments:
//   2 cov(p, t) / (var p + var t + (mean p - mean t)^2), denominator floored.
// Accepts (m) or (m, 1); m >= 2.
Tensor ccc(const Tensor& pred, const Tensor& target);
double ccc_value(std::span<const double> pred, std::span<const double> target);

Tensor mse(const Tensor& pred, const Tensor& target);
double mse_value(std::span<const double> pred, std::span<const double> target);

// ccc: 1 - mean_j ccc(pred[:, j], target[:, j]); mse: mean squared error.
Tensor similarity_loss(const Tensor& pred, const Tensor& target,
                       SimilarityKind kind = SimilarityKind::ccc);

double hinge_g(double z);  // min(0, z - 1)
double hinge_h(double z);  // min(0, -z - 1)
double h_hat(double z);    // -z
Tensor hinge_g(const Tensor& z);
Tensor hinge_h(const Tensor& z);
Tensor h_hat(const Tensor& z);

// Score streams are indexed 0 = joint, 1 = x, 2 = y0, 3.. = tasks.
std::size_t score_count(const Scores& s);
const Tensor& score_at(const Scores& s, std::size_t index);
std::string score_name(std::size_t index);
std::vector<std::size_t> active_scores(const Scores& s, const AblationFlags& flags);

// sum over active scores of mean g(S_enc) + mean h(S_dec); to be maximised.
Tensor discriminator_objective(const Scores& enc, const Scores& dec, const AblationFlags& flags);

// sum over active scores of mean h_hat(-S_enc) + mean h_hat(S_dec).
Tensor generator_adversarial(const Scores& enc, const Scores& dec, const AblationFlags& flags);

// f + lambda * generator_adversarial; to be minimised.
Tensor generator_objective(const Tensor& f_value, const Scores& enc, const Scores& dec,
                           double lambda, const AblationFlags& flags);

struct ScoreTerm {
  std::string name;
  bool active = false;
  double generator = 0.0;      // mean S_enc - mean S_dec
  double discriminator = 0.0;  // mean g(S_enc) + mean h(S_dec)
};

struct LossBreakdown {
  double f_total = 0.0;
  std::vector<double> ce_per_discrete_task;
  std::vector<double> sim_per_continuous_task;
  double adv_generator = 0.0;      // sum of active ScoreTerm::generator
  double adv_discriminator = 0.0;  // sum of active ScoreTerm::discriminator
  double generator_total = 0.0;    // f_total + lambda * adv_generator
  std::vector<ScoreTerm> score_terms;
};

std::vector<ScoreTerm> score_terms(const Scores& enc, const Scores& dec, const AblationFlags& flags);

// f over the task list: sum of CE over discrete tasks + gamma * sum of
// similarity over continuous tasks. Per-task values are written to bd.
Tensor supervised_loss(std::span<const Tensor> predictions, std::span<const Tensor> targets,
                       std::span<const models::TaskSpec> tasks, double gamma, SimilarityKind sim,
                       LossBreakdown* bd = nullptr);

}  // namespace nmt::objectives
