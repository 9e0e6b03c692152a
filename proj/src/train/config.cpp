#include "nmt/train/config.hpp"

#include <stdexcept>

namespace nmt::train {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::proposed: return "proposed";
    case Mode::clean_baseline: return "clean_baseline";
    case Mode::noisy_baseline: return "noisy_baseline";
    case Mode::majority_vote_baseline: return "majority_vote_baseline";
    case Mode::forward_correction_baseline: return "forward_correction_baseline";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::proposed, Mode::clean_baseline, Mode::noisy_baseline,
                 Mode::majority_vote_baseline, Mode::forward_correction_baseline})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::string to_string(TaskSelection t) {
  switch (t) {
    case TaskSelection::discrete: return "discrete";
    case TaskSelection::continuous: return "continuous";
    case TaskSelection::both: return "both";
  }
  return "?";
}

TaskSelection task_selection_from_string(const std::string& s) {
  if (s == "discrete") return TaskSelection::discrete;
  if (s == "continuous") return TaskSelection::continuous;
  if (s == "both") return TaskSelection::both;
  throw std::invalid_argument("unknown task selection '" + s + "' (expected discrete|continuous|both)");
}

std::string to_string(objectives::SimilarityKind k) {
  return k == objectives::SimilarityKind::ccc ? "ccc" : "mse";
}

objectives::SimilarityKind similarity_from_string(const std::string& s) {
  if (s == "ccc") return objectives::SimilarityKind::ccc;
  if (s == "mse") return objectives::SimilarityKind::mse;
  throw std::invalid_argument("unknown sim_loss '" + s + "' (expected ccc|mse)");
}

namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw std::invalid_argument("config: " + field + " " + rule);
}

void positive_widths(const std::vector<std::size_t>& w, const std::string& field) {
  for (std::size_t v : w) require(v > 0, field, "entries must be positive");
}

}  // namespace

void ExperimentConfig::validate() const {
  require(lambda >= 0.0, "lambda", "must be >= 0");
  require(gamma >= 0.0, "gamma", "must be >= 0");
  require(lr > 0.0, "lr", "must be > 0");
  require(beta1 >= 0.0 && beta1 < 1.0, "beta1", "must lie in [0, 1)");
  require(beta2 >= 0.0 && beta2 < 1.0, "beta2", "must lie in [0, 1)");
  require(batch_size >= 2, "batch_size", "must be >= 2");
  require(iterations >= 1, "iterations", "must be >= 1");
  require(log_interval >= 1, "log_interval", "must be >= 1");
  require(network.latent_dim > 0, "network.latent_dim", "must be positive");
  require(network.stream_embed > 0, "network.stream_embed", "must be positive");
  positive_widths(network.encoder_hidden, "network.encoder_hidden");
  positive_widths(network.decoder_hidden, "network.decoder_hidden");
  positive_widths(network.stream_hidden, "network.stream_hidden");
  positive_widths(network.joint_hidden, "network.joint_hidden");
  if (mode == Mode::proposed) {
    require(d_steps_per_g_step >= 1, "d_steps_per_g_step", "must be >= 1");
    require(!(ablation.no_joint && ablation.no_marginal), "ablation",
            "no_joint and no_marginal together leave no adversarial signal");
  }
  if (mode == Mode::forward_correction_baseline)
    require(tasks != TaskSelection::continuous, "tasks",
            "forward correction needs discrete tasks");
}

}  // namespace nmt::train
