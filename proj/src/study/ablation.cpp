#include "nmt/study/ablation.hpp"

#include <sstream>
#include <stdexcept>

#include "nmt/binary_io.hpp"
#include "nmt/parallel.hpp"

namespace nmt::study {

std::vector<AblationSetting> all_ablation_settings() {
  return {AblationSetting::noisy_baseline, AblationSetting::no_joint, AblationSetting::no_marginal,
          AblationSetting::no_decoder, AblationSetting::proposed};
}

std::string to_string(AblationSetting s) {
  switch (s) {
    case AblationSetting::noisy_baseline: return "noisy_baseline";
    case AblationSetting::no_joint: return "no_joint";
    case AblationSetting::no_marginal: return "no_marginal";
    case AblationSetting::no_decoder: return "no_decoder";
    case AblationSetting::proposed: return "proposed";
  }
  return "?";
}

train::ExperimentConfig apply_setting(train::ExperimentConfig c, AblationSetting s) {
  c.ablation = {};
  c.mode = train::Mode::proposed;
  switch (s) {
    case AblationSetting::noisy_baseline: c.mode = train::Mode::noisy_baseline; break;
    case AblationSetting::no_joint: c.ablation.no_joint = true; break;
    case AblationSetting::no_marginal: c.ablation.no_marginal = true; break;
    case AblationSetting::no_decoder: c.ablation.no_decoder = true; break;
    case AblationSetting::proposed: break;
  }
  return c;
}

const AblationRow& AblationReport::row(AblationSetting s) const {
  for (const auto& r : rows)
    if (r.setting == s) return r;
  throw std::out_of_range("ablation report has no row " + to_string(s));
}

std::string AblationReport::to_csv() const {
  std::ostringstream os;
  os << "setting,median_accuracy";
  for (auto s : seeds) os << ",seed_" << s;
  os << "\n";
  for (const auto& r : rows) {
    os << to_string(r.setting) << "," << io::format_double(r.median_accuracy);
    for (double a : r.accuracies) os << "," << io::format_double(a);
    os << "\n";
  }
  return os.str();
}

AblationReport run_ablation(const train::ExperimentConfig& base, const data::Dataset& ds,
                            const std::vector<std::uint64_t>& seeds, std::size_t jobs,
                            const AblationCallback& on_run) {
  if (seeds.empty()) throw std::invalid_argument("ablation: seed list is empty");
  const auto settings = all_ablation_settings();
  for (auto s : settings) apply_setting(base, s).validate();
  AblationReport rep;
  rep.seeds = seeds;
  for (auto s : settings) rep.rows.push_back({s, std::vector<double>(seeds.size(), 0.0), 0.0});
  const std::size_t n = settings.size() * seeds.size();
  parallel_for(n, jobs, [&](std::size_t i) {
    const auto s = settings[i / seeds.size()];
    auto cfg = apply_setting(base, s);
    cfg.seed = seeds[i % seeds.size()];
    const auto res = train::run_experiment(cfg, ds);
    rep.rows[i / seeds.size()].accuracies[i % seeds.size()] = res.final_metrics.accuracy;
    if (on_run) on_run(s, cfg.seed, res);
  });
  for (auto& r : rep.rows) r.median_accuracy = median(r.accuracies);
  return rep;
}

}  // namespace nmt::study
