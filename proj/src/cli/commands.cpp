#include "nmt/cli/commands.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "nmt/binary_io.hpp"
#include "nmt/models/checkpoint.hpp"
#include "nmt/study/ablation.hpp"
#include "nmt/train/report.hpp"

namespace nmt::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + p.string());
}

void write_json(const fs::path& p, const ordered_json& j) { write_text(p, j.dump(2) + "\n"); }

ConfigFile require_config(const Options& o) {
  if (!o.config) throw UsageError("--config is required");
  return load_config(*o.config);
}

fs::path output_dir(const Options& o, const ConfigFile& c) {
  if (o.out) return *o.out;
  if (c.out) return *c.out;
  throw UsageError("no output location: pass --out or set \"out\" in the config");
}

data::Dataset load_input_dataset(const ConfigFile& c, const Options& o) {
  const fs::path p = o.dataset ? *o.dataset : c.dataset_path;
  if (p.empty()) throw ConfigError("config: key 'dataset.path' is required");
  if (!fs::exists(p)) throw UsageError("dataset not found: " + p.string() + " (run gen-data first)");
  return data::load_dataset(p);
}

std::string lambda_label(double l) {
  std::ostringstream os;
  os << io::format_double(l);
  return os.str();
}

}  // namespace

void prepare_output_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw UsageError(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!force) throw UsageError("refusing to overwrite " + dir.string() + " (use --force)");
      fs::remove_all(dir);
    }
  }
  fs::create_directories(dir);
}

ordered_json noise_stats_json(const data::Dataset& ds) {
  const auto r = data::realized_noise(ds);
  ordered_json j;
  j["n_train"] = ds.train.n;
  ordered_json d = ordered_json::array();
  for (std::size_t i = 0; i < r.discrete_nominal.size(); ++i)
    d.push_back({{"set", i}, {"nominal", r.discrete_nominal[i]}, {"realized", r.discrete_realized[i]}});
  ordered_json c = ordered_json::array();
  for (std::size_t i = 0; i < r.continuous_nominal.size(); ++i)
    c.push_back({{"set", i}, {"nominal", r.continuous_nominal[i]}, {"realized", r.continuous_realized[i]}});
  j["discrete_flip_rates"] = d;
  j["continuous_outlier_rates"] = c;
  return j;
}

void write_run_dir(const fs::path& dir, train::TrainResult& res, const train::ExperimentConfig& cfg) {
  models::save_checkpoint(dir / "checkpoint.nmt", res.models, cfg.iterations, cfg.seed,
                          {{"mode", train::to_string(cfg.mode)}});
  write_text(dir / "runlog.csv", res.log.to_csv());
  write_json(dir / "metrics.json", train::metrics_to_json(res.final_metrics));
  write_json(dir / "confusion.json", train::confusion_to_json(res.final_metrics));
  train::save_predictions(res.final_predictions, dir / "predictions.nmt");

  double peak = 0.0;
  for (const auto& r : res.log.rows) peak = std::max(peak, r.test_accuracy);
  ordered_json s;
  s["experiment"] = experiment_to_json(cfg);
  s["generator_steps"] = res.counters.generator_steps;
  s["discriminator_steps"] = res.counters.discriminator_steps;
  s["final_train_ce"] = res.final_train_ce;
  if (res.final_metrics.has_discrete) {
    s["final_accuracy"] = res.final_metrics.accuracy;
    s["peak_logged_accuracy"] = peak;
  }
  if (res.final_metrics.has_continuous) s["final_ccc"] = res.final_metrics.ccc_mean;
  write_json(dir / "summary.json", s);
}

void cmd_gen_data(const Options& o, std::ostream& log) {
  auto c = require_config(o);
  if (o.seed) c.dataset.seed = *o.seed;
  const fs::path path = o.out ? *o.out : c.dataset_path;
  if (path.empty()) throw UsageError("no dataset path: pass --out or set dataset.path");
  if (fs::exists(path) && !o.force)
    throw UsageError("refusing to overwrite " + path.string() + " (use --force)");
  data::Dataset ds;
  try {
    ds = data::generate(c.dataset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("dataset: ") + e.what());
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  data::save_dataset(ds, path);
  fs::path side = path;
  side += ".noise.json";
  write_json(side, noise_stats_json(ds));
  log << "wrote " << path.string() << " (" << ds.train.n << " train, " << ds.test.n << " test)\n";
}

void cmd_train(const Options& o, std::ostream& log) {
  auto c = require_config(o);
  if (o.seed) c.experiment.seed = *o.seed;
  const fs::path dir = output_dir(o, c);
  const auto ds = load_input_dataset(c, o);
  prepare_output_dir(dir, o.force);
  auto res = train::run_experiment(c.experiment, ds);
  write_run_dir(dir, res, c.experiment);
  log << "mode " << train::to_string(c.experiment.mode) << ": ";
  if (res.final_metrics.has_discrete) log << "accuracy " << res.final_metrics.accuracy << " ";
  if (res.final_metrics.has_continuous) log << "ccc " << res.final_metrics.ccc_mean << " ";
  log << "-> " << dir.string() << "\n";
}

void cmd_eval(const Options& o, std::ostream& log) {
  if (!o.checkpoint) throw UsageError("eval needs --checkpoint");
  if (!o.out) throw UsageError("eval needs --out");
  data::Dataset ds;
  if (o.dataset) {
    ds = data::load_dataset(*o.dataset);
  } else {
    ds = load_input_dataset(require_config(o), o);
  }
  auto ck = models::load_checkpoint(*o.checkpoint);
  if (ck.models.shapes.input_dim != ds.test.dim)
    throw std::invalid_argument("eval: checkpoint input_dim " + std::to_string(ck.models.shapes.input_dim) +
                                " does not match dataset feature size " + std::to_string(ds.test.dim));
  for (const auto& t : ck.models.shapes.tasks) {
    if (t.is_discrete() && t.size != ds.spec.classes)
      throw std::invalid_argument("eval: checkpoint class count does not match the dataset");
    if (!t.is_discrete() && t.size != ds.test.cont_dim)
      throw std::invalid_argument("eval: checkpoint continuous width does not match the dataset");
  }
  prepare_output_dir(*o.out, o.force);
  const auto m = train::evaluate(ck.models, ds.test, ds.spec.classes);
  write_json(*o.out / "metrics.json", train::metrics_to_json(m));
  write_json(*o.out / "confusion.json", train::confusion_to_json(m));
  log << "evaluated " << o.checkpoint->string() << " on " << m.n << " test samples\n";
}

void cmd_ablate(const Options& o, std::ostream& log) {
  auto c = require_config(o);
  if (o.seed) c.seeds = {*o.seed};
  const fs::path dir = output_dir(o, c);
  const auto ds = load_input_dataset(c, o);
  prepare_output_dir(dir, o.force);
  std::mutex mu;
  const auto rep = study::run_ablation(
      c.experiment, ds, c.seeds, o.jobs,
      [&](study::AblationSetting s, std::uint64_t seed, const train::TrainResult& r) {
        const fs::path run = dir / "runs" / study::to_string(s) / ("seed_" + std::to_string(seed));
        fs::create_directories(run);
        write_text(run / "runlog.csv", r.log.to_csv());
        write_json(run / "metrics.json", train::metrics_to_json(r.final_metrics));
        std::lock_guard lock(mu);
        log << study::to_string(s) << " seed " << seed << ": " << r.final_metrics.accuracy << "\n";
      });
  write_text(dir / "ablation.csv", rep.to_csv());
  log << "-> " << (dir / "ablation.csv").string() << "\n";
}

void cmd_sweep_lambda(const Options& o, std::ostream& log) {
  auto c = require_config(o);
  if (o.seed) c.seeds = {*o.seed};
  const fs::path dir = output_dir(o, c);
  const auto ds = load_input_dataset(c, o);
  study::SweepSpec spec{c.experiment, c.lambdas, c.seeds};
  spec.base.mode = train::Mode::proposed;
  prepare_output_dir(dir, o.force);
  std::mutex mu;
  const auto rep = study::run_sweep(
      spec, ds, o.jobs, [&](double l, std::uint64_t seed, const train::TrainResult& r) {
        const fs::path run = dir / "runs" / ("lambda_" + lambda_label(l)) / ("seed_" + std::to_string(seed));
        fs::create_directories(run);
        write_text(run / "runlog.csv", r.log.to_csv());
        write_json(run / "metrics.json", train::metrics_to_json(r.final_metrics));
        std::lock_guard lock(mu);
        log << "lambda " << l << " seed " << seed << " done\n";
      });
  write_text(dir / "sweep.csv", rep.to_csv());
  ordered_json sel;
  ordered_json per = ordered_json::array();
  for (double l : rep.lambdas())
    per.push_back({{"lambda", l},
                   {"median_accuracy", rep.median_accuracy(l)},
                   {"median_g_joint_loss", rep.median_g_joint_loss(l)}});
  sel["per_lambda"] = per;
  sel["best_median_accuracy"] = study::select_lambda(rep, study::SelectionStrategy::best_median_accuracy);
  sel["loss_plateau"] = study::select_lambda(rep, study::SelectionStrategy::loss_plateau);
  write_json(dir / "selection.json", sel);
  log << "-> " << (dir / "sweep.csv").string() << "\n";
}

}  // namespace nmt::cli
