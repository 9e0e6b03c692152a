// nmt: dataset generation, training, evaluation, ablations and lambda sweeps.

#include <iostream>

#include "CLI11.hpp"
#include "nmt/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Noisy multi-task label learning experiments"};
  app.require_subcommand(1);

  nmt::cli::Options opts;
  std::string config, out, checkpoint, dataset;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment config (JSON)");
    sub->add_option("--out", out, "output file or directory");
    sub->add_option("--seed", seed, "override the seed (or the seed list)");
    sub->add_option("--jobs", opts.jobs, "parallel runs")->check(CLI::PositiveNumber);
    sub->add_flag("--force", opts.force, "overwrite existing outputs");
  };
  auto* gen = app.add_subcommand("gen-data", "generate a dataset and its noise statistics");
  auto* train = app.add_subcommand("train", "train one configuration into a run directory");
  auto* eval = app.add_subcommand("eval", "re-evaluate a checkpoint on a dataset's test split");
  auto* ablate = app.add_subcommand("ablate", "run the five-setting ablation table");
  auto* sweep = app.add_subcommand("sweep-lambda", "sweep the adversarial weight lambda");
  for (auto* s : {gen, train, eval, ablate, sweep}) add_common(s);
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--dataset", dataset, "dataset file (defaults to the config's)");

  CLI11_PARSE(app, argc, argv);

  if (!config.empty()) opts.config = config;
  if (!out.empty()) opts.out = out;
  if (!checkpoint.empty()) opts.checkpoint = checkpoint;
  if (!dataset.empty()) opts.dataset = dataset;
  for (auto* s : {gen, train, eval, ablate, sweep})
    if (s->count("--seed")) opts.seed = seed;

  try {
    if (gen->parsed()) nmt::cli::cmd_gen_data(opts, std::cout);
    if (train->parsed()) nmt::cli::cmd_train(opts, std::cout);
    if (eval->parsed()) nmt::cli::cmd_eval(opts, std::cout);
    if (ablate->parsed()) nmt::cli::cmd_ablate(opts, std::cout);
    if (sweep->parsed()) nmt::cli::cmd_sweep_lambda(opts, std::cout);
  } catch (const nmt::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nmt::cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nmt::train::TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
