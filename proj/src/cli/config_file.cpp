#include "nmt/cli/config_file.hpp"

#include <fstream>
#include <set>

namespace nmt::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw ConfigError("config: key '" + key + "' " + msg);
}

void check_keys(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(prefix, "must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) fail(prefix.empty() ? k : prefix + "." + k, "is not recognised");
}

bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::string path_of(const std::string& prefix, const char* key) {
  return prefix.empty() ? key : prefix + "." + key;
}

template <class T>
void read(const json& obj, const std::string& prefix, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string name = path_of(prefix, key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(name, "must be a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(name, "must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) fail(name, "must be a number");
    out = v.get<double>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!non_negative_integer(v)) fail(name, "must be a non-negative integer");
    out = v.get<T>();
  } else {
    if (!v.is_array()) fail(name, "must be an array");
    out.clear();
    for (const auto& e : v) {
      using E = typename T::value_type;
      if constexpr (std::is_floating_point_v<E>) {
        if (!e.is_number()) fail(name, "must contain numbers");
      } else {
        if (!non_negative_integer(e)) fail(name, "must contain non-negative integers");
      }
      out.push_back(e.get<E>());
    }
  }
}

template <class E, class Parse>
void read_enum(const json& obj, const std::string& prefix, const char* key, E& out, Parse parse) {
  std::string s;
  if (!obj.contains(key)) return;
  read(obj, prefix, key, s);
  try {
    out = parse(s);
  } catch (const std::invalid_argument& e) {
    fail(path_of(prefix, key), e.what());
  }
}

void parse_dataset(const json& j, const std::filesystem::path& base, ConfigFile& cfg) {
  const std::string p = "dataset";
  check_keys(j, p,
             {"path", "generator", "n_train", "n_test", "classes", "input_dim", "side", "continuous_dim",
              "class_anchors", "anchor_jitter", "blob_spread", "center_distance", "pattern_noise", "seed",
              "noise"});
  auto& s = cfg.dataset;
  std::string path;
  read(j, p, "path", path);
  if (!path.empty()) cfg.dataset_path = base / path;
  read_enum(j, p, "generator", s.generator, data::generator_from_string);
  read(j, p, "n_train", s.n_train);
  read(j, p, "n_test", s.n_test);
  read(j, p, "classes", s.classes);
  read(j, p, "input_dim", s.input_dim);
  read(j, p, "side", s.side);
  read(j, p, "continuous_dim", s.continuous_dim);
  read(j, p, "class_anchors", s.class_anchors);
  read(j, p, "anchor_jitter", s.anchor_jitter);
  read(j, p, "blob_spread", s.blob_spread);
  read(j, p, "center_distance", s.center_distance);
  read(j, p, "pattern_noise", s.pattern_noise);
  read(j, p, "seed", s.seed);
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    check_keys(n, "dataset.noise", {"discrete_rates", "continuous_rates"});
    read(n, "dataset.noise", "discrete_rates", s.noise.discrete_rates);
    read(n, "dataset.noise", "continuous_rates", s.noise.continuous_rates);
  }
}

void parse_experiment(const json& j, ConfigFile& cfg) {
  const std::string p = "experiment";
  check_keys(j, p,
             {"mode", "tasks", "sim_loss", "ablation", "lambda", "gamma", "lr", "beta1", "beta2",
              "batch_size", "iterations", "d_steps_per_g_step", "log_interval", "seed", "network"});
  auto& e = cfg.experiment;
  read_enum(j, p, "mode", e.mode, train::mode_from_string);
  read_enum(j, p, "tasks", e.tasks, train::task_selection_from_string);
  read_enum(j, p, "sim_loss", e.sim_loss, train::similarity_from_string);
  read(j, p, "lambda", e.lambda);
  read(j, p, "gamma", e.gamma);
  read(j, p, "lr", e.lr);
  read(j, p, "beta1", e.beta1);
  read(j, p, "beta2", e.beta2);
  read(j, p, "batch_size", e.batch_size);
  read(j, p, "iterations", e.iterations);
  read(j, p, "d_steps_per_g_step", e.d_steps_per_g_step);
  read(j, p, "log_interval", e.log_interval);
  read(j, p, "seed", e.seed);
  if (j.contains("ablation")) {
    const json& a = j.at("ablation");
    check_keys(a, "experiment.ablation", {"no_joint", "no_marginal", "no_decoder"});
    read(a, "experiment.ablation", "no_joint", e.ablation.no_joint);
    read(a, "experiment.ablation", "no_marginal", e.ablation.no_marginal);
    read(a, "experiment.ablation", "no_decoder", e.ablation.no_decoder);
  }
  if (j.contains("network")) {
    const json& n = j.at("network");
    const std::string q = "experiment.network";
    check_keys(n, q,
               {"latent_dim", "encoder_hidden", "decoder_hidden", "stream_hidden", "stream_embed",
                "joint_hidden"});
    read(n, q, "latent_dim", e.network.latent_dim);
    read(n, q, "encoder_hidden", e.network.encoder_hidden);
    read(n, q, "decoder_hidden", e.network.decoder_hidden);
    read(n, q, "stream_hidden", e.network.stream_hidden);
    read(n, q, "stream_embed", e.network.stream_embed);
    read(n, q, "joint_hidden", e.network.joint_hidden);
  }
}

}  // namespace

ConfigFile parse_config(const json& j, const std::filesystem::path& base) {
  check_keys(j, "", {"schema_version", "dataset", "experiment", "seeds", "lambdas", "out", "notes"});
  if (!j.contains("schema_version")) fail("schema_version", "is required");
  int version = 0;
  read(j, "", "schema_version", version);
  if (version != kConfigSchemaVersion)
    fail("schema_version", "must be " + std::to_string(kConfigSchemaVersion) + ", got " +
                               std::to_string(version));
  ConfigFile cfg;
  if (j.contains("dataset")) parse_dataset(j.at("dataset"), base, cfg);
  if (j.contains("experiment")) parse_experiment(j.at("experiment"), cfg);
  read(j, "", "seeds", cfg.seeds);
  read(j, "", "lambdas", cfg.lambdas);
  if (j.contains("notes") && !j.at("notes").is_string() && !j.at("notes").is_array())
    fail("notes", "must be a string or an array of strings");
  std::string out;
  read(j, "", "out", out);
  if (!out.empty()) cfg.out = base / out;
  cfg.experiment.dataset = cfg.dataset_path;
  try {
    cfg.experiment.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  auto cfg = parse_config(j, std::filesystem::absolute(path).parent_path());
  cfg.source = path;
  return cfg;
}

ordered_json experiment_to_json(const train::ExperimentConfig& c) {
  ordered_json j;
  j["mode"] = train::to_string(c.mode);
  j["tasks"] = train::to_string(c.tasks);
  j["sim_loss"] = train::to_string(c.sim_loss);
  j["ablation"] = {{"no_joint", c.ablation.no_joint},
                   {"no_marginal", c.ablation.no_marginal},
                   {"no_decoder", c.ablation.no_decoder}};
  j["lambda"] = c.lambda;
  j["gamma"] = c.gamma;
  j["lr"] = c.lr;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["batch_size"] = c.batch_size;
  j["iterations"] = c.iterations;
  j["d_steps_per_g_step"] = c.d_steps_per_g_step;
  j["log_interval"] = c.log_interval;
  j["seed"] = c.seed;
  j["network"] = {{"latent_dim", c.network.latent_dim},
                  {"encoder_hidden", c.network.encoder_hidden},
                  {"decoder_hidden", c.network.decoder_hidden},
                  {"stream_hidden", c.network.stream_hidden},
                  {"stream_embed", c.network.stream_embed},
                  {"joint_hidden", c.network.joint_hidden}};
  return j;
}

ordered_json dataset_spec_to_json(const data::DatasetSpec& s) {
  ordered_json j;
  j["generator"] = data::to_string(s.generator);
  j["n_train"] = s.n_train;
  j["n_test"] = s.n_test;
  j["classes"] = s.classes;
  j["input_dim"] = s.input_dim;
  j["side"] = s.side;
  j["continuous_dim"] = s.continuous_dim;
  j["class_anchors"] = s.class_anchors;
  j["anchor_jitter"] = s.anchor_jitter;
  j["blob_spread"] = s.blob_spread;
  j["center_distance"] = s.center_distance;
  j["pattern_noise"] = s.pattern_noise;
  j["seed"] = s.seed;
  j["noise"] = {{"discrete_rates", s.noise.discrete_rates},
                {"continuous_rates", s.noise.continuous_rates}};
  return j;
}

}  // namespace nmt::cli
