#include "nmt/models/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "nmt/binary_io.hpp"

namespace nmt::models {

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::size_t> split_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoul(item));
  return out;
}

void save_checkpoint(const std::filesystem::path& path, Models& models, std::uint64_t iteration,
                     std::uint64_t seed, const std::map<std::string, std::string>& meta) {
  const ModelShapes& s = models.shapes;
  io::Header h;
  for (const auto& [k, v] : meta) h["meta." + k] = v;
  h["input_dim"] = std::to_string(s.input_dim);
  h["latent_dim"] = std::to_string(s.latent_dim);
  h["tasks"] = tasks_to_string(s.tasks);
  h["encoder_hidden"] = join_sizes(s.encoder_hidden);
  h["decoder_hidden"] = join_sizes(s.decoder_hidden);
  h["stream_hidden"] = join_sizes(s.stream_hidden);
  h["stream_embed"] = std::to_string(s.stream_embed);
  h["joint_hidden"] = join_sizes(s.joint_hidden);
  h["output_lo"] = io::format_double(s.output_lo);
  h["output_hi"] = io::format_double(s.output_hi);
  h["iteration"] = std::to_string(iteration);
  h["seed"] = std::to_string(seed);

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
  io::write_header(os, kCheckpointMagic, kCheckpointVersion, h);
  io::Writer w(os);
  const auto params = models.all_parameters();
  w.u64(params.size());
  for (const ad::Parameter* p : params) {
    w.str(p->name);
    w.u64(p->step_count);
    w.f64s(std::vector<double>(p->tensor.values().begin(), p->tensor.values().end()));
    w.f64s(p->adam_m);
    w.f64s(p->adam_v);
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path.string());
  const io::Header h = io::read_header(is, kCheckpointMagic, kCheckpointVersion);

  ModelShapes s;
  s.input_dim = std::stoul(io::header_get(h, "input_dim"));
  s.latent_dim = std::stoul(io::header_get(h, "latent_dim"));
  s.tasks = tasks_from_string(io::header_get(h, "tasks"));
  s.encoder_hidden = split_sizes(io::header_get(h, "encoder_hidden"));
  s.decoder_hidden = split_sizes(io::header_get(h, "decoder_hidden"));
  s.stream_hidden = split_sizes(io::header_get(h, "stream_hidden"));
  s.stream_embed = std::stoul(io::header_get(h, "stream_embed"));
  s.joint_hidden = split_sizes(io::header_get(h, "joint_hidden"));
  s.output_lo = std::stod(io::header_get(h, "output_lo"));
  s.output_hi = std::stod(io::header_get(h, "output_hi"));

  Checkpoint ck;
  ck.iteration = std::stoull(io::header_get(h, "iteration"));
  ck.seed = std::stoull(io::header_get(h, "seed"));
  for (const auto& [k, v] : h)
    if (k.rfind("meta.", 0) == 0) ck.meta[k.substr(5)] = v;
  ck.models = Models::create(s, ck.seed);

  io::Reader r(is);
  const auto params = ck.models.all_parameters();
  if (r.u64() != params.size()) throw io::FormatError("checkpoint: parameter count mismatch");
  for (ad::Parameter* p : params) {
    const std::string name = r.str();
    if (name != p->name)
      throw io::FormatError("checkpoint: expected parameter '" + p->name + "', found '" + name + "'");
    p->step_count = r.u64();
    auto values = r.f64s();
    auto m = r.f64s();
    auto v = r.f64s();
    if (values.size() != p->tensor.numel() || m.size() != values.size() || v.size() != values.size())
      throw io::FormatError("checkpoint: size mismatch for '" + name + "'");
    std::copy(values.begin(), values.end(), p->tensor.mutable_values().begin());
    p->adam_m = std::move(m);
    p->adam_v = std::move(v);
  }
  r.expect_eof();
  return ck;
}

}  // namespace nmt::models
