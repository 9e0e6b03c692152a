#include "nmt/models/networks.hpp"

#include <sstream>
#include <stdexcept>

namespace nmt::models {

using namespace nmt::ad;

void TaskSpec::validate() const {
  if (kind == TaskKind::discrete && size < 2)
    throw std::invalid_argument("discrete task needs K >= 2, got " + std::to_string(size));
  if (kind == TaskKind::continuous && size < 1)
    throw std::invalid_argument("continuous task needs d >= 1");
}

std::string tasks_to_string(const std::vector<TaskSpec>& tasks) {
  std::string s;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (i) s += ',';
    s += (tasks[i].is_discrete() ? 'd' : 'c') + std::to_string(tasks[i].size);
  }
  return s;
}

std::vector<TaskSpec> tasks_from_string(const std::string& s) {
  std::vector<TaskSpec> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.size() < 2 || (item[0] != 'd' && item[0] != 'c'))
      throw std::invalid_argument("bad task descriptor '" + item + "'");
    const std::size_t n = std::stoul(item.substr(1));
    out.push_back(item[0] == 'd' ? TaskSpec::discrete(n) : TaskSpec::continuous(n));
    out.back().validate();
  }
  return out;
}

void ModelShapes::validate() const {
  auto positive = [](const std::vector<std::size_t>& v, const char* what) {
    for (auto w : v)
      if (w == 0) throw std::invalid_argument(std::string("model shapes: zero width in ") + what);
  };
  if (input_dim == 0 || latent_dim == 0 || stream_embed == 0)
    throw std::invalid_argument("model shapes: dimensions must be positive");
  if (tasks.empty()) throw std::invalid_argument("model shapes: no tasks");
  for (const auto& t : tasks) t.validate();
  positive(encoder_hidden, "encoder_hidden");
  positive(decoder_hidden, "decoder_hidden");
  positive(stream_hidden, "stream_hidden");
  positive(joint_hidden, "joint_hidden");
  if (!(output_hi > output_lo)) throw std::invalid_argument("model shapes: empty output range");
}

std::size_t ModelShapes::label_width() const {
  std::size_t w = 0;
  for (const auto& t : tasks) w += t.size;
  return w;
}

namespace {

std::vector<std::size_t> with_tail(std::vector<std::size_t> v, std::size_t tail) {
  v.push_back(tail);
  return v;
}

std::size_t trunk_width(const ModelShapes& s) {
  return s.encoder_hidden.empty() ? s.input_dim : s.encoder_hidden.back();
}

}  // namespace

std::size_t encoder_parameter_count(const ModelShapes& s) {
  const std::size_t h = trunk_width(s);
  std::size_t n = Mlp::parameter_count(s.input_dim, s.encoder_hidden);
  n += 2 * Linear::parameter_count(h, s.latent_dim);
  for (const auto& t : s.tasks) n += Linear::parameter_count(h, t.size);
  return n;
}

std::size_t decoder_parameter_count(const ModelShapes& s) {
  return Mlp::parameter_count(s.latent_dim + s.label_width(),
                              with_tail(s.decoder_hidden, s.input_dim));
}

std::size_t discriminator_parameter_count(const ModelShapes& s) {
  const auto stream = with_tail(s.stream_hidden, s.stream_embed);
  std::size_t n = Mlp::parameter_count(s.input_dim, stream) +
                  Mlp::parameter_count(s.latent_dim, stream);
  for (const auto& t : s.tasks) n += Mlp::parameter_count(t.size, stream);
  const std::size_t streams = s.tasks.size() + 2;
  n += streams * Linear::parameter_count(s.stream_embed, 1);
  n += Mlp::parameter_count(streams * s.stream_embed, with_tail(s.joint_hidden, 1));
  return n;
}

Encoder::Encoder(const ModelShapes& shapes, Rng& rng) : shapes_(shapes) {
  shapes_.validate();
  trunk_ = Mlp("encoder.trunk", shapes.input_dim, shapes.encoder_hidden, true, rng);
  const std::size_t h = trunk_.out_features();
  mean_head_ = Linear("encoder.y0_mean", h, shapes.latent_dim, rng);
  logvar_head_ = Linear("encoder.y0_logvar", h, shapes.latent_dim, rng);
  for (std::size_t i = 0; i < shapes.tasks.size(); ++i)
    task_heads_.emplace_back("encoder.task" + std::to_string(i + 1), h, shapes.tasks[i].size, rng);
}

EncoderOutput Encoder::forward(const Tensor& x, Rng& rng, LatentMode mode) const {
  if (x.dim() != 2 || x.cols() != shapes_.input_dim)
    throw ShapeError("encoder_forward", x.shape(), {x.dim() == 2 ? x.rows() : 0, shapes_.input_dim});
  const Tensor h = trunk_.forward(x);
  EncoderOutput out;
  out.y0_mean = mean_head_.forward(h);
  out.y0_logvar = maximum(minimum(logvar_head_.forward(h), 10.0), -10.0);
  out.y0_sample = mode == LatentMode::sample
                      ? gaussian_reparameterize(out.y0_mean, out.y0_logvar, rng)
                      : out.y0_mean;
  for (std::size_t i = 0; i < task_heads_.size(); ++i) {
    Tensor z = task_heads_[i].forward(h);
    out.predictions.push_back(shapes_.tasks[i].is_discrete() ? softmax_last_axis(z) : ad::tanh(z));
  }
  return out;
}

std::vector<Parameter*> Encoder::parameters() {
  std::vector<Parameter*> out;
  trunk_.collect(out);
  mean_head_.collect(out);
  logvar_head_.collect(out);
  for (auto& h : task_heads_) h.collect(out);
  return out;
}

Decoder::Decoder(const ModelShapes& shapes, Rng& rng) : shapes_(shapes) {
  shapes_.validate();
  net_ = Mlp("decoder", shapes.latent_dim + shapes.label_width(),
             with_tail(shapes.decoder_hidden, shapes.input_dim), false, rng);
}

namespace {

void check_labels(const char* op, const ModelShapes& s, std::size_t m,
                  std::span<const Tensor> labels) {
  if (labels.size() != s.tasks.size())
    throw std::invalid_argument(std::string(op) + ": expected " + std::to_string(s.tasks.size()) +
                                " label tensors, got " + std::to_string(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Shape want{m, s.tasks[i].size};
    if (labels[i].shape() != want)
      throw ShapeError(std::string(op) + " (task " + std::to_string(i + 1) + ")",
                       labels[i].shape(), want);
  }
}

}  // namespace

Tensor Decoder::forward(const Tensor& y0, std::span<const Tensor> labels) const {
  if (y0.dim() != 2 || y0.cols() != shapes_.latent_dim)
    throw ShapeError("decoder_forward (y0)", y0.shape(), {0, shapes_.latent_dim});
  check_labels("decoder_forward", shapes_, y0.rows(), labels);
  std::vector<Tensor> parts{y0};
  parts.insert(parts.end(), labels.begin(), labels.end());
  const Tensor t = ad::tanh(net_.forward(concat_last_axis(parts)));
  const double half = 0.5 * (shapes_.output_hi - shapes_.output_lo);
  const double mid = 0.5 * (shapes_.output_hi + shapes_.output_lo);
  return add_scalar(multiply_scalar(t, half), mid);
}

std::vector<Parameter*> Decoder::parameters() {
  std::vector<Parameter*> out;
  net_.collect(out);
  return out;
}

Discriminator::Discriminator(const ModelShapes& shapes, Rng& rng) : shapes_(shapes) {
  shapes_.validate();
  const auto stream = with_tail(shapes.stream_hidden, shapes.stream_embed);
  streams_.emplace_back("disc.stream_x", shapes.input_dim, stream, true, rng);
  streams_.emplace_back("disc.stream_y0", shapes.latent_dim, stream, true, rng);
  for (std::size_t i = 0; i < shapes.tasks.size(); ++i)
    streams_.emplace_back("disc.stream_y" + std::to_string(i + 1), shapes.tasks[i].size, stream,
                          true, rng);
  for (std::size_t i = 0; i < streams_.size(); ++i)
    marginal_heads_.emplace_back("disc.marginal" + std::to_string(i), shapes.stream_embed, 1, rng);
  joint_ = Mlp("disc.joint", streams_.size() * shapes.stream_embed,
               with_tail(shapes.joint_hidden, 1), false, rng);
}

Scores Discriminator::forward(const Tensor& x, const Tensor& y0,
                              std::span<const Tensor> labels) const {
  if (x.dim() != 2 || x.cols() != shapes_.input_dim)
    throw ShapeError("discriminator_forward (x)", x.shape(), {0, shapes_.input_dim});
  const std::size_t m = x.rows();
  if (y0.shape() != Shape{m, shapes_.latent_dim})
    throw ShapeError("discriminator_forward (y0)", y0.shape(), {m, shapes_.latent_dim});
  check_labels("discriminator_forward", shapes_, m, labels);

  std::vector<Tensor> embeds;
  embeds.push_back(streams_[0].forward(x));
  embeds.push_back(streams_[1].forward(y0));
  for (std::size_t i = 0; i < labels.size(); ++i) embeds.push_back(streams_[i + 2].forward(labels[i]));

  Scores s;
  s.x = marginal_heads_[0].forward(embeds[0]);
  for (std::size_t i = 1; i < embeds.size(); ++i) s.y.push_back(marginal_heads_[i].forward(embeds[i]));
  s.joint = joint_.forward(concat_last_axis(embeds));
  return s;
}

std::vector<Parameter*> Discriminator::parameters() {
  std::vector<Parameter*> out;
  for (auto& s : streams_) s.collect(out);
  for (auto& h : marginal_heads_) h.collect(out);
  joint_.collect(out);
  return out;
}

Models Models::create(const ModelShapes& shapes, std::uint64_t seed) {
  shapes.validate();
  Models m;
  m.shapes = shapes;
  Rng enc = derive_rng(seed, "init.encoder");
  Rng dec = derive_rng(seed, "init.decoder");
  Rng dis = derive_rng(seed, "init.discriminator");
  m.encoder = Encoder(shapes, enc);
  m.decoder = Decoder(shapes, dec);
  m.discriminator = Discriminator(shapes, dis);
  return m;
}

std::vector<Parameter*> Models::generator_parameters() {
  auto out = encoder.parameters();
  auto d = decoder.parameters();
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

std::vector<Parameter*> Models::all_parameters() {
  auto out = generator_parameters();
  auto d = discriminator.parameters();
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

Tensor one_hot(std::span<const int> classes, std::size_t k) {
  std::vector<double> v(classes.size() * k, 0.0);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] < 0 || static_cast<std::size_t>(classes[i]) >= k)
      throw std::out_of_range("one_hot: class " + std::to_string(classes[i]) + " outside [0," +
                              std::to_string(k) + ")");
    v[i * k + static_cast<std::size_t>(classes[i])] = 1.0;
  }
  return Tensor::from_values({classes.size(), k}, std::move(v));
}

}  // namespace nmt::models
