#include "nmt/train/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "nmt/autodiff/adam.hpp"
#include "nmt/binary_io.hpp"
#include "nmt/random.hpp"

namespace nmt::train {

using ad::Parameter;
using ad::Tensor;
using models::TaskSpec;

std::vector<TaskSpec> TaskLayout::tasks() const {
  std::vector<TaskSpec> out;
  for (const auto& h : heads) out.push_back(h.task);
  return out;
}

std::size_t TaskLayout::discrete_count() const {
  return static_cast<std::size_t>(
      std::count_if(heads.begin(), heads.end(), [](const Head& h) { return h.task.is_discrete(); }));
}

std::size_t TaskLayout::continuous_count() const { return heads.size() - discrete_count(); }

TaskLayout make_layout(const ExperimentConfig& cfg, const data::Dataset& ds) {
  const auto& sp = ds.spec;
  const bool want_d = cfg.tasks != TaskSelection::continuous;
  const bool want_c = cfg.tasks != TaskSelection::discrete && sp.continuous_dim > 0;
  if (cfg.tasks == TaskSelection::continuous && sp.continuous_dim == 0)
    throw std::invalid_argument("config: tasks=continuous but the dataset has no continuous labels");
  const TaskSpec dk = TaskSpec::discrete(sp.classes);
  const TaskSpec ck = TaskSpec::continuous(sp.continuous_dim);
  const std::size_t nd = ds.train.noisy_class.size();
  const std::size_t nc = ds.train.noisy_cont.size();

  TaskLayout l;
  switch (cfg.mode) {
    case Mode::clean_baseline:
      if (want_d) l.heads.push_back({dk, LabelSource::clean, 0});
      if (want_c) l.heads.push_back({ck, LabelSource::clean, 0});
      break;
    case Mode::majority_vote_baseline:
      if (want_d) {
        if (nd == 0) throw std::invalid_argument("majority vote needs noisy discrete label sets");
        l.heads.push_back({dk, LabelSource::majority_vote, 0});
      }
      if (want_c) {
        if (nc == 0) throw std::invalid_argument("majority vote needs noisy continuous label sets");
        l.heads.push_back({ck, LabelSource::set_mean, 0});
      }
      break;
    case Mode::forward_correction_baseline:
    case Mode::proposed:
    case Mode::noisy_baseline:
      if (want_d) {
        if (nd == 0) throw std::invalid_argument("dataset has no noisy discrete label sets");
        for (std::size_t k = 0; k < nd; ++k) l.heads.push_back({dk, LabelSource::noisy_set, k});
      }
      if (want_c) {
        if (nc == 0) throw std::invalid_argument("dataset has no noisy continuous label sets");
        for (std::size_t k = 0; k < nc; ++k) l.heads.push_back({ck, LabelSource::noisy_set, k});
      }
      break;
  }
  if (l.heads.empty()) throw std::invalid_argument("config selects no label tasks");
  return l;
}

models::ModelShapes make_shapes(const ExperimentConfig& cfg, const data::Dataset& ds,
                                const TaskLayout& layout) {
  models::ModelShapes s;
  s.input_dim = ds.train.dim;
  s.latent_dim = cfg.network.latent_dim;
  s.tasks = layout.tasks();
  s.encoder_hidden = cfg.network.encoder_hidden;
  s.decoder_hidden = cfg.network.decoder_hidden;
  s.stream_hidden = cfg.network.stream_hidden;
  s.stream_embed = cfg.network.stream_embed;
  s.joint_hidden = cfg.network.joint_hidden;
  const auto [lo, hi] = std::minmax_element(ds.train.x.begin(), ds.train.x.end());
  s.output_lo = *lo;
  s.output_hi = *hi > *lo ? *hi : *lo + 1.0;
  return s;
}

// ---------------------------------------------------------------------------
// prediction and metrics

Predictions predict(models::Models& m, const std::vector<double>& x, std::size_t n) {
  if (n == 0) throw std::invalid_argument("predict: empty input");
  const std::size_t dim = m.shapes.input_dim;
  if (x.size() != n * dim) throw std::invalid_argument("predict: input has wrong size");
  auto params = m.all_parameters();
  ad::set_requires_grad(params, false);
  Rng unused(0);
  auto out = m.encoder.forward(Tensor::from_values({n, dim}, x), unused, models::LatentMode::mean);
  ad::set_requires_grad(params, true);
  Predictions p;
  p.n = n;
  p.tasks = m.shapes.tasks;
  for (const auto& t : out.predictions) {
    auto v = t.values();
    p.values.emplace_back(v.begin(), v.end());
  }
  return p;
}

void save_predictions(const Predictions& p, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write predictions " + path.string());
  io::write_header(os, kPredictionsMagic, kPredictionsVersion,
                   {{"n", std::to_string(p.n)}, {"tasks", models::tasks_to_string(p.tasks)}});
  io::Writer w(os);
  for (const auto& v : p.values) w.f64s(v);
}

Predictions load_predictions(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open predictions " + path.string());
  const auto h = io::read_header(is, kPredictionsMagic, kPredictionsVersion);
  Predictions p;
  p.n = std::stoul(io::header_get(h, "n"));
  p.tasks = models::tasks_from_string(io::header_get(h, "tasks"));
  io::Reader r(is);
  for (const auto& t : p.tasks) {
    p.values.push_back(r.f64s());
    if (p.values.back().size() != p.n * t.size)
      throw io::FormatError("predictions: head array has wrong length");
  }
  r.expect_eof();
  return p;
}

namespace {

DiscreteMetrics discrete_metrics(const std::vector<double>& probs, const std::vector<int>& truth,
                                 std::size_t k) {
  DiscreteMetrics m;
  m.confusion.assign(k, std::vector<long long>(k, 0));
  const std::size_t n = truth.size();
  long long correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = probs.begin() + static_cast<std::ptrdiff_t>(i * k);
    const int pred = static_cast<int>(std::max_element(row, row + static_cast<std::ptrdiff_t>(k)) - row);
    ++m.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred)];
    correct += pred == truth[i];
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return m;
}

ContinuousMetrics continuous_metrics(const std::vector<double>& pred, const std::vector<double>& truth,
                                     std::size_t n, std::size_t d) {
  ContinuousMetrics m;
  std::vector<double> a(n), b(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = pred[i * d + j];
      b[i] = truth[i * d + j];
    }
    m.ccc.push_back(objectives::ccc_value(a, b));
  }
  m.ccc_mean = std::accumulate(m.ccc.begin(), m.ccc.end(), 0.0) / static_cast<double>(d);
  m.mse = objectives::mse_value(pred, truth);
  return m;
}

}  // namespace

MetricsReport evaluate_predictions(const Predictions& p, const data::Split& test, std::size_t classes) {
  if (test.n == 0 || p.n == 0) throw std::invalid_argument("evaluate: empty test set");
  if (p.n != test.n) throw std::invalid_argument("evaluate: prediction count differs from test size");
  if (p.values.size() != p.tasks.size()) throw std::invalid_argument("evaluate: malformed predictions");
  MetricsReport r;
  r.n = test.n;
  for (std::size_t h = 0; h < p.tasks.size(); ++h) {
    const auto& t = p.tasks[h];
    const auto& v = p.values[h];
    if (v.size() != p.n * t.size) throw std::invalid_argument("evaluate: head array has wrong length");
    if (t.is_discrete()) {
      if (t.size != classes) throw std::invalid_argument("evaluate: head class count mismatch");
      r.discrete_heads.push_back(discrete_metrics(v, test.clean_class, classes));
    } else {
      if (t.size != test.cont_dim) throw std::invalid_argument("evaluate: continuous width mismatch");
      r.continuous_heads.push_back(continuous_metrics(v, test.clean_cont, p.n, t.size));
    }
  }
  if (!r.discrete_heads.empty()) {
    r.has_discrete = true;
    for (const auto& h : r.discrete_heads) r.accuracy += h.accuracy;
    r.accuracy /= static_cast<double>(r.discrete_heads.size());
  }
  if (!r.continuous_heads.empty()) {
    r.has_continuous = true;
    const double k = static_cast<double>(r.continuous_heads.size());
    r.ccc.assign(test.cont_dim, 0.0);
    for (const auto& h : r.continuous_heads) {
      for (std::size_t j = 0; j < h.ccc.size(); ++j) r.ccc[j] += h.ccc[j];
      r.ccc_mean += h.ccc_mean;
      r.mse += h.mse;
    }
    for (double& v : r.ccc) v /= k;
    r.ccc_mean /= k;
    r.mse /= k;
  }
  return r;
}

MetricsReport evaluate(models::Models& m, const data::Split& test, std::size_t classes) {
  if (test.n == 0) throw std::invalid_argument("evaluate: empty test set");
  return evaluate_predictions(predict(m, test.x, test.n), test, classes);
}

// ---------------------------------------------------------------------------
// run log

std::vector<std::string> RunLog::columns() const {
  std::vector<std::string> c{"iteration", "f_total"};
  if (rows.empty()) return c;
  const auto& r = rows.front();
  for (std::size_t i = 0; i < r.train.ce_per_discrete_task.size(); ++i) c.push_back("ce_" + std::to_string(i));
  for (std::size_t i = 0; i < r.train.sim_per_continuous_task.size(); ++i)
    c.push_back("sim_" + std::to_string(i));
  for (const char* s : {"adv_generator", "adv_discriminator", "generator_total"}) c.emplace_back(s);
  const bool disc = !r.test_head_accuracy.empty();
  const bool cont = !r.train.sim_per_continuous_task.empty();
  if (disc) {
    c.emplace_back("train_ce");
    c.emplace_back("test_accuracy");
    for (std::size_t i = 0; i < r.test_head_accuracy.size(); ++i)
      c.push_back("test_accuracy_" + std::to_string(i));
  }
  if (cont) {
    c.emplace_back("test_ccc");
    c.emplace_back("test_mse");
  }
  c.emplace_back("g_joint_loss");
  c.emplace_back("d_joint_loss");
  return c;
}

std::string RunLog::to_csv() const {
  std::ostringstream os;
  const auto cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  auto f = [](double v) { return io::format_double(v); };
  for (const auto& r : rows) {
    os << r.iteration << "," << f(r.train.f_total);
    for (double v : r.train.ce_per_discrete_task) os << "," << f(v);
    for (double v : r.train.sim_per_continuous_task) os << "," << f(v);
    os << "," << f(r.train.adv_generator) << "," << f(r.train.adv_discriminator) << ","
       << f(r.train.generator_total);
    if (!r.test_head_accuracy.empty()) {
      os << "," << f(r.train_ce) << "," << f(r.test_accuracy);
      for (double v : r.test_head_accuracy) os << "," << f(v);
    }
    if (!r.train.sim_per_continuous_task.empty()) os << "," << f(r.test_ccc) << "," << f(r.test_mse);
    os << "," << f(r.g_joint_loss) << "," << f(r.d_joint_loss) << "\n";
  }
  return os.str();
}

TrainingDiverged::TrainingDiverged(std::uint64_t it, objectives::LossBreakdown bd, const std::string& what)
    : std::runtime_error("non-finite value at iteration " + std::to_string(it) + " (f_total=" +
                         io::format_double(bd.f_total) + "): " + what),
      iteration(it),
      breakdown(std::move(bd)) {}

std::vector<noise::TransitionMatrix> oracle_transitions(const data::Dataset& ds) {
  std::vector<noise::TransitionMatrix> out;
  for (double r : ds.spec.noise.discrete_rates) out.push_back(noise::uniform_flip_matrix(ds.spec.classes, r));
  return out;
}

// ---------------------------------------------------------------------------
// training

namespace {

struct Targets {
  TaskSpec task;
  std::vector<int> cls;
  std::vector<double> cont;
};

std::vector<Targets> build_targets(const TaskLayout& layout, const data::Dataset& ds, std::uint64_t seed) {
  const auto& tr = ds.train;
  std::vector<Targets> out;
  for (const auto& h : layout.heads) {
    Targets t{h.task, {}, {}};
    if (h.task.is_discrete()) {
      switch (h.source) {
        case LabelSource::clean: t.cls = tr.clean_class; break;
        case LabelSource::noisy_set: t.cls = tr.noisy_class.at(h.set); break;
        case LabelSource::majority_vote: {
          Rng rng = derive_rng(seed, "labels.majority_vote");
          t.cls = noise::majority_vote(tr.noisy_class, rng);
          break;
        }
        case LabelSource::set_mean: throw std::logic_error("set_mean on a discrete head");
      }
    } else {
      switch (h.source) {
        case LabelSource::clean: t.cont = tr.clean_cont; break;
        case LabelSource::noisy_set: t.cont = tr.noisy_cont.at(h.set); break;
        case LabelSource::set_mean:
          t.cont.assign(tr.clean_cont.size(), 0.0);
          for (const auto& s : tr.noisy_cont)
            for (std::size_t i = 0; i < s.size(); ++i) t.cont[i] += s[i];
          for (double& v : t.cont) v /= static_cast<double>(tr.noisy_cont.size());
          break;
        case LabelSource::majority_vote: throw std::logic_error("majority vote on a continuous head");
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

Tensor gather_rows(const std::vector<double>& src, std::size_t width, std::span<const std::size_t> idx) {
  std::vector<double> v(idx.size() * width);
  for (std::size_t r = 0; r < idx.size(); ++r)
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(idx[r] * width), width,
                v.begin() + static_cast<std::ptrdiff_t>(r * width));
  return Tensor::from_values({idx.size(), width}, std::move(v));
}

std::vector<Tensor> gather_targets(const std::vector<Targets>& ts, std::span<const std::size_t> idx) {
  std::vector<Tensor> out;
  for (const auto& t : ts) {
    if (t.task.is_discrete()) {
      std::vector<int> c(idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r) c[r] = t.cls[idx[r]];
      out.push_back(models::one_hot(c, t.task.size));
    } else {
      out.push_back(gather_rows(t.cont, t.task.size, idx));
    }
  }
  return out;
}

// Epoch-wise shuffled minibatches.
class Batcher {
 public:
  Batcher(std::size_t n, Rng rng) : order_(n), rng_(std::move(rng)) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    pos_ = n;
  }
  std::vector<std::size_t> next(std::size_t m) {
    std::vector<std::size_t> out;
    out.reserve(m);
    while (out.size() < m) {
      if (pos_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  std::vector<std::size_t> order_;
  std::size_t pos_;
  Rng rng_;
};

Tensor standard_normal(std::size_t m, std::size_t d, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> v(m * d);
  for (double& x : v) x = nd(rng);
  return Tensor::from_values({m, d}, std::move(v));
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, const data::Dataset& ds, const TrainOptions& opts,
         std::vector<noise::TransitionMatrix> transitions)
      : cfg_(cfg), ds_(ds), opts_(opts) {
    cfg_.validate();
    adversarial_ = cfg_.mode == Mode::proposed;
    layout_ = make_layout(cfg_, ds_);
    if (cfg_.batch_size > ds_.train.n)
      throw std::invalid_argument("config: batch_size exceeds the training set size");
    models_ = models::Models::create(make_shapes(cfg_, ds_, layout_), cfg_.seed);
    targets_ = build_targets(layout_, ds_, cfg_.seed);
    if (cfg_.mode == Mode::forward_correction_baseline) {
      for (const auto& t : transitions) t.validate();
      for (const auto& h : layout_.heads) {
        if (!h.task.is_discrete()) {
          corrections_.emplace_back();
          continue;
        }
        if (h.set >= transitions.size())
          throw std::invalid_argument("forward correction: no transition matrix for label set " +
                                      std::to_string(h.set));
        const auto& t = transitions[h.set];
        if (t.classes() != h.task.size)
          throw std::invalid_argument("forward correction: transition matrix size mismatch");
        const std::size_t k = t.classes();
        std::vector<double> tt(k * k);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) tt[i * k + j] = t.at(j, i);
        corrections_.push_back(Tensor::from_values({k, k}, std::move(tt)));
      }
    }
    adam_.lr = cfg_.lr;
    adam_.beta1 = cfg_.beta1;
    adam_.beta2 = cfg_.beta2;

    std::vector<std::size_t> all(ds_.train.n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    train_x_ = gather_rows(ds_.train.x, ds_.train.dim, all);
    train_targets_ = gather_targets(targets_, all);
  }

  TrainResult run() {
    Batcher batches(ds_.train.n, derive_rng(cfg_.seed, "train.batches"));
    Rng enc_rng = derive_rng(cfg_.seed, "train.encoder_noise");
    Rng prior_rng = derive_rng(cfg_.seed, "train.prior");
    auto gen = adversarial_ ? models_.generator_parameters() : models_.encoder.parameters();
    auto dis = models_.discriminator_parameters();
    TrainResult res;

    log_row(0, res.log);
    for (std::uint64_t it = 1; it <= cfg_.iterations; ++it) {
      last_ = {};
      try {
        const auto idx = batches.next(cfg_.batch_size);
        const Tensor xb = gather_rows(ds_.train.x, ds_.train.dim, idx);
        const auto tb = gather_targets(targets_, idx);

        ad::set_requires_grad(dis, false);
        ad::zero_grads(gen);
        auto enc = models_.encoder.forward(xb, enc_rng);
        Tensor obj = supervised(enc.predictions, tb, &last_);
        if (adversarial_) {
          const Tensor y0 = standard_normal(cfg_.batch_size, models_.shapes.latent_dim, prior_rng);
          const auto [se, sd] = scores(xb, enc, y0, tb);
          obj = objectives::generator_objective(obj, se, sd, cfg_.lambda, cfg_.ablation);
        }
        obj.backward();
        ad::adam_step(gen, adam_);
        ++res.counters.generator_steps;
        ad::set_requires_grad(dis, true);
        if (opts_.on_step) opts_.on_step(StepKind::generator, models_);

        if (adversarial_) {
          ad::set_requires_grad(gen, false);
          for (std::size_t k = 0; k < cfg_.d_steps_per_g_step; ++k) {
            ad::zero_grads(dis);
            auto enc_d = models_.encoder.forward(xb, enc_rng);
            const Tensor y0 = standard_normal(cfg_.batch_size, models_.shapes.latent_dim, prior_rng);
            const auto [se, sd] = scores(xb, enc_d, y0, tb);
            ad::neg(objectives::discriminator_objective(se, sd, cfg_.ablation)).backward();
            ad::adam_step(dis, adam_);
            ++res.counters.discriminator_steps;
            if (opts_.on_step) opts_.on_step(StepKind::discriminator, models_);
          }
          ad::set_requires_grad(gen, true);
        }
      } catch (const ad::NonFiniteError& e) {
        throw TrainingDiverged(it, last_, e.what());
      }
      if (it % cfg_.log_interval == 0 || it == cfg_.iterations) log_row(it, res.log);
    }

    res.final_predictions = predict(models_, ds_.test.x, ds_.test.n);
    res.final_metrics = evaluate_predictions(res.final_predictions, ds_.test, ds_.spec.classes);
    res.final_train_ce = res.log.rows.back().train_ce;
    res.layout = layout_;
    res.models = std::move(models_);
    return res;
  }

 private:
  Tensor supervised(const std::vector<Tensor>& preds, const std::vector<Tensor>& targets,
                    objectives::LossBreakdown* bd) const {
    const auto tasks = layout_.tasks();
    if (corrections_.empty())
      return objectives::supervised_loss(preds, targets, tasks, cfg_.gamma, cfg_.sim_loss, bd);
    std::vector<Tensor> corrected;
    for (std::size_t i = 0; i < preds.size(); ++i)
      corrected.push_back(tasks[i].is_discrete() ? ad::matmul(preds[i], corrections_[i]) : preds[i]);
    return objectives::supervised_loss(corrected, targets, tasks, cfg_.gamma, cfg_.sim_loss, bd);
  }

  std::pair<models::Scores, models::Scores> scores(const Tensor& x, const models::EncoderOutput& enc,
                                                   const Tensor& y0, const std::vector<Tensor>& labels) {
    models::Scores se = models_.discriminator.forward(x, enc.y0_sample, enc.predictions);
    const Tensor xd = cfg_.ablation.no_decoder ? x : models_.decoder.forward(y0, labels);
    models::Scores sd = models_.discriminator.forward(xd, y0, labels);
    return {std::move(se), std::move(sd)};
  }

  // Diagnostics on the full training split and the test split. Uses its own
  // noise stream so logging never perturbs training.
  void log_row(std::uint64_t it, RunLog& log) {
    auto params = models_.all_parameters();
    ad::set_requires_grad(params, false);
    LogRow row;
    row.iteration = it;
    Rng probe = derive_rng(cfg_.seed, "probe");
    auto enc = models_.encoder.forward(train_x_, probe, models::LatentMode::mean);
    supervised(enc.predictions, train_targets_, &row.train);
    row.train.generator_total = row.train.f_total;
    if (adversarial_) {
      const Tensor y0 = standard_normal(ds_.train.n, models_.shapes.latent_dim, probe);
      const auto [se, sd] = scores(train_x_, enc, y0, train_targets_);
      row.train.score_terms = objectives::score_terms(se, sd, cfg_.ablation);
      for (const auto& t : row.train.score_terms) {
        if (!t.active) continue;
        row.train.adv_generator += t.generator;
        row.train.adv_discriminator += t.discriminator;
      }
      row.train.generator_total = row.train.f_total + cfg_.lambda * row.train.adv_generator;
      row.g_joint_loss = row.train.score_terms.front().generator;
      row.d_joint_loss = -row.train.score_terms.front().discriminator;
    }
    double ce = 0.0;
    std::size_t nd = 0;
    for (std::size_t i = 0; i < enc.predictions.size(); ++i) {
      if (!layout_.heads[i].task.is_discrete()) continue;
      ce += objectives::cross_entropy(enc.predictions[i], train_targets_[i]).item();
      ++nd;
    }
    row.train_ce = nd ? ce / static_cast<double>(nd) : 0.0;
    ad::set_requires_grad(params, true);

    const auto m = evaluate(models_, ds_.test, ds_.spec.classes);
    if (m.has_discrete) {
      row.test_accuracy = m.accuracy;
      for (const auto& h : m.discrete_heads) row.test_head_accuracy.push_back(h.accuracy);
    }
    if (m.has_continuous) {
      row.test_ccc = m.ccc_mean;
      row.test_mse = m.mse;
    }
    log.rows.push_back(std::move(row));
  }

  ExperimentConfig cfg_;
  const data::Dataset& ds_;
  const TrainOptions& opts_;
  bool adversarial_ = false;
  TaskLayout layout_;
  models::Models models_;
  std::vector<Targets> targets_;
  std::vector<Tensor> corrections_;  // per head; T transposed
  ad::AdamConfig adam_;
  Tensor train_x_;
  std::vector<Tensor> train_targets_;
  objectives::LossBreakdown last_;
};

}  // namespace

TrainResult train_proposed(const ExperimentConfig& cfg, const data::Dataset& ds, const TrainOptions& opts) {
  if (cfg.mode != Mode::proposed) throw std::invalid_argument("train_proposed: mode must be proposed");
  return Runner(cfg, ds, opts, {}).run();
}

TrainResult train_baseline(const ExperimentConfig& cfg, const data::Dataset& ds, const TrainOptions& opts) {
  if (cfg.mode != Mode::clean_baseline && cfg.mode != Mode::noisy_baseline &&
      cfg.mode != Mode::majority_vote_baseline)
    throw std::invalid_argument("train_baseline: mode must be a supervised baseline");
  return Runner(cfg, ds, opts, {}).run();
}

TrainResult train_forward_correction(const ExperimentConfig& cfg, const data::Dataset& ds,
                                     std::vector<noise::TransitionMatrix> transitions,
                                     const TrainOptions& opts) {
  if (cfg.mode != Mode::forward_correction_baseline)
    throw std::invalid_argument("train_forward_correction: mode must be forward_correction_baseline");
  return Runner(cfg, ds, opts, std::move(transitions)).run();
}

TrainResult run_experiment(const ExperimentConfig& cfg, const data::Dataset& ds, const TrainOptions& opts) {
  switch (cfg.mode) {
    case Mode::proposed: return train_proposed(cfg, ds, opts);
    case Mode::forward_correction_baseline:
      return train_forward_correction(
          cfg, ds, opts.transitions.empty() ? oracle_transitions(ds) : opts.transitions, opts);
    default: return train_baseline(cfg, ds, opts);
  }
}

}  // namespace nmt::train
