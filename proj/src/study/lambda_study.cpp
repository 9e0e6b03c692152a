#include "nmt/study/lambda_study.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nmt/binary_io.hpp"
#include "nmt/parallel.hpp"

namespace nmt::study {

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void SweepSpec::validate() const {
  if (lambdas.empty()) throw std::invalid_argument("sweep: lambda list is empty");
  if (seeds.empty()) throw std::invalid_argument("sweep: seed list is empty");
  std::set<double> seen;
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw std::invalid_argument("sweep: lambda values must be >= 0");
    if (!seen.insert(l).second) throw std::invalid_argument("sweep: duplicate lambda value");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw std::invalid_argument("sweep: duplicate seed");
  if (base.mode != train::Mode::proposed)
    throw std::invalid_argument("sweep: base config must use mode proposed");
  auto probe = base;
  probe.lambda = lambdas.front();
  probe.validate();
}

std::vector<double> SweepReport::lambdas() const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (out.empty() || out.back() != r.lambda) out.push_back(r.lambda);
  return out;
}

namespace {

std::vector<double> column(const SweepReport& rep, double lambda, double SweepRow::*field) {
  std::vector<double> v;
  for (const auto& r : rep.rows)
    if (r.lambda == lambda) v.push_back(r.*field);
  return v;
}

}  // namespace

double SweepReport::median_accuracy(double lambda) const {
  return median(column(*this, lambda, &SweepRow::final_accuracy));
}

double SweepReport::median_g_joint_loss(double lambda) const {
  return median(column(*this, lambda, &SweepRow::g_joint_loss));
}

std::string SweepReport::to_csv() const {
  std::ostringstream os;
  os << "lambda,seed,final_accuracy,final_ccc,g_joint_loss,d_joint_loss\n";
  auto f = [](double v) { return io::format_double(v); };
  for (const auto& r : rows)
    os << f(r.lambda) << "," << r.seed << "," << f(r.final_accuracy) << "," << f(r.final_ccc) << ","
       << f(r.g_joint_loss) << "," << f(r.d_joint_loss) << "\n";
  return os.str();
}

SweepReport run_sweep(const SweepSpec& spec, const data::Dataset& ds, std::size_t jobs,
                      const RunCallback& on_run) {
  spec.validate();
  std::vector<std::pair<double, std::uint64_t>> points;
  for (double l : spec.lambdas)
    for (std::uint64_t s : spec.seeds) points.emplace_back(l, s);
  std::sort(points.begin(), points.end());

  SweepReport rep;
  rep.rows.resize(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    auto cfg = spec.base;
    cfg.lambda = points[i].first;
    cfg.seed = points[i].second;
    const auto res = train::train_proposed(cfg, ds);
    SweepRow& row = rep.rows[i];
    row.lambda = cfg.lambda;
    row.seed = cfg.seed;
    row.final_accuracy = res.final_metrics.has_discrete ? res.final_metrics.accuracy : 0.0;
    row.final_ccc = res.final_metrics.has_continuous ? res.final_metrics.ccc_mean : 0.0;
    row.g_joint_loss = res.log.rows.back().g_joint_loss;
    row.d_joint_loss = res.log.rows.back().d_joint_loss;
    if (on_run) on_run(cfg.lambda, cfg.seed, res);
  });
  return rep;
}

SelectionStrategy strategy_from_string(const std::string& s) {
  if (s == "best_median_accuracy") return SelectionStrategy::best_median_accuracy;
  if (s == "loss_plateau") return SelectionStrategy::loss_plateau;
  throw std::invalid_argument("unknown selection strategy '" + s + "'");
}

std::string to_string(SelectionStrategy s) {
  return s == SelectionStrategy::best_median_accuracy ? "best_median_accuracy" : "loss_plateau";
}

double select_lambda(const SweepReport& report, SelectionStrategy strategy) {
  if (report.rows.empty()) throw std::invalid_argument("select_lambda: empty report");
  const auto ls = report.lambdas();
  double best = ls.front();
  if (strategy == SelectionStrategy::best_median_accuracy) {
    double best_acc = report.median_accuracy(best);
    for (double l : ls) {
      const double a = report.median_accuracy(l);
      if (a > best_acc) {
        best_acc = a;
        best = l;
      }
    }
    return best;
  }
  std::vector<double> all;
  for (const auto& r : report.rows) all.push_back(r.g_joint_loss);
  const double target = median(all);
  double best_gap = std::abs(report.median_g_joint_loss(best) - target);
  for (double l : ls) {
    const double gap = std::abs(report.median_g_joint_loss(l) - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = l;
    }
  }
  return best;
}

}  // namespace nmt::study
