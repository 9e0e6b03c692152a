#include "nmt/train/report.hpp"

namespace nmt::train {

using nlohmann::ordered_json;

namespace {

ordered_json continuous_json(const ContinuousMetrics& c) {
  return {{"ccc", c.ccc}, {"ccc_mean", c.ccc_mean}, {"mse", c.mse}};
}

}  // namespace

ordered_json metrics_to_json(const MetricsReport& m) {
  ordered_json j;
  j["n"] = m.n;
  if (m.has_discrete) {
    j["accuracy"] = m.accuracy;
    ordered_json heads = ordered_json::array();
    for (const auto& h : m.discrete_heads) heads.push_back(h.accuracy);
    j["head_accuracy"] = heads;
  }
  if (m.has_continuous) {
    j["ccc"] = m.ccc;
    j["ccc_mean"] = m.ccc_mean;
    j["mse"] = m.mse;
    ordered_json heads = ordered_json::array();
    for (const auto& h : m.continuous_heads) heads.push_back(continuous_json(h));
    j["continuous_heads"] = heads;
  }
  return j;
}

ordered_json confusion_to_json(const MetricsReport& m) {
  ordered_json j;
  j["n"] = m.n;
  ordered_json heads = ordered_json::array();
  for (const auto& h : m.discrete_heads) heads.push_back(h.confusion);
  j["heads"] = heads;
  return j;
}

}  // namespace nmt::train
