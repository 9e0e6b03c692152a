#pragma once

#include "nmt/train/trainer.hpp"
#include "json.hpp"

namespace nmt::train {

nlohmann::ordered_json metrics_to_json(const MetricsReport& m);
nlohmann::ordered_json confusion_to_json(const MetricsReport& m);

}  // namespace nmt::train
