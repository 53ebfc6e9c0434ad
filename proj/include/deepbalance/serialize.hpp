#pragma once

// Versioned JSON model bundles. Layout (version 1):
//
//   {
//     "format": "deepbalance-ensemble", "version": 1,
//     "feature_names": [...],
//     "config": { "mtry", "total_nets", "max_it", "seed", "use_feature_sampling",
//                 "aggregation", "resample": {"method", ...}, "dbn": {...} },
//     "members": [ { "feature_indices": [...],
//                    "standardizer": {"mean": [...], "stddev": [...]},
//                    "dbn": { "layer_sizes": [...],
//                             "layers": [ {"visible", "hidden", "weights" (row-major),
//                                          "visible_bias", "hidden_bias"} ],
//                             "output_weights": [...], "output_bias": x } } ]
//   }
//
// Doubles are written in shortest round-trip form, so save -> load -> save
// is byte-stable.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "deepbalance/dbn.hpp"
#include "deepbalance/ensemble.hpp"

namespace deepbalance {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json dbn_to_json(const DbnModel& model);
DbnModel dbn_from_json(const nlohmann::json& j);

nlohmann::json hyperparams_to_json(const DbnHyperparams& hyper);
DbnHyperparams hyperparams_from_json(const nlohmann::json& j);

nlohmann::json resample_to_json(const ResampleMethod& method);
ResampleMethod resample_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const nlohmann::json& j);

nlohmann::json ensemble_to_json(const EnsembleModel& model);
// Throws LoadError on a wrong format tag, unknown version or bad shapes.
EnsembleModel ensemble_from_json(const nlohmann::json& j);

std::string serialize_ensemble(const EnsembleModel& model);
EnsembleModel deserialize_ensemble(const std::string& text);

void save_ensemble(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_ensemble(const std::filesystem::path& path);

}  // namespace deepbalance
