#pragma once

#include "json.hpp"

#include "structprobe/gnn/models.hpp"
#include "structprobe/graph.hpp"
#include "structprobe/regime.hpp"
#include "structprobe/train.hpp"

namespace structprobe::io {

using Json = nlohmann::ordered_json;

// Decoders throw DataError on missing or mistyped fields.

Json to_json(const RegimeSpec& spec);
RegimeSpec regime_from_json(const Json& j);

Json to_json(const Provenance& provenance);
Provenance provenance_from_json(const Json& j);

Json to_json(const gnn::ModelConfig& config);
gnn::ModelConfig model_config_from_json(const Json& j);

Json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const Json& j);

/// Shortest decimal text that reads back to exactly `value`. Integral
/// values get a ".0" suffix so JSON readers see a float literal (keeps -0).
std::string format_float(float value);
std::string format_double(double value);

} // namespace structprobe::io
