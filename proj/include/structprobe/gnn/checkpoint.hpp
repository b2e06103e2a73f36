#pragma once

#include <filesystem>
#include <memory>
#include <span>

#include "structprobe/gnn/models.hpp"

namespace structprobe::gnn {

/// JSON document {format, format_version, config, parameters: [{name, shape,
/// values}]}. Values are stored as 32-bit floats.
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config,
                     std::span<const NamedTensor> parameters);

/// Rebuilds the model from the stored config and copies in the stored
/// values. Throws io::DataError on a version, name or shape mismatch.
std::unique_ptr<GraphModel> load_checkpoint(const std::filesystem::path& path);

} // namespace structprobe::gnn
