#include "structprobe/gnn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "../io/exact_float_json.hpp"
#include "structprobe/io/errors.hpp"
#include "structprobe/io/json_codec.hpp"

namespace structprobe::gnn {

namespace {
constexpr const char* kFormatTag = "structprobe-checkpoint";
constexpr int kVersion = 1;
} // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config,
                     std::span<const NamedTensor> parameters) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  io::Json meta;
  meta["format"] = kFormatTag;
  meta["format_version"] = kVersion;
  meta["config"] = io::to_json(config);
  // Header fields first, then one parameter per line with exact float text.
  std::string head = meta.dump();
  head.pop_back();
  out << head << ",\"parameters\":[\n";
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    const auto& [name, t] = parameters[i];
    out << "{\"name\":" << io::Json(name).dump() << ",\"shape\":" << io::Json(t.shape()).dump() << ",\"values\":[";
    const auto v = t.values();
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) out << ',';
      out << io::format_float(static_cast<float>(v[k]));
    }
    out << "]}" << (i + 1 < parameters.size() ? ",\n" : "\n");
  }
  out << "]}\n";
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::unique_ptr<GraphModel> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::DataError("cannot open checkpoint " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const io::Json j = io::detail::parse_exact_floats(buffer.str(), {"values"});
  if (!j.is_object() || j.value("format", "") != kFormatTag) {
    throw io::DataError(path.string() + ": not a checkpoint file");
  }
  if (j.value("format_version", -1) != kVersion) {
    throw io::DataError(path.string() + ": unsupported checkpoint version");
  }
  const ModelConfig config = io::model_config_from_json(j.at("config"));
  auto model = make_model(config, 0);
  const auto& stored = j.at("parameters");
  const auto& named = model->named_parameters();
  if (!stored.is_array() || stored.size() != named.size()) {
    throw io::DataError(path.string() + ": parameter count does not match the model");
  }
  for (std::size_t i = 0; i < named.size(); ++i) {
    const auto& [name, t] = named[i];
    const auto& item = stored[i];
    if (item.value("name", "") != name) throw io::DataError(path.string() + ": expected parameter " + name);
    if (item.at("shape").get<nn::Shape>() != t.shape()) {
      throw io::DataError(path.string() + ": shape mismatch for " + name);
    }
    const auto values = item.at("values").get<std::vector<double>>();
    if (values.size() != t.numel()) throw io::DataError(path.string() + ": value count mismatch for " + name);
    nn::Tensor target = t;
    std::copy(values.begin(), values.end(), target.values_mut().begin());
  }
  return model;
}

} // namespace structprobe::gnn
