#include "structprobe/io/json_codec.hpp"

#include <charconv>
#include <string>

#include "structprobe/io/errors.hpp"

namespace structprobe::io {

namespace {
const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw DataError("expected a JSON object while reading '" + std::string(key) + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw DataError("missing field '" + std::string(key) + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("field '" + std::string(key) + "': " + e.what());
  }
}

template <typename Parse>
auto get_enum(const Json& j, const char* key, Parse parse) {
  const auto text = get<std::string>(j, key);
  try {
    return parse(text);
  } catch (const std::invalid_argument& e) {
    throw DataError("field '" + std::string(key) + "': " + e.what());
  }
}

DataSource parse_source(std::string_view text) {
  if (text == "real") return DataSource::Real;
  if (text == "synthetic") return DataSource::Synthetic;
  throw std::invalid_argument("unknown data source '" + std::string(text) + "'");
}
} // namespace

Json to_json(const RegimeSpec& spec) {
  Json j;
  j["regime"] = to_string(spec.regime);
  j["corrupt_prob"] = spec.corrupt_prob;
  j["corruption_scope"] = to_string(spec.corruption_scope);
  j["randomize_features"] = spec.randomize_features;
  j["feature_dim"] = spec.feature_dim;
  j["graphs_per_class"] = spec.graphs_per_class;
  j["min_nodes"] = spec.min_nodes;
  j["max_nodes"] = spec.max_nodes;
  j["seed"] = spec.seed;
  j["clique_deletion_prob"] = spec.clique_deletion_prob;
  j["star_extra_edge_rate"] = spec.star_extra_edge_rate;
  j["class_mean"] = spec.class_mean;
  return j;
}

RegimeSpec regime_from_json(const Json& j) {
  RegimeSpec s;
  s.regime = get_enum(j, "regime", parse_regime);
  s.corrupt_prob = get<double>(j, "corrupt_prob");
  s.corruption_scope = get_enum(j, "corruption_scope", parse_corruption_scope);
  s.randomize_features = get<bool>(j, "randomize_features");
  s.feature_dim = get<std::size_t>(j, "feature_dim");
  s.graphs_per_class = get<std::size_t>(j, "graphs_per_class");
  s.min_nodes = get<std::size_t>(j, "min_nodes");
  s.max_nodes = get<std::size_t>(j, "max_nodes");
  s.seed = get<std::uint64_t>(j, "seed");
  s.clique_deletion_prob = get<double>(j, "clique_deletion_prob");
  s.star_extra_edge_rate = get<double>(j, "star_extra_edge_rate");
  s.class_mean = get<double>(j, "class_mean");
  return s;
}

Json to_json(const Provenance& provenance) {
  Json j;
  j["source"] = to_string(provenance.source);
  j["regime"] = provenance.regime ? to_json(*provenance.regime) : Json(nullptr);
  Json perturbations = Json::array();
  for (const auto& p : provenance.perturbations) {
    perturbations.push_back(Json{{"kind", to_string(p.kind)}, {"seed", p.seed}});
  }
  j["perturbations"] = std::move(perturbations);
  return j;
}

Provenance provenance_from_json(const Json& j) {
  Provenance p;
  p.source = get_enum(j, "source", parse_source);
  const Json& regime = field(j, "regime");
  if (!regime.is_null()) p.regime = regime_from_json(regime);
  const Json& list = field(j, "perturbations");
  if (!list.is_array()) throw DataError("field 'perturbations' must be an array");
  for (const Json& item : list) {
    p.perturbations.push_back({get_enum(item, "kind", parse_perturbation_kind), get<std::uint64_t>(item, "seed")});
  }
  return p;
}

Json to_json(const gnn::ModelConfig& c) {
  Json j;
  j["arch"] = gnn::to_string(c.arch);
  j["input_dim"] = c.input_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["num_mp_layers"] = c.num_mp_layers;
  j["attention_heads"] = c.attention_heads;
  j["leaky_slope"] = c.leaky_slope;
  j["dropout_rate"] = c.dropout_rate;
  j["num_classes"] = c.num_classes;
  j["readout"] = "global-mean";
  return j;
}

gnn::ModelConfig model_config_from_json(const Json& j) {
  gnn::ModelConfig c;
  c.arch = get_enum(j, "arch", gnn::parse_architecture);
  c.input_dim = get<std::size_t>(j, "input_dim");
  c.hidden_dim = get<std::size_t>(j, "hidden_dim");
  c.num_mp_layers = get<std::size_t>(j, "num_mp_layers");
  c.attention_heads = get<std::size_t>(j, "attention_heads");
  c.leaky_slope = get<double>(j, "leaky_slope");
  c.dropout_rate = get<double>(j, "dropout_rate");
  c.num_classes = get<std::size_t>(j, "num_classes");
  return c;
}

Json to_json(const TrainConfig& c) {
  Json j;
  j["folds"] = c.folds;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["lr"] = c.lr;
  j["weight_decay"] = c.weight_decay;
  j["seed"] = c.seed;
  j["selection"] = to_string(c.selection);
  j["model"] = to_json(c.model);
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig c;
  c.folds = get<std::size_t>(j, "folds");
  c.epochs = get<std::size_t>(j, "epochs");
  c.batch_size = get<std::size_t>(j, "batch_size");
  c.lr = get<double>(j, "lr");
  c.weight_decay = get<double>(j, "weight_decay");
  c.seed = get<std::uint64_t>(j, "seed");
  c.selection = get_enum(j, "selection", parse_epoch_selection);
  c.model = model_config_from_json(field(j, "model"));
  return c;
}

std::string format_float(float value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_float failed");
  std::string out(buf, end);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

} // namespace structprobe::io
