#include "structprobe/io/dataset_file.hpp"

#include <fstream>
#include <sstream>

#include "exact_float_json.hpp"
#include "structprobe/io/errors.hpp"
#include "structprobe/io/json_codec.hpp"

namespace structprobe::io {

namespace {
constexpr const char* kFormatTag = "structprobe-dataset";

void write_graph(std::ostream& out, const GraphInstance& g) {
  out << "{\"id\":" << Json(g.id).dump() << ",\"label\":" << g.label << ",\"root\":" << g.root
      << ",\"num_nodes\":" << g.num_nodes << ",\"edges\":[";
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (i) out << ',';
    out << '[' << g.edges[i].u << ',' << g.edges[i].v << ']';
  }
  out << "],\"features\":[";
  for (std::size_t r = 0; r < g.features.rows(); ++r) {
    if (r) out << ',';
    out << '[';
    const auto row = g.features.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_float(row[c]);
    }
    out << ']';
  }
  out << "]}\n";
}

template <typename T>
T read_field(const Json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end()) throw DataError("line " + std::to_string(line) + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("line " + std::to_string(line) + ": field '" + key + "': " + e.what());
  }
}

GraphInstance read_graph(const std::string& text, std::size_t feature_dim, std::size_t line) {
  Json j;
  try {
    j = detail::parse_exact_floats(text, {"features"});
  } catch (const DataError& e) {
    throw DataError("line " + std::to_string(line) + ": " + e.what());
  }
  if (!j.is_object()) throw DataError("line " + std::to_string(line) + ": expected a graph object");
  GraphInstance g;
  g.id = read_field<std::string>(j, "id", line);
  g.label = read_field<int>(j, "label", line);
  g.root = read_field<NodeIndex>(j, "root", line);
  g.num_nodes = read_field<std::size_t>(j, "num_nodes", line);
  for (const auto& e : read_field<std::vector<std::array<NodeIndex, 2>>>(j, "edges", line)) {
    g.edges.push_back({e[0], e[1]});
  }
  const auto rows = read_field<std::vector<std::vector<float>>>(j, "features", line);
  std::vector<float> values;
  values.reserve(rows.size() * feature_dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != feature_dim) {
      throw DataError("line " + std::to_string(line) + ": feature row " + std::to_string(r) + " has " +
                      std::to_string(rows[r].size()) + " values, expected " + std::to_string(feature_dim));
    }
    values.insert(values.end(), rows[r].begin(), rows[r].end());
  }
  g.features = FeatureMatrix(rows.size(), feature_dim, std::move(values));
  return g;
}
} // namespace

void write_dataset(std::ostream& out, const Dataset& dataset) {
  Json header;
  header["format"] = kFormatTag;
  header["format_version"] = kDatasetFormatVersion;
  header["feature_dim"] = dataset.feature_dim;
  header["graph_count"] = dataset.graphs.size();
  header["provenance"] = to_json(dataset.provenance);
  out << header.dump() << '\n';
  for (const auto& g : dataset.graphs) write_graph(out, g);
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty dataset file");
  Json header;
  try {
    header = Json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("line 1: malformed header: ") + e.what());
  }
  if (!header.is_object() || header.value("format", "") != kFormatTag) {
    throw DataError("line 1: not a dataset file (missing format tag)");
  }
  const int version = read_field<int>(header, "format_version", 1);
  if (version != kDatasetFormatVersion) {
    throw DataError("unsupported dataset format version " + std::to_string(version) + " (expected " +
                    std::to_string(kDatasetFormatVersion) + ")");
  }
  Dataset ds;
  ds.feature_dim = read_field<std::size_t>(header, "feature_dim", 1);
  const auto count = read_field<std::size_t>(header, "graph_count", 1);
  ds.provenance = provenance_from_json(header.at("provenance"));
  ds.graphs.reserve(count);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ds.graphs.push_back(read_graph(line, ds.feature_dim, line_no));
  }
  if (ds.graphs.size() != count) {
    throw DataError("header declares " + std::to_string(count) + " graphs, file contains " +
                    std::to_string(ds.graphs.size()));
  }
  const auto violations = validate(ds);
  if (!violations.empty()) {
    std::string msg = "invalid dataset (" + std::to_string(violations.size()) + " violations): " +
                      violations.front().reason;
    throw DataError(msg);
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_dataset(out, dataset);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());
  try {
    return read_dataset(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

} // namespace structprobe::io
