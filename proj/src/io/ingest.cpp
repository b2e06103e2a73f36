#include "structprobe/io/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "structprobe/io/errors.hpp"

namespace structprobe::io {

namespace {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<Row> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Row> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    for (char& c : line) {
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    }
    const auto first = line.find_first_not_of(' ');
    if (first == std::string::npos || line[first] == '#') continue;
    Row row{n, {}};
    std::size_t pos = first;
    while (pos < line.size()) {
      const auto end = line.find(' ', pos);
      const auto stop = end == std::string::npos ? line.size() : end;
      if (stop > pos) row.fields.push_back(line.substr(pos, stop - pos));
      pos = stop + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] void fail(const std::filesystem::path& path, const Row& row, const std::string& what) {
  throw DataError(path.filename().string() + " row " + std::to_string(row.line) + ": " + what);
}

template <typename T>
T parse_number(const std::filesystem::path& path, const Row& row, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) fail(path, row, "cannot parse '" + text + "'");
  return value;
}

struct RawGraph {
  int label = 0;
  std::map<std::uint64_t, std::vector<float>> nodes; // original id -> feature row
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  std::optional<std::uint64_t> root;
};

} // namespace

IngestResult ingest(const IngestInputs& inputs) {
  std::vector<std::string> order;
  std::unordered_map<std::string, RawGraph> graphs;

  for (const Row& row : read_rows(inputs.labels)) {
    if (row.fields.size() != 2) fail(inputs.labels, row, "expected 'graph_id label'");
    const std::string& id = row.fields[0];
    if (graphs.count(id)) fail(inputs.labels, row, "duplicate graph id '" + id + "'");
    RawGraph g;
    g.label = parse_number<int>(inputs.labels, row, row.fields[1]);
    if (g.label != 0 && g.label != 1) fail(inputs.labels, row, "label must be 0 or 1");
    graphs.emplace(id, std::move(g));
    order.push_back(id);
  }
  if (order.empty()) throw DataError(inputs.labels.filename().string() + ": no graphs");

  auto lookup = [&](const std::filesystem::path& path, const Row& row) -> RawGraph& {
    const auto it = graphs.find(row.fields[0]);
    if (it == graphs.end()) fail(path, row, "unknown graph id '" + row.fields[0] + "'");
    return it->second;
  };

  std::optional<std::size_t> dim;
  for (const Row& row : read_rows(inputs.features)) {
    if (row.fields.size() < 3) fail(inputs.features, row, "expected 'graph_id node f1 .. fd'");
    RawGraph& g = lookup(inputs.features, row);
    const auto node = parse_number<std::uint64_t>(inputs.features, row, row.fields[1]);
    const std::size_t width = row.fields.size() - 2;
    if (!dim) dim = width;
    if (width != *dim) {
      fail(inputs.features, row, "feature row has " + std::to_string(width) + " values, expected " +
                                     std::to_string(*dim));
    }
    std::vector<float> values(width);
    for (std::size_t c = 0; c < width; ++c) {
      values[c] = parse_number<float>(inputs.features, row, row.fields[c + 2]);
    }
    if (!g.nodes.emplace(node, std::move(values)).second) {
      fail(inputs.features, row, "duplicate feature row for node " + std::to_string(node));
    }
  }

  for (const Row& row : read_rows(inputs.edges)) {
    if (row.fields.size() != 3) fail(inputs.edges, row, "expected 'graph_id u v'");
    RawGraph& g = lookup(inputs.edges, row);
    const auto u = parse_number<std::uint64_t>(inputs.edges, row, row.fields[1]);
    const auto v = parse_number<std::uint64_t>(inputs.edges, row, row.fields[2]);
    for (auto x : {u, v}) {
      if (!g.nodes.count(x)) fail(inputs.edges, row, "node " + std::to_string(x) + " has no feature row");
    }
    g.edges.emplace_back(u, v);
  }

  if (inputs.roots) {
    for (const Row& row : read_rows(*inputs.roots)) {
      if (row.fields.size() != 2) fail(*inputs.roots, row, "expected 'graph_id node'");
      RawGraph& g = lookup(*inputs.roots, row);
      const auto r = parse_number<std::uint64_t>(*inputs.roots, row, row.fields[1]);
      if (!g.nodes.count(r)) fail(*inputs.roots, row, "root " + std::to_string(r) + " has no feature row");
      if (g.root) fail(*inputs.roots, row, "second root for graph '" + row.fields[0] + "'");
      g.root = r;
    }
  }

  IngestResult result;
  Dataset& ds = result.dataset;
  ds.feature_dim = dim.value_or(0);
  ds.provenance.source = DataSource::Real;
  for (const std::string& id : order) {
    RawGraph& raw = graphs.at(id);
    if (raw.nodes.empty()) throw DataError("graph '" + id + "' has no feature rows");
    const std::uint64_t root = raw.root.value_or(raw.nodes.begin()->first);

    std::map<std::uint64_t, NodeIndex> remap;
    remap[root] = 0;
    NodeIndex next = 1;
    for (const auto& [node, values] : raw.nodes) {
      if (node != root) remap[node] = next++;
    }

    GraphInstance g;
    g.id = id;
    g.label = raw.label;
    g.root = 0;
    g.num_nodes = raw.nodes.size();
    g.features = FeatureMatrix(g.num_nodes, ds.feature_dim);
    for (const auto& [node, values] : raw.nodes) {
      std::copy(values.begin(), values.end(), g.features.row(remap.at(node)).begin());
    }
    std::set<Edge> unique;
    for (const auto& [u, v] : raw.edges) {
      if (u == v) {
        ++result.report.self_loops_removed;
        continue;
      }
      if (!unique.insert(make_edge(remap.at(u), remap.at(v))).second) ++result.report.duplicate_edges_removed;
    }
    g.edges.assign(unique.begin(), unique.end());
    result.report.nodes += g.num_nodes;
    result.report.edges += g.edges.size();
    ds.graphs.push_back(std::move(g));
  }
  result.report.graphs = ds.graphs.size();
  return result;
}

} // namespace structprobe::io
