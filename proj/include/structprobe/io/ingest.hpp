#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

#include "structprobe/graph.hpp"

namespace structprobe::io {

/// Three-file text interchange; fields separated by whitespace or commas,
/// blank lines and lines starting with '#' ignored.
///   labels:   graph_id label          (defines the graphs and their order)
///   features: graph_id node f1 .. fd  (one row per node)
///   edges:    graph_id u v            (undirected)
///   roots:    graph_id node           (optional; default is the smallest node id)
struct IngestInputs {
  std::filesystem::path edges;
  std::filesystem::path features;
  std::filesystem::path labels;
  std::optional<std::filesystem::path> roots;
};

struct IngestReport {
  std::size_t graphs = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t duplicate_edges_removed = 0;
  std::size_t self_loops_removed = 0;
};

struct IngestResult {
  Dataset dataset;
  IngestReport report;
};

/// Builds a canonical dataset: the root becomes node 0, the remaining nodes
/// keep their relative id order, edges are deduplicated and self-loops
/// dropped (both counted in the report). Throws DataError naming the file
/// and row for unknown graph ids, unknown nodes, duplicate node rows,
/// inconsistent feature widths, or graphs without nodes.
IngestResult ingest(const IngestInputs& inputs);

} // namespace structprobe::io
