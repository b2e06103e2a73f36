#pragma once

#include <filesystem>
#include <iosfwd>

#include "structprobe/graph.hpp"

namespace structprobe::io {

inline constexpr int kDatasetFormatVersion = 1;

/// JSON Lines: a header object {format, format_version, feature_dim,
/// graph_count, provenance} followed by one object per graph
/// {id, label, root, num_nodes, edges, features}. Feature values are written
/// as the shortest decimal that reads back to the same 32-bit float, so
/// read(write(d)) == d exactly.
void write_dataset(std::ostream& out, const Dataset& dataset);
/// Throws DataError on malformed input, a version mismatch, a graph count
/// mismatch, or a dataset that fails validation.
Dataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

} // namespace structprobe::io
