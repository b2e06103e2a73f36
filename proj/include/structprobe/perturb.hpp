#pragma once

#include <cstdint>
#include <vector>

#include "structprobe/graph.hpp"

namespace structprobe {

/// Global Fisher-Yates permutation of [0, n) driven by stream 0 of `seed`.
/// Position k of the result names the source index that lands at k.
std::vector<std::size_t> global_permutation(std::size_t n, std::uint64_t seed);

/// Dataset-wide feature shuffle: all feature rows are concatenated in graph
/// order, permuted with global_permutation(M, seed), and dealt back into the
/// same per-graph slots. Topology, labels, roots and node counts are kept.
Dataset shuffle_features(const Dataset& dataset, std::uint64_t seed);

/// Diagnostic variant: rows are permuted within each graph only.
Dataset shuffle_features_within_graph(const Dataset& dataset, std::uint64_t seed);

/// Per graph i (sub-stream i + 1): replace the edge set with |E| edges drawn
/// uniformly without replacement from the C(N,2) simple-graph slots.
/// Throws std::invalid_argument("infeasible rewire") if |E| > C(N,2).
Dataset rewire_edges(const Dataset& dataset, std::uint64_t seed);

/// Dispatch on kind.
Dataset apply_perturbation(const Dataset& dataset, PerturbationKind kind, std::uint64_t seed);

/// Maps slot index s in [0, C(n,2)) to the s-th pair (u < v) in lexicographic order.
Edge slot_to_edge(std::uint64_t slot, std::size_t n);

} // namespace structprobe
