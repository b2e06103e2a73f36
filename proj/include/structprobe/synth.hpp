#pragma once

#include <cstddef>
#include <vector>

#include "structprobe/graph.hpp"
#include "structprobe/regime.hpp"
#include "structprobe/rng.hpp"

namespace structprobe {

struct TopologyParams {
  double clique_deletion_prob = 0.1;
  double star_extra_edge_rate = 0.05;
};

/// Class 0: near-clique (complete graph minus independently deleted
/// non-root edges). Class 1: star centered at node 0 plus floor(rate * N)
/// random leaf-leaf edges. Node 0 is the root and every result is connected.
std::vector<Edge> gen_topology(int label, std::size_t node_count, Rng& rng,
                               const TopologyParams& params = {});

/// N x d feature matrix for one graph under the spec's feature regime.
FeatureMatrix gen_features(int label, std::size_t node_count, const RegimeSpec& spec, Rng& rng);

/// Class-balanced dataset; a pure function of `spec`. Graph i has label
/// i % 2 and draws everything from sub-stream i + 1 of spec.seed.
Dataset gen_dataset(const RegimeSpec& spec);

/// Stream id reserved for the feature-randomization sub-seed.
inline constexpr std::uint64_t kRandomizeStream = 0xFEA7'0000'0000'0001ULL;

} // namespace structprobe
