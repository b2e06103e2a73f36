#include "structprobe/perturb.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "structprobe/rng.hpp"

namespace structprobe {

namespace {

void fisher_yates(std::vector<std::size_t>& perm, Rng& rng) {
  for (std::size_t i = perm.size(); i-- > 1;) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i + 1));
    std::swap(perm[i], perm[j]);
  }
}

std::uint64_t pair_count(std::size_t n) {
  return static_cast<std::uint64_t>(n) * (n >= 1 ? n - 1 : 0) / 2;
}

} // namespace

std::vector<std::size_t> global_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = Rng::stream(seed, 0);
  fisher_yates(perm, rng);
  return perm;
}

Dataset shuffle_features(const Dataset& dataset, std::uint64_t seed) {
  const std::size_t d = dataset.feature_dim;
  std::vector<const float*> rows;
  for (const GraphInstance& g : dataset.graphs) {
    for (std::size_t r = 0; r < g.features.rows(); ++r) rows.push_back(g.features.row(r).data());
  }
  const std::vector<std::size_t> perm = global_permutation(rows.size(), seed);

  Dataset out = dataset;
  std::size_t k = 0;
  for (GraphInstance& g : out.graphs) {
    for (std::size_t r = 0; r < g.features.rows(); ++r, ++k) {
      std::copy_n(rows[perm[k]], d, g.features.row(r).begin());
    }
  }
  out.provenance.perturbations.push_back({PerturbationKind::ShuffleFeatures, seed});
  return out;
}

Dataset shuffle_features_within_graph(const Dataset& dataset, std::uint64_t seed) {
  Dataset out = dataset;
  for (std::size_t gi = 0; gi < out.graphs.size(); ++gi) {
    GraphInstance& g = out.graphs[gi];
    std::vector<std::size_t> perm(g.features.rows());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng = Rng::stream(seed, gi + 1);
    fisher_yates(perm, rng);
    const FeatureMatrix& src = dataset.graphs[gi].features;
    for (std::size_t r = 0; r < perm.size(); ++r) {
      std::copy_n(src.row(perm[r]).begin(), src.cols(), g.features.row(r).begin());
    }
  }
  out.provenance.perturbations.push_back({PerturbationKind::ShuffleFeaturesWithinGraph, seed});
  return out;
}

Edge slot_to_edge(std::uint64_t slot, std::size_t n) {
  // Row u holds the n - 1 - u pairs (u, u+1) .. (u, n-1).
  std::uint64_t u = 0;
  std::uint64_t row_len = n - 1;
  while (slot >= row_len) {
    slot -= row_len;
    ++u;
    --row_len;
  }
  return Edge{static_cast<NodeIndex>(u), static_cast<NodeIndex>(u + 1 + slot)};
}

Dataset rewire_edges(const Dataset& dataset, std::uint64_t seed) {
  Dataset out = dataset;
  for (std::size_t gi = 0; gi < out.graphs.size(); ++gi) {
    GraphInstance& g = out.graphs[gi];
    const std::uint64_t slots = pair_count(g.num_nodes);
    if (g.edges.size() > slots) {
      throw std::invalid_argument("infeasible rewire at graph " + g.id + ": " +
                                  std::to_string(g.edges.size()) + " edges on " +
                                  std::to_string(g.num_nodes) + " nodes");
    }
    Rng rng = Rng::stream(seed, gi + 1);
    const auto picks = sample_without_replacement(slots, g.edges.size(), rng);
    std::vector<Edge> edges;
    edges.reserve(picks.size());
    for (std::uint64_t s : picks) edges.push_back(slot_to_edge(s, g.num_nodes));
    g.edges = std::move(edges);
  }
  out.provenance.perturbations.push_back({PerturbationKind::RewireEdges, seed});
  return out;
}

Dataset apply_perturbation(const Dataset& dataset, PerturbationKind kind, std::uint64_t seed) {
  switch (kind) {
  case PerturbationKind::ShuffleFeatures: return shuffle_features(dataset, seed);
  case PerturbationKind::RewireEdges: return rewire_edges(dataset, seed);
  case PerturbationKind::ShuffleFeaturesWithinGraph:
    return shuffle_features_within_graph(dataset, seed);
  }
  throw std::invalid_argument("unknown perturbation kind");
}

} // namespace structprobe
