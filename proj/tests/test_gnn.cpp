#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "structprobe/gnn/batch.hpp"
#include "structprobe/gnn/checkpoint.hpp"
#include "structprobe/gnn/layers.hpp"
#include "structprobe/gnn/models.hpp"
#include "structprobe/io/errors.hpp"
#include "structprobe/nn/ops.hpp"
#include "support.hpp"

using namespace structprobe;
using namespace structprobe::gnn;
using namespace testsupport;

namespace {

nn::Tensor features_of(const GraphInstance& g) {
  std::vector<double> v(g.features.values().begin(), g.features.values().end());
  return nn::Tensor({g.num_nodes, g.features.cols()}, std::move(v));
}

Dense dense_features(const GraphInstance& g) {
  return to_dense(features_of(g));
}

constexpr Architecture kArchs[] = {Architecture::GCN, Architecture::GAT, Architecture::SAGE, Architecture::GCNFN,
                                   Architecture::MLP};

ModelConfig small_config(Architecture arch, std::size_t dim) {
  ModelConfig c;
  c.arch = arch;
  c.input_dim = dim;
  c.hidden_dim = 5;
  c.attention_heads = arch == Architecture::GAT ? 2 : 1;
  return c;
}

GraphInstance permuted(const GraphInstance& g, const std::vector<NodeIndex>& perm) {
  // node v of g becomes node perm[v]
  GraphInstance out = g;
  for (Edge& e : out.edges) e = {perm[e.u], perm[e.v]};
  for (std::size_t v = 0; v < g.num_nodes; ++v) {
    for (std::size_t c = 0; c < g.features.cols(); ++c) out.features(perm[v], c) = g.features(v, c);
  }
  out.root = perm[g.root];
  return out;
}

} // namespace

TEST_SUITE("gnn-models") {
  TEST_CASE("edge index for a path with GCN coefficients") {
    const std::vector<Edge> edges{{0, 1}, {1, 2}};
    const EdgeIndex ei = EdgeIndex::build(3, edges);
    CHECK(ei.src.size() == 4);
    CHECK(ei.loop_src.size() == 7);
    for (std::size_t e = 0; e < ei.loop_src.size(); ++e) {
      const double d_s = ei.loop_src[e] == 1 ? 3.0 : 2.0;
      const double d_t = ei.loop_dst[e] == 1 ? 3.0 : 2.0;
      CHECK(ei.gcn_coef[e] == doctest::Approx(1.0 / std::sqrt(d_s * d_t)).epsilon(1e-15));
    }
    const std::vector<Edge> bad{{0, 3}};
    CHECK_THROWS_AS(EdgeIndex::build(3, bad), std::invalid_argument);
  }

  TEST_CASE("gcn on a single isolated node is x W + b") {
    Rng rng(1);
    const GcnLayer layer = GcnLayer::init(3, 2, rng);
    const nn::Tensor x = nn::Tensor::matrix({{1.0, -2.0, 0.5}});
    const nn::Tensor y = gcn_layer(x, EdgeIndex::build(1, {}), layer);
    for (std::size_t c = 0; c < 2; ++c) {
      double s = layer.lin.bias.at(0, c);
      for (std::size_t k = 0; k < 3; ++k) s += x.at(0, k) * layer.lin.weight.at(k, c);
      CHECK(y.at(0, c) == doctest::Approx(s).epsilon(1e-15));
    }
  }

  TEST_CASE("gat with one head on a single node returns W x + b") {
    Rng rng(2);
    const GatLayer layer = GatLayer::init(3, 2, 1, true, 0.2, rng);
    const nn::Tensor x = nn::Tensor::matrix({{0.3, 1.0, -1.0}});
    const nn::Tensor y = gat_layer(x, EdgeIndex::build(1, {}), layer);
    for (std::size_t c = 0; c < 2; ++c) {
      double s = layer.bias.at(0, c);
      for (std::size_t k = 0; k < 3; ++k) s += x.at(0, k) * layer.weight.at(k, c);
      CHECK(y.at(0, c) == doctest::Approx(s).epsilon(1e-15));
    }
  }

  TEST_CASE("sage on an isolated node ignores the neighbor weight") {
    Rng rng(3);
    const SageLayer layer = SageLayer::init(2, 2, rng);
    const nn::Tensor x = nn::Tensor::matrix({{1.0, 2.0}});
    const nn::Tensor y = sage_layer(x, EdgeIndex::build(1, {}), layer);
    for (std::size_t c = 0; c < 2; ++c) {
      const double s = layer.bias.at(0, c) + layer.w_self.at(0, c) + 2.0 * layer.w_self.at(1, c);
      CHECK(y.at(0, c) == doctest::Approx(s).epsilon(1e-15));
    }
  }

  TEST_CASE("layers match dense brute force on 200 random graphs") {
    Rng rng(10);
    double worst_gcn = 0, worst_gat = 0, worst_sage = 0;
    for (int t = 0; t < 200; ++t) {
      const auto n = static_cast<std::size_t>(rng.uniform_int(1, 8));
      const GraphInstance g = random_graph(n, 4, rng.uniform01(), rng);
      const EdgeIndex ei = EdgeIndex::build(n, g.edges);
      const nn::Tensor x = features_of(g);
      const Dense xd = dense_features(g);
      const Dense adj = adjacency_matrix(g);
      const GcnLayer gcn = GcnLayer::init(4, 3, rng);
      const GatLayer gat = GatLayer::init(4, 3, 1 + rng.uniform_below(3), rng.bernoulli(0.5), 0.2, rng);
      const SageLayer sage = SageLayer::init(4, 3, rng);
      worst_gcn = std::max(worst_gcn, max_abs_diff(dense_gcn(xd, adj, gcn), gcn_layer(x, ei, gcn)));
      worst_gat = std::max(worst_gat, max_abs_diff(dense_gat(xd, adj, gat), gat_layer(x, ei, gat)));
      worst_sage = std::max(worst_sage, max_abs_diff(dense_sage(xd, adj, sage), sage_layer(x, ei, sage)));
    }
    CHECK(worst_gcn < 1e-12);
    CHECK(worst_gat < 1e-12);
    CHECK(worst_sage < 1e-12);
  }

  TEST_CASE("full models pass the finite-difference check over 20 seeds") {
    for (Architecture arch : kArchs) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CAPTURE(to_string(arch));
        CAPTURE(seed);
        const Dataset ds = random_dataset(3, 2, 6, 3, 100 + seed);
        const std::vector<std::size_t> idx{0, 1, 2};
        const GraphBatch batch = make_batch(ds, idx);
        const auto model = make_model(small_config(arch, 3), seed);
        const auto r = gradcheck([&] { return nn::cross_entropy(model->forward(batch), batch.labels); },
                                 model->parameters());
        CHECK(r.max_rel_error < 1e-4);
        CHECK(r.checked > 0);
        CHECK(r.skipped * 100 <= r.checked + r.skipped);
      }
    }
  }

  TEST_CASE("logits are invariant to node relabeling") {
    Rng rng(20);
    for (Architecture arch : kArchs) {
      const auto model = make_model(small_config(arch, 3), 7);
      for (int t = 0; t < 10; ++t) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(2, 9));
        const GraphInstance g = random_graph(n, 3, 0.5, rng);
        std::vector<NodeIndex> perm(n);
        std::iota(perm.begin(), perm.end(), NodeIndex{0});
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
        const GraphInstance h = permuted(g, perm);
        const GraphInstance* a[] = {&g};
        const GraphInstance* b[] = {&h};
        const nn::Tensor la = model->forward(make_batch(a));
        const nn::Tensor lb = model->forward(make_batch(b));
        for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(la.at(0, c) - lb.at(0, c)) < 1e-10);
      }
    }
  }

  TEST_CASE("a graph's logits do not depend on its batch mates") {
    const Dataset ds = random_dataset(6, 1, 8, 3, 30);
    for (Architecture arch : kArchs) {
      const auto model = make_model(small_config(arch, 3), 11);
      const std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
      const nn::Tensor together = model->forward(make_batch(ds, all));
      for (std::size_t i = 0; i < 6; ++i) {
        const std::vector<std::size_t> one{i};
        const nn::Tensor alone = model->forward(make_batch(ds, one));
        for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(alone.at(0, c) - together.at(i, c)) < 1e-10);
      }
    }
  }

  TEST_CASE("mlp ignores edges") {
    Rng rng(40);
    const auto model = make_model(small_config(Architecture::MLP, 3), 3);
    GraphInstance g = random_graph(6, 3, 0.5, rng);
    GraphInstance h = g;
    h.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}};
    const GraphInstance* a[] = {&g};
    const GraphInstance* b[] = {&h};
    const nn::Tensor la = model->forward(make_batch(a));
    const nn::Tensor lb = model->forward(make_batch(b));
    CHECK(la.at(0, 0) == lb.at(0, 0));
    CHECK(la.at(0, 1) == lb.at(0, 1));
  }

  TEST_CASE("same init seed gives identical parameters") {
    for (Architecture arch : kArchs) {
      const auto a = make_model(small_config(arch, 4), 99);
      const auto b = make_model(small_config(arch, 4), 99);
      REQUIRE(a->named_parameters().size() == b->named_parameters().size());
      for (std::size_t i = 0; i < a->named_parameters().size(); ++i) {
        const auto& pa = a->named_parameters()[i].second.values();
        const auto& pb = b->named_parameters()[i].second.values();
        CHECK(std::equal(pa.begin(), pa.end(), pb.begin(), pb.end()));
      }
    }
  }

  TEST_CASE("model config validation") {
    ModelConfig c;
    c.hidden_dim = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ModelConfig{};
    c.dropout_rate = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK_THROWS_AS(parse_architecture("gin"), std::invalid_argument);
    for (Architecture arch : kArchs) CHECK(parse_architecture(to_string(arch)) == arch);
  }

  TEST_CASE("checkpoint round trip reproduces logits") {
    const auto dir = std::filesystem::temp_directory_path() / "structprobe_ckpt_test";
    std::filesystem::create_directories(dir);
    const Dataset ds = random_dataset(4, 2, 7, 3, 50);
    const std::vector<std::size_t> idx{0, 1, 2, 3};
    const GraphBatch batch = make_batch(ds, idx);
    for (Architecture arch : kArchs) {
      auto model = make_model(small_config(arch, 3), 5);
      // Round to float first so the stored values are exact.
      for (const auto& [name, t] : model->named_parameters()) {
        nn::Tensor p = t;
        for (double& v : p.values_mut()) v = static_cast<double>(static_cast<float>(v));
      }
      const auto path = dir / (std::string(to_string(arch)) + ".json");
      save_checkpoint(path, model->config(), model->named_parameters());
      const auto loaded = load_checkpoint(path);
      CHECK(loaded->config() == model->config());
      const nn::Tensor a = model->forward(batch);
      const nn::Tensor b = loaded->forward(batch);
      for (std::size_t i = 0; i < a.numel(); ++i) CHECK(a.values()[i] == b.values()[i]);
    }
    std::filesystem::remove_all(dir);
  }
}
