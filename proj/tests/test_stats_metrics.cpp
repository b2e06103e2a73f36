#include "doctest.h"

#include <cmath>
#include <limits>

#include "structprobe/metrics.hpp"
#include "structprobe/perturb.hpp"
#include "structprobe/stats.hpp"
#include "structprobe/synth.hpp"
#include "support.hpp"

using namespace structprobe;

namespace {

GraphInstance with_edges(std::size_t n, std::vector<Edge> edges) {
  GraphInstance g;
  g.id = "t";
  g.num_nodes = n;
  g.edges = std::move(edges);
  g.features = FeatureMatrix(n, 1);
  return g;
}

GraphInstance star(std::size_t n) {
  std::vector<Edge> e;
  for (NodeIndex v = 1; v < n; ++v) e.push_back({0, v});
  return with_edges(n, e);
}

GraphInstance path(std::size_t n) {
  std::vector<Edge> e;
  for (NodeIndex v = 1; v < n; ++v) e.push_back({v - 1, v});
  return with_edges(n, e);
}

GraphInstance complete(std::size_t n) {
  std::vector<Edge> e;
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v = u + 1; v < n; ++v) e.push_back({u, v});
  }
  return with_edges(n, e);
}

// All-pairs shortest paths by Floyd-Warshall.
std::vector<std::vector<std::size_t>> distances(const GraphInstance& g) {
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
  const std::size_t n = g.num_nodes;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const Edge& e : g.edges) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  return d;
}

} // namespace

TEST_SUITE("stats") {
  TEST_CASE("t critical values") {
    CHECK(t_critical(0.95, 1) == doctest::Approx(12.7062).epsilon(1e-5));
    CHECK(std::round(t_critical(0.95, 9) * 10000) / 10000 == 2.2622);
    CHECK(std::round(t_critical(0.95, 9) * 1000) / 1000 == 2.262);
    CHECK(t_critical(0.95, 29) == doctest::Approx(2.0452).epsilon(1e-4));
    CHECK(t_critical(0.95, 100000) == doctest::Approx(1.95996).epsilon(1e-4));
    CHECK_THROWS_AS(t_critical(0.95, 0), std::invalid_argument);
  }

  TEST_CASE("confidence interval examples") {
    const std::vector<double> same(10, 0.9);
    const auto a = ci95(same);
    CHECK(a.mean == doctest::Approx(0.9));
    CHECK(a.half_width == 0.0);
    const std::vector<double> two{0.8, 1.0};
    const auto b = ci95(two);
    CHECK(b.mean == doctest::Approx(0.9));
    CHECK(b.half_width == doctest::Approx(12.7062 * std::sqrt(0.02) / std::sqrt(2.0)).epsilon(1e-4));
    CHECK(b.half_width == doctest::Approx(1.2706).epsilon(1e-4));
    const std::vector<double> one{0.7};
    CHECK(ci95(one).half_width == 0.0);
  }

  TEST_CASE("summary statistics") {
    const std::vector<double> v{4, 1, 3, 2};
    const Summary s = summarize(v);
    CHECK(s.count == 4);
    CHECK(s.mean == 2.5);
    CHECK(s.median == 2.5);
    CHECK(s.min == 1);
    CHECK(s.max == 4);
    CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
    CHECK(sample_std(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(median(std::vector<double>{5, 1, 3}) == 3);
    CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
    CHECK_THROWS_AS(summarize(std::vector<double>{}), std::invalid_argument);
  }

  TEST_CASE("histogram policies") {
    const std::vector<double> spread{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    const Histogram fd = histogram(spread);
    CHECK(fd.policy == "freedman-diaconis");
    // IQR 4.5, width 9 / 10^(1/3) ≈ 4.18, so ceil(9 / 4.18) = 3 bins
    CHECK(fd.counts.size() == 3);
    std::size_t total = 0;
    for (auto c : fd.counts) total += c;
    CHECK(total == 10);

    const std::vector<double> flat{0, 1, 1, 1, 1, 1, 1, 1};
    const Histogram st = histogram(flat);
    CHECK(st.policy == "sturges");
    CHECK(st.counts.size() == 4);
    CHECK(st.counts.back() == 7); // values equal to hi land in the top bin

    const Histogram single = histogram(std::vector<double>{2, 2, 2});
    CHECK(single.policy == "single");
    CHECK(single.counts == std::vector<std::size_t>{3});

    std::vector<double> many;
    for (int i = 0; i < 10000; ++i) many.push_back(i);
    const Histogram capped = histogram(many, 5);
    CHECK(capped.policy == "freedman-diaconis-capped");
    CHECK(capped.counts.size() == 5);
    CHECK(capped.edges.size() == 6);
    CHECK(capped.edges.back() == 9999.0);
  }
}

TEST_SUITE("struct-metrics") {
  TEST_CASE("metric examples") {
    CHECK(normalized_root_degree(star(10)) == 1.0);
    CHECK(normalized_root_degree(path(5)) == 0.25);
    CHECK_THROWS_WITH_AS(normalized_root_degree(star(1)), "undefined for singleton graph", std::domain_error);
    CHECK(one_hop_fraction(path(4)) == doctest::Approx(1.0 / 3.0));
    CHECK(max_hop_depth(path(4)) == 3);
    const GraphInstance tree = with_edges(7, {{0, 1}, {0, 2}, {1, 3}, {1, 4}, {2, 5}, {2, 6}});
    CHECK(one_hop_fraction(tree) == doctest::Approx(2.0 / 6.0));
    CHECK(max_hop_depth(tree) == 2);
    CHECK(one_hop_fraction(star(1)) == 0.0);
    CHECK(degree_centralization(star(8)) == 1.0);
    CHECK(degree_centralization(complete(6)) == 0.0);
    CHECK(degree_centralization(path(4)) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(degree_centralization(path(2)), std::domain_error);
  }

  TEST_CASE("hop metrics agree with all-pairs shortest paths") {
    Rng rng(5);
    for (int t = 0; t < 300; ++t) {
      const auto n = static_cast<std::size_t>(rng.uniform_int(1, 12));
      const GraphInstance g = testsupport::random_graph(n, 1, rng.uniform01() * 0.5, rng);
      const auto d = distances(g);
      std::size_t one = 0, depth = 0;
      for (std::size_t v = 1; v < n; ++v) {
        if (d[0][v] == 1) ++one;
        if (d[0][v] < n) depth = std::max(depth, d[0][v]);
      }
      CHECK(max_hop_depth(g) == depth);
      if (n > 1) {
        CHECK(one_hop_fraction(g) == doctest::Approx(static_cast<double>(one) / static_cast<double>(n - 1)));
        // For a simple graph, one-hop nodes are exactly the root's neighbors.
        CHECK(one_hop_fraction(g) == doctest::Approx(normalized_root_degree(g)));
      }
    }
  }

  TEST_CASE("audit of identical stars") {
    Dataset ds;
    ds.feature_dim = 1;
    for (int i = 0; i < 6; ++i) {
      GraphInstance g = star(9);
      g.id = "s" + std::to_string(i);
      g.label = i % 2;
      ds.graphs.push_back(g);
    }
    const StructuralReport r = audit(ds);
    const Summary& root = r.overall.metrics.at("normalized_root_degree");
    CHECK(root.mean == 1.0);
    CHECK(root.std == 0.0);
    REQUIRE(r.root_degree_histogram.has_value());
    CHECK(r.root_degree_histogram->lo == 0.0);
    CHECK(r.root_degree_histogram->hi == 1.0);
    CHECK(r.root_degree_histogram->counts.back() == 6);
    CHECK(r.per_class.size() == 2);
    CHECK(r.per_class.at(0).graph_count == 3);
    // constant features: the probe cannot be fit on fewer graphs than folds
    CHECK(!r.linear_probe_accuracy.has_value());
    CHECK(!r.probe_skip_reason.empty());
  }

  TEST_CASE("audit leaves undefined metrics out of the summaries") {
    Dataset ds;
    ds.feature_dim = 1;
    GraphInstance a = star(1);
    a.id = "a";
    GraphInstance b = path(2);
    b.id = "b";
    ds.graphs = {a, b};
    const StructuralReport r = audit(ds);
    CHECK(!r.per_graph[0].normalized_root_degree.has_value());
    CHECK(r.overall.metrics.at("normalized_root_degree").count == 1);
    CHECK(r.overall.metrics.count("degree_centralization") == 0);
  }

  TEST_CASE("linear probe separates clean features and not scrambled ones") {
    RegimeSpec clean = RegimeSpec::for_regime(FeatureRegime::CleanFeatures);
    clean.seed = 3;
    const Dataset ds = gen_dataset(clean);
    CHECK(linear_separability_probe(ds) >= 0.99);

    RegimeSpec so = RegimeSpec::for_regime(FeatureRegime::StructureOnly);
    so.seed = 3;
    const double so_acc = linear_separability_probe(gen_dataset(so));
    CHECK(so_acc >= 0.4);
    CHECK(so_acc <= 0.6);

    const double shuffled = linear_separability_probe(shuffle_features(ds, 8));
    CHECK(shuffled >= 0.4);
    CHECK(shuffled <= 0.6);
  }

  TEST_CASE("pca on two separated clusters splits along the first axis") {
    RegimeSpec spec = RegimeSpec::for_regime(FeatureRegime::CleanFeatures);
    spec.graphs_per_class = 20;
    spec.seed = 4;
    const Dataset ds = gen_dataset(spec);
    const auto pts = pca_2d(ds);
    REQUIRE(pts.size() == ds.graphs.size());
    double m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) (ds.graphs[i].label == 0 ? m0 : m1) += pts[i][0];
    CHECK(std::abs(m0 - m1) / 20.0 > 1.0);
  }
}
