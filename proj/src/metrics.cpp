#include "structprobe/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "structprobe/nn/adam.hpp"
#include "structprobe/nn/ops.hpp"
#include "structprobe/train.hpp"

namespace structprobe {

namespace {
constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> bfs_depths(const GraphInstance& g) {
  std::vector<std::size_t> depth(g.num_nodes, kUnreached);
  if (g.num_nodes == 0) return depth;
  const auto adj = g.adjacency();
  std::queue<NodeIndex> q;
  depth[g.root] = 0;
  q.push(g.root);
  while (!q.empty()) {
    const NodeIndex u = q.front();
    q.pop();
    for (NodeIndex v : adj[u]) {
      if (depth[v] == kUnreached) {
        depth[v] = depth[u] + 1;
        q.push(v);
      }
    }
  }
  return depth;
}
} // namespace

double normalized_root_degree(const GraphInstance& g) {
  if (g.num_nodes < 2) throw std::domain_error("undefined for singleton graph");
  return static_cast<double>(g.degrees()[g.root]) / static_cast<double>(g.num_nodes - 1);
}

double one_hop_fraction(const GraphInstance& g) {
  if (g.num_nodes < 2) return 0.0;
  const auto depth = bfs_depths(g);
  const auto hops = std::count(depth.begin(), depth.end(), std::size_t{1});
  return static_cast<double>(hops) / static_cast<double>(g.num_nodes - 1);
}

std::size_t max_hop_depth(const GraphInstance& g) {
  std::size_t best = 0;
  for (std::size_t d : bfs_depths(g)) {
    if (d != kUnreached) best = std::max(best, d);
  }
  return best;
}

double degree_centralization(const GraphInstance& g) {
  if (g.num_nodes < 3) throw std::domain_error("degree centralization undefined for fewer than 3 nodes");
  const auto deg = g.degrees();
  const std::size_t max_deg = *std::max_element(deg.begin(), deg.end());
  double total = 0.0;
  for (std::size_t d : deg) total += static_cast<double>(max_deg - d);
  const double n = static_cast<double>(g.num_nodes);
  return total / ((n - 1.0) * (n - 2.0));
}

std::vector<double> pooled_features(const Dataset& dataset) {
  const std::size_t d = dataset.feature_dim;
  std::vector<double> out(dataset.graphs.size() * d, 0.0);
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
    const auto& g = dataset.graphs[i];
    if (g.features.rows() == 0) continue;
    for (std::size_t r = 0; r < g.features.rows(); ++r) {
      const auto row = g.features.row(r);
      for (std::size_t c = 0; c < d; ++c) out[i * d + c] += row[c];
    }
    for (std::size_t c = 0; c < d; ++c) out[i * d + c] /= static_cast<double>(g.features.rows());
  }
  return out;
}

namespace {
nn::Tensor rows_tensor(const std::vector<double>& pooled, std::size_t d, std::span<const std::size_t> idx,
                       std::span<const double> mu, std::span<const double> sigma) {
  std::vector<double> v(idx.size() * d);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) v[r * d + c] = (pooled[idx[r] * d + c] - mu[c]) / sigma[c];
  }
  return nn::Tensor({idx.size(), d}, std::move(v));
}
} // namespace

double linear_separability_probe(const Dataset& dataset, const ProbeConfig& config) {
  if (dataset.graphs.size() < 2) throw std::invalid_argument("probe needs at least 2 graphs");
  std::vector<int> labels;
  for (const auto& g : dataset.graphs) {
    if (g.label != 0 && g.label != 1) throw std::invalid_argument("probe expects labels in {0,1}");
    labels.push_back(g.label);
  }
  if (std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels.front(); })) {
    throw std::invalid_argument("probe needs both classes");
  }
  const std::size_t d = dataset.feature_dim;
  const auto pooled = pooled_features(dataset);
  const Folds folds = stratified_folds(labels, config.folds, config.seed);

  double acc_sum = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train;
    for (std::size_t o = 0; o < folds.size(); ++o) {
      if (o != f) train.insert(train.end(), folds[o].begin(), folds[o].end());
    }
    std::sort(train.begin(), train.end());

    // Standardize with training-split statistics.
    std::vector<double> mu(d, 0.0), sigma(d, 0.0);
    for (std::size_t i : train) {
      for (std::size_t c = 0; c < d; ++c) mu[c] += pooled[i * d + c];
    }
    for (double& m : mu) m /= static_cast<double>(train.size());
    for (std::size_t i : train) {
      for (std::size_t c = 0; c < d; ++c) sigma[c] += std::pow(pooled[i * d + c] - mu[c], 2);
    }
    for (double& s : sigma) {
      s = std::sqrt(s / static_cast<double>(train.size()));
      if (!(s > 1e-12)) s = 1.0;
    }

    const nn::Tensor x_train = rows_tensor(pooled, d, train, mu, sigma);
    const nn::Tensor x_val = rows_tensor(pooled, d, folds[f], mu, sigma);
    std::vector<int> y_train, y_val;
    for (std::size_t i : train) y_train.push_back(labels[i]);
    for (std::size_t i : folds[f]) y_val.push_back(labels[i]);

    nn::Tensor w = nn::Tensor::zeros({d, 2}, true);
    nn::Tensor b = nn::Tensor::zeros({1, 2}, true);
    std::vector<nn::Tensor> params{w, b};
    nn::AdamConfig adam_cfg;
    adam_cfg.lr = config.lr;
    adam_cfg.weight_decay = config.weight_decay;
    nn::AdamState adam(adam_cfg, params);
    for (std::size_t step = 0; step < config.steps; ++step) {
      nn::Tape tape;
      nn::TapeScope scope(tape);
      const nn::Tensor loss = nn::cross_entropy(nn::add_bias_row(nn::matmul(x_train, w), b), y_train);
      tape.backward(loss);
      nn::adam_step(adam, params);
      w.zero_grad();
      b.zero_grad();
    }
    const nn::Tensor logits = nn::add_bias_row(nn::matmul(x_val, w), b);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < y_val.size(); ++r) {
      const int pred = logits.at(r, 1) > logits.at(r, 0) ? 1 : 0;
      if (pred == y_val[r]) ++correct;
    }
    acc_sum += static_cast<double>(correct) / static_cast<double>(y_val.size());
  }
  return acc_sum / static_cast<double>(folds.size());
}

std::vector<std::array<double, 2>> pca_2d(const Dataset& dataset) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const std::size_t n = dataset.graphs.size();
  const std::size_t d = dataset.feature_dim;
  std::vector<std::array<double, 2>> out(n, {0.0, 0.0});
  if (n == 0 || d == 0) return out;
  auto pooled = pooled_features(dataset);
  Mat x = Eigen::Map<Mat>(pooled.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(std::max<std::size_t>(n - 1, 1));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::Index dims = static_cast<Eigen::Index>(d);
  for (int axis = 0; axis < 2 && axis < dims; ++axis) {
    Eigen::VectorXd v = solver.eigenvectors().col(dims - 1 - axis); // eigenvalues ascend
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    const Eigen::VectorXd proj = x * v;
    for (std::size_t i = 0; i < n; ++i) out[i][axis] = proj(static_cast<Eigen::Index>(i));
  }
  return out;
}

GraphMetrics graph_metrics(const GraphInstance& g) {
  GraphMetrics m;
  m.id = g.id;
  m.label = g.label;
  m.node_count = g.num_nodes;
  m.edge_count = g.edges.size();
  if (g.num_nodes >= 2) m.normalized_root_degree = normalized_root_degree(g);
  m.one_hop_fraction = one_hop_fraction(g);
  if (g.num_nodes >= 3) m.degree_centralization = degree_centralization(g);
  m.max_hop_depth = max_hop_depth(g);
  return m;
}

namespace {
MetricSummaries summarize_population(const std::vector<const GraphMetrics*>& graphs) {
  MetricSummaries s;
  s.graph_count = graphs.size();
  std::map<std::string, std::vector<double>> columns;
  for (const GraphMetrics* m : graphs) {
    columns["node_count"].push_back(static_cast<double>(m->node_count));
    columns["edge_count"].push_back(static_cast<double>(m->edge_count));
    if (m->normalized_root_degree) columns["normalized_root_degree"].push_back(*m->normalized_root_degree);
    columns["one_hop_fraction"].push_back(m->one_hop_fraction);
    if (m->degree_centralization) columns["degree_centralization"].push_back(*m->degree_centralization);
    columns["max_hop_depth"].push_back(static_cast<double>(m->max_hop_depth));
  }
  for (const auto& [name, values] : columns) {
    if (!values.empty()) s.metrics[name] = summarize(values);
  }
  return s;
}
} // namespace

StructuralReport audit(const Dataset& dataset, const ProbeConfig& probe) {
  if (dataset.graphs.empty()) throw std::invalid_argument("empty dataset");
  StructuralReport report;
  report.per_graph.reserve(dataset.graphs.size());
  for (const auto& g : dataset.graphs) report.per_graph.push_back(graph_metrics(g));

  std::vector<const GraphMetrics*> all;
  std::map<int, std::vector<const GraphMetrics*>> by_class;
  std::vector<double> sizes, root_degrees;
  for (const auto& m : report.per_graph) {
    all.push_back(&m);
    by_class[m.label].push_back(&m);
    sizes.push_back(static_cast<double>(m.node_count));
    if (m.normalized_root_degree) root_degrees.push_back(*m.normalized_root_degree);
  }
  report.overall = summarize_population(all);
  for (const auto& [label, members] : by_class) report.per_class[label] = summarize_population(members);
  report.graph_size_histogram = histogram(sizes);
  if (!root_degrees.empty()) report.root_degree_histogram = histogram(root_degrees, 0.0, 1.0);

  try {
    report.linear_probe_accuracy = linear_separability_probe(dataset, probe);
  } catch (const std::invalid_argument& e) {
    report.probe_skip_reason = e.what();
  }
  report.pca = pca_2d(dataset);
  return report;
}

} // namespace structprobe
