#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace testsupport {

GraphInstance random_graph(std::size_t n, std::size_t dim, double p, Rng& rng, int label) {
  GraphInstance g;
  g.id = "g";
  g.label = label;
  g.num_nodes = n;
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) g.edges.push_back({u, v});
    }
  }
  g.features = FeatureMatrix(n, dim);
  for (float& f : g.features.values()) f = static_cast<float>(rng.normal());
  return g;
}

Dataset random_dataset(std::size_t graphs, std::size_t min_nodes, std::size_t max_nodes, std::size_t dim,
                       std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.feature_dim = dim;
  for (std::size_t i = 0; i < graphs; ++i) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(min_nodes, max_nodes));
    GraphInstance g = random_graph(n, dim, 0.4, rng, static_cast<int>(i % 2));
    g.id = "r" + std::to_string(i);
    ds.graphs.push_back(std::move(g));
  }
  return ds;
}

nn::Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, bool requires_grad) {
  std::vector<double> v(rows * cols);
  for (double& x : v) x = rng.normal();
  return nn::Tensor({rows, cols}, std::move(v), requires_grad);
}

GradcheckResult gradcheck(const std::function<nn::Tensor()>& loss_fn, std::vector<nn::Tensor> wrt, double h) {
  for (auto& t : wrt) t.zero_grad();
  {
    nn::Tape tape;
    nn::TapeScope scope(tape);
    const nn::Tensor loss = loss_fn();
    tape.backward(loss);
  }
  GradcheckResult result;
  auto eval = [&] { return loss_fn().item(); };
  for (auto& t : wrt) {
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    auto values = t.values_mut();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double orig = values[i];
      auto central = [&](double step) {
        values[i] = orig + step;
        const double up = eval();
        values[i] = orig - step;
        const double down = eval();
        values[i] = orig;
        return (up - down) / (2.0 * step);
      };
      const double n1 = central(h);
      const double n2 = central(h / 2);
      if (std::abs(n1 - n2) > 1e-3 * std::max({std::abs(n1), std::abs(n2), 1e-2})) {
        ++result.skipped;
        continue;
      }
      const double a = analytic[i];
      const double rel = std::abs(a - n1) / std::max({std::abs(a), std::abs(n1), 1e-4});
      result.max_rel_error = std::max(result.max_rel_error, rel);
      ++result.checked;
    }
  }
  return result;
}

Dense to_dense(const nn::Tensor& t) {
  Dense d(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) d[r][c] = t.at(r, c);
  }
  return d;
}

Dense adjacency_matrix(const GraphInstance& g) {
  Dense a(g.num_nodes, std::vector<double>(g.num_nodes, 0.0));
  for (const Edge& e : g.edges) a[e.u][e.v] = a[e.v][e.u] = 1.0;
  return a;
}

namespace {
Dense multiply(const Dense& a, const Dense& b) {
  const std::size_t m = a.size(), k = b.size(), n = k ? b[0].size() : 0;
  Dense c(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t t = 0; t < k; ++t) c[i][j] += a[i][t] * b[t][j];
    }
  }
  return c;
}

void add_bias(Dense& x, const nn::Tensor& bias) {
  for (auto& row : x) {
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias.at(0, c);
  }
}
} // namespace

Dense dense_gcn(const Dense& x, const Dense& adj, const gnn::GcnLayer& layer) {
  const std::size_t n = adj.size();
  Dense a_hat = adj;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a_hat[i][i] += 1.0;
    for (std::size_t j = 0; j < n; ++j) deg[i] += a_hat[i][j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a_hat[i][j] /= std::sqrt(deg[i] * deg[j]);
  }
  Dense out = multiply(a_hat, multiply(x, to_dense(layer.lin.weight)));
  add_bias(out, layer.lin.bias);
  return out;
}

Dense dense_gat(const Dense& x, const Dense& adj, const gnn::GatLayer& layer) {
  const std::size_t n = adj.size();
  const std::size_t heads = layer.heads;
  const std::size_t f = layer.weight.cols() / heads;
  const Dense z = multiply(x, to_dense(layer.weight));
  Dense out(n, std::vector<double>(layer.concat ? heads * f : f, 0.0));
  for (std::size_t k = 0; k < heads; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      // e_ij over the closed neighborhood of i, softmax with explicit mask
      std::vector<double> e(n, 0.0);
      std::vector<bool> mask(n, false);
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && adj[i][j] == 0.0) continue;
        mask[j] = true;
        double s = 0.0;
        for (std::size_t c = 0; c < f; ++c) {
          s += layer.att_dst.at(k, c) * z[i][k * f + c] + layer.att_src.at(k, c) * z[j][k * f + c];
        }
        e[j] = s > 0 ? s : layer.slope * s;
      }
      double mx = -INFINITY;
      for (std::size_t j = 0; j < n; ++j) {
        if (mask[j]) mx = std::max(mx, e[j]);
      }
      double denom = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (mask[j]) denom += std::exp(e[j] - mx);
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!mask[j]) continue;
        const double alpha = std::exp(e[j] - mx) / denom;
        for (std::size_t c = 0; c < f; ++c) {
          const double msg = alpha * z[j][k * f + c];
          if (layer.concat) {
            out[i][k * f + c] += msg;
          } else {
            out[i][c] += msg / static_cast<double>(heads);
          }
        }
      }
    }
  }
  add_bias(out, layer.bias);
  return out;
}

Dense dense_sage(const Dense& x, const Dense& adj, const gnn::SageLayer& layer) {
  const std::size_t n = adj.size();
  const std::size_t d = x.empty() ? 0 : x[0].size();
  Dense nbr(n, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double count = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (adj[i][j] == 0.0) continue;
      count += 1.0;
      for (std::size_t c = 0; c < d; ++c) nbr[i][c] += x[j][c];
    }
    if (count > 0) {
      for (double& v : nbr[i]) v /= count;
    }
  }
  Dense out = multiply(x, to_dense(layer.w_self));
  const Dense b = multiply(nbr, to_dense(layer.w_nbr));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < out[i].size(); ++c) out[i][c] += b[i][c];
  }
  add_bias(out, layer.bias);
  return out;
}

double max_abs_diff(const Dense& a, const nn::Tensor& b) {
  if (a.size() != b.rows()) throw std::runtime_error("row count differs");
  double worst = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r].size() != b.cols()) throw std::runtime_error("column count differs");
    for (std::size_t c = 0; c < a[r].size(); ++c) worst = std::max(worst, std::abs(a[r][c] - b.at(r, c)));
  }
  return worst;
}

} // namespace testsupport
