#include "structprobe/io/results.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "structprobe/io/errors.hpp"

namespace structprobe::io {

namespace {
constexpr const char* kCsvHeader = "suite,model,setting,fold,epoch,train_loss,train_acc,val_acc";

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
} // namespace

Json to_json(const ExperimentResult& r) {
  Json j;
  j["config"] = to_json(r.config);
  j["provenance"] = to_json(r.provenance);
  Json folds = Json::array();
  for (const auto& f : r.folds) {
    Json epochs = Json::array();
    for (const auto& e : f.epochs) {
      epochs.push_back({{"train_loss", e.train_loss}, {"train_accuracy", e.train_accuracy}, {"val_accuracy", e.val_accuracy}});
    }
    folds.push_back({{"epochs", std::move(epochs)}, {"best_epoch", f.best_epoch + 1}, {"final_accuracy", f.final_accuracy}});
  }
  j["per_fold"] = std::move(folds);
  j["final"] = {{"selection", to_string(r.config.selection)},
                {"mean_val_accuracy", r.mean_val_accuracy},
                {"ci95_halfwidth", r.ci95_halfwidth},
                {"per_fold_final_accuracies", r.per_fold_final_accuracies()}};
  return j;
}

Json suite_to_json(const std::string& suite, std::span<const SuiteCell> cells) {
  Json j;
  j["suite"] = suite;
  Json list = Json::array();
  for (const auto& c : cells) {
    Json cell;
    cell["model"] = gnn::to_string(c.model);
    cell["setting"] = c.setting.name();
    cell["result"] = to_json(c.result);
    list.push_back(std::move(cell));
  }
  j["cells"] = std::move(list);
  return j;
}

void write_results_csv(std::ostream& out, const std::string& suite, std::span<const SuiteCell> cells) {
  out << kCsvHeader << '\n';
  for (const auto& c : cells) {
    for (std::size_t f = 0; f < c.result.folds.size(); ++f) {
      const auto& epochs = c.result.folds[f].epochs;
      for (std::size_t e = 0; e < epochs.size(); ++e) {
        out << suite << ',' << gnn::to_string(c.model) << ',' << c.setting.name() << ',' << f + 1 << ',' << e + 1
            << ',' << format_double(epochs[e].train_loss) << ',' << format_double(epochs[e].train_accuracy) << ','
            << format_double(epochs[e].val_accuracy) << '\n';
      }
    }
  }
}

std::vector<CurveRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty results CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw DataError("unexpected results CSV header: " + line);
  std::vector<CurveRow> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw DataError("results CSV row " + std::to_string(n) + ": expected 8 fields");
    auto num = [&](const std::string& s, auto& out) {
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError("results CSV row " + std::to_string(n) + ": cannot parse '" + s + "'");
      }
    };
    CurveRow r;
    r.suite = f[0];
    r.model = f[1];
    r.setting = f[2];
    num(f[3], r.fold);
    num(f[4], r.epoch);
    num(f[5], r.train_loss);
    num(f[6], r.train_acc);
    num(f[7], r.val_acc);
    rows.push_back(std::move(r));
  }
  return rows;
}

Json to_json(const Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
}

Json to_json(const Histogram& h) {
  return {{"policy", h.policy}, {"lo", h.lo}, {"hi", h.hi}, {"edges", h.edges}, {"counts", h.counts}};
}

Histogram histogram_from_json(const Json& j) {
  try {
    Histogram h;
    h.policy = j.at("policy").get<std::string>();
    h.lo = j.at("lo").get<double>();
    h.hi = j.at("hi").get<double>();
    h.edges = j.at("edges").get<std::vector<double>>();
    h.counts = j.at("counts").get<std::vector<std::size_t>>();
    if (h.edges.size() != h.counts.size() + 1) throw DataError("histogram edges/counts size mismatch");
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed histogram: ") + e.what());
  }
}

namespace {
Json summaries_json(const MetricSummaries& s) {
  Json metrics = Json::object();
  for (const auto& [name, summary] : s.metrics) metrics[name] = to_json(summary);
  return {{"graph_count", s.graph_count}, {"metrics", std::move(metrics)}};
}
} // namespace

Json to_json(const StructuralReport& report) {
  Json j;
  Json per_graph = Json::array();
  for (const auto& m : report.per_graph) {
    per_graph.push_back({{"id", m.id},
                         {"label", m.label},
                         {"node_count", m.node_count},
                         {"edge_count", m.edge_count},
                         {"normalized_root_degree", optional_number(m.normalized_root_degree)},
                         {"one_hop_fraction", m.one_hop_fraction},
                         {"degree_centralization", optional_number(m.degree_centralization)},
                         {"max_hop_depth", m.max_hop_depth}});
  }
  j["per_graph"] = std::move(per_graph);
  Json summary;
  summary["overall"] = summaries_json(report.overall);
  Json per_class = Json::object();
  for (const auto& [label, s] : report.per_class) per_class[std::to_string(label)] = summaries_json(s);
  summary["per_class"] = std::move(per_class);
  j["summary"] = std::move(summary);
  j["histograms"] = {{"graph_size", to_json(report.graph_size_histogram)},
                     {"normalized_root_degree",
                      report.root_degree_histogram ? to_json(*report.root_degree_histogram) : Json(nullptr)}};
  Json pca = Json::array();
  for (const auto& p : report.pca) pca.push_back({p[0], p[1]});
  Json sep;
  sep["linear_probe_accuracy"] = optional_number(report.linear_probe_accuracy);
  if (!report.probe_skip_reason.empty()) sep["probe_skipped"] = report.probe_skip_reason;
  sep["projection"] = "pca-2d";
  sep["pca_2d"] = std::move(pca);
  j["separability"] = std::move(sep);
  return j;
}

} // namespace structprobe::io
