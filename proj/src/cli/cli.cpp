#include "structprobe/cli/cli.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

#include "structprobe/cli/manifest.hpp"
#include "structprobe/gnn/checkpoint.hpp"
#include "structprobe/io/dataset_file.hpp"
#include "structprobe/io/errors.hpp"
#include "structprobe/io/ingest.hpp"
#include "structprobe/io/results.hpp"
#include "structprobe/io/svg.hpp"
#include "structprobe/metrics.hpp"
#include "structprobe/perturb.hpp"
#include "structprobe/synth.hpp"
#include "structprobe/train.hpp"

namespace structprobe::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

fs::path output_dir_of(const fs::path& file) {
  const fs::path parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void print_stats(std::ostream& out, const Dataset& ds) {
  const DatasetStats s = dataset_stats(ds);
  out << "graphs: " << s.graph_count << "\n"
      << "nodes: " << s.total_nodes << "\n"
      << "edges: " << s.total_edges << "\n"
      << "mean nodes per graph: " << fixed(s.mean_nodes_per_graph, 2) << "\n";
  for (const auto& [label, count] : s.class_counts) out << "class " << label << ": " << count << "\n";
}

void save_dataset_artifact(const fs::path& path, const Dataset& ds) {
  ensure_dir(output_dir_of(path));
  io::save_dataset(path, ds);
  update_manifest(output_dir_of(path), {path});
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto sep = text.find("..");
  if (sep == std::string::npos) throw UsageError("--nodes expects MIN..MAX, got '" + text + "'");
  try {
    std::size_t used_lo = 0, used_hi = 0;
    const std::string lo = text.substr(0, sep), hi = text.substr(sep + 2);
    const auto a = std::stoull(lo, &used_lo);
    const auto b = std::stoull(hi, &used_hi);
    if (used_lo != lo.size() || used_hi != hi.size()) throw std::invalid_argument("trailing text");
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError("--nodes expects MIN..MAX, got '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// key=value lines, '#' comments.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io::DataError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t n = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + " line " + std::to_string(n) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

struct TrainArgs {
  std::string model = "gcn";
  std::size_t folds = 10;
  std::size_t epochs = 50;
  std::size_t batch_size = 128;
  std::optional<double> lr; // 0.01 for synthetic data, 0.001 for ingested data
  double weight_decay = 0.001;
  std::uint64_t seed = 0;
  std::size_t hidden = 64;
  std::size_t heads = 1;
  std::size_t layers = 2;
  double dropout = 0.0;
  std::string selection = "last";

  TrainConfig config(const Dataset& ds) const {
    TrainConfig c;
    const std::size_t input_dim = ds.feature_dim;
    c.folds = folds;
    c.epochs = epochs;
    c.batch_size = batch_size;
    c.lr = lr.value_or(ds.provenance.source == DataSource::Real ? 0.001 : 0.01);
    c.weight_decay = weight_decay;
    c.seed = seed;
    c.selection = parse_epoch_selection(selection);
    c.model.arch = gnn::parse_architecture(model);
    c.model.input_dim = input_dim;
    c.model.hidden_dim = hidden;
    c.model.num_mp_layers = layers;
    c.model.attention_heads = heads;
    c.model.dropout_rate = dropout;
    return c;
  }
};

void add_train_options(CLI::App* sub, TrainArgs& a) {
  sub->add_option("--folds", a.folds, "Cross-validation folds")->capture_default_str();
  sub->add_option("--epochs", a.epochs, "Training epochs per fold")->capture_default_str();
  sub->add_option("--batch-size", a.batch_size, "Graphs per mini-batch")->capture_default_str();
  sub->add_option("--lr", a.lr, "Adam learning rate (default 0.01 synthetic, 0.001 ingested)");
  sub->add_option("--weight-decay", a.weight_decay, "Decoupled weight decay")->capture_default_str();
  sub->add_option("--seed", a.seed, "Seed for folds, init and batching")->capture_default_str();
  sub->add_option("--hidden", a.hidden, "Hidden width")->capture_default_str();
  sub->add_option("--heads", a.heads, "Attention heads (gat, gcnfn)")->capture_default_str();
  sub->add_option("--layers", a.layers, "Message-passing layers")->capture_default_str();
  sub->add_option("--dropout", a.dropout, "Dropout rate")->capture_default_str();
  sub->add_option("--selection", a.selection, "Per-fold score: best or last epoch")->capture_default_str();
}

void print_result_line(std::ostream& out, const std::string& model, const std::string& setting,
                       const ExperimentResult& r) {
  out << std::left << std::setw(8) << model << std::setw(32) << setting << fixed(r.mean_val_accuracy) << " +- "
      << fixed(r.ci95_halfwidth) << "\n";
}

void write_suite_outputs(const fs::path& dir, const std::string& suite, const std::vector<SuiteCell>& cells) {
  ensure_dir(dir);
  const fs::path json_path = dir / "results.json";
  const fs::path csv_path = dir / "results.csv";
  write_text(json_path, io::suite_to_json(suite, cells).dump(2) + "\n");
  std::ostringstream csv;
  io::write_results_csv(csv, suite, cells);
  write_text(csv_path, csv.str());
  update_manifest(dir, {json_path, csv_path});
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '-';
  return out;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structural-informativeness probes for graph classification", "structprobe"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "Flat key=value file mirroring the subcommand's flags");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  std::string regime, corruption = "graph", nodes = "10..40", gen_out;
  std::optional<double> corrupt_prob, clique_del, star_rate, class_mean;
  bool randomize = false;
  std::size_t per_class = 250, dim = 32;
  std::uint64_t gen_seed = 0;
  gen->add_option("--regime", regime, "clean | structure-only | noisy")->required();
  gen->add_flag("--randomize-features", randomize, "Shuffle feature rows across the dataset (clean only)");
  gen->add_option("--corruption", corruption, "Noisy-regime scope: graph | node")->capture_default_str();
  gen->add_option("--corrupt-prob", corrupt_prob, "Noisy-regime corruption probability (default 0.2)");
  gen->add_option("--graphs-per-class", per_class)->capture_default_str();
  gen->add_option("--dim", dim, "Feature dimension")->capture_default_str();
  gen->add_option("--nodes", nodes, "Node-count range MIN..MAX")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--clique-deletion-prob", clique_del);
  gen->add_option("--star-extra-edge-rate", star_rate);
  gen->add_option("--class-mean", class_mean);
  gen->add_option("--out", gen_out, "Dataset file to write")->required();

  // ingest
  auto* ing = app.add_subcommand("ingest", "Convert a three-file text export into a dataset file");
  io::IngestInputs ingest_in;
  std::string roots_path, ingest_out;
  ing->add_option("--edges", ingest_in.edges, "Rows: graph_id u v")->required();
  ing->add_option("--features", ingest_in.features, "Rows: graph_id node f1..fd")->required();
  ing->add_option("--labels", ingest_in.labels, "Rows: graph_id label")->required();
  ing->add_option("--roots", roots_path, "Rows: graph_id root_node (default: smallest node id)");
  ing->add_option("--out", ingest_out, "Dataset file to write")->required();

  // perturb
  auto* per = app.add_subcommand("perturb", "Apply a feature shuffle or edge rewiring");
  std::string per_in, per_kind, per_out;
  std::uint64_t per_seed = 0;
  per->add_option("--in", per_in)->required();
  per->add_option("--kind", per_kind, "shuffle-features | rewire-edges | shuffle-features-within-graph")->required();
  per->add_option("--seed", per_seed)->capture_default_str();
  per->add_option("--out", per_out)->required();

  // audit
  auto* aud = app.add_subcommand("audit", "Structural metrics and separability probe");
  std::string aud_in, aud_out;
  ProbeConfig probe;
  aud->add_option("--in", aud_in)->required();
  aud->add_option("--out", aud_out, "Output directory")->required();
  aud->add_option("--probe-seed", probe.seed)->capture_default_str();
  aud->add_option("--probe-folds", probe.folds)->capture_default_str();

  // train
  auto* trn = app.add_subcommand("train", "Cross-validated training of one model");
  std::string trn_in, trn_out;
  bool save_checkpoints = false;
  TrainArgs trn_args;
  trn->add_option("--in", trn_in)->required();
  trn->add_option("--out", trn_out, "Output directory")->required();
  trn->add_option("--model", trn_args.model, "gcn | gat | sage | gcnfn | mlp")->capture_default_str();
  trn->add_flag("--save-checkpoints", save_checkpoints, "Write each fold's final parameters");
  add_train_options(trn, trn_args);

  // suite
  auto* ste = app.add_subcommand("suite", "Models x settings grid on shared folds");
  std::string ste_in, ste_out, ste_models = "gcn,gat,sage,gcnfn,mlp", ste_settings = "base", ste_name = "suite";
  TrainArgs ste_args;
  ste->add_option("--in", ste_in)->required();
  ste->add_option("--out", ste_out, "Output directory")->required();
  ste->add_option("--models", ste_models, "Comma-separated architectures")->capture_default_str();
  ste->add_option("--settings", ste_settings, "Comma-separated: base and perturbation names")->capture_default_str();
  ste->add_option("--name", ste_name, "Suite label in the outputs")->capture_default_str();
  add_train_options(ste, ste_args);

  // report
  auto* rep = app.add_subcommand("report", "Render SVG figures from stored results and audits");
  std::string rep_results, rep_audit, rep_out;
  rep->add_option("--results", rep_results, "results.csv from train or suite");
  rep->add_option("--audit", rep_audit, "audit.json from audit");
  rep->add_option("--out", rep_out, "Output directory")->required();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    // Expand --config into flags placed before the explicit ones, so explicit
    // flags win under the take-last policy.
    std::optional<std::string> cfg;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) throw UsageError("--config requires a path");
        cfg = args[i + 1];
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
        break;
      }
      if (args[i].rfind("--config=", 0) == 0) {
        cfg = args[i].substr(9);
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        break;
      }
    }
    if (cfg) {
      const auto sub_it = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind('-', 0) != 0; });
      if (sub_it == args.end()) throw UsageError("--config needs a subcommand");
      CLI::App* sub = nullptr;
      try {
        sub = app.get_subcommand(*sub_it);
      } catch (const CLI::OptionNotFound&) {
        throw UsageError("unknown subcommand '" + *sub_it + "'");
      }
      std::vector<std::string> expanded;
      for (const auto& [key, value] : read_config(*cfg)) {
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw UsageError("config key '" + key + "' is not a flag of '" + sub->get_name() + "'");
        if (opt->get_expected_max() == 0) {
          if (parse_bool(key, value)) expanded.push_back("--" + key);
        } else {
          expanded.push_back("--" + key);
          expanded.push_back(value);
        }
      }
      args.insert(sub_it + 1, expanded.begin(), expanded.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::DataError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen) {
      RegimeSpec spec = RegimeSpec::for_regime(parse_regime(regime));
      spec.corruption_scope = parse_corruption_scope(corruption);
      if (corrupt_prob) spec.corrupt_prob = *corrupt_prob;
      spec.randomize_features = randomize;
      spec.graphs_per_class = per_class;
      spec.feature_dim = dim;
      std::tie(spec.min_nodes, spec.max_nodes) = parse_range(nodes);
      spec.seed = gen_seed;
      if (clique_del) spec.clique_deletion_prob = *clique_del;
      if (star_rate) spec.star_extra_edge_rate = *star_rate;
      if (class_mean) spec.class_mean = *class_mean;
      spec.validate();
      const Dataset ds = gen_dataset(spec);
      save_dataset_artifact(gen_out, ds);
      print_stats(out, ds);
    } else if (*ing) {
      if (!roots_path.empty()) ingest_in.roots = roots_path;
      const io::IngestResult r = io::ingest(ingest_in);
      const auto violations = validate(r.dataset);
      out << "duplicate edges removed: " << r.report.duplicate_edges_removed << "\n"
          << "self-loops removed: " << r.report.self_loops_removed << "\n"
          << "validation: " << (violations.empty() ? "ok" : std::to_string(violations.size()) + " violations")
          << "\n";
      for (const auto& v : violations) out << "  " << v.reason << "\n";
      if (!violations.empty()) throw io::DataError("ingested data failed validation");
      save_dataset_artifact(ingest_out, r.dataset);
      print_stats(out, r.dataset);
    } else if (*per) {
      const Dataset ds = io::load_dataset(per_in);
      const Dataset result = apply_perturbation(ds, parse_perturbation_kind(per_kind), per_seed);
      save_dataset_artifact(per_out, result);
      print_stats(out, result);
    } else if (*aud) {
      const Dataset ds = io::load_dataset(aud_in);
      const StructuralReport report = audit(ds, probe);
      ensure_dir(aud_out);
      const fs::path path = fs::path(aud_out) / "audit.json";
      write_text(path, io::to_json(report).dump(2) + "\n");
      update_manifest(aud_out, {path});
      out << std::left << std::setw(26) << "metric" << std::setw(10) << "mean" << std::setw(10) << "median"
          << "std\n";
      for (const auto& [name, s] : report.overall.metrics) {
        out << std::setw(26) << name << std::setw(10) << fixed(s.mean) << std::setw(10) << fixed(s.median)
            << fixed(s.std) << "\n";
      }
      if (report.linear_probe_accuracy) {
        out << "linear probe accuracy: " << fixed(*report.linear_probe_accuracy) << "\n";
      } else {
        out << "linear probe skipped: " << report.probe_skip_reason << "\n";
      }
    } else if (*trn) {
      const Dataset ds = io::load_dataset(trn_in);
      TrainConfig config = trn_args.config(ds);
      config.keep_parameters = save_checkpoints;
      const ExperimentResult r = train_eval(ds, config);
      std::vector<SuiteCell> cells{{config.model.arch, Setting{}, r}};
      write_suite_outputs(trn_out, "train", cells);
      if (save_checkpoints) {
        const fs::path dir = fs::path(trn_out) / "checkpoints";
        ensure_dir(dir);
        std::vector<fs::path> written;
        for (std::size_t f = 0; f < r.folds.size(); ++f) {
          written.push_back(dir / ("fold-" + std::to_string(f + 1) + ".json"));
          gnn::save_checkpoint(written.back(), config.model, r.folds[f].parameters);
        }
        update_manifest(trn_out, written);
      }
      print_result_line(out, std::string(gnn::to_string(config.model.arch)), "base", r);
    } else if (*ste) {
      const Dataset ds = io::load_dataset(ste_in);
      const TrainConfig base = ste_args.config(ds);
      std::vector<gnn::Architecture> models;
      for (const auto& m : split_list(ste_models)) models.push_back(gnn::parse_architecture(m));
      std::vector<Setting> settings;
      for (const auto& s : split_list(ste_settings)) settings.push_back(Setting::parse(s));
      if (models.empty() || settings.empty()) throw UsageError("suite needs at least one model and one setting");
      const auto cells = run_suite(ds, models, settings, base);
      write_suite_outputs(ste_out, ste_name, cells);
      for (const auto& c : cells) print_result_line(out, std::string(gnn::to_string(c.model)), c.setting.name(), c.result);
    } else if (*rep) {
      if (rep_results.empty() && rep_audit.empty()) throw UsageError("report needs --results and/or --audit");
      ensure_dir(rep_out);
      std::vector<fs::path> written;
      if (!rep_results.empty()) {
        std::ifstream in(rep_results);
        if (!in) throw io::DataError("cannot open " + rep_results);
        const auto rows = io::read_results_csv(in);
        // (suite, model, setting) -> epoch -> sums over folds
        std::map<std::tuple<std::string, std::string, std::string>, std::map<std::size_t, std::array<double, 3>>> acc;
        for (const auto& r : rows) {
          auto& cell = acc[{r.suite, r.model, r.setting}][r.epoch];
          cell[0] += r.train_acc;
          cell[1] += r.val_acc;
          cell[2] += 1.0;
        }
        for (const auto& [key, epochs] : acc) {
          const auto& [suite, model, setting] = key;
          io::Series train{"train (mean)", {}}, val{"validation (mean)", {}};
          for (const auto& [epoch, s] : epochs) {
            train.y.push_back(s[0] / s[2]);
            val.y.push_back(s[1] / s[2]);
          }
          const fs::path path =
              fs::path(rep_out) / ("accuracy_" + slug(suite) + "_" + slug(model) + "_" + slug(setting) + ".svg");
          write_text(path, io::line_chart_svg(model + " / " + setting + " (" + suite + ")", "epoch", "accuracy",
                                              {train, val}));
          written.push_back(path);
        }
      }
      if (!rep_audit.empty()) {
        std::ifstream in(rep_audit);
        if (!in) throw io::DataError("cannot open " + rep_audit);
        io::Json j;
        try {
          j = io::Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw io::DataError(rep_audit + ": " + e.what());
        }
        if (!j.contains("histograms")) throw io::DataError(rep_audit + ": not an audit report");
        const auto& h = j.at("histograms");
        const fs::path size_path = fs::path(rep_out) / "graph_size_histogram.svg";
        write_text(size_path, io::histogram_svg("Graph size", "nodes per graph", io::histogram_from_json(h.at("graph_size"))));
        written.push_back(size_path);
        if (!h.at("normalized_root_degree").is_null()) {
          const fs::path root_path = fs::path(rep_out) / "root_degree_histogram.svg";
          write_text(root_path, io::histogram_svg("Normalized root degree", "deg(root) / (N - 1)",
                                                  io::histogram_from_json(h.at("normalized_root_degree"))));
          written.push_back(root_path);
        }
      }
      update_manifest(rep_out, written);
      for (const auto& p : written) out << p.generic_string() << "\n";
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::DataError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

} // namespace structprobe::cli
