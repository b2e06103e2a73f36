#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "structprobe/cli/cli.hpp"
#include "structprobe/cli/manifest.hpp"
#include "structprobe/io/dataset_file.hpp"
#include "structprobe/io/errors.hpp"
#include "structprobe/io/ingest.hpp"
#include "structprobe/io/json_codec.hpp"
#include "structprobe/io/results.hpp"
#include "structprobe/io/svg.hpp"
#include "structprobe/perturb.hpp"
#include "structprobe/synth.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace structprobe;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("structprobe_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& s) const { return path / s; }
};

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "structprobe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

} // namespace

TEST_SUITE("io") {
  TEST_CASE("float formatting is shortest round-trip") {
    CHECK(io::format_float(1.0f) == "1.0");
    CHECK(io::format_float(0.1f) == "0.1");
    CHECK(io::format_float(-0.0f) == "-0.0");
    CHECK(io::format_float(1e-30f) == "1e-30");
    CHECK(io::format_double(0.5) == "0.5");
  }

  TEST_CASE("dataset files round trip bit-exactly") {
    RegimeSpec spec = RegimeSpec::for_regime(FeatureRegime::NoisyFeatures);
    spec.graphs_per_class = 5;
    spec.seed = 4;
    Dataset ds = gen_dataset(spec);
    ds = apply_perturbation(ds, PerturbationKind::RewireEdges, 3);
    auto f = ds.graphs[0].features.values();
    f[0] = -0.0f;
    f[1] = std::numeric_limits<float>::denorm_min();
    f[2] = std::numeric_limits<float>::max();
    f[3] = 0.1f;
    f[4] = 16777217.0f;
    std::stringstream buf;
    io::write_dataset(buf, ds);
    const Dataset back = io::read_dataset(buf);
    CHECK(back == ds);
    CHECK(std::signbit(back.graphs[0].features.values()[0]));
    std::stringstream again;
    io::write_dataset(again, back);
    std::stringstream first;
    io::write_dataset(first, ds);
    CHECK(again.str() == first.str());
  }

  TEST_CASE("dataset reader rejects foreign versions and bad content") {
    const Dataset ds = testsupport::random_dataset(2, 2, 3, 2, 1);
    std::stringstream buf;
    io::write_dataset(buf, ds);
    std::string text = buf.str();
    const auto pos = text.find("\"format_version\":1");
    REQUIRE(pos != std::string::npos);
    std::string v2 = text;
    v2.replace(pos, 18, "\"format_version\":2");
    std::istringstream in2(v2);
    CHECK_THROWS_AS(io::read_dataset(in2), io::DataError);
    std::istringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(io::read_dataset(truncated), io::DataError);
    std::istringstream empty("");
    CHECK_THROWS_AS(io::read_dataset(empty), io::DataError);
  }

  TEST_CASE("ingest canonicalizes and reports cleanup") {
    TempDir dir("ingest");
    write_file(dir / "labels.txt", "# id label\na 1\nb 0\n");
    write_file(dir / "features.txt", "a 7 1.0 2.0\na 3 3.0 4.0\na 5 5.0 6.0\nb 1 0.5 0.5\n");
    write_file(dir / "edges.txt", "a 7 3\na 3 7\na 5 5\na 5 7\n");
    write_file(dir / "roots.txt", "a 7\n");
    const auto r = io::ingest({dir / "edges.txt", dir / "features.txt", dir / "labels.txt", dir / "roots.txt"});
    CHECK(r.report.graphs == 2);
    CHECK(r.report.nodes == 4);
    CHECK(r.report.edges == 2);
    CHECK(r.report.duplicate_edges_removed == 1);
    CHECK(r.report.self_loops_removed == 1);
    const GraphInstance& a = r.dataset.graphs[0];
    CHECK(a.id == "a");
    CHECK(a.label == 1);
    CHECK(a.root == 0);
    // root 7 -> 0, then 3 -> 1, 5 -> 2
    CHECK(a.features(0, 0) == 1.0f);
    CHECK(a.features(1, 0) == 3.0f);
    CHECK(a.features(2, 0) == 5.0f);
    CHECK(a.edges == std::vector<Edge>{{0, 1}, {0, 2}});
    const GraphInstance& b = r.dataset.graphs[1];
    CHECK(b.num_nodes == 1);
    CHECK(b.edges.empty());
    CHECK(validate(r.dataset).empty());
  }

  TEST_CASE("ingest errors name file and row") {
    TempDir dir("ingest_err");
    write_file(dir / "labels.txt", "a 1\n");
    write_file(dir / "features.txt", "a 0 1.0\na 1 2.0\n");
    write_file(dir / "edges.txt", "a 0 1\n\na 0 9\n");
    CHECK_THROWS_WITH_AS(io::ingest({dir / "edges.txt", dir / "features.txt", dir / "labels.txt", std::nullopt}),
                         "edges.txt row 3: node 9 has no feature row", io::DataError);
    write_file(dir / "labels.txt", "a 2\n");
    CHECK_THROWS_WITH_AS(io::ingest({dir / "edges.txt", dir / "features.txt", dir / "labels.txt", std::nullopt}),
                         "labels.txt row 1: label must be 0 or 1", io::DataError);
    write_file(dir / "labels.txt", "a 1\n");
    write_file(dir / "features.txt", "a 0 1.0\na 1 2.0 3.0\n");
    CHECK_THROWS_AS(io::ingest({dir / "edges.txt", dir / "features.txt", dir / "labels.txt", std::nullopt}),
                    io::DataError);
  }

  TEST_CASE("results csv round trip") {
    const Dataset ds = testsupport::random_dataset(12, 3, 5, 3, 2);
    TrainConfig cfg;
    cfg.folds = 2;
    cfg.epochs = 3;
    cfg.model.arch = gnn::Architecture::SAGE;
    cfg.model.input_dim = 3;
    cfg.model.hidden_dim = 4;
    const std::vector<SuiteCell> cells{{cfg.model.arch, Setting{}, train_eval(ds, cfg)}};
    std::stringstream csv;
    io::write_results_csv(csv, "t", cells);
    const auto rows = io::read_results_csv(csv);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].model == "sage");
    CHECK(rows[0].setting == "base");
    CHECK(rows[0].fold == 1);
    CHECK(rows[5].epoch == 3);
    CHECK(rows[5].val_acc == cells[0].result.folds[1].epochs[2].val_accuracy);
    const io::Json j = io::to_json(cells[0].result);
    CHECK(j["final"]["selection"] == "last");
    CHECK(io::train_config_from_json(j["config"]).model == cfg.model);
  }

  TEST_CASE("histogram json round trip") {
    const std::vector<double> v{0.1, 0.2, 0.2, 0.9};
    const Histogram h = histogram(v, 0.0, 1.0);
    const Histogram back = io::histogram_from_json(io::to_json(h));
    CHECK(back.counts == h.counts);
    CHECK(back.edges == h.edges);
    CHECK(back.policy == h.policy);
  }

  TEST_CASE("svg output is deterministic") {
    const std::vector<io::Series> s{{"train", {0.5, 0.7, 0.9}}, {"val", {0.4, 0.6, 1.2}}};
    const std::string a = io::line_chart_svg("acc", "epoch", "accuracy", s);
    CHECK(a == io::line_chart_svg("acc", "epoch", "accuracy", s));
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
  }

  TEST_CASE("manifest hashes") {
    TempDir dir("manifest");
    write_file(dir / "abc.txt", "abc");
    CHECK(cli::sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    cli::update_manifest(dir.path, {dir / "abc.txt"});
    const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(m.dump().find("abc.txt") != std::string::npos);
    CHECK(m.dump().find("ba7816bf") != std::string::npos);
  }
}

TEST_SUITE("cli-report") {
  TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"gen", "--out", "x.jsonl"}).code == 2);
    TempDir dir("cli_usage");
    const auto bad = run({"gen", "--regime", "noisy", "--randomize-features", "--out", (dir / "x.jsonl").string()});
    CHECK(bad.code == 2);
    CHECK(!bad.err.empty());
    CHECK(!fs::exists(dir / "x.jsonl"));
    CHECK(run({"train", "--in", (dir / "missing.jsonl").string(), "--out", (dir / "o").string()}).code == 2);
    CHECK(run({"--help"}).code == 0);
  }

  TEST_CASE("gen is byte-identical across runs and records a manifest") {
    TempDir dir("cli_gen");
    const std::vector<std::string> base{"gen", "--regime", "structure-only", "--graphs-per-class", "6", "--seed", "3"};
    auto a = base;
    a.insert(a.end(), {"--out", (dir / "a.jsonl").string()});
    auto b = base;
    b.insert(b.end(), {"--out", (dir / "b.jsonl").string()});
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
    CHECK(fs::exists(dir / "manifest.json"));
    const Dataset ds = io::load_dataset(dir / "a.jsonl");
    CHECK(ds.graphs.size() == 12);
    CHECK(ds.provenance.regime->regime == FeatureRegime::StructureOnly);
  }

  TEST_CASE("config file supplies flags and explicit flags win") {
    TempDir dir("cli_config");
    write_file(dir / "gen.cfg", "# generator\nregime = clean\ngraphs_per_class = 4\nrandomize_features = true\nseed=9\n");
    REQUIRE(run({"gen", "--config", (dir / "gen.cfg").string(), "--seed", "2", "--out", (dir / "c.jsonl").string()})
                .code == 0);
    const Dataset ds = io::load_dataset(dir / "c.jsonl");
    CHECK(ds.graphs.size() == 8);
    CHECK(ds.provenance.regime->randomize_features);
    CHECK(ds.provenance.regime->seed == 2);
    write_file(dir / "bad.cfg", "no_such_flag = 1\n");
    CHECK(run({"gen", "--config", (dir / "bad.cfg").string(), "--out", (dir / "d.jsonl").string()}).code == 2);
  }

  TEST_CASE("perturb, audit, suite and report end to end") {
    TempDir dir("cli_e2e");
    const auto data = (dir / "d.jsonl").string();
    REQUIRE(run({"gen", "--regime", "clean", "--graphs-per-class", "6", "--dim", "4", "--nodes", "5..9", "--seed",
                 "1", "--out", data})
                .code == 0);
    REQUIRE(run({"perturb", "--in", data, "--kind", "rewire-edges", "--seed", "4", "--out",
                 (dir / "r.jsonl").string()})
                .code == 0);
    CHECK(io::load_dataset(dir / "r.jsonl").provenance.perturbations.size() == 1);
    CHECK(run({"perturb", "--in", data, "--kind", "drop-nodes", "--out", (dir / "x.jsonl").string()}).code == 2);

    REQUIRE(run({"audit", "--in", data, "--out", (dir / "audit").string(), "--probe-folds", "3"}).code == 0);
    const auto audit = nlohmann::json::parse(slurp(dir / "audit" / "audit.json"));
    CHECK(audit["summary"].contains("overall"));
    CHECK(fs::exists(dir / "audit" / "manifest.json"));

    const auto suite = run({"suite", "--in", data, "--out", (dir / "suite").string(), "--folds", "3", "--epochs",
                            "2", "--hidden", "4", "--settings", "base,shuffle-features,rewire-edges", "--name", "t"});
    REQUIRE(suite.code == 0);
    std::ifstream csv(dir / "suite" / "results.csv");
    const auto rows = io::read_results_csv(csv);
    CHECK(rows.size() == 5 * 3 * 3 * 2);
    CHECK(fs::exists(dir / "suite" / "results.json"));

    REQUIRE(run({"report", "--results", (dir / "suite" / "results.csv").string(), "--audit",
                 (dir / "audit" / "audit.json").string(), "--out", (dir / "fig1").string()})
                .code == 0);
    REQUIRE(run({"report", "--results", (dir / "suite" / "results.csv").string(), "--audit",
                 (dir / "audit" / "audit.json").string(), "--out", (dir / "fig2").string()})
                .code == 0);
    std::size_t svgs = 0;
    for (const auto& entry : fs::directory_iterator(dir / "fig1")) {
      if (entry.path().extension() != ".svg") continue;
      ++svgs;
      CHECK(slurp(entry.path()) == slurp(dir / "fig2" / entry.path().filename()));
    }
    CHECK(svgs == 15 + 2);
    CHECK(fs::exists(dir / "fig1" / "accuracy_t_gcn_rewire-edges.svg"));
    CHECK(run({"report", "--out", (dir / "fig3").string()}).code == 2);
  }

  TEST_CASE("train writes checkpoints that reload") {
    TempDir dir("cli_train");
    const auto data = (dir / "d.jsonl").string();
    REQUIRE(run({"gen", "--regime", "clean", "--graphs-per-class", "4", "--dim", "3", "--nodes", "4..6", "--out",
                 data})
                .code == 0);
    const auto r = run({"train", "--in", data, "--out", (dir / "t").string(), "--model", "gat", "--folds", "2",
                        "--epochs", "2", "--save-checkpoints"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("gat") != std::string::npos);
    CHECK(fs::exists(dir / "t" / "checkpoints" / "fold-1.json"));
    CHECK(fs::exists(dir / "t" / "checkpoints" / "fold-2.json"));
    CHECK(run({"train", "--in", data, "--out", (dir / "u").string(), "--model", "gin"}).code == 2);
  }

  TEST_CASE("audit of star-only data puts root degree mass in the top bin") {
    TempDir dir("cli_stars");
    Dataset ds;
    ds.feature_dim = 2;
    for (int i = 0; i < 4; ++i) {
      GraphInstance g;
      g.id = "s" + std::to_string(i);
      g.label = i % 2;
      g.num_nodes = 5;
      for (NodeIndex v = 1; v < 5; ++v) g.edges.push_back({0, v});
      g.features = FeatureMatrix(5, 2);
      ds.graphs.push_back(g);
    }
    io::save_dataset(dir / "s.jsonl", ds);
    REQUIRE(run({"audit", "--in", (dir / "s.jsonl").string(), "--out", (dir / "a").string()}).code == 0);
    const auto j = io::Json::parse(slurp(dir / "a" / "audit.json"));
    const Histogram h = io::histogram_from_json(j["histograms"]["normalized_root_degree"]);
    CHECK(h.counts.back() == 4);
    REQUIRE(run({"report", "--audit", (dir / "a" / "audit.json").string(), "--out", (dir / "f").string()}).code == 0);
    CHECK(fs::exists(dir / "f" / "root_degree_histogram.svg"));
  }
}
