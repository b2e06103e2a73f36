#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "structprobe/gnn/models.hpp"
#include "structprobe/graph.hpp"

namespace structprobe {

/// Index sets of a k-fold split.
using Folds = std::vector<std::vector<std::size_t>>;

/// Stratified split: each class is shuffled with `seed` and dealt round-robin
/// over the folds, the deal continuing where the previous class stopped. Per
/// fold, each class count differs from its exact share by less than 1 and
/// fold sizes differ by at most 1. Indices within a fold are ascending.
/// Throws std::invalid_argument if k < 2 or a class has fewer than k members.
Folds stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);
Folds stratified_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed);

enum class EpochSelection { Best, Last };

std::string_view to_string(EpochSelection selection);
EpochSelection parse_epoch_selection(std::string_view text);

struct TrainConfig {
  std::size_t folds = 10;
  std::size_t epochs = 50;
  std::size_t batch_size = 128;
  double lr = 0.01;
  double weight_decay = 0.001;
  std::uint64_t seed = 0;
  // Last epoch by default: the max over epochs inflates chance-level scores.
  EpochSelection selection = EpochSelection::Last;
  gnn::ModelConfig model;
  /// Keep each fold's trained parameters in the result.
  bool keep_parameters = false;

  void validate() const;
};

struct EpochRecord {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct FoldResult {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0; // first epoch reaching the maximum val accuracy
  double final_accuracy = 0.0;
  std::vector<gnn::NamedTensor> parameters; // only with keep_parameters
};

struct ExperimentResult {
  TrainConfig config;
  Provenance provenance;
  std::vector<FoldResult> folds;
  double mean_val_accuracy = 0.0;
  double ci95_halfwidth = 0.0;

  std::vector<double> per_fold_final_accuracies() const;
};

/// Fold-level seeds; all are derived from TrainConfig::seed and the fold
/// index, never from the architecture.
std::uint64_t fold_init_seed(std::uint64_t seed, std::size_t fold);
std::uint64_t fold_shuffle_seed(std::uint64_t seed, std::size_t fold);

/// Trains a fresh model on `train_idx` and evaluates on `val_idx` after every
/// epoch. A non-finite value aborts with std::runtime_error naming the fold
/// and epoch.
FoldResult train_fold(const Dataset& dataset, std::span<const std::size_t> train_idx,
                      std::span<const std::size_t> val_idx, const TrainConfig& config, std::size_t fold);

/// Fills mean and CI from fold finals: mean +- t_{0.975,k-1} * s / sqrt(k).
void summarize_folds(ExperimentResult& result);

ExperimentResult train_eval(const Dataset& dataset, const TrainConfig& config);
/// Same on caller-supplied folds (the count must match config.folds).
ExperimentResult train_eval(const Dataset& dataset, const TrainConfig& config, const Folds& folds);

/// Suite setting: the unperturbed dataset or one perturbation of it.
struct Setting {
  std::optional<PerturbationKind> perturbation;

  std::string name() const;
  static Setting parse(std::string_view text); // "base" or a perturbation name
  bool operator==(const Setting&) const = default;
};

struct SuiteCell {
  gnn::Architecture model = gnn::Architecture::GCN;
  Setting setting;
  ExperimentResult result;
};

/// Seed used for the perturbation of a suite setting.
std::uint64_t perturbation_seed(std::uint64_t seed, PerturbationKind kind);

/// models x settings, every cell sharing the folds of the base dataset.
/// `base` provides everything but the architecture. Cells are ordered model
/// major, setting minor.
std::vector<SuiteCell> run_suite(const Dataset& dataset, std::span<const gnn::Architecture> models,
                                 std::span<const Setting> settings, const TrainConfig& base);

} // namespace structprobe
