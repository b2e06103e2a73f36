#include "structprobe/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "structprobe/gnn/batch.hpp"
#include "structprobe/nn/adam.hpp"
#include "structprobe/nn/ops.hpp"
#include "structprobe/parallel.hpp"
#include "structprobe/perturb.hpp"
#include "structprobe/rng.hpp"
#include "structprobe/stats.hpp"

namespace structprobe {

namespace {
constexpr std::uint64_t kFoldSplitStream = 0xF01D000000000000ULL;
constexpr std::uint64_t kInitStream = 0x1417000000000000ULL;
constexpr std::uint64_t kShuffleStream = 0x5B0F000000000000ULL;
constexpr std::uint64_t kPerturbStream = 0x9E27000000000000ULL;

void shuffle_in_place(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_below(i);
    std::swap(v[i - 1], v[j]);
  }
}

std::size_t argmax_row(const nn::Tensor& logits, std::size_t r) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < logits.cols(); ++c) {
    if (logits.at(r, c) > logits.at(r, best)) best = c;
  }
  return best;
}

std::size_t count_correct(const nn::Tensor& logits, std::span<const int> labels) {
  std::size_t correct = 0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (static_cast<int>(argmax_row(logits, r)) == labels[r]) ++correct;
  }
  return correct;
}
} // namespace

Folds stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("number of folds must be at least 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, members] : by_class) {
    if (members.size() < k) {
      throw std::invalid_argument("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                                  " members, fewer than " + std::to_string(k) + " folds");
    }
  }
  Folds folds(k);
  std::size_t offset = 0;
  for (auto& [label, members] : by_class) {
    Rng rng = Rng::stream(seed, kFoldSplitStream + static_cast<std::uint64_t>(label));
    shuffle_in_place(members, rng);
    for (std::size_t j = 0; j < members.size(); ++j) folds[(offset + j) % k].push_back(members[j]);
    offset = (offset + members.size()) % k;
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

Folds stratified_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(dataset.graphs.size());
  for (const auto& g : dataset.graphs) labels.push_back(g.label);
  return stratified_folds(labels, k, seed);
}

std::string_view to_string(EpochSelection selection) {
  return selection == EpochSelection::Best ? "best" : "last";
}

EpochSelection parse_epoch_selection(std::string_view text) {
  if (text == "best") return EpochSelection::Best;
  if (text == "last") return EpochSelection::Last;
  throw std::invalid_argument("unknown epoch selection '" + std::string(text) + "' (expected best|last)");
}

void TrainConfig::validate() const {
  if (folds < 2) throw std::invalid_argument("folds must be at least 2");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be non-negative");
  model.validate();
}

std::vector<double> ExperimentResult::per_fold_final_accuracies() const {
  std::vector<double> out;
  out.reserve(folds.size());
  for (const auto& f : folds) out.push_back(f.final_accuracy);
  return out;
}

std::uint64_t fold_init_seed(std::uint64_t seed, std::size_t fold) { return derive_seed(seed, kInitStream + fold); }

std::uint64_t fold_shuffle_seed(std::uint64_t seed, std::size_t fold) {
  return derive_seed(seed, kShuffleStream + fold);
}

FoldResult train_fold(const Dataset& dataset, std::span<const std::size_t> train_idx,
                      std::span<const std::size_t> val_idx, const TrainConfig& config, std::size_t fold) {
  if (train_idx.empty() || val_idx.empty()) throw std::invalid_argument("fold has an empty train or validation split");
  if (dataset.feature_dim != config.model.input_dim) {
    throw std::invalid_argument("model input_dim " + std::to_string(config.model.input_dim) +
                                " does not match feature dimension " + std::to_string(dataset.feature_dim));
  }
  auto model = gnn::make_model(config.model, fold_init_seed(config.seed, fold));
  std::vector<nn::Tensor> params = model->parameters();
  nn::AdamConfig adam_cfg;
  adam_cfg.lr = config.lr;
  adam_cfg.weight_decay = config.weight_decay;
  nn::AdamState adam(adam_cfg, params);
  Rng rng(fold_shuffle_seed(config.seed, fold));

  const gnn::GraphBatch val_batch = gnn::make_batch(dataset, val_idx);
  std::vector<std::size_t> order(train_idx.begin(), train_idx.end());

  FoldResult result;
  result.epochs.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    try {
      shuffle_in_place(order, rng);
      double loss_sum = 0.0;
      std::size_t correct = 0;
      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t end = std::min(order.size(), start + config.batch_size);
        const std::span<const std::size_t> chunk(order.data() + start, end - start);
        const gnn::GraphBatch batch = gnn::make_batch(dataset, chunk);
        nn::Tape tape;
        nn::TapeScope scope(tape);
        const nn::Tensor logits = model->forward(batch, {true, &rng});
        const nn::Tensor loss = nn::cross_entropy(logits, batch.labels);
        tape.backward(loss);
        nn::adam_step(adam, params);
        model->zero_grad();
        loss_sum += loss.item() * static_cast<double>(chunk.size());
        correct += count_correct(logits, batch.labels);
      }
      EpochRecord rec;
      rec.train_loss = loss_sum / static_cast<double>(order.size());
      rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
      if (!std::isfinite(rec.train_loss)) throw nn::NonFiniteError("training loss is not finite");
      for (const auto& p : params) {
        for (double v : p.values()) {
          if (!std::isfinite(v)) throw nn::NonFiniteError("parameter update produced a non-finite value");
        }
      }
      const nn::Tensor val_logits = model->forward(val_batch);
      rec.val_accuracy = static_cast<double>(count_correct(val_logits, val_batch.labels)) /
                         static_cast<double>(val_batch.num_graphs());
      result.epochs.push_back(rec);
    } catch (const nn::NonFiniteError& e) {
      throw std::runtime_error("fold " + std::to_string(fold) + ", epoch " + std::to_string(epoch + 1) +
                               ": aborted on non-finite value (" + e.what() + ")");
    }
  }

  for (std::size_t e = 1; e < result.epochs.size(); ++e) {
    if (result.epochs[e].val_accuracy > result.epochs[result.best_epoch].val_accuracy) result.best_epoch = e;
  }
  result.final_accuracy = config.selection == EpochSelection::Best ? result.epochs[result.best_epoch].val_accuracy
                                                                   : result.epochs.back().val_accuracy;
  if (config.keep_parameters) {
    for (const auto& [name, t] : model->named_parameters()) result.parameters.emplace_back(name, t.detach());
  }
  return result;
}

void summarize_folds(ExperimentResult& result) {
  const auto finals = result.per_fold_final_accuracies();
  const ConfidenceInterval ci = ci95(finals);
  result.mean_val_accuracy = ci.mean;
  result.ci95_halfwidth = ci.half_width;
}

namespace {
std::vector<std::size_t> complement(const Folds& folds, std::size_t held_out) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f != held_out) out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_folds(const Folds& folds, const TrainConfig& config, std::size_t n) {
  if (folds.size() != config.folds) {
    throw std::invalid_argument("fold count " + std::to_string(folds.size()) + " does not match config (" +
                                std::to_string(config.folds) + ")");
  }
  for (const auto& f : folds) {
    for (std::size_t i : f) {
      if (i >= n) throw std::invalid_argument("fold index out of range");
    }
  }
}
} // namespace

ExperimentResult train_eval(const Dataset& dataset, const TrainConfig& config, const Folds& folds) {
  config.validate();
  check_folds(folds, config, dataset.graphs.size());
  ExperimentResult result;
  result.config = config;
  result.provenance = dataset.provenance;
  result.folds.resize(folds.size());
  parallel_for(folds.size(), [&](std::size_t f) {
    const auto train_idx = complement(folds, f);
    result.folds[f] = train_fold(dataset, train_idx, folds[f], config, f);
  });
  summarize_folds(result);
  return result;
}

ExperimentResult train_eval(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  return train_eval(dataset, config, stratified_folds(dataset, config.folds, config.seed));
}

std::string Setting::name() const {
  return perturbation ? std::string(to_string(*perturbation)) : std::string("base");
}

Setting Setting::parse(std::string_view text) {
  if (text == "base") return Setting{};
  return Setting{parse_perturbation_kind(text)};
}

std::uint64_t perturbation_seed(std::uint64_t seed, PerturbationKind kind) {
  return derive_seed(seed, kPerturbStream + static_cast<std::uint64_t>(kind));
}

std::vector<SuiteCell> run_suite(const Dataset& dataset, std::span<const gnn::Architecture> models,
                                 std::span<const Setting> settings, const TrainConfig& base) {
  base.validate();
  const Folds folds = stratified_folds(dataset, base.folds, base.seed);

  std::vector<Dataset> variants;
  variants.reserve(settings.size());
  for (const Setting& s : settings) {
    variants.push_back(s.perturbation
                           ? apply_perturbation(dataset, *s.perturbation, perturbation_seed(base.seed, *s.perturbation))
                           : dataset);
  }

  std::vector<SuiteCell> cells;
  for (gnn::Architecture arch : models) {
    for (const Setting& s : settings) {
      SuiteCell cell;
      cell.model = arch;
      cell.setting = s;
      cell.result.config = base;
      cell.result.config.model.arch = arch;
      cell.result.folds.resize(folds.size());
      cells.push_back(std::move(cell));
    }
  }

  const std::size_t k = folds.size();
  parallel_for(cells.size() * k, [&](std::size_t task) {
    SuiteCell& cell = cells[task / k];
    const std::size_t f = task % k;
    const std::size_t setting_index = (task / k) % settings.size();
    const auto train_idx = complement(folds, f);
    cell.result.folds[f] = train_fold(variants[setting_index], train_idx, folds[f], cell.result.config, f);
  });
  for (std::size_t c = 0; c < cells.size(); ++c) {
    cells[c].result.provenance = variants[c % settings.size()].provenance;
    summarize_folds(cells[c].result);
  }
  return cells;
}

} // namespace structprobe
