#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "structprobe/io/json_codec.hpp"
#include "structprobe/metrics.hpp"
#include "structprobe/train.hpp"

namespace structprobe::io {

Json to_json(const ExperimentResult& result);
Json suite_to_json(const std::string& suite, std::span<const SuiteCell> cells);

/// Flat per-epoch table: suite,model,setting,fold,epoch,train_loss,train_acc,val_acc.
/// Folds and epochs are 1-based.
void write_results_csv(std::ostream& out, const std::string& suite, std::span<const SuiteCell> cells);

struct CurveRow {
  std::string suite;
  std::string model;
  std::string setting;
  std::size_t fold = 0;
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
};

/// Throws DataError on a wrong header or malformed row.
std::vector<CurveRow> read_results_csv(std::istream& in);

Json to_json(const Summary& s);
Json to_json(const Histogram& h);
Histogram histogram_from_json(const Json& j);
Json to_json(const StructuralReport& report);

} // namespace structprobe::io
