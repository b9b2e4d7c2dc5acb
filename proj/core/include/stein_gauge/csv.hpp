#pragma once

#include <optional>
#include <string>

#include "stein_gauge/discrepancy.hpp"
#include "stein_gauge/targets.hpp"

namespace stein_gauge {

struct SampleCsvOptions {
  bool header = false;
  /// Column holding per-point weights (0-based); every other column is a
  /// coordinate. Weights are normalized to sum to 1.
  std::optional<std::size_t> weights_column;
};

/// One row per point. Throws InputError on ragged rows, non-numeric cells,
/// negative weights or an empty file.
SampleMeasure read_samples_csv(const std::string& path, const SampleCsvOptions& options = {});
SampleMeasure parse_samples_csv(const std::string& text, const SampleCsvOptions& options = {});

/// One row per datapoint: covariates v_1..v_d then the label in {0, 1}.
struct LogisticData {
  Matrix covariates;
  Vector labels;
};

LogisticData read_logistic_csv(const std::string& path, bool header = false);
LogisticData parse_logistic_csv(const std::string& text, bool header = false);

}  // namespace stein_gauge
