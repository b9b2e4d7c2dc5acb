#include "stein_gauge/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "stein_gauge/errors.hpp"

namespace stein_gauge {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) detail::throw_input("csv", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, std::size_t line) {
  const std::string t = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    detail::throw_input("csv", "line " + std::to_string(line) + ": not a number: '" + t + "'");
  return v;
}

std::vector<std::vector<double>> parse_table(const std::string& text, bool header) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool skipped = !header;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!skipped) {
      skipped = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream cells(t);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(parse_cell(cell, lineno));
    if (t.back() == ',') detail::throw_input("csv", "line " + std::to_string(lineno) + ": trailing comma");
    if (!rows.empty() && row.size() != rows.front().size())
      detail::throw_input("csv", "line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(rows.front().size()) + " columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) detail::throw_input("csv", "no data rows");
  return rows;
}

}  // namespace

SampleMeasure parse_samples_csv(const std::string& text, const SampleCsvOptions& options) {
  const auto rows = parse_table(text, options.header);
  const std::size_t cols = rows.front().size();
  if (options.weights_column) {
    detail::require(*options.weights_column < cols, "csv", "weights column out of range");
    detail::require(cols >= 2, "csv", "need at least one coordinate besides the weights");
  }
  const std::size_t d = options.weights_column ? cols - 1 : cols;
  SampleMeasure q;
  q.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  q.weights.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t k = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (options.weights_column && c == *options.weights_column) {
        q.weights(static_cast<Eigen::Index>(i)) = rows[i][c];
      } else {
        q.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k++)) = rows[i][c];
      }
    }
  }
  if (options.weights_column) {
    detail::require(q.weights.allFinite() && (q.weights.array() >= 0.0).all(), "csv",
                    "weights must be finite and nonnegative");
    const double total = q.weights.sum();
    detail::require(total > 0.0, "csv", "weights sum to zero");
    q.weights /= total;
  } else {
    q.weights.setConstant(1.0 / static_cast<double>(rows.size()));
  }
  q.validate();
  return q;
}

SampleMeasure read_samples_csv(const std::string& path, const SampleCsvOptions& options) {
  return parse_samples_csv(slurp(path), options);
}

LogisticData parse_logistic_csv(const std::string& text, bool header) {
  const auto rows = parse_table(text, header);
  const std::size_t cols = rows.front().size();
  detail::require(cols >= 2, "csv", "logistic data needs covariates and a label column");
  LogisticData out;
  out.covariates.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols - 1));
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c + 1 < cols; ++c)
      out.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    const double y = rows[i][cols - 1];
    detail::require(y == 0.0 || y == 1.0, "csv", "labels must be 0 or 1 (line " + std::to_string(i + 1) + ")");
    out.labels(static_cast<Eigen::Index>(i)) = y;
  }
  return out;
}

LogisticData read_logistic_csv(const std::string& path, bool header) {
  return parse_logistic_csv(slurp(path), header);
}

}  // namespace stein_gauge
