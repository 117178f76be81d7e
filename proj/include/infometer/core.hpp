#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "infometer/error.hpp"
#include "infometer/rng.hpp"

namespace infometer {

using Json = nlohmann::json;

/// One preprocessing step applied to the data, kept for the report manifest.
struct PreprocessStep {
  std::string name;
  Json params = Json::object();
};
using PreprocessLog = std::vector<PreprocessStep>;

/// N observations x d real dimensions, row-major. Validated on construction:
/// N >= 1, d >= 1, every entry finite.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
               std::vector<std::string> column_names = {}, bool time_ordered = false);

  static SampleMatrix from_column(std::span<const double> values, bool time_ordered = false,
                                  std::string name = {});
  static SampleMatrix from_columns(const std::vector<std::vector<double>>& columns,
                                   bool time_ordered = false, std::vector<std::string> names = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool time_ordered() const noexcept { return time_ordered_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }

  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double> column(std::size_t c) const;
  std::size_t column_index(const std::string& name) const;

  /// Rows selected (and possibly repeated) in the given order.
  SampleMatrix select_rows(std::span<const std::size_t> rows) const;
  SampleMatrix select_columns(std::span<const std::size_t> cols) const;
  /// Columns of `a` followed by columns of `b`; row counts must match.
  static SampleMatrix hstack(const SampleMatrix& a, const SampleMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::vector<std::string> names_;
  bool time_ordered_ = false;
};

/// Integer symbols in [0, alphabet_size).
class DiscreteSeries {
 public:
  DiscreteSeries() = default;
  DiscreteSeries(std::vector<int> symbols, int alphabet_size);
  /// Alphabet size inferred as max symbol + 1.
  static DiscreteSeries from_symbols(std::vector<int> symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  int alphabet_size() const noexcept { return alphabet_size_; }
  std::span<const int> symbols() const noexcept { return symbols_; }
  int operator[](std::size_t i) const noexcept { return symbols_[i]; }

 private:
  std::vector<int> symbols_;
  int alphabet_size_ = 1;
};

/// Normalized distribution over a finite alphabet (nats by convention).
class ProbTable {
 public:
  explicit ProbTable(std::vector<double> probs);
  /// Empirical frequencies of a series over its full alphabet.
  static ProbTable from_series(const DiscreteSeries& series);
  /// Normalizes non-negative counts.
  static ProbTable from_counts(std::span<const double> counts);

  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

/// Joint distribution over two or three finite axes, row-major.
class JointTable {
 public:
  JointTable(std::vector<std::size_t> shape, std::vector<double> probs);
  static JointTable from_matrix(const std::vector<std::vector<double>>& rows);
  static JointTable from_series(const DiscreteSeries& x, const DiscreteSeries& y);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::span<const double> probs() const noexcept { return probs_; }
  double at(std::size_t i, std::size_t j) const { return probs_[i * shape_[1] + j]; }
  /// Marginal over a single axis.
  ProbTable marginal(std::size_t axis) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> probs_;
};

enum class BinRule { EqualWidth, EqualFrequency };
const char* to_string(BinRule rule) noexcept;

struct Discretized {
  DiscreteSeries series;
  /// Lower edge of each bin followed by the top edge (B + 1 values).
  std::vector<double> edges;
  PreprocessStep step;
};

Discretized discretize(std::span<const double> values, BinRule rule, int bins);

/// Each column replaced by (rank - 0.5) / N; ties ranked in input order.
SampleMatrix rank_transform(const SampleMatrix& samples);

struct StandardizeOptions {
  bool standardize = true;  // zero mean, unit variance per column
  bool jitter = true;       // 1e-10 x column sd additive tie-breaking noise
  RngSeed seed{};
};

/// Preprocessing applied before every kNN estimator. Constant columns are
/// centered but not scaled, and never jittered.
SampleMatrix prepare_for_knn(const SampleMatrix& samples, const StandardizeOptions& options,
                             PreprocessLog* log = nullptr);

struct StationarityReport {
  bool pass = true;
  double max_mean_shift = 0.0;      // in pooled standard deviations
  double min_variance_ratio = 1.0;  // second half / first half
  double max_variance_ratio = 1.0;
  std::vector<std::string> warnings;
};

/// Split-half drift heuristic. Advisory only; never throws on drift.
StationarityReport check_stationarity(const SampleMatrix& series);

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // population variance (divides by N)

}  // namespace infometer
