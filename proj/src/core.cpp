#include "infometer/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "infometer/parallel.hpp"

namespace infometer {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DisjointSupport: return "DisjointSupport";
    case ErrorKind::SystemTooLarge: return "SystemTooLarge";
    case ErrorKind::MissingField: return "MissingField";
  }
  return "Error";
}

// ---- rng ---------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t RngSeed::substream(std::uint64_t index) const noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t RngSeed::derive(std::uint64_t tag, std::uint64_t index) const noexcept {
  return splitmix64(substream(index) ^ splitmix64(tag * 0xd1b54a32d192ed03ULL + 1));
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased and portable.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t v = engine_();
    if (v < limit) return v % n;
  }
}

double Rng::normal() {
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

Workers workers_from_env() {
  if (const char* env = std::getenv("INFOMETER_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return Workers{static_cast<std::size_t>(v)};
  }
  return Workers{1};
}

// ---- containers --------------------------------------------------------

SampleMatrix::SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                           std::vector<std::string> column_names, bool time_ordered)
    : rows_(rows), cols_(cols), data_(std::move(data)), names_(std::move(column_names)),
      time_ordered_(time_ordered) {
  require(rows_ >= 1 && cols_ >= 1, ErrorKind::InvalidInput, "sample matrix must be at least 1x1");
  require(data_.size() == rows_ * cols_, ErrorKind::InvalidInput, "data size does not match shape");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      fail(ErrorKind::InvalidInput, "non-finite value at row " + std::to_string(i / cols_) +
                                        ", column " + std::to_string(i % cols_));
    }
  }
  if (names_.empty()) {
    for (std::size_t c = 0; c < cols_; ++c) names_.push_back("c" + std::to_string(c));
  }
  require(names_.size() == cols_, ErrorKind::InvalidInput, "column name count does not match");
}

SampleMatrix SampleMatrix::from_column(std::span<const double> values, bool time_ordered,
                                       std::string name) {
  std::vector<std::string> names;
  if (!name.empty()) names.push_back(std::move(name));
  return SampleMatrix(values.size(), 1, std::vector<double>(values.begin(), values.end()),
                      std::move(names), time_ordered);
}

SampleMatrix SampleMatrix::from_columns(const std::vector<std::vector<double>>& columns,
                                        bool time_ordered, std::vector<std::string> names) {
  require(!columns.empty(), ErrorKind::InvalidInput, "no columns");
  const std::size_t n = columns.front().size();
  std::vector<double> data(n * columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    require(columns[c].size() == n, ErrorKind::InvalidInput, "columns differ in length");
    for (std::size_t r = 0; r < n; ++r) data[r * columns.size() + c] = columns[c][r];
  }
  return SampleMatrix(n, columns.size(), std::move(data), std::move(names), time_ordered);
}

std::vector<double> SampleMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::size_t SampleMatrix::column_index(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  require(it != names_.end(), ErrorKind::InvalidInput, "no column named '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

SampleMatrix SampleMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<double> out;
  out.reserve(rows.size() * cols_);
  for (std::size_t r : rows) {
    const auto src = row(r);
    out.insert(out.end(), src.begin(), src.end());
  }
  return SampleMatrix(rows.size(), cols_, std::move(out), names_, time_ordered_);
}

SampleMatrix SampleMatrix::select_columns(std::span<const std::size_t> cols) const {
  std::vector<double> out;
  out.reserve(rows_ * cols.size());
  std::vector<std::string> names;
  for (std::size_t c : cols) names.push_back(names_.at(c));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c : cols) out.push_back((*this)(r, c));
  return SampleMatrix(rows_, cols.size(), std::move(out), std::move(names), time_ordered_);
}

SampleMatrix SampleMatrix::hstack(const SampleMatrix& a, const SampleMatrix& b) {
  require(a.rows() == b.rows(), ErrorKind::InvalidInput, "row counts differ");
  std::vector<double> out;
  out.reserve(a.rows() * (a.cols() + b.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto ra = a.row(r);
    const auto rb = b.row(r);
    out.insert(out.end(), ra.begin(), ra.end());
    out.insert(out.end(), rb.begin(), rb.end());
  }
  std::vector<std::string> names = a.names_;
  names.insert(names.end(), b.names_.begin(), b.names_.end());
  return SampleMatrix(a.rows(), a.cols() + b.cols(), std::move(out), std::move(names),
                      a.time_ordered() && b.time_ordered());
}

DiscreteSeries::DiscreteSeries(std::vector<int> symbols, int alphabet_size)
    : symbols_(std::move(symbols)), alphabet_size_(alphabet_size) {
  require(alphabet_size_ >= 1, ErrorKind::InvalidInput, "alphabet size must be >= 1");
  for (int s : symbols_) {
    require(s >= 0 && s < alphabet_size_, ErrorKind::InvalidInput,
            "symbol " + std::to_string(s) + " outside alphabet of size " +
                std::to_string(alphabet_size_));
  }
}

DiscreteSeries DiscreteSeries::from_symbols(std::vector<int> symbols) {
  int k = 1;
  for (int s : symbols) k = std::max(k, s + 1);
  return DiscreteSeries(std::move(symbols), k);
}

namespace {

void validate_distribution(std::span<const double> p, const char* what) {
  require(!p.empty(), ErrorKind::InvalidInput, std::string(what) + " is empty");
  double total = 0.0;
  for (double v : p) {
    require(std::isfinite(v) && v >= 0.0, ErrorKind::InvalidInput,
            std::string(what) + " has a negative or non-finite entry");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-12 * std::max<double>(1.0, static_cast<double>(p.size())),
          ErrorKind::InvalidInput, std::string(what) + " does not sum to 1");
}

}  // namespace

ProbTable::ProbTable(std::vector<double> probs) : probs_(std::move(probs)) {
  validate_distribution(probs_, "probability table");
}

ProbTable ProbTable::from_counts(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) {
    require(std::isfinite(c) && c >= 0.0, ErrorKind::InvalidInput, "negative count");
    total += c;
  }
  require(total > 0.0, ErrorKind::DegenerateInput, "all counts are zero");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = counts[i] / total;
  return ProbTable(std::move(p));
}

ProbTable ProbTable::from_series(const DiscreteSeries& series) {
  require(series.size() >= 1, ErrorKind::InsufficientData, "empty series");
  std::vector<double> counts(static_cast<std::size_t>(series.alphabet_size()), 0.0);
  for (int s : series.symbols()) counts[static_cast<std::size_t>(s)] += 1.0;
  return from_counts(counts);
}

JointTable::JointTable(std::vector<std::size_t> shape, std::vector<double> probs)
    : shape_(std::move(shape)), probs_(std::move(probs)) {
  require(shape_.size() == 2 || shape_.size() == 3, ErrorKind::InvalidInput,
          "joint table must have 2 or 3 axes");
  const std::size_t n =
      std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
  require(n == probs_.size() && n > 0, ErrorKind::InvalidInput, "joint table shape mismatch");
  validate_distribution(probs_, "joint table");
}

JointTable JointTable::from_matrix(const std::vector<std::vector<double>>& rows) {
  require(!rows.empty(), ErrorKind::InvalidInput, "empty joint table");
  std::vector<double> flat;
  for (const auto& r : rows) {
    require(r.size() == rows.front().size(), ErrorKind::InvalidInput, "ragged joint table");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return JointTable({rows.size(), rows.front().size()}, std::move(flat));
}

JointTable JointTable::from_series(const DiscreteSeries& x, const DiscreteSeries& y) {
  require(x.size() == y.size() && x.size() > 0, ErrorKind::InvalidInput,
          "series lengths differ or are empty");
  const auto kx = static_cast<std::size_t>(x.alphabet_size());
  const auto ky = static_cast<std::size_t>(y.alphabet_size());
  std::vector<double> counts(kx * ky, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    counts[static_cast<std::size_t>(x[i]) * ky + static_cast<std::size_t>(y[i])] += 1.0;
  const double n = static_cast<double>(x.size());
  for (double& c : counts) c /= n;
  return JointTable({kx, ky}, std::move(counts));
}

ProbTable JointTable::marginal(std::size_t axis) const {
  require(axis < shape_.size(), ErrorKind::InvalidConfig, "axis out of range");
  std::vector<double> out(shape_[axis], 0.0);
  std::vector<std::size_t> idx(shape_.size(), 0);
  for (double p : probs_) {
    out[idx[axis]] += p;
    for (std::size_t a = shape_.size(); a-- > 0;) {
      if (++idx[a] < shape_[a]) break;
      idx[a] = 0;
    }
  }
  // Re-normalize away summation rounding.
  return ProbTable::from_counts(out);
}

// ---- preprocessing -----------------------------------------------------

const char* to_string(BinRule rule) noexcept {
  return rule == BinRule::EqualWidth ? "equal-width" : "equal-frequency";
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

Discretized discretize(std::span<const double> values, BinRule rule, int bins) {
  require(bins >= 2, ErrorKind::InvalidConfig, "need at least 2 bins");
  require(static_cast<std::size_t>(bins) <= values.size(), ErrorKind::InvalidConfig,
          "more bins than samples");
  for (double v : values) require(std::isfinite(v), ErrorKind::InvalidInput, "non-finite value");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  require(hi > lo, ErrorKind::DegenerateInput, "constant column cannot be discretized");

  const std::size_t n = values.size();
  std::vector<int> symbols(n);
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  if (rule == BinRule::EqualWidth) {
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) edges[static_cast<std::size_t>(b)] = lo + b * width;
    edges.back() = hi;
    for (std::size_t i = 0; i < n; ++i) {
      const int b = static_cast<int>(std::floor((values[i] - lo) / width));
      symbols[i] = std::clamp(b, 0, bins - 1);  // top edge belongs to the last bin
    }
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    for (std::size_t r = 0; r < n; ++r)
      symbols[order[r]] = static_cast<int>(r * static_cast<std::size_t>(bins) / n);
    for (int b = 0; b < bins; ++b) {
      const std::size_t first = (static_cast<std::size_t>(b) * n + bins - 1) / bins;
      edges[static_cast<std::size_t>(b)] = values[order[first]];
    }
    edges.back() = hi;
  }
  PreprocessStep step{"discretize", {{"rule", to_string(rule)}, {"bins", bins}, {"edges", edges}}};
  return {DiscreteSeries(std::move(symbols), bins), std::move(edges), std::move(step)};
}

SampleMatrix rank_transform(const SampleMatrix& samples) {
  const std::size_t n = samples.rows();
  require(n >= 2, ErrorKind::InsufficientData, "rank transform needs at least 2 rows");
  std::vector<double> out(n * samples.cols());
  std::vector<std::size_t> order(n);
  for (std::size_t c = 0; c < samples.cols(); ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return samples(a, c) < samples(b, c);
    });
    for (std::size_t r = 0; r < n; ++r)
      out[order[r] * samples.cols() + c] = (static_cast<double>(r) + 0.5) / static_cast<double>(n);
  }
  return SampleMatrix(n, samples.cols(), std::move(out), samples.column_names(),
                      samples.time_ordered());
}

namespace {

// Jitter keyed on (value, occurrence among equal values) rather than on row
// position, so row permutations and column swaps see identical noise.
double jitter_unit(std::uint64_t key, double value, std::uint64_t occurrence) {
  const std::uint64_t h =
      splitmix64(key ^ splitmix64(std::bit_cast<std::uint64_t>(value) ^ splitmix64(occurrence)));
  return static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5;
}

}  // namespace

SampleMatrix prepare_for_knn(const SampleMatrix& samples, const StandardizeOptions& options,
                             PreprocessLog* log) {
  const std::size_t n = samples.rows();
  const std::size_t d = samples.cols();
  std::vector<double> out(samples.data().begin(), samples.data().end());
  std::vector<std::size_t> order(n);
  Json constant_columns = Json::array();
  for (std::size_t c = 0; c < d; ++c) {
    const std::vector<double> col = samples.column(c);
    const double m = mean(col);
    const double sd = std::sqrt(variance(col));
    if (!(sd > 0.0)) {
      constant_columns.push_back(samples.column_names()[c]);
      if (options.standardize)
        for (std::size_t r = 0; r < n; ++r) out[r * d + c] = 0.0;
      continue;
    }
    if (options.jitter) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
      std::uint64_t occurrence = 0;
      const std::uint64_t key = options.seed.derive(0x6a69747465720000ULL);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = order[i];
        occurrence = (i > 0 && col[order[i - 1]] == col[r]) ? occurrence + 1 : 0;
        out[r * d + c] = col[r] + 1e-10 * sd * jitter_unit(key, col[r], occurrence);
      }
    }
    if (options.standardize)
      for (std::size_t r = 0; r < n; ++r) out[r * d + c] = (out[r * d + c] - m) / sd;
  }
  if (log) {
    if (options.jitter)
      log->push_back({"jitter", {{"scale", "1e-10 x column sd"}, {"seed", options.seed.master}}});
    if (options.standardize)
      log->push_back({"standardize", {{"method", "zero mean, unit variance"},
                                      {"constant_columns", constant_columns}}});
  }
  return SampleMatrix(n, d, std::move(out), samples.column_names(), samples.time_ordered());
}

StationarityReport check_stationarity(const SampleMatrix& series) {
  const std::size_t n = series.rows();
  require(n >= 20, ErrorKind::InsufficientData, "stationarity check needs N >= 20");
  StationarityReport report;
  const std::size_t half = n / 2;
  for (std::size_t c = 0; c < series.cols(); ++c) {
    const std::vector<double> col = series.column(c);
    const std::span<const double> first(col.data(), half);
    const std::span<const double> second(col.data() + (n - half), half);
    const double v1 = variance(first);
    const double v2 = variance(second);
    const double pooled = std::sqrt(0.5 * (v1 + v2));
    const double shift = pooled > 0.0 ? std::abs(mean(second) - mean(first)) / pooled
                                      : (mean(second) == mean(first) ? 0.0 : INFINITY);
    const double ratio = v1 > 0.0 ? v2 / v1 : (v2 > 0.0 ? INFINITY : 1.0);
    report.max_mean_shift = std::max(report.max_mean_shift, shift);
    report.min_variance_ratio = std::min(report.min_variance_ratio, ratio);
    report.max_variance_ratio = std::max(report.max_variance_ratio, ratio);
    const std::string& name = series.column_names()[c];
    if (shift > 0.5)
      report.warnings.push_back("mean drift in '" + name + "': " + std::to_string(shift) +
                                " pooled sd between halves");
    if (ratio < 0.5 || ratio > 2.0)
      report.warnings.push_back("variance ratio in '" + name + "': " + std::to_string(ratio));
  }
  report.pass = report.warnings.empty();
  return report;
}

}  // namespace infometer
