#include "infometer/mi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "infometer/entropy.hpp"

namespace infometer {

const char* to_string(MiEstimator e) noexcept { return e == MiEstimator::Plugin ? "plugin" : "ksg"; }

MiEstimate mi_plugin(const JointTable& joint) {
  require(joint.shape().size() == 2, ErrorKind::InvalidInput, "mi_plugin needs a 2-axis table");
  const ProbTable px = joint.marginal(0);
  const ProbTable py = joint.marginal(1);
  const std::size_t ky = joint.shape()[1];
  double mi = 0.0;
  for (std::size_t i = 0; i < joint.shape()[0]; ++i) {
    for (std::size_t j = 0; j < ky; ++j) {
      const double pxy = joint.at(i, j);
      if (pxy > 0.0) mi += pxy * std::log(pxy / (px[i] * py[j]));
    }
  }
  MiEstimate e;
  e.value = std::max(mi, 0.0);
  e.estimator = MiEstimator::Plugin;
  e.hyperparams = {{"shape", joint.shape()}};
  return e;
}

MiEstimate cmi_plugin(const JointTable& joint) {
  require(joint.shape().size() == 3, ErrorKind::InvalidInput, "cmi_plugin needs a 3-axis table");
  const std::size_t kx = joint.shape()[0], ky = joint.shape()[1], kz = joint.shape()[2];
  std::vector<double> pxz(kx * kz, 0.0), pyz(ky * kz, 0.0), pz(kz, 0.0);
  const auto p = joint.probs();
  for (std::size_t i = 0; i < kx; ++i)
    for (std::size_t j = 0; j < ky; ++j)
      for (std::size_t l = 0; l < kz; ++l) {
        const double v = p[(i * ky + j) * kz + l];
        pxz[i * kz + l] += v;
        pyz[j * kz + l] += v;
        pz[l] += v;
      }
  double cmi = 0.0;
  for (std::size_t i = 0; i < kx; ++i)
    for (std::size_t j = 0; j < ky; ++j)
      for (std::size_t l = 0; l < kz; ++l) {
        const double v = p[(i * ky + j) * kz + l];
        if (v > 0.0) cmi += v * std::log(v * pz[l] / (pxz[i * kz + l] * pyz[j * kz + l]));
      }
  MiEstimate e;
  e.value = std::max(cmi, 0.0);
  e.estimator = MiEstimator::Plugin;
  e.hyperparams = {{"shape", joint.shape()}, {"conditional", true}};
  return e;
}

namespace {

// Dense id per distinct row of an integer-valued block.
std::vector<std::uint64_t> row_ids(const SampleMatrix& block) {
  const std::size_t n = block.rows();
  for (double v : block.data())
    require(std::floor(v) == v, ErrorKind::InvalidInput,
            "plugin estimator needs integer symbols; discretize continuous data first");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const auto ra = block.row(a);
    const auto rb = block.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<std::uint64_t> ids(n);
  std::uint64_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && less(order[i - 1], order[i])) ++next;
    ids[order[i]] = next;
  }
  return ids;
}

std::vector<std::uint64_t> dense(const std::vector<std::uint64_t>& keys) {
  std::vector<std::uint64_t> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint64_t> out(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i)
    out[i] = static_cast<std::uint64_t>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) -
                                        sorted.begin());
  return out;
}

// For each sample, how many samples share its key.
std::vector<std::size_t> multiplicity(const std::vector<std::uint64_t>& keys) {
  std::vector<std::uint64_t> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> out(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), keys[i]);
    out[i] = static_cast<std::size_t>(hi - lo);
  }
  return out;
}

std::vector<std::uint64_t> combine(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  const std::uint64_t n = a.size();
  std::vector<std::uint64_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * n + b[i];
  return out;
}

}  // namespace

double plugin_cmi_rows(const SampleMatrix& x, const SampleMatrix& y, const SampleMatrix* z) {
  const std::size_t n = x.rows();
  require(y.rows() == n && (!z || z->rows() == n), ErrorKind::InvalidInput,
          "blocks differ in length");
  require(n < (std::size_t{1} << 31), ErrorKind::InvalidInput, "too many samples for plugin counting");
  const auto xi = row_ids(x);
  const auto yi = row_ids(y);
  const std::vector<std::uint64_t> zi = z ? row_ids(*z) : std::vector<std::uint64_t>(n, 0);
  const auto xz = combine(xi, zi);
  const auto yz = combine(yi, zi);
  const auto c_xyz = multiplicity(combine(dense(xz), yi));
  const auto c_xz = multiplicity(xz);
  const auto c_yz = multiplicity(yz);
  const auto c_z = multiplicity(zi);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += std::log(static_cast<double>(c_xyz[i]) * static_cast<double>(c_z[i]) /
                    (static_cast<double>(c_xz[i]) * static_cast<double>(c_yz[i])));
  return std::max(acc / static_cast<double>(n), 0.0);
}

double plugin_entropy_rows(const SampleMatrix& x) {
  const auto c = multiplicity(row_ids(x));
  const double n = static_cast<double>(x.rows());
  double h = 0.0;
  for (std::size_t count : c) h -= std::log(static_cast<double>(count) / n);
  return h / n;
}

double mi_gaussian_oracle(double rho) {
  require(std::abs(rho) < 1.0, ErrorKind::InvalidConfig, "|rho| must be < 1");
  return -0.5 * std::log1p(-rho * rho);
}

SampleMatrix ksg_prepare(const SampleMatrix& block, const KsgOptions& options, PreprocessLog* log) {
  return prepare_for_knn(block, {options.standardize, options.jitter, options.seed}, log);
}

// ---- engine -------------------------------------------------------------

KsgEngine::KsgEngine(SampleMatrix x, std::optional<SampleMatrix> z, std::size_t k)
    : x_(std::move(x)), z_(std::move(z)), k_(k), psi_(x_.rows() + 1) {
  require(k_ >= 1 && k_ < x_.rows(), ErrorKind::InvalidConfig,
          "KSG needs 1 <= k < N (k=" + std::to_string(k_) + ", N=" + std::to_string(x_.rows()) + ")");
  if (z_) {
    require(z_->rows() == x_.rows(), ErrorKind::InvalidInput, "x and z differ in length");
    x_or_xz_ = std::make_unique<NeighborIndex>(SampleMatrix::hstack(x_, *z_),
                                              NeighborIndex::Mode::CountsOnly);
    z_index_ = std::make_unique<NeighborIndex>(*z_, NeighborIndex::Mode::CountsOnly);
  } else {
    x_or_xz_ = std::make_unique<NeighborIndex>(x_, NeighborIndex::Mode::CountsOnly);
  }
}

double KsgEngine::estimate(const SampleMatrix& y) const {
  const std::size_t n = x_.rows();
  require(y.rows() == n, ErrorKind::InvalidInput, "x and y differ in length");
  const SampleMatrix y_or_yz = z_ ? SampleMatrix::hstack(y, *z_) : y;
  const SampleMatrix joint = SampleMatrix::hstack(x_, y_or_yz);
  const NeighborIndex joint_index(joint);
  const NeighborIndex y_index(y_or_yz, NeighborIndex::Mode::CountsOnly);

  const std::vector<double> eps = joint_index.kth_distance_all(k_);
  const std::vector<std::size_t> nx = x_or_xz_->count_within_all(eps, true);
  const std::vector<std::size_t> ny = y_index.count_within_all(eps, true);
  double acc = 0.0;
  if (z_) {
    const std::vector<std::size_t> nz = z_index_->count_within_all(eps, true);
    for (std::size_t i = 0; i < n; ++i) acc += psi_(nx[i] + 1) + psi_(ny[i] + 1) - psi_(nz[i] + 1);
  } else {
    for (std::size_t i = 0; i < n; ++i) acc += psi_(nx[i] + 1) + psi_(ny[i] + 1);
  }
  const double mean_term = acc / static_cast<double>(n);
  return z_ ? psi_(k_) - mean_term : psi_(k_) + psi_(n) - mean_term;
}

double KsgEngine::estimate_reordered(const SampleMatrix& y, std::span<const std::size_t> order) const {
  return estimate(y.select_rows(order));
}

namespace {

void dimension_warning(MiEstimate& e, std::size_t dims) {
  if (dims > kKsgMaxDims) {
    e.warnings.push_back("combined dimension " + std::to_string(dims) +
                         " exceeds 20: kNN statistics are unreliable here; reduce dimension "
                         "(e.g. project to <= 15 components) before estimating");
  }
}

void negative_note(MiEstimate& e) {
  if (e.value < 0.0)
    e.warnings.push_back("negative KSG estimate reported unclipped (finite-sample bias)");
}

}  // namespace

MiEstimate mi_ksg(const SampleMatrix& x, const SampleMatrix& y, const KsgOptions& options) {
  require(x.rows() == y.rows(), ErrorKind::InvalidInput, "x and y differ in length");
  require(options.k >= 1 && options.k < x.rows(), ErrorKind::InvalidConfig, "KSG needs 1 <= k < N");
  MiEstimate e;
  e.estimator = MiEstimator::Ksg;
  e.k = options.k;
  dimension_warning(e, x.cols() + y.cols());
  SampleMatrix px = ksg_prepare(x, options, &e.preprocessing);
  const SampleMatrix py = ksg_prepare(y, options, nullptr);
  const KsgEngine engine(std::move(px), std::nullopt, options.k);
  e.value = engine.estimate(py);
  e.hyperparams = {{"k", options.k}, {"algorithm", 1}, {"n", x.rows()},
                   {"dx", x.cols()}, {"dy", y.cols()}, {"norm", "max"}};
  negative_note(e);
  return e;
}

MiEstimate cmi_ksg(const SampleMatrix& x, const SampleMatrix& y, const SampleMatrix& z,
                   const KsgOptions& options) {
  require(x.rows() == y.rows() && x.rows() == z.rows(), ErrorKind::InvalidInput,
          "x, y, z differ in length");
  require(options.k >= 1 && options.k < x.rows(), ErrorKind::InvalidConfig, "KSG needs 1 <= k < N");
  MiEstimate e;
  e.estimator = MiEstimator::Ksg;
  e.k = options.k;
  dimension_warning(e, x.cols() + y.cols() + z.cols());
  SampleMatrix px = ksg_prepare(x, options, &e.preprocessing);
  const SampleMatrix py = ksg_prepare(y, options, nullptr);
  SampleMatrix pz = ksg_prepare(z, options, nullptr);
  const KsgEngine engine(std::move(px), std::move(pz), options.k);
  e.value = engine.estimate(py);
  e.hyperparams = {{"k", options.k}, {"algorithm", 1}, {"conditional", true}, {"n", x.rows()},
                   {"dx", x.cols()}, {"dy", y.cols()}, {"dz", z.cols()}, {"norm", "max"}};
  negative_note(e);
  return e;
}

}  // namespace infometer
