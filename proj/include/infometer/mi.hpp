#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infometer/core.hpp"
#include "infometer/knn.hpp"
#include "infometer/results.hpp"
#include "infometer/special.hpp"

namespace infometer {

enum class MiEstimator { Plugin, Ksg };
const char* to_string(MiEstimator e) noexcept;

/// Mutual information measurement. `role` is always "measurement": this
/// library never reports variational training bounds as estimates.
struct MiEstimate {
  double value = 0.0;  // nats
  MiEstimator estimator = MiEstimator::Plugin;
  std::size_t k = 0;   // KSG only
  std::string role = "measurement";
  Json hyperparams = Json::object();
  std::vector<std::string> warnings;
  PreprocessLog preprocessing;
  std::optional<CiResult> ci;
  std::optional<SignificanceResult> significance;
};

/// Combined dimensionality above which KSG emits a dimension-reduction warning.
inline constexpr std::size_t kKsgMaxDims = 20;

MiEstimate mi_plugin(const JointTable& joint);
/// I(X;Y|Z) for a three-axis joint table (axes x, y, z).
MiEstimate cmi_plugin(const JointTable& joint);

/// Plugin (conditional) MI between integer-valued sample blocks, counting
/// joint row patterns. Throws InvalidInput on non-integer entries.
double plugin_cmi_rows(const SampleMatrix& x, const SampleMatrix& y, const SampleMatrix* z = nullptr);

/// Plugin entropy of the row patterns of an integer-valued block.
double plugin_entropy_rows(const SampleMatrix& x);

struct KsgOptions {
  std::size_t k = 4;
  bool standardize = true;
  bool jitter = true;
  RngSeed seed{};
};

/// Kraskov-Stoegbauer-Grassberger algorithm 1:
/// psi(k) + psi(N) - <psi(n_x + 1) + psi(n_y + 1)>, strict marginal counts
/// at each point's joint k-th neighbor distance (max-norm).
MiEstimate mi_ksg(const SampleMatrix& x, const SampleMatrix& y, const KsgOptions& options = {});

/// Conditional KSG: psi(k) - <psi(n_xz + 1) + psi(n_yz + 1) - psi(n_z + 1)>.
MiEstimate cmi_ksg(const SampleMatrix& x, const SampleMatrix& y, const SampleMatrix& z,
                   const KsgOptions& options = {});

/// -1/2 ln(1 - rho^2), the MI of a bivariate Gaussian with correlation rho.
double mi_gaussian_oracle(double rho);

/// KSG (conditional) MI with the x and z blocks fixed and indexed once, so
/// many y blocks (surrogates, candidate lags) can be scored cheaply. Inputs
/// must already be preprocessed; nothing is rescaled here. z may be empty
/// (zero columns), which gives plain MI.
class KsgEngine {
 public:
  KsgEngine(SampleMatrix x, std::optional<SampleMatrix> z, std::size_t k);

  std::size_t rows() const noexcept { return x_.rows(); }
  std::size_t k() const noexcept { return k_; }

  /// Estimate with the given y block.
  double estimate(const SampleMatrix& y) const;
  /// Estimate with y's rows taken in the given order (surrogate reorderings).
  double estimate_reordered(const SampleMatrix& y, std::span<const std::size_t> order) const;

 private:
  SampleMatrix x_;
  std::optional<SampleMatrix> z_;
  std::size_t k_;
  std::unique_ptr<NeighborIndex> x_or_xz_;
  std::unique_ptr<NeighborIndex> z_index_;
  DigammaTable psi_;
};

/// Standardize + jitter a block per KsgOptions, appending to `log`.
SampleMatrix ksg_prepare(const SampleMatrix& block, const KsgOptions& options, PreprocessLog* log);

}  // namespace infometer
