#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "infometer/core.hpp"

namespace infometer {

/// Exact max-norm neighbor queries over a fixed point set.
///
/// One-dimensional sets are kept as a sorted array; higher dimensions use a
/// k-d tree with tight per-node bounding boxes, and two-dimensional sets also
/// keep per-axis rank arrays for offline batch counting. Every pruning
/// decision uses the same floating-point expression as the brute-force
/// predicate (|q_j - p_j| per coordinate, max over coordinates), so results
/// match an O(N^2) scan exactly.
///
/// Queries are by row of the indexed set; the query point never counts as its
/// own neighbor. Duplicate points are allowed here, but kNN estimators reject
/// the zero distances they produce. The index is immutable after construction
/// and safe to query from several threads.
class NeighborIndex {
 public:
  enum class Mode {
    Full,        // kth_distance and count_within
    CountsOnly,  // count_within only; skips the tree for 1-d and 2-d sets
  };

  explicit NeighborIndex(const SampleMatrix& points, Mode mode = Mode::Full);
  /// Row-major n x dims coordinates.
  NeighborIndex(std::span<const double> coords, std::size_t n, std::size_t dims,
                Mode mode = Mode::Full);

  std::size_t size() const noexcept { return n_; }
  std::size_t dims() const noexcept { return dims_; }

  /// Max-norm distance from row `query` to its k-th nearest other point.
  /// Throws InvalidConfig unless 1 <= k < N.
  double kth_distance(std::size_t query, std::size_t k) const;

  /// Number of other points within `radius` of row `query`
  /// (distance < radius when strict, <= radius otherwise).
  std::size_t count_within(std::size_t query, double radius, bool strict) const;

  /// kth_distance for every row, in row order.
  std::vector<double> kth_distance_all(std::size_t k) const;

  /// count_within for every row with a per-row radius. Two-dimensional sets
  /// are answered offline (sweep line over one axis, Fenwick tree over the
  /// other) in O(N log N) total.
  std::vector<std::size_t> count_within_all(std::span<const double> radii, bool strict) const;

 private:
  struct Node {
    std::size_t begin, end;   // range in tree order
    std::size_t left, right;  // child node ids; 0 means leaf
    std::size_t split = 0;    // split dimension
    double left_hi = 0.0;     // largest split coordinate in the left child
    double right_lo = 0.0;    // smallest split coordinate in the right child
  };
  struct Axis {
    std::vector<double> sorted;
    std::vector<std::size_t> rank;  // original row -> position in `sorted`
    // Value buckets over [sorted.front(), sorted.back()] for edge lookups:
    // bucket b starts at position start[b].
    std::vector<std::uint32_t> start;
    double base = 0.0, scale = 0.0;
  };

  bool has_tree() const noexcept { return !nodes_.empty(); }
  void build_tree(std::span<const double> coords);
  std::size_t build_node(std::size_t begin, std::size_t end, std::span<const double> coords,
                         std::vector<double>& region);
  // D is the dimension when known at compile time, 0 otherwise.
  template <std::size_t D>
  void knn_search(std::size_t node, const double* q, std::size_t self, std::size_t k, double* best) const;
  std::size_t count_node(std::size_t node, const double* q, double radius, bool strict) const;

  double kth_distance_1d(std::size_t query, std::size_t k) const;
  std::size_t count_within_axis(const Axis& axis, std::size_t row, double radius, bool strict) const;
  std::size_t count_within_2d_scan(std::size_t query, double radius, bool strict) const;
  std::vector<std::size_t> count_within_all_2d(std::span<const double> radii, bool strict) const;

  std::size_t n_ = 0;
  std::size_t dims_ = 0;
  std::vector<double> coords_;      // original row order (1-d and 2-d sets)
  std::vector<Axis> axes_;          // 1-d and 2-d sets
  std::vector<double> pts_;         // tree order
  std::vector<std::size_t> order_;  // tree position -> original row
  std::vector<std::size_t> where_;  // original row -> tree position
  std::vector<Node> nodes_;
  std::vector<double> lo_, hi_;     // node bounding boxes, dims_ per node
};

}  // namespace infometer
