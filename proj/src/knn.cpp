#include "infometer/knn.hpp"

#include <bit>
#include <utility>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace infometer {

namespace {

constexpr std::size_t kLeafSize = 12;
constexpr double kInf = std::numeric_limits<double>::infinity();

inline double max_norm(const double* a, const double* b, std::size_t d) {
  double m = 0.0;
  for (std::size_t j = 0; j < d; ++j) m = std::max(m, std::fabs(a[j] - b[j]));
  return m;
}

// Smallest and largest max-norm distance from q to any point in the box.
// Both use |q - edge|, which bounds the per-point expression exactly because
// rounding of q - p is monotone in p.
inline void box_range(const double* q, const double* lo, const double* hi, std::size_t d,
                      double& dmin, double& dmax) {
  dmin = 0.0;
  dmax = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double a = std::fabs(q[j] - lo[j]);
    const double b = std::fabs(q[j] - hi[j]);
    if (q[j] < lo[j]) dmin = std::max(dmin, a);
    else if (q[j] > hi[j]) dmin = std::max(dmin, b);
    dmax = std::max(dmax, std::max(a, b));
  }
}

inline double box_min(const double* q, const double* lo, const double* hi, std::size_t d) {
  double dmin = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (q[j] < lo[j]) dmin = std::max(dmin, std::fabs(q[j] - lo[j]));
    else if (q[j] > hi[j]) dmin = std::max(dmin, std::fabs(q[j] - hi[j]));
  }
  return dmin;
}

inline void push_best(double* best, std::size_t k, double dist) {
  std::size_t pos = k - 1;
  while (pos > 0 && best[pos - 1] > dist) {
    best[pos] = best[pos - 1];
    --pos;
  }
  best[pos] = dist;
}

template <bool Strict>
std::pair<std::size_t, std::size_t> window_impl(const double* sorted, std::size_t n, std::size_t self,
                                                double radius) {
  const double q = sorted[self];
  auto inside = [q, radius](double v) {
    const double d = std::fabs(q - v);
    if constexpr (Strict) return d < radius;
    else return d <= radius;
  };
  if (!inside(q)) return {self, self};
  // Right edge: first position > self that is outside.
  std::size_t good = self, step = 1;
  std::size_t bad = n;
  while (good + step < n) {
    if (!inside(sorted[good + step])) {
      bad = good + step;
      break;
    }
    good += step;
    step *= 2;
  }
  while (bad - good > 1) {
    const std::size_t mid = good + (bad - good) / 2;
    const bool in = inside(sorted[mid]);
    good = in ? mid : good;
    bad = in ? bad : mid;
  }
  const std::size_t last = bad;
  // Left edge: smallest position <= self that is inside. Offsets by one so
  // "no outside position" is 0.
  std::size_t good_l = self + 1, bad_l = 0;
  step = 1;
  while (good_l > step) {
    if (!inside(sorted[good_l - 1 - step])) {
      bad_l = good_l - step;
      break;
    }
    good_l -= step;
    step *= 2;
  }
  while (good_l - bad_l > 1) {
    const std::size_t mid = bad_l + (good_l - bad_l) / 2;
    const bool in = inside(sorted[mid - 1]);
    good_l = in ? mid : good_l;
    bad_l = in ? bad_l : mid;
  }
  return {good_l - 1, last};
}

double next_up(double x) {
  if (x > 0.0 && x < kInf) return std::bit_cast<double>(std::bit_cast<std::uint64_t>(x) + 1);
  return std::nextafter(x, kInf);
}

struct Buckets {
  const std::uint32_t* start;
  std::size_t count;
  double base, scale;

  std::size_t of(double v) const {
    const double x = (v - base) * scale;
    if (!(x > 0.0)) return 0;
    if (!(x < static_cast<double>(count))) return count - 1;
    return static_cast<std::size_t>(x);
  }
  // First position with sorted[pos] >= v. Buckets are monotone in v, so the
  // answer lies within v's bucket or at its end.
  std::size_t lower(const double* sorted, double v) const {
    const std::size_t b = of(v);
    return static_cast<std::size_t>(
        std::lower_bound(sorted + start[b], sorted + start[b + 1], v) - sorted);
  }
};

template <bool Strict>
std::pair<std::size_t, std::size_t> window_fast(const double* sorted, std::size_t n, const Buckets& buckets,
                                                std::size_t self, double radius) {
  const double q = sorted[self];
  auto inside = [q, radius](double v) {
    const double d = std::fabs(q - v);
    if constexpr (Strict) return d < radius;
    else return d <= radius;
  };
  if (!inside(q)) return {self, self};
  // Value lookups land at the edges up to rounding of q -/+ radius; a couple
  // of steps settle that, otherwise the galloping search decides.
  std::size_t first = std::min(buckets.lower(sorted, q - radius), self);
  for (int step = 0; step < 2 && first > 0 && inside(sorted[first - 1]); ++step) --first;
  for (int step = 0; step < 2 && first < self && !inside(sorted[first]); ++step) ++first;
  std::size_t last = std::max(buckets.lower(sorted, next_up(q + radius)), self + 1);
  for (int step = 0; step < 2 && last < n && inside(sorted[last]); ++step) ++last;
  for (int step = 0; step < 2 && last > self + 1 && !inside(sorted[last - 1]); ++step) --last;
  const bool first_ok = (first == 0 || !inside(sorted[first - 1])) && inside(sorted[first]);
  const bool last_ok = (last == n || !inside(sorted[last])) && inside(sorted[last - 1]);
  if (first_ok && last_ok) return {first, last};
  return window_impl<Strict>(sorted, n, self, radius);
}

// Positions [first, last) of `sorted` whose |q - v| passes the radius test,
// where sorted[self] == q. |q - v| is monotone on each side of `self`.
std::pair<std::size_t, std::size_t> window(const std::vector<double>& sorted, const Buckets& buckets,
                                           std::size_t self, double radius, bool strict) {
  return strict ? window_fast<true>(sorted.data(), sorted.size(), buckets, self, radius)
                : window_fast<false>(sorted.data(), sorted.size(), buckets, self, radius);
}

void fill_buckets(const std::vector<double>& sorted, std::vector<std::uint32_t>& start, double& base,
                  double& scale) {
  const std::size_t n = sorted.size();
  base = sorted.front();
  const double span = sorted.back() - sorted.front();
  scale = span > 0.0 && std::isfinite(span) ? static_cast<double>(n) / span : 0.0;
  const Buckets b{nullptr, n, base, scale};
  start.assign(n + 1, 0);
  std::size_t pos = 0;
  for (std::size_t bucket = 0; bucket < n; ++bucket) {
    while (pos < n && b.of(sorted[pos]) < bucket) ++pos;
    start[bucket] = static_cast<std::uint32_t>(pos);
  }
  start[n] = static_cast<std::uint32_t>(n);
}

// Stable LSD radix sort of rows by one coordinate: ties keep row order.
// Keys map doubles to unsigned integers with the same ordering.
void sort_axis(std::span<const double> coords, std::size_t dims, std::size_t j, std::vector<double>& sorted,
               std::vector<std::size_t>& rank) {
  constexpr int kBits = 11;
  constexpr std::size_t kRadix = std::size_t{1} << kBits;
  constexpr int kPasses = (64 + kBits - 1) / kBits;
  const std::size_t n = coords.size() / dims;
  std::vector<std::uint64_t> key(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto bits = std::bit_cast<std::uint64_t>(coords[r * dims + j] + 0.0);
    key[r] = (bits >> 63) ? ~bits : bits | (std::uint64_t{1} << 63);
  }
  std::vector<std::size_t> hist(kPasses * kRadix, 0);
  for (std::size_t r = 0; r < n; ++r)
    for (int p = 0; p < kPasses; ++p) ++hist[p * kRadix + ((key[r] >> (p * kBits)) & (kRadix - 1))];
  std::vector<std::uint32_t> idx(n), tmp(n);
  std::iota(idx.begin(), idx.end(), 0U);
  for (int p = 0; p < kPasses; ++p) {
    std::size_t* h = hist.data() + p * kRadix;
    if (h[(key[0] >> (p * kBits)) & (kRadix - 1)] == n) continue;  // one digit value: nothing moves
    std::size_t sum = 0;
    for (std::size_t b = 0; b < kRadix; ++b) sum += std::exchange(h[b], sum);
    for (std::uint32_t r : idx) tmp[h[(key[r] >> (p * kBits)) & (kRadix - 1)]++] = r;
    idx.swap(tmp);
  }
  sorted.resize(n);
  rank.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    sorted[pos] = coords[idx[pos] * dims + j];
    rank[idx[pos]] = pos;
  }
}

template <class Axis>
Buckets buckets_of(const Axis& axis) {
  return {axis.start.data(), axis.sorted.size(), axis.base, axis.scale};
}

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Number of added indices < i.
  std::size_t prefix(std::size_t i) const {
    std::size_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::size_t> tree_;
};

}  // namespace

NeighborIndex::NeighborIndex(const SampleMatrix& points, Mode mode)
    : NeighborIndex(points.data(), points.rows(), points.cols(), mode) {}

NeighborIndex::NeighborIndex(std::span<const double> coords, std::size_t n, std::size_t dims,
                             Mode mode)
    : n_(n), dims_(dims) {
  require(n >= 1 && dims >= 1 && coords.size() == n * dims, ErrorKind::InvalidInput,
          "neighbor index: coordinate buffer does not match shape");
  require(n < std::numeric_limits<std::uint32_t>::max(), ErrorKind::InvalidInput,
          "neighbor index: too many points");
  if (dims_ <= 2) {
    coords_.assign(coords.begin(), coords.end());
    axes_.resize(dims_);
    for (std::size_t j = 0; j < dims_; ++j) {
      sort_axis(coords, dims_, j, axes_[j].sorted, axes_[j].rank);
      fill_buckets(axes_[j].sorted, axes_[j].start, axes_[j].base, axes_[j].scale);
    }
  }
  if (dims_ >= 3 || (dims_ == 2 && mode == Mode::Full)) build_tree(coords);
}

void NeighborIndex::build_tree(std::span<const double> coords) {
  order_.resize(n_);
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.clear();
  nodes_.reserve(4 * n_ / kLeafSize + 2);
  lo_.assign(nodes_.capacity() * dims_, kInf);
  hi_.assign(nodes_.capacity() * dims_, -kInf);
  std::vector<double> region(2 * dims_);
  for (std::size_t j = 0; j < dims_; ++j) {
    region[j] = kInf;
    region[dims_ + j] = -kInf;
  }
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < dims_; ++j) {
      region[j] = std::min(region[j], coords[i * dims_ + j]);
      region[dims_ + j] = std::max(region[dims_ + j], coords[i * dims_ + j]);
    }
  build_node(0, n_, coords, region);
  lo_.resize(nodes_.size() * dims_);
  hi_.resize(nodes_.size() * dims_);
  pts_.resize(n_ * dims_);
  where_.resize(n_);
  for (std::size_t pos = 0; pos < n_; ++pos) {
    where_[order_[pos]] = pos;
    std::copy_n(coords.data() + order_[pos] * dims_, dims_, pts_.data() + pos * dims_);
  }
}

// `region` holds lower then upper bounds of a box containing the points; the
// split uses its widest side. Tight node boxes are filled in bottom-up.
std::size_t NeighborIndex::build_node(std::size_t begin, std::size_t end, std::span<const double> coords,
                                      std::vector<double>& region) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end, 0, 0});
  if (lo_.size() < nodes_.size() * dims_) {
    lo_.resize(nodes_.size() * dims_, kInf);
    hi_.resize(nodes_.size() * dims_, -kInf);
  }
  std::size_t split = 0;
  double spread = -1.0;
  for (std::size_t j = 0; j < dims_; ++j) {
    const double s = region[dims_ + j] - region[j];
    if (s > spread) {
      spread = s;
      split = j;
    }
  }
  if (end - begin <= kLeafSize || !(spread > 0.0)) {
    double* lo = lo_.data() + id * dims_;
    double* hi = hi_.data() + id * dims_;
    for (std::size_t i = begin; i < end; ++i) {
      const double* p = coords.data() + order_[i] * dims_;
      for (std::size_t j = 0; j < dims_; ++j) {
        lo[j] = std::min(lo[j], p[j]);
        hi[j] = std::max(hi[j], p[j]);
      }
    }
    return id;
  }

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     return coords[a * dims_ + split] < coords[b * dims_ + split];
                   });
  const double cut = coords[order_[mid] * dims_ + split];
  const double saved_hi = std::exchange(region[dims_ + split], cut);
  const std::size_t left = build_node(begin, mid, coords, region);
  region[dims_ + split] = saved_hi;
  const double saved_lo = std::exchange(region[split], cut);
  const std::size_t right = build_node(mid, end, coords, region);
  region[split] = saved_lo;
  for (std::size_t j = 0; j < dims_; ++j) {
    lo_[id * dims_ + j] = std::min(lo_[left * dims_ + j], lo_[right * dims_ + j]);
    hi_[id * dims_ + j] = std::max(hi_[left * dims_ + j], hi_[right * dims_ + j]);
  }
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].split = split;
  nodes_[id].left_hi = hi_[left * dims_ + split];
  nodes_[id].right_lo = lo_[right * dims_ + split];
  return id;
}

// ---- single queries -----------------------------------------------------

double NeighborIndex::kth_distance(std::size_t query, std::size_t k) const {
  require(k >= 1 && k < n_, ErrorKind::InvalidConfig,
          "k must satisfy 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n_) + ")");
  require(query < n_, ErrorKind::InvalidConfig, "query row out of range");
  if (dims_ == 1) return kth_distance_1d(query, k);
  require(has_tree(), ErrorKind::InvalidConfig, "index was built for counting only");
  const std::size_t self = where_[query];
  const double* q = pts_.data() + self * dims_;
  std::vector<double> best(k, kInf);
  knn_search<0>(0, q, self, k, best.data());
  return best[k - 1];
}

// Children are visited nearest box first and skipped once their box is no
// closer than the current k-th distance.
template <std::size_t D>
void NeighborIndex::knn_search(std::size_t node_id, const double* q, std::size_t self, std::size_t k,
                               double* best) const {
  const std::size_t dims = D == 0 ? dims_ : D;
  const Node& node = nodes_[node_id];
  if (node.left == 0) {
    const double* p = pts_.data() + node.begin * dims;
    for (std::size_t i = node.begin; i < node.end; ++i, p += dims) {
      if (i == self) continue;
      const double dist = max_norm(q, p, dims);
      if (dist < best[k - 1]) push_best(best, k, dist);
    }
    return;
  }
  auto box_distance = [&](std::size_t id) {
    const double* lo = lo_.data() + id * dims;
    const double* hi = hi_.data() + id * dims;
    double m = 0.0;
    for (std::size_t j = 0; j < dims; ++j) m = std::max(m, std::max(lo[j] - q[j], q[j] - hi[j]));
    return m;
  };
  const double dl = box_distance(node.left);
  const double dr = box_distance(node.right);
  const bool left_first = dl <= dr;
  for (int side = 0; side < 2; ++side) {
    const bool go_left = (side == 0) == left_first;
    const double b = go_left ? dl : dr;
    if (!(b < best[k - 1])) continue;
    knn_search<D>(go_left ? node.left : node.right, q, self, k, best);
  }
}

std::size_t NeighborIndex::count_within(std::size_t query, double radius, bool strict) const {
  require(query < n_, ErrorKind::InvalidConfig, "query row out of range");
  require(radius >= 0.0, ErrorKind::InvalidConfig, "radius must be non-negative");
  if (dims_ == 1) return count_within_axis(axes_[0], query, radius, strict);
  if (!has_tree()) return count_within_2d_scan(query, radius, strict);
  const double* q = pts_.data() + where_[query] * dims_;
  const std::size_t total = count_node(0, q, radius, strict);
  const bool self_counted = strict ? 0.0 < radius : true;
  return total - (self_counted ? 1 : 0);
}

std::size_t NeighborIndex::count_node(std::size_t node_id, const double* q, double radius,
                                      bool strict) const {
  const Node& node = nodes_[node_id];
  double dmin = 0.0;
  double dmax = 0.0;
  box_range(q, lo_.data() + node_id * dims_, hi_.data() + node_id * dims_, dims_, dmin, dmax);
  if (strict ? dmin >= radius : dmin > radius) return 0;
  if (strict ? dmax < radius : dmax <= radius) return node.end - node.begin;
  if (node.left == 0) {
    std::size_t c = 0;
    const double* p = pts_.data() + node.begin * dims_;
    for (std::size_t i = node.begin; i < node.end; ++i, p += dims_) {
      const double dist = max_norm(q, p, dims_);
      c += strict ? (dist < radius) : (dist <= radius);
    }
    return c;
  }
  return count_node(node.left, q, radius, strict) + count_node(node.right, q, radius, strict);
}

double NeighborIndex::kth_distance_1d(std::size_t query, std::size_t k) const {
  const std::vector<double>& v = axes_[0].sorted;
  const std::size_t self = axes_[0].rank[query];
  const double q = v[self];
  std::size_t left = self;       // next candidate is left - 1
  std::size_t right = self + 1;  // next candidate is right
  double dist = 0.0;
  for (std::size_t taken = 0; taken < k; ++taken) {
    const double dl = left > 0 ? std::fabs(q - v[left - 1]) : kInf;
    const double dr = right < n_ ? std::fabs(q - v[right]) : kInf;
    if (dl <= dr) {
      dist = dl;
      --left;
    } else {
      dist = dr;
      ++right;
    }
  }
  return dist;
}

std::size_t NeighborIndex::count_within_axis(const Axis& axis, std::size_t row, double radius,
                                             bool strict) const {
  const auto [first, last] = window(axis.sorted, buckets_of(axis), axis.rank[row], radius, strict);
  return last > first ? last - first - 1 : 0;
}

std::size_t NeighborIndex::count_within_2d_scan(std::size_t query, double radius, bool strict) const {
  const Axis& ax = axes_[0];
  const auto [first, last] = window(ax.sorted, buckets_of(ax), ax.rank[query], radius, strict);
  if (first == last) return 0;
  const double qy = coords_[query * 2 + 1];
  std::size_t c = 0;
  for (std::size_t r = 0; r < n_; ++r) {
    if (r == query || ax.rank[r] < first || ax.rank[r] >= last) continue;
    const double d = std::fabs(qy - coords_[r * 2 + 1]);
    c += strict ? d < radius : d <= radius;
  }
  return c;
}

// ---- batch queries ------------------------------------------------------

std::vector<double> NeighborIndex::kth_distance_all(std::size_t k) const {
  require(k >= 1 && k < n_, ErrorKind::InvalidConfig,
          "k must satisfy 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n_) + ")");
  std::vector<double> out(n_);
  if (dims_ == 1) {
    for (std::size_t i = 0; i < n_; ++i) out[i] = kth_distance_1d(i, k);
    return out;
  }
  require(has_tree(), ErrorKind::InvalidConfig, "index was built for counting only");

  // Tree order keeps consecutive queries close, so their searches touch the
  // same nodes.
  std::vector<double> best(k);
  for (std::size_t pos = 0; pos < n_; ++pos) {
    std::fill(best.begin(), best.end(), kInf);
    const double* q = pts_.data() + pos * dims_;
    switch (dims_) {
      case 2: knn_search<2>(0, q, pos, k, best.data()); break;
      case 3: knn_search<3>(0, q, pos, k, best.data()); break;
      case 4: knn_search<4>(0, q, pos, k, best.data()); break;
      default: knn_search<0>(0, q, pos, k, best.data()); break;
    }
    out[order_[pos]] = best[k - 1];
  }
  return out;
}

std::vector<std::size_t> NeighborIndex::count_within_all(std::span<const double> radii,
                                                         bool strict) const {
  require(radii.size() == n_, ErrorKind::InvalidConfig, "one radius per row required");
  for (double r : radii) require(r >= 0.0, ErrorKind::InvalidConfig, "radius must be non-negative");
  std::vector<std::size_t> out(n_);
  if (dims_ == 1) {
    for (std::size_t i = 0; i < n_; ++i) out[i] = count_within_axis(axes_[0], i, radii[i], strict);
    return out;
  }
  if (dims_ == 2) return count_within_all_2d(radii, strict);
  for (std::size_t pos = 0; pos < n_; ++pos)
    out[order_[pos]] = count_within(order_[pos], radii[order_[pos]], strict);
  return out;
}

std::vector<std::size_t> NeighborIndex::count_within_all_2d(std::span<const double> radii,
                                                            bool strict) const {
  const Axis& ax = axes_[0];
  const Axis& ay = axes_[1];
  // Query i asks for rows with x-rank in [xl, xh) and y-rank in [yl, yh):
  //   C(xh) - C(xl), C(X) = #{x-rank < X, y-rank in [yl, yh)}.
  // Events are bucketed by sweep position with a counting sort.
  struct Event {
    std::size_t query;
    std::size_t yl, yh;
    bool add;
  };
  const Buckets bx = buckets_of(ax);
  const Buckets by = buckets_of(ay);
  std::vector<std::size_t> xl(n_), xh(n_), yl(n_), yh(n_);
  std::vector<std::size_t> bucket(n_ + 2, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    std::tie(xl[i], xh[i]) = window(ax.sorted, bx, ax.rank[i], radii[i], strict);
    std::tie(yl[i], yh[i]) = window(ay.sorted, by, ay.rank[i], radii[i], strict);
    if (xl[i] == xh[i] || yl[i] == yh[i]) continue;
    ++bucket[xh[i] + 1];
    ++bucket[xl[i] + 1];
  }
  for (std::size_t x = 1; x < bucket.size(); ++x) bucket[x] += bucket[x - 1];
  std::vector<Event> events(bucket.back());
  {
    std::vector<std::size_t> fill(bucket.begin(), bucket.end() - 1);
    for (std::size_t i = 0; i < n_; ++i) {
      if (xl[i] == xh[i] || yl[i] == yh[i]) continue;
      events[fill[xh[i]]++] = {i, yl[i], yh[i], true};
      events[fill[xl[i]]++] = {i, yl[i], yh[i], false};
    }
  }
  std::vector<std::size_t> y_at_x(n_);
  for (std::size_t r = 0; r < n_; ++r) y_at_x[ax.rank[r]] = ay.rank[r];

  std::vector<std::ptrdiff_t> total(n_, 0);
  Fenwick fenwick(n_);
  for (std::size_t x = 0; x <= n_; ++x) {
    for (std::size_t e = bucket[x]; e < bucket[x + 1]; ++e) {
      const Event& ev = events[e];
      const auto c = static_cast<std::ptrdiff_t>(fenwick.prefix(ev.yh) - fenwick.prefix(ev.yl));
      total[ev.query] += ev.add ? c : -c;
    }
    if (x < n_) fenwick.add(y_at_x[x]);
  }
  std::vector<std::size_t> out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const bool self_inside = strict ? 0.0 < radii[i] : true;
    out[i] = static_cast<std::size_t>(total[i]) - (self_inside && total[i] > 0 ? 1 : 0);
  }
  return out;
}

}  // namespace infometer
