#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "knnloo/error.hpp"
#include "knnloo/instrumentation.hpp"
#include "knnloo/matrix.hpp"

namespace knnloo {

// Squared Euclidean distance, accumulated over coordinates in index order.
// Every distance comparison in the library goes through this function, so
// two distances are tied exactly when their bit patterns agree.
inline double squared_distance(PointView a, PointView b) noexcept {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return acc;
}

// The k nearest training rows of a query, ordered by (distance, row index).
struct NeighborList {
  std::vector<RowIndex> indices;
  std::vector<double> distances;

  std::size_t size() const noexcept { return indices.size(); }
};

// Immutable exact k-NN index over a fixed set of points (kd-tree).
//
// Ties in distance are broken by ascending row index, which makes every
// query result a pure function of the point set: the tree shape and the
// insertion order have no influence on it. Queries are const and may run
// concurrently.
class NeighborIndex {
 public:
  static constexpr std::size_t kLeafSize = 16;

  explicit NeighborIndex(Matrix points) : points_(std::move(points)) {
    if (points_.rows() == 0) throw Error(Errc::EmptyDataset, "cannot index an empty point set");
    if (points_.cols() == 0) throw Error(Errc::DimensionMismatch, "points have dimension 0");
    if (!points_.all_finite()) throw Error(Errc::NonFiniteInput, "points contain NaN or Inf");
    order_.resize(points_.rows());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * (points_.rows() / kLeafSize + 1));
    build(0, points_.rows());
    instrumentation::counters().index_builds.fetch_add(1, std::memory_order_relaxed);
  }

  std::size_t size() const noexcept { return points_.rows(); }
  std::size_t dim() const noexcept { return points_.cols(); }
  const Matrix& points() const noexcept { return points_; }
  PointView point(RowIndex i) const noexcept { return points_.row(i); }

  NeighborList knn_query(PointView query, std::size_t k) const {
    check_query(query);
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
    if (k > size()) {
      throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + " exceeds the " +
                                       std::to_string(size()) + " indexed points");
    }
    return search(query, k);
  }

  // k nearest neighbours among all points except `excluded`, reported with
  // their original row indices.
  NeighborList knn_query_excluding(PointView query, std::size_t k, RowIndex excluded) const {
    check_query(query);
    if (excluded >= size()) {
      throw Error(Errc::InvalidArgument, "excluded row " + std::to_string(excluded) + " out of range");
    }
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
    if (k + 1 > size()) {
      throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + " exceeds the " +
                                       std::to_string(size() - 1) + " points left after exclusion");
    }
    NeighborList list = search(query, k + 1);
    const auto it = std::find(list.indices.begin(), list.indices.end(), excluded);
    if (it != list.indices.end()) {
      const auto offset = it - list.indices.begin();
      list.indices.erase(it);
      list.distances.erase(list.distances.begin() + offset);
    } else {
      list.indices.pop_back();
      list.distances.pop_back();
    }
    return list;
  }

 private:
  static constexpr std::uint32_t kNoChild = std::numeric_limits<std::uint32_t>::max();

  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::uint32_t left = kNoChild;
    std::uint32_t right = kNoChild;
  };

  // (squared distance, row); lexicographic order is the tie rule.
  using Candidate = std::pair<double, RowIndex>;

  void check_query(PointView query) const {
    if (query.size() != dim()) {
      throw Error(Errc::DimensionMismatch, "query has dimension " + std::to_string(query.size()) +
                                               ", index has " + std::to_string(dim()));
    }
  }

  std::uint32_t build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({begin, end, kNoChild, kNoChild});

    // Bounding box of the node, stored flat as [lo_0..lo_D-1, hi_0..hi_D-1].
    const std::size_t d = dim();
    const std::size_t box = bounds_.size();
    bounds_.resize(box + 2 * d);
    for (std::size_t j = 0; j < d; ++j) {
      bounds_[box + j] = std::numeric_limits<double>::infinity();
      bounds_[box + d + j] = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t p = begin; p < end; ++p) {
      const PointView x = points_.row(order_[p]);
      for (std::size_t j = 0; j < d; ++j) {
        bounds_[box + j] = std::min(bounds_[box + j], x[j]);
        bounds_[box + d + j] = std::max(bounds_[box + d + j], x[j]);
      }
    }
    if (end - begin <= kLeafSize) return id;

    std::size_t split_dim = 0;
    double widest = -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double spread = bounds_[box + d + j] - bounds_[box + j];
      if (spread > widest) {
        widest = spread;
        split_dim = j;
      }
    }
    // All points coincide: nothing to split on.
    if (!(widest > 0.0)) return id;

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](RowIndex a, RowIndex b) {
                       const double ca = points_(a, split_dim);
                       const double cb = points_(b, split_dim);
                       return ca < cb || (ca == cb && a < b);
                     });
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  // Lower bound on squared_distance(query, p) for any p inside the node's
  // box. Terms are summed in the same coordinate order as squared_distance
  // and each is no larger than the matching point term, so the bound never
  // exceeds a true distance even after rounding.
  double box_distance(std::uint32_t node, PointView query) const noexcept {
    const std::size_t d = dim();
    const double* lo = bounds_.data() + static_cast<std::size_t>(node) * 2 * d;
    const double* hi = lo + d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double diff = 0.0;
      if (query[j] < lo[j]) {
        diff = lo[j] - query[j];
      } else if (query[j] > hi[j]) {
        diff = query[j] - hi[j];
      }
      acc += diff * diff;
    }
    return acc;
  }

  NeighborList search(PointView query, std::size_t k) const {
    std::priority_queue<Candidate> heap;
    visit(0, query, k, heap);

    NeighborList list;
    list.indices.resize(heap.size());
    list.distances.resize(heap.size());
    for (std::size_t slot = heap.size(); slot-- > 0;) {
      list.indices[slot] = heap.top().second;
      list.distances[slot] = std::sqrt(heap.top().first);
      heap.pop();
    }
    return list;
  }

  void visit(std::uint32_t id, PointView query, std::size_t k, std::priority_queue<Candidate>& heap) const {
    const Node& node = nodes_[id];
    if (node.left == kNoChild) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        const RowIndex row = order_[p];
        const Candidate c{squared_distance(query, points_.row(row)), row};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      return;
    }
    double near_bound = box_distance(node.left, query);
    double far_bound = box_distance(node.right, query);
    std::uint32_t near = node.left;
    std::uint32_t far = node.right;
    if (far_bound < near_bound) {
      std::swap(near, far);
      std::swap(near_bound, far_bound);
    }
    // A box at exactly the current worst distance may still hold a tie with
    // a smaller row index, so only strictly farther boxes are pruned.
    if (heap.size() < k || near_bound <= heap.top().first) visit(near, query, k, heap);
    if (heap.size() < k || far_bound <= heap.top().first) visit(far, query, k, heap);
  }

  Matrix points_;
  std::vector<RowIndex> order_;
  std::vector<Node> nodes_;
  std::vector<double> bounds_;
};

}  // namespace knnloo
