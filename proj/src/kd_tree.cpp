#include "asdim/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace asdim {

KdTree::KdTree(const Matrix& points, Norm norm, Index leaf_size)
    : points_(points), norm_(norm), leaf_size_(std::max<Index>(leaf_size, 1)) {
  const Index n = static_cast<Index>(points.rows());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(static_cast<std::size_t>(2 * n / leaf_size_ + 2));
  if (n > 0) build(0, n);
  const auto dim = static_cast<std::size_t>(points.cols());
  box_lo_.resize(nodes_.size() * dim);
  box_hi_.resize(nodes_.size() * dim);
  for (std::size_t id = nodes_.size(); id-- > 0;) {
    const Node& node = nodes_[id];
    double* lo = &box_lo_[id * dim];
    double* hi = &box_hi_[id * dim];
    for (std::size_t a = 0; a < dim; ++a) {
      lo[a] = std::numeric_limits<double>::infinity();
      hi[a] = -std::numeric_limits<double>::infinity();
    }
    for (Index k = node.begin; k < node.end; ++k)
      for (std::size_t a = 0; a < dim; ++a) {
        lo[a] = std::min(lo[a], points(order_[k], static_cast<Index>(a)));
        hi[a] = std::max(hi[a], points(order_[k], static_cast<Index>(a)));
      }
  }
}

Index KdTree::build(Index begin, Index end) {
  const Index id = static_cast<Index>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, -1, -1, 0.0});
  if (end - begin <= leaf_size_) return id;

  const Index dim = static_cast<Index>(points_.cols());
  int best_axis = -1;
  double best_spread = 0.0;
  for (Index a = 0; a < dim; ++a) {
    double lo = points_(order_[begin], a), hi = lo;
    for (Index k = begin + 1; k < end; ++k) {
      const double v = points_(order_[k], a);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_axis = static_cast<int>(a);
    }
  }
  if (best_axis < 0) return id;  // all points coincide

  const Index mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](Index x, Index y) {
                     const double px = points_(x, best_axis), py = points_(y, best_axis);
                     return px != py ? px < py : x < y;
                   });
  const double split = points_(order_[mid], best_axis);
  const Index left = build(begin, mid);
  const Index right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].axis = best_axis;
  nodes_[id].split = split;
  return id;
}

double KdTree::point_distance(Index row, const double* query) const {
  const Index dim = static_cast<Index>(points_.cols());
  double acc = 0.0;
  for (Index a = 0; a < dim; ++a) {
    const double d = std::abs(points_(row, a) - query[a]);
    switch (norm_) {
      case Norm::euclidean: acc += d * d; break;
      case Norm::sup: acc = std::max(acc, d); break;
      case Norm::l1: acc += d; break;
    }
  }
  return norm_ == Norm::euclidean ? std::sqrt(acc) : acc;
}

double KdTree::combine(double gap_norm, double old_gap, double new_gap) const {
  switch (norm_) {
    case Norm::euclidean: return gap_norm - old_gap * old_gap + new_gap * new_gap;
    case Norm::l1: return gap_norm - old_gap + new_gap;
    case Norm::sup: return std::max(gap_norm, new_gap);
  }
  return gap_norm;
}

void KdTree::radius_search(const double* query, double radius, IndexList& out) const {
  if (nodes_.empty() || !(radius > 0.0)) return;
  std::vector<double> gap(static_cast<std::size_t>(points_.cols()), 0.0);
  search(0, query, radius, gap.data(), 0.0, out);
}

double KdTree::farthest(Index node_id, const double* query) const {
  const auto dim = static_cast<std::size_t>(points_.cols());
  const double* lo = &box_lo_[static_cast<std::size_t>(node_id) * dim];
  const double* hi = &box_hi_[static_cast<std::size_t>(node_id) * dim];
  double acc = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const double d = std::max(std::abs(query[a] - lo[a]), std::abs(hi[a] - query[a]));
    switch (norm_) {
      case Norm::euclidean: acc += d * d; break;
      case Norm::sup: acc = std::max(acc, d); break;
      case Norm::l1: acc += d; break;
    }
  }
  return norm_ == Norm::euclidean ? std::sqrt(acc) : acc;
}

void KdTree::search(Index node_id, const double* query, double radius, double* gap,
                    double gap_norm, IndexList& out) const {
  const Node& node = nodes_[node_id];
  // Whole box strictly inside the ball: no per-point tests. The margin keeps
  // rounding in the corner distance from admitting a boundary point.
  if (node.end - node.begin > leaf_size_ &&
      farthest(node_id, query) < radius * (1.0 - 1e-12)) {
    for (Index k = node.begin; k < node.end; ++k) out.push_back(order_[k]);
    return;
  }
  if (node.axis < 0) {
    for (Index k = node.begin; k < node.end; ++k) {
      const Index row = order_[k];
      if (point_distance(row, query) < radius) out.push_back(row);
    }
    return;
  }
  const double diff = query[node.axis] - node.split;
  // Ties on the split coordinate may sit in either child, so the near side
  // is searched first and the far side is pruned only on a positive gap.
  const Index near = diff < 0.0 ? node.left : node.right;
  const Index far = diff < 0.0 ? node.right : node.left;
  search(near, query, radius, gap, gap_norm, out);

  const double old_gap = gap[node.axis];
  const double new_gap = std::abs(diff);
  const double far_norm = combine(gap_norm, old_gap, new_gap);
  const double bound = norm_ == Norm::euclidean ? std::sqrt(std::max(far_norm, 0.0)) : far_norm;
  if (bound < radius || new_gap == 0.0) {
    gap[node.axis] = new_gap;
    search(far, query, radius, gap, far_norm, out);
    gap[node.axis] = old_gap;
  }
}

}  // namespace asdim
