#pragma once

#include <Eigen/Core>

#include "asdim/metric_space.hpp"

namespace asdim {

/// Static kd-tree over the rows of a coordinate matrix, answering strict
/// radius queries for the euclidean, sup and l1 norms.
class KdTree {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  KdTree(const Matrix& points, Norm norm, Index leaf_size = 16);

  /// Appends every row y with ||points[y] - query|| < radius (unsorted).
  void radius_search(const double* query, double radius, IndexList& out) const;

 private:
  struct Node {
    Index begin = 0;
    Index end = 0;
    Index left = -1;
    Index right = -1;
    int axis = -1;
    double split = 0.0;
  };

  Index build(Index begin, Index end);
  void search(Index node, const double* query, double radius, double* gap, double gap_norm,
              IndexList& out) const;
  double point_distance(Index row, const double* query) const;
  double combine(double gap_norm, double old_gap, double new_gap) const;
  double farthest(Index node, const double* query) const;

  const Matrix& points_;
  Norm norm_;
  Index leaf_size_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
  std::vector<double> box_lo_;  // per node, cols() entries each
  std::vector<double> box_hi_;
};

}  // namespace asdim
