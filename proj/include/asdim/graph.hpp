#pragma once

#include <span>
#include <vector>

#include "asdim/types.hpp"

namespace asdim {

struct Edge {
  Index u = 0;
  Index v = 0;
  double weight = 1.0;
};

/// Undirected weighted graph in compressed adjacency form.
class Graph {
 public:
  Graph() = default;

  /// Duplicate edges are merged (last weight wins); self-loops are dropped.
  static Graph from_edges(Index vertices, std::span<const Edge> edges);

  Index vertex_count() const { return static_cast<Index>(offsets_.size()) - 1; }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const Index> neighbors(Index v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::span<const double> weights(Index v) const {
    return {weights_.data() + offsets_[v], weights_.data() + offsets_[v + 1]};
  }

  bool unit_weights() const { return unit_weights_; }

  /// Shortest-path distances from `source` (infinity when unreachable).
  void shortest_paths(Index source, std::span<double> out) const;

  /// Path distance between two vertices; the search stops at `target`.
  double distance(Index source, Index target) const;

  /// Vertices with path distance < radius, ascending.
  void within(Index source, double radius, IndexList& out) const;

  /// Connected component label per vertex; returns the component count.
  Index components(std::vector<Index>& label) const;

 private:
  std::vector<Index> offsets_{0};
  std::vector<Index> targets_;
  std::vector<double> weights_;
  bool unit_weights_ = true;
};

}  // namespace asdim
