#include "asdim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include "asdim/errors.hpp"

namespace asdim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-thread scratch distances, reset through the touched list after use.
struct Scratch {
  std::vector<double> dist;
  std::vector<Index> touched;

  void prepare(Index n) {
    if (static_cast<Index>(dist.size()) < n) dist.assign(n, kInf);
  }
  void set(Index v, double d) {
    if (dist[v] == kInf) touched.push_back(v);
    dist[v] = d;
  }
  void reset() {
    for (Index v : touched) dist[v] = kInf;
    touched.clear();
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

Graph Graph::from_edges(Index vertices, std::span<const Edge> edges) {
  if (vertices < 0) throw DomainError("graph: negative vertex count");
  std::vector<std::pair<Index, std::pair<Index, double>>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= vertices || e.v >= vertices)
      throw DomainError("graph: edge endpoint out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw DomainError("graph: edge weights must be positive and finite");
    if (e.u == e.v) continue;
    arcs.push_back({e.u, {e.v, e.weight}});
    arcs.push_back({e.v, {e.u, e.weight}});
  }
  std::stable_sort(arcs.begin(), arcs.end(),
                   [](const auto& a, const auto& b) {
                     return a.first != b.first ? a.first < b.first : a.second.first < b.second.first;
                   });

  Graph g;
  g.offsets_.assign(static_cast<std::size_t>(vertices) + 1, 0);
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const bool duplicate = k + 1 < arcs.size() && arcs[k + 1].first == arcs[k].first &&
                           arcs[k + 1].second.first == arcs[k].second.first;
    if (duplicate) continue;
    g.targets_.push_back(arcs[k].second.first);
    g.weights_.push_back(arcs[k].second.second);
    ++g.offsets_[arcs[k].first + 1];
    if (arcs[k].second.second != 1.0) g.unit_weights_ = false;
  }
  for (Index v = 0; v < vertices; ++v) g.offsets_[v + 1] += g.offsets_[v];
  return g;
}

void Graph::shortest_paths(Index source, std::span<double> out) const {
  const Index n = vertex_count();
  std::fill(out.begin(), out.end(), kInf);
  out[source] = 0.0;
  if (unit_weights_) {
    std::vector<Index> frontier{source};
    std::vector<Index> next;
    double level = 0.0;
    while (!frontier.empty()) {
      level += 1.0;
      next.clear();
      for (Index v : frontier)
        for (Index w : neighbors(v))
          if (out[w] == kInf) {
            out[w] = level;
            next.push_back(w);
          }
      frontier.swap(next);
    }
    return;
  }
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > out[v]) continue;
    auto nb = neighbors(v);
    auto wt = weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const double nd = d + wt[k];
      if (nd < out[nb[k]]) {
        out[nb[k]] = nd;
        heap.push({nd, nb[k]});
      }
    }
  }
  (void)n;
}

void Graph::within(Index source, double radius, IndexList& out) const {
  if (!(radius > 0.0)) return;
  Scratch& s = scratch();
  s.prepare(vertex_count());
  const std::size_t first = out.size();
  s.set(source, 0.0);
  out.push_back(source);
  if (unit_weights_) {
    std::size_t head = first;
    while (head < out.size()) {
      const Index v = out[head++];
      const double nd = s.dist[v] + 1.0;
      if (!(nd < radius)) continue;
      for (Index w : neighbors(v))
        if (s.dist[w] == kInf) {
          s.set(w, nd);
          out.push_back(w);
        }
    }
  } else {
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, source});
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d > s.dist[v]) continue;
      auto nb = neighbors(v);
      auto wt = weights(v);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const double nd = d + wt[k];
        if (nd < radius && nd < s.dist[nb[k]]) {
          if (s.dist[nb[k]] == kInf) out.push_back(nb[k]);
          s.set(nb[k], nd);
          heap.push({nd, nb[k]});
        }
      }
    }
  }
  s.reset();
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

double Graph::distance(Index source, Index target) const {
  if (source == target) return 0.0;
  Scratch& s = scratch();
  s.prepare(vertex_count());
  double result = kInf;
  s.set(source, 0.0);
  if (unit_weights_) {
    std::vector<Index> frontier{source}, next;
    double level = 0.0;
    while (!frontier.empty() && result == kInf) {
      level += 1.0;
      next.clear();
      for (Index v : frontier)
        for (Index w : neighbors(v))
          if (s.dist[w] == kInf) {
            s.set(w, level);
            next.push_back(w);
            if (w == target) result = level;
          }
      frontier.swap(next);
    }
  } else {
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, source});
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d > s.dist[v]) continue;
      if (v == target) {
        result = d;
        break;
      }
      auto nb = neighbors(v);
      auto wt = weights(v);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const double nd = d + wt[k];
        if (nd < s.dist[nb[k]]) {
          s.set(nb[k], nd);
          heap.push({nd, nb[k]});
        }
      }
    }
  }
  s.reset();
  return result;
}

Index Graph::components(std::vector<Index>& label) const {
  const Index n = vertex_count();
  label.assign(n, -1);
  Index count = 0;
  std::vector<Index> stack;
  for (Index v = 0; v < n; ++v) {
    if (label[v] >= 0) continue;
    label[v] = count;
    stack.push_back(v);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index w : neighbors(u))
        if (label[w] < 0) {
          label[w] = count;
          stack.push_back(w);
        }
    }
    ++count;
  }
  return count;
}

}  // namespace asdim
