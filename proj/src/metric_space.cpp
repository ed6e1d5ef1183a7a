#include "asdim/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "asdim/errors.hpp"
#include "asdim/kd_tree.hpp"

namespace asdim {
namespace {

void sort_tail(IndexList& out, std::size_t first) {
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

class MatrixOracle final : public DistanceOracle {
 public:
  explicit MatrixOracle(Eigen::MatrixXd d) : d_(std::move(d)) {}
  Index size() const override { return static_cast<Index>(d_.rows()); }
  double distance(Index i, Index j) const override { return d_(i, j); }
  std::string_view kind() const override { return "matrix"; }
  bool materialized() const override { return true; }
  void ball(Index c, double r, IndexList& out) const override {
    for (Index y = 0; y < size(); ++y)
      if (d_(c, y) < r) out.push_back(y);
  }
  const Eigen::MatrixXd& matrix() const { return d_; }

 private:
  Eigen::MatrixXd d_;
};

class PointsOracle final : public DistanceOracle {
 public:
  PointsOracle(KdTree::Matrix points, Norm norm)
      : points_(std::move(points)), norm_(norm), tree_(points_, norm) {}
  Index size() const override { return static_cast<Index>(points_.rows()); }
  std::string_view kind() const override { return "points"; }
  double distance(Index i, Index j) const override {
    switch (norm_) {
      case Norm::euclidean: return (points_.row(i) - points_.row(j)).norm();
      case Norm::sup: return (points_.row(i) - points_.row(j)).cwiseAbs().maxCoeff();
      case Norm::l1: return (points_.row(i) - points_.row(j)).cwiseAbs().sum();
    }
    return 0.0;
  }
  void ball(Index c, double r, IndexList& out) const override {
    const std::size_t first = out.size();
    tree_.radius_search(points_.row(c).data(), r, out);
    sort_tail(out, first);
  }
  void ball_unordered(Index c, double r, IndexList& out) const override {
    tree_.radius_search(points_.row(c).data(), r, out);
  }
  const KdTree::Matrix& points() const { return points_; }
  Norm norm() const { return norm_; }

 private:
  KdTree::Matrix points_;
  Norm norm_;
  KdTree tree_;
};

class FunctionOracle final : public DistanceOracle {
 public:
  FunctionOracle(Index n, std::function<double(Index, Index)> f) : n_(n), f_(std::move(f)) {}
  Index size() const override { return n_; }
  double distance(Index i, Index j) const override { return i == j ? 0.0 : f_(i, j); }
  std::string_view kind() const override { return "function"; }

 private:
  Index n_;
  std::function<double(Index, Index)> f_;
};

class GraphOracle final : public DistanceOracle {
 public:
  static constexpr Index kCacheLimit = 1024;

  explicit GraphOracle(std::shared_ptr<const Graph> g) : g_(std::move(g)) {
    const Index n = g_->vertex_count();
    if (n <= kCacheLimit) {
      cache_.resize(n, n);
      std::vector<double> row(n);
      for (Index i = 0; i < n; ++i) {
        g_->shortest_paths(i, row);
        for (Index j = 0; j < n; ++j) cache_(i, j) = row[j];
      }
    }
  }
  Index size() const override { return g_->vertex_count(); }
  std::string_view kind() const override { return "graph"; }
  double distance(Index i, Index j) const override {
    if (cache_.size() > 0) return cache_(i, j);
    return g_->distance(i, j);
  }
  void ball(Index c, double r, IndexList& out) const override { g_->within(c, r, out); }
  void distances_from(Index s, std::span<double> out) const override {
    if (cache_.size() > 0) {
      for (Index j = 0; j < size(); ++j) out[j] = cache_(s, j);
      return;
    }
    g_->shortest_paths(s, out);
  }

 private:
  std::shared_ptr<const Graph> g_;
  Eigen::MatrixXd cache_;
};

class LatticeOracle final : public DistanceOracle {
 public:
  explicit LatticeOracle(LatticeShape shape) : shape_(std::move(shape)) {
    const std::size_t d = shape_.lower.size();
    side_.resize(d);
    stride_.resize(d);
    Index total = 1;
    for (std::size_t k = d; k-- > 0;) {
      side_[k] = shape_.upper[k] - shape_.lower[k] + 1;
      stride_[k] = total;
      total *= side_[k];
    }
    n_ = total;
  }
  Index size() const override { return n_; }
  std::string_view kind() const override { return "lattice"; }

  Index coordinate(Index i, std::size_t axis) const {
    return (i / stride_[axis]) % side_[axis] + shape_.lower[axis];
  }

  double axis_distance(std::size_t axis, Index a, Index b) const {
    Index d = a > b ? a - b : b - a;
    if (shape_.periodic) d = std::min(d, side_[axis] - d);
    return static_cast<double>(d);
  }

  double distance(Index i, Index j) const override {
    double acc = 0.0;
    for (std::size_t k = 0; k < side_.size(); ++k) {
      const double d = axis_distance(k, coordinate(i, k), coordinate(j, k));
      switch (shape_.norm) {
        case Norm::euclidean: acc += d * d; break;
        case Norm::sup: acc = std::max(acc, d); break;
        case Norm::l1: acc += d; break;
      }
    }
    return shape_.norm == Norm::euclidean ? std::sqrt(acc) : acc;
  }

  void ball(Index c, double r, IndexList& out) const override {
    const std::size_t first = out.size();
    ball_unordered(c, r, out);
    sort_tail(out, first);
  }

  void ball_unordered(Index c, double r, IndexList& out) const override {
    if (!(r > 0.0)) return;
    const std::size_t d = side_.size();
    // Per-axis admissible (offset index contribution, axis distance) pairs.
    std::vector<std::vector<std::pair<Index, double>>> axis(d);
    for (std::size_t k = 0; k < d; ++k) {
      const Index ck = coordinate(c, k) - shape_.lower[k];
      if (shape_.periodic) {
        const Index reach = static_cast<Index>(std::ceil(r)) - 1;
        if (2 * reach + 1 >= side_[k]) {
          for (Index v = 0; v < side_[k]; ++v) {
            const double ad = axis_distance(k, v, ck);
            if (ad < r) axis[k].push_back({v * stride_[k], ad});
          }
        } else {
          for (Index o = -reach; o <= reach; ++o) {
            const Index v = ((ck + o) % side_[k] + side_[k]) % side_[k];
            axis[k].push_back({v * stride_[k], static_cast<double>(std::abs(o))});
          }
        }
      } else {
        const Index reach = static_cast<Index>(std::ceil(r)) - 1;
        const Index lo = std::max<Index>(0, ck - reach);
        const Index hi = std::min<Index>(side_[k] - 1, ck + reach);
        for (Index v = lo; v <= hi; ++v)
          axis[k].push_back({v * stride_[k], static_cast<double>(std::abs(v - ck))});
      }
    }
    enumerate(axis, 0, 0, 0.0, r, out);
  }

  const LatticeShape& shape() const { return shape_; }

 private:
  void enumerate(const std::vector<std::vector<std::pair<Index, double>>>& axis, std::size_t k,
                 Index base, double acc, double r, IndexList& out) const {
    if (k == axis.size()) {
      const double dist = shape_.norm == Norm::euclidean ? std::sqrt(acc) : acc;
      if (dist < r) out.push_back(base);
      return;
    }
    for (const auto& [offset, ad] : axis[k]) {
      double next = acc;
      switch (shape_.norm) {
        case Norm::euclidean: next += ad * ad; break;
        case Norm::sup: next = std::max(next, ad); break;
        case Norm::l1: next += ad; break;
      }
      const double bound = shape_.norm == Norm::euclidean ? std::sqrt(next) : next;
      if (bound < r) enumerate(axis, k + 1, base + offset, next, r, out);
    }
  }

  LatticeShape shape_;
  std::vector<Index> side_;
  std::vector<Index> stride_;
  Index n_ = 0;
};

class ProductOracle final : public DistanceOracle {
 public:
  ProductOracle(FiniteMetricSpace x, FiniteMetricSpace y) : x_(std::move(x)), y_(std::move(y)) {}
  Index size() const override { return x_.size() * y_.size(); }
  std::string_view kind() const override { return "product"; }
  double distance(Index i, Index j) const override {
    const Index ny = y_.size();
    return std::max(x_.distance(i / ny, j / ny), y_.distance(i % ny, j % ny));
  }
  void ball(Index c, double r, IndexList& out) const override {
    const Index ny = y_.size();
    IndexList bx, by;
    x_.ball_members(c / ny, r, bx);
    y_.ball_members(c % ny, r, by);
    for (Index i : bx)
      for (Index j : by) out.push_back(i * ny + j);
  }

 private:
  FiniteMetricSpace x_;
  FiniteMetricSpace y_;
};

class SubspaceOracle final : public DistanceOracle {
 public:
  SubspaceOracle(FiniteMetricSpace ambient, IndexList points)
      : ambient_(std::move(ambient)), points_(std::move(points)), local_(ambient_.size(), -1) {
    for (Index k = 0; k < static_cast<Index>(points_.size()); ++k) local_[points_[k]] = k;
  }
  Index size() const override { return static_cast<Index>(points_.size()); }
  std::string_view kind() const override { return "subspace"; }
  double distance(Index i, Index j) const override {
    return ambient_.distance(points_[i], points_[j]);
  }
  void ball(Index c, double r, IndexList& out) const override {
    if (size() <= 2048) {
      for (Index y = 0; y < size(); ++y)
        if (distance(c, y) < r) out.push_back(y);
      return;
    }
    const std::size_t first = out.size();
    ball_unordered(c, r, out);
    sort_tail(out, first);
  }
  void ball_unordered(Index c, double r, IndexList& out) const override {
    if (size() <= 2048) {
      ball(c, r, out);
      return;
    }
    IndexList amb;
    ambient_.ball_members_unordered(points_[c], r, amb);
    for (Index a : amb)
      if (local_[a] >= 0) out.push_back(local_[a]);
  }
  const IndexList& points() const { return points_; }
  Index local(Index ambient_index) const {
    return ambient_index >= 0 && ambient_index < static_cast<Index>(local_.size())
               ? local_[ambient_index]
               : -1;
  }

 private:
  FiniteMetricSpace ambient_;
  IndexList points_;
  std::vector<Index> local_;
};

IndexList sorted_unique(IndexList v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::string_view to_string(Norm norm) {
  switch (norm) {
    case Norm::euclidean: return "euclidean";
    case Norm::sup: return "sup";
    case Norm::l1: return "l1";
  }
  return "?";
}

Norm norm_from_string(std::string_view name) {
  if (name == "euclidean" || name == "l2") return Norm::euclidean;
  if (name == "sup" || name == "max" || name == "linf") return Norm::sup;
  if (name == "l1" || name == "hop" || name == "taxicab") return Norm::l1;
  throw DomainError("unknown norm '" + std::string(name) + "'");
}

void DistanceOracle::ball(Index center, double radius, IndexList& out) const {
  for (Index y = 0; y < size(); ++y)
    if (distance(center, y) < radius) out.push_back(y);
}

void DistanceOracle::distances_from(Index source, std::span<double> out) const {
  for (Index y = 0; y < size(); ++y) out[y] = distance(source, y);
}

FiniteMetricSpace::FiniteMetricSpace(std::shared_ptr<const DistanceOracle> oracle,
                                     Eigen::VectorXd measure, SpaceMetadata metadata,
                                     std::shared_ptr<const Graph> graph)
    : oracle_(std::move(oracle)),
      measure_(std::move(measure)),
      metadata_(std::move(metadata)),
      graph_(std::move(graph)) {
  if (!oracle_) throw DomainError("metric space: null distance oracle");
  if (measure_.size() > 0) {
    if (measure_.size() != oracle_->size())
      throw DomainError("metric space: measure length differs from point count");
    if (!measure_.allFinite() || (measure_.array() < 0.0).any())
      throw DomainError("metric space: measures must be finite and nonnegative");
    if (oracle_->size() > 0 && !(measure_.sum() > 0.0))
      throw DomainError("metric space: total measure must be positive");
  }
  if (graph_ && graph_->vertex_count() != oracle_->size())
    throw DomainError("metric space: graph vertex count differs from point count");
}

void FiniteMetricSpace::check_index(Index i) const {
  if (i < 0 || i >= size())
    throw DomainError("point index " + std::to_string(i) + " outside 0.." +
                      std::to_string(size() - 1));
}

double FiniteMetricSpace::distance(Index i, Index j) const { return oracle_->distance(i, j); }

void FiniteMetricSpace::ball_members(Index center, double radius, IndexList& out) const {
  oracle_->ball(center, radius, out);
}

void FiniteMetricSpace::ball_members_unordered(Index center, double radius, IndexList& out) const {
  oracle_->ball_unordered(center, radius, out);
}

void FiniteMetricSpace::distances_from(Index source, std::span<double> out) const {
  oracle_->distances_from(source, out);
}

double FiniteMetricSpace::measure_of(std::span<const Index> points) const {
  if (!has_measure()) return static_cast<double>(points.size());
  double total = 0.0;
  for (Index p : points) total += measure_[p];
  return total;
}

double FiniteMetricSpace::total_measure() const {
  return has_measure() ? measure_.sum() : static_cast<double>(size());
}

double FiniteMetricSpace::eccentricity(Index x) const {
  check_index(x);
  std::vector<double> row(static_cast<std::size_t>(size()));
  distances_from(x, row);
  double best = 0.0;
  for (double d : row)
    if (std::isfinite(d)) best = std::max(best, d);
  return best;
}

FiniteMetricSpace FiniteMetricSpace::with_measure(Eigen::VectorXd measure) const {
  return FiniteMetricSpace(oracle_, std::move(measure), metadata_, graph_);
}

FiniteMetricSpace FiniteMetricSpace::with_metadata(SpaceMetadata metadata) const {
  return FiniteMetricSpace(oracle_, measure_, std::move(metadata), graph_);
}

FiniteMetricSpace from_matrix(Eigen::MatrixXd distances, SpaceMetadata metadata) {
  if (distances.rows() != distances.cols()) throw DomainError("distance matrix must be square");
  if (!distances.allFinite() || (distances.array() < 0.0).any())
    throw DomainError("distances must be finite and nonnegative");
  return FiniteMetricSpace(std::make_shared<MatrixOracle>(std::move(distances)), {},
                           std::move(metadata));
}

FiniteMetricSpace from_points(Eigen::MatrixXd coordinates, Norm norm, SpaceMetadata metadata) {
  if (!coordinates.allFinite()) throw DomainError("point coordinates must be finite");
  KdTree::Matrix rows = coordinates;
  return FiniteMetricSpace(std::make_shared<PointsOracle>(std::move(rows), norm), {},
                           std::move(metadata));
}

FiniteMetricSpace from_graph(Graph graph, SpaceMetadata metadata) {
  auto g = std::make_shared<const Graph>(std::move(graph));
  return FiniteMetricSpace(std::make_shared<GraphOracle>(g), {}, std::move(metadata), g);
}

FiniteMetricSpace from_function(Index size, std::function<double(Index, Index)> distance,
                                SpaceMetadata metadata) {
  return FiniteMetricSpace(std::make_shared<FunctionOracle>(size, std::move(distance)), {},
                           std::move(metadata));
}

FiniteMetricSpace lattice_space(const LatticeShape& shape, Index cap, SpaceMetadata metadata) {
  if (shape.lower.empty() || shape.lower.size() != shape.upper.size())
    throw DomainError("lattice: lower/upper bounds must be nonempty and of equal length");
  double total = 1.0;
  for (std::size_t k = 0; k < shape.lower.size(); ++k) {
    if (shape.upper[k] < shape.lower[k]) throw DomainError("lattice: empty axis");
    total *= static_cast<double>(shape.upper[k] - shape.lower[k] + 1);
  }
  if (total > static_cast<double>(cap))
    throw ResourceError("lattice: " + std::to_string(static_cast<long long>(total)) +
                        " points exceed cap " + std::to_string(cap));
  auto oracle = std::make_shared<LatticeOracle>(shape);

  std::shared_ptr<const Graph> graph;
  if (shape.norm != Norm::euclidean) {
    // Nearest-neighbour moves realise l1, king moves realise sup.
    const std::size_t d = shape.lower.size();
    const Index n = oracle->size();
    std::vector<Edge> edges;
    IndexList nb;
    for (Index v = 0; v < n; ++v) {
      nb.clear();
      oracle->ball(v, 1.5, nb);
      for (Index w : nb)
        if (w > v && (shape.norm == Norm::sup || oracle->distance(v, w) == 1.0))
          edges.push_back({v, w, 1.0});
    }
    (void)d;
    graph = std::make_shared<const Graph>(Graph::from_edges(n, edges));
  }
  return FiniteMetricSpace(std::move(oracle), {}, std::move(metadata), std::move(graph));
}

Ball ball(const FiniteMetricSpace& space, Index center, double radius) {
  space.check_index(center);
  if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
  Ball b{center, radius, {}};
  space.ball_members(center, radius, b.members);
  return b;
}

FiniteMetricSpace product(const FiniteMetricSpace& x, const FiniteMetricSpace& y, Index cap) {
  if (x.empty() || y.empty()) throw DomainError("product: factors must be nonempty");
  const double total = static_cast<double>(x.size()) * static_cast<double>(y.size());
  if (total > static_cast<double>(cap))
    throw ResourceError("product: " + std::to_string(static_cast<long long>(total)) +
                        " points exceed cap " + std::to_string(cap));
  Eigen::VectorXd measure;
  if (x.has_measure() || y.has_measure()) {
    measure.resize(static_cast<Index>(total));
    for (Index i = 0; i < x.size(); ++i)
      for (Index j = 0; j < y.size(); ++j) measure[i * y.size() + j] = x.measure(i) * y.measure(j);
  }
  SpaceMetadata meta;
  meta.name = x.metadata().name + "x" + y.metadata().name;
  meta.units = x.metadata().units;
  meta.resolution = std::max(x.metadata().resolution, y.metadata().resolution);
  return FiniteMetricSpace(std::make_shared<ProductOracle>(x, y), std::move(measure),
                           std::move(meta));
}

FiniteMetricSpace subspace(const FiniteMetricSpace& ambient, IndexList points) {
  points = sorted_unique(std::move(points));
  if (points.empty()) throw DomainError("subspace: empty point set");
  for (Index p : points) ambient.check_index(p);
  Eigen::VectorXd measure;
  if (ambient.has_measure()) {
    measure.resize(static_cast<Index>(points.size()));
    for (Index k = 0; k < static_cast<Index>(points.size()); ++k)
      measure[k] = ambient.measure(points[k]);
  }
  SpaceMetadata meta = ambient.metadata();
  meta.name = ambient.metadata().name + "[subspace]";
  auto oracle = std::make_shared<SubspaceOracle>(ambient, std::move(points));
  return FiniteMetricSpace(std::move(oracle), std::move(measure), std::move(meta));
}

FiniteMetricSpace union_in_ambient(const FiniteMetricSpace& ambient, std::span<const Index> a,
                                   std::span<const Index> b) {
  IndexList all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  if (all.empty()) throw DomainError("union_in_ambient: empty union");
  return subspace(ambient, std::move(all));
}

const IndexList& ambient_indices(const FiniteMetricSpace& space) {
  static const IndexList empty;
  if (auto* sub = dynamic_cast<const SubspaceOracle*>(&space.oracle())) return sub->points();
  return empty;
}

const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>* point_coordinates(
    const FiniteMetricSpace& space, Norm* norm) {
  auto* pts = dynamic_cast<const PointsOracle*>(&space.oracle());
  if (!pts) return nullptr;
  if (norm) *norm = pts->norm();
  return &pts->points();
}

Index local_index(const FiniteMetricSpace& space, Index ambient_index) {
  if (auto* sub = dynamic_cast<const SubspaceOracle*>(&space.oracle()))
    return sub->local(ambient_index);
  return -1;
}

std::vector<BoundednessRow> uniform_boundedness_report(const FiniteMetricSpace& space,
                                                       std::span<const double> radii) {
  std::vector<BoundednessRow> rows;
  IndexList members;
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("uniform boundedness: radii must be positive");
    BoundednessRow row{r, std::numeric_limits<double>::infinity(), 0.0, false};
    for (Index x = 0; x < space.size(); ++x) {
      members.clear();
      space.ball_members(x, r, members);
      const double m = space.measure_of(members);
      row.beta1 = std::min(row.beta1, m);
      row.beta2 = std::max(row.beta2, m);
    }
    if (space.empty()) row.beta1 = 0.0;
    row.degenerate = !(row.beta1 > 0.0);
    rows.push_back(row);
  }
  return rows;
}

ValidityReport validate(const FiniteMetricSpace& space, const ValidateOptions& options) {
  ValidityReport report;
  const Index n = space.size();
  // Stored matrices must be exactly symmetric; oracles get relative slack.
  const double sym_rel = space.oracle().materialized() ? 0.0 : options.relative_tolerance;
  auto sym_slack = [&](double scale) { return sym_rel * std::max(1.0, scale); };
  auto slack = [&](double scale) { return options.relative_tolerance * std::max(1.0, scale); };

  if (space.has_measure()) {
    const auto& m = space.measure_weights();
    report.measure_ok = m.allFinite() && (m.array() >= 0.0).all() && m.sum() > 0.0;
  }
  if (n == 0) return report;

  report.exhaustive = n <= options.exhaustive_limit;
  if (report.exhaustive) {
    Eigen::MatrixXd d(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) d(i, j) = space.distance(i, j);
    for (Index i = 0; i < n; ++i) {
      if (d(i, i) != 0.0) report.zero_diagonal = false;
      for (Index j = 0; j < n; ++j) {
        const double asym = std::abs(d(i, j) - d(j, i));
        report.worst_symmetry = std::max(report.worst_symmetry, asym);
        if (asym > sym_slack(d(i, j)) || d(i, j) < 0.0) report.symmetric = false;
        for (Index k = 0; k < n; ++k) {
          const double excess = d(i, k) - d(i, j) - d(j, k);
          report.worst_triangle = std::max(report.worst_triangle, excess);
          if (excess > slack(d(i, k))) report.triangle = false;
        }
      }
    }
    report.triples_checked = static_cast<Index>(std::min<double>(
        static_cast<double>(n) * n * n, std::numeric_limits<Index>::max()));
    return report;
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  for (Index s = 0; s < options.sampled_triples; ++s) {
    const Index i = pick(rng), j = pick(rng), k = pick(rng);
    if (space.distance(i, i) != 0.0) report.zero_diagonal = false;
    const double dij = space.distance(i, j), dji = space.distance(j, i);
    const double asym = std::abs(dij - dji);
    report.worst_symmetry = std::max(report.worst_symmetry, asym);
    if (asym > sym_slack(dij) || dij < 0.0) report.symmetric = false;
    const double dik = space.distance(i, k);
    const double excess = dik - dij - space.distance(j, k);
    report.worst_triangle = std::max(report.worst_triangle, excess);
    if (excess > slack(dik)) report.triangle = false;
    ++report.triples_checked;
  }
  return report;
}

}  // namespace asdim
