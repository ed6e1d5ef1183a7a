#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "asdim/graph.hpp"
#include "asdim/types.hpp"

namespace asdim {

enum class Norm { euclidean, sup, l1 };

std::string_view to_string(Norm norm);
Norm norm_from_string(std::string_view name);

/// Symmetric distance oracle over the index set 0..size()-1.
///
/// Implementations must return ball members in ascending index order so
/// that every downstream count is reproducible.
class DistanceOracle {
 public:
  virtual ~DistanceOracle() = default;

  virtual Index size() const = 0;
  virtual double distance(Index i, Index j) const = 0;
  virtual std::string_view kind() const = 0;

  /// Appends {y : distance(center, y) < radius} to `out` (ascending).
  virtual void ball(Index center, double radius, IndexList& out) const;

  /// Same members as ball() in unspecified order, for order-free consumers.
  virtual void ball_unordered(Index center, double radius, IndexList& out) const {
    ball(center, radius, out);
  }

  /// Writes distance(source, y) for every y into `out` (size() entries).
  virtual void distances_from(Index source, std::span<double> out) const;

  /// True when distances are stored, so symmetry can be checked exactly.
  virtual bool materialized() const { return false; }
};

struct SpaceMetadata {
  std::string name;
  std::string units = "dimensionless";
  /// Sampling resolution; scales below it are not resolved by the sample.
  double resolution = 0.0;
  std::map<std::string, std::string> params;
};

/// Open ball {y : d(center, y) < radius}.
struct Ball {
  Index center = 0;
  double radius = 0.0;
  IndexList members;
};

/// Finite metric space: a distance oracle, an optional per-point measure
/// (counting measure when absent), metadata, and an optional graph whose
/// path metric is the space metric. Immutable and cheap to copy.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  explicit FiniteMetricSpace(std::shared_ptr<const DistanceOracle> oracle,
                             Eigen::VectorXd measure = {}, SpaceMetadata metadata = {},
                             std::shared_ptr<const Graph> graph = {});

  Index size() const { return oracle_ ? oracle_->size() : 0; }
  bool empty() const { return size() == 0; }

  double distance(Index i, Index j) const;
  void ball_members(Index center, double radius, IndexList& out) const;
  /// As ball_members, order unspecified.
  void ball_members_unordered(Index center, double radius, IndexList& out) const;
  void distances_from(Index source, std::span<double> out) const;

  bool has_measure() const { return measure_.size() > 0; }
  double measure(Index i) const { return has_measure() ? measure_[i] : 1.0; }
  double measure_of(std::span<const Index> points) const;
  double total_measure() const;
  const Eigen::VectorXd& measure_weights() const { return measure_; }

  const SpaceMetadata& metadata() const { return metadata_; }
  const DistanceOracle& oracle() const { return *oracle_; }
  const std::shared_ptr<const DistanceOracle>& oracle_ptr() const { return oracle_; }
  const Graph* graph() const { return graph_.get(); }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }

  /// Largest distance from `x` to any point.
  double eccentricity(Index x) const;

  FiniteMetricSpace with_measure(Eigen::VectorXd measure) const;
  FiniteMetricSpace with_metadata(SpaceMetadata metadata) const;

  void check_index(Index i) const;

 private:
  std::shared_ptr<const DistanceOracle> oracle_;
  Eigen::VectorXd measure_;
  SpaceMetadata metadata_;
  std::shared_ptr<const Graph> graph_;
};

// -- construction ---------------------------------------------------------

FiniteMetricSpace from_matrix(Eigen::MatrixXd distances, SpaceMetadata metadata = {});
FiniteMetricSpace from_points(Eigen::MatrixXd coordinates, Norm norm, SpaceMetadata metadata = {});
FiniteMetricSpace from_graph(Graph graph, SpaceMetadata metadata = {});
FiniteMetricSpace from_function(Index size, std::function<double(Index, Index)> distance,
                                SpaceMetadata metadata = {});

/// Rectangular patch of Z^d, axis k spanning [lower[k], upper[k]].
/// `periodic` identifies opposite faces (torus); the metric is then the
/// wrap-around distance per axis. sup and l1 lattices carry their
/// king-move or nearest-neighbour graph.
struct LatticeShape {
  std::vector<Index> lower;
  std::vector<Index> upper;
  Norm norm = Norm::sup;
  bool periodic = false;
};
FiniteMetricSpace lattice_space(const LatticeShape& shape, Index cap, SpaceMetadata metadata = {});

// -- operations -----------------------------------------------------------

Ball ball(const FiniteMetricSpace& space, Index center, double radius);

/// Product with the max metric; index (i, j) maps to i * |Y| + j.
FiniteMetricSpace product(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                          Index cap = 50'000'000);

/// Subspace on the sorted, de-duplicated `points` with ambient distances
/// and measures.
FiniteMetricSpace subspace(const FiniteMetricSpace& ambient, IndexList points);

FiniteMetricSpace union_in_ambient(const FiniteMetricSpace& ambient, std::span<const Index> a,
                                   std::span<const Index> b);

/// Ambient indices of a subspace, in local order; empty for non-subspaces.
const IndexList& ambient_indices(const FiniteMetricSpace& space);

/// Coordinates of a point-cloud space (and its norm), null otherwise.
const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>* point_coordinates(
    const FiniteMetricSpace& space, Norm* norm = nullptr);

/// Local index of ambient point `ambient_index`, or -1 when absent.
Index local_index(const FiniteMetricSpace& space, Index ambient_index);

struct BoundednessRow {
  double r = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  bool degenerate = false;  // beta1 == 0
};

/// Minimum and maximum ball measure over all centers, per radius.
std::vector<BoundednessRow> uniform_boundedness_report(const FiniteMetricSpace& space,
                                                       std::span<const double> radii);

struct ValidityReport {
  bool symmetric = true;
  bool zero_diagonal = true;
  bool triangle = true;
  bool measure_ok = true;
  double worst_symmetry = 0.0;
  double worst_triangle = 0.0;
  Index triples_checked = 0;
  bool exhaustive = false;

  bool ok() const { return symmetric && zero_diagonal && triangle && measure_ok; }
};

struct ValidateOptions {
  Index exhaustive_limit = 120;
  Index sampled_triples = 20'000;
  std::uint64_t seed = 1;
  double relative_tolerance = 1e-9;
};

ValidityReport validate(const FiniteMetricSpace& space, const ValidateOptions& options = {});

}  // namespace asdim
