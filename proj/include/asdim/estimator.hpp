#pragma once

#include <array>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "asdim/covering.hpp"
#include "asdim/metric_space.hpp"

namespace asdim {

enum class CurveKind { covering, packing, volume, heat_trace, kolmogorov };

std::string_view to_string(CurveKind kind);

/// Sampled growth v(R) on increasing scales. `r` is the fixed covering
/// radius for covering and packing curves, NaN otherwise.
struct GrowthCurve {
  Eigen::VectorXd scale;
  Eigen::VectorXd value;
  CurveKind kind = CurveKind::covering;
  double r = std::numeric_limits<double>::quiet_NaN();

  /// Throws DomainError unless scales increase strictly, values are
  /// positive and there are at least four samples.
  void validate() const;

  Eigen::Index size() const { return scale.size(); }
};

/// Exponent estimate over the tail window [window_begin, window_end).
///
/// `slope` (least-squares log-log fit) is the headline value; `upper` and
/// `lower` are the extreme pointwise ratios log v / log R on the tail, and
/// coincide at the last ratio when the tail ratios are monotone.
struct DimensionEstimate {
  double upper = 0.0;
  double lower = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  Eigen::Index window_begin = 0;
  Eigen::Index window_end = 0;
  double scale_min = 0.0;
  double scale_max = 0.0;
  double scale_cap = std::numeric_limits<double>::infinity();
  bool monotone = false;
  bool stabilized = false;

  double value() const { return slope; }
};

constexpr double kMonotoneTolerance = 1e-2;

/// Pointwise ratio log v_j / log R_j; scales must exceed 1.
Eigen::VectorXd log_ratios(const GrowthCurve& curve);

DimensionEstimate exponent_from_curve(const GrowthCurve& curve, double tail_fraction = 0.5,
                                      double monotone_tolerance = kMonotoneTolerance);

struct AsymptoticOptions {
  std::vector<double> r_values{1.0, 2.0, 4.0, 8.0};
  /// Empty: geometric grid from 2 * max r up to the cap.
  std::vector<double> R_values;
  double points_per_octave = 1.0;
  double tail_fraction = 0.5;
  /// Keep only R <= eccentricity(center) / 2.
  bool truncate = true;
  double min_range_factor = 16.0;
  Index min_ball = 16;
  double stabilization_tolerance = 0.1;
  double packing_tolerance = 0.1;
  unsigned threads = 1;
};

struct RLevel {
  double r = 0.0;
  GrowthCurve cover;
  GrowthCurve packing;
  DimensionEstimate cover_estimate;
  DimensionEstimate packing_estimate;
};

struct AsymptoticResult {
  DimensionEstimate estimate;          // covering, largest r
  DimensionEstimate packing_estimate;  // packing, largest r
  std::vector<RLevel> levels;
  std::vector<CoveringCell> cells;
  std::vector<double> R_values;
  double R_cap = std::numeric_limits<double>::infinity();
  bool stabilized = false;
  bool packing_agrees = false;

  double value() const { return estimate.slope; }
};

/// R grid actually used by asymptotic_dimension / volume_dimension.
std::vector<double> effective_R_grid(const FiniteMetricSpace& space, Index center,
                                     const std::vector<double>& requested, double R_min,
                                     double points_per_octave, bool truncate, double& cap);

AsymptoticResult asymptotic_dimension(const FiniteMetricSpace& space, Index center,
                                      const AsymptoticOptions& options = {});

struct KolmogorovResult {
  DimensionEstimate estimate;
  GrowthCurve curve;  // scale = 1/r
  std::vector<double> r_used;
  std::vector<double> r_excluded;  // below the declared resolution
  double value() const { return estimate.slope; }
};

/// Box dimension of B(center, R_fixed): exponent of n_r against 1/r over
/// the decreasing radii; radii below metadata().resolution are excluded.
KolmogorovResult kolmogorov_dimension(const FiniteMetricSpace& space, Index center, double R_fixed,
                                      const std::vector<double>& r_values,
                                      double tail_fraction = 1.0);

struct VolumeOptions {
  std::vector<double> R_values;
  double R_min = 2.0;
  double points_per_octave = 1.0;
  double tail_fraction = 0.5;
  bool truncate = true;
  /// Radius at which uniform boundedness is checked; <= 0 skips the check.
  double working_r = 1.5;
};

struct VolumeResult {
  DimensionEstimate estimate;
  GrowthCurve curve;
  double beta1 = 0.0;
  double beta2 = 0.0;
  bool uniformly_bounded = true;  // beta1 > 0 at working_r
  double value() const { return estimate.slope; }
};

VolumeResult volume_dimension(const FiniteMetricSpace& space, Index center,
                              const VolumeOptions& options = {});

struct AxiomReport {
  AsymptoticResult x1;
  AsymptoticResult x2;
  AsymptoticResult both;
  double tolerance = 0.15;
  bool monotone = false;   // d(X1), d(X2) <= d(X1 u X2) + tol
  bool union_max = false;  // d(X1 u X2) = max(d(X1), d(X2)) +- tol
};

/// Axioms (i) and (ii) on subsets of a common ambient space. `centers`
/// holds ambient indices for X1, X2 and the union.
AxiomReport axiom_suite(const FiniteMetricSpace& ambient, const IndexList& x1, const IndexList& x2,
                        const std::array<Index, 3>& centers, const AsymptoticOptions& options,
                        double tolerance = 0.15);

struct ProductReport {
  AsymptoticResult x;
  AsymptoticResult y;
  AsymptoticResult xy;
  double tolerance = 0.15;
  bool subadditive = false;  // d(X x Y) <= d(X) + d(Y) + tol
  bool additive = false;     // equality within tol
};

/// Axiom (iii) on the max-metric product.
ProductReport product_axiom(const FiniteMetricSpace& x, const FiniteMetricSpace& y, Index cx,
                            Index cy, const AsymptoticOptions& options,
                            const AsymptoticOptions& product_options, double tolerance = 0.15);

}  // namespace asdim
