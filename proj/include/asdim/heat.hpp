#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "asdim/estimator.hpp"
#include "asdim/metric_space.hpp"

namespace asdim {

enum class HeatMode { spectral, product, krylov };

std::string_view to_string(HeatMode mode);

constexpr Index kSpectralCap = 3000;

struct KrylovOptions {
  Index initial_steps = 32;
  Index max_steps = 1500;
  double tolerance = 1e-8;
  unsigned threads = 1;
};

/// Hutchinson estimate of sum_x w_x p_t(x,x) over a support set.
struct StochasticTrace {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;
  Index samples = 0;
};

/// Heat semigroup e^{-tL} of the combinatorial Laplacian L = D - A of the
/// space's graph (edge weights ignored).
class HeatModel {
 public:
  /// Dense eigendecomposition; throws ResourceError above `cap` vertices.
  static HeatModel spectral(const FiniteMetricSpace& space, Index cap = kSpectralCap);
  /// Cartesian product graph: p_t((i,j),(i,j)) = p_t(i,i) q_t(j,j), index i*|B|+j.
  static HeatModel product(const HeatModel& a, const HeatModel& b);
  /// Lanczos-Gauss quadrature on e_x, Hutchinson for averages.
  static HeatModel krylov(const FiniteMetricSpace& space, const KrylovOptions& options = {});

  HeatMode mode() const { return mode_; }
  Index size() const { return n_; }

  /// p_t(x,x) for every t in `t`.
  Eigen::VectorXd diagonal(Index x, const Eigen::VectorXd& t) const;
  /// Rows: points, columns: times.
  Eigen::MatrixXd diagonals(const IndexList& xs, const Eigen::VectorXd& t) const;
  /// Tr e^{-tL} = sum_k e^{-t lambda_k} (spectral and product modes).
  Eigen::VectorXd full_trace(const Eigen::VectorXd& t) const;
  /// Dense e^{-tL} (spectral mode).
  Eigen::MatrixXd kernel(double t) const;

  StochasticTrace stochastic_trace(const IndexList& support, const Eigen::VectorXd& weights,
                                   const Eigen::VectorXd& t, Index samples,
                                   std::uint64_t seed) const;

  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const Eigen::MatrixXd& eigenvectors() const { return evecs_; }
  const Eigen::SparseMatrix<double>& laplacian() const { return laplacian_; }

 private:
  HeatMode mode_ = HeatMode::spectral;
  Index n_ = 0;
  Eigen::SparseMatrix<double> laplacian_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
  std::shared_ptr<const HeatModel> left_;
  std::shared_ptr<const HeatModel> right_;
  KrylovOptions krylov_;
};

/// Combinatorial Laplacian of a graph.
Eigen::SparseMatrix<double> graph_laplacian(const Graph& g);

/// Gauss quadrature v^T e^{-tL} v from a Lanczos run of `steps` on unit v.
Eigen::VectorXd lanczos_quadrature(const Eigen::SparseMatrix<double>& L, const Eigen::VectorXd& v,
                                   const Eigen::VectorXd& t, Index steps);

/// Adaptive version: doubles the step count until the estimate moves by
/// less than the tolerance; throws ConvergenceError at max_steps.
Eigen::VectorXd lanczos_quadrature(const Eigen::SparseMatrix<double>& L, const Eigen::VectorXd& v,
                                   const Eigen::VectorXd& t, const KrylovOptions& options);

struct HeatTraceCurve {
  Eigen::VectorXd t;
  Eigen::VectorXd trace;        // average over the largest ball
  std::vector<double> radii;    // rho_k
  std::vector<Index> ball_sizes;
  Eigen::MatrixXd per_k;        // rows k, columns t
  Eigen::MatrixXd std_error;    // same shape; zero for exact diagonals
  Eigen::VectorXd spread;       // (max - min) / mean over the last 3 levels, per t
  bool stochastic = false;
};

struct ExhaustionOptions {
  /// Ball sizes above this use the Hutchinson estimator in Krylov mode.
  Index exact_diagonal_limit = 4096;
  Index samples = 64;
  std::uint64_t seed = 1;
  bool require_inside = true;  // largest rho <= eccentricity(o) / 2
  unsigned threads = 1;
};

HeatTraceCurve exhaustion_trace(const HeatModel& model, const FiniteMetricSpace& space, Index o,
                                const std::vector<double>& radii, const Eigen::VectorXd& t,
                                const ExhaustionOptions& options = {});

/// Usable window [4, (diam / 8)^2] and a geometric t grid over it.
struct TimeWindow {
  double t_lo = 4.0;
  double t_hi = 0.0;
  double decades() const;
};
TimeWindow usable_window(double diameter);
Eigen::VectorXd time_grid(const TimeWindow& window, double points_per_octave = 2.0);

struct NovikovShubin {
  DimensionEstimate estimate;  // slope field holds alpha0 = -2 * d log trace / d log t
  double alpha0 = 0.0;
  double upper = 0.0;  // 2 * max of log trace / log(1/t)
  double lower = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool monotone = true;  // trace nonincreasing on the window
};

constexpr double kMinDecades = 1.5;

/// alpha0 from the trace curve restricted to [t_lo, t_hi]; throws
/// ScaleError when the window spans fewer than `min_decades` decades.
NovikovShubin novikov_shubin(const Eigen::VectorXd& t, const Eigen::VectorXd& trace, double t_lo,
                             double t_hi, double min_decades = kMinDecades);

/// -2 x log-log slope of p_t(o,o), the return-probability dimension.
NovikovShubin return_probability_dimension(const HeatModel& model, Index o,
                                           const TimeWindow& window,
                                           double points_per_octave = 2.0);

struct ExhaustionRow {
  Index k = 0;
  double rho = 0.0;
  double r = 0.0;
  double pen_plus = 0.0;
  double pen_minus = 0.0;
  double ratio = 0.0;
};

struct ExhaustionReport {
  std::vector<ExhaustionRow> rows;
  /// Per r: ratios nonincreasing in k and the excess over 1 at least halved.
  bool approaches_one = false;
};

/// Pen+(K, r) = {x : d(x, K) <= r}, Pen-(K, r) = {x in K : closed B(x, r) in K}
/// for K = B(o, rho_k).
ExhaustionReport regular_exhaustion_check(const FiniteMetricSpace& space, Index o,
                                          const std::vector<double>& radii,
                                          const std::vector<double>& r_list);

struct CgReport {
  double A = 1.0;        // max V(x,2r) / V(x,r)
  double C = 0.0;        // min p_t(x,x) V(x, sqrt t)
  double C_prime = 0.0;  // max p_t(x,x) V(x, sqrt t)
  double gamma = 1.0;    // max V(x,r) / V(y,r) over d(x,y) < 2r
  std::vector<double> r_grid;
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool doubling = false;  // A <= doubling_limit
};

/// max V(x,2r) / V(x,r) over the sample and radii.
double doubling_constant(const FiniteMetricSpace& space, const IndexList& sample,
                         const std::vector<double>& r_grid);

CgReport assumption_cg_check(const HeatModel& model, const FiniteMetricSpace& space,
                             const IndexList& sample, const std::vector<double>& r_grid,
                             const Eigen::VectorXd& t, double doubling_limit = 64.0);

struct Alpha0Options {
  AsymptoticOptions dimension;
  std::vector<double> radii;  // exhaustion schedule
  ExhaustionOptions exhaustion;
  double points_per_octave = 2.0;
  double tolerance = 0.25;
  IndexList cg_sample;             // defaults to {o}
  std::vector<double> cg_r_grid;   // defaults to {1, 2, 4, 8}
};

struct Alpha0Report {
  AsymptoticResult dimension;
  HeatTraceCurve curve;
  NovikovShubin alpha;
  CgReport cg;
  double gap = 0.0;
  bool gap_ok = false;
  Eigen::VectorXd sandwich_lower;  // C / (gamma V(o, sqrt t))
  Eigen::VectorXd sandwich_upper;  // C' gamma / V(o, sqrt t)
  bool sandwich_holds = false;
  double max_spread = 0.0;  // over the usable window at the largest k
};

Alpha0Report alpha0_equals_dinf_suite(const HeatModel& model, const FiniteMetricSpace& space,
                                      Index o, const Alpha0Options& options);

}  // namespace asdim
