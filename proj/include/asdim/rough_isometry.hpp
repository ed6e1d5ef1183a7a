#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asdim/estimator.hpp"
#include "asdim/metric_space.hpp"

namespace asdim {

/// Map X -> Y with constants and the measured worst violations.
///
/// Condition (i) residuals are max(a^-1 dX - b - dY) and max(dY - a dX - b);
/// condition (ii) is checked closed, max_y dist(y, f(X)) - eps. All three
/// are <= 0 (up to rounding) exactly when `verified` is set.
struct RoughIsometryWitness {
  IndexList map;
  double a = 1.0;
  double b = 0.0;
  double eps = 0.0;
  double residual_lower = 0.0;
  double residual_upper = 0.0;
  double residual_density = 0.0;
  std::int64_t pairs_checked = 0;
  bool exhaustive = false;
  bool verified = false;

  // Filled in by quasi_inverse on the inverse witness.
  bool is_inverse = false;
  double c_X = 0.0;  // max dX(f^- f x, x) for the forward map
  double c_Y = 0.0;  // max dY(f f^- y, y)
};

struct VerifyOptions {
  /// Below this many points every pair is checked.
  Index exhaustive_limit = 1000;
  /// Otherwise rows from seeded random sources, at least this many pairs.
  std::int64_t sampled_pairs = 100'000;
  Index min_sources = 32;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double tolerance = 1e-9;
};

RoughIsometryWitness verify(const IndexList& map, const FiniteMetricSpace& x,
                            const FiniteMetricSpace& y, double a, double b, double eps,
                            const VerifyOptions& options = {});

/// f^-(y) = lowest-index x with dY(f(x), y) <= eps, with constants
/// b^- = a (b + 2 eps), eps^- = a (b + eps) and measured c_X, c_Y.
/// The returned witness (Y -> X) is verified as well.
RoughIsometryWitness quasi_inverse(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                   const RoughIsometryWitness& witness,
                                   const VerifyOptions& options = {});

struct TransferCell {
  double r = 0.0;
  double R = 0.0;
  double lhs_radius = 0.0;  // a r + b^- + c_X
  Index lhs = 0;            // n_{lhs_radius}(B_X(x0, R))
  Index rhs = 0;            // n_r(B_Y(f(x0), a R + b))
  std::string mode;         // exact | certified | inconclusive
  bool holds = false;
};

struct InvarianceReport {
  AsymptoticResult x;
  AsymptoticResult y;
  RoughIsometryWitness inverse;
  double gap = 0.0;
  double tolerance = 0.15;
  bool gap_ok = false;
  std::vector<TransferCell> cells;
  Index exact_cells = 0;
  bool transfer_ok = false;  // every exact or certified cell holds
};

/// Runs the estimator on X (centre x0) and Y (centre f(x0)) and checks the
/// covering transfer n_{ar+b^-+c_X}(B_X(x0,R)) <= n_r(B_Y(f(x0), aR+b)) on
/// the (r, R) cells, exactly where both sides fit under `exact_cap`.
InvarianceReport invariance_suite(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                  const RoughIsometryWitness& witness, Index x0,
                                  const AsymptoticOptions& x_options,
                                  const AsymptoticOptions& y_options,
                                  const std::vector<double>& transfer_r,
                                  const std::vector<double>& transfer_R,
                                  Index exact_cap = 24, double tolerance = 0.15,
                                  const VerifyOptions& verify_options = {});

}  // namespace asdim
