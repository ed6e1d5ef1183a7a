#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "asdim/metric_space.hpp"

namespace asdim {

enum class CoverMode { exact, greedy_upper, packing_lower, packing_exact };

std::string_view to_string(CoverMode mode);

/// Outcome of a covering or packing computation.
///
/// Cover modes: open balls of `radius` around `centers` contain `target`.
/// Packing modes: centers lie in `target` and are pairwise >= 2*radius apart.
struct CoverResult {
  Index count = 0;
  IndexList centers;
  CoverMode mode = CoverMode::greedy_upper;
  double radius = 0.0;
  IndexList target;
};

constexpr Index kDefaultExactCap = 24;

/// Minimum cover of `target` by open r-balls centred anywhere in the space.
/// Candidate centres are reduced by dominance first; throws ResourceError if
/// more than `exact_cap` remain.
CoverResult covering_number_exact(const FiniteMetricSpace& space, std::span<const Index> target,
                                  double r, Index exact_cap = kDefaultExactCap);

/// Greedy cover: repeatedly takes the centre covering the most uncovered
/// target points, ties to the lowest index.
CoverResult covering_number_greedy(const FiniteMetricSpace& space, std::span<const Index> target,
                                   double r);

/// First-fit maximal packing over the target in index order.
CoverResult packing_number_greedy(const FiniteMetricSpace& space, std::span<const Index> target,
                                  double r);

/// Maximum packing (centres in target, pairwise >= 2r) by branch and bound.
/// Throws ResourceError for targets larger than `exact_cap`.
CoverResult packing_number_exact(const FiniteMetricSpace& space, std::span<const Index> target,
                                 double r, Index exact_cap = 40);

/// Checks n_r >= nu_r >= n_2r. Under the exact cap all three counts are
/// exact; otherwise the provable greedy chain
/// cover(r) >= pack(r) >= pack(2r) is asserted, where pack(r) >= n_2r
/// follows from maximality.
struct SandwichCertificate {
  Index cover_r = 0;
  Index pack_r = 0;
  Index cover_2r = 0;
  bool exact = false;
  bool holds = false;
};

SandwichCertificate sandwich_certificate(const FiniteMetricSpace& space,
                                         std::span<const Index> target, double r,
                                         Index exact_cap = kDefaultExactCap);

/// True when the open r-balls around `centers` contain every target point.
bool covers(const FiniteMetricSpace& space, std::span<const Index> centers,
            std::span<const Index> target, double r);

/// One (r, R) cell of a covering grid around a fixed centre.
struct CoveringCell {
  double r = 0.0;
  double R = 0.0;
  Index ball_size = 0;
  Index cover = 0;      // greedy n_r(B(x, R))
  Index packing = 0;    // greedy nu_r(B(x, R))
  Index cover_2r = 0;   // greedy n_2r(B(x, R))
};

/// Evaluates every (r, R) cell; cells run on `threads` workers and the result
/// order (r-major, then R) does not depend on the worker count.
std::vector<CoveringCell> covering_grid(const FiniteMetricSpace& space, Index center,
                                        std::span<const double> r_values,
                                        std::span<const double> R_values, unsigned threads = 1);

}  // namespace asdim
