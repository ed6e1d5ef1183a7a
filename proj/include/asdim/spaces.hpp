#pragma once

#include <cstdint>

#include "asdim/metric_space.hpp"

namespace asdim {

constexpr Index kDefaultPointCap = 5'000'000;

/// Z^dims patch [-extent, extent]^dims with the sup or hop (l1) metric.
FiniteMetricSpace lattice(Index dims, Index extent, Norm metric, Index cap = kDefaultPointCap);

/// Periodic lattice (Z/side)^dims with the wrap-around l1 metric and its
/// nearest-neighbour graph; dims = 1 is the cycle C_side.
FiniteMetricSpace torus(Index dims, Index side, Index cap = kDefaultPointCap);

/// Grid graph on [-extent, extent]^dims with BFS hop distance.
FiniteMetricSpace grid_graph(Index dims, Index extent, Index cap = kDefaultPointCap);

/// Uniform i.i.d. sample of the open unit ball in R^dims, Euclidean metric.
FiniteMetricSpace unit_ball_sample(Index n, Index dims, std::uint64_t seed);

/// Uniform i.i.d. sample of [0,1]^2, Euclidean metric.
FiniteMetricSpace unit_square_sample(Index n, std::uint64_t seed);

/// Uniform grid of spacing h on the real segment [lo, hi], Euclidean metric.
FiniteMetricSpace real_grid(double lo, double hi, double h);

enum class DiskSampling { uniform, grid };

/// Union over n in [n_lo, n_hi] of the open disks of radius 1/4 around
/// (n, 0), each sampled with about `per_disk` points; Euclidean metric.
/// Declared resolution is the sample spacing sqrt(area / per_disk).
FiniteMetricSpace disk_union(Index n_lo, Index n_hi, Index per_disk, std::uint64_t seed,
                             DiskSampling sampling = DiskSampling::uniform);

/// The two closed complementary regions of the double spiral
/// (t cos t, t sin t), (-t cos t, -t sin t), sampled on an h-grid inside the
/// disk of radius t_max. `x` and `y` carry the geodesic metric of their
/// 8-neighbour grid graphs; `ambient` is the whole grid sample with the
/// Euclidean metric, and `x_points`, `y_points` index into it. Arm tips cut
/// off by the rim into separate slivers are dropped.
struct SpiralRegions {
  FiniteMetricSpace ambient;
  FiniteMetricSpace x;
  FiniteMetricSpace y;
  IndexList x_points;
  IndexList y_points;
  Index origin = 0;    // ambient index of the grid point at the origin
  Index x_origin = 0;  // local index in x of the sample point nearest the origin
  Index y_origin = 0;
};

SpiralRegions spiral_regions(double t_max, double resolution);

}  // namespace asdim
