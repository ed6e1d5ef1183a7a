#include "asdim/spaces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "asdim/errors.hpp"

namespace asdim {
namespace {

SpaceMetadata meta(std::string name, double resolution = 0.0) {
  SpaceMetadata m;
  m.name = std::move(name);
  m.resolution = resolution;
  return m;
}

Index local_index_in(const IndexList& sorted, Index value) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  return it != sorted.end() && *it == value ? static_cast<Index>(it - sorted.begin()) : -1;
}

}  // namespace

FiniteMetricSpace lattice(Index dims, Index extent, Norm metric, Index cap) {
  if (dims < 1 || extent < 0) throw DomainError("lattice: dims >= 1 and extent >= 0 required");
  if (metric == Norm::euclidean) throw DomainError("lattice: metric must be sup or hop");
  LatticeShape shape{std::vector<Index>(dims, -extent), std::vector<Index>(dims, extent), metric,
                     false};
  auto m = meta("Z" + std::to_string(dims) + "[" + std::to_string(-extent) + "," +
                std::to_string(extent) + "]");
  m.params["dims"] = std::to_string(dims);
  m.params["extent"] = std::to_string(extent);
  m.params["metric"] = metric == Norm::sup ? "sup" : "hop";
  return lattice_space(shape, cap, std::move(m));
}

FiniteMetricSpace torus(Index dims, Index side, Index cap) {
  if (dims < 1 || side < 3) throw DomainError("torus: dims >= 1 and side >= 3 required");
  LatticeShape shape{std::vector<Index>(dims, 0), std::vector<Index>(dims, side - 1), Norm::l1,
                     true};
  auto m = meta(dims == 1 ? "C" + std::to_string(side)
                          : "T" + std::to_string(side) + "^" + std::to_string(dims));
  m.params["dims"] = std::to_string(dims);
  m.params["side"] = std::to_string(side);
  return lattice_space(shape, cap, std::move(m));
}

FiniteMetricSpace grid_graph(Index dims, Index extent, Index cap) {
  // Reuse the lattice enumeration for the edge set, then forget the closed form.
  const FiniteMetricSpace l = lattice(dims, extent, Norm::l1, cap);
  Graph g = *l.graph();
  auto m = meta("grid" + std::to_string(dims) + "[" + std::to_string(-extent) + "," +
                std::to_string(extent) + "]");
  m.params["dims"] = std::to_string(dims);
  m.params["extent"] = std::to_string(extent);
  return from_graph(std::move(g), std::move(m));
}

FiniteMetricSpace unit_ball_sample(Index n, Index dims, std::uint64_t seed) {
  if (n < 1 || dims < 1) throw DomainError("unit ball sample: n, dims >= 1 required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd pts(n, dims);
  for (Index i = 0; i < n;) {
    for (Index k = 0; k < dims; ++k) pts(i, k) = u(rng);
    if (pts.row(i).squaredNorm() < 1.0) ++i;
  }
  const double vol = std::pow(std::numbers::pi, dims / 2.0) / std::tgamma(dims / 2.0 + 1.0);
  auto m = meta("ball" + std::to_string(dims), std::pow(vol / n, 1.0 / dims));
  m.params["n"] = std::to_string(n);
  m.params["seed"] = std::to_string(seed);
  return from_points(std::move(pts), Norm::euclidean, std::move(m));
}

FiniteMetricSpace unit_square_sample(Index n, std::uint64_t seed) {
  if (n < 1) throw DomainError("unit square sample: n >= 1 required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd pts(n, 2);
  for (Index i = 0; i < n; ++i) {
    pts(i, 0) = u(rng);
    pts(i, 1) = u(rng);
  }
  auto m = meta("square", 1.0 / std::sqrt(static_cast<double>(n)));
  m.params["n"] = std::to_string(n);
  m.params["seed"] = std::to_string(seed);
  return from_points(std::move(pts), Norm::euclidean, std::move(m));
}

FiniteMetricSpace real_grid(double lo, double hi, double h) {
  if (!(h > 0.0) || !(hi >= lo)) throw DomainError("real grid: need h > 0 and hi >= lo");
  const auto n = static_cast<Index>(std::floor((hi - lo) / h + 1e-9)) + 1;
  Eigen::MatrixXd pts(n, 1);
  for (Index i = 0; i < n; ++i) pts(i, 0) = lo + h * i;
  auto m = meta("grid(h=" + std::to_string(h) + ")", h);
  return from_points(std::move(pts), Norm::euclidean, std::move(m));
}

FiniteMetricSpace disk_union(Index n_lo, Index n_hi, Index per_disk, std::uint64_t seed,
                             DiskSampling sampling) {
  if (n_hi < n_lo || per_disk < 1) throw DomainError("disk union: empty index range or sample");
  constexpr double radius = 0.25;
  const double area = std::numbers::pi * radius * radius;
  const double h = std::sqrt(area / per_disk);
  std::vector<std::array<double, 2>> offsets;
  if (sampling == DiskSampling::grid) {
    const auto reach = static_cast<Index>(std::ceil(radius / h));
    for (Index i = -reach; i <= reach; ++i)
      for (Index j = -reach; j <= reach; ++j) {
        const double x = i * h, y = j * h;
        if (x * x + y * y < radius * radius) offsets.push_back({x, y});
      }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<std::array<double, 2>> all;
  for (Index n = n_lo; n <= n_hi; ++n) {
    if (sampling == DiskSampling::grid) {
      for (const auto& o : offsets) all.push_back({n + o[0], o[1]});
      continue;
    }
    for (Index k = 0; k < per_disk;) {
      const double x = u(rng), y = u(rng);
      if (x * x + y * y < radius * radius) {
        all.push_back({n + x, y});
        ++k;
      }
    }
  }
  Eigen::MatrixXd pts(static_cast<Index>(all.size()), 2);
  for (Index i = 0; i < pts.rows(); ++i) {
    pts(i, 0) = all[i][0];
    pts(i, 1) = all[i][1];
  }
  auto m = meta("disk-union", h);
  m.params["n_lo"] = std::to_string(n_lo);
  m.params["n_hi"] = std::to_string(n_hi);
  m.params["per_disk"] = std::to_string(per_disk);
  m.params["sampling"] = sampling == DiskSampling::grid ? "grid" : "uniform";
  m.params["seed"] = std::to_string(seed);
  return from_points(std::move(pts), Norm::euclidean, std::move(m));
}

SpiralRegions spiral_regions(double t_max, double resolution) {
  const double h = resolution;
  if (!(h > 0.0) || !(t_max > 4.0 * h)) throw DomainError("spiral: need 0 < 4h < t_max");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const auto reach = static_cast<Index>(std::floor(t_max / h));
  const Index side = 2 * reach + 1;

  // Grid cell (i, j) -> ambient index, -1 outside the disk.
  std::vector<Index> cell(static_cast<std::size_t>(side) * side, -1);
  std::vector<std::array<double, 2>> coords;
  std::vector<std::uint8_t> in_x, in_y;
  SpiralRegions out;
  for (Index i = -reach; i <= reach; ++i)
    for (Index j = -reach; j <= reach; ++j) {
      const double px = i * h, py = j * h;
      const double rho = std::hypot(px, py);
      if (!(rho <= t_max)) continue;
      double phi = std::atan2(py, px);
      if (phi < 0.0) phi += two_pi;
      // Point on the first curve: rho = phi mod 2pi; on the second: rho = phi + pi.
      const double s = rho == 0.0 ? 0.0 : std::fmod(std::fmod(rho - phi, two_pi) + two_pi, two_pi);
      const double slack = 1e-12;
      const Index id = static_cast<Index>(coords.size());
      if (i == 0 && j == 0) out.origin = id;
      cell[static_cast<std::size_t>(i + reach) * side + (j + reach)] = id;
      coords.push_back({px, py});
      in_x.push_back(s <= std::numbers::pi + slack || s >= two_pi - slack);
      in_y.push_back(s >= std::numbers::pi - slack || s <= slack);
    }

  Eigen::MatrixXd pts(static_cast<Index>(coords.size()), 2);
  for (Index k = 0; k < pts.rows(); ++k) {
    pts(k, 0) = coords[k][0];
    pts(k, 1) = coords[k][1];
  }
  auto am = meta("spiral-ambient", h);
  am.params["t_max"] = std::to_string(t_max);
  out.ambient = from_points(std::move(pts), Norm::euclidean, am);

  auto region_graph = [&](const std::vector<std::uint8_t>& member, IndexList& points) {
    std::vector<Index> local(coords.size(), -1);
    for (Index k = 0; k < static_cast<Index>(coords.size()); ++k)
      if (member[k]) {
        local[k] = static_cast<Index>(points.size());
        points.push_back(k);
      }
    std::vector<Edge> edges;
    const double diag = h * std::numbers::sqrt2;
    for (Index i = -reach; i <= reach; ++i)
      for (Index j = -reach; j <= reach; ++j) {
        const Index a = cell[static_cast<std::size_t>(i + reach) * side + (j + reach)];
        if (a < 0 || local[a] < 0) continue;
        const Index di[] = {1, 0, 1, 1};
        const Index dj[] = {0, 1, 1, -1};
        for (int e = 0; e < 4; ++e) {
          const Index ii = i + di[e], jj = j + dj[e];
          if (ii > reach || jj < -reach || jj > reach) continue;
          const Index b = cell[static_cast<std::size_t>(ii + reach) * side + (jj + reach)];
          if (b < 0 || local[b] < 0) continue;
          edges.push_back({local[a], local[b], e < 2 ? h : diag});
        }
      }
    return Graph::from_edges(static_cast<Index>(points.size()), edges);
  };
  auto region = [&](std::vector<std::uint8_t> member, IndexList& points, const char* name) {
    Graph g = region_graph(member, points);
    std::vector<Index> label;
    if (g.components(label) != 1) {
      // The rim of the disk cuts arm tips into slivers; drop those, and only
      // those, keeping the component through the origin.
      const Index keep = label[local_index_in(points, out.origin)];
      for (std::size_t k = 0; k < points.size(); ++k) {
        if (label[k] == keep) continue;
        const auto& c = coords[static_cast<std::size_t>(points[k])];
        if (std::hypot(c[0], c[1]) < t_max - 2.0 * h)
          throw DomainError(std::string("spiral: region ") + name +
                            " is disconnected at this resolution; refine the grid");
        member[static_cast<std::size_t>(points[k])] = 0;
      }
      points.clear();
      g = region_graph(member, points);
    }
    auto m = meta(std::string("spiral-") + name, h);
    m.params["t_max"] = std::to_string(t_max);
    return from_graph(std::move(g), std::move(m));
  };

  out.x = region(in_x, out.x_points, "X");
  out.y = region(in_y, out.y_points, "Y");
  out.x_origin = local_index_in(out.x_points, out.origin);
  out.y_origin = local_index_in(out.y_points, out.origin);
  return out;
}

}  // namespace asdim
