#include "asdim/rough_isometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "asdim/covering.hpp"
#include "asdim/errors.hpp"
#include "asdim/parallel.hpp"

namespace asdim {
namespace {

// Open-ball radius that realises the closed ball of radius eps.
double closed_radius(double eps) { return eps + 1e-9 * std::max(1.0, eps); }

IndexList pick_sources(Index n, const VerifyOptions& options, bool& exhaustive) {
  IndexList sources(static_cast<std::size_t>(n));
  std::iota(sources.begin(), sources.end(), 0);
  exhaustive = n <= options.exhaustive_limit;
  if (exhaustive) return sources;
  const auto wanted = std::max<std::int64_t>(
      options.min_sources, (options.sampled_pairs + n - 1) / std::max<Index>(n, 1));
  std::mt19937_64 rng(options.seed);
  std::shuffle(sources.begin(), sources.end(), rng);
  sources.resize(static_cast<std::size_t>(std::min<std::int64_t>(wanted, n)));
  std::sort(sources.begin(), sources.end());
  return sources;
}

/// max over y of dist(y, image), via growing balls around y.
double density_radius(const FiniteMetricSpace& y, const std::vector<std::uint8_t>& image,
                      double eps, unsigned threads) {
  const Index n = y.size();
  std::vector<double> nearest(static_cast<std::size_t>(n), 0.0);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t k) {
    const auto q = static_cast<Index>(k);
    if (image[q]) return;
    IndexList members;
    double radius = closed_radius(eps);
    for (;;) {
      members.clear();
      y.ball_members(q, radius, members);
      double best = std::numeric_limits<double>::infinity();
      for (Index m : members)
        if (image[m]) best = std::min(best, y.distance(q, m));
      if (std::isfinite(best)) {
        nearest[k] = best;
        return;
      }
      if (static_cast<Index>(members.size()) == n) {
        nearest[k] = std::numeric_limits<double>::infinity();
        return;
      }
      radius = std::max(2.0 * radius, 1.0);
    }
  });
  return n == 0 ? 0.0 : *std::max_element(nearest.begin(), nearest.end());
}

}  // namespace

RoughIsometryWitness verify(const IndexList& map, const FiniteMetricSpace& x,
                            const FiniteMetricSpace& y, double a, double b, double eps,
                            const VerifyOptions& options) {
  if (static_cast<Index>(map.size()) != x.size())
    throw DomainError("rough isometry: map must be total on X");
  if (!(a >= 1.0) || !(b >= 0.0) || !(eps >= 0.0))
    throw DomainError("rough isometry: need a >= 1, b >= 0, eps >= 0");
  for (Index v : map) y.check_index(v);

  RoughIsometryWitness w;
  w.map = map;
  w.a = a;
  w.b = b;
  w.eps = eps;

  const Index n = x.size();
  const IndexList sources = pick_sources(n, options, w.exhaustive);
  std::vector<double> lower(sources.size(), -std::numeric_limits<double>::infinity());
  std::vector<double> upper(sources.size(), -std::numeric_limits<double>::infinity());
  std::vector<double> scale(sources.size(), 1.0);
  parallel_for(sources.size(), options.threads, [&](std::size_t k) {
    const Index s = sources[k];
    std::vector<double> dx(static_cast<std::size_t>(n));
    std::vector<double> dy(static_cast<std::size_t>(y.size()));
    x.distances_from(s, dx);
    y.distances_from(map[s], dy);
    for (Index t = 0; t < n; ++t) {
      const double ax = dx[t], ay = dy[map[t]];
      lower[k] = std::max(lower[k], ax / a - b - ay);
      upper[k] = std::max(upper[k], ay - a * ax - b);
      scale[k] = std::max({scale[k], ax, ay});
    }
  });
  w.pairs_checked = static_cast<std::int64_t>(sources.size()) * n;
  w.residual_lower = *std::max_element(lower.begin(), lower.end());
  w.residual_upper = *std::max_element(upper.begin(), upper.end());
  const double tol = options.tolerance * *std::max_element(scale.begin(), scale.end());

  std::vector<std::uint8_t> image(static_cast<std::size_t>(y.size()), 0);
  for (Index v : map) image[v] = 1;
  w.residual_density = density_radius(y, image, eps, options.threads) - eps;
  w.verified = w.residual_lower <= tol && w.residual_upper <= tol && w.residual_density <= tol;
  return w;
}

RoughIsometryWitness quasi_inverse(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                   const RoughIsometryWitness& witness,
                                   const VerifyOptions& options) {
  if (!witness.verified) throw DomainError("quasi-inverse: witness is not verified");
  const Index ny = y.size();
  std::vector<Index> lowest(static_cast<std::size_t>(ny), -1);
  for (Index i = static_cast<Index>(witness.map.size()); i-- > 0;) lowest[witness.map[i]] = i;

  IndexList inv(static_cast<std::size_t>(ny), -1);
  parallel_for(static_cast<std::size_t>(ny), options.threads, [&](std::size_t k) {
    const auto q = static_cast<Index>(k);
    IndexList members;
    y.ball_members(q, closed_radius(witness.eps), members);
    Index best = -1;
    for (Index m : members)
      if (lowest[m] >= 0 && y.distance(q, m) <= witness.eps && (best < 0 || lowest[m] < best))
        best = lowest[m];
    inv[k] = best;
  });
  for (Index q = 0; q < ny; ++q)
    if (inv[q] < 0)
      throw DomainError("quasi-inverse: point " + std::to_string(q) +
                        " has no preimage within eps; the witness is invalid");

  const double a = witness.a;
  RoughIsometryWitness w =
      verify(inv, y, x, a, a * (witness.b + 2.0 * witness.eps), a * (witness.b + witness.eps), options);
  w.is_inverse = true;
  for (Index i = 0; i < x.size(); ++i)
    w.c_X = std::max(w.c_X, x.distance(inv[witness.map[i]], i));
  for (Index q = 0; q < ny; ++q) w.c_Y = std::max(w.c_Y, y.distance(witness.map[inv[q]], q));
  return w;
}

InvarianceReport invariance_suite(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                  const RoughIsometryWitness& witness, Index x0,
                                  const AsymptoticOptions& x_options,
                                  const AsymptoticOptions& y_options,
                                  const std::vector<double>& transfer_r,
                                  const std::vector<double>& transfer_R, Index exact_cap,
                                  double tolerance, const VerifyOptions& verify_options) {
  x.check_index(x0);
  InvarianceReport report;
  report.tolerance = tolerance;
  report.inverse = quasi_inverse(x, y, witness, verify_options);
  const Index y0 = witness.map[x0];
  report.x = asymptotic_dimension(x, x0, x_options);
  report.y = asymptotic_dimension(y, y0, y_options);
  report.gap = std::abs(report.x.value() - report.y.value());
  report.gap_ok = report.gap <= tolerance;

  const double a = witness.a, b = witness.b;
  report.transfer_ok = true;
  for (double r : transfer_r)
    for (double R : transfer_R) {
      TransferCell cell;
      cell.r = r;
      cell.R = R;
      cell.lhs_radius = a * r + report.inverse.b + report.inverse.c_X;
      const Ball bx = ball(x, x0, R);
      const Ball by = ball(y, y0, a * R + b);
      try {
        cell.lhs = covering_number_exact(x, bx.members, cell.lhs_radius, exact_cap).count;
        cell.rhs = covering_number_exact(y, by.members, r, exact_cap).count;
        cell.mode = "exact";
        ++report.exact_cells;
        cell.holds = cell.lhs <= cell.rhs;
      } catch (const ResourceError&) {
        cell.lhs = covering_number_greedy(x, bx.members, cell.lhs_radius).count;
        cell.rhs = packing_number_greedy(y, by.members, r).count;
        // greedy cover >= n_lhs and any r-packing <= n_r.
        cell.mode = cell.lhs <= cell.rhs ? "certified" : "inconclusive";
        cell.holds = cell.lhs <= cell.rhs;
      }
      if (cell.mode != "inconclusive" && !cell.holds) report.transfer_ok = false;
      report.cells.push_back(cell);
    }
  return report;
}

}  // namespace asdim
