#include "asdim/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "asdim/errors.hpp"
#include "asdim/numeric.hpp"

namespace asdim {

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::covering: return "covering";
    case CurveKind::packing: return "packing";
    case CurveKind::volume: return "volume";
    case CurveKind::heat_trace: return "heat-trace";
    case CurveKind::kolmogorov: return "kolmogorov";
  }
  return "?";
}

void GrowthCurve::validate() const {
  if (scale.size() != value.size()) throw DomainError("growth curve: scale/value length mismatch");
  if (scale.size() < 4) throw DomainError("growth curve: needs at least 4 samples");
  if (!(scale.array() > 0.0).all() || !scale.allFinite())
    throw DomainError("growth curve: scales must be positive and finite");
  for (Eigen::Index j = 1; j < scale.size(); ++j)
    if (!(scale[j] > scale[j - 1])) throw DomainError("growth curve: scales must increase strictly");
  if (!(value.array() > 0.0).all() || !value.allFinite())
    throw DomainError("growth curve: values must be positive and finite");
}

Eigen::VectorXd log_ratios(const GrowthCurve& curve) {
  if ((curve.scale.array() <= 1.0).any()) throw DomainError("log ratio needs scales above 1");
  return curve.value.array().log() / curve.scale.array().log();
}

DimensionEstimate exponent_from_curve(const GrowthCurve& curve, double tail_fraction,
                                      double monotone_tolerance) {
  curve.validate();
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw DomainError("tail fraction must lie in (0, 1]");
  const Eigen::Index m = curve.size();
  const auto tail = static_cast<Eigen::Index>(std::ceil(tail_fraction * static_cast<double>(m) - 1e-12));
  if (tail < 4) throw DomainError("exponent: fewer than 4 tail points");

  DimensionEstimate est;
  est.window_begin = m - tail;
  est.window_end = m;
  est.scale_min = curve.scale[est.window_begin];
  est.scale_max = curve.scale[m - 1];

  const Eigen::VectorXd x = curve.scale.tail(tail).array().log();
  const Eigen::VectorXd y = curve.value.tail(tail).array().log();
  const auto fit = fit_line(x, y);
  est.slope = fit.slope;
  est.intercept = fit.intercept;
  est.residual = fit.max_residual;

  // Pointwise ratios only exist above scale 1.
  Eigen::Index first = 0;
  while (first < tail && !(x[first] > 0.0)) ++first;
  if (first == tail) {
    est.upper = est.lower = est.slope;
    return est;
  }
  const Eigen::VectorXd ratio = y.tail(tail - first).array() / x.tail(tail - first).array();
  bool up = true, down = true;
  for (Eigen::Index j = 1; j < ratio.size(); ++j) {
    if (ratio[j] < ratio[j - 1] - monotone_tolerance) up = false;
    if (ratio[j] > ratio[j - 1] + monotone_tolerance) down = false;
  }
  est.monotone = up || down;
  if (est.monotone) {
    est.upper = est.lower = ratio[ratio.size() - 1];
  } else {
    est.upper = ratio.maxCoeff();
    est.lower = ratio.minCoeff();
  }
  return est;
}

std::vector<double> effective_R_grid(const FiniteMetricSpace& space, Index center,
                                     const std::vector<double>& requested, double R_min,
                                     double points_per_octave, bool truncate, double& cap) {
  const double ecc = space.eccentricity(center);
  cap = truncate ? ecc / 2.0 : std::numeric_limits<double>::infinity();
  std::vector<double> grid;
  if (!requested.empty()) {
    for (std::size_t k = 0; k < requested.size(); ++k) {
      if (!(requested[k] > 0.0) || (k > 0 && !(requested[k] > requested[k - 1])))
        throw DomainError("R grid must be positive and increasing");
      if (requested[k] <= cap) grid.push_back(requested[k]);
    }
    return grid;
  }
  const double hi = truncate ? cap : 2.0 * std::max(ecc, R_min);
  if (!(hi >= R_min)) return grid;
  const Eigen::VectorXd g = geometric_grid(R_min, hi, points_per_octave);
  grid.assign(g.data(), g.data() + g.size());
  return grid;
}

namespace {

void check_r_sequence(const std::vector<double>& r) {
  if (r.empty()) throw DomainError("r sequence must be nonempty");
  for (std::size_t k = 0; k < r.size(); ++k)
    if (!(r[k] > 0.0) || (k > 0 && !(r[k] > r[k - 1])))
      throw DomainError("r sequence must be positive and increasing");
}

Eigen::Index tail_count(std::size_t m, double tail_fraction) {
  return static_cast<Eigen::Index>(std::ceil(tail_fraction * static_cast<double>(m) - 1e-12));
}

}  // namespace

AsymptoticResult asymptotic_dimension(const FiniteMetricSpace& space, Index center,
                                      const AsymptoticOptions& options) {
  space.check_index(center);
  check_r_sequence(options.r_values);
  const double r_max = options.r_values.back();

  AsymptoticResult result;
  result.R_values = effective_R_grid(space, center, options.R_values, 2.0 * r_max,
                                     options.points_per_octave, options.truncate, result.R_cap);
  if (result.R_values.empty() || tail_count(result.R_values.size(), options.tail_fraction) < 4)
    throw ScaleError("asymptotic dimension: fewer than 4 tail scales below the R cap " +
                     std::to_string(result.R_cap));
  const double R_top = result.R_values.back();
  if (R_top < options.min_range_factor * r_max)
    throw ScaleError("asymptotic dimension: max R " + std::to_string(R_top) + " below " +
                     std::to_string(options.min_range_factor) + " x max r");
  IndexList top;
  space.ball_members(center, R_top, top);
  if (static_cast<Index>(top.size()) < options.min_ball)
    throw ScaleError("asymptotic dimension: ball at max R holds only " +
                     std::to_string(top.size()) + " points");

  result.cells = covering_grid(space, center, options.r_values, result.R_values, options.threads);
  const std::size_t nR = result.R_values.size();
  const Eigen::VectorXd scale = Eigen::Map<const Eigen::VectorXd>(result.R_values.data(),
                                                                   static_cast<Eigen::Index>(nR));
  for (std::size_t i = 0; i < options.r_values.size(); ++i) {
    RLevel level;
    level.r = options.r_values[i];
    level.cover = {scale, Eigen::VectorXd(nR), CurveKind::covering, level.r};
    level.packing = {scale, Eigen::VectorXd(nR), CurveKind::packing, level.r};
    for (std::size_t j = 0; j < nR; ++j) {
      const CoveringCell& cell = result.cells[i * nR + j];
      level.cover.value[static_cast<Eigen::Index>(j)] = cell.cover;
      level.packing.value[static_cast<Eigen::Index>(j)] = cell.packing;
    }
    level.cover_estimate = exponent_from_curve(level.cover, options.tail_fraction);
    level.packing_estimate = exponent_from_curve(level.packing, options.tail_fraction);
    level.cover_estimate.scale_cap = level.packing_estimate.scale_cap = result.R_cap;
    result.levels.push_back(std::move(level));
  }
  const RLevel& last = result.levels.back();
  if (result.levels.size() >= 2) {
    const RLevel& prev = result.levels[result.levels.size() - 2];
    result.stabilized = std::abs(last.cover_estimate.slope - prev.cover_estimate.slope) <
                        options.stabilization_tolerance;
  }
  result.estimate = last.cover_estimate;
  result.estimate.stabilized = result.stabilized;
  result.packing_estimate = last.packing_estimate;
  result.packing_agrees = std::abs(result.packing_estimate.slope - result.estimate.slope) <
                          options.packing_tolerance;
  return result;
}

KolmogorovResult kolmogorov_dimension(const FiniteMetricSpace& space, Index center, double R_fixed,
                                      const std::vector<double>& r_values, double tail_fraction) {
  space.check_index(center);
  if (!(R_fixed > 0.0)) throw DomainError("box dimension: R must be positive");
  for (std::size_t k = 0; k < r_values.size(); ++k)
    if (!(r_values[k] > 0.0) || (k > 0 && !(r_values[k] < r_values[k - 1])))
      throw DomainError("box dimension: r sequence must be positive and decreasing");

  KolmogorovResult result;
  const double resolution = space.metadata().resolution;
  for (double r : r_values) (r < resolution ? result.r_excluded : result.r_used).push_back(r);
  if (result.r_used.size() < 4)
    throw ScaleError("box dimension: fewer than 4 radii at or above the sample resolution " +
                     std::to_string(resolution));

  IndexList omega;
  space.ball_members(center, R_fixed, omega);
  const auto m = static_cast<Eigen::Index>(result.r_used.size());
  result.curve.kind = CurveKind::kolmogorov;
  result.curve.scale.resize(m);
  result.curve.value.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double r = result.r_used[static_cast<std::size_t>(k)];
    result.curve.scale[k] = 1.0 / r;
    result.curve.value[k] = covering_number_greedy(space, omega, r).count;
  }
  result.estimate = exponent_from_curve(result.curve, tail_fraction);
  return result;
}

VolumeResult volume_dimension(const FiniteMetricSpace& space, Index center,
                              const VolumeOptions& options) {
  space.check_index(center);
  VolumeResult result;
  double cap = 0.0;
  const auto grid = effective_R_grid(space, center, options.R_values, options.R_min,
                                     options.points_per_octave, options.truncate, cap);
  if (grid.empty() || tail_count(grid.size(), options.tail_fraction) < 4)
    throw ScaleError("volume dimension: fewer than 4 tail scales below the R cap " +
                     std::to_string(cap));
  const auto m = static_cast<Eigen::Index>(grid.size());
  result.curve.kind = CurveKind::volume;
  result.curve.scale = Eigen::Map<const Eigen::VectorXd>(grid.data(), m);
  result.curve.value.resize(m);
  IndexList members;
  for (Eigen::Index k = 0; k < m; ++k) {
    members.clear();
    space.ball_members(center, grid[static_cast<std::size_t>(k)], members);
    const double mu = space.measure_of(members);
    if (!(mu > 0.0))
      throw DomainError("volume dimension: zero-measure ball at R = " + std::to_string(grid[k]));
    result.curve.value[k] = mu;
  }
  result.estimate = exponent_from_curve(result.curve, options.tail_fraction);
  result.estimate.scale_cap = cap;
  if (options.working_r > 0.0) {
    const double r[] = {options.working_r};
    const auto row = uniform_boundedness_report(space, r).front();
    result.beta1 = row.beta1;
    result.beta2 = row.beta2;
    result.uniformly_bounded = !row.degenerate;
  }
  return result;
}

AxiomReport axiom_suite(const FiniteMetricSpace& ambient, const IndexList& x1, const IndexList& x2,
                        const std::array<Index, 3>& centers, const AsymptoticOptions& options,
                        double tolerance) {
  const FiniteMetricSpace s1 = subspace(ambient, x1);
  const FiniteMetricSpace s2 = subspace(ambient, x2);
  const FiniteMetricSpace su = union_in_ambient(ambient, x1, x2);
  auto local = [](const FiniteMetricSpace& s, Index amb) {
    const Index l = local_index(s, amb);
    if (l < 0) throw DomainError("axiom suite: centre " + std::to_string(amb) + " not in subset");
    return l;
  };
  AxiomReport report;
  report.tolerance = tolerance;
  report.x1 = asymptotic_dimension(s1, local(s1, centers[0]), options);
  report.x2 = asymptotic_dimension(s2, local(s2, centers[1]), options);
  report.both = asymptotic_dimension(su, local(su, centers[2]), options);
  const double d1 = report.x1.value(), d2 = report.x2.value(), du = report.both.value();
  report.monotone = d1 <= du + tolerance && d2 <= du + tolerance;
  report.union_max = std::abs(du - std::max(d1, d2)) <= tolerance;
  return report;
}

ProductReport product_axiom(const FiniteMetricSpace& x, const FiniteMetricSpace& y, Index cx,
                            Index cy, const AsymptoticOptions& options,
                            const AsymptoticOptions& product_options, double tolerance) {
  x.check_index(cx);
  y.check_index(cy);
  const FiniteMetricSpace xy = product(x, y);
  ProductReport report;
  report.tolerance = tolerance;
  report.x = asymptotic_dimension(x, cx, options);
  report.y = asymptotic_dimension(y, cy, options);
  report.xy = asymptotic_dimension(xy, cx * y.size() + cy, product_options);
  const double sum = report.x.value() + report.y.value();
  report.subadditive = report.xy.value() <= sum + tolerance;
  report.additive = std::abs(report.xy.value() - sum) <= tolerance;
  return report;
}

}  // namespace asdim
