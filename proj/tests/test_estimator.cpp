#include <doctest.h>

#include <cmath>

#include "asdim/errors.hpp"
#include "asdim/estimator.hpp"
#include "asdim/spaces.hpp"

using namespace asdim;

namespace {

GrowthCurve power_curve(double c, double d, double lo, double hi, int n) {
  GrowthCurve g;
  g.scale.resize(n);
  g.value.resize(n);
  for (int i = 0; i < n; ++i) {
    g.scale[i] = lo * std::pow(hi / lo, i / double(n - 1));
    g.value[i] = c * std::pow(g.scale[i], d);
  }
  return g;
}

}  // namespace

TEST_CASE("exact power law: slope is the exponent, ratios approach it") {
  const GrowthCurve g = power_curve(3.0, 1.7, 2.0, 2048.0, 11);
  const DimensionEstimate e = exponent_from_curve(g, 0.5);
  CHECK(e.slope == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(e.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(e.residual == doctest::Approx(0.0).epsilon(1e-10));
  // log(3 R^1.7) / log R = 1.7 + log 3 / log R, decreasing in R.
  const Eigen::VectorXd lr = log_ratios(g);
  CHECK(lr[10] == doctest::Approx(1.7 + std::log(3.0) / std::log(2048.0)));
  CHECK(e.lower == doctest::Approx(lr[10]));
  CHECK(e.upper == doctest::Approx(lr[10]));
  CHECK(e.monotone);
}

TEST_CASE("curve validation") {
  GrowthCurve g = power_curve(1.0, 1.0, 2.0, 16.0, 3);
  CHECK_THROWS_AS(g.validate(), DomainError);
  g = power_curve(1.0, 1.0, 2.0, 16.0, 5);
  g.value[2] = 0.0;
  CHECK_THROWS_AS(g.validate(), DomainError);
}

TEST_CASE("d_inf of Z is 1 and of a bounded cloud is 0") {
  AsymptoticOptions o;
  o.points_per_octave = 2.0;
  const AsymptoticResult z = asymptotic_dimension(lattice(1, 2000, Norm::sup), 2000, o);
  CHECK(z.value() == doctest::Approx(1.0).epsilon(0.1));
  CHECK(z.packing_agrees);

  AsymptoticOptions b;
  b.r_values = {0.5, 1.0};
  b.truncate = false;
  for (double R = 4.0; R <= 1024.0; R *= 2.0) b.R_values.push_back(R);
  const AsymptoticResult cloud = asymptotic_dimension(unit_ball_sample(300, 2, 3), 0, b);
  CHECK(std::abs(cloud.value()) < 1e-12);
}

TEST_CASE("grid cells count greedy covers of the lattice exactly") {
  // Open sup-balls of radius 2 in Z^2 are 3x3 blocks, so n_2(B(o, R)) for
  // the (2m+1)^2 block with m = ceil(R) - 1 is ceil((2m+1)/3)^2.
  AsymptoticOptions o;
  o.r_values = {2.0};
  o.R_values = {4.0, 7.0, 10.0, 13.0, 16.0, 19.0, 22.0, 25.0, 28.0};
  o.min_range_factor = 1.0;
  const FiniteMetricSpace s = lattice(2, 60, Norm::sup);
  const AsymptoticResult r = asymptotic_dimension(s, (s.size() - 1) / 2, o);
  for (const auto& cell : r.cells) {
    const Index m = static_cast<Index>(std::ceil(cell.R)) - 1, side = 2 * m + 1;
    CHECK(cell.ball_size == side * side);
    const Index per = (side + 2) / 3;
    CHECK(cell.cover == per * per);
  }
}

TEST_CASE("too small a space raises ScaleError") {
  CHECK_THROWS_AS(asymptotic_dimension(lattice(1, 20, Norm::sup), 20), ScaleError);
}

TEST_CASE("box dimension of the unit square sample") {
  const FiniteMetricSpace sq = unit_square_sample(10000, 4);
  std::vector<double> r;
  for (double x = 0.2; x >= 0.02; x /= std::pow(2.0, 0.25)) r.push_back(x);
  const KolmogorovResult k = kolmogorov_dimension(sq, 0, 2.0, r, 1.0);
  CHECK(k.value() == doctest::Approx(2.0).epsilon(0.1));
  CHECK(k.r_excluded.empty());
}

TEST_CASE("box dimension of a Z segment is 0 below unit scale") {
  const FiniteMetricSpace z = lattice(1, 30, Norm::sup);
  const KolmogorovResult k = kolmogorov_dimension(z, 30, 10.0, {0.9, 0.7, 0.5, 0.3, 0.2});
  CHECK(std::abs(k.value()) < 1e-12);
}

TEST_CASE("box radii below the declared resolution are excluded") {
  const FiniteMetricSpace g = real_grid(0.0, 1.0, 0.01);
  const KolmogorovResult k = kolmogorov_dimension(g, 50, 1.0, {0.2, 0.1, 0.05, 0.03, 0.02, 0.005});
  CHECK(k.r_excluded == std::vector<double>{0.005});
  CHECK(k.value() == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("volume growth matches the covering exponent on Z^2") {
  const FiniteMetricSpace s = lattice(2, 200, Norm::sup);
  VolumeOptions v;
  v.points_per_octave = 2.0;
  const VolumeResult vol = volume_dimension(s, (s.size() - 1) / 2, v);
  CHECK(vol.uniformly_bounded);
  CHECK(vol.value() == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("axioms on the axes of Z^2 and the product Z x Z") {
  const Index E = 300, side = 2 * E + 1;
  const FiniteMetricSpace plane = lattice(2, E, Norm::sup);
  IndexList x_axis, y_axis;
  for (Index t = 0; t < side; ++t) x_axis.push_back(t * side + E), y_axis.push_back(E * side + t);
  AsymptoticOptions o;
  o.points_per_octave = 2.0;
  const Index c = E * side + E;
  const AxiomReport ax = axiom_suite(plane, x_axis, y_axis, {c, c, c}, o);
  CHECK(ax.union_max);
  CHECK(ax.monotone);

  AsymptoticOptions p;
  p.r_values = {0.5, 1.0, 2.0};
  p.points_per_octave = 2.0;
  const FiniteMetricSpace z = lattice(1, 100, Norm::sup);
  const ProductReport pr = product_axiom(z, z, 100, 100, p, p);
  CHECK(pr.subadditive);
  CHECK(pr.additive);
}

TEST_CASE("effective R grid stops at half the eccentricity") {
  double cap = 0.0;
  const FiniteMetricSpace z = lattice(1, 100, Norm::sup);
  const auto g = effective_R_grid(z, 100, {}, 4.0, 1.0, true, cap);
  CHECK(cap == 50.0);
  CHECK(g.front() == 4.0);
  CHECK(g.back() <= 50.0);
}
