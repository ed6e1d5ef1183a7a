#include <doctest.h>

#include <cmath>
#include <numbers>

#include "asdim/errors.hpp"
#include "asdim/estimator.hpp"
#include "asdim/spaces.hpp"

using namespace asdim;

TEST_CASE("lattice patch sizes") {
  CHECK(lattice(1, 10, Norm::sup).size() == 21);
  CHECK(lattice(3, 4, Norm::l1).size() == 729);
  CHECK_THROWS_AS(lattice(3, 1000, Norm::sup, 1000), ResourceError);
}

TEST_CASE("torus distance wraps around") {
  const FiniteMetricSpace c = torus(1, 10);
  CHECK(c.distance(0, 9) == 1.0);
  CHECK(c.distance(2, 7) == 5.0);
  const FiniteMetricSpace t = torus(2, 8);
  // (0,0) to (7,5): wrap distances 1 and 3.
  CHECK(t.distance(0, 7 * 8 + 5) == 4.0);
  REQUIRE(t.graph() != nullptr);
  CHECK(t.graph()->edge_count() == 2u * 64u);
}

TEST_CASE("grid graph hop distance is the l1 distance") {
  const Index E = 5, side = 2 * E + 1;
  const FiniteMetricSpace g = grid_graph(2, E);
  for (Index i = 0; i < g.size(); i += 7)
    for (Index j = 0; j < g.size(); j += 5)
      CHECK(g.distance(i, j) == std::abs(i / side - j / side) + std::abs(i % side - j % side));
}

TEST_CASE("real grid spacing and resolution") {
  const FiniteMetricSpace g = real_grid(-1.0, 1.0, 0.25);
  CHECK(g.size() == 9);
  CHECK(g.distance(0, 8) == doctest::Approx(2.0));
  CHECK(g.metadata().resolution == 0.25);
}

TEST_CASE("unit ball sample lies in the open ball and is seeded") {
  const FiniteMetricSpace a = unit_ball_sample(400, 3, 9), b = unit_ball_sample(400, 3, 9);
  const auto* pa = point_coordinates(a);
  REQUIRE(pa != nullptr);
  CHECK(pa->rowwise().norm().maxCoeff() < 1.0);
  CHECK(*pa == *point_coordinates(b));
  CHECK_FALSE(*pa == *point_coordinates(unit_ball_sample(400, 3, 10)));
}

TEST_CASE("disk union points lie in their disks") {
  for (auto sampling : {DiskSampling::uniform, DiskSampling::grid}) {
    const FiniteMetricSpace s = disk_union(-3, 3, 500, 2, sampling);
    const auto* p = point_coordinates(s);
    REQUIRE(p != nullptr);
    CHECK(std::abs(s.size() - 7 * 500) <= 7 * 50);
    for (Index i = 0; i < s.size(); ++i) {
      const double dx = (*p)(i, 0) - std::round((*p)(i, 0)), dy = (*p)(i, 1);
      CHECK(std::hypot(dx, dy) < 0.25);
    }
    const double area = std::numbers::pi / 16.0;
    CHECK(s.metadata().resolution == doctest::Approx(std::sqrt(area / 500)));
  }
}

TEST_CASE("spiral regions: area inside radius R grows like R^2") {
  const SpiralRegions sp = spiral_regions(20.0, 0.2);
  CHECK(sp.x.size() + sp.y.size() <= sp.ambient.size());
  // Pixel-count oracle: the two regions fill the disk up to the curves.
  const double disk_pixels = std::numbers::pi * 20.0 * 20.0 / 0.04;
  CHECK(static_cast<double>(sp.ambient.size()) == doctest::Approx(disk_pixels).epsilon(0.05));
  const auto* amb = point_coordinates(sp.ambient);
  REQUIRE(amb != nullptr);
  auto inside = [&](const IndexList& pts, double R) {
    Index n = 0;
    for (Index a : pts) n += amb->row(a).norm() < R;
    return static_cast<double>(n);
  };
  // Each region occupies about half of every large disk.
  for (double R : {8.0, 16.0}) {
    const double half = std::numbers::pi * R * R / 0.04 / 2.0;
    CHECK(inside(sp.x_points, R) == doctest::Approx(half).epsilon(0.2));
    CHECK(inside(sp.y_points, R) == doctest::Approx(half).epsilon(0.2));
  }
}

TEST_CASE("spiral regions are rough rays while their union is planar") {
  const SpiralRegions sp = spiral_regions(60.0, 0.5);
  AsymptoticOptions o;
  o.points_per_octave = 2.0;
  CHECK(asymptotic_dimension(sp.x, sp.x_origin, o).value() == doctest::Approx(1.0).epsilon(0.15));
  CHECK(asymptotic_dimension(sp.y, sp.y_origin, o).value() == doctest::Approx(1.0).epsilon(0.15));
  AsymptoticOptions a;
  a.r_values = {0.5, 1.0};
  a.points_per_octave = 4.0;
  CHECK(asymptotic_dimension(sp.ambient, sp.origin, a).value() == doctest::Approx(2.0).epsilon(0.075));
}
