#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "asdim/errors.hpp"
#include "asdim/kd_tree.hpp"
#include "asdim/metric_space.hpp"
#include "asdim/spaces.hpp"

using namespace asdim;

namespace {

Eigen::MatrixXd random_points(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd p(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) p(i, k) = u(rng);
  return p;
}

double norm_of(const Eigen::RowVectorXd& v, Norm norm) {
  switch (norm) {
    case Norm::euclidean: return v.norm();
    case Norm::sup: return v.cwiseAbs().maxCoeff();
    case Norm::l1: return v.cwiseAbs().sum();
  }
  return 0.0;
}

}  // namespace

TEST_CASE("point cloud balls match brute force for every norm") {
  const Eigen::MatrixXd p = random_points(600, 3, 5);
  for (Norm norm : {Norm::euclidean, Norm::sup, Norm::l1}) {
    const FiniteMetricSpace s = from_points(p, norm);
    for (Index c : {0, 17, 599})
      for (double r : {0.05, 0.3, 0.9, 3.0}) {
        IndexList got;
        s.ball_members(c, r, got);
        IndexList want;
        for (Index y = 0; y < 600; ++y)
          if (norm_of(p.row(y) - p.row(c), norm) < r) want.push_back(y);
        CHECK(got == want);
        IndexList unordered;
        s.ball_members_unordered(c, r, unordered);
        std::sort(unordered.begin(), unordered.end());
        CHECK(unordered == want);
      }
  }
}

TEST_CASE("kd-tree radius search is strict") {
  KdTree::Matrix p(3, 1);
  p << 0.0, 1.0, 2.0;
  KdTree tree(p, Norm::euclidean, 1);
  IndexList out;
  const double q = 0.0;
  tree.radius_search(&q, 1.0, out);
  CHECK(out == IndexList{0});
}

TEST_CASE("lattice distances are the sup and l1 norms of coordinate differences") {
  const Index E = 3, side = 2 * E + 1;
  for (Norm norm : {Norm::sup, Norm::l1}) {
    const FiniteMetricSpace s = lattice(2, E, norm);
    REQUIRE(s.size() == side * side);
    for (Index i = 0; i < s.size(); i += 5)
      for (Index j = 0; j < s.size(); j += 3) {
        const Index dx = std::abs(i / side - j / side), dy = std::abs(i % side - j % side);
        const double want = norm == Norm::sup ? std::max(dx, dy) : dx + dy;
        CHECK(s.distance(i, j) == want);
      }
    // Open ball radius 2 around the centre: 3x3 block (sup) or 5-point diamond (l1).
    CHECK(ball(s, (s.size() - 1) / 2, 2.0).members.size() == (norm == Norm::sup ? 9u : 5u));
  }
}

TEST_CASE("graph space distances are shortest paths") {
  // Path 0-1-2-3 with a heavy shortcut 0-3.
  std::vector<Edge> edges{{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 2.5}};
  const FiniteMetricSpace s = from_graph(Graph::from_edges(4, edges));
  CHECK(s.distance(0, 2) == 2.0);
  CHECK(s.distance(0, 3) == 2.5);
  CHECK(s.distance(1, 3) == 2.0);
  CHECK(s.eccentricity(0) == 2.5);
}

TEST_CASE("validate flags triangle and symmetry violations") {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  const ValidityReport bad = validate(from_matrix(d));
  CHECK_FALSE(bad.triangle);
  CHECK(bad.worst_triangle == doctest::Approx(3.0));
  d(0, 2) = d(2, 0) = 2;
  CHECK(validate(from_matrix(d)).ok());
  CHECK(validate(lattice(2, 4, Norm::l1)).ok());
}

TEST_CASE("validate reports asymmetric matrices") {
  Eigen::MatrixXd d(2, 2);
  d << 0, 1, 2, 0;
  const ValidityReport rep = validate(from_matrix(d));
  CHECK_FALSE(rep.symmetric);
  CHECK(rep.worst_symmetry == doctest::Approx(1.0));
}

TEST_CASE("product carries the max metric") {
  const FiniteMetricSpace x = lattice(1, 3, Norm::sup), y = real_grid(0.0, 2.0, 0.5);
  const FiniteMetricSpace xy = product(x, y);
  REQUIRE(xy.size() == x.size() * y.size());
  for (Index a = 0; a < xy.size(); a += 4)
    for (Index b = 0; b < xy.size(); b += 3) {
      const double want = std::max(x.distance(a / y.size(), b / y.size()),
                                   y.distance(a % y.size(), b % y.size()));
      CHECK(xy.distance(a, b) == doctest::Approx(want));
    }
}

TEST_CASE("subspace keeps ambient distances") {
  const FiniteMetricSpace z = lattice(1, 10, Norm::sup);
  const FiniteMetricSpace s = subspace(z, {15, 2, 7, 2});
  REQUIRE(s.size() == 3);
  CHECK(ambient_indices(s) == IndexList{2, 7, 15});
  CHECK(s.distance(0, 2) == 13.0);
  CHECK(local_index(s, 7) == 1);
  CHECK(local_index(s, 8) == -1);
}

TEST_CASE("uniform boundedness on Z: ball of radius r holds 2 ceil(r) - 1 points inside") {
  const FiniteMetricSpace z = lattice(1, 20, Norm::sup);
  const std::vector<double> radii{1.0, 2.5, 4.0};
  const auto rows = uniform_boundedness_report(z, radii);
  REQUIRE(rows.size() == 3);
  // beta2 is attained in the interior; beta1 at an end point.
  CHECK(rows[0].beta2 == 1.0);
  CHECK(rows[1].beta2 == 5.0);
  CHECK(rows[1].beta1 == 3.0);
  CHECK(rows[2].beta2 == 7.0);
  CHECK_FALSE(rows[2].degenerate);
}

TEST_CASE("measures are summed over points") {
  Eigen::VectorXd w(3);
  w << 0.5, 1.5, 2.0;
  const FiniteMetricSpace s = real_grid(0.0, 2.0, 1.0).with_measure(w);
  CHECK(s.total_measure() == doctest::Approx(4.0));
  const IndexList pts{0, 2};
  CHECK(s.measure_of(pts) == doctest::Approx(2.5));
}

TEST_CASE("invalid indices raise DomainError") {
  const FiniteMetricSpace z = lattice(1, 2, Norm::sup);
  CHECK_THROWS_AS(z.check_index(5), DomainError);
  CHECK_THROWS_AS(z.check_index(-1), DomainError);
}
