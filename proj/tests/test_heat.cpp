#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "asdim/errors.hpp"
#include "asdim/heat.hpp"
#include "asdim/spaces.hpp"

using namespace asdim;

namespace {

// Cycle C_n: eigenvalues 2 - 2 cos(2 pi k / n); p_t(x,x) is their average.
double cycle_diag(Index n, double t) {
  double s = 0.0;
  for (Index k = 0; k < n; ++k) s += std::exp(-t * (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n)));
  return s / n;
}

Eigen::VectorXd times(std::initializer_list<double> v) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) t[i++] = x;
  return t;
}

}  // namespace

TEST_CASE("spectral diagonal of the cycle matches the closed form") {
  const Index n = 64;
  const HeatModel m = HeatModel::spectral(torus(1, n));
  const Eigen::VectorXd t = times({0.5, 4.0, 40.0});
  const Eigen::VectorXd d = m.diagonal(5, t);
  for (Eigen::Index i = 0; i < t.size(); ++i) CHECK(d[i] == doctest::Approx(cycle_diag(n, t[i])).epsilon(1e-10));
  const Eigen::VectorXd tr = m.full_trace(t);
  CHECK(tr[1] == doctest::Approx(n * cycle_diag(n, 4.0)).epsilon(1e-10));
}

TEST_CASE("spectral cap") {
  CHECK_THROWS_AS(HeatModel::spectral(torus(1, 100), 50), ResourceError);
}

TEST_CASE("product model multiplies the factor diagonals") {
  const HeatModel a = HeatModel::spectral(torus(1, 12));
  const HeatModel p = HeatModel::product(a, a);
  const HeatModel direct = HeatModel::spectral(torus(2, 12));
  const Eigen::VectorXd t = times({1.0, 3.0, 9.0});
  for (Index x : {0, 13, 143}) {
    const Eigen::VectorXd dp = p.diagonal(x, t), dd = direct.diagonal(x, t);
    for (Eigen::Index i = 0; i < t.size(); ++i) CHECK(dp[i] == doctest::Approx(dd[i]).epsilon(1e-10));
  }
  CHECK(p.full_trace(t)[2] == doctest::Approx(direct.full_trace(t)[2]).epsilon(1e-9));
}

TEST_CASE("Lanczos quadrature agrees with a dense exponential") {
  const FiniteMetricSpace g = grid_graph(2, 6);
  const auto L = graph_laplacian(*g.graph());
  const Eigen::MatrixXd dense = L;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(L.rows());
  v[20] = 1.0;
  const Eigen::VectorXd t = times({0.1, 2.0, 30.0});
  const Eigen::VectorXd got = lanczos_quadrature(L, v, t, KrylovOptions{});
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const Eigen::VectorXd w = es.eigenvectors().transpose() * v;
    const double want = (w.array().square() * (-t[i] * es.eigenvalues().array()).exp()).sum();
    CHECK(got[i] == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("Krylov diagonals match spectral ones") {
  const FiniteMetricSpace c = torus(1, 200);
  const HeatModel s = HeatModel::spectral(c), k = HeatModel::krylov(c);
  const Eigen::VectorXd t = times({1.0, 10.0, 100.0});
  const Eigen::VectorXd a = s.diagonal(3, t), b = k.diagonal(3, t);
  for (Eigen::Index i = 0; i < t.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-6));
}

TEST_CASE("Hutchinson trace is unbiased within its error bars and seeded") {
  const FiniteMetricSpace c = torus(1, 256);
  const HeatModel k = HeatModel::krylov(c);
  IndexList support(100);
  for (Index i = 0; i < 100; ++i) support[i] = i;
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(100, 0.01);
  const Eigen::VectorXd t = times({5.0, 50.0});
  const StochasticTrace a = k.stochastic_trace(support, w, t, 64, 3);
  const StochasticTrace b = k.stochastic_trace(support, w, t, 64, 3);
  CHECK(a.mean == b.mean);
  for (Eigen::Index i = 0; i < t.size(); ++i)
    CHECK(std::abs(a.mean[i] - cycle_diag(256, t[i])) <= 4.0 * a.std_error[i] + 1e-12);
}

TEST_CASE("Novikov-Shubin exponent of a synthetic trace") {
  TimeWindow w{4.0, 4000.0};
  const Eigen::VectorXd t = time_grid(w, 2.0);
  const Eigen::VectorXd tr = (t.array().pow(-0.75) * 2.0).matrix();
  const NovikovShubin ns = novikov_shubin(t, tr, w.t_lo, w.t_hi);
  CHECK(ns.alpha0 == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(ns.monotone);
  CHECK_THROWS_AS(novikov_shubin(t, tr, 4.0, 40.0), ScaleError);
}

TEST_CASE("usable window") {
  const TimeWindow w = usable_window(800.0);
  CHECK(w.t_lo == 4.0);
  CHECK(w.t_hi == 10000.0);
  CHECK(w.decades() == doctest::Approx(std::log10(2500.0)));
}

TEST_CASE("exhaustion on the cycle: exact diagonals are translation invariant") {
  const FiniteMetricSpace c = torus(1, 512);
  const HeatModel m = HeatModel::spectral(c);
  const Eigen::VectorXd t = times({4.0, 64.0, 1024.0});
  const HeatTraceCurve curve = exhaustion_trace(m, c, 0, {16.0, 32.0, 64.0, 128.0}, t);
  CHECK_FALSE(curve.stochastic);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    CHECK(curve.trace[i] == doctest::Approx(cycle_diag(512, t[i])).epsilon(1e-9));
    CHECK(curve.spread[i] < 1e-9);
  }
  CHECK_THROWS_AS(exhaustion_trace(m, c, 0, {300.0}, t), ScaleError);
}

TEST_CASE("regular exhaustion of Z: |Pen+| / |Pen-| = (2 rho + 2 r - 1) / (2 rho - 2 r - 1)") {
  const FiniteMetricSpace z = lattice(1, 1000, Norm::sup);
  const ExhaustionReport rep = regular_exhaustion_check(z, 1000, {20.0, 40.0, 80.0, 160.0}, {2.0});
  REQUIRE(rep.rows.size() == 4);
  for (const auto& row : rep.rows) {
    // K = B(o, rho) open: 2 rho - 1 points. Closed r-neighbourhoods add or remove r per side.
    CHECK(row.pen_plus == 2 * row.rho - 1 + 2 * row.r);
    CHECK(row.pen_minus == 2 * row.rho - 1 - 2 * row.r);
  }
  CHECK(rep.approaches_one);
}

TEST_CASE("doubling constant of Z^2 balls") {
  const FiniteMetricSpace s = lattice(2, 50, Norm::sup);
  const Index o = (s.size() - 1) / 2;
  // Open sup balls: (2 ceil(r) - 1)^2 points; V(4)/V(2) = 49/9.
  CHECK(doubling_constant(s, {o}, {2.0}) == doctest::Approx(49.0 / 9.0));
}
