#include <doctest.h>

#include <cmath>
#include <numbers>

#include "asdim/end_profile.hpp"
#include "asdim/errors.hpp"

using namespace asdim;

namespace {

constexpr double pi = std::numbers::pi;

// Composite Simpson on [lo, hi]; an oracle independent of the library's quadrature.
template <class F>
double simpson(F f, double lo, double hi, int n = 20000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("sphere volumes and caps") {
  CHECK(sphere_volume(2) == doctest::Approx(2 * pi));
  CHECK(sphere_volume(3) == doctest::Approx(4 * pi));
  CHECK(sphere_volume(4) == doctest::Approx(2 * pi * pi));
  CHECK(sphere_cap_volume(2, 0.7) == doctest::Approx(1.4));
  CHECK(sphere_cap_volume(3, 0.7) == doctest::Approx(2 * pi * (1 - std::cos(0.7))));
  CHECK(sphere_cap_volume(3, 4.0) == doctest::Approx(4 * pi));
}

TEST_CASE("Davies volume: closed form against Simpson and the quadrature fallback") {
  for (auto [N, D] : {std::pair{2, 2.0}, std::pair{2, 3.0}, std::pair{3, 5.0}}) {
    const EndProfile p = davies_end(N, D);
    const double e = (D - 1.0) / (N - 1);
    const EndProfile numeric = sphere_end("numeric", N, [e](double x) { return std::pow(x, e); });
    for (double r : {1.0, 10.0, 250.0}) {
      const double want = sphere_volume(N) * simpson([&](double x) { return std::pow(std::pow(x, e), N - 1); }, 1.0, 1.0 + r);
      CHECK(end_volume(p, r) == doctest::Approx(want).epsilon(1e-9));
      CHECK(end_volume(numeric, r) == doctest::Approx(want).epsilon(1e-8));
    }
  }
}

TEST_CASE("log end primitive") {
  const EndProfile p = log_end();
  for (double x : {2.0, 30.0, 900.0})
    CHECK(p.primitive(x) == doctest::Approx(simpson(p.f, 1.0, x)).epsilon(1e-9));
}

TEST_CASE("power-law envelope separates Davies from the log end") {
  for (auto [N, D] : {std::pair{2, 2.0}, std::pair{2, 3.0}, std::pair{3, 5.0}}) {
    const EnvelopeFit fit = power_law_envelope(davies_end(N, D), 10.0, 1e4);
    CHECK(fit.single_power_law);
    CHECK(fit.estimate.slope == doctest::Approx(D).epsilon(0.02));
  }
  const EnvelopeFit log_fit = power_law_envelope(log_end(), 10.0, 1e4);
  CHECK_FALSE(log_fit.single_power_law);
  CHECK_THROWS_AS(power_law_envelope(log_end(), 10.0, 500.0), DomainError);
}

TEST_CASE("ball volume bounds bracket a direct integral on a Davies end") {
  const EndProfile p = davies_end(2, 3.0);  // f(x) = x^2 over S^1
  const double x0 = 50.0, r = 4.0;
  const auto [lo, hi] = end_ball_volume_bounds(p, x0, r);
  CHECK(lo < hi);
  // Product box [x0 - r/2, x0 + r/2] x arc of half-width (r/2)/f(x0 + r/2).
  const double inner = simpson([&](double x) { return p.f(x) * 2.0 * (r / 2) / p.f(x0 + r / 2); },
                               x0 - r / 2, x0 + r / 2);
  CHECK(lo == doctest::Approx(inner).epsilon(1e-8));
}

TEST_CASE("oscillating end: breakpoints and areas from direct sums") {
  const PiecewiseGrowthSpec spec{2.0, 1.3, 8};
  const OscillatingEnd end = oscillating_end(spec);
  REQUIRE(end.representable);
  double a = 0.0;
  for (int n = 1; n <= spec.breakpoints; ++n) {
    a += std::pow(2.0, std::pow(1.3, n));
    CHECK(end.a(n) == doctest::Approx(a).epsilon(1e-12));
  }
  CHECK(end.continuity_gap < 1e-9);
  // Analytic primitive at breakpoints against Simpson on f.
  for (int n = 2; n <= 5; ++n) {
    double s = 0.0;
    for (int p = 1; p <= n; ++p) s += simpson(end.profile.f, p == 1 ? 1.0 : end.a(p - 1), end.a(p), 4000);
    CHECK(std::exp(end.log_area[n]) == doctest::Approx(s).epsilon(1e-7));
  }
}

TEST_CASE("oscillating end with the (2, 2) constants matches the model areas") {
  const OscillatingEnd end = oscillating_end({2.0, 2.0, 6});
  for (int n = 3; n <= 6; ++n) CHECK(asymptotic_area_ratio(end, n) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("oscillation gap is positive for the (2, 1.3) preset") {
  const OscillationReport rep = oscillation_gap(oscillating_end({2.0, 1.3, 12}));
  CHECK(rep.gap > 0.1);
  CHECK(rep.estimate.upper > rep.estimate.lower);
}

TEST_CASE("discretised end carries the end's volume") {
  const EndProfile p = davies_end(2, 2.0);
  const FiniteMetricSpace s = discretize_end(p, 0.5, 40.0);
  CHECK(s.has_measure());
  CHECK(s.total_measure() == doctest::Approx(end_volume(p, 39.0)).epsilon(0.02));
}
