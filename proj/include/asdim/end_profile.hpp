#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "asdim/estimator.hpp"
#include "asdim/metric_space.hpp"

namespace asdim {

/// Volume of the unit sphere S^{N-1} (N >= 2).
double sphere_volume(int N);

/// Volume of a geodesic ball of radius rho in the unit sphere S^{N-1};
/// saturates at sphere_volume(N) for rho >= pi.
double sphere_cap_volume(int N, double rho);

/// Standard end (1, inf) x A with metric dx^2 + f(x)^2 dw^2 and volume
/// f(x)^{N-1} dx dvol_w.
struct EndProfile {
  std::string name;
  int N = 2;
  std::function<double(double)> f;
  /// x -> integral_1^x f^{N-1}; when empty, adaptive quadrature is used.
  std::function<double(double)> F;
  double volA = 0.0;
  double diamA = 0.0;
  /// Cross-section ball volume V_A(rho); defaults to the sphere cap.
  std::function<double(double)> cross_section_ball;
  /// Points where f is not smooth; quadrature splits there.
  std::vector<double> breakpoints;

  double primitive(double x) const;
  double fiber_diam(double x) const { return f(x) * diamA; }
  double section_ball(double rho) const;
};

/// Standard end with A = S^{N-1} and the given warping.
EndProfile sphere_end(std::string name, int N, std::function<double(double)> f,
                      std::function<double(double)> F = {});

/// f(x) = x^{(D-1)/(N-1)}, vol(E_r) = volA ((1+r)^D - 1) / D.
EndProfile davies_end(int N, double D);
/// f = 1: flat cylinder [1, inf) x S^{N-1}.
EndProfile cylinder_end(int N = 2);
/// f(x) = (x^2 log x)' = 2x log x + x over S^1.
EndProfile log_end();

/// vol(E_r) = volA * F(1 + r).
double end_volume(const EndProfile& profile, double r);

/// Two-sided bounds on vol B_E((x0, p0), r) for increasing f:
///   [x0 - r/2, x0 + r/2] x B_A(p0, (r/2) / f(x0 + r/2))  inside the ball,
///   the ball inside [x0 - r, x0 + r] x B_A(p0, r / f(x0 - r)).
/// Requires 0 < r < x0 - 1.
std::pair<double, double> end_ball_volume_bounds(const EndProfile& profile, double x0, double r);

/// vol(E_r) sampled on a geometric r grid (volume curve).
GrowthCurve end_volume_curve(const EndProfile& profile, double r_lo, double r_hi,
                             double points_per_octave = 4.0);

/// Single power-law check over [r_lo, r_hi] (at least two decades).
///
/// Local exponents s = d log vol / d log r at r_hi/100, r_hi/10 and r_hi.
/// Under a power-law envelope C1 r^D <= vol <= C2 r^D with polynomial
/// corrections, s settles geometrically (successive decade increments shrink
/// about tenfold); logarithmic factors make it creep. `settling` is the
/// ratio of the last increment to the one before.
struct EnvelopeFit {
  DimensionEstimate estimate;  // tail-window fit of the volume curve
  std::array<double, 3> local{};
  double settling = 0.0;
  bool single_power_law = false;
};

constexpr double kEnvelopeSettlingLimit = 0.3;

EnvelopeFit power_law_envelope(const EndProfile& profile, double r_lo, double r_hi,
                               double points_per_octave = 4.0,
                               double settling_limit = kEnvelopeSettlingLimit);

/// (B, c) replaces the (2, 2) of a_n - a_{n-1} = 2^{2^n}.
struct PiecewiseGrowthSpec {
  double base = 2.0;
  double exponent = 1.3;
  int breakpoints = 12;
};

/// The oscillating warping over S^1:
///   f = sqrt(x)                          on [1, a_1]
///   f = K + b_{n-1} + c_{n-1} + (x - a_{2n-1})      on [a_{2n-1}, a_{2n}]
///   f = K + b_{n-1} + c_n + sqrt(x - a_{2n} + 1)    on [a_{2n}, a_{2n+1}]
/// with K = sqrt(a_1), a_0 = 0, a_n - a_{n-1} = B^{c^n},
/// b_n = sum_{k<=n} sqrt(B^{c^{2k+1}} + 1), c_n = sum_{k<=n} (B^{c^{2k}} - 1).
/// Sequences are held as logarithms; log_area[n] = log integral_1^{a_n} f.
struct OscillatingEnd {
  PiecewiseGrowthSpec spec;
  std::vector<double> log_a;     // n = 0..breakpoints (log a_0 = -inf)
  std::vector<double> log_b;     // n = 0..breakpoints/2
  std::vector<double> log_c;
  std::vector<double> log_area;  // n = 0..breakpoints (log_area[0] unused)
  /// f and F in double precision; only set when a_n and the areas fit.
  bool representable = false;
  EndProfile profile;
  double continuity_gap = 0.0;  // worst relative jump of f at a_n

  double a(int n) const;
};

OscillatingEnd oscillating_end(const PiecewiseGrowthSpec& spec);

/// limsup / liminf of log vol(E_r) / log r over the tail of a geometric grid
/// up to a_K refined with every breakpoint. Needs a representable profile.
struct OscillationReport {
  DimensionEstimate estimate;
  GrowthCurve curve;
  double gap = 0.0;  // upper - lower
};
OscillationReport oscillation_gap(const OscillatingEnd& end, double points_per_octave = 4.0,
                                  double tail_fraction = 0.5);

/// integral_1^{a_n} f over the model asymptotics: 1/2 a_n^2 for even n (end
/// of a linear piece), 5/3 a_n^{3/2} for odd n; evaluated in log-domain.
double asymptotic_area_ratio(const OscillatingEnd& end, int n);

/// Discretisation of an N = 2 end on x in (1, x_max]: rings at
/// x_i = 1 + (i + 1/2) step carrying ceil(2 pi f(x_i) / step) points, joined
/// along rings and to the two nearest points of the next ring, with edge
/// lengths from the warped metric. Point measure f(x_i) step dw.
FiniteMetricSpace discretize_end(const EndProfile& profile, double step, double x_max,
                                 Index cap = 2'000'000);

}  // namespace asdim
