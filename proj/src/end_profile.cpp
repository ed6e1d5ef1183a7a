#include "asdim/end_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "asdim/errors.hpp"
#include "asdim/numeric.hpp"

namespace asdim {

double sphere_volume(int N) {
  if (N < 2) throw DomainError("sphere volume: N >= 2 required");
  return 2.0 * std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0);
}

double sphere_cap_volume(int N, double rho) {
  if (N < 2) throw DomainError("sphere cap: N >= 2 required");
  if (!(rho > 0.0)) return 0.0;
  const double r = std::min(rho, std::numbers::pi);
  if (N == 2) return 2.0 * r;
  if (N == 3) return 2.0 * std::numbers::pi * (1.0 - std::cos(r));
  const auto q = integrate([N](double t) { return std::pow(std::sin(t), N - 2); }, 0.0, r);
  return sphere_volume(N - 1) * q.value;
}

double EndProfile::primitive(double x) const {
  if (x < 1.0) throw DomainError("end profile: x must be >= 1");
  if (F) return F(x);
  auto g = [this](double s) { return std::pow(f(s), N - 1); };
  double total = 0.0, lo = 1.0;
  for (double b : breakpoints) {
    if (b <= lo) continue;
    if (b >= x) break;
    total += integrate(g, lo, b, 1e-12).value;
    lo = b;
  }
  return total + integrate(g, lo, x, 1e-12).value;
}

double EndProfile::section_ball(double rho) const {
  if (cross_section_ball) return std::min(cross_section_ball(rho), volA);
  return std::min(sphere_cap_volume(N, rho), volA);
}

EndProfile sphere_end(std::string name, int N, std::function<double(double)> f,
                      std::function<double(double)> F) {
  if (N < 2) throw DomainError("end profile: N >= 2 required");
  EndProfile p;
  p.name = std::move(name);
  p.N = N;
  p.f = std::move(f);
  p.F = std::move(F);
  p.volA = sphere_volume(N);
  p.diamA = std::numbers::pi;
  return p;
}

EndProfile davies_end(int N, double D) {
  if (!(D >= 1.0)) throw DomainError("davies end: D >= 1 required");
  const double e = (D - 1.0) / (N - 1);
  return sphere_end("davies(N=" + std::to_string(N) + ",D=" + std::to_string(D) + ")", N,
                    [e](double x) { return std::pow(x, e); },
                    [D](double x) { return (std::pow(x, D) - 1.0) / D; });
}

EndProfile cylinder_end(int N) {
  return sphere_end("cylinder", N, [](double) { return 1.0; }, [](double x) { return x - 1.0; });
}

EndProfile log_end() {
  return sphere_end(
      "log", 2, [](double x) { return 2.0 * x * std::log(x) + x; },
      [](double x) { return x * x * std::log(x); });
}

double end_volume(const EndProfile& profile, double r) {
  if (!(r > 0.0)) throw DomainError("end volume: r must be positive");
  return profile.volA * profile.primitive(1.0 + r);
}

std::pair<double, double> end_ball_volume_bounds(const EndProfile& profile, double x0, double r) {
  if (!(r > 0.0) || !(r < x0 - 1.0))
    throw DomainError("end ball bounds: need 0 < r < x0 - 1");
  const double h = r / 2.0;
  const double lower = (profile.primitive(x0 + h) - profile.primitive(x0 - h)) *
                       profile.section_ball(h / profile.f(x0 + h));
  const double upper = (profile.primitive(x0 + r) - profile.primitive(x0 - r)) *
                       profile.section_ball(r / profile.f(x0 - r));
  return {lower, upper};
}

GrowthCurve end_volume_curve(const EndProfile& profile, double r_lo, double r_hi,
                             double points_per_octave) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw DomainError("end volume curve: need 0 < r_lo < r_hi");
  GrowthCurve curve;
  curve.kind = CurveKind::volume;
  curve.scale = geometric_grid(r_lo, r_hi, points_per_octave);
  curve.value = curve.scale.unaryExpr([&](double r) { return end_volume(profile, r); });
  return curve;
}

EnvelopeFit power_law_envelope(const EndProfile& profile, double r_lo, double r_hi,
                               double points_per_octave, double settling_limit) {
  if (!(r_hi >= 100.0 * r_lo)) throw DomainError("power-law envelope: need two decades of r");
  EnvelopeFit fit;
  fit.estimate = exponent_from_curve(end_volume_curve(profile, r_lo, r_hi, points_per_octave));
  auto local = [&](double r) {
    constexpr double h = 1e-4;
    const double up = std::log(end_volume(profile, r * std::exp(h)));
    const double down = std::log(end_volume(profile, r * std::exp(-h)));
    return (up - down) / (2.0 * h);
  };
  fit.local = {local(r_hi / 100.0), local(r_hi / 10.0), local(r_hi)};
  const double first = std::abs(fit.local[1] - fit.local[0]);
  const double second = std::abs(fit.local[2] - fit.local[1]);
  fit.settling = first > 0.0 ? second / first : 0.0;
  fit.single_power_law = second <= 1e-9 || second <= settling_limit * first;
  return fit;
}

double OscillatingEnd::a(int n) const { return std::exp(log_a.at(static_cast<std::size_t>(n))); }

OscillatingEnd oscillating_end(const PiecewiseGrowthSpec& spec) {
  if (!(spec.base > 1.0) || !(spec.exponent > 1.0) || spec.breakpoints < 2)
    throw DomainError("oscillating end: need B > 1, c > 1 and at least 2 breakpoints");
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  const int K = spec.breakpoints;
  const double lnB = std::log(spec.base);
  auto g = [&](int n) { return std::pow(spec.exponent, n) * lnB; };  // log B^{c^n}
  if (!std::isfinite(g(2 * (K / 2) + 1)))
    throw DomainError("oscillating end: B^{c^n} not representable in log-domain");

  OscillatingEnd out;
  out.spec = spec;
  out.log_a.assign(K + 1, ninf);
  for (int n = 1; n <= K; ++n) out.log_a[n] = log_add_exp(out.log_a[n - 1], g(n));
  const int M = K / 2 + 1;
  out.log_b.assign(M + 1, ninf);
  out.log_c.assign(M + 1, ninf);
  for (int n = 1; n <= M; ++n) {
    out.log_b[n] = log_add_exp(out.log_b[n - 1], 0.5 * log_add_exp(g(2 * n + 1), 0.0));
    out.log_c[n] = log_add_exp(out.log_c[n - 1], log_sub_exp(g(2 * n), 0.0));
  }
  const double log_k0 = 0.5 * out.log_a[1];

  // log of the constant term of piece p on [a_{p-1}, a_p], p >= 2.
  auto log_kp = [&](int p) {
    const int m = p / 2;
    const double lb = out.log_b[m - 1];
    const double lc = out.log_c[p % 2 == 0 ? m - 1 : m];
    return log_add_exp(log_add_exp(log_k0, lb), lc);
  };

  out.log_area.assign(K + 1, ninf);
  out.log_area[1] = std::log(2.0 / 3.0) + log_sub_exp(1.5 * out.log_a[1], 0.0);
  for (int p = 2; p <= K; ++p) {
    const double lL = g(p);
    const double piece =
        p % 2 == 0 ? log_add_exp(log_kp(p) + lL, 2.0 * lL - std::log(2.0))
                   : log_add_exp(log_kp(p) + lL, std::log(2.0 / 3.0) +
                                                     log_sub_exp(1.5 * log_add_exp(lL, 0.0), 0.0));
    out.log_area[p] = log_add_exp(out.log_area[p - 1], piece);
  }

  out.representable = out.log_a[K] < 300.0;
  if (!out.representable) return out;

  std::vector<double> a(K + 1), kp(K + 1, 0.0), area(K + 1, 0.0);
  for (int n = 0; n <= K; ++n) a[n] = n == 0 ? 0.0 : std::exp(out.log_a[n]);
  for (int p = 2; p <= K; ++p) kp[p] = std::exp(log_kp(p));
  for (int p = 1; p <= K; ++p) area[p] = std::exp(out.log_area[p]);

  auto piece_f = [a, kp](int p, double x) {
    if (p == 1) return std::sqrt(x);
    return p % 2 == 0 ? kp[p] + (x - a[p - 1]) : kp[p] + std::sqrt(x - a[p - 1] + 1.0);
  };
  auto piece_of = [a, K](double x) {
    if (x < 1.0 || x > a[K]) throw DomainError("oscillating end: x outside [1, a_K]");
    const auto it = std::lower_bound(a.begin() + 1, a.end(), x);
    return std::max(1, static_cast<int>(it - a.begin()));
  };
  for (int n = 1; n < K; ++n) {
    const double left = piece_f(n, a[n]), right = piece_f(n + 1, a[n]);
    out.continuity_gap = std::max(out.continuity_gap, std::abs(left - right) / right);
  }
  if (out.continuity_gap > 1e-9)
    throw DomainError("oscillating end: inconsistent breakpoints (f jumps by " +
                      std::to_string(out.continuity_gap) + ")");

  auto f = [piece_f, piece_of](double x) { return piece_f(piece_of(x), x); };
  auto F = [a, kp, area, piece_of](double x) {
    const int p = piece_of(x);
    if (p == 1) return (2.0 / 3.0) * (std::pow(x, 1.5) - 1.0);
    const double L = x - a[p - 1];
    const double part = p % 2 == 0 ? kp[p] * L + 0.5 * L * L
                                   : kp[p] * L + (2.0 / 3.0) * (std::pow(L + 1.0, 1.5) - 1.0);
    return area[p - 1] + part;
  };
  out.profile = sphere_end("oscillating(B=" + std::to_string(spec.base) +
                               ",c=" + std::to_string(spec.exponent) + ")",
                           2, f, F);
  out.profile.breakpoints.assign(a.begin() + 1, a.end());
  return out;
}

OscillationReport oscillation_gap(const OscillatingEnd& end, double points_per_octave,
                                  double tail_fraction) {
  if (!end.representable) throw DomainError("oscillation gap: profile not representable");
  const int K = end.spec.breakpoints;
  // r = x - 1 on the end; stop short of a_K where the profile ends.
  const double r_hi = end.a(K) - 1.0;
  const Eigen::VectorXd g = geometric_grid(2.0, r_hi, points_per_octave);
  std::vector<double> r(g.data(), g.data() + g.size());
  for (int n = 1; n <= K; ++n)
    if (end.a(n) - 1.0 > 2.0) r.push_back(end.a(n) - 1.0);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end(), [](double u, double v) { return v - u <= 1e-9 * v; }),
          r.end());
  if (r.back() > r_hi) r.back() = r_hi;
  OscillationReport report;
  report.curve.kind = CurveKind::volume;
  report.curve.scale = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
  report.curve.value = report.curve.scale.unaryExpr([&](double s) { return end_volume(end.profile, s); });
  report.estimate = exponent_from_curve(report.curve, tail_fraction, 0.0);
  report.gap = report.estimate.upper - report.estimate.lower;
  return report;
}

double asymptotic_area_ratio(const OscillatingEnd& end, int n) {
  if (n < 1 || n >= static_cast<int>(end.log_area.size()))
    throw DomainError("area ratio: breakpoint index out of range");
  const double la = end.log_a[static_cast<std::size_t>(n)];
  const double model = n % 2 == 0 ? std::log(0.5) + 2.0 * la : std::log(5.0 / 3.0) + 1.5 * la;
  return std::exp(end.log_area[static_cast<std::size_t>(n)] - model);
}

FiniteMetricSpace discretize_end(const EndProfile& profile, double step, double x_max, Index cap) {
  if (profile.N != 2) throw DomainError("discretize end: only N = 2 ends are supported");
  if (!(step > 0.0) || !(x_max > 1.0 + step)) throw DomainError("discretize end: bad step or range");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (step > two_pi * profile.f(1.0) / 4.0)
    throw DomainError("discretize end: step exceeds a quarter of the fiber circumference");

  const auto rings = static_cast<Index>(std::floor((x_max - 1.0) / step));
  std::vector<double> xs(rings);
  std::vector<Index> count(rings), offset(rings + 1, 0);
  for (Index i = 0; i < rings; ++i) {
    xs[i] = 1.0 + (i + 0.5) * step;
    count[i] = std::max<Index>(3, static_cast<Index>(std::ceil(two_pi * profile.f(xs[i]) / step)));
    offset[i + 1] = offset[i] + count[i];
    if (offset[i + 1] > cap)
      throw ResourceError("discretize end: more than " + std::to_string(cap) + " points");
  }
  const Index n = offset[rings];
  Eigen::VectorXd measure(n);
  std::vector<Edge> edges;
  for (Index i = 0; i < rings; ++i) {
    const double fi = profile.f(xs[i]);
    const double dw = two_pi / count[i];
    for (Index k = 0; k < count[i]; ++k) {
      const Index v = offset[i] + k;
      measure[v] = fi * step * dw;
      edges.push_back({v, offset[i] + (k + 1) % count[i], fi * dw});
      if (i + 1 == rings) continue;
      const double theta = k * dw;
      const double fm = profile.f(xs[i] + step / 2.0);
      const Index m = count[i + 1];
      const double dw1 = two_pi / m;
      const auto j = static_cast<Index>(std::floor(theta / dw1));
      for (Index jj : {j % m, (j + 1) % m}) {
        double dtheta = std::abs(theta - jj * dw1);
        dtheta = std::min(dtheta, two_pi - dtheta);
        edges.push_back({v, offset[i + 1] + jj, std::hypot(step, fm * dtheta)});
      }
    }
  }
  SpaceMetadata meta;
  meta.name = "discretized-" + profile.name;
  meta.resolution = step;
  meta.params["step"] = std::to_string(step);
  meta.params["x_max"] = std::to_string(x_max);
  return from_graph(Graph::from_edges(n, edges), meta).with_measure(std::move(measure));
}

}  // namespace asdim
