#pragma once

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "asdim/errors.hpp"

namespace asdim {

template <typename Scalar>
struct LineFit {
  Scalar slope = 0;
  Scalar intercept = 0;
  Scalar max_residual = 0;
};

/// Ordinary least squares y ~ intercept + slope * x.
template <typename DX, typename DY>
LineFit<typename DX::Scalar> fit_line(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  using Scalar = typename DX::Scalar;
  const Eigen::Index n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("fit_line needs two or more paired samples");
  const Scalar mx = x.mean();
  const Scalar my = y.mean();
  const auto dx = (x.array() - mx).eval();
  const Scalar sxx = dx.square().sum();
  LineFit<Scalar> fit;
  fit.slope = sxx > 0 ? (dx * (y.array() - my)).sum() / sxx : Scalar(0);
  fit.intercept = my - fit.slope * mx;
  fit.max_residual = (y.array() - (fit.intercept + fit.slope * x.array())).abs().maxCoeff();
  return fit;
}

template <typename Scalar>
Scalar log_add_exp(Scalar a, Scalar b) {
  if (a == -std::numeric_limits<Scalar>::infinity()) return b;
  if (b == -std::numeric_limits<Scalar>::infinity()) return a;
  const Scalar hi = a > b ? a : b;
  return hi + std::log1p(std::exp(-(a > b ? a - b : b - a)));
}

template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) return -std::numeric_limits<Scalar>::infinity();
  const Scalar hi = v.maxCoeff();
  if (!std::isfinite(hi)) return hi;
  return hi + std::log((v.derived().array() - hi).exp().sum());
}

/// log(exp(a) - exp(b)) for a >= b.
template <typename Scalar>
Scalar log_sub_exp(Scalar a, Scalar b) {
  if (b > a) throw DomainError("log_sub_exp: negative difference");
  if (b == -std::numeric_limits<Scalar>::infinity()) return a;
  return a + std::log(-std::expm1(b - a));
}

/// Geometric grid lo * 2^(k / per_octave), k = 0, 1, ..., while <= hi.
inline Eigen::VectorXd geometric_grid(double lo, double hi, double per_octave) {
  if (!(lo > 0) || !(hi >= lo) || !(per_octave > 0)) throw DomainError("invalid geometric grid");
  const auto count = static_cast<Eigen::Index>(std::floor(per_octave * std::log2(hi / lo) + 1e-9)) + 1;
  Eigen::VectorXd g(count);
  for (Eigen::Index k = 0; k < count; ++k) g[k] = lo * std::exp2(static_cast<double>(k) / per_octave);
  return g;
}

template <typename Scalar>
struct Quadrature {
  Scalar value = 0;
  Scalar error = 0;
  int intervals = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes on [-1, 1]; the Gauss nodes are the odd entries.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar, typename F>
std::pair<Scalar, Scalar> gk15(F& f, Scalar a, Scalar b) {
  const Scalar c = (a + b) / 2, h = (b - a) / 2;
  const Scalar fc = f(c);
  Scalar k = fc * Scalar(kWgk[7]);
  Scalar g = fc * Scalar(kWg[3]);
  for (int j = 0; j < 7; ++j) {
    const Scalar dx = h * Scalar(kXgk[j]);
    const Scalar s = f(c - dx) + f(c + dx);
    k += Scalar(kWgk[j]) * s;
    if (j % 2 == 1) g += Scalar(kWg[j / 2]) * s;
  }
  return {k * h, std::abs((k - g) * h)};
}

template <typename Scalar, typename F>
void adapt(F& f, Scalar a, Scalar b, Scalar whole, Scalar rel_tol, int depth, Quadrature<Scalar>& acc) {
  const auto [value, error] = gk15(f, a, b);
  if (error <= rel_tol * std::abs(whole) || error <= std::numeric_limits<Scalar>::min() || depth == 0) {
    if (depth == 0 && error > rel_tol * std::abs(whole))
      throw ConvergenceError("adaptive quadrature did not converge");
    acc.value += value;
    acc.error += error;
    ++acc.intervals;
    return;
  }
  const Scalar m = (a + b) / 2;
  adapt(f, a, m, whole, rel_tol, depth - 1, acc);
  adapt(f, m, b, whole, rel_tol, depth - 1, acc);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integral of f over [a, b] to relative tolerance.
/// Throws ConvergenceError when the subdivision depth is exhausted.
template <typename Scalar, typename F>
Quadrature<Scalar> integrate(F&& f, Scalar a, Scalar b, Scalar rel_tol = Scalar(1e-12), int max_depth = 40) {
  Quadrature<Scalar> acc;
  if (a == b) return acc;
  const Scalar whole = detail::gk15(f, a, b).first;
  detail::adapt(f, a, b, whole, rel_tol, max_depth, acc);
  return acc;
}

}  // namespace asdim
