#include "asdim/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "asdim/errors.hpp"
#include "asdim/numeric.hpp"
#include "asdim/parallel.hpp"

namespace asdim {
namespace {

Eigen::MatrixXd decay(const Eigen::VectorXd& evals, const Eigen::VectorXd& t) {
  // E(k, j) = exp(-t_j lambda_k)
  return (-(evals * t.transpose())).array().exp().matrix();
}

/// Lanczos recurrence kept open so the step count can grow without restart.
class LanczosRun {
 public:
  LanczosRun(const Eigen::SparseMatrix<double>& L, const Eigen::VectorXd& v)
      : L_(L), q_(v.normalized()), q_prev_(Eigen::VectorXd::Zero(v.size())) {}

  void extend(Index steps) {
    while (static_cast<Index>(alpha_.size()) < steps && !done_) {
      Eigen::VectorXd w = L_ * q_;
      if (!beta_.empty()) w -= beta_.back() * q_prev_;
      const double a = q_.dot(w);
      w -= a * q_;
      alpha_.push_back(a);
      const double b = w.norm();
      if (b <= 1e-12 * std::max(1.0, std::abs(a))) {
        done_ = true;  // invariant subspace reached: quadrature is exact
        return;
      }
      beta_.push_back(b);
      q_prev_ = q_;
      q_ = w / b;
    }
  }

  Eigen::VectorXd quadrature(const Eigen::VectorXd& t) const {
    const auto m = static_cast<Eigen::Index>(alpha_.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha_.data(), m);
    Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index k = 0; k + 1 < m; ++k) sub[k] = beta_[static_cast<std::size_t>(k)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd w = eig.eigenvectors().row(0).transpose().array().square();
    return decay(eig.eigenvalues(), t).transpose() * w;
  }

  Index steps() const { return static_cast<Index>(alpha_.size()); }
  bool done() const { return done_; }

 private:
  const Eigen::SparseMatrix<double>& L_;
  Eigen::VectorXd q_;
  Eigen::VectorXd q_prev_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  bool done_ = false;
};

double closed_radius(double r) { return r + 1e-9 * std::max(1.0, r); }

double ball_measure(const FiniteMetricSpace& space, Index x, double radius, IndexList& scratch) {
  scratch.clear();
  space.ball_members(x, radius, scratch);
  return space.measure_of(scratch);
}

}  // namespace

std::string_view to_string(HeatMode mode) {
  switch (mode) {
    case HeatMode::spectral: return "spectral";
    case HeatMode::product: return "product";
    case HeatMode::krylov: return "krylov";
  }
  return "?";
}

Eigen::SparseMatrix<double> graph_laplacian(const Graph& g) {
  const Index n = g.vertex_count();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n) + 2 * g.edge_count());
  for (Index v = 0; v < n; ++v) {
    const auto nb = g.neighbors(v);
    entries.emplace_back(v, v, static_cast<double>(nb.size()));
    for (Index w : nb) entries.emplace_back(v, w, -1.0);
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(entries.begin(), entries.end());
  return L;
}

Eigen::VectorXd lanczos_quadrature(const Eigen::SparseMatrix<double>& L, const Eigen::VectorXd& v,
                                   const Eigen::VectorXd& t, Index steps) {
  LanczosRun run(L, v);
  run.extend(steps);
  return run.quadrature(t) * v.squaredNorm();
}

Eigen::VectorXd lanczos_quadrature(const Eigen::SparseMatrix<double>& L, const Eigen::VectorXd& v,
                                   const Eigen::VectorXd& t, const KrylovOptions& options) {
  LanczosRun run(L, v);
  run.extend(options.initial_steps);
  Eigen::VectorXd current = run.quadrature(t);
  while (!run.done()) {
    if (run.steps() >= options.max_steps)
      throw ConvergenceError("Lanczos quadrature: no convergence within " +
                             std::to_string(options.max_steps) + " steps");
    run.extend(std::min(options.max_steps, 2 * run.steps()));
    const Eigen::VectorXd next = run.quadrature(t);
    const double change = ((next - current).array().abs() / next.array().abs().max(1e-300)).maxCoeff();
    current = next;
    if (change < options.tolerance) break;
  }
  return current * v.squaredNorm();
}

HeatModel HeatModel::spectral(const FiniteMetricSpace& space, Index cap) {
  if (!space.graph()) throw DomainError("heat: space carries no graph");
  if (space.size() > cap)
    throw ResourceError("heat: spectral mode limited to " + std::to_string(cap) + " vertices, got " +
                        std::to_string(space.size()));
  HeatModel m;
  m.mode_ = HeatMode::spectral;
  m.n_ = space.size();
  m.laplacian_ = graph_laplacian(*space.graph());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(m.laplacian_));
  if (eig.info() != Eigen::Success) throw ConvergenceError("heat: eigendecomposition failed");
  m.evals_ = eig.eigenvalues();
  m.evecs_ = eig.eigenvectors();
  return m;
}

HeatModel HeatModel::product(const HeatModel& a, const HeatModel& b) {
  HeatModel m;
  m.mode_ = HeatMode::product;
  m.n_ = a.size() * b.size();
  m.left_ = std::make_shared<const HeatModel>(a);
  m.right_ = std::make_shared<const HeatModel>(b);
  return m;
}

HeatModel HeatModel::krylov(const FiniteMetricSpace& space, const KrylovOptions& options) {
  if (!space.graph()) throw DomainError("heat: space carries no graph");
  HeatModel m;
  m.mode_ = HeatMode::krylov;
  m.n_ = space.size();
  m.laplacian_ = graph_laplacian(*space.graph());
  m.krylov_ = options;
  return m;
}

Eigen::VectorXd HeatModel::diagonal(Index x, const Eigen::VectorXd& t) const {
  return diagonals(IndexList{x}, t).row(0).transpose();
}

Eigen::MatrixXd HeatModel::diagonals(const IndexList& xs, const Eigen::VectorXd& t) const {
  for (Index x : xs)
    if (x < 0 || x >= n_) throw DomainError("heat: vertex index out of range");
  if (!(t.array() > 0.0).all()) throw DomainError("heat: times must be positive");
  const auto rows = static_cast<Eigen::Index>(xs.size());
  switch (mode_) {
    case HeatMode::spectral: {
      Eigen::MatrixXd w(rows, n_);
      for (Eigen::Index k = 0; k < rows; ++k) w.row(k) = evecs_.row(xs[k]).array().square();
      return w * decay(evals_, t);
    }
    case HeatMode::product: {
      const Index nb = right_->size();
      IndexList is(xs.size()), js(xs.size());
      for (std::size_t k = 0; k < xs.size(); ++k) {
        is[k] = xs[k] / nb;
        js[k] = xs[k] % nb;
      }
      return left_->diagonals(is, t).cwiseProduct(right_->diagonals(js, t));
    }
    case HeatMode::krylov: {
      Eigen::MatrixXd out(rows, t.size());
      parallel_for(xs.size(), krylov_.threads, [&](std::size_t k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
        e[xs[k]] = 1.0;
        out.row(static_cast<Eigen::Index>(k)) = lanczos_quadrature(laplacian_, e, t, krylov_).transpose();
      });
      return out;
    }
  }
  return {};
}

Eigen::VectorXd HeatModel::full_trace(const Eigen::VectorXd& t) const {
  switch (mode_) {
    case HeatMode::spectral: return decay(evals_, t).colwise().sum().transpose();
    case HeatMode::product: return left_->full_trace(t).cwiseProduct(right_->full_trace(t));
    case HeatMode::krylov: break;
  }
  throw DomainError("heat: full trace needs spectral or product mode");
}

Eigen::MatrixXd HeatModel::kernel(double t) const {
  if (mode_ != HeatMode::spectral) throw DomainError("heat: dense kernel needs spectral mode");
  return evecs_ * (-t * evals_.array()).exp().matrix().asDiagonal() * evecs_.transpose();
}

StochasticTrace HeatModel::stochastic_trace(const IndexList& support, const Eigen::VectorXd& weights,
                                            const Eigen::VectorXd& t, Index samples,
                                            std::uint64_t seed) const {
  if (mode_ != HeatMode::krylov) throw DomainError("heat: stochastic trace needs Krylov mode");
  if (samples < 2) throw DomainError("heat: need at least 2 Hutchinson samples");
  if (weights.size() != static_cast<Eigen::Index>(support.size()))
    throw DomainError("heat: one weight per support point required");
  Eigen::MatrixXd est(samples, t.size());
  parallel_for(static_cast<std::size_t>(samples), krylov_.threads, [&](std::size_t s) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (s + 1));
    std::bernoulli_distribution coin(0.5);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n_);
    for (std::size_t k = 0; k < support.size(); ++k)
      z[support[k]] = (coin(rng) ? 1.0 : -1.0) * std::sqrt(weights[static_cast<Eigen::Index>(k)]);
    est.row(static_cast<Eigen::Index>(s)) = lanczos_quadrature(laplacian_, z, t, krylov_).transpose();
  });
  StochasticTrace out;
  out.samples = samples;
  out.mean = est.colwise().mean().transpose();
  const Eigen::MatrixXd centered = est.rowwise() - out.mean.transpose();
  out.std_error = (centered.array().square().colwise().sum() / (samples - 1.0)).sqrt().transpose() /
                  std::sqrt(static_cast<double>(samples));
  return out;
}

HeatTraceCurve exhaustion_trace(const HeatModel& model, const FiniteMetricSpace& space, Index o,
                                const std::vector<double>& radii, const Eigen::VectorXd& t,
                                const ExhaustionOptions& options) {
  space.check_index(o);
  if (model.size() != space.size()) throw DomainError("heat: model and space sizes differ");
  if (radii.empty()) throw DomainError("exhaustion: empty radius schedule");
  for (std::size_t k = 0; k < radii.size(); ++k)
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1])))
      throw DomainError("exhaustion: radii must be positive and increasing");
  if (options.require_inside && radii.back() > space.eccentricity(o) / 2.0)
    throw ScaleError("exhaustion: largest ball reaches beyond half the radius of the space");

  HeatTraceCurve curve;
  curve.t = t;
  curve.radii = radii;
  const auto levels = static_cast<Eigen::Index>(radii.size());
  curve.per_k = Eigen::MatrixXd::Zero(levels, t.size());
  curve.std_error = Eigen::MatrixXd::Zero(levels, t.size());

  std::vector<IndexList> balls(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    space.ball_members(o, radii[k], balls[k]);
    curve.ball_sizes.push_back(static_cast<Index>(balls[k].size()));
  }
  const IndexList& top = balls.back();
  curve.stochastic = model.mode() == HeatMode::krylov &&
                     static_cast<Index>(top.size()) > options.exact_diagonal_limit;
  if (curve.stochastic) {
    for (Eigen::Index k = 0; k < levels; ++k) {
      const IndexList& K = balls[static_cast<std::size_t>(k)];
      Eigen::VectorXd w(static_cast<Eigen::Index>(K.size()));
      for (std::size_t i = 0; i < K.size(); ++i) w[static_cast<Eigen::Index>(i)] = space.measure(K[i]);
      const double mu = w.sum();
      const auto est = model.stochastic_trace(K, w, t, options.samples, options.seed + k);
      curve.per_k.row(k) = est.mean.transpose() / mu;
      curve.std_error.row(k) = est.std_error.transpose() / mu;
    }
  } else {
    const Eigen::MatrixXd diag = model.diagonals(top, t);
    // Position of each ambient index in `top` (balls are ascending).
    for (Eigen::Index k = 0; k < levels; ++k) {
      const IndexList& K = balls[static_cast<std::size_t>(k)];
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(t.size());
      double mu = 0.0;
      for (Index x : K) {
        const auto pos = std::lower_bound(top.begin(), top.end(), x) - top.begin();
        const double w = space.measure(x);
        acc += w * diag.row(pos).transpose();
        mu += w;
      }
      curve.per_k.row(k) = acc.transpose() / mu;
    }
  }
  curve.trace = curve.per_k.row(levels - 1).transpose();
  const Eigen::Index last = std::min<Eigen::Index>(3, levels);
  const Eigen::MatrixXd tail = curve.per_k.bottomRows(last);
  curve.spread = ((tail.colwise().maxCoeff() - tail.colwise().minCoeff()).array() /
                  tail.colwise().mean().array())
                     .transpose();
  return curve;
}

double TimeWindow::decades() const { return t_hi > t_lo ? std::log10(t_hi / t_lo) : 0.0; }

TimeWindow usable_window(double diameter) {
  TimeWindow w;
  w.t_lo = 4.0;
  w.t_hi = (diameter / 8.0) * (diameter / 8.0);
  return w;
}

Eigen::VectorXd time_grid(const TimeWindow& window, double points_per_octave) {
  if (!(window.t_hi > window.t_lo)) throw ScaleError("heat: empty time window");
  Eigen::VectorXd g = geometric_grid(window.t_lo, window.t_hi, points_per_octave);
  if (g[g.size() - 1] < window.t_hi * (1.0 - 1e-12)) {
    g.conservativeResize(g.size() + 1);
    g[g.size() - 1] = window.t_hi;
  }
  return g;
}

NovikovShubin novikov_shubin(const Eigen::VectorXd& t, const Eigen::VectorXd& trace, double t_lo,
                             double t_hi, double min_decades) {
  if (t.size() != trace.size()) throw DomainError("novikov-shubin: t/trace length mismatch");
  std::vector<double> ts, vs;
  for (Eigen::Index k = 0; k < t.size(); ++k)
    if (t[k] >= t_lo * (1.0 - 1e-12) && t[k] <= t_hi * (1.0 + 1e-12)) {
      ts.push_back(t[k]);
      vs.push_back(trace[k]);
    }
  if (ts.size() < 4 || std::log10(ts.back() / ts.front()) < min_decades)
    throw ScaleError("novikov-shubin: usable t window spans fewer than " +
                     std::to_string(min_decades) + " decades");
  NovikovShubin ns;
  ns.t_lo = ts.front();
  ns.t_hi = ts.back();
  GrowthCurve curve;
  curve.kind = CurveKind::heat_trace;
  curve.scale = Eigen::Map<const Eigen::VectorXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
  curve.value = Eigen::Map<const Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()))
                    .cwiseInverse();
  for (std::size_t k = 1; k < vs.size(); ++k)
    if (vs[k] > vs[k - 1] * (1.0 + 1e-12)) ns.monotone = false;
  ns.estimate = exponent_from_curve(curve, 1.0);
  ns.alpha0 = 2.0 * ns.estimate.slope;
  ns.upper = 2.0 * ns.estimate.upper;
  ns.lower = 2.0 * ns.estimate.lower;
  return ns;
}

NovikovShubin return_probability_dimension(const HeatModel& model, Index o,
                                           const TimeWindow& window, double points_per_octave) {
  const Eigen::VectorXd t = time_grid(window, points_per_octave);
  return novikov_shubin(t, model.diagonal(o, t), window.t_lo, window.t_hi);
}

ExhaustionReport regular_exhaustion_check(const FiniteMetricSpace& space, Index o,
                                          const std::vector<double>& radii,
                                          const std::vector<double>& r_list) {
  space.check_index(o);
  const Index n = space.size();
  ExhaustionReport report;
  IndexList K, members;
  std::vector<std::uint8_t> inK(static_cast<std::size_t>(n)), plus(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < radii.size(); ++k) {
    K.clear();
    space.ball_members(o, radii[k], K);
    std::fill(inK.begin(), inK.end(), 0);
    for (Index x : K) inK[x] = 1;
    for (double r : r_list) {
      if (!(r > 0.0)) throw DomainError("exhaustion check: r must be positive");
      std::fill(plus.begin(), plus.end(), 0);
      ExhaustionRow row;
      row.k = static_cast<Index>(k);
      row.rho = radii[k];
      row.r = r;
      for (Index x : K) {
        members.clear();
        space.ball_members(x, closed_radius(r), members);
        bool inside = true;
        for (Index m : members) {
          if (!plus[m]) {
            plus[m] = 1;
            row.pen_plus += space.measure(m);
          }
          if (!inK[m]) inside = false;
        }
        if (inside) row.pen_minus += space.measure(x);
      }
      row.ratio = row.pen_minus > 0.0 ? row.pen_plus / row.pen_minus
                                      : std::numeric_limits<double>::infinity();
      report.rows.push_back(row);
    }
  }
  report.approaches_one = radii.size() >= 2;
  for (std::size_t j = 0; j < r_list.size() && report.approaches_one; ++j) {
    const std::size_t stride = r_list.size();
    const double first = report.rows[j].ratio;
    const double last = report.rows[(radii.size() - 1) * stride + j].ratio;
    for (std::size_t k = 1; k < radii.size(); ++k)
      if (report.rows[k * stride + j].ratio > report.rows[(k - 1) * stride + j].ratio + 1e-12)
        report.approaches_one = false;
    if (!(last - 1.0 <= (first - 1.0) / 2.0)) report.approaches_one = false;
  }
  return report;
}

double doubling_constant(const FiniteMetricSpace& space, const IndexList& sample,
                         const std::vector<double>& r_grid) {
  double A = 1.0;
  IndexList scratch;
  for (double r : r_grid)
    for (Index x : sample) {
      space.check_index(x);
      A = std::max(A, ball_measure(space, x, 2.0 * r, scratch) / ball_measure(space, x, r, scratch));
    }
  return A;
}

CgReport assumption_cg_check(const HeatModel& model, const FiniteMetricSpace& space,
                             const IndexList& sample, const std::vector<double>& r_grid,
                             const Eigen::VectorXd& t, double doubling_limit) {
  if (sample.empty()) throw DomainError("assumption CG: empty sample");
  for (Index x : sample) space.check_index(x);
  CgReport report;
  report.r_grid = r_grid;
  report.t_lo = t.minCoeff();
  report.t_hi = t.maxCoeff();
  IndexList scratch;
  report.A = doubling_constant(space, sample, r_grid);
  const Eigen::MatrixXd diag = model.diagonals(sample, t);
  report.C = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      const double v = diag(static_cast<Eigen::Index>(i), j) *
                       ball_measure(space, sample[i], std::sqrt(t[j]), scratch);
      report.C = std::min(report.C, v);
      report.C_prime = std::max(report.C_prime, v);
    }
  for (double r : r_grid)
    for (Index x : sample)
      for (Index y : sample)
        if (space.distance(x, y) < 2.0 * r)
          report.gamma = std::max(report.gamma, ball_measure(space, x, r, scratch) /
                                                    ball_measure(space, y, r, scratch));
  report.doubling = report.A <= doubling_limit;
  return report;
}

Alpha0Report alpha0_equals_dinf_suite(const HeatModel& model, const FiniteMetricSpace& space,
                                      Index o, const Alpha0Options& options) {
  Alpha0Report report;
  report.dimension = asymptotic_dimension(space, o, options.dimension);
  const TimeWindow window = usable_window(space.eccentricity(o));
  const Eigen::VectorXd t = time_grid(window, options.points_per_octave);
  report.curve = exhaustion_trace(model, space, o, options.radii, t, options.exhaustion);
  report.alpha = novikov_shubin(t, report.curve.trace, window.t_lo, window.t_hi);

  IndexList sample = options.cg_sample;
  if (sample.empty()) {
    IndexList top;
    space.ball_members(o, options.radii.back(), top);
    sample.push_back(o);
    const std::size_t stride = std::max<std::size_t>(1, top.size() / 16);
    for (std::size_t k = 0; k < top.size(); k += stride)
      if (top[k] != o) sample.push_back(top[k]);
  }
  const std::vector<double> r_grid =
      options.cg_r_grid.empty() ? std::vector<double>{1.0, 2.0, 4.0, 8.0} : options.cg_r_grid;
  report.cg = assumption_cg_check(model, space, sample, r_grid, t);

  report.gap = std::abs(report.dimension.value() - report.alpha.alpha0);
  report.gap_ok = report.gap <= options.tolerance;
  report.sandwich_lower.resize(t.size());
  report.sandwich_upper.resize(t.size());
  report.sandwich_holds = true;
  IndexList scratch;
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    const double v = ball_measure(space, o, std::sqrt(t[j]), scratch);
    report.sandwich_lower[j] = report.cg.C / (report.cg.gamma * v);
    report.sandwich_upper[j] = report.cg.C_prime * report.cg.gamma / v;
    const double tr = report.curve.trace[j];
    if (tr < report.sandwich_lower[j] * (1.0 - 1e-9) || tr > report.sandwich_upper[j] * (1.0 + 1e-9))
      report.sandwich_holds = false;
    report.max_spread = std::max(report.max_spread, report.curve.spread[j]);
  }
  return report;
}

}  // namespace asdim
