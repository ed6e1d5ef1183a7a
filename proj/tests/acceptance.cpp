// Acceptance runner: one line per criterion, exit status 0 only when every
// requested criterion passes. Usage: acceptance [criterion...]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asdim/cli.hpp"
#include "asdim/covering.hpp"
#include "asdim/end_profile.hpp"
#include "asdim/errors.hpp"
#include "asdim/estimator.hpp"
#include "asdim/heat.hpp"
#include "asdim/rough_isometry.hpp"
#include "asdim/spaces.hpp"

using namespace asdim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

// Index of the lattice point with the given coordinates ([-extent, extent]^d).
Index lattice_index(std::initializer_list<Index> coords, Index extent) {
  Index idx = 0;
  for (Index c : coords) idx = idx * (2 * extent + 1) + (c + extent);
  return idx;
}

// -- 1 -------------------------------------------------------------------------

FiniteMetricSpace random_space(std::mt19937_64& rng, int kind, Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (kind == 0) {
    Eigen::MatrixXd pts(n, 2);
    for (Index i = 0; i < n; ++i) pts.row(i) << u(rng), u(rng);
    return from_points(pts, Norm::euclidean);
  }
  if (kind == 1) {
    // Integer points with the l1 norm: many ties at r and 2r.
    std::uniform_int_distribution<int> c(0, 6);
    Eigen::MatrixXd pts(n, 2);
    for (Index i = 0; i < n; ++i) pts.row(i) << c(rng), c(rng);
    return from_points(pts, Norm::l1);
  }
  // Shortest-path closure of random integer weights on the complete graph.
  std::uniform_int_distribution<int> w(1, 5);
  Eigen::MatrixXd d(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = w(rng);
  }
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return from_matrix(d);
}

Outcome criterion1() {
  std::mt19937_64 rng(20240601);
  int spaces = 0, checks = 0, violations = 0;
  for (; spaces < 240; ++spaces) {
    const Index n = std::uniform_int_distribution<Index>(8, 14)(rng);
    const FiniteMetricSpace s = random_space(rng, spaces % 3, n);
    IndexList all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    std::vector<double> dists;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) dists.push_back(s.distance(i, j));
    std::uniform_int_distribution<std::size_t> pick(0, dists.size() - 1);
    for (int k = 0; k < 5; ++k) {
      // Radii exactly at pairwise distances and their halves probe the
      // open-ball boundary.
      double r = dists[pick(rng)];
      if (k % 2 == 1) r /= 2.0;
      if (!(r > 0.0)) r = 0.5;
      const Index cover_r = covering_number_exact(s, all, r).count;
      const Index pack_r = packing_number_exact(s, all, r).count;
      const Index cover_2r = covering_number_exact(s, all, 2.0 * r).count;
      ++checks;
      if (!(cover_r >= pack_r && pack_r >= cover_2r)) ++violations;
    }
  }
  return {violations == 0, std::to_string(spaces) + " spaces, " + std::to_string(checks) +
                               " checks, " + std::to_string(violations) + " violations"};
}

// -- 2 -------------------------------------------------------------------------

AsymptoticResult dim_Z() { return asymptotic_dimension(lattice(1, 5000, Norm::sup), 5000); }

AsymptoticResult dim_Z2() {
  AsymptoticOptions o;
  o.r_values = {0.5, 1.0, 2.0, 4.0};
  o.points_per_octave = 4.0;
  return asymptotic_dimension(lattice(2, 150, Norm::sup), lattice_index({0, 0}, 150), o);
}

AsymptoticOptions bounded_options() {
  AsymptoticOptions o;
  o.r_values = {0.25, 0.5, 1.0, 2.0};
  o.truncate = false;
  for (double R = 4.0; R <= 4096.0; R *= 2.0) o.R_values.push_back(R);
  return o;
}

Outcome criterion2() {
  const double z = dim_Z().value();
  const double z2 = dim_Z2().value();
  const double cloud = asymptotic_dimension(unit_ball_sample(2000, 2, 7), 0, bounded_options()).value();
  const bool pass = within(z, 1.0, 0.1) && within(z2, 2.0, 0.15) && within(cloud, 0.0, 0.05);
  return {pass, "Z " + fmt(z) + ", Z^2 " + fmt(z2) + ", bounded cloud " + fmt(cloud)};
}

// -- 3 -------------------------------------------------------------------------

// 81 disks; dense enough for d0 and small enough for covers at r = 1/2.
FiniteMetricSpace disks() { return disk_union(-40, 40, 6400, 11, DiskSampling::uniform); }

Index disk_center(const FiniteMetricSpace& s) {
  // Sample point nearest (0, 0).
  IndexList near;
  Index best = 0;
  double best_d = 1e300;
  const auto* pts = point_coordinates(s);
  for (Index i = 0; i < s.size(); ++i) {
    const double d = pts->row(i).norm();
    if (d < best_d) best_d = d, best = i;
  }
  return best;
}

AsymptoticOptions disk_options() {
  AsymptoticOptions o;
  o.r_values = {0.25, 0.5};
  o.points_per_octave = 2.0;
  return o;
}

// Four per octave from half the disk radius down to three sample spacings.
std::vector<double> d0_radii(double resolution) {
  std::vector<double> r;
  for (int k = 0;; ++k) {
    const double x = 0.125 * std::pow(2.0, -k / 4.0);
    if (x < 3.0 * resolution) break;
    r.push_back(x);
  }
  return r;
}

Outcome criterion3() {
  const FiniteMetricSpace s = disks();
  const Index c = disk_center(s);
  const auto d0 = kolmogorov_dimension(s, c, 0.25, d0_radii(s.metadata().resolution), 0.5);
  const auto dinf = asymptotic_dimension(s, c, disk_options());
  const bool pass = within(d0.value(), 2.0, 0.25) && within(dinf.value(), 1.0, 0.15);
  return {pass, "d0 " + fmt(d0.value()) + " (" + std::to_string(d0.r_used.size()) +
                    " radii above resolution " + fmt(s.metadata().resolution) + "), d_inf " +
                    fmt(dinf.value()) + ", " + std::to_string(s.size()) + " points"};
}

// -- 4 -------------------------------------------------------------------------

Outcome criterion4() {
  const Index extent = 1000;
  const FiniteMetricSpace plane = lattice(2, extent, Norm::sup);
  IndexList x_axis, y_axis;
  for (Index t = -extent; t <= extent; ++t) {
    x_axis.push_back(lattice_index({t, 0}, extent));
    y_axis.push_back(lattice_index({0, t}, extent));
  }
  const Index o = lattice_index({0, 0}, extent);
  AsymptoticOptions ao;
  ao.points_per_octave = 2.0;
  const AxiomReport axes = axiom_suite(plane, x_axis, y_axis, {o, o, o}, ao);

  const FiniteMetricSpace z = lattice(1, 300, Norm::sup);
  // Patch of radius 300: keep r small so R / r spans enough octaves.
  AsymptoticOptions po;
  po.r_values = {0.5, 1.0, 2.0};
  po.points_per_octave = 2.0;
  const ProductReport prod = product_axiom(z, z, 300, 300, po, po);
  const double du = axes.both.value(), dp = prod.xy.value();
  const bool pass = within(du, 1.0, 0.15) && dp <= 2.15 && within(dp, 2.0, 0.15);
  return {pass, "axes union " + fmt(du) + " (X1 " + fmt(axes.x1.value()) + ", X2 " +
                    fmt(axes.x2.value()) + "), Z x Z " + fmt(dp) + " (factors " +
                    fmt(prod.x.value()) + ", " + fmt(prod.y.value()) + ")"};
}

// -- 5 -------------------------------------------------------------------------

struct WitnessCase {
  std::string name;
  FiniteMetricSpace x, y;
  IndexList map;
  double a, b, eps;
  Index x0;
  AsymptoticOptions xo, yo;
};

std::vector<WitnessCase> witness_cases() {
  std::vector<WitnessCase> cases;
  {
    const Index N = 2000;
    const double h = 0.25;
    WitnessCase c{"Z -> h-grid", lattice(1, N, Norm::sup), real_grid(-N, N, h), {}, 1.0, 0.0,
                  0.5 + h, N, {}, {}};
    for (Index i = 0; i <= 2 * N; ++i) c.map.push_back(static_cast<Index>(std::lround(i / h)));
    cases.push_back(std::move(c));
  }
  {
    const Index N = 2000;
    WitnessCase c{"dilation x->2x", lattice(1, N, Norm::sup), lattice(1, 2 * N, Norm::sup), {}, 2.0,
                  0.0, 1.0, N, {}, {}};
    for (Index i = -N; i <= N; ++i) c.map.push_back(2 * i + 2 * N);
    cases.push_back(std::move(c));
  }
  {
    const Index E = 150;
    WitnessCase c{"lattice <-> grid graph", lattice(2, E, Norm::sup), grid_graph(2, E), {}, 2.0,
                  0.0, 0.0, lattice_index({0, 0}, E), {}, {}};
    c.map.resize(static_cast<std::size_t>(c.x.size()));
    std::iota(c.map.begin(), c.map.end(), 0);
    c.xo.r_values = c.yo.r_values = {1.0, 2.0, 4.0};
    c.xo.points_per_octave = c.yo.points_per_octave = 2.0;
    cases.push_back(std::move(c));
  }
  for (auto& c : cases) c.xo.points_per_octave = c.yo.points_per_octave = 2.0;
  return cases;
}

Outcome criterion5() {
  bool pass = true;
  std::string detail;
  for (const auto& c : witness_cases()) {
    const auto w = verify(c.map, c.x, c.y, c.a, c.b, c.eps);
    std::string line = c.name + ": ";
    if (!w.verified) {
      pass = false;
      detail += line + "witness rejected; ";
      continue;
    }
    const auto rep = invariance_suite(c.x, c.y, w, c.x0, c.xo, c.yo, {1.0, 2.0, 4.0},
                                      {2.0, 4.0, 8.0, 16.0, 32.0});
    Index certified = 0;
    for (const auto& cell : rep.cells) certified += cell.mode == "certified";
    const bool ok = rep.gap_ok && rep.transfer_ok && rep.exact_cells > 0;
    pass = pass && ok;
    detail += line + "gap " + fmt(rep.gap) + ", transfer " + std::to_string(rep.exact_cells) +
              " exact + " + std::to_string(certified) + " certified of " +
              std::to_string(rep.cells.size()) + (rep.transfer_ok ? " ok" : " VIOLATED") + "; ";
  }
  return {pass, detail};
}

// -- 6 -------------------------------------------------------------------------

Outcome criterion6() {
  const Index E = 200;
  const FiniteMetricSpace s = lattice(2, E, Norm::sup);
  AsymptoticOptions o;
  o.r_values = {0.5, 1.0, 2.0, 4.0};
  for (int k = 0; k <= 12; ++k) o.R_values.push_back(8.0 * std::pow(2.0, k / 4.0));
  const double d1 = asymptotic_dimension(s, lattice_index({0, 0}, E), o).value();
  const double d2 = asymptotic_dimension(s, lattice_index({50, 0}, E), o).value();
  return {std::abs(d1 - d2) <= 0.1,
          "d(0,0) " + fmt(d1) + ", d(50,0) " + fmt(d2) + ", gap " + fmt(std::abs(d1 - d2))};
}

// -- 7 -------------------------------------------------------------------------

Outcome criterion7() {
  bool pass = true;
  std::string detail;
  for (auto [N, D] : {std::pair{2, 2.0}, std::pair{2, 3.0}, std::pair{3, 5.0}}) {
    const auto fit = power_law_envelope(davies_end(N, D), 10.0, 1e4);
    pass = pass && within(fit.estimate.slope, D, 0.05) && fit.single_power_law;
    detail += "(N=" + std::to_string(N) + ",D=" + fmt(D, 0) + ") " + fmt(fit.estimate.slope) + "; ";
  }
  const EndProfile log_profile = log_end();
  const auto env = power_law_envelope(log_profile, 10.0, 1e4);
  const auto dinf = exponent_from_curve(end_volume_curve(log_profile, 10.0, 1e8));
  pass = pass && !env.single_power_law && within(dinf.slope, 2.0, 0.1);
  detail += "log end: local exponent settling " + fmt(env.settling) + " (single power law " +
            (env.single_power_law ? "fits" : "fails") + "), d_inf " + fmt(dinf.slope);
  return {pass, detail};
}

// -- 8 -------------------------------------------------------------------------

Outcome criterion8() {
  const OscillatingEnd osc = oscillating_end({2.0, 1.3, 12});
  const auto rep = oscillation_gap(osc);
  const bool gap_ok = rep.gap >= 0.3;
  const OscillatingEnd squared = oscillating_end({2.0, 2.0, 6});
  bool ratios_ok = true;
  std::string ratios;
  for (int n = 1; n <= 6; ++n) {
    const double q = asymptotic_area_ratio(squared, n);
    if (n >= 3) ratios_ok = ratios_ok && within(q, 1.0, 0.05);
    ratios += (n > 1 ? " " : "") + std::string("a") + std::to_string(n) + ":" + fmt(q, 4);
  }
  return {gap_ok && ratios_ok, "(2,1.3) upper " + fmt(rep.estimate.upper) + " lower " +
                                   fmt(rep.estimate.lower) + " gap " + fmt(rep.gap) +
                                   (gap_ok ? " >= 0.3" : " < 0.3") + "; (2,2) model ratios " + ratios +
                                   " (checked a3..a6)" + (ratios_ok ? "" : " MISMATCH")};
}

// -- 9 -------------------------------------------------------------------------

Outcome criterion9() {
  const FiniteMetricSpace cycle = torus(1, 4096);
  const HeatModel cm = HeatModel::spectral(cycle, 4096);
  Alpha0Options co;
  co.radii = {128.0, 256.0, 512.0, 1024.0};
  const Alpha0Report c = alpha0_equals_dinf_suite(cm, cycle, 0, co);

  const FiniteMetricSpace t2 = torus(2, 128);
  const HeatModel factor = HeatModel::spectral(torus(1, 128));
  const HeatModel tm = HeatModel::product(factor, factor);
  Alpha0Options to;
  to.dimension.r_values = {1.0, 2.0, 4.0};
  to.dimension.points_per_octave = 2.0;
  to.radii = {8.0, 16.0, 32.0, 64.0};
  to.tolerance = 0.25;
  const Alpha0Report t = alpha0_equals_dinf_suite(tm, t2, 0, to);

  const bool pass = within(c.alpha.alpha0, 1.0, 0.15) && within(t.alpha.alpha0, 2.0, 0.2) &&
                    c.gap <= 0.25 && t.gap <= 0.25 && c.max_spread < 0.05 && t.max_spread < 0.05;
  return {pass, "C4096 alpha0 " + fmt(c.alpha.alpha0) + " d_inf " + fmt(c.dimension.value()) +
                    " spread " + fmt(c.max_spread, 4) + "; T128^2 alpha0 " + fmt(t.alpha.alpha0) +
                    " d_inf " + fmt(t.dimension.value()) + " spread " + fmt(t.max_spread, 4)};
}

// -- 10 ------------------------------------------------------------------------

Outcome criterion10() {
  struct Case {
    std::string name;
    FiniteMetricSpace space;
    Index center;
    AsymptoticOptions options;
  };
  std::vector<Case> cases;
  cases.push_back({"Z", lattice(1, 5000, Norm::sup), 5000, {}});
  {
    AsymptoticOptions o;
    o.r_values = {0.5, 1.0, 2.0, 4.0};
    o.points_per_octave = 4.0;
    cases.push_back({"Z^2", lattice(2, 150, Norm::sup), lattice_index({0, 0}, 150), o});
  }
  cases.push_back({"cloud", unit_ball_sample(2000, 2, 7), 0, bounded_options()});
  cases.push_back({"C4096", torus(1, 4096), 0, {}});
  {
    AsymptoticOptions o;
    o.r_values = {1.0, 2.0, 4.0};
    o.points_per_octave = 2.0;
    cases.push_back({"grid graph", grid_graph(2, 150), lattice_index({0, 0}, 150), o});
  }
  {
    const FiniteMetricSpace s = disks();
    cases.push_back({"disk union", s, disk_center(s), disk_options()});
  }
  bool pass = true;
  int tested = 0;
  std::string detail;
  for (const auto& c : cases) {
    IndexList sample{c.center};
    IndexList near;
    c.space.ball_members(c.center, 32.0, near);
    for (std::size_t k = 0; k < near.size(); k += std::max<std::size_t>(1, near.size() / 8))
      sample.push_back(near[k]);
    const double A = doubling_constant(c.space, sample, c.options.r_values);
    if (A > 64.0) {
      detail += c.name + " not doubling (A " + fmt(A, 1) + "); ";
      continue;
    }
    ++tested;
    const double d = asymptotic_dimension(c.space, c.center, c.options).value();
    const bool ok = d <= std::log2(A) + 0.1;
    pass = pass && ok;
    detail += c.name + " " + fmt(d, 2) + " <= " + fmt(std::log2(A), 2) + (ok ? "" : " VIOLATED") + "; ";
  }
  return {pass && tested > 0, std::to_string(tested) + " doubling spaces: " + detail};
}

// -- 11 ------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion11() {
  namespace fs = std::filesystem;
  const fs::path configs = fs::path(ASDIM_SOURCE_DIR) / "configs";
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(configs))
    if (e.path().extension() == ".ini") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  const fs::path root = fs::temp_directory_path() / "asdim_determinism";
  fs::remove_all(root);
  int compared = 0, mismatched = 0, failed = 0;
  std::string detail;
  for (const auto& cfg : files) {
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = root / (cfg.stem().string() + "_" + std::to_string(run));
      std::ostringstream out, err;
      const int code = cli::run({"run", "--config", cfg.string(), "--out", dir.string()}, out, err);
      if (code != 0) {
        ++failed;
        detail += cfg.filename().string() + " exit " + std::to_string(code) + "; ";
        break;
      }
      std::string all;
      std::vector<fs::path> csvs;
      for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") csvs.push_back(e.path());
      std::sort(csvs.begin(), csvs.end());
      for (const auto& p : csvs) all += p.filename().string() + "\n" + slurp(p);
      outputs.push_back(all);
    }
    if (outputs.size() == 2) {
      ++compared;
      if (outputs[0] != outputs[1] || outputs[0].empty()) {
        ++mismatched;
        detail += cfg.filename().string() + " differs; ";
      }
    }
  }
  fs::remove_all(root);
  return {compared > 0 && mismatched == 0 && failed == 0,
          std::to_string(compared) + " configs run twice, " + std::to_string(mismatched) +
              " with differing CSVs" + (detail.empty() ? "" : "; " + detail)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sandwich law", criterion1},
      {"known dimensions", criterion2},
      {"disk union d0 / d_inf", criterion3},
      {"dimension axioms", criterion4},
      {"rough-isometry invariance", criterion5},
      {"base-point independence", criterion6},
      {"Davies and log ends", criterion7},
      {"oscillating end", criterion8},
      {"heat trace alpha0 = d_inf", criterion9},
      {"doubling implies finiteness", criterion10},
      {"determinism", criterion11},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty())
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);

  bool all = true;
  for (int k : selected) {
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::cerr << "unknown criterion " << k << '\n';
      return 2;
    }
    const auto& [name, fn] = criteria[static_cast<std::size_t>(k - 1)];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << k << " [" << name << "]: " << (o.pass ? "PASS" : "FAIL") << " ("
              << o.detail << ") " << fmt(secs, 1) << "s" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
