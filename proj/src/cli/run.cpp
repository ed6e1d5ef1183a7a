#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "asdim/cli.hpp"
#include "asdim/end_profile.hpp"
#include "asdim/errors.hpp"
#include "asdim/estimator.hpp"
#include "asdim/heat.hpp"
#include "asdim/io.hpp"
#include "asdim/rough_isometry.hpp"
#include "asdim/spaces.hpp"

namespace asdim::cli {
namespace {

namespace fs = std::filesystem;

struct Context {
  Config cfg;
  fs::path out_dir;
  std::string command;
  Json summary = Json::object();
  Json details = Json::object();
};

// -- config helpers ---------------------------------------------------------

unsigned threads(const Config& c) {
  const long long t = c.integer("threads", 1);
  if (t < 1) throw ConfigError("threads must be >= 1");
  return static_cast<unsigned>(t);
}

std::uint64_t seed(const Config& c, const std::string& why) {
  if (!c.has("seed")) throw ConfigError("seed is required: " + why);
  return static_cast<std::uint64_t>(c.integer("seed", 0));
}

long long positive(const Config& c, const std::string& key, long long fallback) {
  const long long v = c.integer(key, fallback);
  if (v < 1) throw ConfigError(key + " must be positive");
  return v;
}

double positive_real(const Config& c, const std::string& key, double fallback) {
  const double v = c.real(key, fallback);
  if (!(v > 0.0)) throw ConfigError(key + " must be positive");
  return v;
}

std::vector<double> grid(const Config& c, const std::string& key, const std::vector<double>& fallback,
                         bool decreasing = false) {
  std::vector<double> g = c.reals(key, fallback);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0.0)) throw ConfigError(key + ": grid values must be positive");
    if (i > 0 && (decreasing ? g[i] >= g[i - 1] : g[i] <= g[i - 1]))
      throw ConfigError(key + ": grid must be strictly " +
                        std::string(decreasing ? "decreasing" : "increasing"));
  }
  return g;
}

fs::path resolve(const Config& c, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : c.base_dir() / path;
}

// -- spaces -----------------------------------------------------------------

struct Built {
  FiniteMetricSpace space;
  Index center = 0;
  std::string kind;
};

Index nearest_origin(const FiniteMetricSpace& s) {
  const auto* pts = point_coordinates(s);
  if (!pts) return 0;
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < s.size(); ++i) {
    const double d = pts->row(i).norm();
    if (d < best_d) best_d = d, best = i;
  }
  return best;
}

Built build_space(const Config& c) {
  Built b;
  b.kind = c.text("space.kind", "lattice");
  const Index cap = positive(c, "space.cap", kDefaultPointCap);
  Index origin = 0;
  if (b.kind == "lattice" || b.kind == "grid_graph") {
    const Index dims = positive(c, "space.dims", 2), extent = positive(c, "space.extent", 100);
    b.space = b.kind == "lattice"
                  ? lattice(dims, extent, norm_from_string(c.text("space.norm", "sup")), cap)
                  : grid_graph(dims, extent, cap);
    origin = (b.space.size() - 1) / 2;  // symmetric box: the middle index
  } else if (b.kind == "torus") {
    b.space = torus(positive(c, "space.dims", 1), positive(c, "space.side", 256), cap);
  } else if (b.kind == "unit_ball") {
    b.space = unit_ball_sample(positive(c, "space.n", 1000), positive(c, "space.dims", 2),
                               seed(c, "space.kind = unit_ball is random"));
    origin = nearest_origin(b.space);
  } else if (b.kind == "unit_square") {
    b.space = unit_square_sample(positive(c, "space.n", 1000), seed(c, "space.kind = unit_square is random"));
  } else if (b.kind == "real_grid") {
    b.space = real_grid(c.real("space.lo", -100.0), c.real("space.hi", 100.0),
                        positive_real(c, "space.h", 1.0));
    origin = nearest_origin(b.space);
  } else if (b.kind == "disk_union") {
    const auto sampling = c.text("space.sampling", "uniform") == "grid" ? DiskSampling::grid
                                                                        : DiskSampling::uniform;
    b.space = disk_union(c.integer("space.n_lo", -20), c.integer("space.n_hi", 20),
                         positive(c, "space.per_disk", 400), seed(c, "space.kind = disk_union"),
                         sampling);
    origin = nearest_origin(b.space);
  } else if (b.kind == "spiral_x" || b.kind == "spiral_y") {
    SpiralRegions sp = spiral_regions(positive_real(c, "space.t_max", 20.0),
                                      positive_real(c, "space.resolution", 0.5));
    const bool x = b.kind == "spiral_x";
    b.space = x ? sp.x : sp.y;
    origin = x ? sp.x_origin : sp.y_origin;
  } else {  // file
    if (!c.has("space.file")) throw ConfigError("space.kind = file needs space.file");
    b.space = load_space(resolve(c, c.text("space.file", "")));
  }
  if (b.space.empty()) throw DomainError("space is empty");

  const std::string center = c.text("space.center", "origin");
  if (center == "origin") {
    b.center = origin;
  } else {
    long long v = 0;
    std::istringstream in(center);
    if (!(in >> v) || !in.eof() || v < 0 || v >= b.space.size())
      throw ConfigError("space.center must be 'origin' or an index below " +
                        std::to_string(b.space.size()));
    b.center = static_cast<Index>(v);
  }
  return b;
}

AsymptoticOptions estimator_options(const Config& c) {
  AsymptoticOptions o;
  o.r_values = grid(c, "estimator.r", o.r_values);
  if (c.has("estimator.R")) o.R_values = grid(c, "estimator.R", {});
  o.points_per_octave = positive_real(c, "estimator.ppo", o.points_per_octave);
  o.tail_fraction = positive_real(c, "estimator.tail", o.tail_fraction);
  o.truncate = c.boolean("estimator.truncate", o.truncate);
  o.min_range_factor = positive_real(c, "estimator.min_range_factor", o.min_range_factor);
  o.min_ball = positive(c, "estimator.min_ball", o.min_ball);
  o.stabilization_tolerance =
      positive_real(c, "estimator.stabilization_tolerance", o.stabilization_tolerance);
  o.packing_tolerance = positive_real(c, "estimator.packing_tolerance", o.packing_tolerance);
  o.threads = threads(c);
  return o;
}

// -- output -----------------------------------------------------------------

std::ofstream open_out(const Context& ctx, const std::string& name) {
  std::ofstream f(ctx.out_dir / name, std::ios::binary);
  if (!f) throw Error("cannot write " + (ctx.out_dir / name).string());
  return f;
}

Json config_json(const Config& c) {
  Json j = Json::object();
  for (const auto& [k, s] : c.settings()) j[k] = s.value;
  return j;
}

void write_result(const Context& ctx) {
  Json doc;
  doc["schema"] = "asdim-result";
  doc["version"] = kResultSchemaVersion;
  doc["tool"] = kVersion;
  doc["command"] = ctx.command;
  doc["config"] = config_json(ctx.cfg);
  Json overrides = Json::array();
  for (const auto& [k, s] : ctx.cfg.settings())
    if (s.override) overrides.push_back(k);
  doc["overrides"] = overrides;
  doc["summary"] = ctx.summary;
  doc["details"] = ctx.details;
  auto f = open_out(ctx, "result.json");
  f << doc.dump(2) << "\n";
}

std::string scalar_text(const Json& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void print_summary(const Context& ctx, std::ostream& out) {
  out << ctx.command << ":";
  for (const auto& [k, v] : ctx.summary.items()) out << " " << k << "=" << scalar_text(v);
  out << "\n";
}

// -- subcommands --------------------------------------------------------------

void cmd_gen(Context& ctx) {
  const Built b = build_space(ctx.cfg);
  save_space(b.space, ctx.out_dir / "space.json");
  auto f = open_out(ctx, "space.csv");
  CsvWriter w(f, ctx.cfg.header(), {"key", "value"});
  const double ecc = b.space.eccentricity(b.center);
  w.cell("size").cell(static_cast<long long>(b.space.size())).end_row();
  w.cell("center").cell(static_cast<long long>(b.center)).end_row();
  w.cell("eccentricity").cell(ecc).end_row();
  w.cell("resolution").cell(b.space.metadata().resolution).end_row();
  ctx.summary["points"] = b.space.size();
  ctx.summary["center"] = b.center;
  ctx.summary["eccentricity"] = ecc;
}

void cmd_dim(Context& ctx) {
  const Built b = build_space(ctx.cfg);
  const AsymptoticResult r = asymptotic_dimension(b.space, b.center, estimator_options(ctx.cfg));
  {
    auto f = open_out(ctx, "grid.csv");
    write_grid_csv(f, r.cells, ctx.cfg.header());
  }
  {
    auto f = open_out(ctx, "curves.csv");
    write_curve_csv(f, r, ctx.cfg.header());
  }
  ctx.summary["d_inf"] = r.value();
  ctx.summary["upper"] = r.estimate.upper;
  ctx.summary["lower"] = r.estimate.lower;
  ctx.summary["packing"] = r.packing_estimate.value();
  ctx.summary["stabilized"] = r.stabilized;
  ctx.summary["packing_agrees"] = r.packing_agrees;
  ctx.summary["points"] = b.space.size();
  ctx.details["dimension"] = to_json(r);
}

void cmd_box(Context& ctx) {
  const Config& c = ctx.cfg;
  const Built b = build_space(c);
  const double R = positive_real(c, "box.R_fixed", 0.25);
  std::vector<double> radii;
  if (c.has("box.r")) {
    radii = grid(c, "box.r", {}, true);
  } else {
    const double h = b.space.metadata().resolution;
    if (!(h > 0.0)) throw ConfigError("box.r is required for spaces without a declared resolution");
    const double hi = positive_real(c, "box.r_hi", R / 2.0);
    const double lo = positive_real(c, "box.floor", 3.0) * h;
    const double ppo = positive_real(c, "box.ppo", 4.0);
    for (int k = 0;; ++k) {
      const double x = hi * std::pow(2.0, -k / ppo);
      if (x < lo) break;
      radii.push_back(x);
    }
  }
  const KolmogorovResult k = kolmogorov_dimension(b.space, b.center, R, radii,
                                                  positive_real(c, "box.tail", 0.5));
  auto f = open_out(ctx, "box.csv");
  CsvWriter w(f, c.header(), {"r", "inv_r", "n_r", "log_ratio"});
  const Eigen::VectorXd lr = log_ratios(k.curve);
  for (Eigen::Index i = 0; i < k.curve.size(); ++i)
    w.cell(1.0 / k.curve.scale[i]).cell(k.curve.scale[i]).cell(k.curve.value[i]).cell(lr[i]).end_row();
  ctx.summary["d0"] = k.value();
  ctx.summary["upper"] = k.estimate.upper;
  ctx.summary["lower"] = k.estimate.lower;
  ctx.summary["radii_used"] = k.r_used.size();
  ctx.summary["radii_excluded"] = k.r_excluded.size();
  ctx.summary["resolution"] = b.space.metadata().resolution;
  ctx.details["estimate"] = to_json(k.estimate);
}

void cmd_axioms(Context& ctx) {
  const Config& c = ctx.cfg;
  const AsymptoticOptions o = estimator_options(c);
  const double tol = positive_real(c, "axioms.tolerance", 0.15);
  const Index E = positive(c, "axioms.extent", 300);
  const FiniteMetricSpace plane = lattice(2, E, Norm::sup);
  IndexList x_axis, y_axis;
  const Index side = 2 * E + 1;
  for (Index t = 0; t < side; ++t) {
    x_axis.push_back(t * side + E);
    y_axis.push_back(E * side + t);
  }
  std::sort(x_axis.begin(), x_axis.end());
  const Index o_idx = E * side + E;
  const AxiomReport axes = axiom_suite(plane, x_axis, y_axis, {o_idx, o_idx, o_idx}, o, tol);

  const Index P = positive(c, "axioms.product_extent", 100);
  const FiniteMetricSpace z = lattice(1, P, Norm::sup);
  const ProductReport prod = product_axiom(z, z, P, P, o, o, tol);

  auto f = open_out(ctx, "axioms.csv");
  CsvWriter w(f, c.header(), {"case", "d_inf", "packing", "stabilized"});
  auto row = [&](const std::string& name, const AsymptoticResult& r) {
    w.cell(name).cell(r.value()).cell(r.packing_estimate.value()).cell(r.stabilized ? 1LL : 0LL).end_row();
  };
  row("x_axis", axes.x1);
  row("y_axis", axes.x2);
  row("axes_union", axes.both);
  row("Z", prod.x);
  row("Z_x_Z", prod.xy);
  ctx.summary["union"] = axes.both.value();
  ctx.summary["x_axis"] = axes.x1.value();
  ctx.summary["y_axis"] = axes.x2.value();
  ctx.summary["union_max"] = axes.union_max;
  ctx.summary["monotone"] = axes.monotone;
  ctx.summary["product"] = prod.xy.value();
  ctx.summary["factor"] = prod.x.value();
  ctx.summary["subadditive"] = prod.subadditive;
  ctx.summary["additive"] = prod.additive;
}

void cmd_rough(Context& ctx) {
  const Config& c = ctx.cfg;
  const std::string which = c.text("rough.witness", "z_grid");
  const Index E = positive(c, "rough.extent", which == "lattice_grid" ? 50 : 500);
  FiniteMetricSpace x, y;
  IndexList map;
  double a = 1.0, eps = 0.0;
  Index x0 = 0;
  if (which == "z_grid") {
    const double h = positive_real(c, "rough.h", 0.25);
    x = lattice(1, E, Norm::sup);
    y = real_grid(static_cast<double>(-E), static_cast<double>(E), h);
    for (Index i = 0; i <= 2 * E; ++i) map.push_back(static_cast<Index>(std::lround(i / h)));
    eps = 0.5 + h;
    x0 = E;
  } else if (which == "dilation") {
    x = lattice(1, E, Norm::sup);
    y = lattice(1, 2 * E, Norm::sup);
    for (Index i = -E; i <= E; ++i) map.push_back(2 * i + 2 * E);
    a = 2.0;
    eps = 1.0;
    x0 = E;
  } else {
    x = lattice(2, E, Norm::sup);
    y = grid_graph(2, E);
    map.resize(static_cast<std::size_t>(x.size()));
    for (Index i = 0; i < x.size(); ++i) map[i] = i;
    a = 2.0;
    x0 = (x.size() - 1) / 2;
  }
  VerifyOptions vo;
  vo.threads = threads(c);
  const RoughIsometryWitness w = verify(map, x, y, a, 0.0, eps, vo);
  ctx.summary["verified"] = w.verified;
  ctx.summary["residual_lower"] = w.residual_lower;
  ctx.summary["residual_upper"] = w.residual_upper;
  ctx.summary["residual_density"] = w.residual_density;
  if (!w.verified) throw DomainError("rough isometry witness rejected");

  AsymptoticOptions o = estimator_options(c);
  const InvarianceReport rep = invariance_suite(
      x, y, w, x0, o, o, grid(c, "rough.transfer_r", {1.0, 2.0, 4.0}),
      grid(c, "rough.transfer_R", {2.0, 4.0, 8.0, 16.0, 32.0}),
      positive(c, "rough.exact_cap", kDefaultExactCap), positive_real(c, "rough.tolerance", 0.15), vo);
  auto f = open_out(ctx, "transfer.csv");
  CsvWriter tw(f, c.header(), {"r", "R", "lhs_radius", "lhs", "rhs", "mode", "holds"});
  for (const auto& cell : rep.cells)
    tw.cell(cell.r).cell(cell.R).cell(cell.lhs_radius).cell(static_cast<long long>(cell.lhs))
        .cell(static_cast<long long>(cell.rhs)).cell(cell.mode).cell(cell.holds ? 1LL : 0LL).end_row();
  ctx.summary["d_inf_x"] = rep.x.value();
  ctx.summary["d_inf_y"] = rep.y.value();
  ctx.summary["gap"] = rep.gap;
  ctx.summary["gap_ok"] = rep.gap_ok;
  ctx.summary["exact_cells"] = rep.exact_cells;
  ctx.summary["transfer_ok"] = rep.transfer_ok;
  ctx.summary["c_X"] = rep.inverse.c_X;
  ctx.summary["c_Y"] = rep.inverse.c_Y;
}

struct HeatSetup {
  Built b;
  HeatModel model;
  ExhaustionOptions exhaustion;
  std::vector<double> radii;
  Eigen::VectorXd t;
  TimeWindow window;
};

HeatSetup heat_setup(const Config& c) {
  HeatSetup h;
  h.b = build_space(c);
  const std::string mode = c.text("heat.mode", "spectral");
  const Index cap = positive(c, "heat.cap", kSpectralCap);
  if (mode == "spectral") {
    h.model = HeatModel::spectral(h.b.space, cap);
  } else if (mode == "product") {
    if (h.b.kind != "torus" || c.integer("space.dims", 1) != 2)
      throw ConfigError("heat.mode = product needs space.kind = torus with space.dims = 2");
    const HeatModel f = HeatModel::spectral(torus(1, positive(c, "space.side", 256)), cap);
    h.model = HeatModel::product(f, f);
  } else {
    KrylovOptions ko;
    ko.threads = threads(c);
    h.model = HeatModel::krylov(h.b.space, ko);
  }
  const double ecc = h.b.space.eccentricity(h.b.center);
  h.window = usable_window(ecc);
  const double ppo = positive_real(c, "heat.ppo", 2.0);
  h.t = c.has("heat.t") ? [&] {
    const auto g = grid(c, "heat.t", {});
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size())));
  }()
                        : time_grid(h.window, ppo);
  h.radii = grid(c, "heat.radii", {ecc / 16.0, ecc / 8.0, ecc / 4.0, ecc / 2.0});
  h.exhaustion.exact_diagonal_limit = positive(c, "heat.exact_diagonal_limit", 4096);
  h.exhaustion.samples = positive(c, "heat.samples", 64);
  h.exhaustion.require_inside = c.boolean("heat.require_inside", true);
  h.exhaustion.threads = threads(c);
  if (mode == "krylov") h.exhaustion.seed = seed(c, "heat.mode = krylov may use stochastic traces");
  return h;
}

void cmd_heat(Context& ctx) {
  const Config& c = ctx.cfg;
  const HeatSetup h = heat_setup(c);
  const HeatTraceCurve curve = exhaustion_trace(h.model, h.b.space, h.b.center, h.radii, h.t, h.exhaustion);
  {
    auto f = open_out(ctx, "heat.csv");
    write_heat_csv(f, curve, c.header());
  }
  const NovikovShubin ns = novikov_shubin(curve.t, curve.trace, h.window.t_lo, h.window.t_hi,
                                          positive_real(c, "heat.min_decades", kMinDecades));
  ctx.summary["alpha0"] = ns.alpha0;
  ctx.summary["upper"] = ns.upper;
  ctx.summary["lower"] = ns.lower;
  ctx.summary["t_lo"] = ns.t_lo;
  ctx.summary["t_hi"] = ns.t_hi;
  ctx.summary["max_spread"] = curve.spread.size() ? curve.spread.maxCoeff() : 0.0;
  ctx.summary["stochastic"] = curve.stochastic;
}

void cmd_ns(Context& ctx) {
  const Config& c = ctx.cfg;
  const HeatSetup h = heat_setup(c);
  Alpha0Options o;
  o.dimension = estimator_options(c);
  o.radii = h.radii;
  o.exhaustion = h.exhaustion;
  o.points_per_octave = positive_real(c, "heat.ppo", 2.0);
  o.tolerance = positive_real(c, "ns.tolerance", 0.25);
  if (c.has("ns.cg_r")) o.cg_r_grid = grid(c, "ns.cg_r", {});
  const Alpha0Report rep = alpha0_equals_dinf_suite(h.model, h.b.space, h.b.center, o);
  {
    auto f = open_out(ctx, "heat.csv");
    write_heat_csv(f, rep.curve, c.header());
  }
  {
    auto f = open_out(ctx, "grid.csv");
    write_grid_csv(f, rep.dimension.cells, c.header());
  }
  if (rep.sandwich_lower.size() == rep.curve.t.size()) {
    auto f = open_out(ctx, "sandwich.csv");
    CsvWriter w(f, c.header(), {"t", "trace", "lower", "upper"});
    for (Eigen::Index i = 0; i < rep.curve.t.size(); ++i)
      w.cell(rep.curve.t[i]).cell(rep.curve.trace[i]).cell(rep.sandwich_lower[i])
          .cell(rep.sandwich_upper[i]).end_row();
  }
  ctx.summary["alpha0"] = rep.alpha.alpha0;
  ctx.summary["d_inf"] = rep.dimension.value();
  ctx.summary["gap"] = rep.gap;
  ctx.summary["gap_ok"] = rep.gap_ok;
  ctx.summary["max_spread"] = rep.max_spread;
  ctx.summary["sandwich_holds"] = rep.sandwich_holds;
  ctx.summary["t_lo"] = rep.alpha.t_lo;
  ctx.summary["t_hi"] = rep.alpha.t_hi;
  ctx.summary["A"] = rep.cg.A;
  ctx.summary["C"] = rep.cg.C;
  ctx.summary["C_prime"] = rep.cg.C_prime;
  ctx.summary["gamma"] = rep.cg.gamma;
  ctx.details["dimension"] = to_json(rep.dimension);
}

void write_volume_csv(const Context& ctx, const GrowthCurve& curve) {
  auto f = open_out(ctx, "end.csv");
  CsvWriter w(f, ctx.cfg.header(), {"r", "volume", "log_ratio"});
  const Eigen::VectorXd lr = log_ratios(curve);
  for (Eigen::Index i = 0; i < curve.size(); ++i)
    w.cell(curve.scale[i]).cell(curve.value[i]).cell(lr[i]).end_row();
}

void cmd_end(Context& ctx) {
  const Config& c = ctx.cfg;
  const std::string preset = c.text("end.preset", "davies");
  const double ppo = positive_real(c, "end.ppo", 4.0);
  const double tail = positive_real(c, "end.tail", 0.5);
  if (preset == "oscillating") {
    PiecewiseGrowthSpec spec;
    spec.base = positive_real(c, "end.base", spec.base);
    spec.exponent = positive_real(c, "end.exponent", spec.exponent);
    spec.breakpoints = static_cast<int>(positive(c, "end.breakpoints", spec.breakpoints));
    const OscillatingEnd end = oscillating_end(spec);
    for (int n = 1; n <= spec.breakpoints; ++n)
      ctx.summary["area_ratio_a" + std::to_string(n)] = asymptotic_area_ratio(end, n);
    if (!end.representable)
      throw ScaleError("oscillating end: breakpoints exceed double range; area ratios only");
    const OscillationReport rep = oscillation_gap(end, ppo, tail);
    write_volume_csv(ctx, rep.curve);
    ctx.summary["upper"] = rep.estimate.upper;
    ctx.summary["lower"] = rep.estimate.lower;
    ctx.summary["gap"] = rep.gap;
    ctx.summary["slope"] = rep.estimate.slope;
    return;
  }
  const int N = static_cast<int>(c.integer("end.N", 2));
  if (N < 2) throw ConfigError("end.N must be >= 2");
  const EndProfile profile = preset == "davies"     ? davies_end(N, positive_real(c, "end.D", 2.0))
                             : preset == "cylinder" ? cylinder_end(N)
                                                    : log_end();
  const double lo = positive_real(c, "end.r_lo", 10.0), hi = positive_real(c, "end.r_hi", 1e4);
  if (hi <= lo) throw ConfigError("end.r_hi must exceed end.r_lo");
  const GrowthCurve curve = end_volume_curve(profile, lo, hi, ppo);
  write_volume_csv(ctx, curve);
  const DimensionEstimate e = exponent_from_curve(curve, tail);
  ctx.summary["exponent"] = e.slope;
  ctx.summary["upper"] = e.upper;
  ctx.summary["lower"] = e.lower;
  if (hi >= 100.0 * lo) {
    const EnvelopeFit env = power_law_envelope(
        profile, lo, hi, ppo, positive_real(c, "end.settling_limit", kEnvelopeSettlingLimit));
    ctx.summary["settling"] = env.settling;
    ctx.summary["single_power_law"] = env.single_power_law;
  }
  ctx.details["estimate"] = to_json(e);
}

void cmd_report(Context& ctx) {
  const Config& c = ctx.cfg;
  const auto inputs = c.words("report.inputs");
  if (inputs.empty()) throw ConfigError("report needs report.inputs");
  auto f = open_out(ctx, "summary.csv");
  CsvWriter w(f, c.header(), {"source", "command", "key", "value"});
  Json merged = Json::array();
  for (const auto& name : inputs) {
    std::ifstream in(resolve(c, name));
    if (!in) throw ConfigError("report.inputs: cannot open '" + name + "'");
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::exception& e) {
      throw DomainError("report.inputs: '" + name + "' is not JSON: " + e.what());
    }
    if (doc.value("schema", "") != "asdim-result" || !doc.contains("summary"))
      throw DomainError("report.inputs: '" + name + "' is not an asdim result document");
    const std::string cmd = doc.value("command", "");
    for (const auto& [k, v] : doc["summary"].items()) w.cell(name).cell(cmd).cell(k).cell(scalar_text(v)).end_row();
    merged.push_back({{"source", name}, {"command", cmd}, {"summary", doc["summary"]}});
  }
  ctx.summary["documents"] = inputs.size();
  ctx.details["documents"] = merged;
}

const std::map<std::string, std::function<void(Context&)>>& commands() {
  static const std::map<std::string, std::function<void(Context&)>> table = {
      {"gen", cmd_gen},     {"dim", cmd_dim},   {"box", cmd_box}, {"axioms", cmd_axioms},
      {"rough", cmd_rough}, {"heat", cmd_heat}, {"ns", cmd_ns},   {"end", cmd_end},
      {"report", cmd_report}};
  return table;
}

// Flag names: every schema key, plus its last component when unique.
std::vector<std::pair<std::string, std::string>> flag_names() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& key : schema_keys()) {
    if (key == "command") continue;
    std::string names = "--" + key;
    const auto dot = key.rfind('.');
    if (dot != std::string::npos) {
      const std::string tail = key.substr(dot + 1);
      try {
        if (tail != "config" && tail != "out" && resolve_flag(tail) == key) names += ",--" + tail;
      } catch (const ConfigError&) {
      }
    }
    out.emplace_back(key, names);
  }
  return out;
}

int execute(const std::string& sub, const std::string& config_path, const std::string& out_dir,
            const std::map<std::string, std::string>& flags, std::ostream& out) {
  Context ctx;
  if (!config_path.empty()) ctx.cfg = Config::parse_file(config_path);
  for (const auto& [k, v] : flags) ctx.cfg.set(k, v);
  ctx.cfg.validate();
  ctx.command = sub;
  if (sub == "run") {
    if (config_path.empty()) throw ConfigError("run needs --config");
    if (!ctx.cfg.has("command")) throw ConfigError("config has no 'command' key");
    ctx.command = ctx.cfg.text("command", "");
  }
  ctx.out_dir = out_dir.empty() ? fs::path("asdim_out") : fs::path(out_dir);
  fs::create_directories(ctx.out_dir);
  try {
    commands().at(ctx.command)(ctx);
  } catch (...) {
    if (!ctx.summary.empty()) write_result(ctx);
    throw;
  }
  write_result(ctx);
  print_summary(ctx, out);
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Large-scale dimension estimates for finite metric spaces", "asdim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path, out_dir;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  const auto flags = flag_names();
  std::vector<std::string> names{"run"};
  for (const auto& [name, _] : commands()) names.push_back(name);
  std::vector<std::unique_ptr<std::string>> storage;
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name, name == "run" ? "run the command named in --config" : name);
    sub->add_option("--config", config_path, "INI config file");
    sub->add_option("--out", out_dir, "output directory (default asdim_out)");
    for (const auto& [key, spelled] : flags) {
      storage.push_back(std::make_unique<std::string>());
      options.emplace_back(key, sub->add_option(spelled, *storage.back(), "override " + key));
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return config_error;
  }
  std::map<std::string, std::string> set;
  for (std::size_t i = 0; i < options.size(); ++i)
    if (options[i].second->count() > 0) set[options[i].first] = *storage[i];

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return execute(sub, config_path, out_dir, set, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return config_error;
  } catch (const ResourceError& e) {
    err << "resource cap: " << e.what() << "\n";
    return resource_cap;
  } catch (const ScaleError& e) {
    err << "scale insufficient: " << e.what() << "\n";
    return scale_insufficient;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return failure;
  }
}

}  // namespace asdim::cli
