#include "asdim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "asdim/errors.hpp"

namespace asdim {
namespace {

Json metadata_to_json(const SpaceMetadata& m) {
  Json j;
  j["name"] = m.name;
  j["units"] = m.units;
  j["resolution"] = m.resolution;
  j["params"] = Json::object();
  for (const auto& [k, v] : m.params) j["params"][k] = v;
  return j;
}

SpaceMetadata metadata_from_json(const Json& j) {
  SpaceMetadata m;
  if (j.is_null()) return m;
  m.name = j.value("name", "");
  m.units = j.value("units", "dimensionless");
  m.resolution = j.value("resolution", 0.0);
  if (j.contains("params"))
    for (const auto& [k, v] : j["params"].items()) m.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return m;
}

}  // namespace

Json space_to_json(const FiniteMetricSpace& space, Index matrix_cap) {
  Json doc;
  doc["format"] = "asdim-space";
  doc["version"] = kSpaceFormatVersion;
  Norm norm = Norm::euclidean;
  if (const auto* pts = point_coordinates(space, &norm)) {
    doc["kind"] = "points";
    doc["norm"] = std::string(to_string(norm));
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < pts->rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < pts->cols(); ++k) row.push_back((*pts)(i, k));
      rows.push_back(std::move(row));
    }
    doc["points"] = std::move(rows);
  } else if (const Graph* g = space.graph()) {
    doc["kind"] = "graph";
    doc["vertices"] = g->vertex_count();
    Json edges = Json::array();
    for (Index v = 0; v < g->vertex_count(); ++v) {
      const auto nb = g->neighbors(v);
      const auto w = g->weights(v);
      for (std::size_t k = 0; k < nb.size(); ++k)
        if (nb[k] > v) edges.push_back(Json::array({v, nb[k], w[k]}));
    }
    doc["edges"] = std::move(edges);
  } else {
    if (space.size() > matrix_cap)
      throw ResourceError("space file: " + std::to_string(space.size()) +
                          " points exceed the matrix export cap " + std::to_string(matrix_cap));
    doc["kind"] = "matrix";
    doc["size"] = space.size();
    Json tri = Json::array();
    for (Index i = 1; i < space.size(); ++i)
      for (Index j = 0; j < i; ++j) tri.push_back(space.distance(i, j));
    doc["matrix"] = std::move(tri);
  }
  if (space.has_measure()) {
    const auto& w = space.measure_weights();
    doc["measure"] = std::vector<double>(w.data(), w.data() + w.size());
  }
  doc["metadata"] = metadata_to_json(space.metadata());
  return doc;
}

FiniteMetricSpace space_from_json(const Json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != "asdim-space")
      throw DomainError("space file: missing format tag \"asdim-space\"");
    const int version = doc.at("version").get<int>();
    if (version != kSpaceFormatVersion)
      throw DomainError("space file: unsupported version " + std::to_string(version));
    const std::string kind = doc.at("kind").get<std::string>();
    const SpaceMetadata meta = metadata_from_json(doc.value("metadata", Json()));
    FiniteMetricSpace space;
    if (kind == "points") {
      const auto& rows = doc.at("points");
      if (rows.empty()) throw DomainError("space file: no points");
      const auto dims = static_cast<Eigen::Index>(rows[0].size());
      Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), dims);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != dims)
          throw DomainError("space file: ragged point row " + std::to_string(i));
        for (Eigen::Index k = 0; k < dims; ++k) pts(static_cast<Eigen::Index>(i), k) = rows[i][k].get<double>();
      }
      space = from_points(std::move(pts), norm_from_string(doc.value("norm", "euclidean")), meta);
    } else if (kind == "graph") {
      const Index n = doc.at("vertices").get<Index>();
      if (n <= 0) throw DomainError("space file: no vertices");
      std::vector<Edge> edges;
      for (const auto& e : doc.at("edges")) {
        Edge edge{e.at(0).get<Index>(), e.at(1).get<Index>(), e.size() > 2 ? e.at(2).get<double>() : 1.0};
        if (edge.u < 0 || edge.u >= n || edge.v < 0 || edge.v >= n)
          throw DomainError("space file: edge endpoint out of range");
        edges.push_back(edge);
      }
      space = from_graph(Graph::from_edges(n, edges), meta);
    } else if (kind == "matrix") {
      const Index n = doc.at("size").get<Index>();
      if (n <= 0) throw DomainError("space file: empty matrix");
      const auto& tri = doc.at("matrix");
      if (tri.size() != static_cast<std::size_t>(n) * (n - 1) / 2)
        throw DomainError("space file: lower triangle has the wrong length");
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
      std::size_t k = 0;
      for (Index i = 1; i < n; ++i)
        for (Index j = 0; j < i; ++j) d(i, j) = d(j, i) = tri[k++].get<double>();
      space = from_matrix(std::move(d), meta);
    } else {
      throw DomainError("space file: unknown kind \"" + kind + "\"");
    }
    if (doc.contains("measure")) {
      const auto w = doc["measure"].get<std::vector<double>>();
      if (static_cast<Index>(w.size()) != space.size())
        throw DomainError("space file: measure length differs from the point count");
      space = space.with_measure(Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
    }
    return space;
  } catch (const Json::exception& e) {
    throw DomainError(std::string("space file: ") + e.what());
  }
}

void save_space(const FiniteMetricSpace& space, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << space_to_json(space).dump(1) << '\n';
}

FiniteMetricSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
  return space_from_json(doc);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const CsvHeader& header, const std::vector<std::string>& columns)
    : out_(out), columns_(columns.size()) {
  for (const auto& [k, v] : header) out_ << "# " << k << '=' << v << '\n';
  for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double value) { return cell(format_number(value)); }
CsvWriter& CsvWriter::cell(long long value) { return cell(std::to_string(value)); }
CsvWriter& CsvWriter::cell(const std::string& value) {
  out_ << (filled_++ ? "," : "") << value;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw DomainError("csv: row has the wrong number of cells");
  out_ << '\n';
  filled_ = 0;
}

void write_boundedness_csv(std::ostream& out, const std::vector<BoundednessRow>& rows,
                           const CsvHeader& header) {
  CsvWriter csv(out, header, {"r", "beta1", "beta2"});
  for (const auto& row : rows) {
    csv.cell(row.r).cell(row.beta1).cell(row.beta2);
    csv.end_row();
  }
}

void write_grid_csv(std::ostream& out, const std::vector<CoveringCell>& cells, const CsvHeader& header) {
  CsvWriter csv(out, header, {"r", "R", "ball_size", "n_greedy", "nu_greedy", "n_2r"});
  for (const auto& c : cells) {
    csv.cell(c.r).cell(c.R).cell(static_cast<long long>(c.ball_size)).cell(static_cast<long long>(c.cover));
    csv.cell(static_cast<long long>(c.packing)).cell(static_cast<long long>(c.cover_2r));
    csv.end_row();
  }
}

void write_curve_csv(std::ostream& out, const AsymptoticResult& result, const CsvHeader& header) {
  CsvWriter csv(out, header, {"kind", "r", "R", "value", "log_ratio"});
  for (const auto& level : result.levels)
    for (const GrowthCurve* curve : {&level.cover, &level.packing}) {
      const std::string kind = curve == &level.cover ? "cover" : "packing";
      for (Eigen::Index k = 0; k < curve->scale.size(); ++k) {
        const double R = curve->scale[k], v = curve->value[k];
        csv.cell(kind).cell(level.r).cell(R).cell(v).cell(R > 1.0 ? std::log(v) / std::log(R) : std::nan(""));
        csv.end_row();
      }
    }
}

void write_heat_csv(std::ostream& out, const HeatTraceCurve& curve, const CsvHeader& header) {
  std::vector<std::string> columns{"t", "trace"};
  for (double rho : curve.radii) columns.push_back("k" + format_number(rho));
  columns.emplace_back("spread");
  CsvWriter csv(out, header, columns);
  for (Eigen::Index j = 0; j < curve.t.size(); ++j) {
    csv.cell(curve.t[j]).cell(curve.trace[j]);
    for (Eigen::Index k = 0; k < curve.per_k.rows(); ++k) csv.cell(curve.per_k(k, j));
    csv.cell(curve.spread[j]);
    csv.end_row();
  }
}

Json to_json(const DimensionEstimate& e) {
  Json j;
  j["value"] = e.slope;
  j["upper"] = e.upper;
  j["lower"] = e.lower;
  j["slope"] = e.slope;
  j["intercept"] = e.intercept;
  j["residual"] = e.residual;
  j["window"] = {{"begin", e.window_begin}, {"end", e.window_end}, {"scale_min", e.scale_min},
                 {"scale_max", e.scale_max}};
  j["scale_cap"] = std::isfinite(e.scale_cap) ? Json(e.scale_cap) : Json(nullptr);
  j["monotone"] = e.monotone;
  j["stabilized"] = e.stabilized;
  return j;
}

Json to_json(const AsymptoticResult& r) {
  Json j;
  j["estimate"] = to_json(r.estimate);
  j["packing_estimate"] = to_json(r.packing_estimate);
  j["R_values"] = r.R_values;
  j["R_cap"] = std::isfinite(r.R_cap) ? Json(r.R_cap) : Json(nullptr);
  j["stabilized"] = r.stabilized;
  j["packing_agrees"] = r.packing_agrees;
  Json levels = Json::array();
  for (const auto& level : r.levels)
    levels.push_back({{"r", level.r}, {"cover", to_json(level.cover_estimate)},
                      {"packing", to_json(level.packing_estimate)}});
  j["levels"] = std::move(levels);
  return j;
}

}  // namespace asdim
