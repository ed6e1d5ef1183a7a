#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "asdim/estimator.hpp"
#include "asdim/heat.hpp"
#include "asdim/metric_space.hpp"

namespace asdim {

using Json = nlohmann::ordered_json;

constexpr int kSpaceFormatVersion = 1;
constexpr int kResultSchemaVersion = 1;

/// Space document: {"format": "asdim-space", "version", "kind", ...}.
///
/// kind = points: "norm", "points" (coordinate rows); graph: "vertices",
/// "edges" ([i, j, w] rows); matrix: "size", "matrix" (row-major lower
/// triangle, diagonal excluded). Optional "measure" and "metadata".
/// Spaces without stored coordinates or graph are written as matrices.
Json space_to_json(const FiniteMetricSpace& space, Index matrix_cap = 4000);
FiniteMetricSpace space_from_json(const Json& doc);

void save_space(const FiniteMetricSpace& space, const std::filesystem::path& path);
FiniteMetricSpace load_space(const std::filesystem::path& path);

/// Shortest round-tripping decimal form; the one number formatter used in
/// every CSV and report so outputs are byte-stable.
std::string format_number(double value);

using CsvHeader = std::vector<std::pair<std::string, std::string>>;

/// CSV with "# key=value" header lines followed by the column row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const CsvHeader& header, const std::vector<std::string>& columns);

  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(const std::string& value);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Columns r, beta1, beta2.
void write_boundedness_csv(std::ostream& out, const std::vector<BoundednessRow>& rows,
                           const CsvHeader& header = {});
/// Columns r, R, ball_size, n_greedy, nu_greedy, n_2r.
void write_grid_csv(std::ostream& out, const std::vector<CoveringCell>& cells,
                    const CsvHeader& header = {});
/// Columns kind, r, R, value, log_ratio (cover and packing curves per r).
void write_curve_csv(std::ostream& out, const AsymptoticResult& result, const CsvHeader& header = {});
/// Columns t, trace, then k<rho> per exhaustion level.
void write_heat_csv(std::ostream& out, const HeatTraceCurve& curve, const CsvHeader& header = {});

Json to_json(const DimensionEstimate& e);
Json to_json(const AsymptoticResult& r);

}  // namespace asdim
