// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/grid.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace vortexlab {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form of a double ("nan", "inf", "-inf" for
// non-finite values), independent of the locale.
std::string format_number(double x);

// CSV table with a header row; cells are written verbatim, joined by commas.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(std::vector<std::string> cells);
  // Appends a row of numbers formatted with format_number.
  CsvTable& numbers(const std::vector<double>& values);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string sha256_hex(const std::string& bytes);

// Throws IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

// Collects the files of one run and writes manifest.json listing each with
// its size and SHA-256 next to the resolved configuration.
class ArtifactWriter {
 public:
  // Creates dir (and parents). Throws IoError.
  explicit ArtifactWriter(std::string dir);
  const std::string& dir() const { return dir_; }
  void text(const std::string& name, const std::string& bytes);
  void json(const std::string& name, const Json& value);
  void csv(const std::string& name, const CsvTable& table);
  // Row-major float64 little-endian dump of a node field (x fastest), plus a
  // sidecar name.json with {nx, ny, bbox, field_name}.
  void field(const std::string& name, const GridSystem& grid, const Eigen::VectorXd& values);
  // Writes manifest.json; files are listed in the order written.
  void manifest(const Json& config);

 private:
  std::string dir_;
  Json files_ = Json::array();
};

struct FieldDump {
  int nx = 0;
  int ny = 0;
  double bbox[4] = {0.0, 0.0, 0.0, 0.0};  // xmin, ymin, xmax, ymax
  std::string field_name;
  std::vector<double> values;
};
// Reads a dump through its sidecar (path may name either file). Throws IoError.
FieldDump read_field_dump(const std::string& path);

// Subset of TOML: [table] and [a.b] headers, key = value with strings,
// numbers, booleans and (nested) single-line arrays, # comments. Throws
// ConfigInvalid with the line number.
Json parse_toml(const std::string& text);

// JSON or TOML by extension (.toml) or first character. Throws IoError or ConfigInvalid.
Json load_config_file(const std::string& path);

}  // namespace vortexlab
