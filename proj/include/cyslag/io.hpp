#pragma once

// Plain-text exchange formats. CSV files carry '#'-prefixed "key: value" header lines followed
// by one column-name line and numeric rows written with 17 significant digits, so that every
// double survives a round trip exactly. Points in JSON are arrays of [re, im] pairs.

#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cyslag/quadric.hpp"
#include "cyslag/slag.hpp"

namespace cyslag {

inline constexpr const char* kToolVersion = "1.0.0";

/// printf("%.17g").
std::string format_double(double x);

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a named column. Throws ArgumentError when missing.
  std::size_t column(const std::string& name) const;
  /// Value of a header key, or the empty string.
  std::string header_value(const std::string& key) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
/// Throws ArgumentError on a malformed file (row width mismatch, non-numeric cell).
CsvTable read_csv(std::istream& in);

nlohmann::json point_to_json(const ComplexVector& z);
/// Throws ArgumentError unless j is an array of [re, im] pairs.
ComplexVector point_from_json(const nlohmann::json& j);

/// One row per sample: branch, profile parameters, ambient coordinates (re, im interleaved),
/// leaf residuals, frame conditioning and the frame flag.
CsvTable leaf_sample_table(const LeafSample& sample);

/// Recomputes the leaf residual of every row of a table produced by leaf_sample_table.
/// Returns the largest absolute residual.
double revalidate_leaf_table(const LeafSpec& spec, const CsvTable& table);

}  // namespace cyslag
