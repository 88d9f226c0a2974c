#include "cyslag/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "cyslag/cy_structure.hpp"
#include "cyslag/errors.hpp"

namespace cyslag {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ArgumentError("CSV table has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::string CsvTable::header_value(const std::string& key) const {
  for (const auto& [k, v] : header)
    if (k == key) return v;
  return {};
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (const auto& [k, v] : table.header) out << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_columns = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      auto trim = [](std::string& s) {
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
      };
      trim(key);
      trim(value);
      table.header.emplace_back(key, value);
      continue;
    }
    if (!have_columns) {
      table.columns = split(line);
      have_columns = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != table.columns.size()) {
      throw ArgumentError("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                          " cells, expected " + std::to_string(table.columns.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      // strtod rather than stod: subnormals set ERANGE but are still exactly representable.
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size())
        throw ArgumentError("CSV line " + std::to_string(line_no) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_columns) throw ArgumentError("CSV input has no column line");
  return table;
}

nlohmann::json point_to_json(const ComplexVector& z) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < z.size(); ++i) j.push_back({z[i].real(), z[i].imag()});
  return j;
}

ComplexVector point_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ArgumentError("point must be a JSON array of [re, im] pairs");
  ComplexVector z(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ArgumentError("point entry " + std::to_string(i) + " is not an [re, im] pair");
    }
    z[static_cast<Eigen::Index>(i)] = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return z;
}

namespace {

std::vector<std::string> parameter_names(Family f) {
  if (f == Family::T2) return {"t", "rho", "phi", "psi"};
  return {"t", "rho"};
}

}  // namespace

CsvTable leaf_sample_table(const LeafSample& sample) {
  CsvTable table;
  const int dim = sample.spec.profile->n() + 1;
  table.columns.emplace_back("branch");
  for (const auto& p : parameter_names(sample.spec.family)) table.columns.push_back(p);
  for (int i = 0; i < dim; ++i) {
    table.columns.push_back("re_z" + std::to_string(i));
    table.columns.push_back("im_z" + std::to_string(i));
  }
  for (std::size_t k = 0; k < sample.spec.constants.size(); ++k)
    table.columns.push_back("residual" + std::to_string(k + 1));
  table.columns.emplace_back("frame_conditioning");
  table.columns.emplace_back("frame_ok");

  for (const auto& s : sample.points) {
    std::vector<double> row{static_cast<double>(s.branch)};
    for (Eigen::Index k = 0; k < s.params.size(); ++k) row.push_back(s.params[k]);
    for (int i = 0; i < dim; ++i) {
      row.push_back(s.z.z()[i].real());
      row.push_back(s.z.z()[i].imag());
    }
    RealVector r;
    try {
      r = leaf_residual(sample.spec, s.z);
    } catch (const BranchError&) {
      r = RealVector::Constant(static_cast<Eigen::Index>(sample.spec.constants.size()), std::nan(""));
    }
    for (Eigen::Index k = 0; k < r.size(); ++k) row.push_back(r[k]);
    row.push_back(realified_conditioning(s.frame));
    row.push_back(s.frame_ok ? 1.0 : 0.0);
    table.rows.push_back(std::move(row));
  }
  return table;
}

double revalidate_leaf_table(const LeafSpec& spec, const CsvTable& table) {
  const int dim = spec.profile->n() + 1;
  std::vector<std::size_t> re, im;
  for (int i = 0; i < dim; ++i) {
    re.push_back(table.column("re_z" + std::to_string(i)));
    im.push_back(table.column("im_z" + std::to_string(i)));
  }
  double worst = 0.0;
  for (const auto& row : table.rows) {
    ComplexVector z(dim);
    for (int i = 0; i < dim; ++i) z[i] = Complex(row[re[i]], row[im[i]]);
    try {
      worst = std::max(worst, leaf_residual(spec, QuadricPoint(z)).cwiseAbs().maxCoeff());
    } catch (const BranchError&) {
      // Rows on the arccos cut were exported with NaN residuals and stay unchecked.
    }
  }
  return worst;
}

}  // namespace cyslag
