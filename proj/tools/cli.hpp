#pragma once

// Command-line front end. `run` takes the arguments after the program name and writes to the
// given streams, so tests can drive every subcommand in-process.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyslag/io.hpp"

namespace cyslag::cli {

enum ExitCode : int { kPass = 0, kVerificationFailure = 1, kUsageError = 2, kIoError = 3, kEmptyResult = 4 };

struct RunConfig {
  int n = 3;
  double c = 1.0;
  std::string family;              // T2, SO3, SOn; empty means every family available for n
  std::vector<double> constants;   // leaf constants, or the contour levels of phase-portrait
  double tol = 1e-8;               // bound on the special Lagrangian statistics
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  std::string out;                 // empty: standard output
  std::string format = "csv";
  bool force = false;
  std::string equation = "SO3";    // phase-portrait: T2_ZERO or SO3
  double rho_max = 3.0;
  std::vector<double> rho_values{2, 3, 4, 5, 6, 7, 8};
};

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// The verify report; "pass" is true iff every suite passes.
nlohmann::json verify_report(const RunConfig& cfg);

/// Contour polylines of sin(2t) sinh(2s) = c (T2_ZERO) or 2s - cos(2t) sinh(2s) = c (SO3)
/// with columns c, branch, vertex, t, s, residual. Levels without a contour are listed in `notes`.
CsvTable phase_portrait(const std::string& equation, const std::vector<double>& levels, double rho_max,
                        std::vector<std::string>& notes);

/// Residual of the phase-portrait equation at (t, s).
double phase_residual(const std::string& equation, double c, double t, double s);

}  // namespace cyslag::cli
