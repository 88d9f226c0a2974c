#pragma once

// Pseudo-arclength continuation of the one-dimensional solution set of F(x) = 0,
// F : R^{m+1} -> R^m. Euler predictor along the Jacobian null vector, Newton corrector
// on the bordered system [F(x); t.(x - x_pred)], adaptive step.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyslag/quadric.hpp"

namespace cyslag {

class ImplicitSystem {
 public:
  virtual ~ImplicitSystem() = default;
  virtual int unknowns() const = 0;
  virtual RealVector residual(const RealVector& x) const = 0;
  virtual RealMatrix jacobian(const RealVector& x) const = 0;
  /// Per-equation magnitudes used to make residuals and Jacobian rows dimensionless.
  virtual RealVector row_scales(const RealVector& x) const { return RealVector::Ones(residual(x).size()); }
  /// False once x leaves the region where the system describes the intended object.
  virtual bool in_chart(const RealVector&) const { return true; }
  /// Brings x back to a canonical representative (for example wrapping angles). Identity by default.
  virtual RealVector canonical(const RealVector& x) const { return x; }

  /// max_i |F_i(x)| / row_scales_i(x).
  double scaled_residual(const RealVector& x) const;
};

struct ContinuationOptions {
  double initial_step = 1e-2;
  double min_step = 1e-9;
  double max_step = 0.05;
  double max_arclength = 50.0;
  std::size_t max_steps = 1000000;
  double tolerance = 1e-12;  // scaled residual accepted by the corrector
  double rank_tol = 1e-7;    // smallest singular value of the row-scaled Jacobian
  /// Each (coordinate, value) inserts the exact crossing of that coordinate level as a vertex.
  std::vector<std::pair<int, double>> anchors;
};

struct ContinuationNotice {
  enum class Kind { BranchPoint, Truncation, ClosedLoop, StepFailure, StepLimit, ArcLimit };
  Kind kind;
  RealVector x;
  std::string message;
};

std::string notice_label(ContinuationNotice::Kind kind);

struct TracedBranch {
  std::vector<RealVector> points;
  std::vector<RealVector> tangents;  // unit null vectors, oriented along the polyline
  std::vector<ContinuationNotice> notices;
  bool closed = false;
  double max_scaled_residual = 0.0;
};

/// Unit null vector of the row-scaled Jacobian, with sign chosen so that it has a positive
/// dot product with `orient` (if given), and the ratio of its smallest to largest singular value.
std::pair<RealVector, double> null_direction(const ImplicitSystem& sys, const RealVector& x,
                                             const RealVector* orient = nullptr);

/// Newton with minimum-norm steps on the underdetermined system. Returns nullopt unless the
/// scaled residual reaches `tol` within `max_iter` iterations.
std::optional<RealVector> newton_min_norm(const ImplicitSystem& sys, RealVector x, double tol = 1e-12,
                                          int max_iter = 50);

/// Newton on [F(x); x[coord] - value]. Returns nullopt on failure.
std::optional<RealVector> solve_with_fixed_coordinate(const ImplicitSystem& sys, RealVector x, int coord,
                                                      double value, double tol = 1e-12);

/// Traces the branch through `seed` (which must already solve the system) in both directions.
TracedBranch trace_branch(const ImplicitSystem& sys, const RealVector& seed, const ContinuationOptions& opt);

/// Euclidean distance from x to the polyline.
double distance_to_polyline(const std::vector<RealVector>& polyline, const RealVector& x);

}  // namespace cyslag
