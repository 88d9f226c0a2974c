#pragma once

// The singular quadric {sum z_i^2 = 0} with the cone potential (3/2) s^(2/3), s = |z|^2, its
// special Lagrangian cones over tori and over S^2, and the distance of the families' leaves to
// those cones at large rho.

#include <optional>
#include <string_view>
#include <vector>

#include "cyslag/moment.hpp"
#include "cyslag/potential.hpp"
#include "cyslag/quadric.hpp"
#include "cyslag/slag.hpp"

namespace cyslag {

/// Points closer to the apex than this are rejected.
inline constexpr double kApexRadius = 1e-6;

class ConePoint {
 public:
  /// Validates |sum z_i^2| <= tol |z|^2 and |z| >= kApexRadius.
  explicit ConePoint(ComplexVector z, double tol = kConstraintTol);

  const ComplexVector& z() const noexcept { return z_; }
  double norm2() const noexcept { return z_.squaredNorm(); }

 private:
  ComplexVector z_;
};

/// u_cone'(s) = s^(-1/3) and u_cone''(s) = -s^(-4/3) / 3.
PotentialDerivatives cone_derivatives(double s);
/// u_cone(s) = (3/2) s^(2/3).
double cone_potential(double s);

double omega_cone(const ConePoint& z, const ComplexVector& v, const ComplexVector& w);
double metric_cone(const ConePoint& z, const ComplexVector& v, const ComplexVector& w);
/// det[conj(z), v_1, ..., v_n] / |z|^2.
Complex omega_big_cone(const ConePoint& z, const std::vector<ComplexVector>& frame);
RealVector cone_moment(const GroupPreset& preset, const ConePoint& z);
/// Finite-difference (1/2) i ddbar u_cone on (v, w), for tests.
double cone_oracle(const ConePoint& z, const ComplexVector& v, const ComplexVector& w);

enum class ConeKind {
  TORUS_A,  // orbit of (1, 0, i, 0) / sqrt 2 under the maximal torus
  TORUS_C,  // orbit of (i, 0, 1, 0) / sqrt 2
  SPHERE,   // (1 - i, (1 + i) u) / 2 with u on the unit sphere of R^3
};

std::string_view cone_label(ConeKind kind);

struct ConeSpec {
  ConeKind kind;
  double scale = 1.0;

  /// Cone point at angles (theta1, theta2) for the tori or (theta, phi) for the sphere.
  ComplexVector point(double a1, double a2) const;
  /// Radial direction followed by the two angular derivatives.
  std::vector<ComplexVector> frame(double a1, double a2) const;
};

/// Chordal distance from z / |z| to the unit link of the cone.
double distance_to_cone(ConeKind kind, const ComplexVector& z);

struct AsymptoticReport {
  double rho = 0.0;
  double t = 0.0;
  double dist_to_cone = 0.0;
  /// SO3: |t - pi/4|. T2: distance of t to the angle the chosen cone forces (0 or pi for
  /// TORUS_A, pi/2 for TORUS_C); for (c1, c2) != 0 the distance in t is not defined and is NaN.
  double t_deviation = 0.0;
  ConeKind cone = ConeKind::SPHERE;
};

/// Traces the profile curve of the leaf, inserts its crossing with the level rho, and measures
/// the nearest crossing against the limiting cones. Throws DomainError when no traced branch
/// reaches rho and ArgumentError for SOn leaves.
AsymptoticReport asymptotic_distance(const LeafSpec& spec, double rho, const TraceOptions& opt = {});

}  // namespace cyslag
