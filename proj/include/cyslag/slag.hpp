#pragma once

// Cohomogeneity-one special Lagrangian families of the quadric:
//   T2   torus-invariant leaves in n = 3, cut out by
//        u' Im(z0 conj z1) = c1, u' Im(z2 conj z3) = c2, Im(z0^2 + z1^2) = c3;
//   SO3  leaves invariant under the rotations fixing the first axis in n = 3, cut out by
//        u' Im(z1 conj z2) = c1, u' Im(z2 conj z3) = c2, Im(2 tau - sin 2 tau) = c with tau = arccos z0;
//   SOn  the same construction for any n >= 2 with Im F(arccos z0) = c, F = Int_0^tau sin^(n-1).
// Each leaf is a group orbit of a curve in a low-dimensional profile space; the curve is
// traced by continuation and then swept by the group to produce framed samples.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cyslag/continuation.hpp"
#include "cyslag/potential.hpp"
#include "cyslag/quadric.hpp"

namespace cyslag {

enum class Family { T2, SO3, SOn };

std::string_view family_label(Family f);
std::optional<Family> parse_family(std::string_view label);

struct LeafSpec {
  Family family;
  /// T2: (c1, c2, c3). SO3: (c1, c2, c). SOn: (c_2, ..., c_n, c).
  std::vector<double> constants;
  std::shared_ptr<const PotentialProfile> profile;
};

/// Validates the constant count, finiteness, and the dimension required by the family.
LeafSpec make_leaf_spec(Family family, std::vector<double> constants, std::shared_ptr<const PotentialProfile> profile);

/// Im(2 arccos z0 - 2 z0 sin(arccos z0)) with the principal arccos. Throws BranchError on the cut.
double so3_level(Complex z0);
/// Int_0^tau sin^(n-1)(s) ds along the straight segment from 0 to tau.
Complex son_primitive(int n, Complex tau);
/// Im son_primitive(n, arccos z0). Throws BranchError on the cut.
double son_level(int n, Complex z0);

/// Values of the defining functions at z (the constants of the leaf through z).
LeafSpec classify_point(std::shared_ptr<const PotentialProfile> profile, const QuadricPoint& z, Family family);
/// Defining functions minus the spec's constants.
RealVector leaf_residual(const LeafSpec& spec, const QuadricPoint& z);
/// Residuals of the SOn system at z for constants (c_2, ..., c_n, c).
RealVector son_family_residual(const PotentialProfile& profile, const QuadricPoint& z,
                               const std::vector<double>& constants);

// ---- Profile coordinates -------------------------------------------------------------

/// Torus slice point for profile parameters (t, rho, phi, psi):
/// x = (cos t, 0, sin t, 0), xi = rho (-cos phi sin t, sin phi cos psi, cos phi cos t, sin phi sin psi).
ComplexVector t2_slice_point(const RealVector& p);
/// d(slice point)/d(parameters) applied to the parameter velocity dp.
ComplexVector t2_slice_velocity(const RealVector& p, const RealVector& dp);
/// (cos tau, sin tau, 0, ..., 0) in C^{n+1} with tau = t + i rho.
ComplexVector rotation_slice_point(int n, double t, double rho);

/// 2 rho - cos(2t) sinh(2 rho) = c in (t, rho).
class So3CurveSystem : public ImplicitSystem {
 public:
  So3CurveSystem(double c, double rho_max) : c_(c), rho_max_(rho_max) {}
  int unknowns() const override { return 2; }
  RealVector residual(const RealVector& x) const override;
  RealMatrix jacobian(const RealVector& x) const override;
  RealVector row_scales(const RealVector& x) const override;
  bool in_chart(const RealVector& x) const override;

 private:
  double c_;
  double rho_max_;
};

/// sin(2t) sinh(2 rho) = c in (t, rho): the zero-moment torus leaves with phi = 0 (c = -2 c3).
class T2ZeroCurveSystem : public ImplicitSystem {
 public:
  T2ZeroCurveSystem(double c, double rho_max) : c_(c), rho_max_(rho_max) {}
  int unknowns() const override { return 2; }
  RealVector residual(const RealVector& x) const override;
  RealMatrix jacobian(const RealVector& x) const override;
  RealVector row_scales(const RealVector& x) const override;
  bool in_chart(const RealVector& x) const override;

 private:
  double c_;
  double rho_max_;
};

/// Im F(t + i rho) = c with F = Int_0^tau sin^(n-1).
class SonCurveSystem : public ImplicitSystem {
 public:
  SonCurveSystem(int n, double c, double rho_max) : n_(n), c_(c), rho_max_(rho_max) {}
  int unknowns() const override { return 2; }
  RealVector residual(const RealVector& x) const override;
  RealMatrix jacobian(const RealVector& x) const override;
  RealVector row_scales(const RealVector& x) const override;
  bool in_chart(const RealVector& x) const override;

 private:
  int n_;
  double c_;
  double rho_max_;
};

/// The three torus equations in (t, rho, phi, psi), written through w(2 rho) = u'(cosh 2 rho) sinh 2 rho.
class T2CurveSystem : public ImplicitSystem {
 public:
  T2CurveSystem(std::shared_ptr<const PotentialProfile> profile, double c1, double c2, double c3, double rho_max);
  int unknowns() const override { return 4; }
  RealVector residual(const RealVector& x) const override;
  RealMatrix jacobian(const RealVector& x) const override;
  RealVector row_scales(const RealVector& x) const override;
  bool in_chart(const RealVector& x) const override;

 private:
  std::shared_ptr<const PotentialProfile> profile_;
  double c1_, c2_, c3_;
  double rho_max_;
};

struct TraceOptions {
  double rho_max = 3.0;
  double t_min = 0.0;
  double t_max = M_PI;
  int scan_columns = 73;
  int scan_rows = 61;
  int scan_samples = 600;          // samples per scan line when bracketing roots
  std::size_t max_branches = 8;
  int random_starts = 64;           // T2 with (c1, c2) != 0
  std::uint64_t seed = 1;
  ContinuationOptions continuation;
};

struct ProfileCurve {
  Family family;
  /// True when the T2 system was reduced to Im(z0^2 + z1^2) = c3 with phi = psi = 0 because c1 = c2 = 0.
  bool reduced = false;
  std::vector<TracedBranch> branches;
  std::vector<std::string> messages;

  bool empty() const noexcept { return branches.empty(); }
  std::size_t vertex_count() const noexcept;
};

/// Seeds and traces every branch of a scalar equation in (t, rho) found by column and row scans.
std::vector<TracedBranch> trace_plane_curves(const ImplicitSystem& sys, const TraceOptions& opt);

/// Traces the profile curve of a leaf. Profile coordinates: T2 (t, rho, phi, psi); SO3/SOn (t, rho).
ProfileCurve trace_profile_curve(const LeafSpec& spec, const TraceOptions& opt = {});

// ---- Leaf samples and verification ---------------------------------------------------

struct LeafSamplePoint {
  QuadricPoint z;
  RealVector params;                      // profile coordinates of the curve point
  std::vector<double> group_angles;       // T2 (theta1, theta2); SO3 (theta, phi); SOn empty
  std::size_t branch = 0;
  std::vector<RealMatrix> frame_generators;  // Lie algebra elements whose fields span the orbit directions
  std::vector<ComplexVector> frame;          // orbit directions followed by the curve velocity
  bool frame_ok = false;
};

struct LeafSample {
  LeafSpec spec;
  std::vector<LeafSamplePoint> points;
  std::size_t excluded_frames = 0;
};

struct SampleOptions {
  std::size_t curve_points = 40;   // per branch, evenly spread over the branch vertices
  int group_grid = 6;              // angles per group coordinate
  std::uint64_t seed = 1;          // SOn group elements
};

/// Sweeps the traced curve by the group. Throws ArgumentError if the curve is empty.
LeafSample sample_leaf(const LeafSpec& spec, const ProfileCurve& curve, const SampleOptions& opt = {});

struct SlagReport {
  double max_omega = 0.0;     // max |omega(Y_i, Y_j)| / (|Y_i|_g |Y_j|_g)
  double max_im_omega = 0.0;  // max |Im Omega(Y)| / |Omega(Y)|
  double calibration_cv = 0.0;  // coefficient of variation of |Omega(Y)| / vol_g(Y)
  double max_leaf_residual = 0.0;
  std::size_t frames_used = 0;
};

SlagReport verify_special_lagrangian(const PotentialProfile& profile, const LeafSample& sample);

/// Moves every sample by `amplitude` along a random unit tangent direction and rebuilds its
/// frame from the same generators and the curve velocity projected to the new tangent space.
LeafSample nudge_sample(const LeafSample& sample, double amplitude, std::uint64_t seed);

}  // namespace cyslag
