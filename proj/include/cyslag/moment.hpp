#pragma once

// Moment maps mu_A(z) = (1/2) u'(|z|^2) <Az, iz> of subgroup actions on the quadric,
// the Hamiltonian identity d(mu_A) = -omega(Az, .), isotropy of orbits, and the sampling
// scan showing that the zero level of the homogeneous actions only meets the zero section.

#include <cstdint>

#include "json.hpp"

#include "cyslag/potential.hpp"
#include "cyslag/quadric.hpp"

namespace cyslag {

/// One component per generator, for a radial potential with first derivative u_prime at z.
RealVector moment_radial(double u_prime, const GroupPreset& preset, const ComplexVector& z);
RealVector moment(const PotentialProfile& profile, const GroupPreset& preset, const QuadricPoint& z);

/// Max over generators of |d(mu_A)(v) + omega(Az, v)| divided by (u' + |u''||z|^2)|Az||v|,
/// with d(mu_A)(v) taken by Richardson-refined central differences along a curve in the quadric.
double moment_differential_check(const PotentialProfile& profile, const GroupPreset& preset, const TangentVector& v);

/// True iff |omega(A_i z, A_j z)| <= tol * |A_i z|_g |A_j z|_g for all generator pairs.
bool isotropy_check(const PotentialProfile& profile, const GroupPreset& preset, const QuadricPoint& z,
                    double tol = 1e-9);

/// Largest derivative of any moment component along any generator flow, by finite differences
/// of mu(exp(sA) z), scaled like isotropy_check.
double orbit_moment_drift(const PotentialProfile& profile, const GroupPreset& preset, const QuadricPoint& z);

/// Levels fixed by the coadjoint action: every level for abelian groups, only 0 otherwise.
bool admissible_level(PresetName name, int n, const RealVector& level, double tol = 1e-12);

struct HomogeneousScanReport {
  PresetName preset;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double min_scaled_norm = 0.0;  // min |mu| / (u' sinh 2 rho) over the samples
  double max_scaled_norm = 0.0;
  /// For SO3_TILDE: max | |r| / rho - 1 | for the linear system r(x, xi) whose zero set is xi = 0.
  double max_linear_system_defect = 0.0;
};

/// Samples x = (cos t, sin t, 0, 0), xi = rho d with d uniform on the unit sphere of x-perp,
/// t uniform on [0, pi), rho log-uniform on [1e-3, 3]. Requires n = 3 and SO4, SO3_TILDE or S1xSO3.
HomogeneousScanReport homogeneous_scan(const PotentialProfile& profile, PresetName preset, std::size_t samples,
                                       std::uint64_t seed);

nlohmann::json to_json(const HomogeneousScanReport& report);

}  // namespace cyslag
