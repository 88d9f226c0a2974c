#include "cyslag/conifold.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cyslag/cy_structure.hpp"
#include "cyslag/errors.hpp"
#include "cyslag/oracle.hpp"

namespace cyslag {

ConePoint::ConePoint(ComplexVector z, double tol) : z_(std::move(z)) {
  const double r2 = z_.squaredNorm();
  if (std::sqrt(r2) < kApexRadius) throw DomainError("cone point inside the apex exclusion radius");
  if (quadric_residual(z_, 0.0) > tol * r2) throw ConstraintError("point is not on the cone sum z_i^2 = 0");
}

PotentialDerivatives cone_derivatives(double s) {
  if (!(s >= kApexRadius * kApexRadius)) throw DomainError("cone potential evaluated at the apex");
  return {std::pow(s, -1.0 / 3.0), -std::pow(s, -4.0 / 3.0) / 3.0};
}

double cone_potential(double s) { return 1.5 * std::pow(s, 2.0 / 3.0); }

double omega_cone(const ConePoint& z, const ComplexVector& v, const ComplexVector& w) {
  return omega_radial(cone_derivatives(z.norm2()), z.z(), v, w);
}

double metric_cone(const ConePoint& z, const ComplexVector& v, const ComplexVector& w) {
  return metric_radial(cone_derivatives(z.norm2()), z.z(), v, w);
}

Complex omega_big_cone(const ConePoint& z, const std::vector<ComplexVector>& frame) {
  return omega_big_det(z.z().conjugate(), frame) / z.norm2();
}

RealVector cone_moment(const GroupPreset& preset, const ConePoint& z) {
  return moment_radial(cone_derivatives(z.norm2()).first, preset, z.z());
}

double cone_oracle(const ConePoint& z, const ComplexVector& v, const ComplexVector& w) {
  return oracle_ddbar(cone_potential, z.z(), Complex(0.0, 0.0), v, w);
}

std::string_view cone_label(ConeKind kind) {
  switch (kind) {
    case ConeKind::TORUS_A: return "TORUS_A";
    case ConeKind::TORUS_C: return "TORUS_C";
    case ConeKind::SPHERE: return "SPHERE";
  }
  return "?";
}

ComplexVector ConeSpec::point(double a1, double a2) const {
  const Complex i(0, 1);
  ComplexVector z(4);
  switch (kind) {
    case ConeKind::TORUS_A:
      z << std::cos(a1), std::sin(a1), i * std::cos(a2), i * std::sin(a2);
      return z * (scale / std::sqrt(2.0));
    case ConeKind::TORUS_C:
      z << i * std::cos(a1), i * std::sin(a1), std::cos(a2), std::sin(a2);
      return z * (scale / std::sqrt(2.0));
    case ConeKind::SPHERE: {
      const Complex p = 1.0 + i;
      z << 1.0 - i, p * std::cos(a2) * std::cos(a1), p * std::cos(a2) * std::sin(a1), p * std::sin(a2);
      return z * (0.5 * scale);
    }
  }
  return z;
}

std::vector<ComplexVector> ConeSpec::frame(double a1, double a2) const {
  const ComplexVector z = point(a1, a2);
  const Complex i(0, 1);
  ComplexVector d1(4), d2(4);
  switch (kind) {
    case ConeKind::TORUS_A:
      d1 << -std::sin(a1), std::cos(a1), 0.0, 0.0;
      d2 << 0.0, 0.0, -i * std::sin(a2), i * std::cos(a2);
      d1 *= scale / std::sqrt(2.0);
      d2 *= scale / std::sqrt(2.0);
      break;
    case ConeKind::TORUS_C:
      d1 << -i * std::sin(a1), i * std::cos(a1), 0.0, 0.0;
      d2 << 0.0, 0.0, -std::sin(a2), std::cos(a2);
      d1 *= scale / std::sqrt(2.0);
      d2 *= scale / std::sqrt(2.0);
      break;
    case ConeKind::SPHERE: {
      const Complex p = 0.5 * scale * (1.0 + i);
      d1 << 0.0, -p * std::cos(a2) * std::sin(a1), p * std::cos(a2) * std::cos(a1), 0.0;
      d2 << 0.0, -p * std::sin(a2) * std::cos(a1), -p * std::sin(a2) * std::sin(a1), p * std::cos(a2);
      break;
    }
  }
  return {z, d1, d2};
}

namespace {

// Distance from w to the orbit a * (cos th, sin th) of the pair (w0, w1) under plane rotations.
double pair_orbit_distance2(Complex a, Complex w0, Complex w1) {
  const double p = (std::conj(a) * w0).real();
  const double q = (std::conj(a) * w1).real();
  const double th = std::atan2(q, p);
  return std::norm(w0 - a * std::cos(th)) + std::norm(w1 - a * std::sin(th));
}

}  // namespace

double distance_to_cone(ConeKind kind, const ComplexVector& z) {
  if (z.size() != 4) throw ArgumentError("cone distances are defined for n = 3");
  const double r = z.norm();
  if (r < kApexRadius) throw DomainError("distance to cone evaluated at the apex");
  const ComplexVector w = z / r;
  const Complex i(0, 1);
  const double s = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case ConeKind::TORUS_A:
      return std::sqrt(pair_orbit_distance2(s, w[0], w[1]) + pair_orbit_distance2(i * s, w[2], w[3]));
    case ConeKind::TORUS_C:
      return std::sqrt(pair_orbit_distance2(i * s, w[0], w[1]) + pair_orbit_distance2(s, w[2], w[3]));
    case ConeKind::SPHERE: {
      // The best u maximises sum_k u_k Re((1 - i) w_k) over the unit sphere.
      RealVector g(3);
      for (int k = 0; k < 3; ++k) g[k] = ((1.0 - i) * w[k + 1]).real();
      const double gn = g.norm();
      const RealVector u = gn > 0.0 ? RealVector(g / gn) : RealVector::Unit(3, 0);
      ComplexVector sigma(4);
      sigma << 0.5 * (1.0 - i), 0.5 * (1.0 + i) * u[0], 0.5 * (1.0 + i) * u[1], 0.5 * (1.0 + i) * u[2];
      return (w - sigma).norm();
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

AsymptoticReport asymptotic_distance(const LeafSpec& spec, double rho, const TraceOptions& opt) {
  if (spec.family == Family::SOn) throw ArgumentError("asymptotic cones are implemented for the T2 and SO3 families");
  if (!(rho > 0.0) || 2.0 * rho >= spec.profile->tau_max()) {
    std::ostringstream os;
    os << "rho = " << rho << " is outside the tabulated range (0, " << 0.5 * spec.profile->tau_max() << ")";
    throw DomainError(os.str());
  }
  TraceOptions local = opt;
  local.rho_max = std::min(0.5 * spec.profile->tau_max(), rho + 0.25);
  local.continuation.anchors.emplace_back(1, rho);
  const ProfileCurve curve = trace_profile_curve(spec, local);

  std::optional<AsymptoticReport> best;
  for (const auto& branch : curve.branches) {
    for (const auto& x : branch.points) {
      if (std::abs(x[1] - rho) > 1e-9 * (1.0 + rho)) continue;
      AsymptoticReport r;
      r.rho = rho;
      r.t = x[0];
      if (spec.family == Family::SO3) {
        r.cone = ConeKind::SPHERE;
        r.dist_to_cone = distance_to_cone(ConeKind::SPHERE, rotation_slice_point(3, x[0], x[1]));
        r.t_deviation = std::abs(x[0] - 0.25 * M_PI);
        if (!best || r.t_deviation < best->t_deviation) best = r;
      } else {
        const ComplexVector z = t2_slice_point(x);
        const double da = distance_to_cone(ConeKind::TORUS_A, z);
        const double dc = distance_to_cone(ConeKind::TORUS_C, z);
        r.cone = da <= dc ? ConeKind::TORUS_A : ConeKind::TORUS_C;
        r.dist_to_cone = std::min(da, dc);
        if (curve.reduced) {
          const double target = r.cone == ConeKind::TORUS_A ? (x[0] < 0.5 * M_PI ? 0.0 : M_PI) : 0.5 * M_PI;
          r.t_deviation = std::abs(x[0] - target);
        } else {
          r.t_deviation = std::numeric_limits<double>::quiet_NaN();
        }
        if (!best || r.dist_to_cone < best->dist_to_cone) best = r;
      }
    }
  }
  if (!best) {
    std::ostringstream os;
    os << "no traced branch reaches rho = " << rho;
    throw DomainError(os.str());
  }
  return *best;
}

}  // namespace cyslag
