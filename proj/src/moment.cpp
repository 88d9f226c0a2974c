#include "cyslag/moment.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "cyslag/cy_structure.hpp"
#include "cyslag/errors.hpp"
#include "cyslag/oracle.hpp"

namespace cyslag {

namespace {

double richardson_derivative(const std::function<double(double)>& f, double h) {
  auto d = [&f](double step) { return (f(step) - f(-step)) / (2.0 * step); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

}  // namespace

RealVector moment_radial(double u_prime, const GroupPreset& preset, const ComplexVector& z) {
  RealVector mu(static_cast<Eigen::Index>(preset.generators.size()));
  const ComplexVector iz = Complex(0, 1) * z;
  for (std::size_t k = 0; k < preset.generators.size(); ++k) {
    const auto& a = preset.generators[k];
    if (a.dim() != z.size()) throw ArgumentError("generator dimension does not match the point");
    mu[static_cast<Eigen::Index>(k)] = 0.5 * u_prime * real_inner(a.matrix().cast<Complex>() * z, iz);
  }
  return mu;
}

RealVector moment(const PotentialProfile& profile, const GroupPreset& preset, const QuadricPoint& z) {
  return moment_radial(profile.u_prime_r2(z.norm2()), preset, z.z());
}

double moment_differential_check(const PotentialProfile& profile, const GroupPreset& preset, const TangentVector& v) {
  const QuadricPoint& z = v.base();
  const double nv = v.v().norm();
  if (nv == 0.0) return 0.0;
  const double length = std::max(1.0, z.z().norm());
  const ComplexVector dir = v.v() * (length / nv);
  const PotentialDerivatives d = profile.derivatives_r2(z.norm2());
  const double coefficient = d.first + std::abs(d.second) * z.norm2();

  double worst = 0.0;
  for (std::size_t k = 0; k < preset.generators.size(); ++k) {
    auto mu_k = [&](double s) {
      return moment(profile, preset, move_on_quadric(z, dir, s))[static_cast<Eigen::Index>(k)];
    };
    const double dmu = richardson_derivative(mu_k, 1e-4) * (nv / length);
    const ComplexVector az = preset.generators[k].matrix().cast<Complex>() * z.z();
    const double rhs = omega_radial(d, z.z(), az, v.v());
    const double scale = coefficient * az.norm() * nv;
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(dmu + rhs) / scale);
  }
  return worst;
}

bool isotropy_check(const PotentialProfile& profile, const GroupPreset& preset, const QuadricPoint& z, double tol) {
  const PotentialDerivatives d = profile.derivatives_r2(z.norm2());
  std::vector<ComplexVector> fields;
  for (const auto& a : preset.generators) fields.emplace_back(a.matrix().cast<Complex>() * z.z());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    for (std::size_t j = i + 1; j < fields.size(); ++j) {
      const double scale = std::sqrt(metric_radial(d, z.z(), fields[i], fields[i]) *
                                     metric_radial(d, z.z(), fields[j], fields[j]));
      if (std::abs(omega_radial(d, z.z(), fields[i], fields[j])) > tol * scale) return false;
    }
  }
  return true;
}

double orbit_moment_drift(const PotentialProfile& profile, const GroupPreset& preset, const QuadricPoint& z) {
  const PotentialDerivatives d = profile.derivatives_r2(z.norm2());
  double worst = 0.0;
  for (const auto& a : preset.generators) {
    const ComplexVector az = a.matrix().cast<Complex>() * z.z();
    const double na = std::sqrt(metric_radial(d, z.z(), az, az));
    if (na == 0.0) continue;
    for (std::size_t k = 0; k < preset.generators.size(); ++k) {
      const ComplexVector bz = preset.generators[k].matrix().cast<Complex>() * z.z();
      const double nb = std::sqrt(metric_radial(d, z.z(), bz, bz));
      if (nb == 0.0) continue;
      auto mu_k = [&](double s) {
        const QuadricPoint moved(a.exp(s).cast<Complex>() * z.z());
        return moment(profile, preset, moved)[static_cast<Eigen::Index>(k)];
      };
      worst = std::max(worst, std::abs(richardson_derivative(mu_k, 1e-3)) / (na * nb));
    }
  }
  return worst;
}

bool admissible_level(PresetName name, int n, const RealVector& level, double tol) {
  if (preset_is_abelian(name, n)) return level.allFinite();
  return level.size() == 0 || level.cwiseAbs().maxCoeff() <= tol;
}

HomogeneousScanReport homogeneous_scan(const PotentialProfile& profile, PresetName preset, std::size_t samples,
                                       std::uint64_t seed) {
  if (profile.n() != 3) throw ArgumentError("homogeneous scan needs n = 3");
  if (preset != PresetName::SO4 && preset != PresetName::SO3_TILDE && preset != PresetName::S1xSO3) {
    throw ArgumentError("homogeneous scan covers SO4, SO3_TILDE and S1xSO3 only");
  }
  const GroupPreset group = make_preset(preset, 3);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const double log_lo = std::log(1e-3);
  const double log_hi = std::log(3.0);

  HomogeneousScanReport report{preset, samples, seed, std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = M_PI * unit(rng);
    const double rho = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
    RealVector x(4);
    x << std::cos(t), std::sin(t), 0.0, 0.0;
    RealVector dir(4);
    for (int i = 0; i < 4; ++i) dir[i] = normal(rng);
    dir -= x.dot(dir) * x;
    dir.normalize();
    const RealVector xi = rho * dir;
    const QuadricPoint z = embed(CotangentPoint(x, xi));
    const double scaled = moment(profile, group, z).norm() / (profile.u_prime_r2(z.norm2()) * std::sinh(2.0 * rho));
    report.min_scaled_norm = std::min(report.min_scaled_norm, scaled);
    report.max_scaled_norm = std::max(report.max_scaled_norm, scaled);
    if (preset == PresetName::SO3_TILDE) {
      const RealVector r = (RealVector(3) << x[0] * xi[1] - x[1] * xi[0], x[0] * xi[2] - x[1] * xi[3],
                            x[0] * xi[3] + x[1] * xi[2])
                               .finished();
      report.max_linear_system_defect = std::max(report.max_linear_system_defect, std::abs(r.norm() / rho - 1.0));
    }
  }
  if (samples == 0) report.min_scaled_norm = 0.0;
  return report;
}

nlohmann::json to_json(const HomogeneousScanReport& report) {
  nlohmann::json j{{"preset", std::string(preset_label(report.preset))},
                   {"samples", report.samples},
                   {"min_scaled_norm", report.min_scaled_norm},
                   {"seed", report.seed}};
  if (report.preset == PresetName::SO3_TILDE) j["max_linear_system_defect"] = report.max_linear_system_defect;
  return j;
}

}  // namespace cyslag
