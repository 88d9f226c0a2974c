#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "cyslag/conifold.hpp"
#include "cyslag/cy_structure.hpp"
#include "cyslag/errors.hpp"

using namespace cyslag;

namespace {

const std::vector<ConeKind> kKinds{ConeKind::TORUS_A, ConeKind::TORUS_C, ConeKind::SPHERE};

std::shared_ptr<const PotentialProfile> profile3() {
  static const auto p = std::make_shared<const PotentialProfile>(PotentialProfile::build(3, 1.0));
  return p;
}

// Random point of the cone: a + i b with a, b orthogonal real vectors of equal length.
ComplexVector random_cone_point(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal;
  RealVector a(4), b(4);
  for (int k = 0; k < 4; ++k) {
    a[k] = normal(rng);
    b[k] = normal(rng);
  }
  b -= a.dot(b) / a.squaredNorm() * a;
  b *= a.norm() / b.norm();
  return scale * (a.cast<Complex>() + Complex(0, 1) * b.cast<Complex>()) / a.norm();
}

// Random vector tangent to the cone at z: sum z_i v_i = 0.
ComplexVector random_cone_tangent(const ComplexVector& z, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  ComplexVector v(4);
  for (int k = 0; k < 4; ++k) v[k] = Complex(normal(rng), normal(rng));
  const ComplexVector zbar = z.conjugate();
  return v - (z.transpose() * v)(0, 0) / zbar.squaredNorm() * zbar;
}

double frame_omega(const ConePoint& z, const std::vector<ComplexVector>& f) {
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      const double scale = std::sqrt(metric_cone(z, f[i], f[i]) * metric_cone(z, f[j], f[j]));
      worst = std::max(worst, std::abs(omega_cone(z, f[i], f[j])) / scale);
    }
  return worst;
}

}  // namespace

TEST_CASE("cone parametrisations stay on the cone under scaling") {
  double worst = 0.0;
  for (ConeKind kind : kKinds)
    for (double s : {1e-3, 1.0, 7.5, 1e3}) {
      const ConeSpec spec{kind, s};
      for (double a1 = 0.0; a1 < 2.0 * M_PI; a1 += 0.7)
        for (double a2 = 0.1; a2 < M_PI; a2 += 0.45) {
          const ComplexVector z = spec.point(a1, a2);
          worst = std::max(worst, quadric_residual(z, 0.0) / z.squaredNorm());
          CHECK(z.norm() == doctest::Approx(s));
          CHECK_NOTHROW(ConePoint{z});
          for (const auto& v : spec.frame(a1, a2)) CHECK(std::abs((z.transpose() * v)(0, 0)) <= 1e-12 * s * v.norm());
        }
    }
  CHECK(worst <= 1e-10);
  CHECK(cone_label(ConeKind::TORUS_C) == "TORUS_C");
}

TEST_CASE("cone Kahler form: positivity, v = w and the finite-difference oracle") {
  std::mt19937_64 rng(41);
  double agree = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ConePoint z(random_cone_point(rng, 0.5 + k * 0.05));
    const ComplexVector radial = z.z();
    CHECK(omega_cone(z, radial, Complex(0, 1) * radial) > 0.0);
    const ComplexVector v = random_cone_tangent(z.z(), rng);
    const ComplexVector w = random_cone_tangent(z.z(), rng);
    CHECK(omega_cone(z, v, v) == 0.0);
    CHECK(metric_cone(z, v, v) > 0.0);
    const double scale = std::sqrt(metric_cone(z, v, v) * metric_cone(z, w, w));
    agree = std::max(agree, std::abs(omega_cone(z, v, w) - cone_oracle(z, v, w)) / scale);
  }
  CHECK(agree <= 1e-5);
}

TEST_CASE("both cones are special Lagrangian") {
  for (ConeKind kind : kKinds) {
    double om = 0.0, im = 0.0;
    for (double s : {0.3, 1.0, 20.0}) {
      const ConeSpec spec{kind, s};
      for (double a1 = 0.05; a1 < 2.0 * M_PI; a1 += 0.3)
        for (double a2 = 0.1; a2 < M_PI; a2 += 0.2) {
          const ConePoint z(spec.point(a1, a2));
          const auto f = spec.frame(a1, a2);
          om = std::max(om, frame_omega(z, f));
          const Complex o = omega_big_cone(z, f);
          im = std::max(im, std::abs(o.imag()) / std::abs(o));
        }
    }
    CHECK_MESSAGE(om <= 1e-9, cone_label(kind));
    CHECK_MESSAGE(im <= 1e-10, cone_label(kind));
  }
}

TEST_CASE("homogeneity weights of the cone tensors") {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 30; ++k) {
    const ComplexVector z = random_cone_point(rng);
    const ComplexVector v = random_cone_tangent(z, rng);
    const ComplexVector w = random_cone_tangent(z, rng);
    const ComplexVector y = random_cone_tangent(z, rng);
    for (double s : {0.1, 3.0, 40.0}) {
      // Vectors are pushed forward by the dilation z -> s z, so they scale too.
      const ConePoint a(z), b(s * z);
      CHECK(omega_cone(b, s * v, s * w) == doctest::Approx(std::pow(s, 4.0 / 3.0) * omega_cone(a, v, w)).epsilon(1e-12));
      const Complex o1 = omega_big_cone(a, {v, w, y});
      const Complex o2 = omega_big_cone(b, {s * v, s * w, s * y});
      CHECK(std::abs(o2 - s * s * o1) <= 1e-12 * std::abs(s * s * o1));
      const Complex o3 = omega_big_cone(a, {v, s * w, y});
      CHECK(std::abs(o3 - s * o1) <= 1e-12 * std::abs(s * o1));
    }
  }
}

TEST_CASE("cone moment vanishes on the cones and not at generic points") {
  const GroupPreset t2 = make_preset(PresetName::T2);
  const GroupPreset so3 = make_preset(PresetName::SO3_STAB);
  for (double a1 = 0.0; a1 < 6.0; a1 += 0.5)
    for (double a2 = 0.1; a2 < 3.0; a2 += 0.5) {
      CHECK(cone_moment(t2, ConePoint(ConeSpec{ConeKind::TORUS_A}.point(a1, a2))).cwiseAbs().maxCoeff() <= 1e-15);
      CHECK(cone_moment(t2, ConePoint(ConeSpec{ConeKind::TORUS_C}.point(a1, a2))).cwiseAbs().maxCoeff() <= 1e-15);
      CHECK(cone_moment(so3, ConePoint(ConeSpec{ConeKind::SPHERE, 2.0}.point(a1, a2))).cwiseAbs().maxCoeff() <= 1e-15);
    }
  std::mt19937_64 rng(43);
  for (int k = 0; k < 50; ++k) {
    const ConePoint z(random_cone_point(rng));
    CHECK(cone_moment(t2, z).norm() > 1e-8);
    CHECK(cone_moment(so3, z).norm() > 1e-8);
  }
}

TEST_CASE("apex and off-cone points are rejected") {
  ComplexVector z(4);
  z << 1e-7, Complex(0, 1e-7), 0, 0;
  CHECK_THROWS_AS(ConePoint{z}, DomainError);
  CHECK_THROWS_AS(cone_derivatives(0.0), DomainError);
  ComplexVector off(4);
  off << 1, 0, 0, 0;
  CHECK_THROWS_AS(ConePoint{off}, ConstraintError);
}

TEST_CASE("distance to a cone is zero on it, orbit invariant and bounded by the grid minimum") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (ConeKind kind : kKinds) {
    const ConeSpec spec{kind, 3.0};
    for (int k = 0; k < 20; ++k) CHECK(distance_to_cone(kind, spec.point(ang(rng), ang(rng) / 2.0)) <= 1e-14);
  }
  // The exact minimisation never loses to a brute-force grid over the parametrisation.
  for (int k = 0; k < 20; ++k) {
    const ComplexVector w = embed(random_cotangent_point(3, 2.0, rng)).z();
    const ComplexVector u = w / w.norm();
    for (ConeKind kind : kKinds) {
      double grid = 1e300;
      for (double a1 = 0.0; a1 < 2.0 * M_PI; a1 += 0.02)
        for (double a2 = 0.0; a2 < 2.0 * M_PI; a2 += 0.02) grid = std::min(grid, (u - ConeSpec{kind}.point(a1, a2)).norm());
      const double exact = distance_to_cone(kind, w);
      CHECK(exact <= grid + 1e-12);
      CHECK(exact >= grid - 0.05);
    }
  }
  // Torus invariance.
  const ComplexVector w = embed(random_cotangent_point(3, 2.0, rng)).z();
  const ComplexVector gw = torus_element(0.7, -1.9).cast<Complex>() * w;
  CHECK(distance_to_cone(ConeKind::TORUS_A, gw) == doctest::Approx(distance_to_cone(ConeKind::TORUS_A, w)).epsilon(1e-12));
}

TEST_CASE("SO3 leaf, c = 1: t follows the exact inversion and the sphere distance decays") {
  const LeafSpec spec = make_leaf_spec(Family::SO3, {0.0, 0.0, 1.0}, profile3());
  double prev = 1e300;
  for (double rho = 2.0; rho <= 8.0; rho += 0.5) {
    const AsymptoticReport r = asymptotic_distance(spec, rho);
    CHECK(r.cone == ConeKind::SPHERE);
    CHECK(r.rho == rho);
    // cos 2t = (2 rho - c) / sinh 2 rho on the branch nearest pi/4.
    const double exact = 0.5 * std::asin((2.0 * rho - 1.0) / std::sinh(2.0 * rho));
    CHECK(r.t_deviation == doctest::Approx(exact).epsilon(1e-8));
    CHECK(r.dist_to_cone < prev);
    prev = r.dist_to_cone;
  }
  CHECK(asymptotic_distance(spec, 6.0).dist_to_cone <= 1e-4);
  CHECK(asymptotic_distance(spec, 1.5).dist_to_cone > asymptotic_distance(spec, 3.0).dist_to_cone);
}

TEST_CASE("T2 leaves approach the torus cones") {
  const LeafSpec a = make_leaf_spec(Family::T2, {0.0, 0.0, -0.5}, profile3());
  double prev = 1e300;
  for (double rho = 2.0; rho <= 8.0; rho += 1.0) {
    const AsymptoticReport r = asymptotic_distance(a, rho);
    CHECK(r.dist_to_cone < prev);
    CHECK(std::isfinite(r.t_deviation));
    prev = r.dist_to_cone;
  }
  CHECK(asymptotic_distance(a, 6.0).dist_to_cone < 1e-4);

  const LeafSpec g = make_leaf_spec(Family::T2, {0.1, -0.2, 0.3}, profile3());
  prev = 1e300;
  for (double rho = 2.0; rho <= 8.0; rho += 1.0) {
    const AsymptoticReport r = asymptotic_distance(g, rho);
    CHECK(std::isnan(r.t_deviation));
    CHECK(r.dist_to_cone < prev);
    prev = r.dist_to_cone;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("asymptotic distance errors") {
  const LeafSpec so3 = make_leaf_spec(Family::SO3, {0.0, 0.0, 1.0}, profile3());
  CHECK_THROWS_AS(asymptotic_distance(so3, 10.0), DomainError);
  CHECK_THROWS_AS(asymptotic_distance(so3, -1.0), DomainError);
  CHECK_THROWS_AS(asymptotic_distance(make_leaf_spec(Family::SO3, {0.2, 0.0, 1.0}, profile3()), 3.0), DomainError);
  const auto p4 = std::make_shared<const PotentialProfile>(PotentialProfile::build(4, 1.0));
  CHECK_THROWS_AS(asymptotic_distance(make_leaf_spec(Family::SOn, {0, 0, 0, 0.5}, p4), 3.0), ArgumentError);
}
