#include <doctest.h>

#include <cmath>
#include <random>

#include "cyslag/errors.hpp"
#include "cyslag/quadric.hpp"

using namespace cyslag;

namespace {

const Complex I(0.0, 1.0);

ComplexVector cvec(std::initializer_list<Complex> v) {
  ComplexVector z(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (Complex c : v) z[i++] = c;
  return z;
}

RealVector rvec(std::initializer_list<double> v) {
  RealVector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

}  // namespace

TEST_CASE("embed reproduces the closed-form examples") {
  const RealVector x = rvec({1, 0, 0, 0});
  CHECK((embed(CotangentPoint(x, RealVector::Zero(4))).z() - x.cast<Complex>()).norm() == 0.0);

  const double rho = 0.7;
  const QuadricPoint z = embed(CotangentPoint(x, rvec({0, rho, 0, 0})));
  CHECK(std::abs(z.z()[0] - Complex(std::cosh(rho), 0)) < 1e-15);
  CHECK(std::abs(z.z()[1] - I * std::sinh(rho)) < 1e-15);
  CHECK(std::abs(z.z()[2]) == 0.0);
}

TEST_CASE("embed is smooth through the zero section") {
  const RealVector x = rvec({0, 1, 0, 0});
  for (double r : {1e-9, 5e-5, 9.9e-5, 1.01e-4, 1e-3}) {
    const QuadricPoint z = embed(CotangentPoint(x, rvec({r, 0, 0, 0})));
    CHECK(std::abs(z.z()[0].imag() - std::sinh(r)) <= 1e-16 * std::max(1.0, r));
  }
}

TEST_CASE("random embeddings satisfy the quadric, norm and round-trip properties") {
  std::mt19937_64 rng(11);
  double quad = 0.0, norm = 0.0, trip = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const int n = 2 + k % 4;
    const CotangentPoint p = random_cotangent_point(n, 5.0, rng);
    const QuadricPoint z = embed(p);
    const double r2 = z.norm2();
    quad = std::max(quad, quadric_residual(z.z()) / r2);
    norm = std::max(norm, std::abs(r2 - std::cosh(2.0 * p.xi().norm())) / r2);
    if (k < 1000) {
      const CotangentPoint back = unembed(z);
      trip = std::max({trip, (back.x() - p.x()).cwiseAbs().maxCoeff(), (back.xi() - p.xi()).cwiseAbs().maxCoeff()});
    }
  }
  CHECK(quad <= 1e-10);
  CHECK(norm <= 1e-10);
  CHECK(trip <= 1e-9);
}

TEST_CASE("unembed inverts the closed form") {
  const QuadricPoint z(cvec({std::cosh(1.0), I * std::sinh(1.0), 0.0, 0.0}));
  const CotangentPoint p = unembed(z);
  CHECK((p.x() - rvec({1, 0, 0, 0})).norm() < 1e-14);
  CHECK((p.xi() - rvec({0, 1, 0, 0})).norm() < 1e-14);

  const QuadricPoint real(cvec({0.6, 0.8, 0.0}));
  const CotangentPoint q = unembed(real);
  CHECK((q.x() - rvec({0.6, 0.8, 0.0})).norm() < 1e-15);
  CHECK(q.xi().norm() == 0.0);
}

TEST_CASE("constructors reject invalid data") {
  CHECK_THROWS_AS(QuadricPoint(cvec({1.0, 1.0, 0.0})), ConstraintError);
  CHECK_THROWS_AS(QuadricPoint(cvec({1.0, 0.0})), ArgumentError);
  CHECK_THROWS_AS(CotangentPoint(rvec({1, 1, 0}), rvec({0, 0, 1})), ConstraintError);
  CHECK_THROWS_AS(CotangentPoint(rvec({1, 0, 0}), rvec({1, 0, 0})), ConstraintError);
  const QuadricPoint z(cvec({1.0, 0.0, 0.0}));
  CHECK_THROWS_AS(TangentVector(z, cvec({1.0, 0.0, 0.0})), ConstraintError);
  CHECK_THROWS_AS(LieAlgebraElement(RealMatrix::Identity(3, 3)), ArgumentError);
  RealMatrix g = RealMatrix::Identity(3, 3);
  g(0, 1) = 1e-6;
  CHECK_THROWS_AS(apply_group(g, z), ArgumentError);
}

TEST_CASE("the group action is equivariant and the identity acts trivially") {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const RealMatrix g = random_rotation(4, rng);
    CHECK(g.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    const CotangentPoint p = random_cotangent_point(3, 5.0, rng);
    const ComplexVector a = embed(apply_group(g, p)).z();
    const ComplexVector b = apply_group(g, embed(p)).z();
    worst = std::max(worst, (a - b).norm() / a.norm());
  }
  CHECK(worst <= 1e-10);

  const QuadricPoint z = embed(random_cotangent_point(3, 2.0, rng));
  CHECK((apply_group(RealMatrix::Identity(4, 4), z).z() - z.z()).norm() == 0.0);
}

TEST_CASE("torus element with theta1 = pi negates the first pair") {
  const ComplexVector z = cvec({Complex(1.2, 0.3), Complex(-0.4, 0.5), Complex(0.1, -0.2), Complex(0.7, 0.0)});
  const ComplexVector w = torus_element(M_PI, 0.0).cast<Complex>() * z;
  CHECK(std::abs(w[0] + z[0]) < 1e-15);
  CHECK(std::abs(w[1] + z[1]) < 1e-15);
  CHECK(std::abs(w[2] - z[2]) == 0.0);
  CHECK(std::abs(w[3] - z[3]) == 0.0);
}

TEST_CASE("preset generator lists have the documented sizes and are exactly antisymmetric") {
  const std::vector<std::pair<PresetName, std::size_t>> sizes{
      {PresetName::SO4, 6}, {PresetName::SO3_TILDE, 3}, {PresetName::S1xSO3, 4}, {PresetName::T2, 2},
      {PresetName::SO3_STAB, 3}};
  for (const auto& [name, count] : sizes) {
    const GroupPreset p = make_preset(name, 3);
    CHECK(p.generators.size() == count);
    for (const auto& a : p.generators) CHECK((a.matrix().transpose() + a.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
  for (int n = 2; n <= 6; ++n) CHECK(make_preset(PresetName::SOn_STAB, n).generators.size() == std::size_t(n * (n - 1) / 2));
  CHECK_THROWS_AS(make_preset(PresetName::SO4, 4), ArgumentError);
  CHECK(parse_preset("S1xSO3") == PresetName::S1xSO3);
  CHECK_FALSE(parse_preset("SO5").has_value());
}

TEST_CASE("generator fields are tangent and match the explicit vectors") {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (auto name : {PresetName::SO4, PresetName::SO3_TILDE, PresetName::S1xSO3, PresetName::T2, PresetName::SO3_STAB}) {
    for (int k = 0; k < 50; ++k) {
      const QuadricPoint z = embed(random_cotangent_point(3, 4.0, rng));
      for (const auto& a : make_preset(name, 3).generators) {
        const TangentVector v = generator_field(a, z);
        worst = std::max(worst, std::abs(bilinear_dot(z.z(), v.v())) / (z.z().norm() * std::max(1.0, v.v().norm())));
      }
    }
  }
  CHECK(worst <= 1e-12);

  const QuadricPoint z = embed(random_cotangent_point(3, 1.0, rng));
  const ComplexVector b1z = generator_field(make_preset(PresetName::T2).generators[0], z).v();
  CHECK((b1z - cvec({-z.z()[1], z.z()[0], 0.0, 0.0})).norm() < 1e-15);

  const Complex tau(0.4, 0.9);
  const QuadricPoint p(cvec({std::cos(tau), std::sin(tau), 0.0, 0.0}));
  const ComplexVector a3p = generator_field(make_preset(PresetName::SO3_STAB).generators[2], p).v();
  CHECK((a3p - cvec({0.0, 0.0, std::sin(tau), 0.0})).norm() < 1e-15);

  const LieAlgebraElement zero(RealMatrix::Zero(4, 4));
  CHECK(generator_field(zero, p).v().norm() == 0.0);
}

TEST_CASE("exp of a plane generator is the plane rotation") {
  const LieAlgebraElement a = LieAlgebraElement::plane(4, 0, 1);
  const RealMatrix g = a.exp(0.3);
  CHECK(g(0, 0) == doctest::Approx(std::cos(0.3)));
  CHECK(g(1, 0) == doctest::Approx(std::sin(0.3)));
  CHECK(g(0, 1) == doctest::Approx(-std::sin(0.3)));
}
