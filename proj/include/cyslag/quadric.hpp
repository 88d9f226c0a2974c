#pragma once

// Two models of T*S^n: the bundle {(x, xi) : |x| = 1, x.xi = 0} in R^{n+1} x R^{n+1}
// and the affine quadric {z in C^{n+1} : sum z_i^2 = 1}, with the SO(n+1)-equivariant
// identification between them and the Lie-algebra generators used by the families.

#include <complex>
#include <random>
#include <string_view>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace cyslag {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kConstraintTol = 1e-10;

/// Flat metric <a, b> = Re sum a_i conj(b_i).
double real_inner(const ComplexVector& a, const ComplexVector& b);
/// Flat Kahler form omega_0(a, b) = <Ja, b> with J = multiplication by i.
double omega_flat(const ComplexVector& a, const ComplexVector& b);
/// Complex bilinear pairing sum a_i b_i (no conjugation).
Complex bilinear_dot(const ComplexVector& a, const ComplexVector& b);

/// |sum z_i^2 - level|, the defining residual of {sum z_i^2 = level}.
double quadric_residual(const ComplexVector& z, double level = 1.0);

class QuadricPoint {
 public:
  /// Validates |sum z_i^2 - 1| <= tol * max(1, |z|^2) and n = size - 1 >= 2.
  explicit QuadricPoint(ComplexVector z, double tol = kConstraintTol);

  const ComplexVector& z() const noexcept { return z_; }
  int n() const noexcept { return static_cast<int>(z_.size()) - 1; }
  double norm2() const noexcept { return z_.squaredNorm(); }

 private:
  ComplexVector z_;
};

/// A vector v with sum z_i v_i = 0, i.e. tangent to the quadric at z.
class TangentVector {
 public:
  TangentVector(QuadricPoint base, ComplexVector v, double tol = kConstraintTol);

  const QuadricPoint& base() const noexcept { return base_; }
  const ComplexVector& v() const noexcept { return v_; }

 private:
  QuadricPoint base_;
  ComplexVector v_;
};

class CotangentPoint {
 public:
  CotangentPoint(RealVector x, RealVector xi, double tol = kConstraintTol);

  const RealVector& x() const noexcept { return x_; }
  const RealVector& xi() const noexcept { return xi_; }
  int n() const noexcept { return static_cast<int>(x_.size()) - 1; }

 private:
  RealVector x_;
  RealVector xi_;
};

/// Element of o(n+1). Construction rejects matrices that are not exactly antisymmetric.
class LieAlgebraElement {
 public:
  explicit LieAlgebraElement(RealMatrix a);

  /// Rotation generator of the (i, j) coordinate plane: A e_i = e_j, A e_j = -e_i.
  static LieAlgebraElement plane(int dim, int i, int j);

  const RealMatrix& matrix() const noexcept { return a_; }
  int dim() const noexcept { return static_cast<int>(a_.rows()); }

  /// The one-parameter subgroup element exp(angle * A).
  RealMatrix exp(double angle) const;

 private:
  RealMatrix a_;
};

enum class PresetName { SO4, SO3_TILDE, S1xSO3, T2, SO3_STAB, SOn_STAB };

struct GroupPreset {
  PresetName name;
  std::vector<LieAlgebraElement> generators;
};

/// Generator lists of the subgroups of SO(n+1) used throughout. All presets except
/// SOn_STAB exist only for n = 3.
GroupPreset make_preset(PresetName name, int n = 3);
std::string_view preset_label(PresetName name);
std::optional<PresetName> parse_preset(std::string_view label);
/// True when the group is abelian, so every level of the moment map is invariant.
bool preset_is_abelian(PresetName name, int n = 3);

QuadricPoint embed(const CotangentPoint& p);
CotangentPoint unembed(const QuadricPoint& z);

QuadricPoint apply_group(const RealMatrix& g, const QuadricPoint& z);
CotangentPoint apply_group(const RealMatrix& g, const CotangentPoint& p);

TangentVector generator_field(const LieAlgebraElement& a, const QuadricPoint& z);

/// Maximal torus element diag(R(theta1), R(theta2)) of SO(4).
RealMatrix torus_element(double theta1, double theta2);

/// Haar-distributed element of SO(dim).
RealMatrix random_rotation(int dim, std::mt19937_64& rng);

/// Random (x, xi) with x uniform on S^n and xi uniform in direction with |xi| uniform in [0, xi_max].
CotangentPoint random_cotangent_point(int n, double xi_max, std::mt19937_64& rng);

}  // namespace cyslag
