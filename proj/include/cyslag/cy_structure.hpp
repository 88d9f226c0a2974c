#pragma once

// Calabi-Yau structure of the quadric: the 1-form alpha with d(alpha) = omega, the Kahler
// form omega of a radial potential, its metric g(v, w) = omega(v, Jw), the holomorphic
// volume form Omega(v_1..v_n) = det[z, v_1, ..., v_n], and the ratio of omega^n/n! to the
// volume form built from Omega.

#include <vector>

#include "cyslag/potential.hpp"
#include "cyslag/quadric.hpp"

namespace cyslag {

/// Kahler form of a radial potential u(|z|^2) with the given derivatives at z:
///   u' omega_0(v, w) + u'' (<w, z> omega_0(v, z) - <v, z> omega_0(w, z)).
double omega_radial(const PotentialDerivatives& d, const ComplexVector& z, const ComplexVector& v,
                    const ComplexVector& w);
/// g(v, w) = omega(v, iw) for the same radial potential.
double metric_radial(const PotentialDerivatives& d, const ComplexVector& z, const ComplexVector& v,
                     const ComplexVector& w);

double alpha_st(const PotentialProfile& profile, const TangentVector& v);
/// Throws ArgumentError when v and w live at different base points.
double omega_st(const PotentialProfile& profile, const TangentVector& v, const TangentVector& w);
double metric_st(const PotentialProfile& profile, const TangentVector& v, const TangentVector& w);

/// n real-independent tangent vectors at one point of the quadric.
class TangentFrame {
 public:
  /// Rejects frames of the wrong size, non-tangent vectors, and frames whose realified
  /// vectors have smallest singular value <= 1e-8 times the largest.
  TangentFrame(QuadricPoint base, std::vector<ComplexVector> vectors);

  const QuadricPoint& base() const noexcept { return base_; }
  const std::vector<ComplexVector>& vectors() const noexcept { return vectors_; }

 private:
  QuadricPoint base_;
  std::vector<ComplexVector> vectors_;
};

/// det[z, v_1, ..., v_n]. Raw value without any normalising constant.
Complex omega_big_det(const ComplexVector& first_column, const std::vector<ComplexVector>& vectors);
Complex omega_big_st(const TangentFrame& frame);

/// Smallest over largest singular value of the realified vectors (columns in R^{2(n+1)}).
double realified_conditioning(const std::vector<ComplexVector>& vectors);

/// Complex basis of {v : sum z_i v_i = 0}, orthonormal for the Hermitian product.
std::vector<ComplexVector> holomorphic_tangent_basis(const ComplexVector& z);

/// Gram-Schmidt in the metric g applied to (f_1, i f_1, ..., f_n, i f_n) for the tangent basis above.
/// The result is g-orthonormal and positively oriented for the complex orientation.
std::vector<ComplexVector> metric_orthonormal_frame(const PotentialProfile& profile, const QuadricPoint& z);

/// Pfaffian of a real antisymmetric matrix of even size.
double pfaffian(const RealMatrix& a);

/// (omega^n / n!)(e) divided by [(-1)^{n(n-1)/2} (i/2)^n Omega ^ conj(Omega)](e) for a
/// g-orthonormal real frame e of 2n tangent vectors. Throws ArgumentError if e is not
/// orthonormal to 1e-8.
double cy_ratio(const PotentialProfile& profile, const QuadricPoint& z, const std::vector<ComplexVector>& frame);

/// sqrt(det G) for the g-Gram matrix G of the given tangent vectors.
double metric_volume(const PotentialDerivatives& d, const ComplexVector& z, const std::vector<ComplexVector>& vectors);

}  // namespace cyslag
