#pragma once

// Finite-difference oracles that check the closed-form structure tensors independently.
// Both work in a holomorphic chart of {sum y_i^2 = level} near a base point z: a tangent
// displacement y = z + d is pushed back onto the variety along conj(z), which keeps the
// chart holomorphic in d.

#include <functional>

#include "cyslag/potential.hpp"
#include "cyslag/quadric.hpp"

namespace cyslag {

/// A radial function of r^2.
using RadialFunction = std::function<double(double)>;

struct StencilOptions {
  double step = 1e-4;   // parameter step; directions are rescaled to length max(1, |z|)
  bool richardson = true;
};

/// Holomorphic chart of {sum y_i^2 = level} around z.
class VarietyChart {
 public:
  VarietyChart(ComplexVector z, Complex level);

  /// Point of the variety over the ambient point y (the small root of the defining quadratic).
  ComplexVector point(const ComplexVector& y) const;
  /// Differential of point() at y applied to the ambient direction d.
  ComplexVector push(const ComplexVector& y, const ComplexVector& d) const;

  const ComplexVector& base() const noexcept { return z_; }

 private:
  ComplexVector z_;
  ComplexVector normal_;
  Complex level_;
};

/// Approximates the Kahler form (1/2) i ddbar u(|z|^2) on the tangent vectors v, w at z.
double oracle_ddbar(const RadialFunction& potential, const ComplexVector& z, Complex level, const ComplexVector& v,
                    const ComplexVector& w, const StencilOptions& opt = {});
double oracle_ddbar(const PotentialProfile& profile, const TangentVector& v, const TangentVector& w,
                    const StencilOptions& opt = {});

/// Exterior derivative of alpha = (1/2) u'(|z|^2) <., iz> on (v, w), by finite differences.
double oracle_d_alpha(const PotentialProfile& profile, const TangentVector& v, const TangentVector& w,
                      const StencilOptions& opt = {});

/// Point of the quadric reached from z by moving along the tangent vector s * v in the chart.
QuadricPoint move_on_quadric(const QuadricPoint& z, const ComplexVector& v, double s);

}  // namespace cyslag
