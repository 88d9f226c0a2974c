#include "cyslag/oracle.hpp"

#include <cmath>

#include "cyslag/errors.hpp"

namespace cyslag {

VarietyChart::VarietyChart(ComplexVector z, Complex level) : z_(std::move(z)), normal_(z_.conjugate()), level_(level) {}

ComplexVector VarietyChart::point(const ComplexVector& y) const {
  const Complex q = bilinear_dot(y, y) - level_;
  const Complex b = bilinear_dot(y, normal_);
  const Complex qn = bilinear_dot(normal_, normal_);
  if (std::abs(b) == 0.0) throw DomainError("chart degenerates at the apex");
  const Complex s = b * std::sqrt(1.0 - q * qn / (b * b));
  const Complex lambda = -q / (b + s);
  return y + lambda * normal_;
}

ComplexVector VarietyChart::push(const ComplexVector& y, const ComplexVector& d) const {
  const ComplexVector p = point(y);
  return d - (bilinear_dot(p, d) / bilinear_dot(p, normal_)) * normal_;
}

namespace {

// Mixed second derivative d^2/ds dt f(s, t) at 0 by the four-point stencil.
double mixed_second(const std::function<double(double, double)>& f, double h) {
  return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
}

double mixed_second_refined(const std::function<double(double, double)>& f, const StencilOptions& opt) {
  const double coarse = mixed_second(f, opt.step);
  if (!opt.richardson) return coarse;
  const double fine = mixed_second(f, 0.5 * opt.step);
  return (4.0 * fine - coarse) / 3.0;
}

double centered_first_refined(const std::function<double(double)>& f, const StencilOptions& opt) {
  auto d = [&f](double h) { return (f(h) - f(-h)) / (2.0 * h); };
  const double coarse = d(opt.step);
  if (!opt.richardson) return coarse;
  return (4.0 * d(0.5 * opt.step) - coarse) / 3.0;
}

}  // namespace

double oracle_ddbar(const RadialFunction& potential, const ComplexVector& z, Complex level, const ComplexVector& v,
                    const ComplexVector& w, const StencilOptions& opt) {
  const double nv = v.norm();
  const double nw = w.norm();
  if (nv == 0.0 || nw == 0.0) return 0.0;
  const double length = std::max(1.0, z.norm());
  const ComplexVector a = v * (length / nv);
  const ComplexVector b = w * (length / nw);
  const VarietyChart chart(z, level);
  const Complex i(0, 1);

  auto hessian = [&](const ComplexVector& p, const ComplexVector& q) {
    auto f = [&](double s, double t) {
      const ComplexVector y = z + s * p + t * q;
      return potential(chart.point(y).squaredNorm());
    };
    return mixed_second_refined(f, opt);
  };
  const ComplexVector ia = i * a;
  const ComplexVector ib = i * b;
  const double value = 0.25 * (hessian(ia, b) - hessian(a, ib));
  return value * (nv / length) * (nw / length);
}

double oracle_ddbar(const PotentialProfile& profile, const TangentVector& v, const TangentVector& w,
                    const StencilOptions& opt) {
  if (v.base().z() != w.base().z()) throw ArgumentError("tangent vectors are attached to different base points");
  auto u = [&profile](double r2) { return profile.potential_r2(r2); };
  return oracle_ddbar(u, v.base().z(), 1.0, v.v(), w.v(), opt);
}

double oracle_d_alpha(const PotentialProfile& profile, const TangentVector& v, const TangentVector& w,
                      const StencilOptions& opt) {
  if (v.base().z() != w.base().z()) throw ArgumentError("tangent vectors are attached to different base points");
  const ComplexVector& z = v.base().z();
  const double nv = v.v().norm();
  const double nw = w.v().norm();
  if (nv == 0.0 || nw == 0.0) return 0.0;
  const double length = std::max(1.0, z.norm());
  const ComplexVector a = v.v() * (length / nv);
  const ComplexVector b = w.v() * (length / nw);
  const VarietyChart chart(z, 1.0);
  const Complex i(0, 1);

  // alpha at chart coordinate y evaluated on the coordinate direction d.
  auto alpha = [&](const ComplexVector& y, const ComplexVector& d) {
    const ComplexVector p = chart.point(y);
    return 0.5 * profile.u_prime_r2(p.squaredNorm()) * real_inner(chart.push(y, d), i * p);
  };
  auto along = [&](const ComplexVector& move, const ComplexVector& eval) {
    return centered_first_refined([&](double s) { return alpha(z + s * move, eval); }, opt);
  };
  // Coordinate fields commute, so d(alpha)(a, b) = a(alpha(b)) - b(alpha(a)).
  const double value = along(a, b) - along(b, a);
  return value * (nv / length) * (nw / length);
}

QuadricPoint move_on_quadric(const QuadricPoint& z, const ComplexVector& v, double s) {
  const VarietyChart chart(z.z(), 1.0);
  return QuadricPoint(chart.point(z.z() + s * v));
}

}  // namespace cyslag
