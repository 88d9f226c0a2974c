#include "cyslag/slag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "cyslag/cy_structure.hpp"
#include "cyslag/errors.hpp"
#include "cyslag/oracle.hpp"

namespace cyslag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Complex int_power(Complex base, int k) {
  Complex r(1.0, 0.0);
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

void require_branch(Complex z0) {
  if (std::abs(z0.imag()) <= 1e-15 * std::max(1.0, std::abs(z0)) && std::abs(z0.real()) > 1.0) {
    std::ostringstream os;
    os << "arccos evaluated on its branch cut at z0 = " << z0.real() << (z0.imag() < 0 ? " - " : " + ")
       << std::abs(z0.imag()) << "i";
    throw BranchError(os.str());
  }
}

double moment_term(double u_prime, const ComplexVector& z, int i, int j) {
  return u_prime * (z[i] * std::conj(z[j])).imag();
}

}  // namespace

std::string_view family_label(Family f) {
  switch (f) {
    case Family::T2: return "T2";
    case Family::SO3: return "SO3";
    case Family::SOn: return "SOn";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view label) {
  for (auto f : {Family::T2, Family::SO3, Family::SOn})
    if (family_label(f) == label) return f;
  return std::nullopt;
}

LeafSpec make_leaf_spec(Family family, std::vector<double> constants, std::shared_ptr<const PotentialProfile> profile) {
  if (!profile) throw ArgumentError("leaf spec needs a potential profile");
  const int n = profile->n();
  if ((family == Family::T2 || family == Family::SO3) && n != 3) {
    throw ArgumentError(std::string(family_label(family)) + " leaves require n = 3");
  }
  const std::size_t expected = family == Family::SOn ? static_cast<std::size_t>(n) : 3;
  if (constants.size() != expected) {
    std::ostringstream os;
    os << family_label(family) << " leaves take " << expected << " constants, got " << constants.size();
    throw ArgumentError(os.str());
  }
  for (double c : constants)
    if (!std::isfinite(c)) throw ArgumentError("leaf constants must be finite");
  return LeafSpec{family, std::move(constants), std::move(profile)};
}

double so3_level(Complex z0) {
  require_branch(z0);
  const Complex tau = std::acos(z0);
  return (2.0 * tau - 2.0 * z0 * std::sin(tau)).imag();
}

Complex son_primitive(int n, Complex tau) {
  if (n < 2) throw ArgumentError("son_primitive needs n >= 2");
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(tau) / 0.25)));
  auto integrand = [n, tau](double s) { return int_power(std::sin(s * tau), n - 1); };
  Complex total(0.0, 0.0);
  for (int k = 0; k < panels; ++k) {
    const double a = static_cast<double>(k) / panels;
    const double b = static_cast<double>(k + 1) / panels;
    total += boost::math::quadrature::gauss<double, 10>::integrate(integrand, a, b);
  }
  return total * tau;
}

double son_level(int n, Complex z0) {
  require_branch(z0);
  return son_primitive(n, std::acos(z0)).imag();
}

LeafSpec classify_point(std::shared_ptr<const PotentialProfile> profile, const QuadricPoint& z, Family family) {
  const double up = profile->u_prime_r2(z.norm2());
  const ComplexVector& v = z.z();
  std::vector<double> c;
  switch (family) {
    case Family::T2:
      if (z.n() != 3) throw ArgumentError("T2 leaves require n = 3");
      c = {moment_term(up, v, 0, 1), moment_term(up, v, 2, 3), (v[0] * v[0] + v[1] * v[1]).imag()};
      break;
    case Family::SO3:
      if (z.n() != 3) throw ArgumentError("SO3 leaves require n = 3");
      c = {moment_term(up, v, 1, 2), moment_term(up, v, 2, 3), so3_level(v[0])};
      break;
    case Family::SOn:
      for (int j = 2; j <= z.n(); ++j) c.push_back(moment_term(up, v, 1, j));
      c.push_back(son_level(z.n(), v[0]));
      break;
  }
  return make_leaf_spec(family, std::move(c), std::move(profile));
}

RealVector leaf_residual(const LeafSpec& spec, const QuadricPoint& z) {
  const LeafSpec here = classify_point(spec.profile, z, spec.family);
  RealVector r(static_cast<Eigen::Index>(here.constants.size()));
  for (std::size_t k = 0; k < here.constants.size(); ++k)
    r[static_cast<Eigen::Index>(k)] = here.constants[k] - spec.constants[k];
  return r;
}

RealVector son_family_residual(const PotentialProfile& profile, const QuadricPoint& z,
                               const std::vector<double>& constants) {
  const int n = z.n();
  if (n != profile.n()) throw ArgumentError("profile dimension does not match the point");
  if (static_cast<int>(constants.size()) != n) throw ArgumentError("SOn residual takes n constants");
  const double up = profile.u_prime_r2(z.norm2());
  RealVector r(n);
  for (int j = 2; j <= n; ++j) r[j - 2] = moment_term(up, z.z(), 1, j) - constants[j - 2];
  r[n - 1] = son_level(n, z.z()[0]) - constants[n - 1];
  return r;
}

// ---- Profile coordinates ----------------------------------------------------------------

ComplexVector t2_slice_point(const RealVector& p) {
  const double t = p[0], rho = p[1], phi = p[2], psi = p[3];
  const double ch = std::cosh(rho), sh = std::sinh(rho);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const Complex i(0, 1);
  ComplexVector z(4);
  z << std::cos(t) * ch - i * sh * cp * std::sin(t), i * sh * sp * std::cos(psi),
      std::sin(t) * ch + i * sh * cp * std::cos(t), i * sh * sp * std::sin(psi);
  return z;
}

ComplexVector t2_slice_velocity(const RealVector& p, const RealVector& dp) {
  const double t = p[0], rho = p[1], phi = p[2], psi = p[3];
  const double ct = std::cos(t), st = std::sin(t);
  const double ch = std::cosh(rho), sh = std::sinh(rho);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double cs = std::cos(psi), ss = std::sin(psi);
  const Complex i(0, 1);
  ComplexVector d_t(4), d_rho(4), d_phi(4), d_psi(4);
  d_t << -st * ch - i * sh * cp * ct, 0.0, ct * ch - i * sh * cp * st, 0.0;
  d_rho << ct * sh - i * ch * cp * st, i * ch * sp * cs, st * sh + i * ch * cp * ct, i * ch * sp * ss;
  d_phi << i * sh * sp * st, i * sh * cp * cs, -i * sh * sp * ct, i * sh * cp * ss;
  d_psi << 0.0, -i * sh * sp * ss, 0.0, i * sh * sp * cs;
  return dp[0] * d_t + dp[1] * d_rho + dp[2] * d_phi + dp[3] * d_psi;
}

ComplexVector rotation_slice_point(int n, double t, double rho) {
  const Complex tau(t, rho);
  ComplexVector z = ComplexVector::Zero(n + 1);
  z[0] = std::cos(tau);
  z[1] = std::sin(tau);
  return z;
}

namespace {

bool plane_chart(const RealVector& x, double t_min, double t_max, double rho_max) {
  return x[0] >= t_min - 1e-9 && x[0] <= t_max + 1e-9 && x[1] >= -1e-12 && x[1] <= rho_max;
}

}  // namespace

RealVector So3CurveSystem::residual(const RealVector& x) const {
  RealVector r(1);
  r[0] = 2.0 * x[1] - std::cos(2.0 * x[0]) * std::sinh(2.0 * x[1]) - c_;
  return r;
}

RealMatrix So3CurveSystem::jacobian(const RealVector& x) const {
  RealMatrix j(1, 2);
  j(0, 0) = 2.0 * std::sin(2.0 * x[0]) * std::sinh(2.0 * x[1]);
  j(0, 1) = 2.0 - 2.0 * std::cos(2.0 * x[0]) * std::cosh(2.0 * x[1]);
  return j;
}

RealVector So3CurveSystem::row_scales(const RealVector& x) const {
  return RealVector::Constant(1, 1.0 + std::abs(c_) + 2.0 * std::abs(x[1]) + std::sinh(2.0 * std::abs(x[1])));
}

bool So3CurveSystem::in_chart(const RealVector& x) const { return plane_chart(x, 0.0, M_PI, rho_max_); }

RealVector T2ZeroCurveSystem::residual(const RealVector& x) const {
  RealVector r(1);
  r[0] = std::sin(2.0 * x[0]) * std::sinh(2.0 * x[1]) - c_;
  return r;
}

RealMatrix T2ZeroCurveSystem::jacobian(const RealVector& x) const {
  RealMatrix j(1, 2);
  j(0, 0) = 2.0 * std::cos(2.0 * x[0]) * std::sinh(2.0 * x[1]);
  j(0, 1) = 2.0 * std::sin(2.0 * x[0]) * std::cosh(2.0 * x[1]);
  return j;
}

RealVector T2ZeroCurveSystem::row_scales(const RealVector& x) const {
  return RealVector::Constant(1, 1.0 + std::abs(c_) + std::sinh(2.0 * std::abs(x[1])));
}

bool T2ZeroCurveSystem::in_chart(const RealVector& x) const { return plane_chart(x, 0.0, M_PI, rho_max_); }

RealVector SonCurveSystem::residual(const RealVector& x) const {
  RealVector r(1);
  r[0] = son_primitive(n_, Complex(x[0], x[1])).imag() - c_;
  return r;
}

RealMatrix SonCurveSystem::jacobian(const RealVector& x) const {
  const Complex d = int_power(std::sin(Complex(x[0], x[1])), n_ - 1);
  RealMatrix j(1, 2);
  j(0, 0) = d.imag();
  j(0, 1) = d.real();
  return j;
}

RealVector SonCurveSystem::row_scales(const RealVector& x) const {
  return RealVector::Constant(1, 1.0 + std::abs(c_) + std::abs(son_primitive(n_, Complex(x[0], x[1]))));
}

bool SonCurveSystem::in_chart(const RealVector& x) const { return plane_chart(x, 0.0, M_PI, rho_max_); }

T2CurveSystem::T2CurveSystem(std::shared_ptr<const PotentialProfile> profile, double c1, double c2, double c3,
                             double rho_max)
    : profile_(std::move(profile)), c1_(c1), c2_(c2), c3_(c3), rho_max_(rho_max) {
  if (!profile_ || profile_->n() != 3) throw ArgumentError("T2 curves need an n = 3 profile");
  if (2.0 * rho_max_ > profile_->tau_max()) throw ArgumentError("rho_max exceeds the tabulated potential range");
}

RealVector T2CurveSystem::residual(const RealVector& x) const {
  const double t = x[0], rho = x[1], phi = x[2], psi = x[3];
  if (!x.allFinite() || 2.0 * std::abs(rho) > profile_->tau_max()) return RealVector::Constant(3, kNaN);
  // w is odd in rho for the purpose of Newton iterates that wander below the zero section.
  const double w = std::copysign(profile_->w(2.0 * std::abs(rho)), rho);
  const double sp = std::sin(phi);
  RealVector r(3);
  r[0] = -0.5 * w * std::cos(t) * sp * std::cos(psi) - c1_;
  r[1] = -0.5 * w * std::sin(t) * sp * std::sin(psi) - c2_;
  r[2] = -0.5 * std::sinh(2.0 * rho) * std::sin(2.0 * t) * std::cos(phi) - c3_;
  return r;
}

RealMatrix T2CurveSystem::jacobian(const RealVector& x) const {
  const double t = x[0], rho = x[1], phi = x[2], psi = x[3];
  RealMatrix j(3, 4);
  if (!x.allFinite() || 2.0 * std::abs(rho) > profile_->tau_max()) return RealMatrix::Constant(3, 4, kNaN);
  const double w = std::copysign(profile_->w(2.0 * std::abs(rho)), rho);
  const double dw = profile_->dw(2.0 * std::abs(rho));
  const double ct = std::cos(t), st = std::sin(t);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double cs = std::cos(psi), ss = std::sin(psi);
  const double sh2 = std::sinh(2.0 * rho), ch2 = std::cosh(2.0 * rho);
  j << 0.5 * w * st * sp * cs, -dw * ct * sp * cs, -0.5 * w * ct * cp * cs, 0.5 * w * ct * sp * ss,
      -0.5 * w * ct * sp * ss, -dw * st * sp * ss, -0.5 * w * st * cp * ss, -0.5 * w * st * sp * cs,
      -sh2 * std::cos(2.0 * t) * cp, -ch2 * std::sin(2.0 * t) * cp, 0.5 * sh2 * std::sin(2.0 * t) * sp, 0.0;
  return j;
}

RealVector T2CurveSystem::row_scales(const RealVector& x) const {
  const double rho = std::min(std::abs(x[1]), 0.5 * profile_->tau_max());
  const double w = std::isfinite(rho) ? profile_->w(2.0 * rho) : 1.0;
  RealVector s(3);
  s << 1.0 + 0.5 * w + std::abs(c1_), 1.0 + 0.5 * w + std::abs(c2_), 1.0 + 0.5 * std::sinh(2.0 * rho) + std::abs(c3_);
  return s;
}

bool T2CurveSystem::in_chart(const RealVector& x) const { return x[1] >= 0.0 && x[1] <= rho_max_; }

std::size_t ProfileCurve::vertex_count() const noexcept {
  std::size_t n = 0;
  for (const auto& b : branches) n += b.points.size();
  return n;
}

// ---- Tracing --------------------------------------------------------------------------

namespace {

bool near_existing(const std::vector<TracedBranch>& branches, const RealVector& x, double tol) {
  for (const auto& b : branches)
    if (distance_to_polyline(b.points, x) < tol) return true;
  return false;
}

// Roots of rho -> f(t, rho) (column) or t -> f(t, rho) (row) found by sign changes and TOMS 748.
std::vector<RealVector> scan_line(const ImplicitSystem& sys, const RealVector& start, int coord, double lo, double hi,
                                  int samples) {
  std::vector<RealVector> roots;
  auto f = [&](double v) {
    RealVector x = start;
    x[coord] = v;
    return sys.residual(x)[0];
  };
  auto at = [&](double v) {
    RealVector x = start;
    x[coord] = v;
    return x;
  };
  double prev_v = lo;
  double prev_f = f(lo);
  if (prev_f == 0.0) roots.push_back(at(lo));
  for (int k = 1; k <= samples; ++k) {
    const double v = lo + (hi - lo) * k / samples;
    const double fv = f(v);
    if (!std::isfinite(fv) || !std::isfinite(prev_f)) {
      prev_v = v;
      prev_f = fv;
      continue;
    }
    if (fv == 0.0) {
      roots.push_back(at(v));
    } else if (prev_f != 0.0 && (prev_f < 0.0) != (fv < 0.0)) {
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(f, prev_v, v, prev_f, fv,
                                                            boost::math::tools::eps_tolerance<double>(52), iters);
      roots.push_back(at(0.5 * (a + b)));
    }
    prev_v = v;
    prev_f = fv;
  }
  return roots;
}

}  // namespace

std::vector<TracedBranch> trace_plane_curves(const ImplicitSystem& sys, const TraceOptions& opt) {
  std::vector<RealVector> seeds;
  for (int k = 0; k < opt.scan_columns; ++k) {
    const double t = opt.t_min + (opt.t_max - opt.t_min) * (k + 0.5) / opt.scan_columns;
    RealVector start(2);
    start << t, 0.0;
    for (auto& s : scan_line(sys, start, 1, 0.0, opt.rho_max, opt.scan_samples)) seeds.push_back(std::move(s));
  }
  for (int k = 0; k < opt.scan_rows; ++k) {
    const double rho = opt.rho_max * (k + 0.5) / opt.scan_rows;
    RealVector start(2);
    start << opt.t_min, rho;
    for (auto& s : scan_line(sys, start, 0, opt.t_min, opt.t_max, opt.scan_samples)) seeds.push_back(std::move(s));
  }

  std::vector<TracedBranch> branches;
  const double dedup = 0.5 * opt.continuation.max_step;
  for (const auto& raw : seeds) {
    if (branches.size() >= opt.max_branches) break;
    auto seed = newton_min_norm(sys, raw, opt.continuation.tolerance);
    if (!seed || !sys.in_chart(*seed) || near_existing(branches, *seed, dedup)) continue;
    branches.push_back(trace_branch(sys, *seed, opt.continuation));
  }
  return branches;
}

ProfileCurve trace_profile_curve(const LeafSpec& spec, const TraceOptions& opt) {
  ProfileCurve curve;
  curve.family = spec.family;
  const auto& c = spec.constants;
  if (2.0 * opt.rho_max > spec.profile->tau_max()) throw ArgumentError("rho_max exceeds the tabulated potential range");

  auto zero_levels = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k)
      if (c[k] != 0.0) return false;
    return true;
  };

  switch (spec.family) {
    case Family::SO3: {
      if (!zero_levels(2)) {
        curve.messages.push_back("nonzero moment level: no SO(3)-invariant leaf meets the slice");
        return curve;
      }
      curve.branches = trace_plane_curves(So3CurveSystem(c[2], opt.rho_max), opt);
      break;
    }
    case Family::SOn: {
      const int n = spec.profile->n();
      if (!zero_levels(static_cast<std::size_t>(n - 1))) {
        curve.messages.push_back("nonzero moment level: no SO(n)-invariant leaf meets the slice");
        return curve;
      }
      curve.branches = trace_plane_curves(SonCurveSystem(n, c[n - 1], opt.rho_max), opt);
      break;
    }
    case Family::T2: {
      if (c[0] == 0.0 && c[1] == 0.0) {
        curve.reduced = true;
        curve.messages.push_back(
            "c1 = c2 = 0: the torus system is degenerate along sin(phi) = 0; reduced to Im(z0^2 + z1^2) = c3 with "
            "phi = psi = 0");
        auto plane = trace_plane_curves(T2ZeroCurveSystem(-2.0 * c[2], opt.rho_max), opt);
        for (auto& b : plane) {
          for (auto& p : b.points) p = (RealVector(4) << p[0], p[1], 0.0, 0.0).finished();
          for (auto& t : b.tangents) t = (RealVector(4) << t[0], t[1], 0.0, 0.0).finished();
          for (auto& note : b.notices) note.x = (RealVector(4) << note.x[0], note.x[1], 0.0, 0.0).finished();
        }
        curve.branches = std::move(plane);
        break;
      }
      const T2CurveSystem sys(spec.profile, c[0], c[1], c[2], opt.rho_max);
      std::mt19937_64 rng(opt.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const std::size_t wanted = std::min<std::size_t>(opt.max_branches, 2);
      for (int k = 0; k < opt.random_starts && curve.branches.size() < wanted; ++k) {
        RealVector x(4);
        x << M_PI * unit(rng), opt.rho_max * (0.1 + 0.7 * unit(rng)), M_PI * unit(rng), 2.0 * M_PI * unit(rng);
        auto seed = newton_min_norm(sys, x, opt.continuation.tolerance);
        if (!seed || !sys.in_chart(*seed)) continue;
        bool duplicate = false;
        for (const auto& b : curve.branches) {
          for (const auto& p : b.points) {
            RealVector d = *seed - p;
            d[0] = wrap_angle(d[0]);
            d[2] = wrap_angle(d[2]);
            d[3] = wrap_angle(d[3]);
            if (d.norm() < opt.continuation.max_step) {
              duplicate = true;
              break;
            }
          }
          if (duplicate) break;
        }
        if (!duplicate) curve.branches.push_back(trace_branch(sys, *seed, opt.continuation));
      }
      break;
    }
  }
  if (curve.branches.empty()) curve.messages.push_back("no solution found in the chart");
  return curve;
}

// ---- Sampling and verification ----------------------------------------------------------

namespace {

RealMatrix block_rotation(const RealMatrix& r) {
  const auto n = r.rows();
  RealMatrix g = RealMatrix::Identity(n + 1, n + 1);
  g.bottomRightCorner(n, n) = r;
  return g;
}

RealMatrix sphere_frame_rotation(double theta, double phi) {
  RealMatrix r(3, 3);
  const double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
  r.col(0) << cp * ct, cp * st, sp;
  r.col(1) << -st, ct, 0.0;
  r.col(2) << -sp * ct, -sp * st, cp;
  return r;
}

std::vector<std::size_t> spread_indices(std::size_t size, std::size_t count) {
  std::vector<std::size_t> idx;
  if (size == 0) return idx;
  if (count >= size) {
    for (std::size_t k = 0; k < size; ++k) idx.push_back(k);
    return idx;
  }
  for (std::size_t k = 0; k < count; ++k) {
    idx.push_back(count == 1 ? 0 : (k * (size - 1)) / (count - 1));
  }
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

void finish_frame(LeafSamplePoint& p) {
  p.frame_ok = realified_conditioning(p.frame) > 1e-8;
}

}  // namespace

LeafSample sample_leaf(const LeafSpec& spec, const ProfileCurve& curve, const SampleOptions& opt) {
  if (curve.empty()) throw ArgumentError("cannot sample an empty profile curve");
  LeafSample sample{spec, {}, 0};
  const int n = spec.profile->n();
  const int m = std::max(1, opt.group_grid);
  std::mt19937_64 rng(opt.seed);

  for (std::size_t b = 0; b < curve.branches.size(); ++b) {
    const auto& branch = curve.branches[b];
    for (std::size_t k : spread_indices(branch.points.size(), opt.curve_points)) {
      const RealVector& x = branch.points[k];
      const RealVector& dx = branch.tangents[k];
      if (spec.family == Family::T2) {
        const ComplexVector p = t2_slice_point(x);
        const ComplexVector v = t2_slice_velocity(x, dx);
        const GroupPreset torus = make_preset(PresetName::T2, 3);
        for (int a = 0; a < m; ++a) {
          for (int c = 0; c < m; ++c) {
            const double th1 = 2.0 * M_PI * a / m, th2 = 2.0 * M_PI * c / m;
            const RealMatrix g = torus_element(th1, th2);
            LeafSamplePoint s{QuadricPoint(g.cast<Complex>() * p), x, {th1, th2}, b, {}, {}, false};
            for (const auto& gen : torus.generators) {
              s.frame_generators.push_back(gen.matrix());
              s.frame.emplace_back(gen.matrix().cast<Complex>() * s.z.z());
            }
            s.frame.emplace_back(g.cast<Complex>() * v);
            finish_frame(s);
            sample.points.push_back(std::move(s));
          }
        }
      } else {
        const Complex tau(x[0], x[1]);
        const Complex tau_dot(dx[0], dx[1]);
        const ComplexVector p = rotation_slice_point(n, x[0], x[1]);
        ComplexVector v = ComplexVector::Zero(n + 1);
        v[0] = -std::sin(tau) * tau_dot;
        v[1] = std::cos(tau) * tau_dot;
        std::vector<RealMatrix> gens;
        if (spec.family == Family::SO3) {
          gens.push_back(LieAlgebraElement::plane(4, 1, 2).matrix());  // A3
          gens.push_back(LieAlgebraElement::plane(4, 3, 1).matrix());  // A2
        } else {
          for (int j = 2; j <= n; ++j) gens.push_back(LieAlgebraElement::plane(n + 1, 1, j).matrix());
        }
        for (int a = 0; a < m; ++a) {
          for (int c = 0; c < m; ++c) {
            RealMatrix g;
            std::vector<double> angles;
            if (spec.family == Family::SO3) {
              const double theta = 2.0 * M_PI * a / m;
              const double phi = -0.5 * M_PI + M_PI * (c + 0.5) / m;
              g = block_rotation(sphere_frame_rotation(theta, phi));
              angles = {theta, phi};
            } else {
              g = block_rotation(random_rotation(n, rng));
            }
            LeafSamplePoint s{QuadricPoint(g.cast<Complex>() * p), x, angles, b, {}, {}, false};
            for (const auto& gen : gens) {
              const RealMatrix conj = g * gen * g.transpose();
              s.frame_generators.push_back(conj);
              s.frame.emplace_back(conj.cast<Complex>() * s.z.z());
            }
            s.frame.emplace_back(g.cast<Complex>() * v);
            finish_frame(s);
            sample.points.push_back(std::move(s));
          }
        }
      }
    }
  }
  for (const auto& s : sample.points)
    if (!s.frame_ok) ++sample.excluded_frames;
  return sample;
}

SlagReport verify_special_lagrangian(const PotentialProfile& profile, const LeafSample& sample) {
  SlagReport report;
  std::vector<double> ratios;
  for (const auto& s : sample.points) {
    try {
      report.max_leaf_residual =
          std::max(report.max_leaf_residual, leaf_residual(sample.spec, s.z).cwiseAbs().maxCoeff());
    } catch (const BranchError&) {
      // Points on the arccos cut carry no third-equation value; the frame checks still apply.
    }
    if (!s.frame_ok) continue;
    const ComplexVector& z = s.z.z();
    const PotentialDerivatives d = profile.derivatives_r2(s.z.norm2());
    std::vector<double> norms;
    for (const auto& y : s.frame) norms.push_back(std::sqrt(metric_radial(d, z, y, y)));
    for (std::size_t i = 0; i < s.frame.size(); ++i) {
      for (std::size_t j = i + 1; j < s.frame.size(); ++j) {
        const double w = omega_radial(d, z, s.frame[i], s.frame[j]);
        report.max_omega = std::max(report.max_omega, std::abs(w) / (norms[i] * norms[j]));
      }
    }
    const Complex big = omega_big_det(z, s.frame);
    report.max_im_omega = std::max(report.max_im_omega, std::abs(big.imag()) / std::abs(big));
    ratios.push_back(std::abs(big) / metric_volume(d, z, s.frame));
    ++report.frames_used;
  }
  if (!ratios.empty()) {
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    var /= static_cast<double>(ratios.size());
    report.calibration_cv = std::sqrt(var) / mean;
  }
  return report;
}

LeafSample nudge_sample(const LeafSample& sample, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  LeafSample out{sample.spec, {}, 0};
  for (const auto& s : sample.points) {
    const auto basis = holomorphic_tangent_basis(s.z.z());
    ComplexVector dir = ComplexVector::Zero(s.z.z().size());
    for (const auto& b : basis) dir += Complex(normal(rng), normal(rng)) * b;
    dir.normalize();
    LeafSamplePoint moved = s;
    moved.z = move_on_quadric(s.z, dir, amplitude);
    const ComplexVector& z = moved.z.z();
    moved.frame.clear();
    for (const auto& gen : moved.frame_generators) moved.frame.emplace_back(gen.cast<Complex>() * z);
    const ComplexVector& v = s.frame.back();
    const ComplexVector zbar = z.conjugate();
    moved.frame.emplace_back(v - (bilinear_dot(z, v) / z.squaredNorm()) * zbar);
    finish_frame(moved);
    if (!moved.frame_ok) ++out.excluded_frames;
    out.points.push_back(std::move(moved));
  }
  return out;
}

}  // namespace cyslag
