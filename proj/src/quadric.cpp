#include "cyslag/quadric.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "cyslag/errors.hpp"

namespace cyslag {

namespace {

// sinh(r) / r, with the series near the removable singularity at r = 0.
double sinhc(double r) {
  if (std::abs(r) < 1e-4) {
    const double r2 = r * r;
    return 1.0 + r2 / 6.0 + r2 * r2 / 120.0;
  }
  return std::sinh(r) / r;
}

void require_orthogonal(const RealMatrix& g, int dim) {
  if (g.rows() != dim || g.cols() != dim) {
    throw ArgumentError("group element has wrong dimension");
  }
  const double defect = (g.transpose() * g - RealMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (defect > 1e-12) {
    std::ostringstream os;
    os << "group element is not orthogonal (|g^T g - I| = " << defect << ")";
    throw ArgumentError(os.str());
  }
}

RealMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

double real_inner(const ComplexVector& a, const ComplexVector& b) {
  return b.dot(a).real();  // Eigen's dot conjugates its first argument
}

double omega_flat(const ComplexVector& a, const ComplexVector& b) {
  return -b.dot(a).imag();
}

Complex bilinear_dot(const ComplexVector& a, const ComplexVector& b) {
  return (a.array() * b.array()).sum();
}

double quadric_residual(const ComplexVector& z, double level) {
  return std::abs(bilinear_dot(z, z) - level);
}

QuadricPoint::QuadricPoint(ComplexVector z, double tol) : z_(std::move(z)) {
  if (z_.size() < 3) throw ArgumentError("quadric points need n >= 2 (at least 3 coordinates)");
  if (!z_.allFinite()) throw ConstraintError("quadric point has non-finite coordinates");
  const double res = quadric_residual(z_);
  if (res > tol * std::max(1.0, z_.squaredNorm())) {
    std::ostringstream os;
    os << "point is off the quadric: |sum z_i^2 - 1| = " << res;
    throw ConstraintError(os.str());
  }
}

TangentVector::TangentVector(QuadricPoint base, ComplexVector v, double tol)
    : base_(std::move(base)), v_(std::move(v)) {
  if (v_.size() != base_.z().size()) throw ArgumentError("tangent vector has wrong dimension");
  const double res = std::abs(bilinear_dot(base_.z(), v_));
  if (res > tol * std::max(1.0, base_.z().norm() * v_.norm())) {
    std::ostringstream os;
    os << "vector is not tangent to the quadric: |sum z_i v_i| = " << res;
    throw ConstraintError(os.str());
  }
}

CotangentPoint::CotangentPoint(RealVector x, RealVector xi, double tol) : x_(std::move(x)), xi_(std::move(xi)) {
  if (x_.size() < 3 || x_.size() != xi_.size()) throw ArgumentError("cotangent point needs x, xi in R^{n+1}, n >= 2");
  if (std::abs(x_.norm() - 1.0) > tol) throw ConstraintError("cotangent point: |x| != 1");
  if (std::abs(x_.dot(xi_)) > tol * std::max(1.0, xi_.norm())) throw ConstraintError("cotangent point: x.xi != 0");
}

LieAlgebraElement::LieAlgebraElement(RealMatrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw ArgumentError("Lie algebra element must be square");
  if (!(a_.transpose() == -a_)) throw ArgumentError("Lie algebra element must be antisymmetric");
}

LieAlgebraElement LieAlgebraElement::plane(int dim, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= dim || j >= dim) throw ArgumentError("invalid rotation plane");
  RealMatrix a = RealMatrix::Zero(dim, dim);
  a(j, i) = 1.0;
  a(i, j) = -1.0;
  return LieAlgebraElement(std::move(a));
}

RealMatrix LieAlgebraElement::exp(double angle) const {
  const RealMatrix scaled = angle * a_;
  return scaled.exp();
}

GroupPreset make_preset(PresetName name, int n) {
  if (n < 2) throw ArgumentError("n must be >= 2");
  if (name != PresetName::SOn_STAB && n != 3) {
    throw ArgumentError(std::string("preset ") + std::string(preset_label(name)) + " requires n = 3");
  }
  GroupPreset preset{name, {}};
  auto add = [&](RealMatrix m) { preset.generators.emplace_back(std::move(m)); };

  // so(3)_1 generators, shared by SO3_TILDE and S1xSO3.
  const RealMatrix q1 = from_rows({{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}});
  const RealMatrix q2 = from_rows({{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}});
  const RealMatrix q3 = from_rows({{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}});
  const RealMatrix b1 = from_rows({{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});

  switch (name) {
    case PresetName::SO4:
      add(b1);
      add(from_rows({{0, 0, -1, 0}, {0, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}}));
      add(from_rows({{0, 0, 0, -1}, {0, 0, 0, 0}, {0, 0, 0, 0}, {1, 0, 0, 0}}));
      add(from_rows({{0, 0, 0, 0}, {0, 0, 1, 0}, {0, -1, 0, 0}, {0, 0, 0, 0}}));
      add(from_rows({{0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}, {0, -1, 0, 0}}));
      add(from_rows({{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}}));
      break;
    case PresetName::SO3_TILDE:
      add(q1);
      add(q2);
      add(q3);
      break;
    case PresetName::S1xSO3:
      add(b1);
      add(q1);
      add(q2);
      add(q3);
      break;
    case PresetName::T2:
      add(b1);
      add(from_rows({{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}}));
      break;
    case PresetName::SO3_STAB:
      add(from_rows({{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}}));
      add(from_rows({{0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}, {0, -1, 0, 0}}));
      add(from_rows({{0, 0, 0, 0}, {0, 0, -1, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}}));
      break;
    case PresetName::SOn_STAB:
      for (int j = 1; j <= n; ++j) {
        for (int k = j + 1; k <= n; ++k) preset.generators.push_back(LieAlgebraElement::plane(n + 1, j, k));
      }
      break;
  }
  return preset;
}

std::string_view preset_label(PresetName name) {
  switch (name) {
    case PresetName::SO4: return "SO4";
    case PresetName::SO3_TILDE: return "SO3_TILDE";
    case PresetName::S1xSO3: return "S1xSO3";
    case PresetName::T2: return "T2";
    case PresetName::SO3_STAB: return "SO3_STAB";
    case PresetName::SOn_STAB: return "SOn_STAB";
  }
  return "?";
}

std::optional<PresetName> parse_preset(std::string_view label) {
  for (auto p : {PresetName::SO4, PresetName::SO3_TILDE, PresetName::S1xSO3, PresetName::T2, PresetName::SO3_STAB,
                 PresetName::SOn_STAB}) {
    if (preset_label(p) == label) return p;
  }
  return std::nullopt;
}

bool preset_is_abelian(PresetName name, int n) {
  return name == PresetName::T2 || (name == PresetName::SOn_STAB && n == 2);
}

QuadricPoint embed(const CotangentPoint& p) {
  const double r = p.xi().norm();
  ComplexVector z(p.x().size());
  const double ch = std::cosh(r);
  const double sc = sinhc(r);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = Complex(p.x()[i] * ch, sc * p.xi()[i]);
  return QuadricPoint(std::move(z));
}

CotangentPoint unembed(const QuadricPoint& q) {
  const ComplexVector& z = q.z();
  if (q.norm2() < 1.0 - kConstraintTol) throw ConstraintError("|z|^2 < 1 is impossible on the quadric");
  const RealVector re = z.real();
  const RealVector im = z.imag();
  // On the quadric |Im z| = sinh(rho) exactly; asinh is well conditioned near the zero section.
  const double rho = std::asinh(im.norm());
  return CotangentPoint(re / std::cosh(rho), im / sinhc(rho), 1e-9);
}

QuadricPoint apply_group(const RealMatrix& g, const QuadricPoint& z) {
  require_orthogonal(g, static_cast<int>(z.z().size()));
  return QuadricPoint(g.cast<Complex>() * z.z());
}

CotangentPoint apply_group(const RealMatrix& g, const CotangentPoint& p) {
  require_orthogonal(g, static_cast<int>(p.x().size()));
  return CotangentPoint(g * p.x(), g * p.xi(), 1e-9);
}

TangentVector generator_field(const LieAlgebraElement& a, const QuadricPoint& z) {
  if (a.dim() != z.z().size()) throw ArgumentError("generator dimension does not match the point");
  return TangentVector(z, a.matrix().cast<Complex>() * z.z());
}

RealMatrix torus_element(double theta1, double theta2) {
  RealMatrix g = RealMatrix::Zero(4, 4);
  g(0, 0) = std::cos(theta1);
  g(0, 1) = -std::sin(theta1);
  g(1, 0) = std::sin(theta1);
  g(1, 1) = std::cos(theta1);
  g(2, 2) = std::cos(theta2);
  g(2, 3) = -std::sin(theta2);
  g(3, 2) = std::sin(theta2);
  g(3, 3) = std::cos(theta2);
  return g;
}

RealMatrix random_rotation(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  RealMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = normal(rng);
  Eigen::HouseholderQR<RealMatrix> qr(m);
  RealMatrix q = qr.householderQ();
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

CotangentPoint random_cotangent_point(int n, double xi_max, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RealVector x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = normal(rng);
  x.normalize();
  RealVector d(n + 1);
  for (int i = 0; i <= n; ++i) d[i] = normal(rng);
  d -= x.dot(d) * x;
  d.normalize();
  return CotangentPoint(x, xi_max * unif(rng) * d);
}

}  // namespace cyslag
