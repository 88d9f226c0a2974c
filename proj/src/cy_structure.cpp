#include "cyslag/cy_structure.hpp"

#include <cmath>
#include <sstream>

#include "cyslag/errors.hpp"

namespace cyslag {

namespace {

RealVector realify(const ComplexVector& v) {
  RealVector r(2 * v.size());
  r << v.real(), v.imag();
  return r;
}

RealMatrix realify_columns(const std::vector<ComplexVector>& vectors) {
  RealMatrix m(2 * vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = realify(vectors[j]);
  return m;
}

void require_same_base(const TangentVector& v, const TangentVector& w) {
  if (v.base().z() != w.base().z()) throw ArgumentError("tangent vectors are attached to different base points");
}

}  // namespace

double omega_radial(const PotentialDerivatives& d, const ComplexVector& z, const ComplexVector& v,
                    const ComplexVector& w) {
  return d.first * omega_flat(v, w) +
         d.second * (real_inner(w, z) * omega_flat(v, z) - real_inner(v, z) * omega_flat(w, z));
}

double metric_radial(const PotentialDerivatives& d, const ComplexVector& z, const ComplexVector& v,
                     const ComplexVector& w) {
  return omega_radial(d, z, v, Complex(0, 1) * w);
}

double alpha_st(const PotentialProfile& profile, const TangentVector& v) {
  const ComplexVector& z = v.base().z();
  return 0.5 * profile.u_prime_r2(z.squaredNorm()) * real_inner(v.v(), Complex(0, 1) * z);
}

double omega_st(const PotentialProfile& profile, const TangentVector& v, const TangentVector& w) {
  require_same_base(v, w);
  const ComplexVector& z = v.base().z();
  return omega_radial(profile.derivatives_r2(z.squaredNorm()), z, v.v(), w.v());
}

double metric_st(const PotentialProfile& profile, const TangentVector& v, const TangentVector& w) {
  require_same_base(v, w);
  const ComplexVector& z = v.base().z();
  return metric_radial(profile.derivatives_r2(z.squaredNorm()), z, v.v(), w.v());
}

double realified_conditioning(const std::vector<ComplexVector>& vectors) {
  if (vectors.empty()) return 0.0;
  Eigen::JacobiSVD<RealMatrix> svd(realify_columns(vectors));
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

TangentFrame::TangentFrame(QuadricPoint base, std::vector<ComplexVector> vectors)
    : base_(std::move(base)), vectors_(std::move(vectors)) {
  if (static_cast<int>(vectors_.size()) != base_.n()) throw ArgumentError("frame must contain n vectors");
  for (const auto& v : vectors_) TangentVector(base_, v);
  const double cond = realified_conditioning(vectors_);
  if (cond <= 1e-8) {
    std::ostringstream os;
    os << "degenerate frame (singular value ratio " << cond << ")";
    throw ArgumentError(os.str());
  }
}

Complex omega_big_det(const ComplexVector& first_column, const std::vector<ComplexVector>& vectors) {
  const auto dim = first_column.size();
  if (static_cast<Eigen::Index>(vectors.size()) + 1 != dim) throw ArgumentError("determinant needs n vectors");
  ComplexMatrix m(dim, dim);
  m.col(0) = first_column;
  for (std::size_t j = 0; j < vectors.size(); ++j) m.col(static_cast<Eigen::Index>(j) + 1) = vectors[j];
  return m.partialPivLu().determinant();
}

Complex omega_big_st(const TangentFrame& frame) { return omega_big_det(frame.base().z(), frame.vectors()); }

std::vector<ComplexVector> holomorphic_tangent_basis(const ComplexVector& z) {
  const ComplexMatrix row = z.transpose();
  Eigen::JacobiSVD<ComplexMatrix> svd(row, Eigen::ComputeFullV);
  std::vector<ComplexVector> basis;
  for (Eigen::Index j = 1; j < z.size(); ++j) basis.emplace_back(svd.matrixV().col(j));
  return basis;
}

std::vector<ComplexVector> metric_orthonormal_frame(const PotentialProfile& profile, const QuadricPoint& z) {
  const PotentialDerivatives d = profile.derivatives_r2(z.norm2());
  std::vector<ComplexVector> out;
  for (const auto& f : holomorphic_tangent_basis(z.z())) {
    for (const ComplexVector& raw : {f, ComplexVector(Complex(0, 1) * f)}) {
      ComplexVector e = raw;
      // Two passes keep the frame orthonormal to rounding even when g is badly scaled.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& prev : out) e -= metric_radial(d, z.z(), e, prev) * prev;
      }
      e /= std::sqrt(metric_radial(d, z.z(), e, e));
      out.push_back(std::move(e));
    }
  }
  return out;
}

double pfaffian(const RealMatrix& a) {
  const auto m = a.rows();
  if (m != a.cols() || m % 2 != 0) throw ArgumentError("Pfaffian needs an even square matrix");
  if (m == 0) return 1.0;
  if (m == 2) return a(0, 1);
  double total = 0.0;
  double sign = 1.0;
  for (Eigen::Index j = 1; j < m; ++j, sign = -sign) {
    if (a(0, j) == 0.0) continue;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 1; k < m; ++k)
      if (k != j) keep.push_back(k);
    RealMatrix minor(m - 2, m - 2);
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t c = 0; c < keep.size(); ++c) minor(r, c) = a(keep[r], keep[c]);
    total += sign * a(0, j) * pfaffian(minor);
  }
  return total;
}

double cy_ratio(const PotentialProfile& profile, const QuadricPoint& z, const std::vector<ComplexVector>& frame) {
  const int n = z.n();
  if (static_cast<int>(frame.size()) != 2 * n) throw ArgumentError("cy_ratio needs 2n real tangent vectors");
  for (const auto& e : frame) TangentVector(z, e);
  const PotentialDerivatives d = profile.derivatives_r2(z.norm2());

  RealMatrix gram(2 * n, 2 * n);
  RealMatrix w(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      gram(i, j) = metric_radial(d, z.z(), frame[i], frame[j]);
      w(i, j) = omega_radial(d, z.z(), frame[i], frame[j]);
    }
  }
  const double defect = (gram - RealMatrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff();
  if (defect > 1e-8) {
    std::ostringstream os;
    os << "frame is not orthonormal for the metric (defect " << defect << ")";
    throw ArgumentError(os.str());
  }
  // Antisymmetrise to remove rounding before taking the Pfaffian.
  const double top = pfaffian(0.5 * (w - w.transpose()));

  const std::vector<ComplexVector> f = holomorphic_tangent_basis(z.z());
  std::vector<ComplexVector> f_real;
  for (const auto& fk : f) {
    f_real.push_back(fk);
    f_real.emplace_back(Complex(0, 1) * fk);
  }
  const RealMatrix basis = realify_columns(f_real);
  const RealMatrix coords = basis.colPivHouseholderQr().solve(realify_columns(frame));
  const double volume_form = coords.determinant() * std::norm(omega_big_det(z.z(), f));
  return top / volume_form;
}

double metric_volume(const PotentialDerivatives& d, const ComplexVector& z, const std::vector<ComplexVector>& vectors) {
  const auto k = static_cast<Eigen::Index>(vectors.size());
  RealMatrix gram(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) gram(i, j) = metric_radial(d, z, vectors[i], vectors[j]);
  return std::sqrt(std::max(0.0, gram.determinant()));
}

}  // namespace cyslag
