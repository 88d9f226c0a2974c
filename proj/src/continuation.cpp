#include "cyslag/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cyslag {

double ImplicitSystem::scaled_residual(const RealVector& x) const {
  const RealVector f = residual(x);
  const RealVector s = row_scales(x);
  if (!f.allFinite()) return std::numeric_limits<double>::infinity();
  return f.size() == 0 ? 0.0 : (f.array().abs() / s.array()).maxCoeff();
}

std::string notice_label(ContinuationNotice::Kind kind) {
  switch (kind) {
    case ContinuationNotice::Kind::BranchPoint: return "branch_point";
    case ContinuationNotice::Kind::Truncation: return "truncated";
    case ContinuationNotice::Kind::ClosedLoop: return "closed_loop";
    case ContinuationNotice::Kind::StepFailure: return "step_failure";
    case ContinuationNotice::Kind::StepLimit: return "step_limit";
    case ContinuationNotice::Kind::ArcLimit: return "arclength_limit";
  }
  return "?";
}

namespace {

RealMatrix scaled_jacobian(const ImplicitSystem& sys, const RealVector& x) {
  const RealVector s = sys.row_scales(x);
  return s.cwiseInverse().asDiagonal() * sys.jacobian(x);
}

RealVector scaled_residual_vector(const ImplicitSystem& sys, const RealVector& x) {
  return sys.residual(x).cwiseQuotient(sys.row_scales(x));
}

struct Correction {
  RealVector x;
  int iterations;
};

// Newton on [F(y); t.(y - pred)] from pred, then one polishing iteration.
std::optional<Correction> correct(const ImplicitSystem& sys, const RealVector& pred, const RealVector& t,
                                  double tol) {
  const int m = sys.unknowns();
  RealVector y = pred;
  for (int it = 1; it <= 15; ++it) {
    RealMatrix a(m, m);
    RealVector g(m);
    a.topRows(m - 1) = scaled_jacobian(sys, y);
    a.row(m - 1) = t.transpose();
    g.head(m - 1) = scaled_residual_vector(sys, y);
    g(m - 1) = t.dot(y - pred);
    if (!a.allFinite() || !g.allFinite()) return std::nullopt;
    const RealVector dy = a.fullPivLu().solve(-g);
    if (!dy.allFinite()) return std::nullopt;
    y += dy;
    if (sys.scaled_residual(y) <= tol && dy.norm() <= 1e-8 * (1.0 + y.norm())) {
      a.topRows(m - 1) = scaled_jacobian(sys, y);
      g.head(m - 1) = scaled_residual_vector(sys, y);
      g(m - 1) = t.dot(y - pred);
      const RealVector polished = y + a.fullPivLu().solve(-g);
      if (polished.allFinite() && sys.scaled_residual(polished) <= sys.scaled_residual(y)) y = polished;
      return Correction{y, it};
    }
  }
  return std::nullopt;
}

double distance_to_segment(const RealVector& a, const RealVector& b, const RealVector& x) {
  const RealVector ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + s * ab - x).norm();
}

struct DirectionalTrace {
  std::vector<RealVector> points;
  std::vector<RealVector> tangents;
  bool closed = false;
};

DirectionalTrace trace_one_way(const ImplicitSystem& sys, const RealVector& seed, RealVector t,
                               const ContinuationOptions& opt, std::vector<ContinuationNotice>& notices,
                               double& worst_residual) {
  DirectionalTrace out;
  RealVector x = seed;
  double h = opt.initial_step;
  double arclength = 0.0;
  bool in_singular_zone = false;
  for (std::size_t step = 0;; ++step) {
    if (step >= opt.max_steps) {
      notices.push_back({ContinuationNotice::Kind::StepLimit, x, "maximum number of continuation steps reached"});
      break;
    }
    if (arclength >= opt.max_arclength) {
      notices.push_back({ContinuationNotice::Kind::ArcLimit, x, "maximum arclength reached"});
      break;
    }
    const RealVector pred = x + h * t;
    auto corr = correct(sys, pred, t, opt.tolerance);
    bool accept = corr.has_value() && (corr->x - x).norm() <= 2.0 * h;
    RealVector t_new;
    double sigma = 1.0;
    if (accept) {
      std::tie(t_new, sigma) = null_direction(sys, corr->x, &t);
      accept = t_new.dot(t) > 0.5;
    }
    if (!accept) {
      h *= 0.5;
      if (h < opt.min_step) {
        notices.push_back({ContinuationNotice::Kind::StepFailure, x, "corrector failed below the minimum step"});
        break;
      }
      continue;
    }
    const RealVector y = corr->x;
    if (!sys.in_chart(y)) {
      notices.push_back({ContinuationNotice::Kind::Truncation, x, "curve leaves the chart"});
      break;
    }
    for (const auto& [coord, value] : opt.anchors) {
      if ((x[coord] - value) * (y[coord] - value) < 0.0) {
        const double w = (value - x[coord]) / (y[coord] - x[coord]);
        auto hit = solve_with_fixed_coordinate(sys, x + w * (y - x), coord, value, opt.tolerance);
        if (hit && sys.in_chart(*hit) && (*hit - x).norm() <= (y - x).norm() * 1.5) {
          worst_residual = std::max(worst_residual, sys.scaled_residual(*hit));
          out.points.push_back(*hit);
          out.tangents.push_back(null_direction(sys, *hit, &t).first);
        }
      }
    }
    if (sigma < opt.rank_tol) {
      if (!in_singular_zone) {
        std::ostringstream os;
        os << "Jacobian rank drop (smallest scaled singular value " << sigma << ")";
        notices.push_back({ContinuationNotice::Kind::BranchPoint, y, os.str()});
      }
      in_singular_zone = true;
    } else {
      in_singular_zone = false;
    }
    worst_residual = std::max(worst_residual, sys.scaled_residual(y));
    const double seg = (y - x).norm();
    const bool came_back = arclength > 4.0 * opt.max_step && distance_to_segment(x, y, seed) < 0.1 * h + 1e-9;
    arclength += seg;
    out.points.push_back(y);
    out.tangents.push_back(t_new);
    x = y;
    t = t_new;
    if (came_back) {
      out.closed = true;
      notices.push_back({ContinuationNotice::Kind::ClosedLoop, x, "branch closes on itself"});
      break;
    }
    if (corr->iterations <= 3) h = std::min(1.5 * h, opt.max_step);
  }
  return out;
}

}  // namespace

std::pair<RealVector, double> null_direction(const ImplicitSystem& sys, const RealVector& x, const RealVector* orient) {
  const RealMatrix j = scaled_jacobian(sys, x);
  Eigen::JacobiSVD<RealMatrix> svd(j, Eigen::ComputeFullV);
  RealVector t = svd.matrixV().col(sys.unknowns() - 1);
  if (orient != nullptr && t.dot(*orient) < 0.0) t = -t;
  const auto& s = svd.singularValues();
  return {t, s.size() == 0 ? 1.0 : s(s.size() - 1)};
}

std::optional<RealVector> newton_min_norm(const ImplicitSystem& sys, RealVector x, double tol, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    if (!x.allFinite()) return std::nullopt;
    if (sys.scaled_residual(x) <= tol) {
      const RealMatrix j = scaled_jacobian(sys, x);
      const RealVector polished = x - j.completeOrthogonalDecomposition().solve(scaled_residual_vector(sys, x));
      if (polished.allFinite() && sys.scaled_residual(polished) <= sys.scaled_residual(x)) x = polished;
      return x;
    }
    const RealMatrix j = scaled_jacobian(sys, x);
    RealVector dx = j.completeOrthogonalDecomposition().solve(-scaled_residual_vector(sys, x));
    // Keep steps moderate so that the iteration stays in the basin of the nearest branch.
    const double n = dx.norm();
    if (n > 0.5) dx *= 0.5 / n;
    x += dx;
  }
  return std::nullopt;
}

std::optional<RealVector> solve_with_fixed_coordinate(const ImplicitSystem& sys, RealVector x, int coord,
                                                      double value, double tol) {
  const int m = sys.unknowns();
  x[coord] = value;
  for (int it = 0; it < 30; ++it) {
    RealMatrix a(m, m);
    RealVector g(m);
    a.topRows(m - 1) = scaled_jacobian(sys, x);
    a.row(m - 1) = RealVector::Unit(m, coord).transpose();
    g.head(m - 1) = scaled_residual_vector(sys, x);
    g(m - 1) = x[coord] - value;
    if (!a.allFinite() || !g.allFinite()) return std::nullopt;
    const RealVector dx = a.fullPivLu().solve(-g);
    if (!dx.allFinite()) return std::nullopt;
    x += dx;
    x[coord] = value;
    if (sys.scaled_residual(x) <= tol && dx.norm() <= 1e-10 * (1.0 + x.norm())) return x;
  }
  if (sys.scaled_residual(x) <= tol) return x;
  return std::nullopt;
}

TracedBranch trace_branch(const ImplicitSystem& sys, const RealVector& seed, const ContinuationOptions& opt) {
  TracedBranch branch;
  const auto [t0, sigma0] = null_direction(sys, seed);
  if (sigma0 < opt.rank_tol) {
    branch.notices.push_back({ContinuationNotice::Kind::BranchPoint, seed, "seed sits on a Jacobian rank drop"});
  }
  branch.max_scaled_residual = sys.scaled_residual(seed);
  DirectionalTrace forward =
      trace_one_way(sys, seed, t0, opt, branch.notices, branch.max_scaled_residual);
  DirectionalTrace backward;
  if (!forward.closed) {
    backward = trace_one_way(sys, seed, -t0, opt, branch.notices, branch.max_scaled_residual);
  }
  for (std::size_t k = backward.points.size(); k-- > 0;) {
    branch.points.push_back(backward.points[k]);
    branch.tangents.push_back(-backward.tangents[k]);
  }
  branch.points.push_back(seed);
  branch.tangents.push_back(t0);
  for (std::size_t k = 0; k < forward.points.size(); ++k) {
    branch.points.push_back(forward.points[k]);
    branch.tangents.push_back(forward.tangents[k]);
  }
  branch.closed = forward.closed;
  return branch;
}

double distance_to_polyline(const std::vector<RealVector>& polyline, const RealVector& x) {
  if (polyline.empty()) return std::numeric_limits<double>::infinity();
  if (polyline.size() == 1) return (polyline.front() - x).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
    best = std::min(best, distance_to_segment(polyline[k], polyline[k + 1], x));
  }
  return best;
}

}  // namespace cyslag
