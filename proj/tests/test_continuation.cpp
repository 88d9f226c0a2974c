#include <doctest.h>

#include <cmath>

#include "cyslag/continuation.hpp"

using namespace cyslag;

namespace {

class Circle : public ImplicitSystem {
 public:
  int unknowns() const override { return 2; }
  RealVector residual(const RealVector& x) const override {
    return RealVector::Constant(1, x.squaredNorm() - 1.0);
  }
  RealMatrix jacobian(const RealVector& x) const override { return 2.0 * x.transpose(); }
};

// x^2 - y^2 = 0: two lines crossing at the origin, restricted to a box.
class Cross : public ImplicitSystem {
 public:
  int unknowns() const override { return 2; }
  RealVector residual(const RealVector& x) const override { return RealVector::Constant(1, x[0] * x[0] - x[1] * x[1]); }
  RealMatrix jacobian(const RealVector& x) const override {
    RealMatrix j(1, 2);
    j << 2.0 * x[0], -2.0 * x[1];
    return j;
  }
  bool in_chart(const RealVector& x) const override { return x.cwiseAbs().maxCoeff() <= 1.0; }
};

// A helix in R^3: two equations, a one-dimensional solution set.
class Helix : public ImplicitSystem {
 public:
  int unknowns() const override { return 3; }
  RealVector residual(const RealVector& x) const override {
    RealVector r(2);
    r << x[0] - std::cos(x[2]), x[1] - std::sin(x[2]);
    return r;
  }
  RealMatrix jacobian(const RealVector& x) const override {
    RealMatrix j(2, 3);
    j << 1, 0, std::sin(x[2]), 0, 1, -std::cos(x[2]);
    return j;
  }
  bool in_chart(const RealVector& x) const override { return std::abs(x[2]) <= 4.0; }
};

RealVector v2(double a, double b) { return (RealVector(2) << a, b).finished(); }

}  // namespace

TEST_CASE("a circle is traced as a closed loop with exact residuals") {
  const Circle c;
  ContinuationOptions opt;
  const TracedBranch b = trace_branch(c, v2(1.0, 0.0), opt);
  CHECK(b.closed);
  CHECK(b.max_scaled_residual <= 1e-12);
  double length = 0.0;
  for (std::size_t k = 1; k < b.points.size(); ++k) length += (b.points[k] - b.points[k - 1]).norm();
  CHECK(length == doctest::Approx(2.0 * M_PI).epsilon(2e-3));
  for (std::size_t k = 0; k < b.points.size(); ++k) {
    CHECK(std::abs(b.tangents[k].dot(b.points[k])) <= 1e-10);
    CHECK(b.tangents[k].norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("leaving the chart is reported as truncation in both directions") {
  const Helix h;
  RealVector seed(3);
  seed << 1.0, 0.0, 0.0;
  const TracedBranch b = trace_branch(h, seed, {});
  int truncations = 0;
  for (const auto& n : b.notices) truncations += n.kind == ContinuationNotice::Kind::Truncation;
  CHECK(truncations == 2);
  CHECK(b.points.front()[2] < -3.9);
  CHECK(b.points.back()[2] > 3.9);
  CHECK(b.max_scaled_residual <= 1e-12);
}

TEST_CASE("a seed on a crossing reports a rank drop") {
  const Cross x;
  const TracedBranch b = trace_branch(x, v2(0.0, 0.0), {});
  bool branch_point = false;
  for (const auto& n : b.notices) branch_point = branch_point || n.kind == ContinuationNotice::Kind::BranchPoint;
  CHECK(branch_point);
  const auto [t, sigma] = null_direction(x, v2(0.0, 0.0));
  CHECK(sigma == 0.0);
}

TEST_CASE("tracing through a crossing keeps the direction and flags the rank drop") {
  const Cross x;
  const TracedBranch b = trace_branch(x, v2(0.5, 0.5), {});
  CHECK(b.points.front()[0] < -0.9);
  CHECK(b.points.back()[0] > 0.9);
  for (const auto& p : b.points) CHECK(std::abs(p[0] - p[1]) <= 1e-9);
}

TEST_CASE("anchors insert exact crossings") {
  const Circle c;
  ContinuationOptions opt;
  opt.anchors = {{0, 0.3}, {1, -0.7}};
  const TracedBranch b = trace_branch(c, v2(0.0, 1.0), opt);
  int hits_x = 0, hits_y = 0;
  for (const auto& p : b.points) {
    hits_x += p[0] == 0.3;
    hits_y += p[1] == -0.7;
  }
  CHECK(hits_x == 2);
  CHECK(hits_y == 2);
}

TEST_CASE("minimum-norm Newton lands on the solution set") {
  const Circle c;
  const auto x = newton_min_norm(c, v2(2.0, 1.5));
  REQUIRE(x.has_value());
  CHECK(x->norm() == doctest::Approx(1.0).epsilon(1e-14));
  const auto fixed = solve_with_fixed_coordinate(c, v2(0.5, 0.9), 0, 0.6);
  REQUIRE(fixed.has_value());
  CHECK((*fixed)[1] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK_FALSE(solve_with_fixed_coordinate(c, v2(0.5, 0.9), 0, 1.5).has_value());
}

TEST_CASE("distance to a polyline") {
  const std::vector<RealVector> line{v2(0, 0), v2(1, 0), v2(1, 1)};
  CHECK(distance_to_polyline(line, v2(0.5, 0.2)) == doctest::Approx(0.2));
  CHECK(distance_to_polyline(line, v2(2.0, 0.5)) == doctest::Approx(1.0));
  CHECK(std::isinf(distance_to_polyline({}, v2(0, 0))));
}

TEST_CASE("labels") {
  CHECK(notice_label(ContinuationNotice::Kind::BranchPoint) == "branch_point");
  CHECK(notice_label(ContinuationNotice::Kind::Truncation) == "truncated");
}
