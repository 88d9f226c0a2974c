#pragma once

// Radial Kahler potential u(r^2) of the Ricci-flat metric on the quadric.
//
// With tau = arccosh(r^2) and w = du/dtau the potential satisfies
//   d/dtau (w^n) = c * n * sinh(tau)^(n-1),   w(0) = 0,
// so w^n = c n Int_0^tau sinh^(n-1). The profile tabulates w on a uniform tau grid and
// exposes the r^2-derivatives u' = w / sinh(tau) and u'' used by the Kahler form.

#include <string>
#include <vector>

#include "json.hpp"

namespace cyslag {

/// First and second derivative of a radial potential with respect to r^2.
struct PotentialDerivatives {
  double first;
  double second;
};

/// tau = arccosh(r2). Values within 1e-12 below 1 are clamped to tau = 0; anything smaller throws DomainError.
double tau_from_r2(double r2);

class PotentialProfile {
 public:
  static constexpr double kDefaultTauMax = 20.0;
  static constexpr double kMaxStep = 1e-3;

  /// Tabulates w on [0, tau_max]. n >= 2, c > 0, tau_max > 0; otherwise ArgumentError.
  static PotentialProfile build(int n, double c, double tau_max = kDefaultTauMax);

  int n() const noexcept { return n_; }
  double c() const noexcept { return c_; }
  double tau_max() const noexcept { return tau_.back(); }
  const std::vector<double>& tau_grid() const noexcept { return tau_; }
  const std::vector<double>& w_grid() const noexcept { return w_; }

  /// w(tau)^n = c n Int_0^tau sinh^(n-1).
  double w_power(double tau) const;
  double w(double tau) const;
  /// dw/dtau = c sinh^(n-1) / w^(n-1), with its limit c^(1/n) at tau = 0.
  double dw(double tau) const;
  /// u(tau) - u(0) = Int_0^tau w.
  double u_tau(double tau) const;

  double u_prime_r2(double r2) const;
  double u_second_r2(double r2) const;
  PotentialDerivatives derivatives_r2(double r2) const;
  /// u(r2) - u(1).
  double potential_r2(double r2) const;

  /// Max over grid midpoints of |d/dtau(w^n) - c n sinh^(n-1)| / max(1, c n sinh^(n-1)),
  /// with the derivative taken by a five-point stencil of w^n.
  double max_ode_residual() const;

  /// Largest relative gap between the closed form (n = 2, 3) and adaptive quadrature on the grid.
  /// Zero for other n. Checked at build time.
  double closed_form_gap() const noexcept { return closed_form_gap_; }

  nlohmann::json to_json() const;
  /// Rebuilds from {n, c, tau, w} and rejects tables that disagree with a fresh build.
  static PotentialProfile from_json(const nlohmann::json& j);

 private:
  PotentialProfile() = default;

  void check_tau(double tau) const;
  double w_power_quadrature(double tau) const;
  std::size_t cell(double tau) const;

  int n_ = 3;
  double c_ = 1.0;
  double step_ = kMaxStep;
  double c_root_ = 1.0;  // c^(1/n)
  std::vector<double> tau_;
  std::vector<double> w_;
  std::vector<double> f_;  // w^n from quadrature at nodes
  std::vector<double> u_;  // u - u(0) at nodes
  double closed_form_gap_ = 0.0;
};

/// Closed forms of w^n: n = 2 gives 4c sinh^2(tau/2); n = 3 gives (3c/2)(sinh(2 tau)/2 - tau).
double w_power_closed_form(int n, double c, double tau);

}  // namespace cyslag
