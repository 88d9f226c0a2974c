#include "cyslag/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cyslag/errors.hpp"

namespace cyslag {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

// Taylor coefficients of u'(r^2) / c^(1/n) = 1 + a2 tau^2 + a4 tau^4, obtained by expanding
// w^n = c tau^n (1 + alpha tau^2 + beta tau^4 + ...) and dividing w by sinh(tau).
struct SeriesCoefficients {
  double a2;
  double a4;
};

SeriesCoefficients series_coefficients(int n) {
  const double nd = n;
  const double m = nd - 1.0;
  const double alpha = nd * m / (6.0 * (nd + 2.0));
  const double b4 = m / 120.0 + m * (m - 1.0) / 72.0;
  const double beta = nd * b4 / (nd + 4.0);
  const double p = alpha / nd;
  const double q = beta / nd + (1.0 - nd) / (2.0 * nd * nd) * alpha * alpha;
  // w / (c^(1/n) tau) = 1 + p tau^2 + q tau^4; tau / sinh(tau) = 1 - tau^2/6 + 7 tau^4/360.
  return {p - 1.0 / 6.0, q - p / 6.0 + 7.0 / 360.0};
}

double sinh_power(double s, int k) { return k == 1 ? s : std::pow(s, k); }

}  // namespace

double tau_from_r2(double r2) {
  if (!(r2 >= 1.0 - 1e-12)) {
    std::ostringstream os;
    os << "r^2 = " << r2 << " is below 1, outside the quadric";
    throw DomainError(os.str());
  }
  return r2 <= 1.0 ? 0.0 : std::acosh(r2);
}

double w_power_closed_form(int n, double c, double tau) {
  if (n == 2) {
    const double s = std::sinh(0.5 * tau);
    return 4.0 * c * s * s;
  }
  if (n == 3) {
    double bracket;  // sinh(2 tau)/2 - tau
    if (tau < 0.1) {
      const double x = 2.0 * tau;
      const double x2 = x * x;
      double term = x * x2 / 6.0;  // x^3 / 3!
      bracket = 0.0;
      for (int k = 1; k < 20 && term > 1e-18 * bracket; ++k) {
        bracket += 0.5 * term;
        term *= x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      }
    } else {
      bracket = 0.5 * std::sinh(2.0 * tau) - tau;
    }
    return 1.5 * c * bracket;
  }
  throw ArgumentError("closed form of w^n exists only for n = 2, 3");
}

PotentialProfile PotentialProfile::build(int n, double c, double tau_max) {
  if (n < 2) throw ArgumentError("potential profile needs n >= 2");
  if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("potential constant c must be positive");
  if (!(tau_max > 0.0) || !std::isfinite(tau_max)) throw ArgumentError("tau_max must be positive");

  PotentialProfile p;
  p.n_ = n;
  p.c_ = c;
  p.c_root_ = std::pow(c, 1.0 / n);
  const auto cells = static_cast<std::size_t>(std::ceil(tau_max / kMaxStep));
  p.step_ = tau_max / static_cast<double>(cells);
  p.tau_.resize(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) p.tau_[k] = p.step_ * static_cast<double>(k);
  p.tau_.back() = tau_max;

  const double cn = c * n;
  auto integrand = [n, cn](double s) { return cn * sinh_power(std::sinh(s), n - 1); };
  p.f_.assign(cells + 1, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    p.f_[k + 1] = p.f_[k] + gauss_kronrod<double, 15>::integrate(integrand, p.tau_[k], p.tau_[k + 1], 5, 1e-15);
  }

  if (n == 2 || n == 3) {
    double gap = 0.0;
    for (std::size_t k = 1; k <= cells; ++k) {
      const double exact = w_power_closed_form(n, c, p.tau_[k]);
      gap = std::max(gap, std::abs(exact - p.f_[k]) / exact);
    }
    p.closed_form_gap_ = gap;
    if (gap > 1e-9) {
      std::ostringstream os;
      os << "closed form and quadrature of w^n disagree by " << gap;
      throw std::runtime_error(os.str());
    }
  }

  p.w_.resize(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) p.w_[k] = p.w(p.tau_[k]);

  p.u_.assign(cells + 1, 0.0);
  auto wf = [&p](double s) { return p.w(s); };
  for (std::size_t k = 0; k < cells; ++k) {
    p.u_[k + 1] = p.u_[k] + gauss<double, 10>::integrate(wf, p.tau_[k], p.tau_[k + 1]);
  }
  return p;
}

void PotentialProfile::check_tau(double tau) const {
  if (!(tau >= 0.0) || tau > tau_.back() * (1.0 + 1e-14)) {
    std::ostringstream os;
    os << "tau = " << tau << " outside the tabulated range [0, " << tau_.back() << "]";
    throw DomainError(os.str());
  }
}

std::size_t PotentialProfile::cell(double tau) const {
  const auto k = static_cast<std::size_t>(std::floor(tau / step_));
  return std::min(k, tau_.size() - 2);
}

double PotentialProfile::w_power_quadrature(double tau) const {
  const std::size_t k = cell(tau);
  const double cn = c_ * n_;
  const int e = n_ - 1;
  auto integrand = [cn, e](double s) { return cn * sinh_power(std::sinh(s), e); };
  if (tau == tau_[k]) return f_[k];
  return f_[k] + gauss<double, 10>::integrate(integrand, tau_[k], tau);
}

double PotentialProfile::w_power(double tau) const {
  check_tau(tau);
  if (n_ == 2 || n_ == 3) return w_power_closed_form(n_, c_, tau);
  return w_power_quadrature(tau);
}

double PotentialProfile::w(double tau) const {
  check_tau(tau);
  if (n_ == 2) return 2.0 * std::sqrt(c_) * std::sinh(0.5 * tau);
  return std::pow(w_power(tau), 1.0 / n_);
}

double PotentialProfile::dw(double tau) const {
  check_tau(tau);
  if (tau < 1e-12) return c_root_;
  if (n_ == 2) return std::sqrt(c_) * std::cosh(0.5 * tau);
  const double s = std::sinh(tau);
  return c_ * std::pow(s / w(tau), n_ - 1);
}

double PotentialProfile::u_tau(double tau) const {
  check_tau(tau);
  const std::size_t k = cell(tau);
  if (tau == tau_[k]) return u_[k];
  auto wf = [this](double s) { return w(s); };
  return u_[k] + gauss<double, 10>::integrate(wf, tau_[k], tau);
}

double PotentialProfile::u_prime_r2(double r2) const {
  const double tau = tau_from_r2(r2);
  check_tau(tau);
  if (tau < 1e-4) {
    const auto [a2, a4] = series_coefficients(n_);
    const double t2 = tau * tau;
    return c_root_ * (1.0 + a2 * t2 + a4 * t2 * t2);
  }
  return w(tau) / std::sinh(tau);
}

double PotentialProfile::u_second_r2(double r2) const {
  const double tau = tau_from_r2(r2);
  check_tau(tau);
  if (tau < 2e-3) {
    const auto [a2, a4] = series_coefficients(n_);
    return c_root_ * (2.0 * a2 + (4.0 * a4 - a2 / 3.0) * tau * tau);
  }
  const double s = std::sinh(tau);
  return (dw(tau) * s - w(tau) * std::cosh(tau)) / (s * s * s);
}

PotentialDerivatives PotentialProfile::derivatives_r2(double r2) const {
  return {u_prime_r2(r2), u_second_r2(r2)};
}

double PotentialProfile::potential_r2(double r2) const { return u_tau(tau_from_r2(r2)); }

double PotentialProfile::max_ode_residual() const {
  const double d = step_ / 4.0;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < tau_.size(); ++k) {
    const double m = tau_[k] + 2.0 * d;
    auto f = [this](double t) { return std::pow(w(t), n_); };
    const double deriv = (f(m - 2 * d) - 8.0 * f(m - d) + 8.0 * f(m + d) - f(m + 2 * d)) / (12.0 * d);
    const double rhs = c_ * n_ * sinh_power(std::sinh(m), n_ - 1);
    worst = std::max(worst, std::abs(deriv - rhs) / std::max(1.0, rhs));
  }
  return worst;
}

nlohmann::json PotentialProfile::to_json() const {
  return nlohmann::json{{"n", n_}, {"c", c_}, {"tau", tau_}, {"w", w_}};
}

PotentialProfile PotentialProfile::from_json(const nlohmann::json& j) {
  std::vector<double> tau;
  std::vector<double> w;
  int n = 0;
  double c = 0.0;
  try {
    n = j.at("n").get<int>();
    c = j.at("c").get<double>();
    tau = j.at("tau").get<std::vector<double>>();
    w = j.at("w").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed profile JSON: ") + e.what());
  }
  if (tau.size() < 2 || tau.size() != w.size()) throw ArgumentError("profile JSON: tau and w tables mismatch");
  PotentialProfile p = build(n, c, tau.back());
  if (p.tau_.size() != tau.size()) throw ArgumentError("profile JSON: grid differs from a fresh build");
  for (std::size_t k = 0; k < tau.size(); ++k) {
    const double scale = std::max(1e-300, std::abs(p.w_[k]));
    if (std::abs(tau[k] - p.tau_[k]) > 1e-12 * std::max(1.0, tau[k]) || std::abs(w[k] - p.w_[k]) > 1e-10 * scale) {
      std::ostringstream os;
      os << "profile JSON: w(" << tau[k] << ") = " << w[k] << " does not solve the potential ODE";
      throw ArgumentError(os.str());
    }
  }
  return p;
}

}  // namespace cyslag
