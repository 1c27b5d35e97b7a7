// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include "dualhelm/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "dualhelm/error.hpp"

namespace dualhelm::specfun {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double euler_gamma = std::numbers::egamma;

// psi(k+1) = -gamma + H_k
double digamma_int(int k_plus_one) {
  double h = 0.0;
  for (int j = 1; j < k_plus_one; ++j) h += 1.0 / j;
  return -euler_gamma + h;
}

// Y_{n+1/2}(t) = sqrt(2t/pi) y_n(t) with the spherical Bessel recurrence,
// which is stable upward for the second kind.
double bessel_y_half(int n, double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  double y_prev = -c / t;
  if (n == 0) return std::sqrt(2.0 * t / pi) * y_prev;
  double y_cur = -c / (t * t) - s / t;
  for (int k = 1; k < n; ++k) {
    const double y_next = (2.0 * k + 1.0) / t * y_cur - y_prev;
    y_prev = y_cur;
    y_cur = y_next;
  }
  return std::sqrt(2.0 * t / pi) * y_cur;
}

double series_y0(double t) {
  const double z = 0.25 * t * t;
  double term = 1.0;  // z^k / (k!)^2
  double j0 = 1.0;
  double tail = 0.0;
  double harmonic = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= -z / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    j0 += term;
    const double contrib = -term * harmonic;  // (-1)^{k+1} H_k z^k/(k!)^2
    tail += contrib;
    if (std::abs(term) * (1.0 + harmonic) < 1e-17 * (std::abs(j0) + std::abs(tail)) && k > z)
      break;
  }
  return (2.0 / pi) * ((std::log(0.5 * t) + euler_gamma) * j0 + tail);
}

double series_y1(double t) {
  const double half = 0.5 * t;
  const double z = half * half;
  double term = half;  // (t/2)^{2k+1} / (k! (k+1)!)
  double j1 = term;
  double psi_sum = (digamma_int(1) + digamma_int(2)) * term;
  for (int k = 1; k < 200; ++k) {
    term *= -z / (static_cast<double>(k) * (k + 1));
    j1 += term;
    const double weight = digamma_int(k + 1) + digamma_int(k + 2);
    psi_sum += weight * term;
    if (std::abs(term) * (1.0 + std::abs(weight)) < 1e-17 * (std::abs(j1) + std::abs(psi_sum)) &&
        k > z)
      break;
  }
  return (2.0 / pi) * std::log(half) * j1 - 2.0 / (pi * t) - psi_sum / pi;
}

// Hankel expansion, DLMF 10.17.4, truncated at the smallest term.
double asymptotic_y(double nu, double t) {
  const double mu = 4.0 * nu * nu;
  const double omega = t - 0.5 * nu * pi - 0.25 * pi;
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;  // a_k(nu) / t^k
  double last = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = a * (mu - odd * odd) / (k * 8.0 * t);
    if (std::abs(next) > std::abs(last) && k > 2) break;
    a = next;
    last = next;
    // signs: P = a0 - a2 + a4 ..., Q = a1 - a3 + ...
    const int m = k % 4;
    if (m == 1) q += a;
    else if (m == 2) p -= a;
    else if (m == 3) q -= a;
    else p += a;
    if (std::abs(a) < 1e-17) break;
  }
  return std::sqrt(2.0 / (pi * t)) * (p * std::sin(omega) + q * std::cos(omega));
}

void check_positive_argument(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    fail(ErrorKind::domain, "Bessel argument must be positive and finite, got " + std::to_string(t));
}

// eta_nu(t) - 1 for half-integer nu from
//   eta_nu(t) = sum_k (t^2/4)^k / (k! prod_{j=1..k} (nu - j)),
// obtained from Y_nu = -J_{-nu} / sin(nu pi) and the reflection formula.
double eta_minus_one_half_series(double nu, double t) {
  const double z = 0.25 * t * t;
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= z / (k * (nu - k));
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
  }
  return sum;
}

// Integer order n >= 1: eta_n(t) = (1/(n-1)!) [ sum_{k<n} (n-k-1)!/k! z^k
//   - 2 ln(t/2) sum_k (-1)^k z^{n+k}/(k!(n+k)!)
//   + sum_k (psi(k+1)+psi(n+k+1)) (-1)^k z^{n+k}/(k!(n+k)!) ],  z = t^2/4.
double eta_minus_one_int_series(int n, double t) {
  const double z = 0.25 * t * t;
  double fact_n_minus_1 = 1.0;
  for (int j = 2; j < n; ++j) fact_n_minus_1 *= j;

  double finite = 0.0;
  {
    // (n-k-1)!/k! for k = 1..n-1
    for (int k = 1; k < n; ++k) {
      double ratio = 1.0;
      for (int j = 2; j <= n - k - 1; ++j) ratio *= j;
      for (int j = 2; j <= k; ++j) ratio /= j;
      finite += ratio * std::pow(z, k);
    }
  }

  double fact_n = fact_n_minus_1 * n;
  double term = std::pow(z, n) / fact_n;  // z^{n+k}/(k!(n+k)!) at k = 0
  double log_sum = term;
  double psi_sum = (digamma_int(1) + digamma_int(n + 1)) * term;
  for (int k = 1; k < 200; ++k) {
    term *= -z / (static_cast<double>(k) * (n + k));
    log_sum += term;
    const double weight = digamma_int(k + 1) + digamma_int(n + k + 1);
    psi_sum += weight * term;
    if (std::abs(term) * (1.0 + std::abs(weight)) <
        1e-17 * (std::abs(log_sum) + std::abs(psi_sum)))
      break;
  }
  return (finite + (-2.0 * std::log(0.5 * t) * log_sum + psi_sum)) / fact_n_minus_1;
}

std::array<double, Order::max_twice + 1> compute_first_zeros() {
  std::array<double, Order::max_twice + 1> zeros{};
  for (int twice = 0; twice <= Order::max_twice; ++twice) {
    const Order nu = Order::from_twice(twice);
    if (twice == 1) {
      zeros[twice] = 0.5 * pi;
      continue;
    }
    // Y_nu < 0 on (0, y_nu); bracket with a coarse forward scan.
    double lo = 0.05;
    double step = 0.05;
    double hi = lo + step;
    while (bessel_y(nu, hi) < 0.0) {
      lo = hi;
      hi += step;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (bessel_y(nu, mid) < 0.0) lo = mid;
      else hi = mid;
    }
    zeros[twice] = 0.5 * (lo + hi);
  }
  return zeros;
}

}  // namespace

Order Order::from_twice(int twice) {
  if (twice < 0 || twice > max_twice)
    fail(ErrorKind::unsupported_order,
         "order " + std::to_string(0.5 * twice) + " outside the supported range [0, 9/2]");
  return Order(twice);
}

Order Order::from_value(double nu) {
  const double twice = 2.0 * nu;
  const double rounded = std::round(twice);
  if (!std::isfinite(nu) || std::abs(twice - rounded) > 1e-12)
    fail(ErrorKind::unsupported_order, "order " + std::to_string(nu) + " is not a multiple of 1/2");
  return from_twice(static_cast<int>(rounded));
}

Order Order::lowered() const { return from_twice(twice_ - 2); }
Order Order::raised() const { return from_twice(twice_ + 2); }

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    fail(ErrorKind::domain, "gamma_fn requires x > 0, got " + std::to_string(x));
  return std::tgamma(x);
}

double bessel_y_int_series(int n, double t) {
  check_positive_argument(t);
  if (n == 0) return series_y0(t);
  if (n == 1) return series_y1(t);
  fail(ErrorKind::unsupported_order, "branch-forced evaluation only for n = 0, 1");
}

double bessel_y_int_asymptotic(int n, double t) {
  check_positive_argument(t);
  if (n != 0 && n != 1)
    fail(ErrorKind::unsupported_order, "branch-forced evaluation only for n = 0, 1");
  return asymptotic_y(n, t);
}

double bessel_y(Order nu, double t) {
  check_positive_argument(t);
  if (!nu.is_integer()) return bessel_y_half(nu.twice() / 2, t);

  const int n = nu.twice() / 2;
  const bool small = t < series_switch;
  double y0 = small ? series_y0(t) : asymptotic_y(0.0, t);
  if (n == 0) return y0;
  double y1 = small ? series_y1(t) : asymptotic_y(1.0, t);
  for (int k = 1; k < n; ++k) {
    const double y2 = 2.0 * k / t * y1 - y0;
    y0 = y1;
    y1 = y2;
  }
  return y1;
}

double first_zero(Order nu) {
  static const std::array<double, Order::max_twice + 1> zeros = compute_first_zeros();
  return zeros[nu.twice()];
}

double eta_constant(Order nu) {
  if (nu.twice() == 0) fail(ErrorKind::domain, "c_nu is undefined for nu = 0");
  return pi / (std::pow(2.0, nu.value()) * gamma_fn(nu.value()));
}

double eta_minus_one(Order nu, double t) {
  if (nu.twice() < 2) fail(ErrorKind::domain, "eta_nu requires nu >= 1");
  if (!(t >= 0.0) || !std::isfinite(t))
    fail(ErrorKind::domain, "eta_nu requires t >= 0, got " + std::to_string(t));
  if (t == 0.0) return 0.0;
  if (t <= eta_series_limit) {
    return nu.is_integer() ? eta_minus_one_int_series(nu.twice() / 2, t)
                           : eta_minus_one_half_series(nu.value(), t);
  }
  return -eta_constant(nu) * std::pow(t, nu.value()) * bessel_y(nu, t) - 1.0;
}

double eta(Order nu, double t) {
  if (nu.twice() < 2) fail(ErrorKind::domain, "eta_nu requires nu >= 1");
  if (!(t >= 0.0) || !std::isfinite(t))
    fail(ErrorKind::domain, "eta_nu requires t >= 0, got " + std::to_string(t));
  if (t == 0.0) return 1.0;
  if (t <= eta_series_limit) return 1.0 + eta_minus_one(nu, t);
  return -eta_constant(nu) * std::pow(t, nu.value()) * bessel_y(nu, t);
}

}  // namespace dualhelm::specfun
