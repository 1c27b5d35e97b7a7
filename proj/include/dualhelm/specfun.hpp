// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

// Special functions behind the fundamental solutions: Gamma, Bessel functions
// of the second kind Y_nu for nu in {0, 1/2, 1, ..., 9/2}, their first
// positive zeros, and the normalized profile
//
//   eta_nu(t) = -c_nu t^nu Y_nu(t),   c_nu = pi / (2^nu Gamma(nu)),
//
// which equals 1 at t = 0 and is strictly increasing on (0, y_{nu-1}).

#pragma once

namespace dualhelm::specfun {

// Bessel order restricted to non-negative multiples of 1/2, stored as twice
// the order so that comparisons and integer/half-integer dispatch are exact.
class Order {
 public:
  static constexpr int max_twice = 9;  // nu <= 9/2

  // Throws ErrorKind::unsupported_order outside [0, max_twice].
  static Order from_twice(int twice);
  // Throws ErrorKind::unsupported_order unless 2*nu is an integer in range.
  static Order from_value(double nu);

  int twice() const noexcept { return twice_; }
  double value() const noexcept { return 0.5 * twice_; }
  bool is_integer() const noexcept { return twice_ % 2 == 0; }

  // nu - 1 and nu + 1; throw unsupported_order when they leave the range.
  Order lowered() const;
  Order raised() const;

  friend bool operator==(Order, Order) = default;
  friend auto operator<=>(Order, Order) = default;

 private:
  explicit constexpr Order(int twice) : twice_(twice) {}
  int twice_;
};

/// Gamma(x) for x > 0.
double gamma_fn(double x);

/// Y_nu(t) for t > 0.
///
/// Half-integer orders use the closed trigonometric forms through the
/// spherical Bessel recurrence. Integer orders evaluate Y_0 and Y_1 by the
/// ascending series for t < series_switch and by the Hankel asymptotic
/// expansion beyond, then recur upward.
double bessel_y(Order nu, double t);

inline constexpr double series_switch = 12.0;

// Branch-forced evaluations of Y_0 / Y_1, exposed for the overlap checks.
double bessel_y_int_series(int n, double t);
double bessel_y_int_asymptotic(int n, double t);

/// First positive zero y_nu of Y_nu, to absolute accuracy 1e-12.
double first_zero(Order nu);

/// c_nu = pi / (2^nu Gamma(nu)), nu > 0.
double eta_constant(Order nu);

/// eta_nu(t) for nu >= 1 and t >= 0.
double eta(Order nu, double t);

/// eta_nu(t) - 1 without cancellation near t = 0 (ascending series for
/// t <= eta_series_limit, direct evaluation above).
double eta_minus_one(Order nu, double t);

inline constexpr double eta_series_limit = 2.0;

}  // namespace dualhelm::specfun
