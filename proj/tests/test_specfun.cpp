// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dualhelm/error.hpp"
#include "dualhelm/specfun.hpp"

using namespace dualhelm;
using namespace dualhelm::specfun;

namespace {
constexpr double pi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
Order half(int twice) { return Order::from_twice(twice); }
}  // namespace

TEST_CASE("gamma_fn at small arguments") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
  CHECK(gamma_fn(4.0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_fn(0.0), Error);
  CHECK_THROWS_AS(gamma_fn(-1.5), Error);
}

TEST_CASE("Order construction") {
  CHECK(Order::from_value(1.5).twice() == 3);
  CHECK(Order::from_value(4.5).twice() == 9);
  CHECK_THROWS_AS(Order::from_value(5.0), Error);
  CHECK_THROWS_AS(Order::from_value(0.3), Error);
  CHECK_THROWS_AS(Order::from_twice(-1), Error);
  CHECK(Order::from_value(1.0) < Order::from_value(1.5));
  CHECK(Order::from_value(1.0).lowered().twice() == 0);
  try {
    Order::from_value(0.75);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_order);
  }
}

TEST_CASE("bessel_y reference values") {
  // 30-digit reference values
  struct Row { int twice; double t; double y; };
  const Row rows[] = {
      {0, 1e-4, -5.937289069709337},      {2, 1e-4, -6366.198036455761},
      {3, 1e-4, -797884.5647922881},      {0, 50.0, -0.09806499547007708},
      {2, 50.0, -0.05679566856201477},    {3, 50.0, 0.02742813676191382},
      {0, 12.0, -0.2252373126343614},     {2, 12.0, -0.05709921826089652},
      {4, 3.7, 0.1191550753195418},       {7, 0.3, -816.6342276179466},
  };
  for (const auto& r : rows) {
    CAPTURE(r.twice);
    CAPTURE(r.t);
    CHECK(rel(bessel_y(half(r.twice), r.t), r.y) < 1e-10);
  }
  CHECK(std::abs(bessel_y(half(1), pi / 2)) < 1e-15);
}

TEST_CASE("bessel_y against std::cyl_neumann") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.05, 40.0);
  for (int twice = 0; twice <= Order::max_twice; ++twice) {
    for (int i = 0; i < 40; ++i) {
      const double t = dist(rng);
      const double ref = std::cyl_neumann(0.5 * twice, t);
      const double got = bessel_y(half(twice), t);
      CAPTURE(twice);
      CAPTURE(t);
      // absolute scale: the oscillatory envelope, or |ref| when it dominates
      const double scale = std::max(std::abs(ref), std::sqrt(2.0 / (pi * t)));
      CHECK(std::abs(got - ref) < 1e-10 * scale);
    }
  }
}

TEST_CASE("bessel_y small argument laws") {
  const double t = 1e-4;
  CHECK(rel(t * bessel_y(half(2), t), -2.0 / pi) < 1e-3);
  CHECK(rel(bessel_y(half(0), t) / std::log(2.0 / t), -2.0 / pi) < 1e-1);
  // the O(1) remainder in the log law is (2/pi) gamma; with it the law is sharp
  CHECK(rel(bessel_y(half(0), t), -(2.0 / pi) * (std::log(2.0 / t) - std::numbers::egamma)) <
        1e-8);
  const double lead = std::pow(2.0, 1.5) * gamma_fn(1.5) / (pi * std::pow(t, 1.5));
  CHECK(rel(bessel_y(half(3), t), -lead) < 1e-3);
}

TEST_CASE("bessel_y large argument law") {
  const double t = 50.0;
  CHECK(rel(bessel_y(half(0), t), -std::sqrt(2.0 / (pi * t)) * std::cos(t + pi / 4)) < 1e-2);
}

TEST_CASE("bessel_y rejects bad arguments") {
  CHECK_THROWS_AS(bessel_y(half(0), 0.0), Error);
  CHECK_THROWS_AS(bessel_y(half(2), -1.0), Error);
  CHECK_THROWS_AS(bessel_y_int_series(2, 1.0), Error);
}

TEST_CASE("series and asymptotic branches overlap") {
  for (double t = 10.0; t <= 16.0; t += 0.25) {
    for (int n = 0; n <= 1; ++n) {
      CAPTURE(t);
      CHECK(std::abs(bessel_y_int_series(n, t) - bessel_y_int_asymptotic(n, t)) < 1e-9);
    }
  }
}

TEST_CASE("recursion d/dt[t^nu Y_nu] = t^nu Y_{nu-1}") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.1, 20.0);
  for (int twice = 2; twice <= Order::max_twice; ++twice) {
    const Order nu = half(twice);
    auto f = [&](double t) { return std::pow(t, nu.value()) * bessel_y(nu, t); };
    for (int i = 0; i < 100; ++i) {
      const double t = dist(rng);
      const double h = 1e-4 * t;
      const double d1 = (f(t + h) - f(t - h)) / (2 * h);
      const double d2 = (f(t + 2 * h) - f(t - 2 * h)) / (4 * h);
      const double fd = (4 * d1 - d2) / 3;
      const double exact = std::pow(t, nu.value()) * bessel_y(nu.lowered(), t);
      const double envelope = std::pow(t, nu.value()) *
                              std::max(std::abs(exact) / std::pow(t, nu.value()),
                                       std::sqrt(2.0 / (pi * t)));
      CAPTURE(twice);
      CAPTURE(t);
      CHECK(std::abs(fd - exact) < 1e-6 * envelope);
    }
  }
}

TEST_CASE("first zeros") {
  const double ref[] = {0.8935769662791675, pi / 2,            2.197141326031017,
                        2.798386045783887,  3.384241767149593, 3.959527916501095,
                        4.527024661149644,  5.088498013940855, 5.645147894220896,
                        6.197831206943680};
  for (int twice = 0; twice <= Order::max_twice; ++twice) {
    CAPTURE(twice);
    CHECK(std::abs(first_zero(half(twice)) - ref[twice]) < 1e-10);
  }
  CHECK(first_zero(half(0)) < 1.0);
  for (int twice = 0; twice <= 3; ++twice)
    CHECK(first_zero(half(twice)) < first_zero(half(twice + 2)));
}

TEST_CASE("eta at zero and closed form for 3/2") {
  CHECK(eta(half(3), 0.0) == 1.0);
  CHECK_THROWS_AS(eta(half(1), 1.0), Error);
  CHECK_THROWS_AS(eta(half(0), 1.0), Error);
  CHECK(eta(half(3), pi / 2) == doctest::Approx(pi / 2).epsilon(1e-13));
  for (double t : {0.01, 0.3, 1.0, 1.9, 2.1, 3.0, 7.0}) {
    CAPTURE(t);
    CHECK(eta(half(3), t) == doctest::Approx(std::cos(t) + t * std::sin(t)).epsilon(1e-12));
  }
}

TEST_CASE("eta_minus_one matches direct evaluation away from zero") {
  for (int twice = 2; twice <= Order::max_twice; ++twice) {
    const Order nu = half(twice);
    for (double t : {0.5, 1.0, 1.5, 1.99}) {
      const double direct = -eta_constant(nu) * std::pow(t, nu.value()) * bessel_y(nu, t) - 1.0;
      CAPTURE(twice);
      CAPTURE(t);
      CHECK(std::abs(eta_minus_one(nu, t) - direct) < 1e-10 * (1.0 + std::abs(direct)));
    }
  }
}

TEST_CASE("eta limit (eta - 1)/t^2 -> 1/(4(nu-1))") {
  for (int twice = 3; twice <= Order::max_twice; ++twice) {
    const Order nu = half(twice);
    const double a = eta_minus_one(nu, 1e-3) / 1e-6;
    const double b = eta_minus_one(nu, 5e-4) / 2.5e-7;
    const double extrap = (4 * b - a) / 3;
    CAPTURE(twice);
    CHECK(rel(extrap, 1.0 / (4.0 * (nu.value() - 1.0))) < 1e-6);
  }
}

TEST_CASE("eta increasing before the first zero of the lower order") {
  for (int twice = 2; twice <= Order::max_twice; ++twice) {
    const Order nu = half(twice);
    const double end = first_zero(nu.lowered());
    double prev = eta(nu, 0.0);
    for (int i = 1; i < 400; ++i) {
      const double t = end * i / 400.0;
      const double cur = eta(nu, t);
      CAPTURE(twice);
      CAPTURE(t);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}
