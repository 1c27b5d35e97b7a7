// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <algorithm>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dualhelm/error.hpp"
#include "dualhelm/radialops.hpp"

using namespace dualhelm;

namespace {
constexpr double pi = std::numbers::pi;
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double sobolev_closed_form(int N) {
  return pi * N * (N - 2) *
         std::pow(std::tgamma(0.5 * N) / std::tgamma(static_cast<double>(N)), 2.0 / N);
}

// v_1 = (N(N-2))^{(N+2)/4} (1 + r^2)^{-(N+2)/2}
double v1(int N, double r) {
  return std::pow(N * (N - 2.0), 0.25 * (N + 2)) * std::pow(1 + r * r, -0.5 * (N + 2));
}

PanelSpec laplace_spec() {
  PanelSpec s;
  s.max_panel_length = std::numeric_limits<double>::infinity();
  return s;
}
}  // namespace

TEST_CASE("single panel Gauss exactness") {
  PanelSpec s;
  s.nodes_per_panel = 8;
  s.edges = {0.0, 1.0};
  const auto g = make_grid(DimensionContext(3), 1.0, s);
  CHECK(g->size() == 8);
  double acc = 0.0;
  for (int i = 0; i < g->size(); ++i) acc += g->weights()[i] * std::pow(g->nodes()[i], 3);
  CHECK(acc == doctest::Approx(0.25).epsilon(1e-15));
  double top = 0.0;
  for (int i = 0; i < g->size(); ++i) top += g->weights()[i] * std::pow(g->nodes()[i], 15);
  CHECK(top == doctest::Approx(1.0 / 16).epsilon(1e-14));
}

TEST_CASE("grid invariants") {
  const auto g = make_grid(DimensionContext(4), 20.0);
  for (int i = 1; i < g->size(); ++i) CHECK(g->nodes()[i] > g->nodes()[i - 1]);
  for (double w : g->weights()) CHECK(w > 0);
  CHECK(g->resolves_oscillation());
  CHECK(g->r_max() == 20.0);
  CHECK_FALSE(make_grid(DimensionContext(4), 1e3, laplace_spec())->resolves_oscillation());

  PanelSpec bad;
  bad.nodes_per_panel = 0;
  CHECK_THROWS_AS(make_grid(DimensionContext(3), 1.0, bad), Error);
  CHECK_THROWS_AS(make_grid(DimensionContext(3), 0.0), Error);
  PanelSpec e;
  e.edges = {0.0};
  try {
    make_grid(DimensionContext(3), 1.0, e);
    FAIL("expected throw");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::config);
  }
  PanelSpec bp;
  bp.breakpoints = {0.3, 0.77};
  const auto gb = make_grid(DimensionContext(3), 2.0, bp);
  CHECK(std::count(gb->edges().begin(), gb->edges().end(), 0.3) == 1);
  CHECK(std::count(gb->edges().begin(), gb->edges().end(), 0.77) == 1);
}

TEST_CASE("unit ball volume and lp norms") {
  PanelSpec s;
  s.edges = {0.0, 0.5, 1.0};
  const DimensionContext c3(3);
  const auto g = make_grid(c3, 1.0, s);
  const auto one = RadialFunction::sample(g, [](double) { return 1.0; });
  CHECK(integral(one) == doctest::Approx(4 * pi / 3).epsilon(1e-14));
  CHECK(lp_norm(one, 2.0) == doctest::Approx(std::sqrt(4 * pi / 3)).epsilon(1e-14));
  CHECK_THROWS_AS(lp_norm(one, 0.5), Error);
}

TEST_CASE("log-refined grid integrates r^{-1/2}") {
  PanelSpec s;
  s.inner_radius = 1e-20;
  const auto g = make_grid(DimensionContext(3), 1.0, s);
  double acc = 0.0;
  for (int i = 0; i < g->size(); ++i) acc += g->weights()[i] / std::sqrt(g->nodes()[i]);
  CHECK(std::abs(acc - 2.0) < 1e-8);
}

TEST_CASE("u_1 norm in four dimensions") {
  const DimensionContext c4(4);
  const auto g = make_grid(c4, 1e4, laplace_spec());
  const auto u = RadialFunction::sample(g, [](double r) { return std::sqrt(8.0) / (1 + r * r); });
  CHECK(rel(std::pow(lp_norm(u, 4.0), 4), 32 * pi * pi / 3) < 1e-9);
}

TEST_CASE("interpolation reproduces panel polynomials") {
  const auto g = make_grid(DimensionContext(5), 3.0);
  const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
  for (double r : {0.0, 0.01234, 0.5, 1.1, 2.999}) CHECK(std::abs(f(r) - std::exp(-r * r)) < 1e-12);
  CHECK(f(3.5) == 0.0);
}

TEST_CASE("newton potential of the unit ball indicator") {
  const DimensionContext c3(3);
  PanelSpec s;
  s.breakpoints = {1.0};
  const auto g = make_grid(c3, 3.0, s);
  const auto f = RadialFunction::sample(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
  const auto res = newton_potential(f);
  CHECK_FALSE(res.convergence_warning);
  CHECK(std::abs(res.value.values[0] - 0.5) < 1e-6);
  for (int i = 0; i < g->size(); ++i) {
    const double r = g->nodes()[i];
    const double exact = r <= 1 ? (3 - r * r) / 6 : 1 / (3 * r);
    CHECK(std::abs(res.value.values[i] - exact) < 1e-12);
  }
  CHECK(newton_potential_at(f, 2.0) == doctest::Approx(1.0 / 6).epsilon(1e-13));
  CHECK(newton_potential_at(f, 5.0) == doctest::Approx(1.0 / 15).epsilon(1e-13));

  const auto slow = RadialFunction::sample(g, [](double r) { return 1 / (1 + r); });
  CHECK(newton_potential(slow).convergence_warning);
}

TEST_CASE("newton potential is linear") {
  const auto g = make_grid(DimensionContext(4), 10.0);
  const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
  const auto h = RadialFunction::sample(g, [](double r) { return std::exp(-2 * r) * std::cos(r); });
  auto comb = f;
  for (int i = 0; i < g->size(); ++i) comb.values[i] = 2.5 * f.values[i] - 0.75 * h.values[i];
  const auto a = newton_potential(f).value, b = newton_potential(h).value,
             c = newton_potential(comb).value;
  for (int i = 0; i < g->size(); ++i)
    CHECK(std::abs(c.values[i] - (2.5 * a.values[i] - 0.75 * b.values[i])) <
          1e-12 * (1 + std::abs(c.values[i])));
}

TEST_CASE("angular average basics") {
  const DimensionContext c3(3);
  CHECK(angular_average(Kernel(KernelKind::unit, c3), 1.0, 2.0) ==
        doctest::Approx(4 * pi).epsilon(1e-13));
  const Kernel lam(KernelKind::lambda, c3);
  CHECK(angular_average(lam, 2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(angular_average(lam, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(angular_average(lam, 0.0, 1.0), Error);
  for (int N = 3; N <= 8; ++N) {
    const DimensionContext ctx(N);
    CAPTURE(N);
    CHECK(angular_average(Kernel(KernelKind::unit, ctx), 0.7, 1.3) ==
          doctest::Approx(ctx.surface()).epsilon(1e-12));
  }
}

TEST_CASE("angular quadrature against the exact shell averages") {
  const double pairs[][2] = {{2.0, 1.0}, {1.0, 1.0}, {1.0, 1.0 + 1e-7}, {0.3, 5.0},
                             {12.0, 11.5}, {1e-3, 2e-3}};
  for (int N = 3; N <= 8; ++N) {
    const DimensionContext ctx(N);
    for (auto kind : {KernelKind::lambda, KernelKind::psi, KernelKind::psi_minus_lambda}) {
      const Kernel K(kind, ctx);
      for (const auto& p : pairs) {
        CAPTURE(N);
        CAPTURE(to_string(kind));
        CAPTURE(p[0]);
        CAPTURE(p[1]);
        const double exact = shell_average(K, p[0], p[1]);
        const double quad = angular_average(K, p[0], p[1]);
        const double scale = ctx.surface() * lambda_fn(ctx, std::max(p[0], p[1]));
        CHECK(std::abs(quad - exact) < 1e-9 * scale);
        CHECK(std::abs(angular_average(K, p[1], p[0]) - quad) < 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("three dimensional psi average") {
  const DimensionContext c3(3);
  const Kernel K(KernelKind::psi, c3);
  for (double r : {0.5, 2.0, 7.0})
    for (double s : {0.25, 3.0}) {
      const double exact = (std::sin(r + s) - std::sin(std::abs(r - s))) / (2 * r * s);
      CHECK(std::abs(shell_average(K, r, s) - exact) < 1e-14);
      CHECK(std::abs(angular_average(K, r, s) - exact) < 1e-11);
    }
}

TEST_CASE("normalized Bessel j") {
  for (int twice = 1; twice <= 7; ++twice) {
    const auto nu = specfun::Order::from_twice(twice);
    for (double t : {0.01, 0.5, 1.9, 2.1, 6.0}) {
      const double ref = std::tgamma(nu.value() + 1) * std::pow(2 / t, nu.value()) *
                         std::cyl_bessel_j(nu.value(), t);
      CHECK(std::abs(bessel_j_normalized_minus_one(nu, t) + 1 - ref) < 1e-13);
    }
  }
}

TEST_CASE("quadform of the unit ball indicator") {
  const DimensionContext c3(3);
  PanelSpec s;
  s.breakpoints = {1.0};
  const auto g = make_grid(c3, 2.0, s);
  const auto f = RadialFunction::sample(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
  const Kernel lam(KernelKind::lambda, c3);
  CHECK(rel(quadform(f, f, lam), 8 * pi / 15) < 1e-12);
}

TEST_CASE("quadform symmetry and the quadrature path") {
  const DimensionContext c4(4);
  PanelSpec s;
  s.nodes_per_panel = 8;
  const auto g = make_grid(c4, 4.0, s);
  const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
  const auto h = RadialFunction::sample(g, [](double r) { return (1 - r / 4) * (1 + r); });
  for (auto kind : {KernelKind::psi, KernelKind::lambda, KernelKind::psi_minus_lambda}) {
    const Kernel K(kind, c4);
    const double fg = quadform(f, h, K), gf = quadform(h, f, K);
    CAPTURE(to_string(kind));
    CHECK(std::abs(fg - gf) < 1e-8 * std::abs(fg));
    const double quad = quadform(f, h, K, AverageMethod::quadrature);
    CHECK(std::abs(quad - fg) < 1e-9 * std::abs(fg));
  }
  // the symmetrized operator is exactly symmetric
  const ConvolutionOperator op(g, Kernel(KernelKind::psi, c4), true);
  CHECK(op.form(f, h) == doctest::Approx(op.form(h, f)).epsilon(1e-14));

  const auto other = make_grid(c4, 3.0, s);
  const auto z = RadialFunction::zeros(other);
  try {
    quadform(f, z, Kernel(KernelKind::psi, c4));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape);
  }
}

TEST_CASE("Lambda form equals the Newton potential pairing") {
  for (int N = 3; N <= 6; ++N) {
    const DimensionContext ctx(N);
    const auto g = make_grid(ctx, 12.0);
    const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r) * (1 + r); });
    const double a = quadform(f, f, Kernel(KernelKind::lambda, ctx));
    const double b = inner(f, newton_potential(f).value);
    CAPTURE(N);
    CHECK(rel(a, b) < 1e-10);
  }
}

TEST_CASE("HLS optimizer and inequality") {
  for (int N = 3; N <= 5; ++N) {
    const DimensionContext ctx(N);
    const double S = sobolev_closed_form(N);
    const auto g = make_grid(ctx, 1e5, laplace_spec());
    const auto v = RadialFunction::sample(g, [N](double r) { return v1(N, r); });
    const double form = quadform(v, v, Kernel(KernelKind::lambda, ctx));
    const double hls = std::pow(lp_norm(v, ctx.two_plus), 2) / S;
    CAPTURE(N);
    CHECK(rel(form, hls) < 1e-4);
  }

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const DimensionContext c4(4);
  const auto g = make_grid(c4, 200.0, laplace_spec());
  const ConvolutionOperator op(g, Kernel(KernelKind::lambda, c4));
  const double S = sobolev_closed_form(4);
  for (int t = 0; t < 50; ++t) {
    const double a = 0.2 + 3 * U(rng), b = 0.5 + 2 * U(rng), c = U(rng), k = 0.3 + 3 * U(rng);
    const auto f = RadialFunction::sample(g, [&](double r) {
      return std::exp(-a * r * r) + c * std::pow(1 + b * r * r, -3.0) * (1 + std::cos(k * r)) / 2;
    });
    const double lhs = op.form(f, f);
    const double rhs = std::pow(lp_norm(f, c4.two_plus), 2) / S;
    CHECK(lhs <= rhs * (1 + 1e-8));
  }
}

TEST_CASE("kernel domination in three dimensions") {
  const DimensionContext c3(3);
  PanelSpec s;
  s.nodes_per_panel = 10;
  const auto g = make_grid(c3, 6.0, s);
  const Kernel lam(KernelKind::lambda, c3), abs_psi(KernelKind::abs_psi, c3),
      ps(KernelKind::psi, c3);
  for (double a : {0.5, 2.0}) {
    const auto f = RadialFunction::sample(g, [a](double r) { return std::exp(-a * r * r); });
    const double fl = quadform(f, f, lam), fa = quadform(f, f, abs_psi), fp = quadform(f, f, ps);
    CHECK(fp <= fa);
    CHECK(fa <= fl);
  }
  const auto zs = abs_psi.breakpoints(0.0, 10.0);
  REQUIRE(zs.size() == 3);
  CHECK(zs[0] == doctest::Approx(pi / 2));
  const auto z5 = Kernel(KernelKind::abs_psi, DimensionContext(5)).breakpoints(0.0, 10.0);
  REQUIRE(!z5.empty());
  CHECK(z5[0] == doctest::Approx(specfun::first_zero(specfun::Order::from_twice(3))).epsilon(1e-12));
}
