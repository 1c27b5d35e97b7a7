// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dualhelm/error.hpp"
#include "dualhelm/instanton.hpp"

using namespace dualhelm;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

PanelSpec laplace_spec(double inner) {
  PanelSpec s;
  s.inner_radius = inner;
  s.max_panel_length = std::numeric_limits<double>::infinity();
  return s;
}
}  // namespace

TEST_CASE("instanton profiles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> le(-3, 1), rr(0, 5);
  for (int N : {3, 4, 5, 6}) {
    const DimensionContext ctx(N);
    for (int k = 0; k < 50; ++k) {
      const double eps = std::pow(10.0, le(rng)), r = rr(rng);
      const double u = u_instanton(ctx, eps, r);
      CHECK(rel(v_instanton(ctx, eps, r), std::pow(u, ctx.two_star - 1)) < 1e-12);
      CHECK(rel(v_instanton(ctx, eps, r),
                std::pow(eps, -0.25 * (N + 2)) * v_instanton(ctx, 1.0, r / std::sqrt(eps))) < 1e-12);
    }
  }
  CHECK(u_instanton(DimensionContext(4), 1.0, 0.0) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
  CHECK_THROWS_AS(u_instanton(DimensionContext(4), 0.0, 1.0), Error);
  CHECK_THROWS_AS(v_instanton(DimensionContext(4), -1.0, 1.0), Error);
}

TEST_CASE("cutoff profile") {
  CHECK(cutoff(0.0) == 1.0);
  CHECK(cutoff(1.0) == 1.0);
  CHECK(cutoff(2.0) == 0.0);
  CHECK(cutoff(7.0) == 0.0);
  for (double r = 0; r < 3; r += 0.01) {
    CHECK(cutoff(r) >= 0.0);
    CHECK(cutoff(r) <= 1.0);
  }
}

TEST_CASE("cut-off family support and core") {
  const DimensionContext ctx(5);
  const InstantonParams p{1e-3, 0.25};
  const auto g = make_grid(ctx, 1.0);
  const auto v = cutoff_family(p, g);
  for (int i = 0; i < g->size(); ++i) {
    const double r = g->nodes()[i];
    if (r >= 2 * p.alpha) CHECK(v.values[i] == 0.0);
    if (r <= p.alpha) CHECK(v.values[i] == v_instanton(ctx, p.eps, r));
  }
  CHECK_THROWS_AS(cutoff_family(p, make_grid(ctx, 0.3)), Error);
  try {
    cutoff_family(p, make_grid(ctx, 0.3));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::range);
  }
}

TEST_CASE("tail norm bound") {
  for (int N : {3, 4, 5}) {
    const DimensionContext ctx(N);
    for (double eps : {1e-2, 1e-4}) {
      const InstantonParams p{eps, 0.2};
      PanelSpec s = laplace_spec(1e-4);
      for (int k = 0; k <= 8; ++k) s.breakpoints.push_back(p.alpha * (1 + k / 8.0));
      const auto g = make_grid(ctx, 1e5, s);
      double acc = 0;
      for (int i = 0; i < g->size(); ++i) {
        const double r = g->nodes()[i];
        acc += g->volume_weights()[i] *
               std::pow((1 - cutoff(r / p.alpha)) * v_instanton(ctx, eps, r), ctx.two_plus);
      }
      CHECK(acc > 0);
      CHECK(acc <= tail_norm_bound(ctx, p));
    }
  }
}

TEST_CASE("HLS optimality and the norm identity") {
  for (int N : {3, 4, 5}) {
    const DimensionContext ctx(N);
    const double S = sobolev_constant(ctx);
    for (double eps : {0.25, 1.0, 4.0}) {
      const auto g = make_grid(ctx, 1e6, laplace_spec(1e-3));
      const auto v = RadialFunction::sample(g, [&](double r) { return v_instanton(ctx, eps, r); });
      const double n = lp_norm(v, ctx.two_plus);
      CHECK(rel(n, std::pow(S, 0.25 * (N + 2))) < 1e-4);
      const double form = inner(v, newton_potential(v).value);
      CHECK(rel(form, n * n / S) < 1e-4);
    }
  }
}

TEST_CASE("core mass") {
  // N = 4: int_0^1 r^3 (1+r^2)^{-3} dr = 1/16, times 2 pi^2 (8)^{3/2}
  const double expect = 2 * std::numbers::pi * std::numbers::pi * std::pow(8.0, 1.5) / 16.0;
  CHECK(rel(core_mass(DimensionContext(4)), expect) < 1e-13);
}

TEST_CASE("decomposition preconditions") {
  const DimensionContext ctx(5);
  CHECK_THROWS_AS(bilinear_decomposition(CoefficientSpec::constant(1), {0.1, 0.2}, ctx), Error);
  CoefficientSpec per = CoefficientSpec::constant(1);
  per.periodic_amplitude = 0.5;
  CHECK_THROWS_AS(bilinear_decomposition(per, {1e-3, 0.2}, ctx), Error);
  CoefficientSpec ring = CoefficientSpec::constant(1);
  ring.decay = DecayKind::gaussian;
  ring.height = 1;
  // max at 0, fine
  CHECK_NOTHROW(bilinear_decomposition(ring, {1e-3, 0.2}, ctx));
  try {
    bilinear_decomposition(CoefficientSpec::constant(1), {0.1, 0.2}, ctx);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }
}

TEST_CASE("decomposition is an identity before estimation") {
  for (int N : {3, 4, 5}) {
    const DimensionContext ctx(N);
    CoefficientSpec Q = CoefficientSpec::constant(0.5);
    Q.decay = DecayKind::quartic_cap;
    Q.height = 1.0;
    Q.radius = 0.6;
    const InstantonParams p{1e-3, 0.2};
    const auto c = bilinear_decomposition(Q, p, ctx);

    PanelSpec s;
    s.inner_radius = 1e-3 * std::sqrt(p.eps);
    for (int k = 0; k < 8; ++k) s.breakpoints.push_back(p.alpha * (1 + k / 8.0));
    s.nodes_per_panel = 24;
    const RadialDiscretization d(make_grid(ctx, 2 * p.alpha, s));
    const auto A = make_coefficient(Q, d);
    const auto v = cutoff_family(p, d.grid());
    const double direct = a_q_form(A, d, v.values);
    const double split = c.term_main - c.term_tail + c.term_kernel - c.term_coeff;
    CHECK(rel(split, direct) < 1e-5);
    CHECK(rel(c.norm_sq, std::pow(field_norm(d, v.values, ctx.two_plus), 2)) < 1e-8);
    CHECK(rel(c.upper_bound, mp_upper_bound(A, d, v.values)) < 1e-5);
    CHECK(c.term_coeff > 0);
  }
}

TEST_CASE("term estimates") {
  const DimensionContext c5(5);
  const auto one = CoefficientSpec::constant(1.0);
  const auto a = bilinear_decomposition(one, {0.01, 0.2}, c5);
  CHECK(rel(a.term_main, std::pow(sobolev_constant(c5), 2.5)) < 1e-12);
  CHECK(a.term_coeff == 0.0);
  CHECK(a.term_tail <= a.tail_bound);
  CHECK(a.kappa0 > 0);
  CHECK(a.term_kernel >= a.kernel_lower_bound);
  for (double eps : {1e-3, 1e-4}) {
    const auto b = bilinear_decomposition(one, {eps, 0.2}, c5);
    CHECK(b.term_kernel >= b.kernel_lower_bound);
    CHECK(b.term_tail <= b.tail_bound);
  }
  const auto c4 = bilinear_decomposition(one, {1e-4, 0.2}, DimensionContext(4));
  CHECK(c4.term_kernel >= c4.kernel_lower_bound);
  const auto c3 = bilinear_decomposition(one, {1e-3, 0.2}, DimensionContext(3));
  CHECK(c3.term_kernel < 0);
  CHECK(std::isnan(c3.kernel_lower_bound));
  // 4 alpha beyond the admissible range: no kappa0
  CHECK(std::isnan(bilinear_decomposition(one, {1e-3, 0.5}, c5).kappa0));
}

TEST_CASE("strict gap scan") {
  const auto one = CoefficientSpec::constant(1.0);
  for (int N : {4, 5}) {
    const auto s = strict_gap_scan(one, DimensionContext(N));
    CHECK(s.status == GapStatus::gap_certified);
    const auto& b = s.entries[s.best];
    CHECK(b.upper_bound < b.l_star);
    CHECK(b.gap > b.error_bar);
    for (const auto& c : s.entries) CHECK(c.gap > 0);
  }
  const auto s5 = strict_gap_scan(one, DimensionContext(5), {1e-2, 1e-3, 1e-4}, 0.5);
  CHECK(s5.status == GapStatus::gap_certified);

  const auto s3 = strict_gap_scan(one, DimensionContext(3));
  CHECK(s3.status == GapStatus::no_gap_equality);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& c : s3.entries) {
    CHECK(c.upper_bound >= c.l_star - c.error_bar);
    CHECK(c.upper_bound < prev);
    prev = c.upper_bound;
  }

  CoefficientSpec plateau = CoefficientSpec::constant(0.5);
  plateau.decay = DecayKind::quadratic_cap;
  plateau.height = 1.0;
  plateau.radius = 1.0;
  CHECK(strict_gap_scan(plateau, DimensionContext(4)).status == GapStatus::gap_certified);
  CHECK_THROWS_AS(strict_gap_scan(plateau, DimensionContext(5)), Error);

  std::ostringstream os;
  write_gap_csv(os, s3);
  CHECK(os.str().rfind("eps,alpha,term_main", 0) == 0);
  int lines = 0;
  for (char ch : os.str()) lines += ch == '\n';
  CHECK(lines == 1 + static_cast<int>(s3.entries.size()));
}
