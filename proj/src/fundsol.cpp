// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include "dualhelm/fundsol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "dualhelm/error.hpp"
#include "dualhelm/format.hpp"

namespace dualhelm {

namespace {

constexpr double pi = std::numbers::pi;

int checked_dim(int N) {
  if (N < DimensionContext::min_dim || N > DimensionContext::max_dim)
    fail(ErrorKind::domain, "dimension " + std::to_string(N) + " outside [3, 8]");
  return N;
}

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    fail(ErrorKind::domain, "radius must be positive, got " + std::to_string(r));
}

}  // namespace

DimensionContext::DimensionContext(int n)
    : N(checked_dim(n)),
      two_star(2.0 * n / (n - 2.0)),
      two_plus(2.0 * n / (n + 2.0)),
      omega_N(2.0 * std::pow(pi, 0.5 * n) / (n * specfun::gamma_fn(0.5 * n))),
      nu(specfun::Order::from_twice(n - 2)) {}

double psi(const DimensionContext& ctx, double r) {
  check_radius(r);
  if (ctx.N == 3) return std::cos(r) / (4.0 * pi * r);
  return -0.25 * std::pow(2.0 * pi * r, -ctx.nu.value()) * specfun::bessel_y(ctx.nu, r);
}

double lambda_fn(const DimensionContext& ctx, double r) {
  check_radius(r);
  return std::pow(r, 2.0 - ctx.N) / ctx.laplace_constant();
}

double difference_window(const DimensionContext& ctx) {
  if (ctx.N == 3) return 1.0;
  return std::min(1.0, 0.9 * specfun::first_zero(ctx.nu.lowered()));
}

double psi_minus_lambda(const DimensionContext& ctx, double r) {
  check_radius(r);
  if (ctx.N == 3) {
    const double s = std::sin(0.5 * r);
    return -2.0 * s * s / (4.0 * pi * r);
  }
  if (r < difference_window(ctx)) return lambda_fn(ctx, r) * specfun::eta_minus_one(ctx.nu, r);
  return psi(ctx, r) - lambda_fn(ctx, r);
}

double admissible_radius(const DimensionContext& ctx) {
  if (ctx.N == 3) return pi;
  return specfun::first_zero(specfun::Order::from_twice(ctx.N - 4));
}

const char* to_string(WeightKind kind) noexcept {
  switch (kind) {
    case WeightKind::power: return "power";
    case WeightKind::log: return "log";
    case WeightKind::linear: return "linear";
  }
  return "power";
}

WeightKind weight_kind(const DimensionContext& ctx) {
  if (ctx.N == 3) return WeightKind::linear;
  if (ctx.N == 4) return WeightKind::log;
  return WeightKind::power;
}

double difference_weight(const DimensionContext& ctx, double r) {
  check_radius(r);
  switch (weight_kind(ctx)) {
    case WeightKind::linear: return -r;
    case WeightKind::log: return std::abs(std::log(r));
    case WeightKind::power: break;
  }
  return std::pow(r, 4.0 - ctx.N);
}

double weighted_ratio(const DimensionContext& ctx, double r) {
  return psi_minus_lambda(ctx, r) / difference_weight(ctx, r);
}

BoundCertificate certify_difference_bounds(const DimensionContext& ctx, double r_lo, double r_hi,
                                           int n_samples) {
  const double r_max = admissible_radius(ctx);
  if (!(r_lo > 0.0) || !(r_hi > r_lo) || !(r_hi < r_max))
    fail(ErrorKind::range, "need 0 < r_lo < r_hi < " + fmt(r_max) + ", got [" + fmt(r_lo) + ", " +
                               fmt(r_hi) + "]");
  if (n_samples < 2) fail(ErrorKind::range, "need at least two samples");

  BoundCertificate cert;
  cert.N = ctx.N;
  cert.r_lo = r_lo;
  cert.r_hi = r_hi;
  cert.n_samples = n_samples;
  cert.weight_kind = weight_kind(ctx);

  std::vector<double> ratios(n_samples);
  const double log_lo = std::log(r_lo);
  const double step = (std::log(r_hi) - log_lo) / (n_samples - 1);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_samples; ++i) {
    const double r = (i == n_samples - 1) ? r_hi : std::exp(log_lo + step * i);
    ratios[i] = weighted_ratio(ctx, r);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  cert.kappa1_hat = *lo;
  cert.kappa2_hat = *hi;
  cert.certified = cert.kappa1_hat > 0.0 && cert.kappa1_hat <= cert.kappa2_hat &&
                   std::isfinite(cert.kappa2_hat);
  return cert;
}

double radial_derivative(const DimensionContext& ctx, int order, double r) {
  auto f = [&](double x) { return psi_minus_lambda(ctx, x); };
  if (order == 1) {
    const double h = 1e-3 * r;
    const double d1 = (f(r + h) - f(r - h)) / (2 * h);
    const double d2 = (f(r + 2 * h) - f(r - 2 * h)) / (4 * h);
    return (4 * d1 - d2) / 3;
  }
  if (order == 2) {
    const double h = 1e-2 * r;
    const double f0 = f(r);
    const double d1 = (f(r + h) - 2 * f0 + f(r - h)) / (h * h);
    const double d2 = (f(r + 2 * h) - 2 * f0 + f(r - 2 * h)) / (4 * h * h);
    return (4 * d1 - d2) / 3;
  }
  fail(ErrorKind::range, "derivative order must be 1 or 2, got " + std::to_string(order));
}

DerivativeReport derivative_bound_check(const DimensionContext& ctx, int order,
                                        const std::vector<double>& r_grid) {
  if (order != 1 && order != 2)
    fail(ErrorKind::range, "derivative order must be 1 or 2, got " + std::to_string(order));
  const double r_max = admissible_radius(ctx);
  // central differences reach 2h beyond r
  const double reach = order == 1 ? 1.002 : 1.02;
  for (double r : r_grid) {
    if (!(r > 0.0) || !(r * reach < r_max))
      fail(ErrorKind::range, "grid point " + fmt(r) + " outside (0, " + fmt(r_max) + ")");
  }
  DerivativeReport rep;
  rep.N = ctx.N;
  rep.order = order;
  rep.finite = true;
  for (double r : r_grid) {
    const double w = std::abs(radial_derivative(ctx, order, r)) * std::pow(r, ctx.N - 4.0 + order);
    if (!std::isfinite(w)) rep.finite = false;
    if (w > rep.sup_weighted) {
      rep.sup_weighted = w;
      rep.r_at_sup = r;
    }
  }
  return rep;
}

void write_fundsol_table(std::ostream& out, const DimensionContext& ctx,
                         const std::vector<double>& radii) {
  out << "r,psi,lambda,diff,weighted_ratio\n";
  for (double r : radii) {
    out << fmt(r) << ',' << fmt(psi(ctx, r)) << ',' << fmt(lambda_fn(ctx, r)) << ','
        << fmt(psi_minus_lambda(ctx, r)) << ',' << fmt(weighted_ratio(ctx, r)) << '\n';
  }
}

}  // namespace dualhelm
