// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

// Radial fundamental solutions in R^N:
//
//   Psi(r)    = -(1/4) (2 pi r)^{(2-N)/2} Y_{(N-2)/2}(r)   (real part of the
//               outgoing Helmholtz kernel, k = 1)
//   Lambda(r) = r^{2-N} / (N (N-2) omega_N)               (Newton kernel)
//
// and their difference, which is evaluated without cancellation near 0.

#pragma once

#include <iosfwd>
#include <vector>

#include "dualhelm/specfun.hpp"

namespace dualhelm {

class DimensionContext {
 public:
  static constexpr int min_dim = 3;
  static constexpr int max_dim = 8;

  // Throws ErrorKind::domain for N outside [3, 8].
  explicit DimensionContext(int N);

  int N;
  double two_star;   // 2N/(N-2)
  double two_plus;   // 2N/(N+2)
  double omega_N;    // volume of the unit ball
  specfun::Order nu;  // (N-2)/2

  // |S^{N-1}| = N omega_N
  double surface() const { return N * omega_N; }
  // N (N-2) omega_N, the denominator of Lambda
  double laplace_constant() const { return N * (N - 2) * omega_N; }
};

double psi(const DimensionContext& ctx, double r);
double lambda_fn(const DimensionContext& ctx, double r);

// Psi - Lambda. For N = 3 uses -2 sin^2(r/2)/(4 pi r); for N >= 4 uses
// Lambda * (eta_nu - 1) inside difference_window(ctx) and plain subtraction
// beyond it.
double psi_minus_lambda(const DimensionContext& ctx, double r);
double difference_window(const DimensionContext& ctx);

// Sup of admissible radii for the difference bounds: y_{(N-4)/2} for N >= 4,
// pi for N = 3.
double admissible_radius(const DimensionContext& ctx);

enum class WeightKind { power, log, linear };
const char* to_string(WeightKind kind) noexcept;

WeightKind weight_kind(const DimensionContext& ctx);
// r^{4-N} (N >= 5), |ln r| (N = 4), -r (N = 3)
double difference_weight(const DimensionContext& ctx, double r);
double weighted_ratio(const DimensionContext& ctx, double r);

struct BoundCertificate {
  int N = 0;
  double r_lo = 0;
  double r_hi = 0;
  int n_samples = 0;
  double kappa1_hat = 0;
  double kappa2_hat = 0;
  WeightKind weight_kind = WeightKind::power;
  bool certified = false;  // 0 < kappa1_hat <= kappa2_hat
};

// Empirical inf / sup of weighted_ratio over n_samples log-spaced radii in
// [r_lo, r_hi]. Throws ErrorKind::range unless 0 < r_lo < r_hi <
// admissible_radius(ctx) and n_samples >= 2.
BoundCertificate certify_difference_bounds(const DimensionContext& ctx, double r_lo, double r_hi,
                                           int n_samples);

// d^order/dr^order (Psi - Lambda) at r, order in {1, 2}, by Richardson
// extrapolated central differences.
double radial_derivative(const DimensionContext& ctx, int order, double r);

struct DerivativeReport {
  int N = 0;
  int order = 0;
  double sup_weighted = 0;  // sup |d^order (Psi - Lambda)| r^{N-4+order}
  double r_at_sup = 0;
  bool finite = false;
};

// Throws ErrorKind::range when order is not 1 or 2 or a grid point leaves
// (0, admissible_radius(ctx)).
DerivativeReport derivative_bound_check(const DimensionContext& ctx, int order,
                                        const std::vector<double>& r_grid);

// CSV with header r,psi,lambda,diff,weighted_ratio; one row per radius.
void write_fundsol_table(std::ostream& out, const DimensionContext& ctx,
                         const std::vector<double>& radii);

}  // namespace dualhelm
