// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

// Aubin-Talenti instantons, their duals, cut-off test functions and the
// four-term split of the quadratic form used to push the mountain-pass
// bound below L_Q* when N >= 4:
//
//   int v A_Q v = int v_e G_q v_e                       (main)
//               - int (1+phi) v_e G_q ((1-phi) v_e)      (tail)
//               + int v (A_q - G_q) v                    (kernel)
//               - int v (A_q - A_Q) v                    (coeff)
//
// with v = phi_a v_e, q = sup Q and G_q the Newton-kernel version of A_q.

#pragma once

#include <iosfwd>
#include <vector>

#include "dualhelm/dualvar.hpp"

namespace dualhelm {

// (N(N-2) eps)^{(N-2)/4} (eps + r^2)^{-(N-2)/2}; domain error for eps <= 0.
double u_instanton(const DimensionContext& ctx, double eps, double r);
// (N(N-2) eps)^{(N+2)/4} (eps + r^2)^{-(N+2)/2} = u^{2*-1}
double v_instanton(const DimensionContext& ctx, double eps, double r);

// phi(r): 1 on [0, 1], 0 on [2, inf), C-infinity in between.
double cutoff(double r);

struct InstantonParams {
  double eps = 1e-2;
  double alpha = 0.2;
  // domain error unless eps > 0 and alpha > 0
  void validate() const;
};

// phi(r / alpha) v_eps(r) on the grid; range error if the grid ends
// before 2 alpha.
RadialFunction cutoff_family(const InstantonParams& p, const GridPtr& grid);

// omega_N (N(N-2))^{N/2} alpha^{-N} eps^{N/2}
double tail_norm_bound(const DimensionContext& ctx, const InstantonParams& p);

struct GapOptions {
  int nodes_per_panel = 16;
  int refined_nodes = 24;   // second resolution for the error bars
  double far_radius = 1e4;  // end of the Newton-kernel grid
  int cutoff_panels = 8;    // panels across [alpha, 2 alpha]
};

struct GapCertificate {
  int N = 0;
  double eps = 0;
  double alpha = 0;
  double q = 0;  // sup Q
  double term_main = 0;
  double term_tail = 0;
  double term_kernel = 0;
  double term_coeff = 0;
  double norm_sq = 0;  // |v_{eps,alpha}|_{2+}^2
  double upper_bound = 0;
  double l_star = 0;
  double gap = 0;  // l_star - upper_bound
  double error_bar = 0;
  // a-priori estimates of the tail and kernel terms
  double tail_bound = 0;
  double kappa0 = 0;              // nan when 4 alpha leaves the admissible range or N = 3
  double kernel_lower_bound = 0;  // nan when not applicable
  bool certified = false;         // gap > error_bar
};

// Throws precondition for eps > alpha^2, a non-radial Q or Q(0) < sup Q.
GapCertificate bilinear_decomposition(const CoefficientSpec& Q, const InstantonParams& p,
                                      const DimensionContext& ctx, const GapOptions& opt = {});

// int_{B_1} v_1 dx
double core_mass(const DimensionContext& ctx);

enum class GapStatus { gap_certified, inconclusive, no_gap_equality };
const char* to_string(GapStatus s) noexcept;

struct GapScan {
  GapStatus status = GapStatus::inconclusive;
  std::vector<GapCertificate> entries;
  int best = -1;  // entry with the smallest upper bound
  FlatnessReport flatness;
};

// eps = 1e-2 down to 1e-6, half-decade steps
std::vector<double> default_eps_list();

// Checks the flatness of Q at 0 (o(r^2) for N >= 5, O(r^2) for N = 4;
// precondition error otherwise) and runs bilinear_decomposition per eps.
GapScan strict_gap_scan(const CoefficientSpec& Q, const DimensionContext& ctx,
                        const std::vector<double>& eps_list = default_eps_list(),
                        double alpha = 0.2, const GapOptions& opt = {});

// one row per eps
void write_gap_csv(std::ostream& out, const GapScan& scan);

}  // namespace dualhelm
