// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

// Panel Gauss-Legendre grids on (0, R], radial functions sampled on them, and
// the radial reduction of convolutions with the kernels Psi, Lambda, |Psi|.
//
// A radial function f on R^N is stored through its profile f(r). Integrals
// carry the surface factor N omega_N explicitly:
//
//   int_{R^N} f dx = N omega_N sum_i w_i r_i^{N-1} f(r_i).

#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "dualhelm/fundsol.hpp"

namespace dualhelm {

struct PanelSpec {
  int nodes_per_panel = 16;
  // The first panel is [0, inner_radius]; edges then grow geometrically,
  // e_{k+1} = min(ratio e_k, e_k + max_panel_length), until R_max.
  double inner_radius = 1e-3;
  double geometric_ratio = 2.0;
  // pi/4 resolves the oscillation of Psi with >= 8 points per period. Grids
  // used only with Lambda may set this to infinity.
  double max_panel_length = std::numbers::pi / 4;
  // Extra panel edges inside (0, R_max).
  std::vector<double> breakpoints;
  // If non-empty, the panel edges verbatim (0 = e_0 < e_1 < ...); the other
  // layout fields are ignored.
  std::vector<double> edges;
};

class RadialGrid {
 public:
  const DimensionContext& ctx() const { return ctx_; }
  int nodes_per_panel() const { return q_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int panel_count() const { return static_cast<int>(edges_.size()) - 1; }
  double r_max() const { return edges_.back(); }

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& nodes() const { return nodes_; }
  // plain Gauss-Legendre weights, sum = R_max
  const std::vector<double>& weights() const { return weights_; }
  // N omega_N w_i r_i^{N-1}
  const std::vector<double>& volume_weights() const { return volume_weights_; }

  // Panel holding r (the last panel for r = R_max); -1 outside [0, R_max].
  int panel_of(double r) const;
  // True if every panel beyond r = 1 has length <= pi/4 (+ roundoff).
  bool resolves_oscillation() const;

  // Gauss-Legendre nodes / weights on [a, b] with the grid's order.
  void gauss_points(double a, double b, std::vector<double>& x, std::vector<double>& w) const;
  // Lagrange basis of panel p's nodes evaluated at x (length q).
  void lagrange_row(int panel, double x, double* out) const;

 private:
  friend std::shared_ptr<const RadialGrid> make_grid(const DimensionContext&, double,
                                                     const PanelSpec&);
  explicit RadialGrid(const DimensionContext& ctx) : ctx_(ctx) {}

  DimensionContext ctx_;
  int q_ = 0;
  std::vector<double> edges_;
  std::vector<double> ref_nodes_;    // on [-1, 1]
  std::vector<double> ref_weights_;
  std::vector<double> bary_;         // barycentric weights of ref_nodes_
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> volume_weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Throws ErrorKind::config for R_max <= 0, nodes_per_panel < 1, malformed
// edges, or a layout that yields no panel.
GridPtr make_grid(const DimensionContext& ctx, double R_max, const PanelSpec& spec = {});

struct RadialFunction {
  GridPtr grid;
  std::vector<double> values;

  RadialFunction() = default;
  RadialFunction(GridPtr g, std::vector<double> v);

  static RadialFunction sample(GridPtr g, const std::function<double(double)>& f);
  static RadialFunction zeros(GridPtr g);

  int size() const { return static_cast<int>(values.size()); }
  // Panel polynomial interpolation; 0 beyond R_max.
  double operator()(double r) const;
};

// Throws ErrorKind::shape unless both live on the same grid.
void require_same_grid(const RadialFunction& a, const RadialFunction& b);

// N omega_N sum w_i r_i^{N-1} f_i g_i
double inner(const RadialFunction& f, const RadialFunction& g);
double integral(const RadialFunction& f);
// (N omega_N int |f|^p r^{N-1} dr)^{1/p}, p >= 1 (domain error otherwise).
double lp_norm(const RadialFunction& f, double p);

struct PotentialResult {
  RadialFunction value;
  bool convergence_warning = false;
};

// (Lambda * f)(r) = N omega_N int_0^inf s^{N-1} f(s) Lambda(max(r, s)) ds on
// the nodes of f's grid, by cumulative panel quadrature. The warning flag is
// set when f has not decayed by the end of the grid.
PotentialResult newton_potential(const RadialFunction& f);
// Same quantity at arbitrary r > 0 (beyond R_max the exterior formula).
double newton_potential_at(const RadialFunction& f, double r);

enum class KernelKind { psi, lambda, abs_psi, psi_minus_lambda, unit };
const char* to_string(KernelKind kind) noexcept;

class Kernel {
 public:
  Kernel(KernelKind kind, const DimensionContext& ctx) : kind_(kind), ctx_(ctx) {}

  KernelKind kind() const { return kind_; }
  const DimensionContext& ctx() const { return ctx_; }

  double operator()(double d) const;
  // Points in (lo, hi) where the kernel is not smooth (zeros of Psi for
  // |Psi|), sorted.
  std::vector<double> breakpoints(double lo, double hi) const;
  // Whether shell_average has an exact formula (all kinds except abs_psi).
  bool has_shell_formula() const { return kind_ != KernelKind::abs_psi; }

 private:
  KernelKind kind_;
  DimensionContext ctx_;
};

// int_{S^{N-1}} K(|r e - s w|) dsigma(w) by adaptive Gauss-Kronrod in the
// variable phi with |x - y| = max - min cos(phi), graded towards phi = 0 when
// r and s nearly coincide. Throws ErrorKind::domain for r, s <= 0.
double angular_average(const Kernel& K, double r, double s);

// Exact value of the same average for Psi, Lambda, Psi - Lambda and 1:
// N omega_N Lambda(max) (shell theorem) and
// N omega_N j_nu(min) Psi(max), j_nu(t) = Gamma(nu+1) (2/t)^nu J_nu(t).
double shell_average(const Kernel& K, double r, double s);

// j_nu(t) - 1 without cancellation.
double bessel_j_normalized_minus_one(specfun::Order nu, double t);

enum class AverageMethod { automatic, quadrature };

// Dense matrix W with (K * g)(r_i) ~ sum_j W_ij g_j on one grid. The row for
// r_i splits the panel holding r_i at r_i (the radial kernel has a kink at
// s = r) and maps the sub-panel quadrature back through panel interpolation.
class ConvolutionOperator {
 public:
  // symmetrize: replace W by (W + C^{-1} W^T C)/2, C = diag(volume weights),
  // so that the discrete bilinear form is exactly symmetric.
  ConvolutionOperator(GridPtr grid, const Kernel& K, bool symmetrize = false,
                      AverageMethod method = AverageMethod::automatic);

  const GridPtr& grid() const { return grid_; }
  const Kernel& kernel() const { return kernel_; }
  int size() const { return n_; }
  double entry(int i, int j) const { return w_[static_cast<size_t>(i) * n_ + j]; }

  std::vector<double> apply(const std::vector<double>& g) const;
  RadialFunction apply(const RadialFunction& g) const;
  // N omega_N sum_i w_i r_i^{N-1} f_i (W g)_i
  double form(const RadialFunction& f, const RadialFunction& g) const;

 private:
  GridPtr grid_;
  Kernel kernel_;
  int n_;
  std::vector<double> w_;
};

// Row of quadrature weights for (K * g)(r) at an arbitrary r > 0, against
// g's grid values.
std::vector<double> convolution_row(const RadialGrid& grid, const Kernel& K, double r,
                                    AverageMethod method = AverageMethod::automatic);
double convolve_at(const RadialFunction& g, const Kernel& K, double r);

// int int f(x) K(|x - y|) g(y) dy dx, through ConvolutionOperator. Throws
// ErrorKind::shape on grid mismatch.
double quadform(const RadialFunction& f, const RadialFunction& g, const Kernel& K,
                AverageMethod method = AverageMethod::automatic);

}  // namespace dualhelm
