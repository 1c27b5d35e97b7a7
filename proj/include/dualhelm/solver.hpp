// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

// Candidate dual ground states: a Cartesian FFT discretization for N = 3, 4,
// a damped normalized fixed-point iteration on |v|^{2+-2} v = A_Q v, the
// map back to u, far-field fits and the three-dimensional probe.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dualhelm/dualvar.hpp"
#include "json.hpp"

namespace dualhelm {

// Fourier multipliers for the Cartesian backend.
//   truncated_kernel: transform of Psi 1_{|x| < L}; exact (up to spectral
//       error) for sources in B_{L/2} observed in B_{L/2}
//   regularized_pv:   (|xi|^2 - 1) / ((|xi|^2 - 1)^2 + delta^2), delta = c pi / L
//   laplace_periodic: 1/|xi|^2, zero mode dropped
enum class MultiplierKind { truncated_kernel, regularized_pv, laplace_periodic };
const char* to_string(MultiplierKind k) noexcept;
MultiplierKind multiplier_kind_from_string(const std::string& name);

// int_{|x|<D} Psi(x) e^{-i xi x} dx at |xi| = rho; closed form for N = 3,
// panel quadrature otherwise.
double truncated_multiplier(const DimensionContext& ctx, double D, double rho);
double truncated_multiplier_quadrature(const DimensionContext& ctx, double D, double rho);

struct CartesianSpec {
  double half_width = 12.0;  // L; the box is [-L, L)^N
  int points = 32;           // M per axis, a power of two >= 16
  MultiplierKind multiplier = MultiplierKind::truncated_kernel;
  double pv_factor = 2.0;    // c in delta = c pi / L
};

class CartesianDiscretization final : public Discretization {
 public:
  // Throws ErrorKind::config for N outside {3, 4} or a bad spec.
  CartesianDiscretization(const DimensionContext& ctx, const CartesianSpec& spec);
  ~CartesianDiscretization() override;
  CartesianDiscretization(const CartesianDiscretization&) = delete;
  CartesianDiscretization& operator=(const CartesianDiscretization&) = delete;

  const DimensionContext& ctx() const override { return ctx_; }
  std::string backend() const override { return "cartesian"; }
  int size() const override { return n_; }
  const std::vector<double>& measure() const override { return measure_; }
  Field convolve(const Field& f) const override;
  Field sample(const CoefficientSpec& spec) const override;

  const CartesianSpec& spec() const { return spec_; }
  double spacing() const { return h_; }
  double delta() const { return delta_; }
  // set when some |xi|^2 - 1 on the grid is below delta/10 (regularized_pv)
  bool resolution_warning() const { return warning_; }
  void coordinates(int index, double* x) const;
  double radius(int index) const;

  // forward then inverse transform, normalized
  Field round_trip(const Field& f) const;
  // sum |fhat_k|^2 / M^N over the full spectrum
  double spectral_energy(const Field& f) const;

 private:
  DimensionContext ctx_;
  CartesianSpec spec_;
  int n_ = 0;
  int n_half_ = 0;  // complex length of the r2c output
  double h_ = 0;
  double delta_ = 0;
  bool warning_ = false;
  std::vector<double> measure_;
  std::vector<double> mult_;  // on the r2c half spectrum
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

// Psi * f on the discretization (disc.convolve).
Field resolvent_apply(const Discretization& disc, const Field& f);

struct SolveParams {
  int max_iter = 500;
  double tol = 1e-6;
  double damping = 0.5;  // theta
  int max_backtracks = 12;
};

enum class SolveStatus { converged, max_iter, stalled };
const char* to_string(SolveStatus s) noexcept;

struct SolveReport {
  SolveStatus status = SolveStatus::max_iter;
  bool converged = false;
  int iterations = 0;
  // |res|_{2+} / |v|_{2+}^{2+-1} per accepted iterate
  std::vector<double> residual_history;
  DualState final_state;
  double energy = 0;
  double mp_bound = 0;
  // |J_Q(v) - |v|_{2+}^{2+}/N|
  double energy_identity_gap = 0;
};

// Iterates w = |A_Q v|^{2*-2} A_Q v, v <- t((1-theta) v + theta t_w w) with
// theta halved until the residual decreases. Throws ErrorKind::degenerate_init
// for a zero init or a non-positive quadratic form.
SolveReport fixed_point_solve(const Coefficient& Q, const Discretization& disc, const Field& init,
                              const SolveParams& params = {});

struct Reconstruction {
  Field u;  // Psi * (Q^{1/2*} v) at the samples
  double norm_2star = 0;
};

Reconstruction reconstruct_u(const Coefficient& Q, const Discretization& disc, const Field& v);
// u at arbitrary radii for the radial backend
std::vector<double> reconstruct_u_at(const Coefficient& Q, const RadialDiscretization& disc,
                                     const Field& v, const std::vector<double>& radii);

struct FarfieldFit {
  double amplitude = 0;
  double phase = 0;  // in (-pi, pi]
  double rms_error = 0;
  int samples = 0;
};

// Least squares u(r) r^{(N-1)/2} ~ A cos(r + phase). Throws ErrorKind::window
// when a radius lies inside the source support or fewer than 3 samples.
FarfieldFit farfield_fit(const DimensionContext& ctx, const std::vector<double>& radii,
                         const std::vector<double>& values, double source_radius);

struct N3ProbeRow {
  double eps = 0;
  double upper_bound = 0;
  double error_bar = 0;
  double l_star = 0;
  double form_psi = 0;     // int w Psi * w, w = Q^{1/2*} v_{eps,alpha}
  double form_lambda = 0;  // same with Lambda
};

struct N3ProbeReport {
  std::vector<N3ProbeRow> rows;
  bool decreasing = false;      // upper bounds decrease with eps
  bool above_threshold = false; // every bound >= L* - error bar
  bool forms_ordered = false;   // form_psi < form_lambda in every row
  double v1_margin = 0;         // int v_1 (Lambda - Psi) * v_1
  double v1_margin_error = 0;
  double v1_form_lambda = 0;
  int kernel_samples = 0;
  int kernel_violations = 0;  // samples with |Psi| > Lambda
  double max_abs_psi_over_lambda = 0;
};

std::vector<double> default_probe_eps();
// Q radial with its maximum at 0; precondition error otherwise.
N3ProbeReport n3_nonexistence_probe(const CoefficientSpec& Q,
                                    const std::vector<double>& eps_list = default_probe_eps(),
                                    double alpha = 0.2);

// One JSON header line, then count float64 values little-endian.
struct Checkpoint {
  nlohmann::json meta;
  Field data;
};
void write_checkpoint(std::ostream& out, const nlohmann::json& meta, const Field& data);
// Throws ErrorKind::config on a malformed header, ErrorKind::shape on
// truncated data.
Checkpoint read_checkpoint(std::istream& in);

void write_residual_csv(std::ostream& out, const SolveReport& rep);

}  // namespace dualhelm
