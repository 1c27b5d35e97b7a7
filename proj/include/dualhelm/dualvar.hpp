// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

// Dual variational objects for -Delta u - u = Q |u|^{2*-2} u:
//
//   A_Q v = Q^{1/2*} Psi * (Q^{1/2*} v)
//   J_Q(v) = |v|_{2+}^{2+} / 2+  -  (1/2) int v A_Q v
//
// Fields are plain vectors of samples on a Discretization, which supplies
// the integration measure and the convolution with Psi.

#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "dualhelm/radialops.hpp"

namespace dualhelm {

using Field = std::vector<double>;

class CoefficientSpec;

class Discretization {
 public:
  virtual ~Discretization() = default;

  virtual const DimensionContext& ctx() const = 0;
  virtual std::string backend() const = 0;
  virtual int size() const = 0;
  // int_{R^N} f dx ~ sum_i measure_i f_i
  virtual const std::vector<double>& measure() const = 0;
  // kernel * f at the sample points (Psi unless the backend was built
  // with another kernel)
  virtual Field convolve(const Field& f) const = 0;
  // Q at the sample points
  virtual Field sample(const CoefficientSpec& spec) const = 0;
};

class RadialDiscretization final : public Discretization {
 public:
  explicit RadialDiscretization(GridPtr grid, KernelKind kernel = KernelKind::psi);

  const DimensionContext& ctx() const override { return grid_->ctx(); }
  std::string backend() const override { return "radial"; }
  int size() const override { return grid_->size(); }
  const std::vector<double>& measure() const override { return grid_->volume_weights(); }
  Field convolve(const Field& f) const override { return op_.apply(f); }
  Field sample(const CoefficientSpec& spec) const override;

  const GridPtr& grid() const { return grid_; }
  const ConvolutionOperator& op() const { return op_; }

 private:
  GridPtr grid_;
  ConvolutionOperator op_;
};

enum class DecayKind { none, smoothed_ball, quadratic_cap, quartic_cap, gaussian };
const char* to_string(DecayKind kind) noexcept;
// Throws ErrorKind::config for unknown names.
DecayKind decay_kind_from_string(const std::string& name);

// Q(x) = c + a prod_i cos(2 pi x_i) + h D(|x|), the sum of a Z^N-periodic
// part and a decaying part; D(0) = 1 = max D, so sup Q = Q(0) = c + a + h.
class CoefficientSpec {
 public:
  double periodic_constant = 1.0;  // c
  double periodic_amplitude = 0.0;  // a, 0 <= a <= c
  DecayKind decay = DecayKind::none;
  double height = 0.0;  // h >= 0
  double radius = 1.0;
  double width = 1.0;

  static CoefficientSpec constant(double c);

  // Throws ErrorKind::config on negative parameters, a > c, or sup Q = 0.
  void validate() const;
  bool is_radial() const { return periodic_amplitude == 0.0; }
  double sup_norm() const { return periodic_constant + periodic_amplitude + height; }

  double periodic_part(const double* x, int N) const;
  double decaying_part(double r) const;
  double at(const double* x, int N) const;
  // Radial profile; throws ErrorKind::config unless is_radial().
  double at_radius(double r) const;
};

enum class CoefficientKind { constant, radial_profile, cartesian_samples };
const char* to_string(CoefficientKind kind) noexcept;

// Q sampled on one discretization, with its split Q = Q_per + Q_0.
struct Coefficient {
  CoefficientKind kind = CoefficientKind::constant;
  CoefficientSpec spec;
  double sup_norm = 0;
  Field values;
  Field periodic;
  Field decaying;
  Field root;  // Q^{1/2*}
  const Discretization* disc = nullptr;
};

Coefficient make_coefficient(const CoefficientSpec& spec, const Discretization& disc);

// (sum_i mu_i |f_i|^p)^{1/p}
double field_norm(const Discretization& disc, const Field& f, double p);
double field_inner(const Discretization& disc, const Field& f, const Field& g);

// Throws ErrorKind::config if Q was sampled on another discretization and
// ErrorKind::shape on size mismatch.
Field a_q_apply(const Coefficient& Q, const Discretization& disc, const Field& v);
double a_q_form(const Coefficient& Q, const Discretization& disc, const Field& v);
double j_q(const Coefficient& Q, const Discretization& disc, const Field& v);
// |v|^{2+-2} v - A_Q v
Field j_q_grad(const Coefficient& Q, const Discretization& disc, const Field& v);
// (|v|_{2+}^{2+} / int v A_Q v)^{1/(2-2+)}; ErrorKind::projection when the
// quadratic form is not positive.
double t_projection(const Coefficient& Q, const Discretization& disc, const Field& v);
// (1/N) (|v|_{2+}^2 / int v A_Q v)^{N/2}; ErrorKind::projection as above.
double mp_upper_bound(const Coefficient& Q, const Discretization& disc, const Field& v);

struct DualState {
  Field v;
  double norm_2plus = 0;
  double quadform_AQ = 0;
  double energy = 0;
  double residual = 0;
};

DualState evaluate_state(const Coefficient& Q, const Discretization& disc, Field v);

struct SobolevReport {
  int N = 0;
  double from_norm = 0;      // (|u_1|_{2*}^{2*})^{2/N}
  double from_gradient = 0;  // (|grad u_1|_2^2)^{2/N}
  double relative_gap = 0;
};

// u_1(r) = (N(N-2))^{(N-2)/4} (1 + r^2)^{-(N-2)/2}
double u1_profile(int N, double r);

SobolevReport sobolev_report(const DimensionContext& ctx);
// S by quadrature of |u_1|_{2*}^{2*}; cached per dimension.
double sobolev_constant(const DimensionContext& ctx);

// S^{N/2} / (N q^{(N-2)/2}); ErrorKind::domain for q <= 0.
double l_q_star(double sup_norm, const DimensionContext& ctx);
double l_q_star(const Coefficient& Q, const DimensionContext& ctx);

struct FlatnessReport {
  std::vector<double> radii;
  std::vector<double> ratios;  // max over probe directions of (Q(x0)-Q(x))/|x-x0|^2
  double limsup = 0;           // max ratio over the five smallest radii
  double limit_estimate = 0;   // extrapolated r -> 0 value
  bool little_o = false;       // ratio tends to 0
  bool big_o = false;          // ratio stays bounded
};

// Default radii: 1e-1 halving down to 1e-6.
std::vector<double> default_flatness_radii();
// Throws ErrorKind::precondition unless Q(x0) = sup Q within 1e-12.
FlatnessReport flatness_check(const CoefficientSpec& Q, int N, const std::vector<double>& x0,
                              const std::vector<double>& radii = default_flatness_radii());

// C-infinity step: 1 on (-inf, 0], 0 on [1, inf).
double smooth_step(double t);

}  // namespace dualhelm
