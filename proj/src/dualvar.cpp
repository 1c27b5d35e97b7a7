// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include "dualhelm/dualvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dualhelm/error.hpp"
#include "dualhelm/format.hpp"

namespace dualhelm {

namespace {

constexpr double pi = std::numbers::pi;

void check_size(const Discretization& disc, const Field& v) {
  if (static_cast<int>(v.size()) != disc.size())
    fail(ErrorKind::shape, "field has " + std::to_string(v.size()) + " samples, discretization " +
                               std::to_string(disc.size()));
}

void check_backend(const Coefficient& Q, const Discretization& disc) {
  if (Q.disc != &disc)
    fail(ErrorKind::config, "coefficient was sampled on another discretization (" +
                                disc.backend() + " backend)");
}

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

// ---------------------------------------------------------------- coefficient

const char* to_string(DecayKind kind) noexcept {
  switch (kind) {
    case DecayKind::none: return "none";
    case DecayKind::smoothed_ball: return "smoothed_ball";
    case DecayKind::quadratic_cap: return "quadratic_cap";
    case DecayKind::quartic_cap: return "quartic_cap";
    case DecayKind::gaussian: return "gaussian";
  }
  return "none";
}

DecayKind decay_kind_from_string(const std::string& name) {
  for (auto k : {DecayKind::none, DecayKind::smoothed_ball, DecayKind::quadratic_cap,
                 DecayKind::quartic_cap, DecayKind::gaussian})
    if (name == to_string(k)) return k;
  fail(ErrorKind::config, "unknown decaying profile '" + name + "'");
}

const char* to_string(CoefficientKind kind) noexcept {
  switch (kind) {
    case CoefficientKind::constant: return "constant";
    case CoefficientKind::radial_profile: return "radial_profile";
    case CoefficientKind::cartesian_samples: return "cartesian_samples";
  }
  return "constant";
}

CoefficientSpec CoefficientSpec::constant(double c) {
  CoefficientSpec s;
  s.periodic_constant = c;
  return s;
}

void CoefficientSpec::validate() const {
  const double fields[] = {periodic_constant, periodic_amplitude, height, radius, width};
  for (double f : fields)
    if (!std::isfinite(f) || f < 0.0) fail(ErrorKind::config, "coefficient parameters must be >= 0");
  if (periodic_amplitude > periodic_constant)
    fail(ErrorKind::config, "periodic amplitude exceeds the constant; Q would change sign");
  if (decay != DecayKind::none && height > 0.0) {
    if (decay != DecayKind::gaussian && !(radius > 0.0))
      fail(ErrorKind::config, "decaying profile needs radius > 0");
    if ((decay == DecayKind::gaussian || decay == DecayKind::smoothed_ball) && !(width > 0.0))
      fail(ErrorKind::config, "decaying profile needs width > 0");
  }
  if (!(sup_norm() > 0.0)) fail(ErrorKind::config, "coefficient vanishes identically");
}

double CoefficientSpec::periodic_part(const double* x, int N) const {
  double p = 1.0;
  if (periodic_amplitude != 0.0)
    for (int i = 0; i < N; ++i) p *= std::cos(2.0 * pi * x[i]);
  return periodic_constant + periodic_amplitude * p;
}

double CoefficientSpec::decaying_part(double r) const {
  if (height == 0.0) return 0.0;
  switch (decay) {
    case DecayKind::none: return 0.0;
    case DecayKind::smoothed_ball: return height * smooth_step((r - radius) / width);
    case DecayKind::quadratic_cap: {
      const double t = r / radius;
      return height * std::max(0.0, 1.0 - t * t);
    }
    case DecayKind::quartic_cap: {
      const double t = r / radius;
      return height * std::max(0.0, 1.0 - t * t * t * t);
    }
    case DecayKind::gaussian: {
      const double t = r / width;
      return height * std::exp(-t * t);
    }
  }
  return 0.0;
}

double CoefficientSpec::at(const double* x, int N) const {
  double r2 = 0.0;
  for (int i = 0; i < N; ++i) r2 += x[i] * x[i];
  return periodic_part(x, N) + decaying_part(std::sqrt(r2));
}

double CoefficientSpec::at_radius(double r) const {
  if (!is_radial()) fail(ErrorKind::config, "periodic amplitude makes Q non-radial");
  return periodic_constant + decaying_part(r);
}

Field RadialDiscretization::sample(const CoefficientSpec& spec) const {
  Field q(size());
  for (int i = 0; i < size(); ++i) q[i] = spec.at_radius(grid_->nodes()[i]);
  return q;
}

RadialDiscretization::RadialDiscretization(GridPtr grid, KernelKind kernel)
    : grid_(grid), op_(grid, Kernel(kernel, grid->ctx()), true) {}

Coefficient make_coefficient(const CoefficientSpec& spec, const Discretization& disc) {
  spec.validate();
  Coefficient Q;
  Q.spec = spec;
  Q.sup_norm = spec.sup_norm();
  Q.disc = &disc;
  const bool constant = spec.periodic_amplitude == 0.0 && spec.height == 0.0;
  Q.kind = constant ? CoefficientKind::constant
                    : (disc.backend() == "radial" ? CoefficientKind::radial_profile
                                                  : CoefficientKind::cartesian_samples);
  Q.values = disc.sample(spec);
  CoefficientSpec per = spec, dec = spec;
  per.height = 0.0;
  dec.periodic_constant = 0.0;
  dec.periodic_amplitude = 0.0;
  Q.periodic = per.height == 0.0 && per.sup_norm() == 0.0 ? Field(disc.size(), 0.0)
                                                           : disc.sample(per);
  if (dec.height == 0.0) {
    Q.decaying.assign(disc.size(), 0.0);
  } else {
    Q.decaying = disc.sample(dec);
  }
  Q.root.resize(Q.values.size());
  const double e = 1.0 / disc.ctx().two_star;
  for (size_t i = 0; i < Q.values.size(); ++i) {
    const double q = Q.values[i];
    if (!(q >= 0.0)) fail(ErrorKind::config, "coefficient negative at a sample point");
    if (std::abs(Q.periodic[i] + Q.decaying[i] - q) > 1e-12 * std::max(1.0, q))
      fail(ErrorKind::numeric, "coefficient split does not add up");
    Q.root[i] = std::pow(q, e);
  }
  return Q;
}

// ---------------------------------------------------------------- functional

double field_norm(const Discretization& disc, const Field& f, double p) {
  check_size(disc, f);
  if (!(p >= 1.0)) fail(ErrorKind::domain, "norm exponent must be >= 1");
  const auto& mu = disc.measure();
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += mu[i] * std::pow(std::abs(f[i]), p);
  return std::pow(s, 1.0 / p);
}

double field_inner(const Discretization& disc, const Field& f, const Field& g) {
  check_size(disc, f);
  check_size(disc, g);
  const auto& mu = disc.measure();
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += mu[i] * f[i] * g[i];
  return s;
}

Field a_q_apply(const Coefficient& Q, const Discretization& disc, const Field& v) {
  check_backend(Q, disc);
  check_size(disc, v);
  Field w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[i] = Q.root[i] * v[i];
  Field out = disc.convolve(w);
  for (size_t i = 0; i < v.size(); ++i) out[i] *= Q.root[i];
  return out;
}

double a_q_form(const Coefficient& Q, const Discretization& disc, const Field& v) {
  return field_inner(disc, v, a_q_apply(Q, disc, v));
}

double j_q(const Coefficient& Q, const Discretization& disc, const Field& v) {
  const double p = disc.ctx().two_plus;
  return std::pow(field_norm(disc, v, p), p) / p - 0.5 * a_q_form(Q, disc, v);
}

Field j_q_grad(const Coefficient& Q, const Discretization& disc, const Field& v) {
  const double p = disc.ctx().two_plus;
  Field g = a_q_apply(Q, disc, v);
  for (size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    const double nl = a == 0.0 ? 0.0 : std::copysign(std::pow(a, p - 1.0), v[i]);
    g[i] = nl - g[i];
  }
  return g;
}

double t_projection(const Coefficient& Q, const Discretization& disc, const Field& v) {
  const double p = disc.ctx().two_plus;
  const double b = a_q_form(Q, disc, v);
  if (!(b > 0.0))
    fail(ErrorKind::projection, "quadratic form int v A_Q v = " + fmt(b) + " is not positive");
  const double a = std::pow(field_norm(disc, v, p), p);
  return std::pow(a / b, 1.0 / (2.0 - p));
}

double mp_upper_bound(const Coefficient& Q, const Discretization& disc, const Field& v) {
  const auto& ctx = disc.ctx();
  const double b = a_q_form(Q, disc, v);
  if (!(b > 0.0))
    fail(ErrorKind::projection, "quadratic form int v A_Q v = " + fmt(b) + " is not positive");
  const double n2 = std::pow(field_norm(disc, v, ctx.two_plus), 2);
  return std::pow(n2 / b, 0.5 * ctx.N) / ctx.N;
}

DualState evaluate_state(const Coefficient& Q, const Discretization& disc, Field v) {
  const double p = disc.ctx().two_plus;
  DualState s;
  const Field Av = a_q_apply(Q, disc, v);
  s.norm_2plus = field_norm(disc, v, p);
  s.quadform_AQ = field_inner(disc, v, Av);
  s.energy = std::pow(s.norm_2plus, p) / p - 0.5 * s.quadform_AQ;
  Field r(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    r[i] = (a == 0.0 ? 0.0 : std::copysign(std::pow(a, p - 1.0), v[i])) - Av[i];
  }
  s.residual = field_norm(disc, r, p);
  s.v = std::move(v);
  return s;
}

// ---------------------------------------------------------------- Sobolev constant

double u1_profile(int N, double r) {
  return std::pow(N * (N - 2.0), 0.25 * (N - 2)) * std::pow(1.0 + r * r, -0.5 * (N - 2));
}

SobolevReport sobolev_report(const DimensionContext& ctx) {
  const int N = ctx.N;
  PanelSpec spec;
  spec.max_panel_length = std::numeric_limits<double>::infinity();
  const auto grid = make_grid(ctx, 1e12, spec);
  const double A = std::pow(N * (N - 2.0), 0.25 * (N - 2));
  double norm = 0.0, grad = 0.0;
  for (int i = 0; i < grid->size(); ++i) {
    const double r = grid->nodes()[i];
    const double mu = grid->volume_weights()[i];
    norm += mu * std::pow(u1_profile(N, r), ctx.two_star);
    const double du = -A * (N - 2.0) * r * std::pow(1.0 + r * r, -0.5 * N);
    grad += mu * du * du;
  }
  SobolevReport rep;
  rep.N = N;
  rep.from_norm = std::pow(norm, 2.0 / N);
  rep.from_gradient = std::pow(grad, 2.0 / N);
  rep.relative_gap = std::abs(rep.from_norm - rep.from_gradient) / rep.from_norm;
  return rep;
}

double sobolev_constant(const DimensionContext& ctx) {
  static const auto table = [] {
    std::array<double, DimensionContext::max_dim + 1> t{};
    for (int N = DimensionContext::min_dim; N <= DimensionContext::max_dim; ++N)
      t[N] = sobolev_report(DimensionContext(N)).from_norm;
    return t;
  }();
  return table[ctx.N];
}

double l_q_star(double sup_norm, const DimensionContext& ctx) {
  if (!(sup_norm > 0.0)) fail(ErrorKind::domain, "L_Q* needs |Q|_inf > 0");
  const double S = sobolev_constant(ctx);
  return std::pow(S, 0.5 * ctx.N) / (ctx.N * std::pow(sup_norm, 0.5 * (ctx.N - 2)));
}

double l_q_star(const Coefficient& Q, const DimensionContext& ctx) {
  return l_q_star(Q.sup_norm, ctx);
}

// ---------------------------------------------------------------- flatness

std::vector<double> default_flatness_radii() {
  std::vector<double> r;
  for (double x = 1e-1; x >= 1e-6 * (1 - 1e-12); x *= 0.5) r.push_back(x);
  return r;
}

FlatnessReport flatness_check(const CoefficientSpec& Q, int N, const std::vector<double>& x0,
                              const std::vector<double>& radii) {
  if (static_cast<int>(x0.size()) != N) fail(ErrorKind::config, "x0 must have N coordinates");
  if (radii.size() < 3) fail(ErrorKind::config, "flatness check needs at least three radii");
  Q.validate();
  const double q0 = Q.at(x0.data(), N);
  if (std::abs(q0 - Q.sup_norm()) > 1e-12 * std::max(1.0, Q.sup_norm()))
    fail(ErrorKind::precondition, "Q(x0) = " + fmt(q0) + " is not the maximum " + fmt(Q.sup_norm()));

  // probe directions: first axis, main diagonal, an anti-diagonal pair
  std::vector<std::vector<double>> dirs(3, std::vector<double>(N, 0.0));
  dirs[0][0] = 1.0;
  for (int i = 0; i < N; ++i) dirs[1][i] = 1.0 / std::sqrt(static_cast<double>(N));
  dirs[2][0] = dirs[2][1] = 0.0;
  dirs[2][0] = 1.0 / std::sqrt(2.0);
  dirs[2][1] = -1.0 / std::sqrt(2.0);

  FlatnessReport rep;
  rep.radii = radii;
  std::vector<double> x(N);
  for (double r : radii) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) {
      for (int i = 0; i < N; ++i) x[i] = x0[i] + r * d[i];
      worst = std::max(worst, (q0 - Q.at(x.data(), N)) / (r * r));
    }
    rep.ratios.push_back(worst);
  }

  const size_t n = rep.ratios.size();
  const size_t tail = std::min<size_t>(5, n);
  rep.limsup = *std::max_element(rep.ratios.end() - tail, rep.ratios.end());

  // least squares rho = L + c r over the six smallest radii
  const size_t m = std::min<size_t>(6, n);
  double sr = 0, sy = 0, srr = 0, sry = 0;
  for (size_t k = n - m; k < n; ++k) {
    sr += radii[k];
    sy += rep.ratios[k];
    srr += radii[k] * radii[k];
    sry += radii[k] * rep.ratios[k];
  }
  const double det = m * srr - sr * sr;
  rep.limit_estimate = det != 0.0 ? (srr * sy - sr * sry) / det : sy / m;

  const double r_min = *std::min_element(radii.begin(), radii.end());
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * q0 / (r_min * r_min);
  const double peak = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  const double head = *std::max_element(rep.ratios.begin(), rep.ratios.begin() + n / 2);
  rep.little_o = std::abs(rep.limit_estimate) <= 1e-2 * std::max(peak, 0.0) + roundoff &&
                 rep.limsup <= 1e-1 * std::max(head, 0.0) + roundoff;
  rep.big_o = rep.limsup <= 10.0 * std::max(head, 0.0) + roundoff;
  return rep;
}

}  // namespace dualhelm
