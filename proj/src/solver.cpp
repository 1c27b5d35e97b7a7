// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include "dualhelm/solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>

#include "dualhelm/error.hpp"
#include "dualhelm/format.hpp"
#include "dualhelm/instanton.hpp"

namespace dualhelm {

namespace {

constexpr double pi = std::numbers::pi;

// FFTW's planner is not thread safe
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double j_normalized(const DimensionContext& ctx, double t) {
  return 1.0 + bessel_j_normalized_minus_one(ctx.nu, t);
}

// 2 sin^2(x D / 2) / x, continuous at x = 0
double versine_ratio(double x, double D) {
  if (x == 0.0) return 0.0;
  const double s = std::sin(0.5 * x * D);
  return 2.0 * s * s / x;
}

std::vector<double> multiplier_batch(const DimensionContext& ctx, double D,
                                     const std::vector<double>& rhos) {
  double rho_max = 0.0;
  for (double r : rhos) rho_max = std::max(rho_max, r);
  PanelSpec s;
  s.inner_radius = std::min(1e-3, 0.1 * D);
  s.max_panel_length = std::min(pi / 4, 1.5 / std::max(rho_max, 1e-300));
  const auto g = make_grid(ctx, D, s);
  std::vector<double> base(g->size());
  for (int i = 0; i < g->size(); ++i) base[i] = g->volume_weights()[i] * psi(ctx, g->nodes()[i]);
  std::vector<double> out(rhos.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (size_t k = 0; k < rhos.size(); ++k) {
    double acc = 0.0;
    for (int i = 0; i < g->size(); ++i) acc += base[i] * j_normalized(ctx, rhos[k] * g->nodes()[i]);
    out[k] = acc;
  }
  return out;
}

double pow_signed(double x, double e) {
  const double a = std::abs(x);
  return a == 0.0 ? 0.0 : std::copysign(std::pow(a, e), x);
}

}  // namespace

// ---------------------------------------------------------------- multipliers

const char* to_string(MultiplierKind k) noexcept {
  switch (k) {
    case MultiplierKind::truncated_kernel: return "truncated_kernel";
    case MultiplierKind::regularized_pv: return "regularized_pv";
    case MultiplierKind::laplace_periodic: return "laplace_periodic";
  }
  return "truncated_kernel";
}

MultiplierKind multiplier_kind_from_string(const std::string& name) {
  for (auto k : {MultiplierKind::truncated_kernel, MultiplierKind::regularized_pv,
                 MultiplierKind::laplace_periodic})
    if (name == to_string(k)) return k;
  fail(ErrorKind::config, "unknown multiplier '" + name + "'");
}

double truncated_multiplier(const DimensionContext& ctx, double D, double rho) {
  if (!(D > 0.0) || !(rho >= 0.0)) fail(ErrorKind::domain, "need D > 0 and rho >= 0");
  if (ctx.N != 3) return truncated_multiplier_quadrature(ctx, D, rho);
  // (1/rho) int_0^D cos r sin(rho r) dr
  if (rho == 0.0) return D * std::sin(D) + std::cos(D) - 1.0;
  return 0.5 / rho * (versine_ratio(rho + 1.0, D) + versine_ratio(rho - 1.0, D));
}

double truncated_multiplier_quadrature(const DimensionContext& ctx, double D, double rho) {
  if (!(D > 0.0) || !(rho >= 0.0)) fail(ErrorKind::domain, "need D > 0 and rho >= 0");
  return multiplier_batch(ctx, D, {rho})[0];
}

// ---------------------------------------------------------------- Cartesian backend

CartesianDiscretization::CartesianDiscretization(const DimensionContext& ctx, const CartesianSpec& spec)
    : ctx_(ctx), spec_(spec) {
  const int N = ctx.N, M = spec.points;
  if (N != 3 && N != 4) fail(ErrorKind::config, "the Cartesian backend supports N = 3, 4 only");
  if (M < 16 || !std::has_single_bit(static_cast<unsigned>(M)))
    fail(ErrorKind::config, "points per axis must be a power of two >= 16, got " + std::to_string(M));
  if (!(spec.half_width > 0.0) || !std::isfinite(spec.half_width))
    fail(ErrorKind::config, "box half-width must be positive");
  if (!(spec.pv_factor > 0.0)) fail(ErrorKind::config, "pv factor must be positive");
  if (std::pow(double(M), N) > 1 << 26) fail(ErrorKind::config, "grid too large");

  const double L = spec.half_width;
  n_ = 1;
  for (int d = 0; d < N; ++d) n_ *= M;
  n_half_ = n_ / M * (M / 2 + 1);
  h_ = 2.0 * L / M;
  delta_ = spec.pv_factor * pi / L;
  measure_.assign(n_, std::pow(h_, N));

  // |k|^2 for each half-spectrum entry, then the multiplier per distinct value
  std::vector<int> k2(n_half_);
  for (int idx = 0; idx < n_half_; ++idx) {
    int rest = idx, sum = 0;
    const int j_last = rest % (M / 2 + 1);
    rest /= M / 2 + 1;
    sum += j_last * j_last;
    for (int d = 0; d < N - 1; ++d) {
      int j = rest % M;
      rest /= M;
      if (j >= M / 2) j -= M;
      sum += j * j;
    }
    k2[idx] = sum;
  }
  std::map<int, double> table;
  for (int v : k2) table.emplace(v, 0.0);
  std::vector<double> rhos;
  for (auto& [v, m] : table) rhos.push_back(pi / L * std::sqrt(double(v)));
  std::vector<double> values(rhos.size());
  switch (spec.multiplier) {
    case MultiplierKind::truncated_kernel:
      if (N == 3) {
        for (size_t i = 0; i < rhos.size(); ++i) values[i] = truncated_multiplier(ctx, L, rhos[i]);
      } else {
        values = multiplier_batch(ctx, L, rhos);
      }
      break;
    case MultiplierKind::regularized_pv:
      for (size_t i = 0; i < rhos.size(); ++i) {
        const double a = rhos[i] * rhos[i] - 1.0;
        values[i] = a / (a * a + delta_ * delta_);
        if (std::abs(a) < 0.1 * delta_) warning_ = true;
      }
      break;
    case MultiplierKind::laplace_periodic:
      for (size_t i = 0; i < rhos.size(); ++i) values[i] = rhos[i] == 0.0 ? 0.0 : 1.0 / (rhos[i] * rhos[i]);
      break;
  }
  size_t i = 0;
  for (auto& [v, m] : table) m = values[i++];
  mult_.resize(n_half_);
  for (int idx = 0; idx < n_half_; ++idx) mult_[idx] = table[k2[idx]];

  std::vector<int> dims(N, M);
  std::lock_guard<std::mutex> lock(planner_mutex());
  double* in = fftw_alloc_real(n_);
  fftw_complex* out = fftw_alloc_complex(n_half_);
  forward_ = fftw_plan_dft_r2c(N, dims.data(), in, out, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_c2r(N, dims.data(), out, in, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (!forward_ || !backward_) fail(ErrorKind::numeric, "FFTW planning failed");
}

CartesianDiscretization::~CartesianDiscretization() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void CartesianDiscretization::coordinates(int index, double* x) const {
  const int M = spec_.points;
  for (int d = ctx_.N - 1; d >= 0; --d) {
    x[d] = -spec_.half_width + (index % M) * h_;
    index /= M;
  }
}

double CartesianDiscretization::radius(int index) const {
  double x[4], r2 = 0.0;
  coordinates(index, x);
  for (int d = 0; d < ctx_.N; ++d) r2 += x[d] * x[d];
  return std::sqrt(r2);
}

Field CartesianDiscretization::sample(const CoefficientSpec& spec) const {
  Field q(n_);
  double x[4];
  for (int i = 0; i < n_; ++i) {
    coordinates(i, x);
    q[i] = spec.at(x, ctx_.N);
  }
  return q;
}

namespace {

struct FftBuffers {
  double* real;
  fftw_complex* spec;
  FftBuffers(int n, int nh) : real(fftw_alloc_real(n)), spec(fftw_alloc_complex(nh)) {}
  ~FftBuffers() {
    fftw_free(real);
    fftw_free(spec);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
};

}  // namespace

Field CartesianDiscretization::convolve(const Field& f) const {
  if (static_cast<int>(f.size()) != n_) fail(ErrorKind::shape, "field size does not match the box");
  FftBuffers b(n_, n_half_);
  std::copy(f.begin(), f.end(), b.real);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), b.real, b.spec);
  const double scale = 1.0 / n_;
  for (int k = 0; k < n_half_; ++k) {
    const double m = mult_[k] * scale;
    b.spec[k][0] *= m;
    b.spec[k][1] *= m;
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), b.spec, b.real);
  return Field(b.real, b.real + n_);
}

Field CartesianDiscretization::round_trip(const Field& f) const {
  if (static_cast<int>(f.size()) != n_) fail(ErrorKind::shape, "field size does not match the box");
  FftBuffers b(n_, n_half_);
  std::copy(f.begin(), f.end(), b.real);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), b.real, b.spec);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), b.spec, b.real);
  Field out(b.real, b.real + n_);
  for (double& x : out) x /= n_;
  return out;
}

double CartesianDiscretization::spectral_energy(const Field& f) const {
  if (static_cast<int>(f.size()) != n_) fail(ErrorKind::shape, "field size does not match the box");
  FftBuffers b(n_, n_half_);
  std::copy(f.begin(), f.end(), b.real);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), b.real, b.spec);
  const int H = spec_.points / 2 + 1;
  double acc = 0.0;
  for (int k = 0; k < n_half_; ++k) {
    const int j = k % H;
    const double w = (j == 0 || j == H - 1) ? 1.0 : 2.0;
    acc += w * (b.spec[k][0] * b.spec[k][0] + b.spec[k][1] * b.spec[k][1]);
  }
  return acc / n_;
}

Field resolvent_apply(const Discretization& disc, const Field& f) {
  if (static_cast<int>(f.size()) != disc.size()) fail(ErrorKind::shape, "field size mismatch");
  return disc.convolve(f);
}

// ---------------------------------------------------------------- fixed point

const char* to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::stalled: return "stalled";
  }
  return "max_iter";
}

namespace {

struct Iterate {
  Field v;
  Field Av;
  double rel = 0;  // relative residual
};

Iterate make_iterate(const Coefficient& Q, const Discretization& d, Field v) {
  const double p = d.ctx().two_plus;
  Iterate it;
  it.Av = a_q_apply(Q, d, v);
  Field r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = pow_signed(v[i], p - 1.0) - it.Av[i];
  it.rel = field_norm(d, r, p) / std::pow(field_norm(d, v, p), p - 1.0);
  it.v = std::move(v);
  return it;
}

bool project(const Coefficient& Q, const Discretization& d, Field& v) {
  if (!(a_q_form(Q, d, v) > 0.0)) return false;
  const double t = t_projection(Q, d, v);
  for (double& x : v) x *= t;
  return true;
}

}  // namespace

SolveReport fixed_point_solve(const Coefficient& Q, const Discretization& d, const Field& init,
                              const SolveParams& prm) {
  if (prm.max_iter < 0 || !(prm.tol > 0.0) || !(prm.damping > 0.0) || prm.damping > 1.0 ||
      prm.max_backtracks < 0)
    fail(ErrorKind::config, "solve parameters: max_iter >= 0, tol > 0, damping in (0, 1]");
  if (static_cast<int>(init.size()) != d.size()) fail(ErrorKind::shape, "init size mismatch");
  if (std::all_of(init.begin(), init.end(), [](double x) { return x == 0.0; }))
    fail(ErrorKind::degenerate_init, "initial field is zero");
  Field v0 = init;
  if (!project(Q, d, v0))
    fail(ErrorKind::degenerate_init, "initial field has int v A_Q v <= 0");

  const double ts = d.ctx().two_star;
  SolveReport rep;
  Iterate cur = make_iterate(Q, d, std::move(v0));
  rep.residual_history.push_back(cur.rel);
  rep.status = SolveStatus::max_iter;
  for (int it = 0; it < prm.max_iter; ++it) {
    if (cur.rel < prm.tol) {
      rep.status = SolveStatus::converged;
      break;
    }
    Field w(cur.Av.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = pow_signed(cur.Av[i], ts - 1.0);
    if (!project(Q, d, w)) {
      rep.status = SolveStatus::stalled;
      break;
    }
    double theta = prm.damping;
    bool accepted = false;
    for (int b = 0; b <= prm.max_backtracks; ++b, theta *= 0.5) {
      Field c(w.size());
      for (size_t i = 0; i < c.size(); ++i) c[i] = (1.0 - theta) * cur.v[i] + theta * w[i];
      if (!project(Q, d, c)) continue;
      Iterate next = make_iterate(Q, d, std::move(c));
      if (next.rel < cur.rel) {
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.status = SolveStatus::stalled;
      break;
    }
    ++rep.iterations;
    rep.residual_history.push_back(cur.rel);
  }
  if (rep.status == SolveStatus::max_iter && cur.rel < prm.tol) rep.status = SolveStatus::converged;
  rep.converged = rep.status == SolveStatus::converged;
  rep.final_state = evaluate_state(Q, d, cur.v);
  rep.energy = rep.final_state.energy;
  rep.mp_bound = mp_upper_bound(Q, d, cur.v);
  const double p = d.ctx().two_plus;
  rep.energy_identity_gap = std::abs(rep.energy - std::pow(rep.final_state.norm_2plus, p) / d.ctx().N);
  return rep;
}

Reconstruction reconstruct_u(const Coefficient& Q, const Discretization& d, const Field& v) {
  if (static_cast<int>(v.size()) != d.size()) fail(ErrorKind::shape, "field size mismatch");
  Field w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[i] = Q.root[i] * v[i];
  Reconstruction r;
  r.u = d.convolve(w);
  r.norm_2star = field_norm(d, r.u, d.ctx().two_star);
  return r;
}

std::vector<double> reconstruct_u_at(const Coefficient& Q, const RadialDiscretization& d,
                                     const Field& v, const std::vector<double>& radii) {
  if (static_cast<int>(v.size()) != d.size()) fail(ErrorKind::shape, "field size mismatch");
  RadialFunction w(d.grid(), v);
  for (int i = 0; i < d.size(); ++i) w.values[i] *= Q.root[i];
  const Kernel K(KernelKind::psi, d.ctx());
  std::vector<double> out(radii.size());
  for (size_t k = 0; k < radii.size(); ++k) out[k] = convolve_at(w, K, radii[k]);
  return out;
}

// ---------------------------------------------------------------- far field

FarfieldFit farfield_fit(const DimensionContext& ctx, const std::vector<double>& radii,
                         const std::vector<double>& values, double source_radius) {
  if (radii.size() != values.size()) fail(ErrorKind::shape, "radii and values differ in length");
  if (radii.size() < 3) fail(ErrorKind::window, "need at least 3 samples");
  for (double r : radii)
    if (!(r > source_radius))
      fail(ErrorKind::window, "radius " + fmt(r) + " is inside the source support " + fmt(source_radius));
  const double e = 0.5 * (ctx.N - 1);
  double cc = 0, cs = 0, ss = 0, yc = 0, ys = 0;
  std::vector<double> y(radii.size());
  for (size_t i = 0; i < radii.size(); ++i) {
    y[i] = values[i] * std::pow(radii[i], e);
    const double c = std::cos(radii[i]), s = std::sin(radii[i]);
    cc += c * c;
    cs += c * s;
    ss += s * s;
    yc += y[i] * c;
    ys += y[i] * s;
  }
  const double det = cc * ss - cs * cs;
  if (!(std::abs(det) > 1e-12 * cc * ss)) fail(ErrorKind::window, "radii do not separate cos and sin");
  const double a = (yc * ss - ys * cs) / det, b = (ys * cc - yc * cs) / det;
  FarfieldFit f;
  f.samples = static_cast<int>(radii.size());
  f.amplitude = std::hypot(a, b);
  f.phase = f.amplitude == 0.0 ? 0.0 : std::atan2(-b, a);
  double res = 0;
  for (size_t i = 0; i < radii.size(); ++i) {
    const double d = y[i] - a * std::cos(radii[i]) - b * std::sin(radii[i]);
    res += d * d;
  }
  f.rms_error = std::sqrt(res / radii.size());
  return f;
}

// ---------------------------------------------------------------- N = 3 probe

std::vector<double> default_probe_eps() { return {1e-2, 1e-3, 1e-4, 1e-5}; }

N3ProbeReport n3_nonexistence_probe(const CoefficientSpec& Q, const std::vector<double>& eps_list,
                                    double alpha) {
  const DimensionContext ctx(3);
  Q.validate();
  if (eps_list.empty()) fail(ErrorKind::config, "empty eps list");
  N3ProbeReport rep;
  const double ts = ctx.two_star;
  for (double eps : eps_list) {
    const InstantonParams p{eps, alpha};
    const auto c = bilinear_decomposition(Q, p, ctx);
    N3ProbeRow row;
    row.eps = eps;
    row.upper_bound = c.upper_bound;
    row.error_bar = c.error_bar;
    row.l_star = c.l_star;
    PanelSpec s;
    s.inner_radius = 1e-3 * std::sqrt(eps);
    s.nodes_per_panel = 24;
    for (int k = 0; k < 8; ++k) s.breakpoints.push_back(alpha * (1 + k / 8.0));
    const auto g = make_grid(ctx, 2 * alpha, s);
    auto w = cutoff_family(p, g);
    for (int i = 0; i < g->size(); ++i) w.values[i] *= std::pow(Q.at_radius(g->nodes()[i]), 1.0 / ts);
    row.form_psi = quadform(w, w, Kernel(KernelKind::psi, ctx));
    row.form_lambda = quadform(w, w, Kernel(KernelKind::lambda, ctx));
    rep.rows.push_back(row);
  }
  std::vector<N3ProbeRow> by_eps = rep.rows;
  std::sort(by_eps.begin(), by_eps.end(), [](auto& a, auto& b) { return a.eps > b.eps; });
  rep.decreasing = true;
  for (size_t i = 1; i < by_eps.size(); ++i)
    rep.decreasing = rep.decreasing && by_eps[i].upper_bound < by_eps[i - 1].upper_bound;
  rep.above_threshold = std::all_of(rep.rows.begin(), rep.rows.end(),
                                    [](auto& r) { return r.upper_bound >= r.l_star - r.error_bar; });
  rep.forms_ordered =
      std::all_of(rep.rows.begin(), rep.rows.end(), [](auto& r) { return r.form_psi < r.form_lambda; });

  // int v_1 (Lambda - Psi) * v_1 on two resolutions; beyond R the pairing is
  // bounded by 2 int v |Psi - Lambda| * v <= 4 int_{r>R} u_1^{2*} <= 4 omega 3^{3/2} R^{-3}
  const double R = 60.0;
  double val[2];
  int q[2] = {16, 24};
  for (int k = 0; k < 2; ++k) {
    PanelSpec s;
    s.nodes_per_panel = q[k];
    const auto g = make_grid(ctx, R, s);
    const auto v = RadialFunction::sample(g, [&](double r) { return v_instanton(ctx, 1.0, r); });
    val[k] = -quadform(v, v, Kernel(KernelKind::psi_minus_lambda, ctx));
  }
  rep.v1_margin = val[1];
  rep.v1_margin_error = std::abs(val[1] - val[0]) + 4.0 * ctx.omega_N * std::pow(3.0, 1.5) * std::pow(R, -3.0) +
                        64 * std::numeric_limits<double>::epsilon() * std::abs(val[1]);
  rep.v1_form_lambda = std::pow(sobolev_constant(ctx), 1.5);

  rep.kernel_samples = 10000;
  for (int i = 0; i < rep.kernel_samples; ++i) {
    const double r = std::pow(10.0, -4.0 + 7.0 * i / (rep.kernel_samples - 1));
    const double ratio = std::abs(psi(ctx, r)) / lambda_fn(ctx, r);
    rep.max_abs_psi_over_lambda = std::max(rep.max_abs_psi_over_lambda, ratio);
    if (ratio > 1.0 + 1e-12) ++rep.kernel_violations;
  }
  return rep;
}

// ---------------------------------------------------------------- checkpoints

void write_checkpoint(std::ostream& out, const nlohmann::json& meta, const Field& data) {
  nlohmann::json h = meta.is_object() ? meta : nlohmann::json::object();
  h["format"] = "dualhelm-field";
  h["version"] = 1;
  h["dtype"] = "float64-le";
  h["count"] = data.size();
  out << h.dump() << '\n';
  for (double x : data) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char b[8];
    std::memcpy(b, &bits, 8);
    out.write(b, 8);
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::config, "checkpoint: missing header");
  Checkpoint c;
  try {
    c.meta = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, std::string("checkpoint: bad header: ") + e.what());
  }
  if (!c.meta.is_object() || c.meta.value("format", "") != "dualhelm-field" ||
      c.meta.value("dtype", "") != "float64-le" || !c.meta.contains("count") ||
      !c.meta["count"].is_number_unsigned())
    fail(ErrorKind::config, "checkpoint: not a dualhelm field header");
  const auto n = c.meta["count"].get<std::size_t>();
  c.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    char b[8];
    if (!in.read(b, 8)) fail(ErrorKind::shape, "checkpoint: data ends after " + std::to_string(i) + " values");
    std::uint64_t bits;
    std::memcpy(&bits, b, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    c.data[i] = std::bit_cast<double>(bits);
  }
  return c;
}

void write_residual_csv(std::ostream& out, const SolveReport& rep) {
  out << "iteration,residual\n";
  for (size_t i = 0; i < rep.residual_history.size(); ++i) out << i << ',' << fmt(rep.residual_history[i]) << '\n';
}

}  // namespace dualhelm
