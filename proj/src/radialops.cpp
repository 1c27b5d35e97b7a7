// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include "dualhelm/radialops.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "dualhelm/error.hpp"
#include "dualhelm/format.hpp"

namespace dualhelm {

namespace {

constexpr double pi = std::numbers::pi;

void reference_rule(int q, std::vector<double>& x, std::vector<double>& w) {
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(q);
  if (table == nullptr) fail(ErrorKind::config, "cannot build a Gauss-Legendre rule of order " +
                                                     std::to_string(q));
  std::vector<std::pair<double, double>> pts(q);
  for (int i = 0; i < q; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &pts[i].first,
                                                            &pts[i].second, table);
  gsl_integration_glfixed_table_free(table);
  std::sort(pts.begin(), pts.end());
  x.resize(q);
  w.resize(q);
  for (int i = 0; i < q; ++i) {
    x[i] = pts[i].first;
    w[i] = pts[i].second;
  }
}

std::vector<double> auto_edges(double R, const PanelSpec& spec) {
  if (!(spec.inner_radius > 0.0)) fail(ErrorKind::config, "inner_radius must be positive");
  if (!(spec.geometric_ratio > 1.0)) fail(ErrorKind::config, "geometric_ratio must exceed 1");
  if (!(spec.max_panel_length > 0.0)) fail(ErrorKind::config, "max_panel_length must be positive");
  std::vector<double> e{0.0, std::min(spec.inner_radius, R)};
  while (e.back() < R) {
    const double cur = e.back();
    double next = std::min(cur * spec.geometric_ratio, cur + spec.max_panel_length);
    if (next >= R * (1.0 - 1e-13)) next = R;
    e.push_back(next);
  }
  for (double b : spec.breakpoints) {
    if (!(b > 0.0 && b < R)) continue;
    const auto it = std::lower_bound(e.begin(), e.end(), b);
    const bool dup = (it != e.end() && std::abs(*it - b) <= 1e-12 * b) ||
                     (it != e.begin() && std::abs(*(it - 1) - b) <= 1e-12 * b);
    if (!dup) e.insert(it, b);
  }
  return e;
}

double sphere_measure(int dim_minus_one) {
  // |S^{k}| for k = dim_minus_one - 1, i.e. the (N-2)-sphere when called with N-1
  const double n = dim_minus_one;
  return 2.0 * std::pow(pi, 0.5 * n) / specfun::gamma_fn(0.5 * n);
}

std::vector<double> zeros_of_y(specfun::Order nu, double lo, double hi) {
  std::vector<double> z;
  if (hi <= lo) return z;
  const double start = std::max(lo, 0.5 * specfun::first_zero(nu));
  const double step = 0.2;
  double a = start;
  double fa = specfun::bessel_y(nu, a);
  while (a < hi) {
    const double b = std::min(a + step, hi);
    const double fb = specfun::bessel_y(nu, b);
    if ((fa < 0) != (fb < 0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 100 && x1 - x0 > 1e-14 * x1; ++it) {
        const double mid = 0.5 * (x0 + x1);
        const double fm = specfun::bessel_y(nu, mid);
        if ((fm < 0) == (f0 < 0)) {
          x0 = mid;
          f0 = fm;
        } else {
          x1 = mid;
        }
      }
      const double root = 0.5 * (x0 + x1);
      if (root > lo && root < hi) z.push_back(root);
    }
    a = b;
    fa = fb;
  }
  return z;
}

}  // namespace

// ---------------------------------------------------------------- grid

GridPtr make_grid(const DimensionContext& ctx, double R_max, const PanelSpec& spec) {
  if (!(R_max > 0.0) || !std::isfinite(R_max))
    fail(ErrorKind::config, "R_max must be positive, got " + fmt(R_max));
  if (spec.nodes_per_panel < 1 || spec.nodes_per_panel > 200)
    fail(ErrorKind::config, "nodes_per_panel must lie in [1, 200]");

  std::vector<double> edges;
  if (!spec.edges.empty()) {
    edges = spec.edges;
    if (edges.size() < 2 || edges.front() != 0.0)
      fail(ErrorKind::config, "explicit edges must start at 0 and define a panel");
    for (size_t i = 1; i < edges.size(); ++i)
      if (!(edges[i] > edges[i - 1])) fail(ErrorKind::config, "explicit edges must increase");
    if (std::abs(edges.back() - R_max) > 1e-12 * R_max)
      fail(ErrorKind::config, "explicit edges must end at R_max");
    edges.back() = R_max;
  } else {
    edges = auto_edges(R_max, spec);
  }

  auto grid = std::shared_ptr<RadialGrid>(new RadialGrid(ctx));
  RadialGrid& g = *grid;
  g.q_ = spec.nodes_per_panel;
  g.edges_ = std::move(edges);
  reference_rule(g.q_, g.ref_nodes_, g.ref_weights_);
  g.bary_.assign(g.q_, 1.0);
  for (int j = 0; j < g.q_; ++j)
    for (int k = 0; k < g.q_; ++k)
      if (k != j) g.bary_[j] /= (g.ref_nodes_[j] - g.ref_nodes_[k]);

  const int P = g.panel_count();
  g.nodes_.reserve(static_cast<size_t>(P) * g.q_);
  for (int p = 0; p < P; ++p) {
    const double a = g.edges_[p], b = g.edges_[p + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int j = 0; j < g.q_; ++j) {
      g.nodes_.push_back(mid + half * g.ref_nodes_[j]);
      g.weights_.push_back(half * g.ref_weights_[j]);
    }
  }
  g.volume_weights_.resize(g.nodes_.size());
  for (size_t i = 0; i < g.nodes_.size(); ++i)
    g.volume_weights_[i] = ctx.surface() * g.weights_[i] * std::pow(g.nodes_[i], ctx.N - 1);
  return grid;
}

int RadialGrid::panel_of(double r) const {
  if (r < 0.0 || r > edges_.back()) return -1;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
  const int p = static_cast<int>(it - edges_.begin()) - 1;
  return std::min(p, panel_count() - 1);
}

bool RadialGrid::resolves_oscillation() const {
  for (int p = 0; p < panel_count(); ++p)
    if (edges_[p + 1] > 1.0 && edges_[p + 1] - edges_[p] > pi / 4 * (1 + 1e-12)) return false;
  return true;
}

void RadialGrid::gauss_points(double a, double b, std::vector<double>& x,
                              std::vector<double>& w) const {
  x.resize(q_);
  w.resize(q_);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int j = 0; j < q_; ++j) {
    x[j] = mid + half * ref_nodes_[j];
    w[j] = half * ref_weights_[j];
  }
}

void RadialGrid::lagrange_row(int panel, double x, double* out) const {
  const double a = edges_[panel], b = edges_[panel + 1];
  const double t = (2.0 * x - a - b) / (b - a);
  double denom = 0.0;
  for (int j = 0; j < q_; ++j) {
    const double d = t - ref_nodes_[j];
    if (d == 0.0) {
      std::fill(out, out + q_, 0.0);
      out[j] = 1.0;
      return;
    }
    out[j] = bary_[j] / d;
    denom += out[j];
  }
  for (int j = 0; j < q_; ++j) out[j] /= denom;
}

// ---------------------------------------------------------------- functions

RadialFunction::RadialFunction(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (!grid || static_cast<int>(values.size()) != grid->size())
    fail(ErrorKind::shape, "values do not match the grid");
}

RadialFunction RadialFunction::sample(GridPtr g, const std::function<double(double)>& f) {
  std::vector<double> v(g->size());
  for (int i = 0; i < g->size(); ++i) v[i] = f(g->nodes()[i]);
  return RadialFunction(std::move(g), std::move(v));
}

RadialFunction RadialFunction::zeros(GridPtr g) {
  std::vector<double> v(g->size(), 0.0);
  return RadialFunction(std::move(g), std::move(v));
}

double RadialFunction::operator()(double r) const {
  if (r < 0.0) fail(ErrorKind::domain, "negative radius");
  const int p = grid->panel_of(r);
  if (p < 0) return 0.0;
  const int q = grid->nodes_per_panel();
  std::vector<double> L(q);
  grid->lagrange_row(p, r, L.data());
  double s = 0.0;
  for (int j = 0; j < q; ++j) s += L[j] * values[static_cast<size_t>(p) * q + j];
  return s;
}

void require_same_grid(const RadialFunction& a, const RadialFunction& b) {
  if (!a.grid || a.grid != b.grid) fail(ErrorKind::shape, "functions live on different grids");
}

double inner(const RadialFunction& f, const RadialFunction& g) {
  require_same_grid(f, g);
  const auto& vw = f.grid->volume_weights();
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += vw[i] * f.values[i] * g.values[i];
  return s;
}

double integral(const RadialFunction& f) {
  const auto& vw = f.grid->volume_weights();
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += vw[i] * f.values[i];
  return s;
}

double lp_norm(const RadialFunction& f, double p) {
  if (!(p >= 1.0)) fail(ErrorKind::domain, "lp_norm needs p >= 1, got " + fmt(p));
  const auto& vw = f.grid->volume_weights();
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += vw[i] * std::pow(std::abs(f.values[i]), p);
  return std::pow(s, 1.0 / p);
}

// ---------------------------------------------------------------- Newton potential

namespace {

struct PanelMoments {
  std::vector<double> mass;  // int_panel f s^{N-1}
  std::vector<double> pot;   // int_panel f s^{N-1} Lambda(s)
};

PanelMoments panel_moments(const RadialFunction& f) {
  const RadialGrid& g = *f.grid;
  const auto& ctx = g.ctx();
  const int P = g.panel_count(), q = g.nodes_per_panel();
  PanelMoments m{std::vector<double>(P, 0.0), std::vector<double>(P, 0.0)};
  for (int p = 0; p < P; ++p) {
    for (int j = 0; j < q; ++j) {
      const int i = p * q + j;
      const double s = g.nodes()[i];
      const double c = g.weights()[i] * std::pow(s, ctx.N - 1) * f.values[i];
      m.mass[p] += c;
      m.pot[p] += c * lambda_fn(ctx, s);
    }
  }
  return m;
}

// int_a^b f s^{N-1} (Lambda(s))^{with_lambda} ds over a sub-interval of panel p
double partial_moment(const RadialFunction& f, int p, double a, double b, bool with_lambda) {
  if (b <= a) return 0.0;
  const RadialGrid& g = *f.grid;
  const auto& ctx = g.ctx();
  const int q = g.nodes_per_panel();
  std::vector<double> x, w, L(q);
  g.gauss_points(a, b, x, w);
  double s = 0.0;
  for (int k = 0; k < q; ++k) {
    g.lagrange_row(p, x[k], L.data());
    double fx = 0.0;
    for (int j = 0; j < q; ++j) fx += L[j] * f.values[static_cast<size_t>(p) * q + j];
    double c = w[k] * std::pow(x[k], ctx.N - 1) * fx;
    if (with_lambda) c *= lambda_fn(ctx, x[k]);
    s += c;
  }
  return s;
}

double potential_from_moments(const RadialFunction& f, const PanelMoments& m, double r) {
  const RadialGrid& g = *f.grid;
  const auto& ctx = g.ctx();
  const int P = g.panel_count();
  if (r >= g.r_max()) {
    const double mass = std::accumulate(m.mass.begin(), m.mass.end(), 0.0);
    return ctx.surface() * lambda_fn(ctx, r) * mass;
  }
  const int p = g.panel_of(r);
  double inner_mass = 0.0, outer_pot = 0.0;
  for (int k = 0; k < p; ++k) inner_mass += m.mass[k];
  for (int k = p + 1; k < P; ++k) outer_pot += m.pot[k];
  inner_mass += partial_moment(f, p, g.edges()[p], r, false);
  outer_pot += partial_moment(f, p, r, g.edges()[p + 1], true);
  return ctx.surface() * (lambda_fn(ctx, r) * inner_mass + outer_pot);
}

}  // namespace

PotentialResult newton_potential(const RadialFunction& f) {
  const RadialGrid& g = *f.grid;
  const PanelMoments m = panel_moments(f);
  PotentialResult res{RadialFunction::zeros(f.grid), false};
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.size(); ++i) res.value.values[i] = potential_from_moments(f, m, g.nodes()[i]);

  // decay check on the last panel: |f| r^2 should be negligible there
  double peak = 0.0, tail = 0.0;
  const int q = g.nodes_per_panel();
  for (int i = 0; i < g.size(); ++i) {
    const double r = g.nodes()[i];
    const double v = std::abs(f.values[i]) * r * r;
    peak = std::max(peak, v);
    if (i >= g.size() - q) tail = std::max(tail, v);
  }
  res.convergence_warning = peak > 0.0 && tail > 1e-6 * peak;
  return res;
}

double newton_potential_at(const RadialFunction& f, double r) {
  if (!(r > 0.0)) fail(ErrorKind::domain, "radius must be positive");
  return potential_from_moments(f, panel_moments(f), r);
}

// ---------------------------------------------------------------- kernels

const char* to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::psi: return "psi";
    case KernelKind::lambda: return "lambda";
    case KernelKind::abs_psi: return "abs_psi";
    case KernelKind::psi_minus_lambda: return "psi_minus_lambda";
    case KernelKind::unit: return "unit";
  }
  return "psi";
}

double Kernel::operator()(double d) const {
  switch (kind_) {
    case KernelKind::psi: return psi(ctx_, d);
    case KernelKind::lambda: return lambda_fn(ctx_, d);
    case KernelKind::abs_psi: return std::abs(psi(ctx_, d));
    case KernelKind::psi_minus_lambda: return psi_minus_lambda(ctx_, d);
    case KernelKind::unit: return 1.0;
  }
  return 0.0;
}

std::vector<double> Kernel::breakpoints(double lo, double hi) const {
  if (kind_ != KernelKind::abs_psi || hi <= lo) return {};
  if (ctx_.N == 3) {
    std::vector<double> z;
    double k = std::ceil((lo - pi / 2) / pi);
    if (k < 0) k = 0;
    for (double x = pi / 2 + k * pi; x < hi; x += pi)
      if (x > lo) z.push_back(x);
    return z;
  }
  return zeros_of_y(ctx_.nu, lo, hi);
}

double angular_average(const Kernel& K, double r, double s) {
  if (!(r > 0.0) || !(s > 0.0)) fail(ErrorKind::domain, "radii must be positive");
  const int N = K.ctx().N;
  const double R = std::max(r, s), m = std::min(r, s), delta = R - m;

  auto integrand = [&](double phi) {
    const double sp = std::sin(phi);
    const double sh = std::sin(0.5 * phi);
    const double rho = delta + 2.0 * m * sh * sh;  // R - m cos(phi) without cancellation
    if (!(rho > 0.0)) return 0.0;
    const double P = std::sqrt((rho + delta) * (rho + R + m));
    const double sin_theta = sp * P / (2.0 * R);
    return K(rho) * rho * sp * std::pow(sin_theta, N - 3) / R;
  };

  std::vector<double> cuts{0.0};
  const double layer = std::sqrt(std::max(delta, 1e-300) / m);
  if (layer < 0.5) {
    for (double phi = std::max(layer, 1e-8); phi < pi; phi *= 2.0) cuts.push_back(phi);
  }
  for (double z : K.breakpoints(delta, R + m)) {
    const double c = std::clamp((R - z) / m, -1.0, 1.0);
    cuts.push_back(std::acos(c));
  }
  cuts.push_back(pi);
  std::sort(cuts.begin(), cuts.end());

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double total = 0.0;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] - cuts[k] <= 0.0) continue;
    total += GK::integrate(integrand, cuts[k], cuts[k + 1], 10, 1e-9);
  }
  return total * sphere_measure(N - 1);
}

double bessel_j_normalized_minus_one(specfun::Order nu, double t) {
  const double v = nu.value();
  if (t < 2.0) {
    const double z = -0.25 * t * t;
    double term = 1.0, sum = 0.0;
    for (int k = 1; k < 60; ++k) {
      term *= z / (k * (v + k));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  return specfun::gamma_fn(v + 1.0) * std::pow(2.0 / t, v) * std::cyl_bessel_j(v, t) - 1.0;
}

double shell_average(const Kernel& K, double r, double s) {
  if (!(r > 0.0) || !(s > 0.0)) fail(ErrorKind::domain, "radii must be positive");
  const auto& ctx = K.ctx();
  const double R = std::max(r, s), m = std::min(r, s);
  switch (K.kind()) {
    case KernelKind::unit: return ctx.surface();
    case KernelKind::lambda: return ctx.surface() * lambda_fn(ctx, R);
    case KernelKind::psi:
      return ctx.surface() * (1.0 + bessel_j_normalized_minus_one(ctx.nu, m)) * psi(ctx, R);
    case KernelKind::psi_minus_lambda: {
      const double jm1 = bessel_j_normalized_minus_one(ctx.nu, m);
      return ctx.surface() * ((1.0 + jm1) * psi_minus_lambda(ctx, R) + jm1 * lambda_fn(ctx, R));
    }
    case KernelKind::abs_psi: break;
  }
  fail(ErrorKind::config, "no exact shell average for |Psi|");
}

// ---------------------------------------------------------------- convolution

namespace {

// Fills row[0..n) for target r; avg_node(j) is the average at node j and
// avg_any(x) at an arbitrary radius.
template <class AvgNode, class AvgAny>
void build_row(const RadialGrid& g, double r, AvgNode&& avg_node, AvgAny&& avg_any, double* row) {
  const int q = g.nodes_per_panel(), P = g.panel_count(), N = g.ctx().N;
  const auto& nodes = g.nodes();
  const auto& weights = g.weights();
  std::vector<double> x, w, L(q);
  for (int p = 0; p < P; ++p) {
    const double a = g.edges()[p], b = g.edges()[p + 1];
    double* out = row + static_cast<size_t>(p) * q;
    if (r > a && r < b) {
      std::fill(out, out + q, 0.0);
      for (int side = 0; side < 2; ++side) {
        g.gauss_points(side == 0 ? a : r, side == 0 ? r : b, x, w);
        for (int k = 0; k < q; ++k) {
          const double c = w[k] * std::pow(x[k], N - 1) * avg_any(x[k]);
          g.lagrange_row(p, x[k], L.data());
          for (int j = 0; j < q; ++j) out[j] += c * L[j];
        }
      }
    } else {
      for (int j = 0; j < q; ++j) {
        const int i = p * q + j;
        out[j] = weights[i] * std::pow(nodes[i], N - 1) * avg_node(i);
      }
    }
  }
}

bool use_formula(const Kernel& K, AverageMethod method) {
  return method == AverageMethod::automatic && K.has_shell_formula();
}

}  // namespace

std::vector<double> convolution_row(const RadialGrid& grid, const Kernel& K, double r,
                                    AverageMethod method) {
  if (!(r > 0.0)) fail(ErrorKind::domain, "radius must be positive");
  std::vector<double> row(grid.size());
  const bool exact = use_formula(K, method);
  auto avg_any = [&](double s) { return exact ? shell_average(K, r, s) : angular_average(K, r, s); };
  auto avg_node = [&](int j) { return avg_any(grid.nodes()[j]); };
  build_row(grid, r, avg_node, avg_any, row.data());
  return row;
}

double convolve_at(const RadialFunction& g, const Kernel& K, double r) {
  const auto row = convolution_row(*g.grid, K, r);
  double s = 0.0;
  for (int j = 0; j < g.size(); ++j) s += row[j] * g.values[j];
  return s;
}

ConvolutionOperator::ConvolutionOperator(GridPtr grid, const Kernel& K, bool symmetrize,
                                         AverageMethod method)
    : grid_(std::move(grid)), kernel_(K), n_(grid_->size()) {
  if (grid_->ctx().N != K.ctx().N) fail(ErrorKind::shape, "kernel and grid dimensions differ");
  const RadialGrid& g = *grid_;
  const auto& ctx = g.ctx();
  const auto& nodes = g.nodes();
  w_.assign(static_cast<size_t>(n_) * n_, 0.0);
  const bool exact = use_formula(K, method);

  // separable factors of the exact averages at the nodes
  std::vector<double> jm1, far;
  if (exact) {
    jm1.resize(n_);
    far.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const double r = nodes[i];
      jm1[i] = bessel_j_normalized_minus_one(ctx.nu, r);
      switch (K.kind()) {
        case KernelKind::psi: far[i] = psi(ctx, r); break;
        case KernelKind::lambda: far[i] = lambda_fn(ctx, r); break;
        case KernelKind::psi_minus_lambda: far[i] = psi_minus_lambda(ctx, r); break;
        default: far[i] = 1.0; break;
      }
    }
  }
  std::vector<double> lam_cache;
  if (exact && K.kind() == KernelKind::psi_minus_lambda) {
    lam_cache.resize(n_);
    for (int i = 0; i < n_; ++i) lam_cache[i] = lambda_fn(ctx, nodes[i]);
  }

#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n_; ++i) {
    const double r = nodes[i];
    auto avg_any = [&](double s) {
      return exact ? shell_average(kernel_, r, s) : angular_average(kernel_, r, s);
    };
    auto avg_node = [&](int j) {
      if (!exact) return angular_average(kernel_, r, nodes[j]);
      const int lo = nodes[j] < r ? j : i;  // index of min(r, s)
      const int hi = nodes[j] < r ? i : j;  // index of max(r, s)
      switch (kernel_.kind()) {
        case KernelKind::unit: return ctx.surface();
        case KernelKind::lambda: return ctx.surface() * far[hi];
        case KernelKind::psi: return ctx.surface() * (1.0 + jm1[lo]) * far[hi];
        case KernelKind::psi_minus_lambda:
          return ctx.surface() * ((1.0 + jm1[lo]) * far[hi] + jm1[lo] * lam_cache[hi]);
        default: return 0.0;
      }
    };
    build_row(g, r, avg_node, avg_any, w_.data() + static_cast<size_t>(i) * n_);
  }

  if (symmetrize) {
    const auto& C = g.volume_weights();
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        const double a = w_[static_cast<size_t>(i) * n_ + j];
        const double b = w_[static_cast<size_t>(j) * n_ + i];
        // C_i W_ij and C_j W_ji both become their mean
        const double m = 0.5 * (C[i] * a + C[j] * b);
        w_[static_cast<size_t>(i) * n_ + j] = m / C[i];
        w_[static_cast<size_t>(j) * n_ + i] = m / C[j];
      }
    }
  }
}

std::vector<double> ConvolutionOperator::apply(const std::vector<double>& g) const {
  if (static_cast<int>(g.size()) != n_) fail(ErrorKind::shape, "field size does not match grid");
  std::vector<double> out(n_);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_; ++i) {
    const double* row = w_.data() + static_cast<size_t>(i) * n_;
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += row[j] * g[j];
    out[i] = s;
  }
  return out;
}

RadialFunction ConvolutionOperator::apply(const RadialFunction& g) const {
  if (g.grid != grid_) fail(ErrorKind::shape, "function lives on a different grid");
  return RadialFunction(grid_, apply(g.values));
}

double ConvolutionOperator::form(const RadialFunction& f, const RadialFunction& g) const {
  require_same_grid(f, g);
  if (f.grid != grid_) fail(ErrorKind::shape, "function lives on a different grid");
  const auto Kg = apply(g.values);
  const auto& C = grid_->volume_weights();
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += C[i] * f.values[i] * Kg[i];
  return s;
}

double quadform(const RadialFunction& f, const RadialFunction& g, const Kernel& K,
                AverageMethod method) {
  require_same_grid(f, g);
  return ConvolutionOperator(f.grid, K, false, method).form(f, g);
}

}  // namespace dualhelm
