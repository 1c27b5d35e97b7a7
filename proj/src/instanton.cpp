// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include "dualhelm/instanton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "dualhelm/error.hpp"
#include "dualhelm/format.hpp"

namespace dualhelm {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorKind::domain, "eps must be > 0, got " + fmt(eps));
}

struct Estimate {
  double value = 0;
  double error = 0;
};

Estimate pair(double coarse, double fine) { return {fine, std::abs(fine - coarse)}; }

PanelSpec layout(const InstantonParams& p, const GapOptions& opt, int q, bool laplace) {
  PanelSpec s;
  s.nodes_per_panel = q;
  s.inner_radius = 1e-3 * std::min(std::sqrt(p.eps), p.alpha);
  if (laplace) s.max_panel_length = std::numeric_limits<double>::infinity();
  const int m = std::max(1, opt.cutoff_panels);
  for (int k = 0; k < (laplace ? m + 1 : m); ++k) s.breakpoints.push_back(p.alpha * (1.0 + double(k) / m));
  return s;
}

// Pieces of the split computed on one resolution.
struct Pieces {
  double deficit = 0;  // int (1 - phi^{2+}) v_e^{2+}
  double tail = 0;     // int (1+phi) v_e Lambda * ((1-phi) v_e), without q
  double kernel = 0;   // int v (Psi - Lambda) * v, without q
  double coeff = 0;    // int (q^{1/2*} - Q^{1/2*}) v Psi * ((q^{1/2*} + Q^{1/2*}) v)
};

Pieces compute_pieces(const CoefficientSpec& Q, const InstantonParams& p,
                      const DimensionContext& ctx, const GapOptions& opt, int nodes) {
  Pieces out;
  const double ts = ctx.two_star, tp = ctx.two_plus;

  const auto far = make_grid(ctx, opt.far_radius * std::max(1.0, p.alpha), layout(p, opt, nodes, true));
  const int nf = far->size();
  RadialFunction f(far, std::vector<double>(nf)), g(far, std::vector<double>(nf));
  for (int i = 0; i < nf; ++i) {
    const double r = far->nodes()[i];
    const double v = v_instanton(ctx, p.eps, r);
    const double phi = cutoff(r / p.alpha);
    out.deficit += far->volume_weights()[i] * (1.0 - std::pow(phi, tp)) * std::pow(v, tp);
    f.values[i] = (1.0 + phi) * v;
    g.values[i] = (1.0 - phi) * v;
  }
  out.tail = inner(f, newton_potential(g).value);

  const auto near = make_grid(ctx, 2.0 * p.alpha, layout(p, opt, nodes, false));
  const RadialFunction v = cutoff_family(p, near);
  out.kernel = quadform(v, v, Kernel(KernelKind::psi_minus_lambda, ctx));
  if (Q.height != 0.0 || Q.periodic_amplitude != 0.0) {
    const double rq = std::pow(Q.sup_norm(), 1.0 / ts);
    RadialFunction d = v, s = v;
    for (int i = 0; i < near->size(); ++i) {
      const double rQ = std::pow(Q.at_radius(near->nodes()[i]), 1.0 / ts);
      d.values[i] *= rq - rQ;
      s.values[i] *= rq + rQ;
    }
    out.coeff = quadform(d, s, Kernel(KernelKind::psi, ctx));
  }
  return out;
}

}  // namespace

double u_instanton(const DimensionContext& ctx, double eps, double r) {
  check_eps(eps);
  const int N = ctx.N;
  return std::pow(N * (N - 2.0) * eps, 0.25 * (N - 2)) * std::pow(eps + r * r, -0.5 * (N - 2));
}

double v_instanton(const DimensionContext& ctx, double eps, double r) {
  check_eps(eps);
  const int N = ctx.N;
  return std::pow(N * (N - 2.0) * eps, 0.25 * (N + 2)) * std::pow(eps + r * r, -0.5 * (N + 2));
}

double cutoff(double r) { return smooth_step(r - 1.0); }

void InstantonParams::validate() const {
  check_eps(eps);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::domain, "alpha must be > 0");
}

RadialFunction cutoff_family(const InstantonParams& p, const GridPtr& grid) {
  p.validate();
  if (grid->r_max() < 2.0 * p.alpha * (1 - 1e-14))
    fail(ErrorKind::range, "grid ends at " + fmt(grid->r_max()) + " < 2 alpha = " + fmt(2 * p.alpha));
  const auto& ctx = grid->ctx();
  return RadialFunction::sample(grid, [&](double r) {
    const double phi = cutoff(r / p.alpha);
    return phi == 0.0 ? 0.0 : phi * v_instanton(ctx, p.eps, r);
  });
}

double tail_norm_bound(const DimensionContext& ctx, const InstantonParams& p) {
  const int N = ctx.N;
  return ctx.omega_N * std::pow(N * (N - 2.0), 0.5 * N) * std::pow(p.alpha, -N) *
         std::pow(p.eps, 0.5 * N);
}

double core_mass(const DimensionContext& ctx) {
  PanelSpec s;
  s.edges = {0.0, 1.0};
  s.nodes_per_panel = 40;
  const auto g = make_grid(ctx, 1.0, s);
  double m = 0.0;
  for (int i = 0; i < g->size(); ++i) m += g->volume_weights()[i] * v_instanton(ctx, 1.0, g->nodes()[i]);
  return m;
}

GapCertificate bilinear_decomposition(const CoefficientSpec& Q, const InstantonParams& p,
                                      const DimensionContext& ctx, const GapOptions& opt) {
  p.validate();
  Q.validate();
  if (p.eps > p.alpha * p.alpha)
    fail(ErrorKind::precondition, "eps = " + fmt(p.eps) + " exceeds alpha^2 = " + fmt(p.alpha * p.alpha));
  if (!Q.is_radial()) fail(ErrorKind::precondition, "the split needs a radial Q");
  const double q = Q.sup_norm();
  if (std::abs(Q.at_radius(0.0) - q) > 1e-12 * q)
    fail(ErrorKind::precondition, "Q(0) = " + fmt(Q.at_radius(0.0)) + " is not sup Q = " + fmt(q));
  if (opt.nodes_per_panel < 2 || opt.refined_nodes <= opt.nodes_per_panel)
    fail(ErrorKind::config, "refined_nodes must exceed nodes_per_panel");

  const int N = ctx.N;
  const double S = sobolev_constant(ctx);
  const double q2 = std::pow(q, 2.0 / ctx.two_star);
  const double SN = std::pow(S, 0.5 * N);

  const Pieces lo = compute_pieces(Q, p, ctx, opt, opt.nodes_per_panel);
  const Pieces hi = compute_pieces(Q, p, ctx, opt, opt.refined_nodes);

  // everything beyond the far grid: 4 int_{r>R} u_e^{2*} bounds the Newton
  // pairing, int_{r>R} v_e^{2+} the norm deficit
  const double R = opt.far_radius * std::max(1.0, p.alpha);
  const double beyond = ctx.omega_N * std::pow(N * (N - 2.0) * p.eps, 0.5 * N) * std::pow(R, -N);

  Estimate deficit = pair(lo.deficit, hi.deficit);
  deficit.error += beyond;
  Estimate tail = pair(lo.tail, hi.tail);
  tail.error += 4.0 * beyond;
  const Estimate kernel = pair(lo.kernel, hi.kernel);
  const Estimate coeff = pair(lo.coeff, hi.coeff);

  GapCertificate c;
  c.N = N;
  c.eps = p.eps;
  c.alpha = p.alpha;
  c.q = q;
  c.term_main = q2 * SN;
  c.term_tail = q2 * tail.value;
  c.term_kernel = q2 * kernel.value;
  c.term_coeff = coeff.value;

  const double norm_pow = SN - deficit.value;  // |v_{eps,alpha}|_{2+}^{2+}
  c.norm_sq = std::pow(norm_pow, 2.0 / ctx.two_plus);
  const double form = c.term_main - c.term_tail + c.term_kernel - c.term_coeff;
  c.l_star = l_q_star(q, ctx);
  if (!(form > 0.0)) {
    c.upper_bound = std::numeric_limits<double>::infinity();
    c.gap = -std::numeric_limits<double>::infinity();
  } else {
    c.upper_bound = std::pow(c.norm_sq / form, 0.5 * N) / N;
    c.gap = c.l_star - c.upper_bound;
  }

  const double roundoff = 64 * std::numeric_limits<double>::epsilon();
  const double e_norm = (2.0 / ctx.two_plus) * (deficit.error + roundoff * SN) / norm_pow;
  const double e_form =
      (q2 * (tail.error + kernel.error) + coeff.error + roundoff * c.term_main) / std::abs(form);
  c.error_bar = std::isfinite(c.upper_bound)
                    ? c.upper_bound * 0.5 * N * (e_norm + e_form) + roundoff * c.l_star
                    : std::numeric_limits<double>::infinity();
  c.certified = std::isfinite(c.gap) && c.gap > c.error_bar;

  const double zeta = 2.0 * q2 * std::pow(ctx.omega_N, 1.0 / ctx.two_plus) * std::pow(S, 0.25 * (N - 2)) *
                      std::pow(N * (N - 2.0), 0.25 * (N + 2)) * std::pow(p.alpha, -0.5 * (N + 2));
  c.tail_bound = zeta * std::pow(p.eps, 0.25 * (N + 2));

  c.kappa0 = nan;
  c.kernel_lower_bound = nan;
  if (N >= 4 && 4.0 * p.alpha < admissible_radius(ctx)) {
    c.kappa0 = certify_difference_bounds(ctx, 1e-8 * p.alpha, 4.0 * p.alpha, 4000).kappa1_hat;
    if (p.eps <= std::exp(-2.0) / 4.0) {
      const double m = core_mass(ctx);
      c.kernel_lower_bound = N == 4 ? p.eps * std::abs(std::log(2.0 * std::sqrt(p.eps))) * c.kappa0 * q2 * m * m
                                    : p.eps * std::pow(2.0, 4 - N) * c.kappa0 * q2 * m * m;
    }
  }
  return c;
}

const char* to_string(GapStatus s) noexcept {
  switch (s) {
    case GapStatus::gap_certified: return "gap_certified";
    case GapStatus::inconclusive: return "inconclusive";
    case GapStatus::no_gap_equality: return "no_gap_equality";
  }
  return "inconclusive";
}

std::vector<double> default_eps_list() {
  std::vector<double> e;
  for (int k = 0; k <= 8; ++k) e.push_back(std::pow(10.0, -2.0 - 0.5 * k));
  return e;
}

GapScan strict_gap_scan(const CoefficientSpec& Q, const DimensionContext& ctx,
                        const std::vector<double>& eps_list, double alpha, const GapOptions& opt) {
  if (eps_list.empty()) fail(ErrorKind::config, "empty eps list");
  Q.validate();
  GapScan scan;
  const std::vector<double> origin(ctx.N, 0.0);
  scan.flatness = flatness_check(Q, ctx.N, origin);
  if (ctx.N >= 5 && !scan.flatness.little_o)
    fail(ErrorKind::precondition, "Q(0) - Q(x) is not o(|x|^2) at the maximum");
  if (ctx.N == 4 && !scan.flatness.big_o)
    fail(ErrorKind::precondition, "Q(0) - Q(x) is not O(|x|^2) at the maximum");

  for (double eps : eps_list) scan.entries.push_back(bilinear_decomposition(Q, {eps, alpha}, ctx, opt));
  for (int i = 0; i < static_cast<int>(scan.entries.size()); ++i)
    if (scan.best < 0 || scan.entries[i].upper_bound < scan.entries[scan.best].upper_bound) scan.best = i;

  const auto& b = scan.entries[scan.best];
  if (b.certified) {
    scan.status = GapStatus::gap_certified;
  } else if (ctx.N == 3 && std::all_of(scan.entries.begin(), scan.entries.end(), [](const GapCertificate& c) {
               return c.upper_bound >= c.l_star - c.error_bar;
             })) {
    scan.status = GapStatus::no_gap_equality;
  } else {
    scan.status = GapStatus::inconclusive;
  }
  return scan;
}

void write_gap_csv(std::ostream& out, const GapScan& scan) {
  out << "eps,alpha,term_main,term_tail,term_kernel,term_coeff,norm_sq,upper_bound,l_star,gap,"
         "error_bar,tail_bound,kernel_lower_bound,certified\n";
  for (const auto& c : scan.entries) {
    out << fmt(c.eps) << ',' << fmt(c.alpha) << ',' << fmt(c.term_main) << ',' << fmt(c.term_tail) << ','
        << fmt(c.term_kernel) << ',' << fmt(c.term_coeff) << ',' << fmt(c.norm_sq) << ','
        << fmt(c.upper_bound) << ',' << fmt(c.l_star) << ',' << fmt(c.gap) << ',' << fmt(c.error_bar)
        << ',' << fmt(c.tail_bound) << ',' << fmt(c.kernel_lower_bound) << ','
        << (c.certified ? 1 : 0) << '\n';
  }
}

}  // namespace dualhelm
