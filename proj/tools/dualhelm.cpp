// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

// dualhelm: command-line driver. One JSON config per run, CSV/JSON outputs
// in --out. Exit codes: 0 done (negative findings included), 2 usage or
// config, 3 numeric failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "dualhelm/error.hpp"
#include "dualhelm/format.hpp"
#include "dualhelm/instanton.hpp"
#include "dualhelm/solver.hpp"
#include "json.hpp"

using namespace dualhelm;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0, exit_config = 2, exit_numeric = 3;

// ---------------------------------------------------------------- config

struct RunConfig {
  std::string command;
  int dimension = 4;
  json raw;

  PanelSpec panels;
  double r_max = 6.0;
  CoefficientSpec coeff;

  // fundsol-table / certify-bounds
  double table_r_min = 1e-4;
  double table_r_max = 0;  // 0: 0.9 * admissible radius
  int table_samples = 200;

  // gap / nonexist3d
  double alpha = 0.2;
  std::vector<double> eps;

  // solve
  std::string backend = "radial";
  CartesianSpec cart;
  SolveParams solve;
  std::string init = "gaussian";
  double init_width = 1.0;

  // farfield
  double source_width = 0.5;
  double window_lo = 20, window_hi = 40, window_step = 0.25;
};

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::config, msg); }

void only_keys(const json& j, const std::string& where, std::set<std::string> keys) {
  if (!j.is_object()) bad(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) bad("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("bad value for '") + key + "'");
  }
}

RunConfig parse_config(const json& j, const std::string& command) {
  RunConfig c;
  c.command = command;
  c.raw = j;
  if (command == "nonexist3d" || command == "farfield") c.dimension = 3;
  only_keys(j, "config", {"command", "dimension", "grid", "coefficient", "fundsol", "gap", "solve",
                          "farfield", "nonexist3d"});
  if (j.contains("command") && j["command"] != command)
    bad("config is for command '" + j["command"].dump() + "', not '" + command + "'");
  read(j, "dimension", c.dimension);
  if (c.dimension < DimensionContext::min_dim || c.dimension > DimensionContext::max_dim)
    bad("dimension must be in [3, 8], got " + std::to_string(c.dimension));

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    only_keys(g, "grid", {"r_max", "nodes_per_panel", "inner_radius", "max_panel_length"});
    read(g, "r_max", c.r_max);
    read(g, "nodes_per_panel", c.panels.nodes_per_panel);
    read(g, "inner_radius", c.panels.inner_radius);
    if (g.contains("max_panel_length") && g["max_panel_length"].is_null())
      c.panels.max_panel_length = std::numeric_limits<double>::infinity();
    else
      read(g, "max_panel_length", c.panels.max_panel_length);
  }
  if (j.contains("coefficient")) {
    const auto& q = j["coefficient"];
    only_keys(q, "coefficient", {"constant", "periodic_amplitude", "decay", "height", "radius", "width"});
    read(q, "constant", c.coeff.periodic_constant);
    read(q, "periodic_amplitude", c.coeff.periodic_amplitude);
    std::string decay = "none";
    read(q, "decay", decay);
    c.coeff.decay = decay_kind_from_string(decay);
    read(q, "height", c.coeff.height);
    read(q, "radius", c.coeff.radius);
    read(q, "width", c.coeff.width);
  }
  c.coeff.validate();

  if (j.contains("fundsol")) {
    const auto& f = j["fundsol"];
    only_keys(f, "fundsol", {"r_min", "r_max", "samples"});
    read(f, "r_min", c.table_r_min);
    read(f, "r_max", c.table_r_max);
    read(f, "samples", c.table_samples);
  }
  c.eps = command == "nonexist3d" ? default_probe_eps() : default_eps_list();
  for (const char* sec : {"gap", "nonexist3d"}) {
    if (!j.contains(sec)) continue;
    only_keys(j[sec], sec, {"alpha", "eps"});
    read(j[sec], "alpha", c.alpha);
    read(j[sec], "eps", c.eps);
  }
  if (!(c.alpha > 0)) bad("alpha must be positive");
  if (c.eps.empty()) bad("eps list is empty");
  for (double e : c.eps)
    if (!(e > 0) || e > c.alpha * c.alpha) bad("eps values must lie in (0, alpha^2]");

  if (j.contains("solve")) {
    const auto& s = j["solve"];
    only_keys(s, "solve", {"backend", "max_iter", "tol", "damping", "init", "init_width", "half_width",
                           "points", "multiplier"});
    read(s, "backend", c.backend);
    read(s, "max_iter", c.solve.max_iter);
    read(s, "tol", c.solve.tol);
    read(s, "damping", c.solve.damping);
    read(s, "init", c.init);
    read(s, "init_width", c.init_width);
    read(s, "half_width", c.cart.half_width);
    read(s, "points", c.cart.points);
    std::string m = to_string(c.cart.multiplier);
    read(s, "multiplier", m);
    c.cart.multiplier = multiplier_kind_from_string(m);
  }
  if (c.backend != "radial" && c.backend != "cartesian") bad("backend must be radial or cartesian");
  if (c.init != "gaussian" && c.init != "zero") bad("init must be gaussian or zero");
  if (!(c.init_width > 0)) bad("init_width must be positive");
  if (c.solve.max_iter < 0 || !(c.solve.tol > 0) || !(c.solve.damping > 0) || c.solve.damping > 1)
    bad("solve: max_iter >= 0, tol > 0, damping in (0, 1]");

  if (j.contains("farfield")) {
    const auto& f = j["farfield"];
    only_keys(f, "farfield", {"source_width", "r_lo", "r_hi", "step"});
    read(f, "source_width", c.source_width);
    read(f, "r_lo", c.window_lo);
    read(f, "r_hi", c.window_hi);
    read(f, "step", c.window_step);
  }
  if (!(c.source_width > 0) || !(c.window_step > 0) || !(c.window_hi > c.window_lo))
    bad("farfield: need source_width > 0, step > 0, r_hi > r_lo");
  if (!(c.r_max > 0)) bad("grid.r_max must be positive");
  if (command == "nonexist3d" && c.dimension != 3) bad("nonexist3d needs dimension 3");
  return c;
}

// ---------------------------------------------------------------- outputs

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  std::ofstream open(const std::string& name, bool binary = false) {
    fs::create_directories(dir_);
    std::ofstream f(dir_ / name, binary ? std::ios::binary : std::ios::out);
    if (!f) fail(ErrorKind::config, "cannot write " + (dir_ / name).string());
    return f;
  }
  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

 private:
  fs::path dir_;
};

// NaN / inf are not JSON numbers
json num(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);
}

std::vector<double> log_radii(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1));
  return r;
}

json certificate_json(const BoundCertificate& b) {
  return {{"N", b.N},
          {"r_lo", num(b.r_lo)},
          {"r_hi", num(b.r_hi)},
          {"n_samples", b.n_samples},
          {"kappa1_hat", num(b.kappa1_hat)},
          {"kappa2_hat", num(b.kappa2_hat)},
          {"weight_kind", to_string(b.weight_kind)},
          {"certified", b.certified}};
}

json gap_json(const GapCertificate& c) {
  return {{"eps", num(c.eps)},
          {"alpha", num(c.alpha)},
          {"q", num(c.q)},
          {"term_main", num(c.term_main)},
          {"term_tail", num(c.term_tail)},
          {"term_kernel", num(c.term_kernel)},
          {"term_coeff", num(c.term_coeff)},
          {"norm_sq", num(c.norm_sq)},
          {"upper_bound", num(c.upper_bound)},
          {"l_star", num(c.l_star)},
          {"gap", num(c.gap)},
          {"error_bar", num(c.error_bar)},
          {"tail_bound", num(c.tail_bound)},
          {"kappa0", num(c.kappa0)},
          {"kernel_lower_bound", num(c.kernel_lower_bound)},
          {"certified", c.certified}};
}

std::pair<double, double> table_range(const RunConfig& c, const DimensionContext& ctx) {
  const double hi = c.table_r_max > 0 ? c.table_r_max : 0.9 * admissible_radius(ctx);
  return {c.table_r_min, hi};
}

// ---------------------------------------------------------------- commands

int cmd_fundsol_table(const RunConfig& c, Outputs& out) {
  const DimensionContext ctx(c.dimension);
  const auto [lo, hi] = table_range(c, ctx);
  const auto cert = certify_difference_bounds(ctx, lo, hi, c.table_samples);
  auto f = out.open("fundsol_table.csv");
  write_fundsol_table(f, ctx, log_radii(lo, hi, c.table_samples));
  out.write_json("bound_certificate.json", certificate_json(cert));
  std::cout << "kappa1_hat " << fmt(cert.kappa1_hat) << "\nkappa2_hat " << fmt(cert.kappa2_hat)
            << "\ncertified " << (cert.certified ? "true" : "false") << '\n';
  return exit_ok;
}

int cmd_certify_bounds(const RunConfig& c, Outputs& out) {
  const DimensionContext ctx(c.dimension);
  const auto [lo, hi] = table_range(c, ctx);
  const auto cert = certify_difference_bounds(ctx, lo, hi, c.table_samples);
  json j = certificate_json(cert);
  const auto radii = log_radii(lo, hi, c.table_samples);
  for (int order : {1, 2}) {
    const auto d = derivative_bound_check(ctx, order, radii);
    j["derivative_order_" + std::to_string(order)] = {
        {"sup_weighted", num(d.sup_weighted)}, {"r_at_sup", num(d.r_at_sup)}, {"finite", d.finite}};
  }
  out.write_json("bound_certificate.json", j);
  std::cout << j.dump(2) << '\n';
  return exit_ok;
}

int cmd_sobolev(const RunConfig& c, Outputs& out) {
  const DimensionContext ctx(c.dimension);
  const auto rep = sobolev_report(ctx);
  const double S = sobolev_constant(ctx);
  const double L = l_q_star(c.coeff.sup_norm(), ctx);
  out.write_json("sobolev.json", {{"N", ctx.N},
                                  {"S", num(S)},
                                  {"S_from_gradient", num(rep.from_gradient)},
                                  {"relative_gap", num(rep.relative_gap)},
                                  {"sup_Q", num(c.coeff.sup_norm())},
                                  {"L_Q_star", num(L)}});
  std::cout << "S " << fmt(S) << "\nL_Q* " << fmt(L) << '\n';
  return exit_ok;
}

int cmd_gap(const RunConfig& c, Outputs& out) {
  const DimensionContext ctx(c.dimension);
  const auto scan = strict_gap_scan(c.coeff, ctx, c.eps, c.alpha);
  auto f = out.open("gap_scan.csv");
  write_gap_csv(f, scan);
  json j = {{"N", ctx.N},
            {"status", to_string(scan.status)},
            {"flatness", {{"little_o", scan.flatness.little_o},
                          {"big_o", scan.flatness.big_o},
                          {"limsup", num(scan.flatness.limsup)},
                          {"limit_estimate", num(scan.flatness.limit_estimate)}}},
            {"best", gap_json(scan.entries[scan.best])}};
  out.write_json("gap_certificate.json", j);
  const auto& b = scan.entries[scan.best];
  std::cout << "status " << to_string(scan.status) << "\nupper_bound " << fmt(b.upper_bound) << "\nl_star "
            << fmt(b.l_star) << "\ngap " << fmt(b.gap) << "\nerror_bar " << fmt(b.error_bar) << '\n';
  return exit_ok;
}

int cmd_solve(const RunConfig& c, Outputs& out) {
  const DimensionContext ctx(c.dimension);
  std::unique_ptr<Discretization> disc;
  std::vector<double> radius;
  if (c.backend == "radial") {
    auto rd = std::make_unique<RadialDiscretization>(make_grid(ctx, c.r_max, c.panels));
    radius = rd->grid()->nodes();
    disc = std::move(rd);
  } else {
    auto cd = std::make_unique<CartesianDiscretization>(ctx, c.cart);
    radius.resize(cd->size());
    for (int i = 0; i < cd->size(); ++i) radius[i] = cd->radius(i);
    disc = std::move(cd);
  }
  const auto Q = make_coefficient(c.coeff, *disc);
  Field init(disc->size(), 0.0);
  if (c.init == "gaussian")
    for (int i = 0; i < disc->size(); ++i) init[i] = std::exp(-std::pow(radius[i] / c.init_width, 2));
  const auto rep = fixed_point_solve(Q, *disc, init, c.solve);
  const auto rec = reconstruct_u(Q, *disc, rep.final_state.v);

  json meta = {{"N", ctx.N}, {"backend", c.backend}, {"config", c.raw}};
  {
    auto f = out.open("v.field", true);
    meta["field"] = "v";
    write_checkpoint(f, meta, rep.final_state.v);
  }
  {
    auto f = out.open("u.field", true);
    meta["field"] = "u";
    write_checkpoint(f, meta, rec.u);
  }
  auto f = out.open("residuals.csv");
  write_residual_csv(f, rep);
  const json j = {{"N", ctx.N},
                  {"backend", c.backend},
                  {"size", disc->size()},
                  {"status", to_string(rep.status)},
                  {"converged", rep.converged},
                  {"iterations", rep.iterations},
                  {"final_residual", num(rep.residual_history.back())},
                  {"energy", num(rep.energy)},
                  {"mp_bound", num(rep.mp_bound)},
                  {"energy_identity_gap", num(rep.energy_identity_gap)},
                  {"norm_2plus", num(rep.final_state.norm_2plus)},
                  {"quadform_AQ", num(rep.final_state.quadform_AQ)},
                  {"u_norm_2star", num(rec.norm_2star)},
                  {"l_star", num(l_q_star(Q, ctx))}};
  out.write_json("solve_report.json", j);
  std::cout << "status " << to_string(rep.status) << "\niterations " << rep.iterations << "\nenergy "
            << fmt(rep.energy) << "\nresidual " << fmt(rep.residual_history.back()) << '\n';
  return exit_ok;
}

int cmd_nonexist3d(const RunConfig& c, Outputs& out) {
  const auto rep = n3_nonexistence_probe(c.coeff, c.eps, c.alpha);
  auto f = out.open("nonexist3d.csv");
  f << "eps,upper_bound,error_bar,l_star,form_psi,form_lambda,margin\n";
  for (const auto& r : rep.rows)
    f << fmt(r.eps) << ',' << fmt(r.upper_bound) << ',' << fmt(r.error_bar) << ',' << fmt(r.l_star) << ','
      << fmt(r.form_psi) << ',' << fmt(r.form_lambda) << ',' << fmt(r.form_lambda - r.form_psi) << '\n';
  out.write_json("nonexist3d.json", {{"decreasing", rep.decreasing},
                                     {"above_threshold", rep.above_threshold},
                                     {"forms_ordered", rep.forms_ordered},
                                     {"v1_margin", num(rep.v1_margin)},
                                     {"v1_margin_error", num(rep.v1_margin_error)},
                                     {"v1_form_lambda", num(rep.v1_form_lambda)},
                                     {"kernel_samples", rep.kernel_samples},
                                     {"kernel_violations", rep.kernel_violations},
                                     {"max_abs_psi_over_lambda", num(rep.max_abs_psi_over_lambda)}});
  std::cout << "eps upper_bound l_star lambda-psi\n";
  for (const auto& r : rep.rows)
    std::cout << fmt(r.eps) << ' ' << fmt(r.upper_bound) << ' ' << fmt(r.l_star) << ' '
              << fmt(r.form_lambda - r.form_psi) << '\n';
  return exit_ok;
}

int cmd_farfield(const RunConfig& c, Outputs& out) {
  const DimensionContext ctx(c.dimension);
  const double support = 6.0 * c.source_width;
  PanelSpec ps = c.panels;
  ps.inner_radius = std::min(ps.inner_radius, 1e-2 * c.source_width);
  const auto g = make_grid(ctx, support, ps);
  const auto src = RadialFunction::sample(g, [&](double r) { return std::exp(-std::pow(r / c.source_width, 2)); });
  const Kernel K(KernelKind::psi, ctx);
  std::vector<double> radii, vals;
  const int n = static_cast<int>(std::floor((c.window_hi - c.window_lo) / c.window_step + 1e-9)) + 1;
  for (int i = 0; i < n; ++i) {
    radii.push_back(c.window_lo + i * c.window_step);
    vals.push_back(convolve_at(src, K, radii.back()));
  }
  const auto fit = farfield_fit(ctx, radii, vals, support);
  auto f = out.open("farfield.csv");
  f << "r,u\n";
  for (size_t i = 0; i < radii.size(); ++i) f << fmt(radii[i]) << ',' << fmt(vals[i]) << '\n';
  out.write_json("farfield.json", {{"N", ctx.N},
                                   {"amplitude", num(fit.amplitude)},
                                   {"phase", num(fit.phase)},
                                   {"rms_error", num(fit.rms_error)},
                                   {"relative_rms", num(fit.amplitude > 0 ? fit.rms_error / fit.amplitude : 0.0)},
                                   {"samples", fit.samples}});
  std::cout << "amplitude " << fmt(fit.amplitude) << "\nphase " << fmt(fit.phase) << "\nrms_error "
            << fmt(fit.rms_error) << '\n';
  return exit_ok;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) fail(ErrorKind::config, "cannot read config " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    fail(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dualhelm: dual variational experiments for the critical nonlinear Helmholtz equation"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  int threads = 0;
  bool dry_run = false;

  using Handler = int (*)(const RunConfig&, Outputs&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"fundsol-table", "tabulate Psi, Lambda and their difference", cmd_fundsol_table},
      {"certify-bounds", "empirical kappa bounds and derivative checks", cmd_certify_bounds},
      {"sobolev", "Sobolev constant and L_Q*", cmd_sobolev},
      {"gap", "strict gap scan over the instanton family", cmd_gap},
      {"solve", "damped fixed-point search for a dual ground state", cmd_solve},
      {"nonexist3d", "three-dimensional equality probe", cmd_nonexist3d},
      {"farfield", "far-field fit of Psi * source", cmd_farfield},
  };
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: all)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--dry-run", dry_run, "validate the config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
  try {
    const RunConfig cfg = parse_config(load_config(config_path), name);
    if (dry_run) {
      std::cout << "config ok: " << name << " N=" << cfg.dimension << '\n';
      return exit_ok;
    }
    Outputs out(out_dir);
    for (const auto& [n, help, fn] : commands)
      if (n == name) return fn(cfg, out);
  } catch (const Error& e) {
    std::cerr << "dualhelm " << name << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::numeric ? exit_numeric : exit_config;
  } catch (const std::exception& e) {
    std::cerr << "dualhelm " << name << ": internal error: " << e.what() << '\n';
    return exit_numeric;
  }
  return exit_config;
}
