// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "dualhelm/error.hpp"
#include "dualhelm/instanton.hpp"
#include "dualhelm/solver.hpp"

namespace py = pybind11;
using namespace dualhelm;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

// vectorized radial kernel
py::array_t<double> radial_map(double (*fn)(const DimensionContext&, double), int N,
                               py::array_t<double, py::array::c_style | py::array::forcecast> r) {
  const DimensionContext ctx(N);
  py::array_t<double> out(r.request().shape);
  const double* in = r.data();
  double* o = out.mutable_data();
  for (py::ssize_t i = 0; i < r.size(); ++i) o[i] = fn(ctx, in[i]);
  return out;
}

py::dict gap_dict(const GapCertificate& c) {
  py::dict d;
  d["eps"] = c.eps;
  d["alpha"] = c.alpha;
  d["upper_bound"] = c.upper_bound;
  d["l_star"] = c.l_star;
  d["gap"] = c.gap;
  d["error_bar"] = c.error_bar;
  d["term_main"] = c.term_main;
  d["term_tail"] = c.term_tail;
  d["term_kernel"] = c.term_kernel;
  d["term_coeff"] = c.term_coeff;
  d["norm_sq"] = c.norm_sq;
  d["certified"] = c.certified;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dualhelm core: fundamental solutions, dual functional, gap certificates and solver";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::numeric)
        PyErr_SetString(PyExc_ArithmeticError, e.what());
      else
        PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("bessel_y", [](double nu, double t) { return specfun::bessel_y(specfun::Order::from_value(nu), t); },
        py::arg("nu"), py::arg("t"));
  m.def("first_zero", [](double nu) { return specfun::first_zero(specfun::Order::from_value(nu)); },
        py::arg("nu"));
  m.def("psi", [](int N, py::array_t<double, py::array::c_style | py::array::forcecast> r) {
    return radial_map(psi, N, r);
  }, py::arg("N"), py::arg("r"));
  m.def("newton_kernel", [](int N, py::array_t<double, py::array::c_style | py::array::forcecast> r) {
    return radial_map(lambda_fn, N, r);
  }, py::arg("N"), py::arg("r"));
  m.def("psi_minus_lambda", [](int N, py::array_t<double, py::array::c_style | py::array::forcecast> r) {
    return radial_map(psi_minus_lambda, N, r);
  }, py::arg("N"), py::arg("r"));
  m.def("admissible_radius", [](int N) { return admissible_radius(DimensionContext(N)); }, py::arg("N"));

  m.def("certify_difference_bounds", [](int N, double r_lo, double r_hi, int n) {
    const auto c = certify_difference_bounds(DimensionContext(N), r_lo, r_hi, n);
    py::dict d;
    d["kappa1_hat"] = c.kappa1_hat;
    d["kappa2_hat"] = c.kappa2_hat;
    d["weight_kind"] = to_string(c.weight_kind);
    d["certified"] = c.certified;
    return d;
  }, py::arg("N"), py::arg("r_lo"), py::arg("r_hi"), py::arg("n_samples") = 400);

  m.def("sobolev_constant", [](int N) { return sobolev_constant(DimensionContext(N)); }, py::arg("N"));
  m.def("l_q_star", [](double q, int N) { return l_q_star(q, DimensionContext(N)); }, py::arg("sup_q"),
        py::arg("N"));

  py::class_<CoefficientSpec>(m, "CoefficientSpec")
      .def(py::init([](double constant, double periodic_amplitude, const std::string& decay, double height,
                       double radius, double width) {
             CoefficientSpec s;
             s.periodic_constant = constant;
             s.periodic_amplitude = periodic_amplitude;
             s.decay = decay_kind_from_string(decay);
             s.height = height;
             s.radius = radius;
             s.width = width;
             s.validate();
             return s;
           }),
           py::arg("constant") = 1.0, py::arg("periodic_amplitude") = 0.0, py::arg("decay") = "none",
           py::arg("height") = 0.0, py::arg("radius") = 1.0, py::arg("width") = 1.0)
      .def_readonly("constant", &CoefficientSpec::periodic_constant)
      .def_readonly("periodic_amplitude", &CoefficientSpec::periodic_amplitude)
      .def_readonly("height", &CoefficientSpec::height)
      .def("sup_norm", &CoefficientSpec::sup_norm)
      .def("at_radius", &CoefficientSpec::at_radius, py::arg("r"))
      .def("__repr__", [](const CoefficientSpec& s) {
        return "CoefficientSpec(constant=" + std::to_string(s.periodic_constant) + ", decay=" +
               to_string(s.decay) + ", height=" + std::to_string(s.height) + ")";
      });

  m.def("strict_gap_scan", [](const CoefficientSpec& q, int N, std::vector<double> eps, double alpha) {
    if (eps.empty()) eps = default_eps_list();
    const auto s = strict_gap_scan(q, DimensionContext(N), eps, alpha);
    py::list entries;
    for (const auto& e : s.entries) entries.append(gap_dict(e));
    py::dict d;
    d["status"] = to_string(s.status);
    d["best"] = s.best;
    d["entries"] = entries;
    return d;
  }, py::arg("q"), py::arg("N"), py::arg("eps") = std::vector<double>{}, py::arg("alpha") = 0.2);

  m.def("n3_probe", [](const CoefficientSpec& q, std::vector<double> eps, double alpha) {
    if (eps.empty()) eps = default_probe_eps();
    const auto r = n3_nonexistence_probe(q, eps, alpha);
    py::list rows;
    for (const auto& x : r.rows) {
      py::dict d;
      d["eps"] = x.eps;
      d["upper_bound"] = x.upper_bound;
      d["error_bar"] = x.error_bar;
      d["l_star"] = x.l_star;
      d["form_psi"] = x.form_psi;
      d["form_lambda"] = x.form_lambda;
      rows.append(d);
    }
    py::dict d;
    d["rows"] = rows;
    d["decreasing"] = r.decreasing;
    d["above_threshold"] = r.above_threshold;
    d["v1_margin"] = r.v1_margin;
    d["v1_margin_error"] = r.v1_margin_error;
    d["kernel_violations"] = r.kernel_violations;
    return d;
  }, py::arg("q"), py::arg("eps") = std::vector<double>{}, py::arg("alpha") = 0.2);

  m.def("solve_radial", [](const CoefficientSpec& q, int N, double r_max, double init_width, int max_iter,
                           double tol, double damping) {
    const DimensionContext ctx(N);
    const RadialDiscretization d(make_grid(ctx, r_max));
    const auto Q = make_coefficient(q, d);
    Field init(d.size());
    for (int i = 0; i < d.size(); ++i) init[i] = std::exp(-std::pow(d.grid()->nodes()[i] / init_width, 2));
    SolveParams p;
    p.max_iter = max_iter;
    p.tol = tol;
    p.damping = damping;
    SolveReport rep;
    {
      py::gil_scoped_release nogil;
      rep = fixed_point_solve(Q, d, init, p);
    }
    const auto rec = reconstruct_u(Q, d, rep.final_state.v);
    py::dict out;
    out["status"] = to_string(rep.status);
    out["converged"] = rep.converged;
    out["iterations"] = rep.iterations;
    out["energy"] = rep.energy;
    out["mp_bound"] = rep.mp_bound;
    out["energy_identity_gap"] = rep.energy_identity_gap;
    out["l_star"] = l_q_star(Q, ctx);
    out["residuals"] = to_array(rep.residual_history);
    out["r"] = to_array(d.grid()->nodes());
    out["v"] = to_array(rep.final_state.v);
    out["u"] = to_array(rec.u);
    return out;
  }, py::arg("q"), py::arg("N"), py::arg("r_max") = 7.0, py::arg("init_width") = 1.0, py::arg("max_iter") = 500,
     py::arg("tol") = 1e-6, py::arg("damping") = 0.5);

  m.def("farfield_fit", [](int N, std::vector<double> radii, std::vector<double> values, double support) {
    const auto f = farfield_fit(DimensionContext(N), radii, values, support);
    return py::make_tuple(f.amplitude, f.phase, f.rms_error);
  }, py::arg("N"), py::arg("radii"), py::arg("values"), py::arg("source_radius"));
}
