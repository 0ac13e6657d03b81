#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oudiff/analytic.hpp"
#include "oudiff/diffusion.hpp"
#include "oudiff/eigen_dynamics.hpp"
#include "oudiff/observables.hpp"
#include "oudiff/rng.hpp"

namespace py = pybind11;
using namespace oudiff;

namespace {

OUParams make_params(double a, int n, double dt, std::uint64_t seed) {
  OUParams p;
  p.a = a;
  p.n = n;
  p.dt = dt;
  p.seed = seed;
  return p;
}

Matrix py_sample_gue(const Matrix& h0, double tau, double a,
                     std::uint64_t seed, std::uint64_t stream) {
  RngStream rng(seed, stream);
  const HermitianMatrix h = HermitianMatrix::symmetrized(h0);
  const OUParams p = make_params(a, h.dim(), 1e-3, seed);
  return sample_gue_transition(h, tau, p, rng).matrix();
}

Matrix py_sample_ginibre(const Matrix& x0, double tau, double a,
                         std::uint64_t seed, std::uint64_t stream) {
  RngStream rng(seed, stream);
  const GinibreMatrix x(x0);
  const OUParams p = make_params(a, x.dim(), 1e-3, seed);
  return sample_ginibre_transition(x, tau, p, rng).matrix();
}

py::tuple py_eigen_overlaps(const Matrix& m) {
  const EigenSystem sys = eigen_decompose(m);
  const OverlapMatrix ov = overlaps(sys);
  return py::make_tuple(sys.values, ov.o);
}

Eigen::MatrixXd py_dyson_trajectory(const std::vector<double>& lam0, double a,
                                    double dt, int steps, std::uint64_t seed) {
  OUParams p = make_params(a, static_cast<int>(lam0.size()), dt, seed);
  RngStream rng(seed, 0);
  Eigen::MatrixXd path(steps + 1, lam0.size());
  std::vector<double> lam = lam0;
  for (size_t i = 0; i < lam.size(); ++i) path(0, i) = lam[i];
  for (int s = 1; s <= steps; ++s) {
    lam = dyson_step(lam, p, rng);
    for (size_t i = 0; i < lam.size(); ++i) path(s, i) = lam[i];
  }
  return path;
}

Complex py_acp_from_initial(const Matrix& h0, Complex z, double tau,
                            double a) {
  return acp_from_initial(HermitianMatrix::symmetrized(h0), z, tau, a);
}

Complex py_qdet_from_initial(const Matrix& x0, Complex z, Complex w,
                             double tau, double a) {
  return qdet_from_initial(x0, QuaternionArgument{z, w}, tau, a);
}

double py_burgers(Complex z_prime, double r_prime, double tau_prime) {
  auto v0 = [&](double r) { return burgers_initial_profile(z_prime, r); };
  return burgers_characteristics(z_prime, r_prime, tau_prime, v0);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ornstein-Uhlenbeck diffusion of hermitian and non-hermitian "
            "random matrices: samplers, spectral observables and the closed "
            "forms they are checked against";

  m.def("sample_gue_transition", &py_sample_gue, py::arg("h0"),
        py::arg("tau"), py::arg("a") = 0.5, py::arg("seed") = 0,
        py::arg("stream") = 0,
        "exact confined-walk transition from a hermitian matrix");
  m.def("sample_ginibre_transition", &py_sample_ginibre, py::arg("x0"),
        py::arg("tau"), py::arg("a") = 0.5, py::arg("seed") = 0,
        py::arg("stream") = 0,
        "exact confined-walk transition from a complex matrix");
  m.def("eigen_overlaps", &py_eigen_overlaps, py::arg("m"),
        "eigenvalues and the full left/right overlap matrix O_ij");
  m.def("dyson_trajectory", &py_dyson_trajectory, py::arg("lambda0"),
        py::arg("a"), py::arg("dt"), py::arg("steps"), py::arg("seed") = 0,
        "eigenvalue Langevin path; rows are time slices");
  m.def("block_trace", &block_trace, py::arg("m"), py::arg("n"));
  m.def(
      "quaternion_embed",
      [](Complex z, Complex w) {
        return quaternion_embed(QuaternionArgument{z, w});
      },
      py::arg("z"), py::arg("w"));
  m.def(
      "generalized_resolvent",
      [](const Matrix& x, Complex z, Complex w) {
        return generalized_resolvent_sample(QuaternionArgument{z, w}, x);
      },
      py::arg("x"), py::arg("z"), py::arg("w"),
      "single-sample block-traced resolvent (1/n) bTr (Q - X)^-1");

  m.def("wigner_green", &wigner_green, py::arg("z"), py::arg("a"));
  m.def("wigner_density", &wigner_density, py::arg("x"), py::arg("a"));
  m.def(
      "ginibre_macroscopic",
      [](Complex z, double a) {
        const auto laws = ginibre_macroscopic(z, a);
        return py::make_tuple(laws.density, laws.overlap);
      },
      py::arg("z"), py::arg("a"), "stationary disc density and overlap");
  m.def(
      "free_ginibre_laws",
      [](Complex z_prime, double tau_prime) {
        const auto laws = free_ginibre_laws(z_prime, tau_prime);
        return py::make_tuple(laws.density, laws.overlap);
      },
      py::arg("z_prime"), py::arg("tau_prime"));
  m.def("erfc_edge", &erfc_edge, py::arg("eta"));
  m.def("acp_from_initial", &py_acp_from_initial, py::arg("h0"), py::arg("z"),
        py::arg("tau"), py::arg("a"),
        "averaged characteristic polynomial of the confined walk");
  m.def("qdet_from_initial", &py_qdet_from_initial, py::arg("x0"),
        py::arg("z"), py::arg("w"), py::arg("tau"), py::arg("a"),
        "averaged block determinant of the confined walk");
  m.def("burgers_characteristics", &py_burgers, py::arg("z_prime"),
        py::arg("r_prime"), py::arg("tau_prime"),
        "radial characteristics solution for the zero-matrix start");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
