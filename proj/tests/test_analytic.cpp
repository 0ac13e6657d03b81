#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oudiff/analytic.hpp"
#include "oudiff/rng.hpp"

using namespace oudiff;

namespace {

// random probe away from the spectral support [-2, 2] at a = 1/2
Complex off_cut_probe(RngStream& rng) {
  for (;;) {
    const Complex z(6.0 * rng.uniform() - 3.0, 6.0 * rng.uniform() - 3.0);
    if (std::abs(z.imag()) > 0.4 || std::abs(z.real()) > 2.5) return z;
  }
}

PolynomialInZ shifted(const PolynomialInZ& p, Complex c) {
  // coefficients of p(z + c) via repeated synthetic division
  std::vector<Complex> a = p.coeffs;
  std::vector<Complex> out(a.size());
  for (size_t k = 0; k < out.size(); ++k) {
    // divide a(z) by (z - (-c)); remainder is the k-th Taylor coefficient
    Complex rem(0.0, 0.0);
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) {
      const Complex tmp = a[i] + rem * c;
      rem = tmp;
      a[i] = tmp;
    }
    out[k] = a[0];
    a.erase(a.begin());
    if (a.empty()) break;
  }
  PolynomialInZ q;
  q.coeffs = out;
  return q;
}

}  // namespace

TEST_CASE("stationary resolvent branch and asymptotics") {
  // upper-half-plane limit at the band center
  const Complex g0 = wigner_green(Complex(0.0, 0.0), 0.5);
  CHECK(std::abs(g0 - Complex(0.0, -1.0)) < 1e-12);
  CHECK(-g0.imag() / M_PI == doctest::Approx(1.0 / M_PI));

  const Complex g100 = wigner_green(Complex(100.0, 0.0), 0.5);
  CHECK(std::abs(g100 - 0.01) < 1e-3);

  RngStream rng(1, 0);
  for (int k = 0; k < 100; ++k) {
    const Complex z = off_cut_probe(rng);
    CHECK(stationary_burgers_residual(z, 0.5) < 1e-12);
  }
  CHECK_THROWS_AS(wigner_green(Complex(1, 0), 0.0), std::invalid_argument);
}

TEST_CASE("stationary flow residual by finite differences") {
  RngStream rng(2, 0);
  for (int k = 0; k < 50; ++k) {
    const Complex z = off_cut_probe(rng);
    CHECK(stationary_burgers_residual_fd(z, 0.5, 1e-4) < 1e-6);
  }
  // wrong integration constant leaves an order-one defect
  const Complex z(1.1, 0.9);
  const Complex g = wigner_green(z, 0.5);
  const double wrong = std::abs(0.5 * g * g - 0.5 * z * g - 0.3);
  CHECK(wrong > 0.1);
}

TEST_CASE("stationary density values and normalization") {
  CHECK(wigner_density(0.0, 0.5) == doctest::Approx(1.0 / M_PI));
  CHECK(wigner_density(2.0, 0.5) == 0.0);
  CHECK(wigner_density(-2.0, 0.5) == 0.0);
  CHECK(wigner_density(2.3, 0.5) == 0.0);
  // integrate in the angle variable where the integrand is smooth
  const double r = 2.0;
  const int n = 2000;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double th = -M_PI / 2 + M_PI * k / n;
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    acc += w * wigner_density(r * std::sin(th), 0.5) * r * std::cos(th);
  }
  acc *= M_PI / n;
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("disc laws at the standard coupling") {
  const auto center = ginibre_macroscopic(Complex(0, 0), 0.5);
  CHECK(center.density == doctest::Approx(1.0 / M_PI));
  CHECK(center.overlap == doctest::Approx(1.0 / M_PI));
  const auto edge = ginibre_macroscopic(Complex(1, 0), 0.5);
  CHECK(edge.density == doctest::Approx(1.0 / M_PI));  // closed disc
  CHECK(edge.overlap == doctest::Approx(0.0));
  const auto outside = ginibre_macroscopic(Complex(1.2, 0), 0.5);
  CHECK(outside.density == 0.0);
  // (2a/pi) * pi * (1/2a) = 1
  CHECK(ginibre_macroscopic(Complex(0, 0), 0.5).density * M_PI * 1.0 ==
        doctest::Approx(1.0));
}

TEST_CASE("free disc laws and their confined limit") {
  const auto origin = free_ginibre_laws(Complex(0, 0), 1.0);
  CHECK(origin.density == doctest::Approx(1.0 / M_PI));
  CHECK(origin.overlap == doctest::Approx(1.0 / M_PI));
  CHECK(free_ginibre_laws(Complex(1, 0), 1.0).overlap ==
        doctest::Approx(0.0));

  // at large tau the primed laws, rescaled by the plane Jacobian e^{2 a tau},
  // reproduce the stationary disc laws
  const double a = 0.5, tau = 8.0;
  const double jac = std::exp(2.0 * a * tau);
  for (double r : {0.0, 0.3, 0.6, 0.9}) {
    const Complex z(r, 0.0);
    const LampertiImage img = lamperti_map(z, tau, a, 1, EnsembleKind::Ginibre);
    const auto primed = free_ginibre_laws(img.z_prime, img.tau_prime);
    const auto fixed = ginibre_macroscopic(z, a);
    CHECK(primed.density * jac ==
          doctest::Approx(fixed.density).epsilon(1e-3));
    CHECK(primed.overlap * jac ==
          doctest::Approx(fixed.overlap).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("change of variables to free diffusion") {
  const auto id = lamperti_map(Complex(0.3, 0.1), 0.0, 0.5, 4,
                               EnsembleKind::Hermitian);
  CHECK(id.z_prime == Complex(0.3, 0.1));
  CHECK(id.tau_prime == 0.0);
  CHECK(id.prefactor == 1.0);

  const int n = 6;
  const auto img = lamperti_map(Complex(1.0, 0.0), std::log(2.0), 0.5, n,
                                EnsembleKind::Hermitian);
  CHECK(img.z_prime.real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(img.tau_prime == doctest::Approx(1.0));
  CHECK(img.prefactor == doctest::Approx(std::pow(2.0, -n / 2.0)));
  CHECK(img.prefactor * std::pow(1.0 + 2.0 * 0.5 * img.tau_prime, n / 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const auto gin = lamperti_map(Complex(1.0, 0.0), std::log(2.0), 0.5, n,
                                EnsembleKind::Ginibre);
  CHECK(gin.prefactor == doctest::Approx(std::pow(2.0, -static_cast<double>(n))));

  const auto tiny = lamperti_map(Complex(1, 0), 0.7, 1e-8, 2,
                                 EnsembleKind::Hermitian);
  CHECK(tiny.tau_prime == doctest::Approx(0.7).epsilon(1e-7));
}

TEST_CASE("heat flow on the monic polynomial") {
  PolynomialInZ p0;
  p0.coeffs = {Complex(-0.4, 0.0), Complex(0, 0), Complex(1, 0)};  // z^2 - 0.4
  const PolynomialInZ out = heat_evolve_acp(p0, 0.9, 2);
  CHECK(out.coeffs[2] == Complex(1, 0));
  CHECK(out.coeffs[1] == Complex(0, 0));
  CHECK(out.coeffs[0].real() == doctest::Approx(-0.4 - 0.9 / 2.0));

  const PolynomialInZ frozen = heat_evolve_acp(p0, 0.0, 2);
  for (int k = 0; k <= 2; ++k) CHECK(frozen.coeffs[k] == p0.coeffs[k]);
}

TEST_CASE("heat flow is linear and commutes with shifts") {
  RngStream rng(3, 0);
  const int n = 5;
  PolynomialInZ p, q;
  for (int k = 0; k <= n; ++k) {
    p.coeffs.emplace_back(rng.gaussian(), rng.gaussian());
    q.coeffs.emplace_back(rng.gaussian(), rng.gaussian());
  }
  p.coeffs[n] = q.coeffs[n] = Complex(1, 0);
  const Complex alpha(0.6, -0.2), beta(1.1, 0.4);
  PolynomialInZ combo;
  combo.coeffs.resize(n + 1);
  for (int k = 0; k <= n; ++k)
    combo.coeffs[k] = alpha * p.coeffs[k] + beta * q.coeffs[k];
  const double tp = 0.35;
  const auto ep = heat_evolve_acp(p, tp, n);
  const auto eq = heat_evolve_acp(q, tp, n);
  const auto ec = heat_evolve_acp(combo, tp, n);
  for (int k = 0; k <= n; ++k) {
    const Complex want = alpha * ep.coeffs[k] + beta * eq.coeffs[k];
    CHECK(std::abs(ec.coeffs[k] - want) < 1e-12);
  }

  const Complex c(0.7, -0.3);
  const auto lhs = heat_evolve_acp(shifted(p, c), tp, n);
  const auto rhs = shifted(heat_evolve_acp(p, tp, n), c);
  for (int k = 0; k <= n; ++k) CHECK(std::abs(lhs.coeffs[k] - rhs.coeffs[k]) < 1e-10);
}

TEST_CASE("radial heat flow hand examples") {
  RadialPolynomial d1;
  d1.z = Complex(0, 0);
  d1.coeffs = {0.7, 1.0};  // s + 0.7
  const auto e1 = heat_evolve_qdet(d1, 0.45, 1);
  CHECK(e1.coeffs[0] == doctest::Approx(0.7 + 0.45));
  CHECK(e1.coeffs[1] == doctest::Approx(1.0));

  RadialPolynomial d2;
  d2.z = Complex(0, 0);
  const double alpha = 0.8, beta = 0.25, tp = 0.3;
  d2.coeffs = {beta, alpha, 1.0};
  const auto e2 = heat_evolve_qdet(d2, tp, 2);
  CHECK(e2.coeffs[2] == doctest::Approx(1.0));
  CHECK(e2.coeffs[1] == doctest::Approx(alpha + 2.0 * tp));
  CHECK(e2.coeffs[0] ==
        doctest::Approx(beta + alpha * tp / 2.0 + tp * tp / 2.0));

  const auto frozen = heat_evolve_qdet(d2, 0.0, 2);
  for (int k = 0; k <= 2; ++k) CHECK(frozen.coeffs[k] == d2.coeffs[k]);
}

TEST_CASE("radial heat flow keeps coefficients real, positive, monic") {
  RngStream rng(5, 0);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix x0(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        x0(i, j) = Complex(rng.gaussian(), rng.gaussian()) * 0.4;
    const Complex z(rng.gaussian() * 0.5, rng.gaussian() * 0.5);
    const RadialPolynomial d0 = radial_characteristic(x0, z);
    CHECK(d0.coeffs.back() == doctest::Approx(1.0));
    for (double c : d0.coeffs) CHECK(c >= 0.0);
    const auto ev = heat_evolve_qdet(d0, 0.7, 3);
    CHECK(ev.coeffs.back() == doctest::Approx(1.0));
    for (double c : ev.coeffs) CHECK(c >= 0.0);
  }
}

TEST_CASE("evolved determinant from initial data") {
  // tau = 0 returns the plain characteristic polynomial
  Eigen::VectorXd d(3);
  d << 0.4, -0.2, 1.1;
  const HermitianMatrix h0 = HermitianMatrix::diagonal(d);
  const Complex z(0.3, 0.8);
  const Complex u0 = acp_from_initial(h0, z, 0.0, 0.5);
  CHECK(std::abs(u0 - (z - 0.4) * (z + 0.2) * (z - 1.1)) < 1e-12);

  // free flow from the zero matrix: z^2 - tau/2 at z = 0
  const HermitianMatrix zero2(2);
  const Complex v = acp_from_initial(zero2, Complex(0, 0), 1.0, 0.0);
  CHECK(v.real() == doctest::Approx(-0.5));
  CHECK(v.imag() == doctest::Approx(0.0));
}

TEST_CASE("quaternionic determinant from initial data") {
  // tau = 0 against a direct block determinant
  RngStream rng(8, 0);
  Matrix x0(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      x0(i, j) = Complex(rng.gaussian(), rng.gaussian()) * 0.3;
  const QuaternionArgument q{Complex(0.4, -0.2), Complex(0.5, 0.1)};
  Matrix blk = Matrix::Zero(4, 4);
  blk.topLeftCorner(2, 2) = -x0;
  blk.topLeftCorner(2, 2).diagonal().array() += q.z;
  blk.bottomRightCorner(2, 2) = -x0.adjoint();
  blk.bottomRightCorner(2, 2).diagonal().array() += std::conj(q.z);
  blk.topRightCorner(2, 2).diagonal().array() = -std::conj(q.w);
  blk.bottomLeftCorner(2, 2).diagonal().array() = q.w;
  const Complex direct = blk.determinant();
  const Complex d0 = qdet_from_initial(x0, q, 0.0, 0.5);
  CHECK(std::abs(d0 - direct) < 1e-12);

  // free flow from zero at n = 1: |w|^2 + |z|^2 + tau
  const Matrix zero1 = Matrix::Zero(1, 1);
  const QuaternionArgument q1{Complex(0.6, 0.3), Complex(0.2, -0.4)};
  const Complex d1 = qdet_from_initial(zero1, q1, 0.8, 0.0);
  CHECK(d1.real() ==
        doctest::Approx(std::norm(q1.w) + std::norm(q1.z) + 0.8));
}

TEST_CASE("evolution equation residuals vanish for the solver") {
  RngStream rng(13, 0);
  for (int k = 0; k < 25; ++k) {
    const int n = 2 + k % 3;
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = 2.0 * rng.uniform() - 1.0;
    const HermitianMatrix h0 = HermitianMatrix::diagonal(d);
    const double a = k % 2 == 0 ? 0.5 : 0.0;
    const Complex z(3.0 * rng.uniform() - 1.5, 0.4 + rng.uniform());
    const double tau = 0.2 + 0.7 * rng.uniform();
    auto u = [&](Complex zz, double tt) {
      return acp_from_initial(h0, zz, tt, a);
    };
    CHECK(pde_residual_acp(u, z, tau, a, n, 1e-3, 1e-3) < 1e-5);
  }
}

TEST_CASE("sign-flipped diffusion is detected") {
  const int n = 2;
  Eigen::VectorXd d(n);
  d << 0.5, -0.5;
  const HermitianMatrix h0 = HermitianMatrix::diagonal(d);
  const double a = 0.5;
  auto flipped = [&](Complex z, double tau) {
    const PolynomialInZ p0 = characteristic_polynomial(h0);
    const LampertiImage img = lamperti_map(z, tau, a, n, EnsembleKind::Hermitian);
    const PolynomialInZ ev = heat_evolve_acp(p0, -img.tau_prime, n);
    return img.prefactor * ev.eval(img.z_prime);
  };
  CHECK(pde_residual_acp(flipped, Complex(0.9, 0.7), 0.5, a, n, 1e-3, 1e-3) >
        0.1);
}

TEST_CASE("quaternionic residuals vanish for the solver") {
  RngStream rng(14, 0);
  for (int k = 0; k < 25; ++k) {
    const int n = 2;
    Matrix x0(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        x0(i, j) = Complex(rng.gaussian(), rng.gaussian()) * 0.3;
    const double a = k % 2 == 0 ? 0.5 : 0.0;
    const Complex z(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    const double s = 0.3 + rng.uniform();
    const double tau = 0.2 + 0.7 * rng.uniform();
    auto dd = [&](Complex zz, double ss, double tt) {
      const QuaternionArgument q{zz, Complex(std::sqrt(ss), 0.0)};
      return qdet_from_initial(x0, q, tt, a);
    };
    CHECK(pde_residual_qdet(dd, z, s, tau, a, n, 1e-3) < 1e-5);
    if (a == 0.0) {
      // same residual with the confinement terms dropped explicitly
      CHECK(pde_residual_qdet(dd, z, s, tau, 0.0, n, 1e-3) < 1e-5);
    }
  }
}

TEST_CASE("characteristics solver against the closed quadratic root") {
  RngStream rng(21, 0);
  for (int k = 0; k < 100; ++k) {
    const double r = 2.0 * rng.uniform();
    const double tp = 0.1 + 2.0 * rng.uniform();
    auto v0 = [&](double rr) { return burgers_initial_profile(Complex(0, 0), rr); };
    const double v = burgers_characteristics(Complex(0, 0), r, tp, v0);
    const double closed = (-r + std::sqrt(r * r + 4.0 * tp)) / (2.0 * tp);
    CHECK(std::abs(v - closed) < 1e-10);
  }
}

TEST_CASE("characteristics at vanishing time reproduce the initial profile") {
  const Complex z(0.4, 0.3);
  auto v0 = [&](double rr) { return burgers_initial_profile(z, rr); };
  const double r = 0.8;
  const double v = burgers_characteristics(z, r, 1e-8, v0);
  CHECK(std::abs(v - burgers_initial_profile(z, r)) < 1e-6);
}

TEST_CASE("interior overlap identity from the characteristics solution") {
  RngStream rng(22, 0);
  for (int k = 0; k < 100; ++k) {
    const double tp = 0.3 + rng.uniform();
    const double rabs = std::sqrt(tp) * (0.05 + 0.85 * rng.uniform());
    const Complex z(rabs, 0.0);
    auto v0 = [&](double rr) { return burgers_initial_profile(z, rr); };
    const double v = burgers_characteristics(z, 1e-9, tp, v0);
    const double expect = (tp - std::norm(z)) / (tp * tp);
    CHECK(v * v == doctest::Approx(expect).epsilon(1e-6));
    // pi * O matches the squared characteristics field
    CHECK(M_PI * free_ginibre_laws(z, tp).overlap ==
          doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("edge law values") {
  CHECK(erfc_edge(0.0) == doctest::Approx(1.0 / (2.0 * M_PI)));
  CHECK(erfc_edge(-8.0) == doctest::Approx(1.0 / M_PI));
  CHECK(erfc_edge(8.0) == doctest::Approx(0.0));
}
