#include "oudiff/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace oudiff {

Complex wigner_green(Complex z, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("wigner_green: a must be > 0");
  const double r = std::sqrt(2.0 / a);
  // sqrt(z-r) sqrt(z+r) keeps the cut on [-r, r] and behaves like z at infinity
  const Complex root = std::sqrt(z - r) * std::sqrt(z + r);
  return a * (z - root);
}

double wigner_density(double x, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("wigner_density: a must be > 0");
  const double supp = 2.0 / a;
  const double t = supp - x * x;
  return t > 0.0 ? (a / M_PI) * std::sqrt(t) : 0.0;
}

MacroscopicLaws ginibre_macroscopic(Complex z, double a) {
  if (!(a > 0.0))
    throw std::invalid_argument("ginibre_macroscopic: a must be > 0");
  MacroscopicLaws out;
  const double r2 = std::norm(z);
  const double edge = 1.0 / (2.0 * a);
  if (r2 <= edge) {  // closed disc
    out.density = 2.0 * a / M_PI;
    out.overlap = 4.0 * a * a / M_PI * (edge - r2);
  }
  return out;
}

MacroscopicLaws free_ginibre_laws(Complex z_prime, double tau_prime) {
  if (!(tau_prime > 0.0))
    throw std::invalid_argument("free_ginibre_laws: tau' must be > 0");
  MacroscopicLaws out;
  const double r2 = std::norm(z_prime);
  if (r2 <= tau_prime) {
    out.density = 1.0 / (M_PI * tau_prime);
    out.overlap = (tau_prime - r2) / (M_PI * tau_prime * tau_prime);
  }
  return out;
}

LampertiImage lamperti_map(Complex z, double tau, double a, int n,
                           EnsembleKind kind) {
  if (a < 0.0) throw std::invalid_argument("lamperti_map: a must be >= 0");
  LampertiImage img;
  if (a == 0.0) {
    img.z_prime = z;
    img.tau_prime = tau;
    img.prefactor = 1.0;
    return img;
  }
  const double growth = std::exp(a * tau);
  img.z_prime = growth * z;
  img.tau_prime = (growth * growth - 1.0) / (2.0 * a);
  const double expo = kind == EnsembleKind::Hermitian ? -0.5 * n : -1.0 * n;
  img.prefactor = std::pow(1.0 + 2.0 * a * img.tau_prime, expo);
  return img;
}

PolynomialInZ PolynomialInZ::from_roots(const std::vector<Complex>& roots) {
  PolynomialInZ p;
  p.coeffs.assign(1, Complex(1.0, 0.0));
  for (const Complex& r : roots) {
    p.coeffs.push_back(Complex(0.0, 0.0));
    for (int k = static_cast<int>(p.coeffs.size()) - 1; k > 0; --k)
      p.coeffs[k] = p.coeffs[k - 1] - r * p.coeffs[k];
    p.coeffs[0] = -r * p.coeffs[0];
  }
  return p;
}

PolynomialInZ characteristic_polynomial(const HermitianMatrix& h0) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h0.matrix(),
                                           Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("characteristic_polynomial: eigensolver failed");
  std::vector<Complex> roots;
  roots.reserve(h0.dim());
  for (int i = 0; i < h0.dim(); ++i)
    roots.emplace_back(es.eigenvalues()(i), 0.0);
  return PolynomialInZ::from_roots(roots);
}

PolynomialInZ heat_evolve_acp(const PolynomialInZ& p0, double tau_prime,
                              int n) {
  if (p0.degree() != n)
    throw std::invalid_argument("heat_evolve_acp: degree must equal n");
  const double t = -tau_prime / (2.0 * n);
  PolynomialInZ out;
  out.coeffs.assign(p0.coeffs.size(), Complex(0.0, 0.0));
  for (int k = 0; k <= n; ++k) {
    double factor = 1.0;  // t^m / m! * (k+2m)! / k!, built by recursion
    Complex acc = p0.coeffs[k];
    for (int m = 1; k + 2 * m <= n; ++m) {
      factor *= t * static_cast<double>(k + 2 * m - 1) *
                static_cast<double>(k + 2 * m) / static_cast<double>(m);
      acc += factor * p0.coeffs[k + 2 * m];
    }
    out.coeffs[k] = acc;
  }
  return out;
}

RadialPolynomial radial_characteristic(const Matrix& x0, Complex z) {
  if (x0.rows() != x0.cols() || x0.rows() < 1)
    throw std::invalid_argument("radial_characteristic: x0 must be square");
  const int n = static_cast<int>(x0.rows());
  Matrix a = -x0;
  a.diagonal().array() += z;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  // expand prod_k (s + sigma_k^2)
  RadialPolynomial d;
  d.z = z;
  d.coeffs.assign(1, 1.0);
  for (int k = 0; k < n; ++k) {
    const double s2 = sv(k) * sv(k);
    d.coeffs.push_back(0.0);
    for (int j = static_cast<int>(d.coeffs.size()) - 1; j > 0; --j)
      d.coeffs[j] = d.coeffs[j - 1] + s2 * d.coeffs[j];
    d.coeffs[0] *= s2;
  }
  return d;
}

RadialPolynomial heat_evolve_qdet(const RadialPolynomial& d0, double tau_prime,
                                  int n) {
  if (d0.degree() != n)
    throw std::invalid_argument("heat_evolve_qdet: degree must equal n");
  const double t = tau_prime / n;
  RadialPolynomial out;
  out.z = d0.z;
  out.coeffs.assign(d0.coeffs.size(), 0.0);
  for (int k = 0; k <= n; ++k) {
    double factor = 1.0;  // t^m / m! * ((k+m)!/k!)^2
    double acc = d0.coeffs[k];
    for (int m = 1; k + m <= n; ++m) {
      const double km = static_cast<double>(k + m);
      factor *= t * km * km / static_cast<double>(m);
      acc += factor * d0.coeffs[k + m];
    }
    out.coeffs[k] = acc;
  }
  return out;
}

Complex acp_from_initial(const HermitianMatrix& h0, Complex z, double tau,
                         double a) {
  if (tau < 0.0) throw std::invalid_argument("acp_from_initial: tau >= 0");
  const int n = h0.dim();
  const PolynomialInZ p0 = characteristic_polynomial(h0);
  const LampertiImage img = lamperti_map(z, tau, a, n, EnsembleKind::Hermitian);
  const PolynomialInZ evolved = heat_evolve_acp(p0, img.tau_prime, n);
  return img.prefactor * evolved.eval(img.z_prime);
}

Complex qdet_from_initial(const Matrix& x0, const QuaternionArgument& q,
                          double tau, double a) {
  if (tau < 0.0) throw std::invalid_argument("qdet_from_initial: tau >= 0");
  const int n = static_cast<int>(x0.rows());
  const LampertiImage img =
      lamperti_map(q.z, tau, a, n, EnsembleKind::Ginibre);
  const RadialPolynomial d0 = radial_characteristic(x0, img.z_prime);
  const RadialPolynomial evolved = heat_evolve_qdet(d0, img.tau_prime, n);
  const double growth = a == 0.0 ? 1.0 : std::exp(2.0 * a * tau);
  const double s_prime = growth * std::norm(q.w);
  return Complex(img.prefactor * evolved.eval(s_prime), 0.0);
}

double pde_residual_acp(const std::function<Complex(Complex, double)>& u,
                        Complex z, double tau, double a, int n, double h_z,
                        double h_tau) {
  const Complex u0 = u(z, tau);
  if (std::abs(u0) < 1e-30)
    throw std::runtime_error("pde_residual_acp: |U| too small at probe");
  const Complex up = u(z + h_z, tau);
  const Complex um = u(z - h_z, tau);
  const Complex dz = (up - um) / (2.0 * h_z);
  const Complex dzz = (up - 2.0 * u0 + um) / (h_z * h_z);
  const Complex dtau = (u(z, tau + h_tau) - u(z, tau - h_tau)) / (2.0 * h_tau);
  const Complex res =
      dtau + dzz / (2.0 * n) - a * z * dz + a * static_cast<double>(n) * u0;
  return std::abs(res) / std::abs(u0);
}

double pde_residual_qdet(
    const std::function<Complex(Complex, double, double)>& d, Complex z,
    double s, double tau, double a, int n, double h) {
  if (!(s > h)) throw std::invalid_argument("pde_residual_qdet: need s > h");
  const Complex d0 = d(z, s, tau);
  if (std::abs(d0) < 1e-30)
    throw std::runtime_error("pde_residual_qdet: |D| too small at probe");
  const Complex dsp = d(z, s + h, tau);
  const Complex dsm = d(z, s - h, tau);
  const Complex ds = (dsp - dsm) / (2.0 * h);
  const Complex dss = (dsp - 2.0 * d0 + dsm) / (h * h);
  const Complex dtau = (d(z, s, tau + h) - d(z, s, tau - h)) / (2.0 * h);
  const Complex dx =
      (d(z + h, s, tau) - d(z - h, s, tau)) / (2.0 * h);
  const Complex dy = (d(z + Complex(0.0, h), s, tau) -
                      d(z - Complex(0.0, h), s, tau)) /
                     (2.0 * h);
  const Complex scale_z = z.real() * dx + z.imag() * dy;
  const Complex res = dtau - (s * dss + ds) / static_cast<double>(n) +
                      2.0 * a * static_cast<double>(n) * d0 -
                      a * (scale_z + 2.0 * s * ds);
  return std::abs(res) / std::abs(d0);
}

double burgers_initial_profile(Complex z_prime, double r_prime) {
  return r_prime / (std::norm(z_prime) + r_prime * r_prime);
}

double burgers_characteristics(Complex z_prime, double r_prime,
                               double tau_prime,
                               const std::function<double(double)>& v0) {
  if (r_prime < 0.0 || !(tau_prime > 0.0))
    throw std::invalid_argument("burgers_characteristics: need r' >= 0, tau' > 0");
  (void)z_prime;  // probe enters through v0, kept for call-site clarity
  auto f = [&](double v) { return v - v0(r_prime + tau_prime * v); };
  double hi = 1.0;
  int grow = 0;
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    if (++grow > 60)
      throw std::runtime_error(
          "burgers_characteristics: no root in bracket (post-shock regime)");
  }
  // scan for the first sign change so the smallest non-negative root is taken
  const int cells = 64;
  double lo = 0.0;
  double flo = f(lo);
  double a = lo, b = hi;
  for (int i = 1; i <= cells; ++i) {
    const double x = hi * static_cast<double>(i) / cells;
    const double fx = f(x);
    if (flo <= 0.0 && fx > 0.0) {
      a = hi * static_cast<double>(i - 1) / cells;
      b = x;
      break;
    }
    flo = fx;
  }
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    const double mid = 0.5 * (a + b);
    if (f(mid) > 0.0)
      b = mid;
    else
      a = mid;
  }
  return 0.5 * (a + b);
}

double erfc_edge(double eta) {
  return std::erfc(std::sqrt(2.0) * eta) / (2.0 * M_PI);
}

double stationary_burgers_residual(Complex z, double a) {
  const Complex g = wigner_green(z, a);
  return std::abs(0.5 * g * g - a * z * g + a);
}

double stationary_burgers_residual_fd(Complex z, double a, double h) {
  const Complex gp = wigner_green(z + h, a);
  const Complex gm = wigner_green(z - h, a);
  const Complex g = wigner_green(z, a);
  const Complex dg = (gp - gm) / (2.0 * h);
  const Complex dzg = ((z + h) * gp - (z - h) * gm) / (2.0 * h);
  return std::abs(g * dg - a * dzg);
}

}  // namespace oudiff
