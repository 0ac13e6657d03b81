#pragma once

#include <functional>
#include <vector>

#include "oudiff/types.hpp"

namespace oudiff {

// ---------------------------------------------------------------------------
// Macroscopic laws
// ---------------------------------------------------------------------------

// Stationary resolvent G(z) = a (z - sqrt(z^2 - 2/a)), branch with G ~ 1/z at
// infinity and Im G < 0 approaching the support from the upper half plane.
Complex wigner_green(Complex z, double a);

// Stationary spectral density (a/pi) sqrt(2/a - x^2) on |x| <= sqrt(2/a).
double wigner_density(double x, double a);

struct MacroscopicLaws {
  double density = 0.0;
  double overlap = 0.0;
};

// Stationary disc laws: density (2a/pi) and overlap (4a^2/pi)(1/2a - |z|^2)
// on the closed disc |z|^2 <= 1/(2a).
MacroscopicLaws ginibre_macroscopic(Complex z, double a);

// Free-diffusion disc laws in primed variables: density 1/(pi tau') and
// overlap (tau' - |z'|^2)/(pi tau'^2) on |z'|^2 <= tau'.
MacroscopicLaws free_ginibre_laws(Complex z_prime, double tau_prime);

// ---------------------------------------------------------------------------
// Change of variables mapping the confined process onto free diffusion
// ---------------------------------------------------------------------------

enum class EnsembleKind { Hermitian, Ginibre };

struct LampertiImage {
  Complex z_prime;
  double tau_prime = 0.0;
  double prefactor = 1.0;
};

// z' = e^{a tau} z, tau' = (e^{2 a tau} - 1)/(2a) (tau for a = 0); prefactor
// (1 + 2 a tau')^{-n/2} for the hermitian determinant, exponent -n for the
// 2n-dimensional quaternionic one.
LampertiImage lamperti_map(Complex z, double tau, double a, int n,
                           EnsembleKind kind);

// ---------------------------------------------------------------------------
// Exact polynomial solutions of the determinant diffusion equations
// ---------------------------------------------------------------------------

// Polynomial in z, coeffs[k] multiplies z^k.
struct PolynomialInZ {
  std::vector<Complex> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  Complex eval(Complex z) const {
    Complex acc{0.0, 0.0};
    for (int k = degree(); k >= 0; --k) acc = acc * z + coeffs[k];
    return acc;
  }
  static PolynomialInZ from_roots(const std::vector<Complex>& roots);
};

// Monic characteristic polynomial det(z - h0).
PolynomialInZ characteristic_polynomial(const HermitianMatrix& h0);

// Applies exp(-(tau'/2n) d^2/dz^2); the series terminates on polynomials, so
// the result solves d_tau' U' = -(1/2n) d_z'z' U' exactly.
PolynomialInZ heat_evolve_acp(const PolynomialInZ& p0, double tau_prime, int n);

// Polynomial in s = |w|^2 at a fixed spectral probe z; coefficients are real
// (elementary symmetric functions of the singular values squared of z - X0).
struct RadialPolynomial {
  Complex z;
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double eval(double s) const {
    double acc = 0.0;
    for (int k = degree(); k >= 0; --k) acc = acc * s + coeffs[k];
    return acc;
  }
};

// det[(z - x0)(conj(z) - x0^dagger) + s] as a polynomial in s.
RadialPolynomial radial_characteristic(const Matrix& x0, Complex z);

// Applies exp((tau'/n) L) with L s^k = k^2 s^{k-1}, the radial form of the
// w-plane Laplacian; exact solution of d_tau' D' = (1/n) d_w'w'bar D'.
RadialPolynomial heat_evolve_qdet(const RadialPolynomial& d0, double tau_prime,
                                  int n);

// <det(z - H)>_tau for the confined process started at h0, via the map to
// free diffusion and the terminating heat series.
Complex acp_from_initial(const HermitianMatrix& h0, Complex z, double tau,
                         double a);

// <det(Q - X)>_tau for the confined process started at x0.
Complex qdet_from_initial(const Matrix& x0, const QuaternionArgument& q,
                          double tau, double a);

// ---------------------------------------------------------------------------
// Finite-difference residuals of the exact evolution equations
// ---------------------------------------------------------------------------

// evaluator: U(z, tau). Residual of
//   d_tau U + (1/2n) d_zz U - a z d_z U + a n U = 0,
// normalized by |U|; z-derivatives use complex steps along the real axis.
double pde_residual_acp(const std::function<Complex(Complex, double)>& u,
                        Complex z, double tau, double a, int n, double h_z,
                        double h_tau);

// evaluator: D(z, s, tau) with s = |w|^2. Residual of
//   d_tau D - (1/n)(s D_ss + D_s) + 2 n a D - a (x D_x + y D_y + 2 s D_s) = 0
// normalized by |D|.
double pde_residual_qdet(
    const std::function<Complex(Complex, double, double)>& d, Complex z,
    double s, double tau, double a, int n, double h);

// ---------------------------------------------------------------------------
// Characteristics of the inviscid w-plane Burgers flow
// ---------------------------------------------------------------------------

// Initial radial profile for X0 = 0: v0(r') = r'/(|z'|^2 + r'^2).
double burgers_initial_profile(Complex z_prime, double r_prime);

// Solves v = v0(r' + tau' v) by bracketing the first sign change and
// bisecting to 1e-12; throws if no root exists in the bracket (post-shock).
double burgers_characteristics(Complex z_prime, double r_prime,
                               double tau_prime,
                               const std::function<double(double)>& v0);

// ---------------------------------------------------------------------------
// Edge profile and stationary-flow residuals
// ---------------------------------------------------------------------------

// (1/2pi) Erfc(sqrt(2) eta): disc edge density under |z| - 1 = eta N^{-1/2}.
double erfc_edge(double eta);

// |G^2/2 - a z G + a| for G = wigner_green(z, a).
double stationary_burgers_residual(Complex z, double a);

// Finite-difference residual of the stationary flow equation
// G d_z G - a d_z(z G) = 0 at step h.
double stationary_burgers_residual_fd(Complex z, double a, double h);

}  // namespace oudiff
