#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oudiff {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Harmonic confinement strength a, dimension n, integrator step dt and the
// root seed for all random streams derived from a run.
struct OUParams {
  double a = 0.5;
  int n = 1;
  double dt = 2e-4;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("OUParams: n must be >= 1");
    if (!(a >= 0.0)) throw std::invalid_argument("OUParams: a must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("OUParams: dt must be > 0");
  }

  // step size used by trajectory experiments unless overridden
  static double default_dt(double a) { return a > 0.0 ? 1e-4 / a : 1e-4; }
};

// Hermitian matrix with H = H^dagger maintained exactly by construction.
// Entries are H_ij = x_ij + i y_ij with x symmetric and y antisymmetric.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(int n) : m_(Matrix::Zero(n, n)) {
    if (n < 1) throw std::invalid_argument("HermitianMatrix: n must be >= 1");
  }

  // (M + M^dagger)/2 of an arbitrary square matrix; exact in IEEE arithmetic
  static HermitianMatrix symmetrized(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw std::invalid_argument("HermitianMatrix: input must be square");
    HermitianMatrix h(static_cast<int>(m.rows()));
    const int n = h.dim();
    for (int i = 0; i < n; ++i) {
      h.m_(i, i) = Complex(0.5 * (m(i, i).real() + m(i, i).real()), 0.0);
      for (int j = i + 1; j < n; ++j) {
        const double x = 0.5 * (m(i, j).real() + m(j, i).real());
        const double y = 0.5 * (m(i, j).imag() - m(j, i).imag());
        h.set_upper(i, j, Complex(x, y));
      }
    }
    return h;
  }

  static HermitianMatrix diagonal(const Eigen::VectorXd& d) {
    HermitianMatrix h(static_cast<int>(d.size()));
    for (int i = 0; i < d.size(); ++i) h.m_(i, i) = Complex(d(i), 0.0);
    return h;
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  double x(int i, int j) const { return m_(i, j).real(); }
  double y(int i, int j) const { return m_(i, j).imag(); }

  void set_diagonal(int i, double v) { m_(i, i) = Complex(v, 0.0); }
  // writes (i, j) with i < j and mirrors the conjugate into (j, i)
  void set_upper(int i, int j, Complex v) {
    m_(i, j) = v;
    m_(j, i) = std::conj(v);
  }

 private:
  Matrix m_;
};

// General complex square matrix; all 2 n^2 real components are independent.
class GinibreMatrix {
 public:
  explicit GinibreMatrix(int n) : m_(Matrix::Zero(n, n)) {
    if (n < 1) throw std::invalid_argument("GinibreMatrix: n must be >= 1");
  }
  explicit GinibreMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw std::invalid_argument("GinibreMatrix: input must be square");
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }

  double x(int i, int j) const { return m_(i, j).real(); }
  double y(int i, int j) const { return m_(i, j).imag(); }

 private:
  Matrix m_;
};

// Probe pair (z, w): z scans the spectral plane, w the orthogonal plane that
// regulates the inversion and couples to eigenvector overlaps.
struct QuaternionArgument {
  Complex z;
  Complex w;

  Eigen::Matrix2cd embed() const {
    Eigen::Matrix2cd q;
    q << z, -std::conj(w), w, std::conj(z);
    return q;
  }

  // components of q0 + i sigma_j q_j with z = q0 + i q3, w = -q2 + i q1
  std::array<double, 4> components() const {
    return {z.real(), w.imag(), -w.real(), z.imag()};
  }
  static QuaternionArgument from_components(const std::array<double, 4>& q) {
    return {Complex(q[0], q[3]), Complex(-q[2], q[1])};
  }
};

inline Eigen::Matrix2cd quaternion_embed(const QuaternionArgument& q) {
  return q.embed();
}

// bTr: 2n x 2n block matrix -> 2 x 2 matrix of block traces
Eigen::Matrix2cd block_trace(const Matrix& m, int n);

// Monte Carlo sample container; all samples share dimension and time.
struct EnsembleBatch {
  OUParams params;
  double tau = 0.0;
  Matrix initial;
  std::vector<Matrix> samples;

  int dim() const { return params.n; }
  int size() const { return static_cast<int>(samples.size()); }
};

}  // namespace oudiff
