#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oudiff/analytic.hpp"
#include "oudiff/diffusion.hpp"
#include "oudiff/eigen_dynamics.hpp"
#include "oudiff/observables.hpp"

using namespace oudiff;

namespace {

OUParams make_params(double a, int n, std::uint64_t seed = 1) {
  OUParams p;
  p.a = a;
  p.n = n;
  p.dt = 1e-3;
  p.seed = seed;
  return p;
}

EnsembleBatch constant_batch(const Matrix& m, int count) {
  EnsembleBatch b;
  b.params = make_params(0.5, static_cast<int>(m.rows()));
  b.tau = 0.0;
  b.initial = m;
  b.samples.assign(count, m);
  return b;
}

EnsembleBatch stationary_gue(int n, int count, std::uint64_t seed) {
  const HermitianMatrix h0(n);
  return sample_gue_batch(h0, 40.0, make_params(0.5, n, seed), count);
}

EnsembleBatch stationary_ginibre(int n, int count, std::uint64_t seed) {
  const GinibreMatrix x0(n);
  return sample_ginibre_batch(x0, 40.0, make_params(0.5, n, seed), count);
}

}  // namespace

TEST_CASE("resolvent of a frozen batch is exact") {
  const EnsembleBatch b = constant_batch(Matrix::Zero(5, 5), 8);
  const MeanWithError g = resolvent_mc(Complex(2, 0), b);
  CHECK(g.mean.real() == doctest::Approx(0.5));
  CHECK(g.mean.imag() == doctest::Approx(0.0));
  CHECK(g.se() < 1e-15);
}

TEST_CASE("resolvent decays like 1/z far away") {
  const EnsembleBatch b = stationary_gue(16, 50, 7);
  const Complex z(0.0, 100.0);
  const MeanWithError g = resolvent_mc(z, b);
  CHECK(std::abs(z * g.mean - 1.0) < 0.01);
}

TEST_CASE("resolvent matches the stationary closed form outside the band") {
  const EnsembleBatch b = stationary_gue(64, 200, 11);
  const MeanWithError g = resolvent_mc(Complex(3.0, 0.0), b);
  const Complex expect = wigner_green(Complex(3.0, 0.0), 0.5);
  CHECK(expect.real() == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0));
  CHECK(std::abs(g.mean - expect) < 3.0 * g.se() + 1e-3);
}

TEST_CASE("real-line histogram: delta batch and normalization") {
  const EnsembleBatch b = constant_batch(Matrix::Identity(4, 4), 6);
  const SpectralHistogram h = density_real(b, -2.0, 2.0, 8);
  CHECK(h.integral() == doctest::Approx(1.0).epsilon(1e-12));
  int nonzero = 0;
  for (int k = 0; k < h.bins(); ++k)
    if (h.counts[k] > 0) ++nonzero;
  CHECK(nonzero == 1);  // all mass at 1
}

TEST_CASE("stationary spectra fill the semicircle") {
  const EnsembleBatch b = stationary_gue(32, 100, 13);
  const SpectralHistogram h = density_real(b, -2.2, 2.2, 20);
  double l1 = 0.0;
  for (int k = 0; k < h.bins(); ++k) {
    const double c = 0.5 * (h.edges[k] + h.edges[k + 1]);
    l1 += std::abs(h.density[k] - wigner_density(c, 0.5)) * h.bin_measure(k);
  }
  CHECK(l1 < 0.1);
}

TEST_CASE("radial histogram of a frozen spectrum") {
  std::vector<Eigen::VectorXcd> spectra(3, Eigen::VectorXcd::Zero(4));
  const SpectralHistogram h =
      density_complex_radial(spectra, {0.0, 0.1, 0.2, 0.5});
  CHECK(h.counts[0] == 12);
  CHECK(h.integral() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plane-grid histogram normalizes to one") {
  const EnsembleBatch b = stationary_ginibre(24, 40, 17);
  std::vector<Eigen::VectorXcd> spectra;
  for (const auto& m : b.samples) spectra.push_back(eigenvalues_only(m));
  const Eigen::MatrixXd g =
      density_complex_grid(spectra, -1.5, 1.5, -1.5, 1.5, 15, 15);
  CHECK(g.sum() * 0.2 * 0.2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("generalized resolvent of the zero matrix is the closed inverse") {
  const EnsembleBatch b = constant_batch(Matrix::Zero(3, 3), 4);
  const QuaternionArgument q{Complex(0, 0), Complex(1, 0)};
  const GeneralizedResolvent g = generalized_resolvent_mc(q, b);
  CHECK(std::abs(g.g11) < 1e-14);
  CHECK(std::abs(g.g11bar - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(g.g1bar1 - Complex(-1, 0)) < 1e-14);
  CHECK(std::abs(g.g1bar1bar() - std::conj(g.g11)) == 0.0);

  // general z with x = 0: G = [[conj(z), wbar], [-w, z]] / (|z|^2 + |w|^2)
  const QuaternionArgument q2{Complex(0.6, -0.3), Complex(0.4, 0.2)};
  const GeneralizedResolvent g2 = generalized_resolvent_mc(q2, b);
  const double denom = std::norm(q2.z) + std::norm(q2.w);
  CHECK(std::abs(g2.g11 - std::conj(q2.z) / denom) < 1e-13);
  CHECK(std::abs(g2.g11bar - std::conj(q2.w) / denom) < 1e-13);
  CHECK(std::abs(g2.g1bar1 - (-q2.w / denom)) < 1e-13);
}

TEST_CASE("per-sample block symmetry of the generalized resolvent") {
  const EnsembleBatch b = stationary_ginibre(12, 5, 19);
  const QuaternionArgument q{Complex(0.3, 0.1), Complex(0.05, 0.0)};
  for (const auto& x : b.samples) {
    const Eigen::Matrix2cd g = generalized_resolvent_sample(q, x);
    CHECK(std::abs(g(1, 1) - std::conj(g(0, 0))) < 1e-12);
    const Complex prod = g(0, 1) * g(1, 0);
    CHECK(std::abs(prod.imag()) < 1e-12);
    CHECK(prod.real() <= 1e-12);
  }
}

TEST_CASE("overlap product from the off-diagonal entries") {
  const EnsembleBatch b = stationary_ginibre(64, 200, 23);
  const QuaternionArgument q{Complex(0.5, 0.0), Complex(0.05, 0.0)};
  const GeneralizedResolvent g = generalized_resolvent_mc(q, b);
  const double target = ginibre_macroscopic(q.z, 0.5).overlap;  // 0.2387
  CHECK(target == doctest::Approx((1.0 - 0.25) / M_PI));
  CHECK(g.overlap_product() == doctest::Approx(target).epsilon(0.10));
}

TEST_CASE("holomorphic region reduces to the trivial resolvent") {
  const EnsembleBatch b = stationary_ginibre(48, 100, 29);
  const QuaternionArgument q{Complex(2.0, 0.0), Complex(1e-6, 0.0)};
  const GeneralizedResolvent g = generalized_resolvent_mc(q, b);
  CHECK(std::abs(g.g11 - 0.5) < 3.0 * g.se_g11 + 2e-3);
  CHECK(std::abs(g.g11bar) < 3.0 * g.se_g11bar + 1e-5);
  CHECK(std::abs(g.g1bar1) < 3.0 * g.se_g1bar1 + 1e-5);
}

TEST_CASE("gauss law on closed-form fields") {
  const int m = 41;
  const double h = 0.05, lo = -1.0;
  Eigen::MatrixXcd holo(m, m), anti(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Complex z(lo + j * h + 2.5, lo + i * h);  // keep off the origin
      holo(i, j) = 1.0 / z;
      anti(i, j) = std::conj(Complex(lo + j * h, lo + i * h));
    }
  std::vector<std::string> warnings;
  const Eigen::MatrixXd rho_holo = density_from_gauss_law(holo, h, &warnings);
  CHECK(rho_holo.block(1, 1, m - 2, m - 2).cwiseAbs().maxCoeff() < 5e-4);
  const Eigen::MatrixXd rho_anti = density_from_gauss_law(anti, h, &warnings);
  CHECK(std::abs(rho_anti(m / 2, m / 2) - 1.0 / M_PI) < 1e-10);
  CHECK(warnings.empty());
  density_from_gauss_law(holo, 0.2, &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("gauss law integrates the stationary disc field to one") {
  // analytic stationary field: 2 a zbar inside the disc, 1/z outside
  const double a = 0.5, h = 0.05;
  const int m = 61;  // spans [-1.5, 1.5]
  Eigen::MatrixXcd field(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Complex z(-1.5 + j * h, -1.5 + i * h);
      field(i, j) =
          std::norm(z) <= 1.0 / (2 * a) ? 2.0 * a * std::conj(z) : 1.0 / z;
    }
  const Eigen::MatrixXd rho = density_from_gauss_law(field, h, nullptr);
  CHECK(rho.sum() * h * h == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gauss law on the sampled field recovers the flat density") {
  const int n = 64, samples = 200;
  const EnsembleBatch b = stationary_ginibre(n, samples, 31);
  const double h = 0.1, w = 1e-2;
  const int m = 9;  // grid over [-0.4, 0.4]^2
  Eigen::MatrixXcd field(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const QuaternionArgument q{Complex(-0.4 + j * h, -0.4 + i * h),
                                 Complex(w, 0.0)};
      Complex acc(0, 0);
      for (const auto& x : b.samples)
        acc += generalized_resolvent_sample(q, x)(0, 0);
      field(i, j) = acc / static_cast<double>(samples);
    }
  const Eigen::MatrixXd rho = density_from_gauss_law(field, h, nullptr);
  for (int i = 2; i < m - 2; ++i)
    for (int j = 2; j < m - 2; ++j)
      CHECK(std::abs(rho(i, j) - 1.0 / M_PI) < 0.15 / M_PI);
}

TEST_CASE("averaged determinant of a frozen batch is exact") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  const EnsembleBatch b = constant_batch(m, 5);
  const MeanWithError u = acp_mc(Complex(2, 0), b);
  CHECK(u.mean.real() == doctest::Approx(3.0));
  CHECK(u.mean.imag() == 0.0);
}

TEST_CASE("averaged determinant is monic at large z") {
  const EnsembleBatch b = stationary_gue(6, 100, 37);
  const Complex z(50.0, 0.0);
  const MeanWithError u = acp_mc(z, b);
  CHECK(std::abs(u.mean / std::pow(z, 6) - 1.0) < 0.01);
}

TEST_CASE("averaged determinant against the evolved polynomial") {
  const int n = 2;
  const HermitianMatrix h0(n);
  const OUParams p = make_params(0.0, n, 41);
  const EnsembleBatch b = sample_gue_batch(h0, 1.0, p, 20000);
  const Complex z(0.0, 0.0);
  const MeanWithError u = acp_mc(z, b);
  const Complex expect = acp_from_initial(h0, z, 1.0, 0.0);
  CHECK(expect.real() == doctest::Approx(-0.5));
  CHECK(std::abs(u.mean - expect) < 3.0 * u.se());
}

TEST_CASE("determinant phases stay real for symmetric frozen samples") {
  Matrix m(3, 3);
  m.setZero();
  m(0, 1) = m(1, 0) = 0.4;
  m(2, 2) = -0.7;
  const EnsembleBatch b = constant_batch(m, 3);
  for (double zr : {-1.3, 0.2, 2.4}) {
    const MeanWithError u = acp_mc(Complex(zr, 0.0), b);
    CHECK(u.mean.imag() == doctest::Approx(0.0).epsilon(1e-14));
  }
  // complex-hermitian batch: imaginary part compatible with zero
  const EnsembleBatch bh = stationary_gue(8, 4000, 43);
  const MeanWithError uh = acp_mc(Complex(0.7, 0.0), bh);
  CHECK(std::abs(uh.mean.imag()) < 3.0 * uh.se_im + 1e-12 * std::abs(uh.mean));
}

TEST_CASE("block determinant of a frozen zero batch") {
  const EnsembleBatch b = constant_batch(Matrix::Zero(3, 3), 4);
  const QuaternionArgument q{Complex(0.6, 0.2), Complex(0.3, -0.1)};
  const MeanWithError d = qdet_mc(q, b);
  const double expect = std::pow(std::norm(q.z) + std::norm(q.w), 3);
  CHECK(d.mean.real() == doctest::Approx(expect));
  CHECK(std::abs(d.mean.imag()) < 1e-12 * expect);
}

TEST_CASE("block determinant against the evolved radial polynomial") {
  const int n = 2;
  const GinibreMatrix x0(n);
  const OUParams p = make_params(0.5, n, 47);
  const EnsembleBatch b = sample_ginibre_batch(x0, 0.5, p, 20000);
  const QuaternionArgument q{Complex(1.0, 0.0), Complex(0.3, 0.0)};
  const MeanWithError d = qdet_mc(q, b);
  const Complex expect = qdet_from_initial(x0.matrix(), q, 0.5, 0.5);
  CHECK(std::abs(d.mean - expect) < 3.0 * d.se());
  CHECK(std::abs(d.mean.imag()) < 3.0 * d.se_im + 1e-12 * std::abs(d.mean));
}

TEST_CASE("correlator field: hermitian samples reduce to the density") {
  // hermitian input: every diagonal overlap is 1, so the correlator is the
  // radial spectral density divided by n
  const int n = 16, samples = 60;
  const EnsembleBatch b = stationary_gue(n, samples, 53);
  std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXd>> data;
  std::vector<Eigen::VectorXcd> spectra;
  for (const auto& m : b.samples) {
    const EigenSystem sys = eigen_decompose(m);
    const OverlapMatrix ov = overlaps(sys);
    Eigen::VectorXd diag(n);
    for (int i = 0; i < n; ++i) diag(i) = ov.diag(i);
    data.emplace_back(sys.values, diag);
    spectra.push_back(sys.values);
  }
  const std::vector<double> edges{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  const CorrelatorField f = correlator_estimate(data, edges, n);
  const SpectralHistogram h = density_complex_radial(spectra, edges);
  for (int k = 0; k < f.bins(); ++k)
    CHECK(f.value[k] ==
          doctest::Approx(h.density[k] / n).epsilon(1e-9).scale(1.0 / n));
}

TEST_CASE("correlator integral identity") {
  const int n = 12, samples = 40;
  const EnsembleBatch b = stationary_ginibre(n, samples, 59);
  std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXd>> data;
  double direct = 0.0;
  for (const auto& m : b.samples) {
    const EigenSystem sys = eigen_decompose(m);
    const OverlapMatrix ov = overlaps(sys);
    Eigen::VectorXd diag(n);
    for (int i = 0; i < n; ++i) {
      diag(i) = ov.diag(i);
      direct += ov.diag(i);
    }
    data.emplace_back(sys.values, diag);
  }
  direct /= static_cast<double>(samples) * n * n;
  // edges cover every eigenvalue, so binning loses nothing
  const std::vector<double> edges{0.0, 0.4, 0.8, 1.2, 1.6, 2.0, 4.0};
  const CorrelatorField f = correlator_estimate(data, edges, n);
  CHECK(f.integral() == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("edge profile machinery on synthetic uniform-disc spectra") {
  // points uniform on the unit disc: density 1/pi for eta well inside
  RngStream rng(61, 0);
  const int n = 256, samples = 400;
  std::vector<Eigen::VectorXcd> spectra(samples, Eigen::VectorXcd(n));
  for (auto& s : spectra)
    for (int i = 0; i < n; ++i) {
      const double r = std::sqrt(rng.uniform());
      const double th = 2.0 * M_PI * rng.uniform();
      s(i) = std::polar(r, th);
    }
  const EdgeProfile p = edge_profile(spectra, n, -4.0, 4.0, 0.5);
  CHECK(!p.low_statistics);
  for (int k = 0; k < p.bins(); ++k) {
    const double c = p.eta_center(k);
    if (c < -1.0)
      CHECK(p.density[k] == doctest::Approx(1.0 / M_PI).epsilon(0.08));
    if (c > 0.5) CHECK(p.density[k] == doctest::Approx(0.0));
  }
  const EdgeProfile tiny =
      edge_profile({spectra[0]}, n, 3.0, 4.0, 0.5);
  CHECK(tiny.low_statistics);
}

TEST_CASE("jackknife errors shrink with sample count") {
  const EnsembleBatch big = stationary_gue(12, 400, 67);
  EnsembleBatch half = big;
  half.samples.resize(200);
  const double r_res = resolvent_mc(Complex(2.6, 0.0), half).se() /
                       resolvent_mc(Complex(2.6, 0.0), big).se();
  const double r_acp = acp_mc(Complex(0.4, 0.0), half).se() /
                       acp_mc(Complex(0.4, 0.0), big).se();
  CHECK(r_res > std::sqrt(2.0) * 0.8);
  CHECK(r_res < std::sqrt(2.0) * 1.2);
  CHECK(r_acp > std::sqrt(2.0) * 0.8);
  CHECK(r_acp < std::sqrt(2.0) * 1.2);
}
