#include "oudiff/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "oudiff/eigen_dynamics.hpp"

namespace oudiff {

namespace {

Eigen::VectorXd hermitian_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian eigensolver failed");
  return es.eigenvalues();
}

// log-magnitude and phase of det via pivoted LU
struct LogDet {
  double log_mag = 0.0;
  double phase = 0.0;

  Complex value() const {
    if (log_mag > 700.0)
      throw std::overflow_error("determinant not representable in double");
    return std::exp(log_mag) * Complex(std::cos(phase), std::sin(phase));
  }
};

LogDet log_det(const Matrix& m) {
  Eigen::PartialPivLU<Matrix> lu(m);
  LogDet out;
  const auto& diag = lu.matrixLU().diagonal();
  for (int i = 0; i < diag.size(); ++i) {
    out.log_mag += std::log(std::abs(diag(i)));
    out.phase += std::arg(diag(i));
  }
  if (lu.permutationP().determinant() < 0) out.phase += M_PI;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

SpectralHistogram density_real(const EnsembleBatch& batch, double lo,
                               double hi, int bins) {
  if (batch.samples.empty())
    throw std::invalid_argument("density_real: empty batch");
  if (!(hi > lo) || bins < 1)
    throw std::invalid_argument("density_real: bad domain");
  SpectralHistogram h;
  h.edges.resize(bins + 1);
  for (int k = 0; k <= bins; ++k)
    h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / bins;
  h.counts.assign(bins, 0);
  std::vector<RunningStats> stats(bins);
  const double width = (hi - lo) / bins;
  for (const Matrix& m : batch.samples) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(m);
    std::vector<long> local(bins, 0);
    for (int i = 0; i < ev.size(); ++i) {
      const int k = static_cast<int>(std::floor((ev(i) - lo) / width));
      if (k < 0 || k >= bins) {
        ++h.outside;
      } else {
        ++local[k];
      }
      ++h.total;
    }
    for (int k = 0; k < bins; ++k) {
      h.counts[k] += local[k];
      stats[k].add(static_cast<double>(local[k]));
    }
  }
  const long inside = h.total - h.outside;
  if (inside < 1) throw std::runtime_error("density_real: no points in range");
  h.density.resize(bins);
  h.se.resize(bins);
  const double norm = 1.0 / (static_cast<double>(inside) * width);
  const double m = static_cast<double>(batch.samples.size());
  for (int k = 0; k < bins; ++k) {
    h.density[k] = static_cast<double>(h.counts[k]) * norm;
    h.se[k] = std::sqrt(m * stats[k].variance()) * norm;
  }
  return h;
}

SpectralHistogram density_complex_radial(
    const std::vector<Eigen::VectorXcd>& spectra,
    const std::vector<double>& radial_edges) {
  if (spectra.empty())
    throw std::invalid_argument("density_complex_radial: empty input");
  if (radial_edges.size() < 2)
    throw std::invalid_argument("density_complex_radial: need >= 2 edges");
  const int bins = static_cast<int>(radial_edges.size()) - 1;
  SpectralHistogram h;
  h.radial = true;
  h.edges = radial_edges;
  h.counts.assign(bins, 0);
  std::vector<RunningStats> stats(bins);
  for (const auto& zs : spectra) {
    std::vector<long> local(bins, 0);
    for (int i = 0; i < zs.size(); ++i) {
      const double r = std::abs(zs(i));
      const auto it =
          std::upper_bound(radial_edges.begin(), radial_edges.end(), r);
      const int k = static_cast<int>(it - radial_edges.begin()) - 1;
      if (k < 0 || k >= bins) {
        ++h.outside;
      } else {
        ++local[k];
      }
      ++h.total;
    }
    for (int k = 0; k < bins; ++k) {
      h.counts[k] += local[k];
      stats[k].add(static_cast<double>(local[k]));
    }
  }
  const long inside = h.total - h.outside;
  if (inside < 1)
    throw std::runtime_error("density_complex_radial: no points in range");
  h.density.resize(bins);
  h.se.resize(bins);
  const double m = static_cast<double>(spectra.size());
  for (int k = 0; k < bins; ++k) {
    const double norm = 1.0 / (static_cast<double>(inside) * h.bin_measure(k));
    h.density[k] = static_cast<double>(h.counts[k]) * norm;
    h.se[k] = std::sqrt(m * stats[k].variance()) * norm;
  }
  return h;
}

SpectralHistogram density_complex_radial(const EnsembleBatch& batch,
                                         const std::vector<double>& edges) {
  std::vector<Eigen::VectorXcd> spectra;
  spectra.reserve(batch.samples.size());
  for (const Matrix& m : batch.samples) spectra.push_back(eigenvalues_only(m));
  return density_complex_radial(spectra, edges);
}

Eigen::MatrixXd density_complex_grid(
    const std::vector<Eigen::VectorXcd>& spectra, double re_lo, double re_hi,
    double im_lo, double im_hi, int nx, int ny) {
  if (spectra.empty() || nx < 1 || ny < 1)
    throw std::invalid_argument("density_complex_grid: bad input");
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(ny, nx);
  const double wx = (re_hi - re_lo) / nx;
  const double wy = (im_hi - im_lo) / ny;
  long total = 0;
  for (const auto& zs : spectra) {
    for (int i = 0; i < zs.size(); ++i) {
      ++total;
      const int jx = static_cast<int>(std::floor((zs(i).real() - re_lo) / wx));
      const int jy = static_cast<int>(std::floor((zs(i).imag() - im_lo) / wy));
      if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
      grid(jy, jx) += 1.0;
    }
  }
  if (total > 0) grid /= static_cast<double>(total) * wx * wy;
  return grid;
}

// ---------------------------------------------------------------------------
// Resolvents
// ---------------------------------------------------------------------------

MeanWithError resolvent_mc(Complex z, const EnsembleBatch& batch) {
  if (batch.samples.empty())
    throw std::invalid_argument("resolvent_mc: empty batch");
  std::vector<Complex> values;
  values.reserve(batch.samples.size());
  long skipped = 0;
  for (const Matrix& m : batch.samples) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(m);
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    Complex acc{0.0, 0.0};
    bool singular = false;
    for (int i = 0; i < ev.size(); ++i) {
      const Complex d = z - ev(i);
      if (std::abs(d) < 1e-13 * scale) {
        singular = true;
        break;
      }
      acc += 1.0 / d;
    }
    if (singular) {
      ++skipped;
      continue;
    }
    values.push_back(acc / static_cast<double>(ev.size()));
  }
  return jackknife_mean(values, skipped);
}

Eigen::Matrix2cd generalized_resolvent_sample(const QuaternionArgument& q,
                                              const Matrix& x) {
  // Blockwise inverse of [[A, -wbar],[w, A^dagger]] with A = z - X: the
  // diagonal traces are Tr (A^dagger A + |w|^2)^-1 A^dagger and its
  // conjugate, the off-diagonal ones +-(wbar, w) Tr (A^dagger A + |w|^2)^-1,
  // so one hermitian factorization yields all four entries and the conjugate
  // block symmetry holds exactly per sample.
  const int n = static_cast<int>(x.rows());
  Matrix a = -x;
  a.diagonal().array() += q.z;
  Matrix b = a.adjoint() * a;
  b.diagonal().array() += std::norm(q.w);
  Eigen::LLT<Matrix> llt(b);
  Eigen::Matrix2cd g;
  if (llt.info() != Eigen::Success) {
    g.setConstant(std::numeric_limits<double>::quiet_NaN());
    return g;
  }
  const Complex g11 = llt.solve(a.adjoint()).trace() / static_cast<double>(n);
  const double t =
      llt.solve(Matrix::Identity(n, n)).trace().real() / static_cast<double>(n);
  g(0, 0) = g11;
  g(0, 1) = std::conj(q.w) * t;
  g(1, 0) = -q.w * t;
  g(1, 1) = std::conj(g11);
  return g;
}

GeneralizedResolvent generalized_resolvent_mc(const QuaternionArgument& q,
                                              const EnsembleBatch& batch) {
  if (batch.samples.empty())
    throw std::invalid_argument("generalized_resolvent_mc: empty batch");
  if (!(std::abs(q.w) > 0.0))
    throw std::invalid_argument(
        "generalized_resolvent_mc: |w| > 0 required (regulator)");
  std::vector<Complex> v11, v12, v21;
  long skipped = 0;
  for (const Matrix& x : batch.samples) {
    const Eigen::Matrix2cd g = generalized_resolvent_sample(q, x);
    if (!g.allFinite()) {
      ++skipped;
      continue;
    }
    v11.push_back(g(0, 0));
    v12.push_back(g(0, 1));
    v21.push_back(g(1, 0));
  }
  const MeanWithError m11 = jackknife_mean(v11, skipped);
  const MeanWithError m12 = jackknife_mean(v12, skipped);
  const MeanWithError m21 = jackknife_mean(v21, skipped);
  GeneralizedResolvent out;
  out.g11 = m11.mean;
  out.g11bar = m12.mean;
  out.g1bar1 = m21.mean;
  out.se_g11 = m11.se();
  out.se_g11bar = m12.se();
  out.se_g1bar1 = m21.se();
  out.count = m11.count;
  out.skipped = skipped;
  return out;
}

Eigen::MatrixXd density_from_gauss_law(const Eigen::MatrixXcd& g11_field,
                                       double spacing,
                                       std::vector<std::string>* warnings) {
  if (g11_field.rows() < 3 || g11_field.cols() < 3)
    throw std::invalid_argument("density_from_gauss_law: grid too small");
  if (!(spacing > 0.0))
    throw std::invalid_argument("density_from_gauss_law: bad spacing");
  if (spacing > 0.1 && warnings)
    warnings->push_back("density_from_gauss_law: grid spacing > 0.1");
  const int ny = static_cast<int>(g11_field.rows());
  const int nx = static_cast<int>(g11_field.cols());
  Eigen::MatrixXd rho(ny, nx);
  auto dre = [&](int i, int j) {  // d/dx along columns
    if (j == 0) return (g11_field(i, 1) - g11_field(i, 0)) / spacing;
    if (j == nx - 1)
      return (g11_field(i, nx - 1) - g11_field(i, nx - 2)) / spacing;
    return (g11_field(i, j + 1) - g11_field(i, j - 1)) / (2.0 * spacing);
  };
  auto dim = [&](int i, int j) {  // d/dy along rows
    if (i == 0) return (g11_field(1, j) - g11_field(0, j)) / spacing;
    if (i == ny - 1)
      return (g11_field(ny - 1, j) - g11_field(ny - 2, j)) / spacing;
    return (g11_field(i + 1, j) - g11_field(i - 1, j)) / (2.0 * spacing);
  };
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j) {
      const Complex dzbar = 0.5 * (dre(i, j) + Complex(0.0, 1.0) * dim(i, j));
      rho(i, j) = dzbar.real() / M_PI;
    }
  return rho;
}

// ---------------------------------------------------------------------------
// Averaged determinants
// ---------------------------------------------------------------------------

std::vector<MeanWithError> acp_mc_grid(const std::vector<Complex>& zs,
                                       const EnsembleBatch& batch) {
  if (batch.samples.empty())
    throw std::invalid_argument("acp_mc: empty batch");
  std::vector<std::vector<Complex>> per_z(zs.size());
  for (auto& v : per_z) v.reserve(batch.samples.size());
  for (const Matrix& m : batch.samples) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(m);
    for (size_t p = 0; p < zs.size(); ++p) {
      double log_mag = 0.0, phase = 0.0;
      for (int i = 0; i < ev.size(); ++i) {
        const Complex d = zs[p] - ev(i);
        log_mag += std::log(std::abs(d));
        phase += std::arg(d);
      }
      if (log_mag > 700.0)
        throw std::overflow_error("acp_mc: determinant not representable");
      per_z[p].push_back(std::exp(log_mag) *
                         Complex(std::cos(phase), std::sin(phase)));
    }
  }
  std::vector<MeanWithError> out;
  out.reserve(zs.size());
  for (const auto& v : per_z) out.push_back(jackknife_mean(v));
  return out;
}

MeanWithError acp_mc(Complex z, const EnsembleBatch& batch) {
  return acp_mc_grid({z}, batch)[0];
}

MeanWithError qdet_mc(const QuaternionArgument& q,
                      const EnsembleBatch& batch) {
  if (batch.samples.empty())
    throw std::invalid_argument("qdet_mc: empty batch");
  const int n = batch.samples.front().rows();
  std::vector<Complex> values;
  values.reserve(batch.samples.size());
  Matrix m(2 * n, 2 * n);
  for (const Matrix& x : batch.samples) {
    m.setZero();
    m.topLeftCorner(n, n) = -x;
    m.topLeftCorner(n, n).diagonal().array() += q.z;
    m.bottomRightCorner(n, n) = -x.adjoint();
    m.bottomRightCorner(n, n).diagonal().array() += std::conj(q.z);
    m.topRightCorner(n, n).diagonal().array() = -std::conj(q.w);
    m.bottomLeftCorner(n, n).diagonal().array() = q.w;
    values.push_back(log_det(m).value());
  }
  return jackknife_mean(values);
}

// ---------------------------------------------------------------------------
// Eigenvector correlator and edge profile
// ---------------------------------------------------------------------------

CorrelatorAccumulator::CorrelatorAccumulator(std::vector<double> radial_edges,
                                             int n)
    : edges_(std::move(radial_edges)), n_(n) {
  if (edges_.size() < 2 || n_ < 1)
    throw std::invalid_argument("CorrelatorAccumulator: bad setup");
  bin_sums_.resize(edges_.size() - 1);
  counts_.assign(edges_.size() - 1, 0);
}

void CorrelatorAccumulator::add(const Eigen::VectorXcd& values,
                                const Eigen::VectorXd& diag_overlaps) {
  if (values.size() != diag_overlaps.size())
    throw std::invalid_argument("CorrelatorAccumulator: size mismatch");
  std::vector<double> local(bin_sums_.size(), 0.0);
  for (int i = 0; i < values.size(); ++i) {
    const double r = std::abs(values(i));
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
    const int k = static_cast<int>(it - edges_.begin()) - 1;
    if (k < 0 || k >= static_cast<int>(local.size())) continue;
    local[k] += diag_overlaps(i);
    ++counts_[k];
  }
  for (size_t k = 0; k < local.size(); ++k) bin_sums_[k].add(local[k]);
  ++samples_;
}

CorrelatorField CorrelatorAccumulator::finalize() const {
  CorrelatorField f;
  f.edges = edges_;
  f.samples = samples_;
  f.counts = counts_;
  f.value.resize(bin_sums_.size());
  f.se.resize(bin_sums_.size());
  const double nn = static_cast<double>(n_) * static_cast<double>(n_);
  for (size_t k = 0; k < bin_sums_.size(); ++k) {
    const double area = f.bin_area(static_cast<int>(k));
    f.value[k] = bin_sums_[k].mean() / (nn * area);
    f.se[k] = bin_sums_[k].standard_error() / (nn * area);
  }
  return f;
}

CorrelatorField correlator_estimate(
    const std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXd>>& samples,
    const std::vector<double>& radial_edges, int n) {
  CorrelatorAccumulator acc(radial_edges, n);
  for (const auto& [values, diag] : samples) acc.add(values, diag);
  return acc.finalize();
}

EdgeProfileAccumulator::EdgeProfileAccumulator(int n, double eta_lo,
                                               double eta_hi,
                                               double bin_width)
    : n_(n), lo_(eta_lo), width_(bin_width) {
  if (n < 1 || !(eta_hi > eta_lo) || !(bin_width > 0.0))
    throw std::invalid_argument("EdgeProfileAccumulator: bad setup");
  const int bins =
      static_cast<int>(std::llround((eta_hi - eta_lo) / bin_width));
  bin_counts_.resize(bins);
  counts_.assign(bins, 0);
}

void EdgeProfileAccumulator::add(const Eigen::VectorXcd& values) {
  const double root_n = std::sqrt(static_cast<double>(n_));
  std::vector<long> local(bin_counts_.size(), 0);
  for (int i = 0; i < values.size(); ++i) {
    const double eta = (std::abs(values(i)) - 1.0) * root_n;
    const int k = static_cast<int>(std::floor((eta - lo_) / width_));
    if (k < 0 || k >= static_cast<int>(local.size())) continue;
    ++local[k];
    ++counts_[k];
  }
  for (size_t k = 0; k < local.size(); ++k)
    bin_counts_[k].add(static_cast<double>(local[k]));
  ++samples_;
}

EdgeProfile EdgeProfileAccumulator::finalize() const {
  EdgeProfile p;
  const int bins = static_cast<int>(bin_counts_.size());
  p.eta_edges.resize(bins + 1);
  for (int k = 0; k <= bins; ++k) p.eta_edges[k] = lo_ + width_ * k;
  p.counts = counts_;
  p.samples = samples_;
  p.density.resize(bins);
  p.se.resize(bins);
  const double root_n = std::sqrt(static_cast<double>(n_));
  long in_window = 0;
  for (int k = 0; k < bins; ++k) {
    const double r_in = 1.0 + p.eta_edges[k] / root_n;
    const double r_out = 1.0 + p.eta_edges[k + 1] / root_n;
    const double area = M_PI * (r_out * r_out - r_in * r_in);
    const double norm = 1.0 / (static_cast<double>(n_) * area);
    p.density[k] = bin_counts_[k].mean() * norm;
    p.se[k] = bin_counts_[k].standard_error() * norm;
    in_window += counts_[k];
  }
  p.low_statistics = in_window < 500;
  return p;
}

EdgeProfile edge_profile(const std::vector<Eigen::VectorXcd>& spectra, int n,
                         double eta_lo, double eta_hi, double bin_width) {
  EdgeProfileAccumulator acc(n, eta_lo, eta_hi, bin_width);
  for (const auto& zs : spectra) acc.add(zs);
  return acc.finalize();
}

}  // namespace oudiff
