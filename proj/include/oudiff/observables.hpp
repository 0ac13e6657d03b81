#pragma once

#include <vector>

#include "oudiff/stats.hpp"
#include "oudiff/types.hpp"

namespace oudiff {

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

// Normalized spectral histogram. For real-line binning `density` is per unit
// length; for radial binning it is per unit area of the complex plane. The
// normalization uses the in-range weight, so the density integrates to one
// by construction; `outside` counts what fell off the grid.
struct SpectralHistogram {
  std::vector<double> edges;
  std::vector<double> density;
  std::vector<double> se;
  std::vector<long> counts;
  long total = 0;
  long outside = 0;
  bool radial = false;

  int bins() const { return static_cast<int>(density.size()); }
  double bin_measure(int k) const {
    if (radial)
      return M_PI * (edges[k + 1] * edges[k + 1] - edges[k] * edges[k]);
    return edges[k + 1] - edges[k];
  }
  double integral() const {
    double acc = 0.0;
    for (int k = 0; k < bins(); ++k) acc += density[k] * bin_measure(k);
    return acc;
  }
};

// Eigenvalue histogram of a hermitian batch on [lo, hi).
SpectralHistogram density_real(const EnsembleBatch& batch, double lo,
                               double hi, int bins);

// Radially binned density from precomputed complex spectra.
SpectralHistogram density_complex_radial(
    const std::vector<Eigen::VectorXcd>& spectra,
    const std::vector<double>& radial_edges);

// Same, decomposing the batch internally.
SpectralHistogram density_complex_radial(const EnsembleBatch& batch,
                                         const std::vector<double>& edges);

// Full 2-d binning of complex spectra (row i, col j) <-> (im, re).
Eigen::MatrixXd density_complex_grid(
    const std::vector<Eigen::VectorXcd>& spectra, double re_lo, double re_hi,
    double im_lo, double im_hi, int nx, int ny);

// ---------------------------------------------------------------------------
// Resolvents
// ---------------------------------------------------------------------------

// (1/n) <Tr (z - H)^{-1}> with jackknife error; samples where z collides
// with an eigenvalue are skipped and counted.
MeanWithError resolvent_mc(Complex z, const EnsembleBatch& batch);

// 2 x 2 block-traced resolvent of the doubled problem. The lower-right entry
// is the complex conjugate of the upper-left one by block structure, so only
// three entries are stored.
struct GeneralizedResolvent {
  Complex g11{0.0, 0.0};
  Complex g11bar{0.0, 0.0};
  Complex g1bar1{0.0, 0.0};
  double se_g11 = 0.0;
  double se_g11bar = 0.0;
  double se_g1bar1 = 0.0;
  long count = 0;
  long skipped = 0;

  Complex g1bar1bar() const { return std::conj(g11); }
  // -(1/pi) G_{1 1bar} G_{1bar 1}: the overlap estimator at small |w|
  double overlap_product() const {
    return -(g11bar * g1bar1).real() / M_PI;
  }
};

// Single-sample block-traced resolvent (1/n) bTr (Q - X)^{-1}.
Eigen::Matrix2cd generalized_resolvent_sample(const QuaternionArgument& q,
                                              const Matrix& x);

GeneralizedResolvent generalized_resolvent_mc(const QuaternionArgument& q,
                                              const EnsembleBatch& batch);

// d_zbar of a sampled field by central differences (one-sided at borders),
// divided by pi. field(i, j) is the value at re = re0 + j h, im = im0 + i h.
// Emits a warning string when the grid is coarser than 0.1.
Eigen::MatrixXd density_from_gauss_law(const Eigen::MatrixXcd& g11_field,
                                       double spacing,
                                       std::vector<std::string>* warnings);

// ---------------------------------------------------------------------------
// Averaged determinants
// ---------------------------------------------------------------------------

// <det(z - H)> over a hermitian batch; determinants are accumulated in
// log-magnitude/phase form and exponentiated, erroring if non-representable.
MeanWithError acp_mc(Complex z, const EnsembleBatch& batch);

// Shared-decomposition variant for probe grids.
std::vector<MeanWithError> acp_mc_grid(const std::vector<Complex>& zs,
                                       const EnsembleBatch& batch);

// <det(Q - X)> over a non-hermitian batch (2n x 2n pivoted-LU determinant).
MeanWithError qdet_mc(const QuaternionArgument& q, const EnsembleBatch& batch);

// ---------------------------------------------------------------------------
// Eigenvector correlator and edge profile
// ---------------------------------------------------------------------------

// Radially binned (1/n^2) <sum_a O_aa delta^2(z - z_a)> with per-bin errors.
struct CorrelatorField {
  std::vector<double> edges;
  std::vector<double> value;
  std::vector<double> se;
  std::vector<long> counts;
  long samples = 0;

  int bins() const { return static_cast<int>(value.size()); }
  double bin_area(int k) const {
    return M_PI * (edges[k + 1] * edges[k + 1] - edges[k] * edges[k]);
  }
  double integral() const {
    double acc = 0.0;
    for (int k = 0; k < bins(); ++k) acc += value[k] * bin_area(k);
    return acc;
  }
};

// Streaming accumulation: add one decomposed sample at a time.
class CorrelatorAccumulator {
 public:
  CorrelatorAccumulator(std::vector<double> radial_edges, int n);
  void add(const Eigen::VectorXcd& values,
           const Eigen::VectorXd& diag_overlaps);
  CorrelatorField finalize() const;

 private:
  std::vector<double> edges_;
  int n_;
  long samples_ = 0;
  std::vector<RunningStats> bin_sums_;
  std::vector<long> counts_;
};

struct EigenSystem;  // from eigen_dynamics

CorrelatorField correlator_estimate(
    const std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXd>>& samples,
    const std::vector<double>& radial_edges, int n);

// Scaled radial profile at the disc edge: eta = (|z| - 1) sqrt(n), density
// per unit area for comparison with the closed edge law.
struct EdgeProfile {
  std::vector<double> eta_edges;
  std::vector<double> density;
  std::vector<double> se;
  std::vector<long> counts;
  long samples = 0;
  bool low_statistics = false;  // fewer than 500 points landed in the window

  int bins() const { return static_cast<int>(density.size()); }
  double eta_center(int k) const {
    return 0.5 * (eta_edges[k] + eta_edges[k + 1]);
  }
};

class EdgeProfileAccumulator {
 public:
  EdgeProfileAccumulator(int n, double eta_lo, double eta_hi,
                         double bin_width);
  void add(const Eigen::VectorXcd& values);
  EdgeProfile finalize() const;

 private:
  int n_;
  double lo_, width_;
  std::vector<RunningStats> bin_counts_;
  std::vector<long> counts_;
  long samples_ = 0;
};

EdgeProfile edge_profile(const std::vector<Eigen::VectorXcd>& spectra, int n,
                         double eta_lo, double eta_hi, double bin_width);

}  // namespace oudiff
