#pragma once

#include <vector>

#include "oudiff/rng.hpp"
#include "oudiff/types.hpp"

namespace oudiff {

// Spectral decomposition with bi-orthogonal eigenvector pairs.
// Columns of `right` are the right eigenvectors; rows of `left` the left
// ones, normalized so that left * right = identity.
struct EigenSystem {
  Eigen::VectorXcd values;
  Matrix right;
  Matrix left;
  double condition = 1.0;  // 1-norm condition of the right-eigenvector matrix

  Matrix reconstruct() const;  // sum_i z_i |R_i><L_i|
};

// Full decomposition (right vectors from the backend solver, left vectors
// from the inverse of the right-eigenvector matrix). Throws on backend
// failure or a numerically defective matrix, with the condition estimate in
// the message.
EigenSystem eigen_decompose(const Matrix& m);

// Eigenvalues only; much cheaper when vectors are not needed.
Eigen::VectorXcd eigenvalues_only(const Matrix& m);

// O_ij = <L_i|L_j><R_j|R_i>. Diagonal entries are real and >= 1, every row
// sums to exactly 1 by completeness.
struct OverlapMatrix {
  Eigen::MatrixXcd o;

  double diag(int i) const { return o(i, i).real(); }
  Complex row_sum(int i) const { return o.row(i).sum(); }
};

OverlapMatrix overlaps(const EigenSystem& system);

// One step of the eigenvalue Langevin flow
//   d lambda_i = dB_i/sqrt(n) + (1/n) sum_{j != i} dt/(lambda_i - lambda_j)
//              - a lambda_i dt.
// A proposal is rejected when the drift displaces a particle by a sizable
// fraction of its nearest gap, when the ordering changes, or when a pair
// approaches below `collision_threshold`; rejected intervals are split into
// two half steps, recursively up to `max_halvings`, then a hard error.
struct DysonStepOptions {
  double collision_threshold = 1e-8;
  int max_halvings = 20;
};

std::vector<double> dyson_step(const std::vector<double>& lambdas,
                               const OUParams& params, RngStream& rng,
                               const DysonStepOptions& opts = {});

// Splits exactly coincident values by multiples of `spacing` so the Coulomb
// term is finite at the start; spacing is far below every observable scale.
std::vector<double> jitter_spectrum(std::vector<double> values,
                                    double spacing = 1e-4);

// Orthonormal eigenvector frame of a hermitian matrix together with its
// eigenvalues; columns of `vectors` are the frame.
struct EigenFrame {
  Eigen::VectorXd values;
  Matrix vectors;
};

// One step of the coupled frame/eigenvalue flow: vectors rotate by
//   d psi_i = (1/sqrt(n)) sum_{j != i} dB_ij/(lambda_i - lambda_j) psi_j
//           - (1/2n) sum_{j != i} dt/(lambda_i - lambda_j)^2 psi_i
// with dB_ji = conj(dB_ij), and the eigenvalues advance by dyson_step with
// an independent draw. The frame is re-orthonormalized afterwards unless
// disabled (useful for measuring the raw Gram drift).
EigenFrame hermitian_eigenvector_step(const EigenFrame& frame,
                                      const OUParams& params, RngStream& rng,
                                      bool reorthonormalize = true,
                                      const DysonStepOptions& opts = {});

// Recorded time series of an eigenvalue evolution.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<std::vector<Complex>> eigenvalues;  // [step][particle]
  std::vector<double> o11;                        // empty when not tracked
  std::vector<std::vector<Complex>> jumps;  // [step-1][particle], d lambda/sqrt(dt)
  std::vector<long> ambiguous_steps;  // tracking ambiguity flags, not fatal

  int particles() const {
    return eigenvalues.empty() ? 0 : static_cast<int>(eigenvalues[0].size());
  }
};

// Normalized per-step increments (lambda_{k+1} - lambda_k)/sqrt(dt); requires
// a uniform time grid.
std::vector<std::vector<Complex>> jump_statistics(const TrajectoryRecord& rec);

// The coupled 2 x 2 experiment: matrix-level evolution from
// diag(lambda1, lambda2), tracking eigenvalue distance, O_11 and jumps.
struct TwoByTwoConfig {
  OUParams params;        // params.n is forced to 2
  Complex lambda1 = 0.3;
  Complex lambda2 = -0.3;
  double duration = 0.2;
  bool zero_noise = false;
};

TrajectoryRecord run_two_by_two_experiment(const TwoByTwoConfig& config,
                                           RngStream& rng);

// Eigenvalue-level trajectory of the Langevin flow, recorded every
// `record_stride` steps (stride 1 records every step).
TrajectoryRecord run_dyson_trajectory(const std::vector<double>& lambda0,
                                      const OUParams& params, double duration,
                                      int record_stride, RngStream& rng);

}  // namespace oudiff
