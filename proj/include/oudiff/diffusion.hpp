#pragma once

#include "oudiff/rng.hpp"
#include "oudiff/types.hpp"

namespace oudiff {

// Variance of the transition kernel: (1 - e^{-2 a tau})/(2a), tau for a = 0.
double ou_variance(double a, double tau);

struct HermitianDiffusionState {
  HermitianMatrix matrix;
  double tau = 0.0;
  OUParams params;
};

struct GinibreDiffusionState {
  GinibreMatrix matrix;
  double tau = 0.0;
  OUParams params;
};

// One Euler-Maruyama step of the entrywise confined walk. Diagonal entries
// get real noise of variance dt/n, each off-diagonal component dt/(2n);
// hermiticity is preserved by sampling i <= j and mirroring.
HermitianDiffusionState step_gue(const HermitianDiffusionState& state,
                                 RngStream& rng);

// Same for the non-hermitian walk: every entry gets independent complex
// noise of total variance dt/n plus the -a X dt drift.
GinibreDiffusionState step_ginibre(const GinibreDiffusionState& state,
                                   RngStream& rng);

// Draws from the exact transition kernel: H = h0 e^{-a tau} + sigma W with
// sigma^2 = ou_variance(a, tau) and W a unit hermitian Gaussian draw with
// <|W_ij|^2> = 1/n for every entry.
HermitianMatrix sample_gue_transition(const HermitianMatrix& h0, double tau,
                                      const OUParams& params, RngStream& rng);

// X = x0 e^{-a tau} + sigma W, W a unit complex Gaussian draw, <|W_ij|^2> = 1/n.
GinibreMatrix sample_ginibre_transition(const GinibreMatrix& x0, double tau,
                                        const OUParams& params,
                                        RngStream& rng);

// Batches of exact-transition samples with per-sample streams keyed by
// stream_base + index.
EnsembleBatch sample_gue_batch(const HermitianMatrix& h0, double tau,
                               const OUParams& params, int count,
                               std::uint64_t stream_base = 0, int workers = 0);

EnsembleBatch sample_ginibre_batch(const GinibreMatrix& x0, double tau,
                                   const OUParams& params, int count,
                                   std::uint64_t stream_base = 0,
                                   int workers = 0);

}  // namespace oudiff
