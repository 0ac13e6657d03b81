#include "oudiff/diffusion.hpp"

#include <cmath>
#include <stdexcept>

#include "oudiff/parallel.hpp"

namespace oudiff {

double ou_variance(double a, double tau) {
  if (tau < 0.0) throw std::invalid_argument("ou_variance: tau must be >= 0");
  if (a == 0.0) return tau;
  return (1.0 - std::exp(-2.0 * a * tau)) / (2.0 * a);
}

static void check_step_params(const OUParams& p) {
  p.validate();
  if (p.dt * p.a >= 1.0)
    throw std::invalid_argument("step: dt * a must be < 1");
}

HermitianDiffusionState step_gue(const HermitianDiffusionState& state,
                                 RngStream& rng) {
  check_step_params(state.params);
  const int n = state.matrix.dim();
  const double dt = state.params.dt;
  const double a = state.params.a;
  const double sd_diag = std::sqrt(dt / n);
  const double sd_off = std::sqrt(dt / (2.0 * n));

  HermitianDiffusionState out = state;
  HermitianMatrix& h = out.matrix;
  for (int i = 0; i < n; ++i)
    h.set_diagonal(i, h.x(i, i) - a * h.x(i, i) * dt + sd_diag * rng.gaussian());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double x = h.x(i, j) - a * h.x(i, j) * dt + sd_off * rng.gaussian();
      const double y = h.y(i, j) - a * h.y(i, j) * dt + sd_off * rng.gaussian();
      h.set_upper(i, j, Complex(x, y));
    }
  }
  out.tau += dt;
  return out;
}

GinibreDiffusionState step_ginibre(const GinibreDiffusionState& state,
                                   RngStream& rng) {
  check_step_params(state.params);
  const int n = state.matrix.dim();
  const double dt = state.params.dt;
  const double a = state.params.a;
  const double sd = std::sqrt(dt / (2.0 * n));  // per real component

  GinibreDiffusionState out = state;
  Matrix& m = out.matrix.matrix();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) += -a * m(i, j) * dt +
                 Complex(sd * rng.gaussian(), sd * rng.gaussian());
  out.tau += dt;
  return out;
}

HermitianMatrix sample_gue_transition(const HermitianMatrix& h0, double tau,
                                      const OUParams& params, RngStream& rng) {
  if (tau < 0.0)
    throw std::invalid_argument("sample_gue_transition: tau must be >= 0");
  params.validate();
  const int n = h0.dim();
  const double decay = params.a == 0.0 ? 1.0 : std::exp(-params.a * tau);
  const double sigma = std::sqrt(ou_variance(params.a, tau));
  const double sd_diag = sigma / std::sqrt(static_cast<double>(n));
  const double sd_off = sigma / std::sqrt(2.0 * n);

  HermitianMatrix h(n);
  for (int i = 0; i < n; ++i)
    h.set_diagonal(i, decay * h0.x(i, i) + sd_diag * rng.gaussian());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double x = decay * h0.x(i, j) + sd_off * rng.gaussian();
      const double y = decay * h0.y(i, j) + sd_off * rng.gaussian();
      h.set_upper(i, j, Complex(x, y));
    }
  }
  return h;
}

GinibreMatrix sample_ginibre_transition(const GinibreMatrix& x0, double tau,
                                        const OUParams& params,
                                        RngStream& rng) {
  if (tau < 0.0)
    throw std::invalid_argument("sample_ginibre_transition: tau must be >= 0");
  params.validate();
  const int n = x0.dim();
  const double decay = params.a == 0.0 ? 1.0 : std::exp(-params.a * tau);
  const double sd = std::sqrt(ou_variance(params.a, tau) / (2.0 * n));

  GinibreMatrix x(n);
  Matrix& m = x.matrix();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = decay * x0.matrix()(i, j) +
                Complex(sd * rng.gaussian(), sd * rng.gaussian());
  return x;
}

EnsembleBatch sample_gue_batch(const HermitianMatrix& h0, double tau,
                               const OUParams& params, int count,
                               std::uint64_t stream_base, int workers) {
  EnsembleBatch batch;
  batch.params = params;
  batch.tau = tau;
  batch.initial = h0.matrix();
  batch.samples.resize(count);
  parallel_for(
      count,
      [&](long i) {
        RngStream rng(params.seed, stream_base + static_cast<std::uint64_t>(i));
        batch.samples[i] = sample_gue_transition(h0, tau, params, rng).matrix();
      },
      workers);
  return batch;
}

EnsembleBatch sample_ginibre_batch(const GinibreMatrix& x0, double tau,
                                   const OUParams& params, int count,
                                   std::uint64_t stream_base, int workers) {
  EnsembleBatch batch;
  batch.params = params;
  batch.tau = tau;
  batch.initial = x0.matrix();
  batch.samples.resize(count);
  parallel_for(
      count,
      [&](long i) {
        RngStream rng(params.seed, stream_base + static_cast<std::uint64_t>(i));
        batch.samples[i] =
            sample_ginibre_transition(x0, tau, params, rng).matrix();
      },
      workers);
  return batch;
}

}  // namespace oudiff
