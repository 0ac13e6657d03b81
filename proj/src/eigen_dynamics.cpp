#include "oudiff/eigen_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <lapacke.h>

#include "oudiff/diffusion.hpp"

namespace oudiff {

Matrix EigenSystem::reconstruct() const {
  return right * values.asDiagonal() * left;
}

Eigen::VectorXcd eigenvalues_only(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("eigenvalues_only: matrix must be square");
  const int n = static_cast<int>(m.rows());
  Matrix a = m;  // zgeev overwrites its input
  Eigen::VectorXcd w(n);
  const int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'N', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr,
      1);
  if (info != 0) {
    std::ostringstream msg;
    msg << "eigenvalues_only: zgeev failed (info=" << info << ")";
    throw std::runtime_error(msg.str());
  }
  return w;
}

EigenSystem eigen_decompose(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("eigen_decompose: matrix must be square");
  const int n = static_cast<int>(m.rows());
  Matrix a = m;
  EigenSystem sys;
  sys.values.resize(n);
  sys.right.resize(n, n);
  const int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'V', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(sys.values.data()), nullptr, 1,
      reinterpret_cast<lapack_complex_double*>(sys.right.data()), n);
  if (info != 0) {
    std::ostringstream msg;
    msg << "eigen_decompose: zgeev failed (info=" << info << ")";
    throw std::runtime_error(msg.str());
  }
  Eigen::PartialPivLU<Matrix> lu(sys.right);
  sys.left = lu.inverse();
  const double cond = sys.right.cwiseAbs().colwise().sum().maxCoeff() *
                      sys.left.cwiseAbs().colwise().sum().maxCoeff();
  sys.condition = cond;
  if (!std::isfinite(cond) || cond > 1e14) {
    std::ostringstream msg;
    msg << "eigen_decompose: eigenvector matrix numerically defective "
        << "(condition ~ " << cond << ")";
    throw std::runtime_error(msg.str());
  }
  return sys;
}

OverlapMatrix overlaps(const EigenSystem& system) {
  // <L_i|L_j> = (L L^dagger)_ij, <R_j|R_i> = (R^dagger R)_ji
  const Eigen::MatrixXcd ll = system.left * system.left.adjoint();
  const Eigen::MatrixXcd rr = system.right.adjoint() * system.right;
  OverlapMatrix out;
  out.o = ll.cwiseProduct(rr.transpose());
  return out;
}

namespace {

struct DysonWork {
  const OUParams* params;
  RngStream* rng;
  const DysonStepOptions* opts;
};

// One Euler proposal over `dt`; returns false when the discretization is not
// trustworthy (over-large drift kick, crossing, or near-collision).
bool dyson_propose(const std::vector<double>& lam,
                   const std::vector<int>& order, double dt,
                   const DysonWork& work, std::vector<double>& out) {
  const int n = static_cast<int>(lam.size());
  const double a = work.params->a;
  const double noise_sd = std::sqrt(dt / n);
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    double coulomb = 0.0;
    double nearest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = lam[i] - lam[j];
      coulomb += 1.0 / d;
      nearest = std::min(nearest, std::abs(d));
    }
    const double drift = (coulomb / n - a * lam[i]) * dt;
    if (n > 1 && std::abs(drift) > 0.45 * nearest) return false;
    out[i] = lam[i] + drift + noise_sd * work.rng->gaussian();
  }
  for (size_t k = 1; k < order.size(); ++k) {
    const double gap = out[order[k]] - out[order[k - 1]];
    if (gap < work.opts->collision_threshold) return false;  // crossing too
  }
  return true;
}

void dyson_advance(std::vector<double>& lam, const std::vector<int>& order,
                   double dt, int depth, const DysonWork& work) {
  std::vector<double> proposal;
  if (dyson_propose(lam, order, dt, work, proposal)) {
    lam = std::move(proposal);
    return;
  }
  if (depth >= work.opts->max_halvings) {
    throw std::runtime_error(
        "dyson_step: step rejected after maximum halvings (near-collision)");
  }
  dyson_advance(lam, order, 0.5 * dt, depth + 1, work);
  dyson_advance(lam, order, 0.5 * dt, depth + 1, work);
}

}  // namespace

std::vector<double> dyson_step(const std::vector<double>& lambdas,
                               const OUParams& params, RngStream& rng,
                               const DysonStepOptions& opts) {
  params.validate();
  if (params.dt * params.a >= 1.0)
    throw std::invalid_argument("dyson_step: dt * a must be < 1");
  if (lambdas.empty())
    throw std::invalid_argument("dyson_step: empty spectrum");
  std::vector<int> order(lambdas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return lambdas[i] < lambdas[j]; });
  for (size_t k = 1; k < order.size(); ++k) {
    if (lambdas[order[k]] - lambdas[order[k - 1]] <= 0.0)
      throw std::invalid_argument("dyson_step: eigenvalues must be distinct");
  }
  DysonWork work{&params, &rng, &opts};
  std::vector<double> lam = lambdas;
  dyson_advance(lam, order, params.dt, 0, work);
  return lam;
}

std::vector<double> jitter_spectrum(std::vector<double> values,
                                    double spacing) {
  std::sort(values.begin(), values.end());
  size_t i = 0;
  while (i < values.size()) {
    size_t j = i;
    while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
    const size_t mult = j - i + 1;
    if (mult > 1) {
      const double center = values[i];
      for (size_t k = 0; k < mult; ++k)
        values[i + k] =
            center + spacing * (static_cast<double>(k) -
                                0.5 * static_cast<double>(mult - 1));
    }
    i = j + 1;
  }
  return values;
}

namespace {

bool frame_propose(const EigenFrame& frame, double dt, const OUParams& params,
                   RngStream& rng, Matrix& update) {
  const int n = static_cast<int>(frame.values.size());
  const double root_n = std::sqrt(static_cast<double>(n));
  update = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double shrink = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      shrink += dt / ((frame.values(i) - frame.values(j)) *
                      (frame.values(i) - frame.values(j)));
    }
    shrink /= 2.0 * n;
    if (shrink > 0.4) return false;
    update(i, i) = -shrink;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Complex b = rng.complex_gaussian(dt);
      const double gap = frame.values(i) - frame.values(j);
      const Complex k = b / (root_n * gap);
      if (std::abs(k) > 0.4) return false;
      update(j, i) = k;           // coefficient of psi_j in d psi_i
      update(i, j) = -std::conj(k);
    }
  }
  return true;
}

void frame_advance(EigenFrame& frame, double dt, int depth,
                   const OUParams& params, RngStream& rng,
                   bool reorthonormalize, const DysonStepOptions& opts) {
  Matrix update;
  if (frame_propose(frame, dt, params, rng, update)) {
    frame.vectors = frame.vectors * (Matrix::Identity(update.rows(),
                                                      update.cols()) +
                                     update);
    if (reorthonormalize) {
      Eigen::HouseholderQR<Matrix> qr(frame.vectors);
      Matrix q = qr.householderQ() * Matrix::Identity(frame.vectors.rows(),
                                                      frame.vectors.cols());
      const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (int i = 0; i < q.cols(); ++i) {
        const Complex rii = r(i, i);
        if (std::abs(rii) > 0.0) q.col(i) *= rii / std::abs(rii);
      }
      frame.vectors = q;
    }
    OUParams sub = params;
    sub.dt = dt;
    std::vector<double> lam(frame.values.data(),
                            frame.values.data() + frame.values.size());
    lam = dyson_step(lam, sub, rng, opts);
    for (int i = 0; i < frame.values.size(); ++i) frame.values(i) = lam[i];
    return;
  }
  if (depth >= opts.max_halvings)
    throw std::runtime_error(
        "hermitian_eigenvector_step: step rejected after maximum halvings");
  frame_advance(frame, 0.5 * dt, depth + 1, params, rng, reorthonormalize,
                opts);
  frame_advance(frame, 0.5 * dt, depth + 1, params, rng, reorthonormalize,
                opts);
}

}  // namespace

EigenFrame hermitian_eigenvector_step(const EigenFrame& frame,
                                      const OUParams& params, RngStream& rng,
                                      bool reorthonormalize,
                                      const DysonStepOptions& opts) {
  params.validate();
  if (frame.values.size() != frame.vectors.cols() ||
      frame.vectors.rows() != frame.vectors.cols())
    throw std::invalid_argument("hermitian_eigenvector_step: shape mismatch");
  EigenFrame out = frame;
  frame_advance(out, params.dt, 0, params, rng, reorthonormalize, opts);
  return out;
}

std::vector<std::vector<Complex>> jump_statistics(const TrajectoryRecord& rec) {
  if (rec.times.size() < 2)
    throw std::invalid_argument("jump_statistics: need at least two times");
  const double dt = rec.times[1] - rec.times[0];
  for (size_t k = 1; k < rec.times.size(); ++k) {
    const double step = rec.times[k] - rec.times[k - 1];
    if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("jump_statistics: non-uniform time grid");
  }
  const double root_dt = std::sqrt(dt);
  std::vector<std::vector<Complex>> jumps(rec.times.size() - 1);
  for (size_t k = 0; k + 1 < rec.times.size(); ++k) {
    const auto& prev = rec.eigenvalues[k];
    const auto& next = rec.eigenvalues[k + 1];
    jumps[k].resize(prev.size());
    for (size_t i = 0; i < prev.size(); ++i)
      jumps[k][i] = (next[i] - prev[i]) / root_dt;
  }
  return jumps;
}

namespace {

// closed-form eigenvalues and O_11 of a 2 x 2 matrix; O_11 = 1 + |c|^2/gap^2
// with |c|^2 the off-diagonal weight in the Schur form
void two_by_two_spectrum(const Matrix& x, Complex& l1, Complex& l2,
                         double& o11) {
  const Complex tr = x(0, 0) + x(1, 1);
  const Complex det = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
  const Complex disc = std::sqrt(tr * tr - 4.0 * det);
  l1 = 0.5 * (tr + disc);
  l2 = 0.5 * (tr - disc);
  const double gap2 = std::norm(l1 - l2);
  const double c2 =
      std::max(0.0, x.squaredNorm() - std::norm(l1) - std::norm(l2));
  o11 = gap2 > 0.0 ? 1.0 + c2 / gap2 : std::numeric_limits<double>::infinity();
}

}  // namespace

TrajectoryRecord run_two_by_two_experiment(const TwoByTwoConfig& config,
                                           RngStream& rng) {
  OUParams params = config.params;
  params.n = 2;
  params.validate();
  const int steps = static_cast<int>(std::llround(config.duration / params.dt));
  if (steps < 1)
    throw std::invalid_argument("run_two_by_two_experiment: empty duration");

  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = config.lambda1;
  x(1, 1) = config.lambda2;

  TrajectoryRecord rec;
  rec.times.reserve(steps + 1);
  rec.eigenvalues.reserve(steps + 1);
  rec.o11.reserve(steps + 1);

  Complex l1, l2;
  double o11;
  two_by_two_spectrum(x, l1, l2, o11);
  rec.times.push_back(0.0);
  rec.eigenvalues.push_back({l1, l2});
  rec.o11.push_back(o11);

  GinibreDiffusionState state{GinibreMatrix(x), 0.0, params};
  Complex prev1 = l1, prev2 = l2;
  for (int k = 1; k <= steps; ++k) {
    if (config.zero_noise) {
      state.matrix.matrix() *= (1.0 - params.a * params.dt);
      state.tau += params.dt;
    } else {
      state = step_ginibre(state, rng);
    }
    two_by_two_spectrum(state.matrix.matrix(), l1, l2, o11);
    // nearest-neighbor tracking across the step; ties keep index order
    const double direct = std::abs(l1 - prev1) + std::abs(l2 - prev2);
    const double swapped = std::abs(l2 - prev1) + std::abs(l1 - prev2);
    if (swapped < direct) std::swap(l1, l2);
    const double moved = std::max(std::abs(l1 - prev1), std::abs(l2 - prev2));
    if (moved > 0.5 * std::abs(prev1 - prev2))
      rec.ambiguous_steps.push_back(k);
    rec.times.push_back(state.tau);
    rec.eigenvalues.push_back({l1, l2});
    rec.o11.push_back(o11);
    prev1 = l1;
    prev2 = l2;
  }
  rec.jumps = jump_statistics(rec);
  return rec;
}

TrajectoryRecord run_dyson_trajectory(const std::vector<double>& lambda0,
                                      const OUParams& params, double duration,
                                      int record_stride, RngStream& rng) {
  params.validate();
  if (record_stride < 1)
    throw std::invalid_argument("run_dyson_trajectory: stride must be >= 1");
  const long steps = std::llround(duration / params.dt);
  TrajectoryRecord rec;
  std::vector<double> lam = lambda0;
  auto record = [&](double t) {
    std::vector<Complex> row(lam.size());
    for (size_t i = 0; i < lam.size(); ++i) row[i] = Complex(lam[i], 0.0);
    rec.times.push_back(t);
    rec.eigenvalues.push_back(std::move(row));
  };
  record(0.0);
  for (long k = 1; k <= steps; ++k) {
    lam = dyson_step(lam, params, rng);
    if (k % record_stride == 0) record(static_cast<double>(k) * params.dt);
  }
  rec.jumps = jump_statistics(rec);
  return rec;
}

}  // namespace oudiff
