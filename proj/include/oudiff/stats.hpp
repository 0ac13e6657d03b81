#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace oudiff {

// Sample mean with leave-one-out (jackknife) standard error.
struct MeanWithError {
  std::complex<double> mean{0.0, 0.0};
  double se_re = 0.0;
  double se_im = 0.0;
  long count = 0;
  long skipped = 0;  // samples dropped by the estimator (singular solves etc.)

  double se() const { return std::hypot(se_re, se_im); }
};

inline MeanWithError jackknife_mean(const std::vector<std::complex<double>>& xs,
                                    long skipped = 0) {
  MeanWithError r;
  r.count = static_cast<long>(xs.size());
  r.skipped = skipped;
  if (xs.empty()) return r;
  std::complex<double> sum{0.0, 0.0};
  for (const auto& x : xs) sum += x;
  const auto n = static_cast<double>(xs.size());
  r.mean = sum / n;
  if (xs.size() < 2) return r;
  // leave-one-out means theta_i = (sum - x_i)/(n-1); SE^2 = (n-1)/n sum (theta_i - mean)^2
  double sre = 0.0, sim = 0.0;
  for (const auto& x : xs) {
    const std::complex<double> theta = (sum - x) / (n - 1.0);
    const std::complex<double> d = theta - r.mean;
    sre += d.real() * d.real();
    sim += d.imag() * d.imag();
  }
  r.se_re = std::sqrt((n - 1.0) / n * sre);
  r.se_im = std::sqrt((n - 1.0) / n * sim);
  return r;
}

// Streaming mean/variance (Welford) for real series.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  long count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline double pearson_correlation(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson_correlation: length mismatch");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lam = (ne + 0.12 + 0.11 / ne) * d;
  // Kolmogorov tail series
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                        std::exp(-2.0 * k * k * lam * lam);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  KsResult r;
  r.statistic = d;
  r.p_value = std::clamp(p, 0.0, 1.0);
  return r;
}

}  // namespace oudiff
