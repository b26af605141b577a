#pragma once

// Reference implementations used only by the tests. They deliberately take
// the slow, literal route so they share no code with the library.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

/// Literal TC kernel entry lambda * beta^max(k, l) with 1-based lags.
inline Eigen::MatrixXd tc_kernel(double lambda, double beta, int m) {
  Eigen::MatrixXd k(m, m);
  for (int r = 1; r <= m; ++r)
    for (int c = 1; c <= m; ++c) k(r - 1, c - 1) = lambda * std::pow(beta, std::max(r, c));
  return k;
}

struct MonteCarloEstimate {
  double log_mean = 0.0;
  double standard_error = 0.0;  // of log_mean, delta method
};

/// log E_theta[N(y; A theta, sigma_sq I)] with theta ~ N(0, blkdiag(K_i)),
/// estimated from `draws` prior samples.
inline MonteCarloEstimate monte_carlo_evidence(const Eigen::VectorXd& y,
                                               const std::vector<Eigen::MatrixXd>& blocks,
                                               const std::vector<Eigen::MatrixXd>& kernels,
                                               double sigma_sq, std::size_t draws,
                                               std::uint64_t seed) {
  const auto n = y.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::MatrixXd> roots;
  for (const auto& k : kernels) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    roots.push_back(eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }
  std::vector<double> log_lik(draws);
  const double constant = -0.5 * static_cast<double>(n) * std::log(2.0 * M_PI * sigma_sq);
  Eigen::VectorXd mean(n);
  for (std::size_t d = 0; d < draws; ++d) {
    mean.setZero();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Eigen::VectorXd z(roots[b].cols());
      for (auto& v : z) v = normal(rng);
      mean += blocks[b] * (roots[b] * z);
    }
    log_lik[d] = constant - 0.5 * (y - mean).squaredNorm() / sigma_sq;
  }
  const double top = *std::max_element(log_lik.begin(), log_lik.end());
  double s1 = 0.0;
  double s2 = 0.0;
  for (double l : log_lik) {
    const double w = std::exp(l - top);
    s1 += w;
    s2 += w * w;
  }
  const double dn = static_cast<double>(draws);
  const double m1 = s1 / dn;
  const double var = std::max(0.0, s2 / dn - m1 * m1);
  return {top + std::log(m1), std::sqrt(var / dn) / m1};
}

/// log N(y; 0, Sigma) from an explicit covariance via an eigen-decomposition.
inline double gaussian_log_density(const Eigen::VectorXd& y, const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * y;
  double out = -0.5 * static_cast<double>(y.size()) * std::log(2.0 * M_PI);
  for (Eigen::Index k = 0; k < y.size(); ++k)
    out -= 0.5 * (std::log(eig.eigenvalues()(k)) + proj(k) * proj(k) / eig.eigenvalues()(k));
  return out;
}

/// Benjamini-Hochberg rejections by scanning every k instead of stepping
/// down from the top.
inline std::vector<bool> bh_rejections(const std::vector<double>& p, double alpha) {
  const std::size_t m = p.size();
  std::vector<double> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  double threshold = -1.0;
  for (std::size_t k = 1; k <= m; ++k)
    if (alpha > 0.0 && sorted[k - 1] <= alpha * static_cast<double>(k) / static_cast<double>(m))
      threshold = sorted[k - 1];
  std::vector<bool> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = p[k] <= threshold;
  return out;
}

struct TTest {
  double t = 0.0;
  double p_value = 1.0;
};

/// Two-sided paired t-test: t = mean(d) / (s_d / sqrt(n)), p = I_{nu/(nu+t^2)}(nu/2, 1/2).
inline TTest paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += (a[k] - b[k]) / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) ss += std::pow(a[k] - b[k] - mean, 2);
  const double nu = static_cast<double>(n - 1);
  const double t = mean / std::sqrt(ss / nu / static_cast<double>(n));
  return {t, boost::math::ibeta(nu / 2.0, 0.5, nu / (nu + t * t))};
}

/// Decay maximizing the prior density of a known coefficient vector, with the
/// scale profiled out, found on a fine grid.
inline double profile_decay(const Eigen::VectorXd& theta) {
  const int m = static_cast<int>(theta.size());
  double best = 0.0;
  double best_value = -1e300;
  for (int g = 1; g < 1000; ++g) {
    const double beta = g / 1000.0;
    const Eigen::MatrixXd k = tc_kernel(1.0, beta, m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    const Eigen::VectorXd proj = eig.eigenvectors().transpose() * theta;
    double quad = 0.0;
    double logdet = 0.0;
    for (int i = 0; i < m; ++i) {
      quad += proj(i) * proj(i) / eig.eigenvalues()(i);
      logdet += std::log(eig.eigenvalues()(i));
    }
    const double value = -0.5 * (m * std::log(quad / m) + logdet);
    if (value > best_value) {
      best_value = value;
      best = beta;
    }
  }
  return best;
}

}  // namespace oracle
