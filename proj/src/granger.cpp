#include "netid/granger.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "netid/error.hpp"
#include "netid/regression.hpp"

namespace netid {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> all_nodes_except(std::size_t node_count, std::size_t excluded) {
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < node_count; ++k)
    if (k != excluded) nodes.push_back(k);
  return nodes;
}

std::vector<std::size_t> all_nodes(std::size_t node_count) {
  std::vector<std::size_t> nodes(node_count);
  std::iota(nodes.begin(), nodes.end(), 0);
  return nodes;
}

/// Residuals (N x L) of regressing every node on the lags of `sources`.
Eigen::MatrixXd joint_residuals(const TimeSeriesDataset& dataset,
                                std::span<const std::size_t> sources, std::size_t order) {
  const Eigen::MatrixXd y = dataset.data().transpose();
  if (sources.empty()) return y;
  const Eigen::MatrixXd x = stacked_regressors(dataset, sources, order);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  return y - x * qr.solve(y);
}

void check_granger_preconditions(const TimeSeriesDataset& dataset, std::size_t order) {
  const std::size_t L = dataset.node_count();
  const std::size_t N = dataset.sample_count();
  if (order == 0) throw Error(ErrorKind::invalid_argument, "order must be at least 1");
  if (order * L >= N)
    throw Error(ErrorKind::insufficient_data,
                "conditional regression needs m L < N (m = " + std::to_string(order) +
                    ", L = " + std::to_string(L) + ", N = " + std::to_string(N) + ")");
}

double checked_ratio(double rss_reduced, double rss_full, double energy, std::size_t target) {
  if (!(rss_full > 1e-20 * std::max(energy, std::numeric_limits<double>::min())))
    throw Error(ErrorKind::degenerate_fit,
                "full-model residual variance of node " + std::to_string(target) + " is zero");
  return std::log(rss_reduced / rss_full);
}

}  // namespace

std::size_t max_feasible_order(const TimeSeriesDataset& dataset, std::size_t limit) {
  const std::size_t L = dataset.node_count();
  const std::size_t N = dataset.sample_count();
  return std::max<std::size_t>(1, std::min(limit, (N - 1) / L));
}

std::size_t select_order_aic(const TimeSeriesDataset& dataset, std::size_t max_order) {
  const std::size_t L = dataset.node_count();
  const std::size_t N = dataset.sample_count();
  if (max_order == 0) throw Error(ErrorKind::invalid_argument, "max_order must be at least 1");
  if (max_order * L >= N)
    throw Error(
        ErrorKind::insufficient_data,
        "AIC order search needs max_order * L < N (max_order = " + std::to_string(max_order) +
            ", L = " + std::to_string(L) + ", N = " + std::to_string(N) + ")");
  const auto sources = all_nodes(L);
  double best_aic = std::numeric_limits<double>::infinity();
  std::size_t best_order = 0;
  for (std::size_t m = 1; m <= max_order; ++m) {
    const Eigen::MatrixXd e = joint_residuals(dataset, sources, m);
    const Eigen::MatrixXd sigma = e.transpose() * e / static_cast<double>(N);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) continue;
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    if (!std::isfinite(log_det)) continue;
    const double aic = static_cast<double>(N) * log_det + 2.0 * static_cast<double>(m * L * L);
    if (aic < best_aic) {
      best_aic = aic;
      best_order = m;
    }
  }
  if (best_order == 0)
    throw Error(ErrorKind::insufficient_data, "every candidate VAR fit is rank deficient");
  return best_order;
}

double granger_value(const TimeSeriesDataset& dataset, std::size_t target, std::size_t source,
                     std::size_t order) {
  const std::size_t L = dataset.node_count();
  if (target >= L || source >= L) throw Error(ErrorKind::invalid_argument, "node out of range");
  if (target == source)
    throw Error(ErrorKind::invalid_argument, "Granger value needs distinct target and source");
  check_granger_preconditions(dataset, order);

  const Eigen::VectorXd y = dataset.signal(target);
  auto rss = [&](std::span<const std::size_t> sources) {
    const Eigen::MatrixXd x = stacked_regressors(dataset, sources, order);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    return (y - x * qr.solve(y)).squaredNorm();
  };
  const auto full = all_nodes(L);
  const auto reduced = all_nodes_except(L, source);
  return checked_ratio(rss(reduced), rss(full), y.squaredNorm(), target);
}

GrangerResult granger_matrix(const TimeSeriesDataset& dataset, std::size_t order,
                             SignificanceTest test) {
  check_granger_preconditions(dataset, order);
  const std::size_t L = dataset.node_count();
  const std::size_t N = dataset.sample_count();
  const auto li = static_cast<Eigen::Index>(L);

  GrangerResult result;
  result.order = order;
  result.sample_count = N;
  result.test = test;
  result.granger_values = Eigen::MatrixXd::Constant(li, li, kNaN);
  result.p_values = Eigen::MatrixXd::Constant(li, li, kNaN);

  // The regressor set of a (reduced) model does not depend on the target, so
  // one decomposition serves every target.
  const auto full_sources = all_nodes(L);
  const Eigen::VectorXd rss_full =
      joint_residuals(dataset, full_sources, order).colwise().squaredNorm().transpose();
  const Eigen::VectorXd energy = dataset.data().rowwise().squaredNorm();

  const double df1 = static_cast<double>(order);
  const double df2 = static_cast<double>(N - L * order);
  for (std::size_t i = 0; i < L; ++i) {
    const auto reduced_sources = all_nodes_except(L, i);
    const Eigen::VectorXd rss_reduced =
        joint_residuals(dataset, reduced_sources, order).colwise().squaredNorm().transpose();
    for (std::size_t j = 0; j < L; ++j) {
      if (j == i) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      const auto ii = static_cast<Eigen::Index>(i);
      const double f = checked_ratio(rss_reduced(jj), rss_full(jj), energy(jj), j);
      result.granger_values(jj, ii) = f;
      double p = 1.0;
      if (test == SignificanceTest::f_test) {
        const double stat = std::max(0.0, std::expm1(f)) * df2 / df1;
        p = boost::math::cdf(boost::math::complement(boost::math::fisher_f(df1, df2), stat));
      } else {
        const double stat = std::max(0.0, static_cast<double>(N) * f);
        p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(df1), stat));
      }
      result.p_values(jj, ii) = std::clamp(p, 0.0, 1.0);
    }
  }
  return result;
}

std::vector<bool> benjamini_hochberg(std::span<const double> p_values, double alpha) {
  const std::size_t m = p_values.size();
  std::vector<bool> reject(m, false);
  if (m == 0 || !(alpha > 0.0)) return reject;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::size_t cutoff = 0;  // number of rejections
  for (std::size_t k = m; k >= 1; --k) {
    if (p_values[order[k - 1]] <= static_cast<double>(k) * alpha / static_cast<double>(m)) {
      cutoff = k;
      break;
    }
  }
  for (std::size_t k = 0; k < cutoff; ++k) reject[order[k]] = true;
  return reject;
}

DirectedGraph threshold_graph(const GrangerResult& result, double alpha, bool fdr) {
  const auto L = static_cast<std::size_t>(result.p_values.rows());
  std::vector<Edge> candidates;
  std::vector<double> p;
  for (std::size_t j = 0; j < L; ++j)
    for (std::size_t i = 0; i < L; ++i)
      if (i != j) {
        candidates.push_back({j, i});
        p.push_back(result.p_values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
      }
  DirectedGraph graph(L);
  if (fdr) {
    const auto reject = benjamini_hochberg(p, alpha);
    for (std::size_t k = 0; k < candidates.size(); ++k)
      if (reject[k]) graph.add(candidates[k]);
  } else if (alpha > 0.0) {
    for (std::size_t k = 0; k < candidates.size(); ++k)
      if (p[k] <= alpha) graph.add(candidates[k]);
  }
  return graph;
}

PairedTTest paired_ttest(std::span<const double> values_a, std::span<const double> values_b) {
  if (values_a.size() != values_b.size())
    throw Error(ErrorKind::invalid_argument, "paired t-test needs samples of equal length");
  const std::size_t n = values_a.size();
  if (n < 2) throw Error(ErrorKind::invalid_argument, "paired t-test needs at least 2 pairs");

  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = values_a[k] - values_b[k];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  PairedTTest out;
  out.degrees_of_freedom = n - 1;
  if (sd == 0.0) {
    out.degenerate = true;
    if (mean == 0.0) {
      out.t = 0.0;
      out.p_value = 1.0;
    } else {
      out.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
      out.p_value = 0.0;
    }
    return out;
  }
  out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t dist(static_cast<double>(n - 1));
  out.p_value =
      std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t))), 0.0, 1.0);
  return out;
}

}  // namespace netid
