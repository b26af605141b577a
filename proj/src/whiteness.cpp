#include "netid/whiteness.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <string>

#include "netid/error.hpp"
#include "netid/regression.hpp"

namespace netid {

WhitenessResult whiteness_test(std::span<const double> residuals, std::size_t max_lag,
                               double alpha) {
  const std::size_t n = residuals.size();
  if (max_lag < 1 || n <= max_lag)
    throw Error(ErrorKind::invalid_argument,
                "whiteness test needs residual length > max_lag >= 1 (length " + std::to_string(n) +
                    ", max_lag " + std::to_string(max_lag) + ")");

  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double r : residuals) c0 += (r - mean) * (r - mean);
  if (!(c0 > 0.0)) throw Error(ErrorKind::degenerate_input, "residuals have zero variance");

  double q = 0.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = k; t < n; ++t) ck += (residuals[t] - mean) * (residuals[t - k] - mean);
    const double rho = ck / c0;
    q += rho * rho / static_cast<double>(n - k);
  }
  q *= static_cast<double>(n) * static_cast<double>(n + 2);

  boost::math::chi_squared reference(static_cast<double>(max_lag));
  WhitenessResult result;
  result.statistic = q;
  result.p_value = std::clamp(boost::math::cdf(boost::math::complement(reference, q)), 0.0, 1.0);
  result.pass = result.p_value > alpha;
  return result;
}

double ResidualReport::pass_fraction() const {
  if (nodes.empty()) return 0.0;
  auto passed = std::count_if(nodes.begin(), nodes.end(), [](const auto& r) { return r.pass; });
  return static_cast<double>(passed) / static_cast<double>(nodes.size());
}

ResidualReport validate_residuals(const TimeSeriesDataset& dataset, std::size_t order,
                                  std::size_t max_lag, double alpha) {
  auto fit = ols_fit(dataset, order, full_parent_sets(dataset.node_count()));
  ResidualReport report;
  report.order = order;
  report.alpha = alpha;
  report.max_lag = max_lag;
  report.residuals = std::move(fit.residuals);
  for (Eigen::Index j = 0; j < report.residuals.rows(); ++j) {
    const Eigen::VectorXd r = report.residuals.row(j).transpose();
    report.nodes.push_back(
        whiteness_test({r.data(), static_cast<std::size_t>(r.size())}, max_lag, alpha));
  }
  return report;
}

}  // namespace netid
