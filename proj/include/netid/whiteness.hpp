#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "netid/dataset.hpp"

namespace netid {

struct WhitenessResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool pass = true;
};

/// Ljung-Box portmanteau test over lags 1..max_lag against chi^2(max_lag).
/// pass = p_value > alpha. Throws `Error{degenerate_input}` for constant
/// residuals and `Error{invalid_argument}` unless size > max_lag >= 1.
[[nodiscard]] WhitenessResult whiteness_test(std::span<const double> residuals,
                                             std::size_t max_lag = 20, double alpha = 0.05);

struct ResidualReport {
  std::size_t order = 0;
  Eigen::MatrixXd residuals;  // L x N
  std::vector<WhitenessResult> nodes;
  double alpha = 0.05;
  std::size_t max_lag = 20;

  [[nodiscard]] double pass_fraction() const;
};

/// Fits the full VAR(order) by least squares and tests each node's residual.
[[nodiscard]] ResidualReport validate_residuals(const TimeSeriesDataset& dataset, std::size_t order,
                                                std::size_t max_lag = 20, double alpha = 0.05);

}  // namespace netid
