#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "netid/dataset.hpp"
#include "netid/graph.hpp"

namespace netid {

enum class SignificanceTest { f_test, chi_squared };

/// Conditional Granger analysis of every ordered node pair. Diagonal entries
/// of both matrices are NaN.
struct GrangerResult {
  std::size_t order = 0;
  std::size_t sample_count = 0;
  SignificanceTest test = SignificanceTest::f_test;
  Eigen::MatrixXd granger_values;  // (target, source)
  Eigen::MatrixXd p_values;        // (target, source)
  std::optional<DirectedGraph> estimate;
  double alpha = 0.0;
  bool fdr = false;
};

/// Order in [1, max_order] minimizing N log det(Sigma_m) + 2 m L^2 for the
/// full joint VAR(m); ties go to the smaller order.
[[nodiscard]] std::size_t select_order_aic(const TimeSeriesDataset& dataset, std::size_t max_order);

/// Largest order the AIC search may use for this dataset, capped at `limit`.
[[nodiscard]] std::size_t max_feasible_order(const TimeSeriesDataset& dataset,
                                             std::size_t limit = 10);

/// log(RSS_reduced / RSS_full) for the conditional regression of `target`
/// with and without the lags of `source`.
[[nodiscard]] double granger_value(const TimeSeriesDataset& dataset, std::size_t target,
                                   std::size_t source, std::size_t order);

/// Granger values and p-values for all ordered pairs. The F-test uses
/// (m, N - L m) degrees of freedom; the chi-squared variant uses N F ~ chi2(m).
[[nodiscard]] GrangerResult granger_matrix(const TimeSeriesDataset& dataset, std::size_t order,
                                           SignificanceTest test = SignificanceTest::f_test);

/// Benjamini-Hochberg step-up at level alpha. Returns one rejection flag per
/// p-value. A level of 0 rejects nothing.
[[nodiscard]] std::vector<bool> benjamini_hochberg(std::span<const double> p_values, double alpha);

/// Edges whose p-value survives raw (p <= alpha) or BH-corrected thresholding
/// over the L(L-1) off-diagonal tests.
[[nodiscard]] DirectedGraph threshold_graph(const GrangerResult& result, double alpha, bool fdr);

struct PairedTTest {
  double t = 0.0;
  double p_value = 1.0;
  std::size_t degrees_of_freedom = 0;
  /// Differences had zero sample variance (t is 0 or +/-inf).
  bool degenerate = false;
};

/// Two-sided paired t-test on a - b.
[[nodiscard]] PairedTTest paired_ttest(std::span<const double> values_a,
                                       std::span<const double> values_b);

}  // namespace netid
