#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "netid/dataset.hpp"
#include "netid/graph.hpp"

namespace netid {

/// N x m lag matrix of one node: row t holds [w(t-1), ..., w(t-m)] with
/// w(t) = 0 for t < 0. Throws `Error{order_too_large}` when m > N.
[[nodiscard]] Eigen::MatrixXd build_regressors(const TimeSeriesDataset& dataset,
                                               std::size_t source_node, std::size_t order);

/// Same layout for a raw signal.
[[nodiscard]] Eigen::MatrixXd lag_matrix(const Eigen::Ref<const Eigen::VectorXd>& signal,
                                         std::size_t order);

/// Horizontal concatenation of the lag matrices of `sources`.
[[nodiscard]] Eigen::MatrixXd stacked_regressors(const TimeSeriesDataset& dataset,
                                                 std::span<const std::size_t> sources,
                                                 std::size_t order);

/// Least-squares VAR fit. Parent sets may include the node itself.
struct VarModel {
  std::size_t order = 0;
  std::vector<std::vector<std::size_t>> parent_sets;
  /// theta for (target, source); the key may have target == source.
  std::map<Edge, Eigen::VectorXd> coefficients;
  std::vector<double> noise_variances;
  /// L x N residuals of the fit.
  Eigen::MatrixXd residuals;
  /// Nodes whose regressor matrix was rank deficient (least-norm solution used).
  std::vector<std::size_t> rank_deficient;
};

/// Every node regressed on every node (including its own past).
[[nodiscard]] std::vector<std::vector<std::size_t>> full_parent_sets(std::size_t node_count);

/// Throws `Error{insufficient_data}` when a node has |parents| * m >= N and
/// `Error{order_too_large}` when m > N.
[[nodiscard]] VarModel ols_fit(const TimeSeriesDataset& dataset, std::size_t order,
                               const std::vector<std::vector<std::size_t>>& parent_sets);

}  // namespace netid
