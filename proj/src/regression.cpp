#include "netid/regression.hpp"

#include <string>

#include "netid/error.hpp"

namespace netid {

Eigen::MatrixXd lag_matrix(const Eigen::Ref<const Eigen::VectorXd>& signal, std::size_t order) {
  const auto n = signal.size();
  const auto m = static_cast<Eigen::Index>(order);
  if (order == 0) throw Error(ErrorKind::invalid_argument, "regressor order must be at least 1");
  if (m > n)
    throw Error(ErrorKind::order_too_large,
                "order " + std::to_string(order) + " exceeds the data length " + std::to_string(n));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index k = 1; k <= m; ++k) a.col(k - 1).tail(n - k) = signal.head(n - k);
  return a;
}

Eigen::MatrixXd build_regressors(const TimeSeriesDataset& dataset, std::size_t source_node,
                                 std::size_t order) {
  if (source_node >= dataset.node_count())
    throw Error(ErrorKind::invalid_argument, "source node out of range");
  return lag_matrix(dataset.data().row(static_cast<Eigen::Index>(source_node)).transpose(), order);
}

Eigen::MatrixXd stacked_regressors(const TimeSeriesDataset& dataset,
                                   std::span<const std::size_t> sources, std::size_t order) {
  const auto n = static_cast<Eigen::Index>(dataset.sample_count());
  const auto m = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd x(n, m * static_cast<Eigen::Index>(sources.size()));
  for (std::size_t k = 0; k < sources.size(); ++k)
    x.middleCols(static_cast<Eigen::Index>(k) * m, m) =
        build_regressors(dataset, sources[k], order);
  return x;
}

std::vector<std::vector<std::size_t>> full_parent_sets(std::size_t node_count) {
  std::vector<std::size_t> all(node_count);
  for (std::size_t i = 0; i < node_count; ++i) all[i] = i;
  return std::vector<std::vector<std::size_t>>(node_count, all);
}

VarModel ols_fit(const TimeSeriesDataset& dataset, std::size_t order,
                 const std::vector<std::vector<std::size_t>>& parent_sets) {
  const std::size_t L = dataset.node_count();
  const std::size_t N = dataset.sample_count();
  if (parent_sets.size() != L)
    throw Error(ErrorKind::invalid_argument, "need one parent set per node");
  if (order == 0) throw Error(ErrorKind::invalid_argument, "order must be at least 1");
  if (order > N)
    throw Error(ErrorKind::order_too_large,
                "order " + std::to_string(order) + " exceeds the data length " + std::to_string(N));

  VarModel model;
  model.order = order;
  model.parent_sets = parent_sets;
  model.noise_variances.resize(L);
  model.residuals.resize(L, N);

  for (std::size_t j = 0; j < L; ++j) {
    const auto& parents = parent_sets[j];
    const std::size_t k = parents.size() * order;
    if (k >= N)
      throw Error(ErrorKind::insufficient_data, "node " + std::to_string(j) + " has " +
                                                    std::to_string(k) + " regressors but only " +
                                                    std::to_string(N) + " samples");
    const Eigen::VectorXd y = dataset.signal(j);
    Eigen::VectorXd residual = y;
    if (k > 0) {
      const Eigen::MatrixXd x = stacked_regressors(dataset, parents, order);
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
      if (cod.rank() < static_cast<Eigen::Index>(k)) model.rank_deficient.push_back(j);
      const Eigen::VectorXd theta = cod.solve(y);
      residual -= x * theta;
      for (std::size_t p = 0; p < parents.size(); ++p)
        model.coefficients[{j, parents[p]}] =
            theta.segment(static_cast<Eigen::Index>(p * order), static_cast<Eigen::Index>(order));
    }
    model.residuals.row(static_cast<Eigen::Index>(j)) = residual.transpose();
    model.noise_variances[j] = residual.squaredNorm() / static_cast<double>(N - k);
  }
  return model;
}

}  // namespace netid
