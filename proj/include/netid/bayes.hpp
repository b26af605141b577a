#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "netid/dataset.hpp"
#include "netid/graph.hpp"

namespace netid {

/// TC kernel hyperparameters of one edge: K[k, l] = scale * decay^max(k, l).
struct EdgeKernelParams {
  double scale = 0.0;
  double decay = 0.8;
};

/// m x m TC kernel with 1-based lag indices.
[[nodiscard]] Eigen::MatrixXd kernel_matrix(const EdgeKernelParams& params, std::size_t order);

/// Diagonal of the factorization K = scale * U diag(d) U^T, where U is the
/// upper-triangular matrix of ones: d_s = decay^s (1 - decay) for s < m and
/// d_m = decay^m.
[[nodiscard]] Eigen::VectorXd kernel_increments(double decay, std::size_t order);

/// Sufficient statistics of one target node regressed on a parent set,
/// expressed in cumulative-lag coordinates (regressors multiplied by U per
/// block). Everything the evidence and EM need lives here; the N x p
/// regressor matrix itself is never formed again.
struct NodeProblem {
  std::size_t samples = 0;
  std::size_t order = 0;
  double energy = 0.0;    // y^T y
  Eigen::MatrixXd gram;   // (U^T A^T A U), p x p
  Eigen::VectorXd cross;  // (U^T A^T y), p

  [[nodiscard]] std::size_t parent_count() const noexcept {
    return order == 0 ? 0 : static_cast<std::size_t>(cross.size()) / order;
  }

  /// Builds the statistics from a target signal and N x m regressor blocks.
  [[nodiscard]] static NodeProblem from_blocks(const Eigen::Ref<const Eigen::VectorXd>& target,
                                               std::span<const Eigen::MatrixXd> blocks);
};

/// Cumulative-lag Gram matrix of all L regressor blocks of a dataset, shared
/// by every target node and parent set.
class RegressorBank {
 public:
  RegressorBank(const TimeSeriesDataset& dataset, std::size_t order);

  [[nodiscard]] std::size_t order() const noexcept { return order_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return node_count_; }
  [[nodiscard]] std::size_t sample_count() const noexcept { return sample_count_; }

  [[nodiscard]] NodeProblem problem(std::size_t target, std::span<const std::size_t> parents) const;

 private:
  std::size_t order_;
  std::size_t node_count_;
  std::size_t sample_count_;
  Eigen::MatrixXd gram_;   // Lm x Lm
  Eigen::MatrixXd cross_;  // Lm x L
  Eigen::VectorXd energy_;
};

/// log N(y; 0, sum_i A_i K_i A_i^T + sigma_sq I), evaluated through the
/// p x p matrix sigma_sq I + F^T A^T A F with K_i = F_i F_i^T.
/// Throws `Error{numerical_failure}` if the factorization fails after a
/// 1e-10 ridge.
[[nodiscard]] double log_marginal_likelihood(const NodeProblem& problem,
                                             std::span<const EdgeKernelParams> params,
                                             double sigma_sq);

/// Same quantity by factorizing the N x N covariance directly.
[[nodiscard]] double log_marginal_likelihood_direct(const Eigen::Ref<const Eigen::VectorXd>& target,
                                                    std::span<const Eigen::MatrixXd> blocks,
                                                    std::span<const EdgeKernelParams> params,
                                                    double sigma_sq);

/// Raw-block entry point: uses the p x p route when the total regressor count
/// is below N and the N x N route otherwise.
[[nodiscard]] double log_marginal_likelihood(const Eigen::Ref<const Eigen::VectorXd>& target,
                                             std::span<const Eigen::MatrixXd> blocks,
                                             std::span<const EdgeKernelParams> params,
                                             double sigma_sq);

struct EmOptions {
  double tolerance = 1e-6;  // relative change in log marginal likelihood
  std::size_t max_iterations = 200;
  /// One EM run per start; the best final likelihood wins.
  std::vector<double> decay_starts{0.5, 0.8, 0.95};
  double decay_lower = 1e-3;
  double decay_upper = 0.999;
  double golden_tolerance = 1e-5;
};

struct NodeBayesState {
  std::size_t target = 0;
  std::vector<std::size_t> parents;
  std::size_t order = 0;
  std::vector<EdgeKernelParams> params;  // aligned with `parents`
  double noise_variance = 0.0;
  double log_marginal_likelihood = 0.0;
  /// Search score: log_marginal_likelihood minus the edge cost per parent.
  double log_evidence = 0.0;
  std::size_t iterations = 0;
  /// Likelihood after every E-step of the winning run; non-decreasing.
  std::vector<double> trace;
};

/// Empirical-Bayes fit of the kernel hyperparameters and noise variance.
/// Scale starts at var(y)/m and the noise variance at var(y)/2, with one run
/// per entry of `decay_starts`. With no parents the noise variance is the
/// closed-form maximum-likelihood value mean(y^2).
///
/// Throws `Error{internal_consistency}` if the likelihood decreases and
/// `Error{numerical_failure}` if it becomes NaN.
[[nodiscard]] NodeBayesState em_estimate(const NodeProblem& problem, const EmOptions& options = {});

/// Single EM run from explicit starting values.
[[nodiscard]] NodeBayesState em_estimate(const NodeProblem& problem,
                                         std::span<const EdgeKernelParams> initial,
                                         double initial_sigma_sq, const EmOptions& options = {});

[[nodiscard]] NodeBayesState em_estimate(const Eigen::Ref<const Eigen::VectorXd>& target,
                                         std::span<const Eigen::MatrixXd> blocks,
                                         const EmOptions& options = {});

/// Occam cost charged per parent when comparing parent sets: half of log N
/// for each of the two kernel hyperparameters an edge adds.
[[nodiscard]] double default_edge_cost(std::size_t sample_count);

/// Caches EM fits of one target node by parent set.
class NodeEvaluator {
 public:
  /// `edge_cost` defaults to default_edge_cost(N); 0 compares raw evidence.
  NodeEvaluator(const RegressorBank& bank, std::size_t target, EmOptions options = {},
                std::optional<double> edge_cost = std::nullopt);

  /// `parents` need not be sorted; results are keyed by the sorted set.
  const NodeBayesState& evaluate(std::vector<std::size_t> parents);

  /// Evidence of a parent set under fixed hyperparameters (no EM).
  [[nodiscard]] double evaluate_fixed(std::span<const std::size_t> parents,
                                      const std::map<std::size_t, EdgeKernelParams>& params,
                                      double sigma_sq) const;

  [[nodiscard]] std::size_t target() const noexcept { return target_; }
  [[nodiscard]] const RegressorBank& bank() const noexcept { return bank_; }
  [[nodiscard]] std::size_t fits() const noexcept { return cache_.size(); }
  [[nodiscard]] double edge_cost() const noexcept { return edge_cost_; }

 private:
  const RegressorBank& bank_;
  std::size_t target_;
  EmOptions options_;
  double edge_cost_;
  std::map<std::vector<std::size_t>, NodeBayesState> cache_;
};

struct BayesGraphEstimate {
  std::size_t order = 0;
  DirectedGraph estimate;
  std::vector<NodeBayesState> nodes;
  double total_log_marginal_likelihood = 0.0;
  double total_log_evidence = 0.0;
};

struct SearchOptions {
  EmOptions em;
  std::size_t jobs = 1;
  double min_improvement = 1e-9;
  std::optional<double> edge_cost;
};

/// Order used when none is given: 50 for N = 50, 100 for N = 300 and
/// N = 2000, min(100, N / 3) otherwise (at least 1).
[[nodiscard]] std::size_t default_bayes_order(std::size_t sample_count);

/// Per-node forward-then-backward single-edge search for the parent set of
/// maximum log_evidence, starting from no parents. Ties go to the lowest source.
[[nodiscard]] NodeBayesState greedy_node_search(NodeEvaluator& evaluator,
                                                double min_improvement = 1e-9);

[[nodiscard]] BayesGraphEstimate greedy_search(const TimeSeriesDataset& dataset, std::size_t order,
                                               const SearchOptions& options = {});

/// Exhaustive enumeration of all 2^(L-1) parent sets of every node.
[[nodiscard]] BayesGraphEstimate exhaustive_search(const TimeSeriesDataset& dataset,
                                                   std::size_t order,
                                                   const SearchOptions& options = {});

/// Assembles an estimate from per-node states (order of `nodes` = target).
[[nodiscard]] BayesGraphEstimate assemble_estimate(std::size_t order,
                                                   std::vector<NodeBayesState> nodes);

}  // namespace netid
