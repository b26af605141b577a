#include "netid/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "netid/error.hpp"
#include "netid/regression.hpp"
#include "parallel.hpp"

namespace netid {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);
constexpr double kRidge = 1e-10;

/// log d_s for s = 1..m (see kernel_increments).
Eigen::VectorXd log_increments(double decay, std::size_t order) {
  const auto m = static_cast<Eigen::Index>(order);
  Eigen::VectorXd out(m);
  const double log_decay = std::log(decay);
  const double log_tail = std::log1p(-decay);
  for (Eigen::Index s = 1; s < m; ++s) out(s - 1) = static_cast<double>(s) * log_decay + log_tail;
  out(m - 1) = static_cast<double>(m) * log_decay;
  return out;
}

/// Square-root scales f with K_i = U diag(f_i^2) U^T, stacked over parents.
Eigen::VectorXd kernel_scales(std::span<const EdgeKernelParams> params, std::size_t order) {
  const auto m = static_cast<Eigen::Index>(order);
  Eigen::VectorXd f(m * static_cast<Eigen::Index>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto block = f.segment(static_cast<Eigen::Index>(i) * m, m);
    if (params[i].scale <= 0.0) {
      block.setZero();
    } else {
      block = (kernel_increments(params[i].decay, order) * params[i].scale).cwiseSqrt();
    }
  }
  return f;
}

void check_params(std::span<const EdgeKernelParams> params) {
  for (const auto& p : params) {
    if (!(p.scale >= 0.0) || !std::isfinite(p.scale))
      throw Error(ErrorKind::invalid_argument, "kernel scale must be finite and nonnegative");
    if (!(p.decay > 0.0 && p.decay < 1.0))
      throw Error(ErrorKind::invalid_argument, "kernel decay must lie in (0, 1)");
  }
}

/// Factorizes sigma_sq I + diag(f) G diag(f), retrying once with a ridge.
Eigen::LLT<Eigen::MatrixXd> factorize_system(const Eigen::MatrixXd& gram, const Eigen::VectorXd& f,
                                             double sigma_sq) {
  Eigen::MatrixXd c = f.asDiagonal() * gram * f.asDiagonal();
  c.diagonal().array() += sigma_sq;
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) {
    c.diagonal().array() += kRidge * std::max(1.0, c.diagonal().mean());
    llt.compute(c);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::numerical_failure,
                  "marginal covariance is not positive definite after ridge");
  }
  return llt;
}

/// In-place inverse of a lower-triangular matrix by recursive 2x2 blocking.
void invert_lower(Eigen::Ref<Eigen::MatrixXd> l) {
  const auto n = l.rows();
  if (n <= 48) {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    l.triangularView<Eigen::Lower>().solveInPlace(id);
    l.triangularView<Eigen::Lower>() = id;
    return;
  }
  const auto h = n / 2;
  auto a = l.topLeftCorner(h, h);
  auto b = l.bottomLeftCorner(n - h, h);
  auto d = l.bottomRightCorner(n - h, n - h);
  a.triangularView<Eigen::Lower>().solveInPlace<Eigen::OnTheRight>(b);
  d.triangularView<Eigen::Lower>().solveInPlace(b);
  b = -b;
  invert_lower(a);
  invert_lower(d);
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

/// Evidence given a factorized system; alpha = L^-1 (f o cross).
double evidence(const NodeProblem& problem, const Eigen::LLT<Eigen::MatrixXd>& llt,
                const Eigen::VectorXd& alpha, double sigma_sq) {
  const auto n = static_cast<double>(problem.samples);
  const auto p = static_cast<double>(problem.cross.size());
  const double quad = std::max(0.0, problem.energy - alpha.squaredNorm()) / sigma_sq;
  const double log_det_sigma = n * std::log(sigma_sq) + log_det(llt) - p * std::log(sigma_sq);
  return -0.5 * (n * kLog2Pi + log_det_sigma + quad);
}

double empty_evidence(double energy, std::size_t samples, double sigma_sq) {
  const auto n = static_cast<double>(samples);
  return -0.5 * (n * kLog2Pi + n * std::log(sigma_sq) + energy / sigma_sq);
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double top = v.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((v.array() - top).exp().sum());
}

/// Generalized M-step for one edge. `weights` holds log(f_s^2 S_s), where S_s
/// is the posterior second moment of whitened coefficient s. Minimizes
/// log det K' + tr(K'^-1 E[theta theta^T]) over (scale, decay).
EdgeKernelParams update_edge(const EdgeKernelParams& current, const Eigen::VectorXd& weights,
                             std::size_t order, const EmOptions& options) {
  if (current.scale <= 0.0) return current;
  const double m = static_cast<double>(order);
  auto log_scale = [&](double decay) {
    return log_sum_exp(weights - log_increments(decay, order)) - std::log(m);
  };
  auto objective = [&](double decay) {
    return m * log_scale(decay) + log_increments(decay, order).sum();
  };

  // Golden-section search for the decay.
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = options.decay_lower;
  double b = options.decay_upper;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > options.golden_tolerance) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = objective(x2);
    }
  }
  double decay = f1 <= f2 ? x1 : x2;
  double best = std::min(f1, f2);
  // Never accept a decay worse than the current one: keeps EM monotone even
  // when the profile objective is multimodal.
  if (objective(current.decay) <= best) decay = current.decay;

  const double scale = std::exp(log_scale(decay));
  return {std::max(scale, std::numeric_limits<double>::min()), decay};
}

NodeBayesState empty_state(const NodeProblem& problem) {
  NodeBayesState state;
  state.order = problem.order;
  const double n = static_cast<double>(problem.samples);
  state.noise_variance = std::max(problem.energy / n, std::numeric_limits<double>::min());
  state.log_marginal_likelihood =
      empty_evidence(problem.energy, problem.samples, state.noise_variance);
  state.log_evidence = state.log_marginal_likelihood;
  state.trace = {state.log_marginal_likelihood};
  return state;
}

}  // namespace

Eigen::VectorXd kernel_increments(double decay, std::size_t order) {
  return log_increments(decay, order).array().exp();
}

Eigen::MatrixXd kernel_matrix(const EdgeKernelParams& params, std::size_t order) {
  if (order == 0) throw Error(ErrorKind::invalid_argument, "kernel order must be at least 1");
  const auto m = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c)
      k(r, c) = params.scale * std::pow(params.decay, static_cast<double>(std::max(r, c) + 1));
  return k;
}

NodeProblem NodeProblem::from_blocks(const Eigen::Ref<const Eigen::VectorXd>& target,
                                     std::span<const Eigen::MatrixXd> blocks) {
  NodeProblem problem;
  problem.samples = static_cast<std::size_t>(target.size());
  problem.energy = target.squaredNorm();
  if (blocks.empty()) {
    problem.gram.resize(0, 0);
    problem.cross.resize(0);
    return problem;
  }
  const Eigen::Index m = blocks.front().cols();
  problem.order = static_cast<std::size_t>(m);
  Eigen::MatrixXd x(target.size(), m * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].rows() != target.size() || blocks[i].cols() != m)
      throw Error(ErrorKind::invalid_argument, "regressor blocks must all be N x m");
    auto cumulative = x.middleCols(static_cast<Eigen::Index>(i) * m, m);
    cumulative.col(0) = blocks[i].col(0);
    for (Eigen::Index s = 1; s < m; ++s)
      cumulative.col(s) = cumulative.col(s - 1) + blocks[i].col(s);
  }
  problem.gram = x.transpose() * x;
  problem.cross = x.transpose() * target;
  return problem;
}

RegressorBank::RegressorBank(const TimeSeriesDataset& dataset, std::size_t order)
    : order_(order), node_count_(dataset.node_count()), sample_count_(dataset.sample_count()) {
  if (order == 0) throw Error(ErrorKind::invalid_argument, "order must be at least 1");
  if (order > sample_count_)
    throw Error(ErrorKind::order_too_large, "order " + std::to_string(order) +
                                                " exceeds the data length " +
                                                std::to_string(sample_count_));
  const auto m = static_cast<Eigen::Index>(order);
  const auto n = static_cast<Eigen::Index>(sample_count_);
  const auto L = static_cast<Eigen::Index>(node_count_);
  // Cumulative lag s of node i: sum_{k=1..s} w_i(t - k).
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, m * L);
  for (Eigen::Index i = 0; i < L; ++i) {
    const Eigen::VectorXd w = dataset.data().row(i).transpose();
    auto block = x.middleCols(i * m, m);
    block.col(0).tail(n - 1) = w.head(n - 1);
    for (Eigen::Index s = 1; s < m; ++s) {
      block.col(s) = block.col(s - 1);
      block.col(s).tail(n - s - 1) += w.head(n - s - 1);
    }
  }
  gram_ = Eigen::MatrixXd::Zero(m * L, m * L);
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  gram_ = gram_.selfadjointView<Eigen::Lower>();
  cross_ = x.transpose() * dataset.data().transpose();
  energy_ = dataset.data().rowwise().squaredNorm();
}

NodeProblem RegressorBank::problem(std::size_t target, std::span<const std::size_t> parents) const {
  if (target >= node_count_) throw Error(ErrorKind::invalid_argument, "target out of range");
  const auto m = static_cast<Eigen::Index>(order_);
  const auto k = static_cast<Eigen::Index>(parents.size());
  NodeProblem problem;
  problem.samples = sample_count_;
  problem.order = order_;
  problem.energy = energy_(static_cast<Eigen::Index>(target));
  problem.gram.resize(k * m, k * m);
  problem.cross.resize(k * m);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto pa = static_cast<Eigen::Index>(parents[a]);
    if (parents[a] >= node_count_ || parents[a] == target)
      throw Error(ErrorKind::invalid_argument, "invalid parent " + std::to_string(parents[a]) +
                                                   " for target " + std::to_string(target));
    problem.cross.segment(a * m, m) =
        cross_.col(static_cast<Eigen::Index>(target)).segment(pa * m, m);
    for (Eigen::Index b = 0; b < k; ++b) {
      const auto pb = static_cast<Eigen::Index>(parents[b]);
      problem.gram.block(a * m, b * m, m, m) = gram_.block(pa * m, pb * m, m, m);
    }
  }
  return problem;
}

double log_marginal_likelihood(const NodeProblem& problem, std::span<const EdgeKernelParams> params,
                               double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw Error(ErrorKind::invalid_argument, "sigma_sq must be positive");
  if (params.size() != problem.parent_count())
    throw Error(ErrorKind::invalid_argument, "need one kernel parameter set per parent block");
  check_params(params);
  if (params.empty()) return empty_evidence(problem.energy, problem.samples, sigma_sq);
  const Eigen::VectorXd f = kernel_scales(params, problem.order);
  const auto llt = factorize_system(problem.gram, f, sigma_sq);
  const Eigen::VectorXd alpha = llt.matrixL().solve(f.cwiseProduct(problem.cross));
  return evidence(problem, llt, alpha, sigma_sq);
}

double log_marginal_likelihood_direct(const Eigen::Ref<const Eigen::VectorXd>& target,
                                      std::span<const Eigen::MatrixXd> blocks,
                                      std::span<const EdgeKernelParams> params, double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw Error(ErrorKind::invalid_argument, "sigma_sq must be positive");
  if (params.size() != blocks.size())
    throw Error(ErrorKind::invalid_argument, "need one kernel parameter set per parent block");
  check_params(params);
  const auto n = target.size();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(n, n) * sigma_sq;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].rows() != n)
      throw Error(ErrorKind::invalid_argument, "regressor blocks must have N rows");
    const auto k = kernel_matrix(params[i], static_cast<std::size_t>(blocks[i].cols()));
    sigma.noalias() += blocks[i] * k * blocks[i].transpose();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    sigma.diagonal().array() += kRidge * std::max(1.0, sigma.diagonal().mean());
    llt.compute(sigma);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::numerical_failure,
                  "marginal covariance is not positive definite after ridge");
  }
  const Eigen::VectorXd alpha = llt.matrixL().solve(target);
  return -0.5 * (static_cast<double>(n) * kLog2Pi + log_det(llt) + alpha.squaredNorm());
}

double log_marginal_likelihood(const Eigen::Ref<const Eigen::VectorXd>& target,
                               std::span<const Eigen::MatrixXd> blocks,
                               std::span<const EdgeKernelParams> params, double sigma_sq) {
  std::size_t regressors = 0;
  for (const auto& b : blocks) regressors += static_cast<std::size_t>(b.cols());
  if (regressors < static_cast<std::size_t>(target.size()))
    return log_marginal_likelihood(NodeProblem::from_blocks(target, blocks), params, sigma_sq);
  return log_marginal_likelihood_direct(target, blocks, params, sigma_sq);
}

NodeBayesState em_estimate(const NodeProblem& problem, std::span<const EdgeKernelParams> initial,
                           double initial_sigma_sq, const EmOptions& options) {
  const std::size_t k = problem.parent_count();
  if (k == 0) return empty_state(problem);
  if (initial.size() != k)
    throw Error(ErrorKind::invalid_argument, "need one initial parameter set per parent");
  check_params(initial);
  if (!(initial_sigma_sq > 0.0))
    throw Error(ErrorKind::invalid_argument, "initial noise variance must be positive");

  const auto m = static_cast<Eigen::Index>(problem.order);
  const auto p = problem.cross.size();
  const double n = static_cast<double>(problem.samples);
  const double sigma_floor = 1e-12 * std::max(problem.energy / n, 1e-300);

  NodeBayesState state;
  state.order = problem.order;
  state.params.assign(initial.begin(), initial.end());
  double sigma_sq = initial_sigma_sq;
  double previous = -std::numeric_limits<double>::infinity();

  for (std::size_t iteration = 0;; ++iteration) {
    const Eigen::VectorXd f = kernel_scales(state.params, problem.order);
    const auto llt = factorize_system(problem.gram, f, sigma_sq);
    const Eigen::VectorXd v = f.cwiseProduct(problem.cross);
    const Eigen::VectorXd alpha = llt.matrixL().solve(v);
    const double lml = evidence(problem, llt, alpha, sigma_sq);

    if (std::isnan(lml)) throw Error(ErrorKind::numerical_failure, "EM likelihood became NaN");
    if (iteration > 0 && lml < previous - 1e-8 * std::max(1.0, std::abs(previous)))
      throw Error(ErrorKind::internal_consistency, "EM likelihood decreased from " +
                                                       std::to_string(previous) + " to " +
                                                       std::to_string(lml));
    state.trace.push_back(lml);
    state.log_marginal_likelihood = lml;
    state.log_evidence = lml;
    state.noise_variance = sigma_sq;
    state.iterations = iteration;
    const bool converged =
        iteration > 0 && std::abs(lml - previous) < options.tolerance * std::abs(previous);
    if (converged || iteration >= options.max_iterations) break;
    previous = lml;

    // E-step: posterior of the whitened coefficients z with theta = F z has
    // mean C^-1 v and covariance sigma_sq C^-1.
    const Eigen::VectorXd mean = llt.matrixU().solve(alpha);
    Eigen::MatrixXd l_inv = llt.matrixLLT();
    invert_lower(l_inv);
    const Eigen::VectorXd c_inv_diag =
        Eigen::MatrixXd(l_inv.triangularView<Eigen::Lower>()).colwise().squaredNorm().transpose();

    const double residual_power = problem.energy - mean.dot(v) - sigma_sq * mean.squaredNorm() +
                                  sigma_sq * static_cast<double>(p) -
                                  sigma_sq * sigma_sq * c_inv_diag.sum();
    const double next_sigma_sq = std::max(residual_power / n, sigma_floor);

    for (std::size_t i = 0; i < k; ++i) {
      const auto offset = static_cast<Eigen::Index>(i) * m;
      const Eigen::ArrayXd second_moment = mean.segment(offset, m).array().square() +
                                           sigma_sq * c_inv_diag.segment(offset, m).array();
      const auto& edge = state.params[i];
      const Eigen::VectorXd weights =
          (std::log(edge.scale) + log_increments(edge.decay, problem.order).array() +
           second_moment.log())
              .matrix();
      state.params[i] = update_edge(state.params[i], weights, problem.order, options);
    }
    sigma_sq = next_sigma_sq;
  }
  return state;
}

NodeBayesState em_estimate(const NodeProblem& problem, const EmOptions& options) {
  const std::size_t k = problem.parent_count();
  if (k == 0) return empty_state(problem);
  const double variance = std::max(problem.energy / static_cast<double>(problem.samples), 1e-300);
  if (options.decay_starts.empty())
    throw Error(ErrorKind::invalid_argument, "EM needs at least one decay start");
  NodeBayesState best;
  bool have_best = false;
  for (double decay : options.decay_starts) {
    std::vector<EdgeKernelParams> start(k, {variance / static_cast<double>(problem.order), decay});
    auto state = em_estimate(problem, start, 0.5 * variance, options);
    if (!have_best || state.log_marginal_likelihood > best.log_marginal_likelihood) {
      best = std::move(state);
      have_best = true;
    }
  }
  return best;
}

NodeBayesState em_estimate(const Eigen::Ref<const Eigen::VectorXd>& target,
                           std::span<const Eigen::MatrixXd> blocks, const EmOptions& options) {
  return em_estimate(NodeProblem::from_blocks(target, blocks), options);
}

NodeEvaluator::NodeEvaluator(const RegressorBank& bank, std::size_t target, EmOptions options,
                             std::optional<double> edge_cost)
    : bank_(bank),
      target_(target),
      options_(std::move(options)),
      edge_cost_(edge_cost.value_or(default_edge_cost(bank.sample_count()))) {
  if (target >= bank.node_count()) throw Error(ErrorKind::invalid_argument, "target out of range");
  if (!(edge_cost_ >= 0.0) || !std::isfinite(edge_cost_))
    throw Error(ErrorKind::invalid_argument, "edge cost must be finite and nonnegative");
}

const NodeBayesState& NodeEvaluator::evaluate(std::vector<std::size_t> parents) {
  std::sort(parents.begin(), parents.end());
  parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
  auto it = cache_.find(parents);
  if (it != cache_.end()) return it->second;
  NodeBayesState state;
  try {
    state = em_estimate(bank_.problem(target_, parents), options_);
  } catch (const Error& e) {
    std::string set;
    for (auto p : parents) set += (set.empty() ? "" : ",") + std::to_string(p);
    throw Error(e.kind(), std::string(e.what()) + " (node " + std::to_string(target_) +
                              ", parents {" + set + "})");
  }
  state.target = target_;
  state.parents = parents;
  state.log_evidence =
      state.log_marginal_likelihood - edge_cost_ * static_cast<double>(parents.size());
  return cache_.emplace(std::move(parents), std::move(state)).first->second;
}

double NodeEvaluator::evaluate_fixed(std::span<const std::size_t> parents,
                                     const std::map<std::size_t, EdgeKernelParams>& params,
                                     double sigma_sq) const {
  std::vector<EdgeKernelParams> aligned;
  aligned.reserve(parents.size());
  for (auto p : parents) {
    auto it = params.find(p);
    if (it == params.end())
      throw Error(ErrorKind::invalid_argument,
                  "no hyperparameters for parent " + std::to_string(p));
    aligned.push_back(it->second);
  }
  return log_marginal_likelihood(bank_.problem(target_, parents), aligned, sigma_sq);
}

double default_edge_cost(std::size_t sample_count) {
  return std::log(static_cast<double>(std::max<std::size_t>(sample_count, 1)));
}

std::size_t default_bayes_order(std::size_t sample_count) {
  if (sample_count == 50) return 50;
  if (sample_count == 300 || sample_count == 2000) return 100;
  return std::max<std::size_t>(1, std::min<std::size_t>(100, sample_count / 3));
}

NodeBayesState greedy_node_search(NodeEvaluator& evaluator, double min_improvement) {
  auto better = [](const NodeBayesState& a, const NodeBayesState& b) {
    return a.log_evidence > b.log_evidence;
  };
  const std::size_t L = evaluator.bank().node_count();
  const std::size_t target = evaluator.target();
  std::vector<std::size_t> current;
  NodeBayesState best = evaluator.evaluate(current);

  // Forward: add the single best parent while it improves the evidence.
  while (true) {
    const NodeBayesState* candidate = nullptr;
    for (std::size_t source = 0; source < L; ++source) {
      if (source == target || std::find(current.begin(), current.end(), source) != current.end())
        continue;
      auto parents = current;
      parents.push_back(source);
      const auto& state = evaluator.evaluate(parents);
      if (!candidate || better(state, *candidate)) candidate = &state;
    }
    if (!candidate || !(candidate->log_evidence > best.log_evidence + min_improvement)) break;
    best = *candidate;
    current = best.parents;
  }

  // Backward: drop the single parent whose removal helps most.
  while (!current.empty()) {
    const NodeBayesState* candidate = nullptr;
    for (std::size_t k = 0; k < current.size(); ++k) {
      auto parents = current;
      parents.erase(parents.begin() + static_cast<std::ptrdiff_t>(k));
      const auto& state = evaluator.evaluate(parents);
      if (!candidate || better(state, *candidate)) candidate = &state;
    }
    if (!(candidate->log_evidence > best.log_evidence + min_improvement)) break;
    best = *candidate;
    current = best.parents;
  }
  return best;
}

BayesGraphEstimate assemble_estimate(std::size_t order, std::vector<NodeBayesState> nodes) {
  BayesGraphEstimate out;
  out.order = order;
  out.estimate = DirectedGraph(nodes.size());
  for (const auto& node : nodes) {
    for (auto parent : node.parents) out.estimate.add({node.target, parent});
    out.total_log_marginal_likelihood += node.log_marginal_likelihood;
    out.total_log_evidence += node.log_evidence;
  }
  out.nodes = std::move(nodes);
  return out;
}

BayesGraphEstimate greedy_search(const TimeSeriesDataset& dataset, std::size_t order,
                                 const SearchOptions& options) {
  const RegressorBank bank(dataset, order);
  const std::size_t L = dataset.node_count();
  std::vector<NodeBayesState> nodes(L);
  detail::parallel_for(L, options.jobs, [&](std::size_t j) {
    NodeEvaluator evaluator(bank, j, options.em, options.edge_cost);
    nodes[j] = greedy_node_search(evaluator, options.min_improvement);
  });
  return assemble_estimate(order, std::move(nodes));
}

BayesGraphEstimate exhaustive_search(const TimeSeriesDataset& dataset, std::size_t order,
                                     const SearchOptions& options) {
  const RegressorBank bank(dataset, order);
  const std::size_t L = dataset.node_count();
  if (L > 21) throw Error(ErrorKind::invalid_argument, "exhaustive search is limited to 21 nodes");
  std::vector<NodeBayesState> nodes(L);
  detail::parallel_for(L, options.jobs, [&](std::size_t j) {
    NodeEvaluator evaluator(bank, j, options.em, options.edge_cost);
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < L; ++i)
      if (i != j) pool.push_back(i);
    const NodeBayesState* best = nullptr;
    for (std::size_t mask = 0; mask < (std::size_t{1} << pool.size()); ++mask) {
      std::vector<std::size_t> parents;
      for (std::size_t b = 0; b < pool.size(); ++b)
        if (mask & (std::size_t{1} << b)) parents.push_back(pool[b]);
      const auto& state = evaluator.evaluate(parents);
      if (!best || state.log_evidence > best->log_evidence) best = &state;
    }
    nodes[j] = *best;
  });
  return assemble_estimate(order, std::move(nodes));
}

}  // namespace netid
