#include "netid/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "netid/error.hpp"
#include "netid/granger.hpp"
#include "netid/rng.hpp"
#include "netid/simulate.hpp"
#include "parallel.hpp"

namespace netid {

namespace {

constexpr std::uint64_t kModelStream = 1;
constexpr std::uint64_t kDataStream = 2;

struct ModelOutcome {
  std::uint64_t seed = 0;
  std::optional<std::string> failure;
  EdgeRates bayes;
  std::vector<EdgeRates> granger;
};

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

RocRecord reduce(std::string method, std::size_t L, std::size_t N, std::optional<double> alpha,
                 const std::vector<ModelOutcome>& outcomes,
                 const std::function<const EdgeRates&(const ModelOutcome&)>& pick) {
  RocRecord record;
  record.method = std::move(method);
  record.node_count = L;
  record.sample_count = N;
  record.alpha = alpha;
  record.model_count = outcomes.size();
  double tpr = 0.0;
  double fpr = 0.0;
  for (const auto& o : outcomes) {
    if (o.failure) {
      ++record.failed;
      record.failures.push_back(*o.failure);
      continue;
    }
    const auto& rates = pick(o);
    record.tprs.push_back(rates.tpr);
    record.fprs.push_back(rates.fpr);
    record.seeds.push_back(o.seed);
    tpr += rates.tpr;
    fpr += rates.fpr;
  }
  const auto used = static_cast<double>(record.tprs.size());
  record.mean_tpr = used > 0 ? tpr / used : std::numeric_limits<double>::quiet_NaN();
  record.mean_fpr = used > 0 ? fpr / used : std::numeric_limits<double>::quiet_NaN();
  record.valid = used > 0 && 5 * record.failed <= record.model_count;
  return record;
}

}  // namespace

EdgeRates evaluate_estimate(const DirectedGraph& estimate, const DirectedGraph& truth) {
  if (estimate.node_count() != truth.node_count())
    throw Error(ErrorKind::invalid_argument, "estimate and truth have different node counts");
  EdgeRates rates;
  rates.positives = truth.edge_count();
  rates.negatives = truth.candidate_edge_count() - rates.positives;
  if (rates.positives == 0)
    throw Error(ErrorKind::degenerate_truth, "true graph has no edges, TPR undefined");
  if (rates.negatives == 0)
    throw Error(ErrorKind::degenerate_truth, "true graph is complete, FPR undefined");
  for (const auto& e : estimate.edges()) (truth.contains(e) ? rates.tp : rates.fp) += 1;
  rates.tpr = static_cast<double>(rates.tp) / static_cast<double>(rates.positives);
  rates.fpr = static_cast<double>(rates.fp) / static_cast<double>(rates.negatives);
  return rates;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid{0.005};
  for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
  return grid;
}

void BenchConfig::validate() const {
  if (sample_counts.empty() || node_counts.empty() || alphas.empty())
    throw Error(ErrorKind::invalid_argument, "benchmark lists must be nonempty");
  if (model_count == 0) throw Error(ErrorKind::invalid_argument, "model count must be at least 1");
  for (auto a : alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw Error(ErrorKind::invalid_argument, "alpha outside [0, 1]");
  for (auto L : node_counts)
    if (L < 2) throw Error(ErrorKind::invalid_argument, "node counts must be at least 2");
  for (auto N : sample_counts)
    if (N < 2) throw Error(ErrorKind::invalid_argument, "data lengths must be at least 2");
  if (granger_max_order == 0)
    throw Error(ErrorKind::invalid_argument, "Granger order limit must be at least 1");
}

std::uint64_t model_seed(std::uint64_t master, std::size_t node_count, std::size_t model) {
  return derive_seed(master, {kModelStream, node_count, model});
}

std::uint64_t data_seed(std::uint64_t master, std::size_t node_count, std::size_t model,
                        std::size_t sample_count) {
  return derive_seed(master, {kDataStream, node_count, model, sample_count});
}

std::vector<RocRecord> run_benchmark(const BenchConfig& config, const BenchProgress& progress) {
  config.validate();
  std::vector<RocRecord> records;
  for (auto L : config.node_counts) {
    for (auto N : config.sample_counts) {
      const auto order_it = config.orders.find(N);
      const std::size_t order =
          order_it != config.orders.end() ? order_it->second : default_bayes_order(N);
      std::vector<ModelOutcome> outcomes(config.model_count);
      detail::parallel_for(config.model_count, config.jobs, [&](std::size_t k) {
        auto& outcome = outcomes[k];
        outcome.seed = model_seed(config.seed, L, k);
        try {
          SimConfig sim = config.sim;
          sim.node_count = L;
          sim.seed = outcome.seed;
          const auto generated = random_network_model(sim);
          const auto& truth = generated.model.ground_truth();
          // Reject degenerate truths before spending time on estimation.
          (void)evaluate_estimate(DirectedGraph(L), truth);
          const auto data = simulate_network(generated.model, N, data_seed(config.seed, L, k, N));
          if (config.run_bayes) {
            SearchOptions search = config.search;
            search.jobs = 1;
            outcome.bayes = evaluate_estimate(greedy_search(data, order, search).estimate, truth);
          }
          if (config.run_granger) {
            const auto m =
                select_order_aic(data, max_feasible_order(data, config.granger_max_order));
            const auto result = granger_matrix(data, m);
            for (auto alpha : config.alphas)
              outcome.granger.push_back(
                  evaluate_estimate(threshold_graph(result, alpha, true), truth));
          }
        } catch (const Error& e) {
          outcome.failure = "model " + std::to_string(k) + ": " + std::string(to_string(e.kind())) +
                            ": " + e.what();
        }
        if (progress)
          progress("L=" + std::to_string(L) + " N=" + std::to_string(N) + " model " +
                   std::to_string(k + 1) + "/" + std::to_string(config.model_count) +
                   (outcome.failure ? " failed" : " done"));
      });
      if (config.run_bayes)
        records.push_back(
            reduce("bayes", L, N, std::nullopt, outcomes,
                   [](const ModelOutcome& o) -> const EdgeRates& { return o.bayes; }));
      if (config.run_granger)
        for (std::size_t a = 0; a < config.alphas.size(); ++a)
          records.push_back(
              reduce("granger", L, N, config.alphas[a], outcomes,
                     [a](const ModelOutcome& o) -> const EdgeRates& { return o.granger[a]; }));
    }
  }
  return records;
}

void write_roc_csv(std::ostream& out, const std::vector<RocRecord>& records) {
  out << "method,L,N,alpha,mean_tpr,mean_fpr,n_models,n_failed\n";
  for (const auto& r : records) {
    out << r.method << ',' << r.node_count << ',' << r.sample_count << ','
        << (r.alpha ? format_double(*r.alpha) : std::string()) << ',' << format_double(r.mean_tpr)
        << ',' << format_double(r.mean_fpr) << ',' << r.model_count << ',' << r.failed << '\n';
  }
}

}  // namespace netid
