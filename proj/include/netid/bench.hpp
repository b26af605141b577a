#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netid/bayes.hpp"
#include "netid/graph.hpp"
#include "netid/simgen.hpp"

namespace netid {

struct EdgeRates {
  double tpr = 0.0;
  double fpr = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// TPR = TP/P and FPR = FP/F over the L(L-1) ordered pairs. Throws
/// `Error{degenerate_truth}` when the truth has no edges or is complete.
[[nodiscard]] EdgeRates evaluate_estimate(const DirectedGraph& estimate,
                                          const DirectedGraph& truth);

/// 0.005 followed by 0.05, 0.10, ..., 0.95.
[[nodiscard]] std::vector<double> default_alpha_grid();

struct BenchConfig {
  std::vector<std::size_t> sample_counts{50, 300, 2000};
  std::vector<std::size_t> node_counts{6};
  std::size_t model_count = 20;
  std::vector<double> alphas = default_alpha_grid();
  /// node_count and seed are overwritten per model.
  SimConfig sim;
  /// Bayesian order per data length; default_bayes_order otherwise.
  std::map<std::size_t, std::size_t> orders;
  std::size_t granger_max_order = 10;
  bool run_bayes = true;
  bool run_granger = true;
  SearchOptions search;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  /// Throws `Error{invalid_argument}` on empty lists or a zero model count.
  void validate() const;
};

inline constexpr std::size_t kPaperModelCount = 50;

struct RocRecord {
  std::string method;  // "bayes" or "granger"
  std::size_t node_count = 0;
  std::size_t sample_count = 0;
  std::optional<double> alpha;
  double mean_tpr = 0.0;
  double mean_fpr = 0.0;
  /// Per successful model, in model order.
  std::vector<double> tprs;
  std::vector<double> fprs;
  std::vector<std::uint64_t> seeds;
  std::size_t model_count = 0;
  std::size_t failed = 0;
  /// False when more than 20% of the models failed.
  bool valid = true;
  std::vector<std::string> failures;
};

/// Seed of model k in the cell with L nodes; shared by all data lengths.
[[nodiscard]] std::uint64_t model_seed(std::uint64_t master, std::size_t node_count,
                                       std::size_t model);
/// Seed of the simulated noise for model k at data length N.
[[nodiscard]] std::uint64_t data_seed(std::uint64_t master, std::size_t node_count,
                                      std::size_t model, std::size_t sample_count);

using BenchProgress = std::function<void(const std::string&)>;

/// One Bayesian record and one Granger record per alpha for every
/// (N, L) cell, cells ordered by L then N.
[[nodiscard]] std::vector<RocRecord> run_benchmark(const BenchConfig& config,
                                                   const BenchProgress& progress = {});

/// Header `method,L,N,alpha,mean_tpr,mean_fpr,n_models,n_failed`.
void write_roc_csv(std::ostream& out, const std::vector<RocRecord>& records);

}  // namespace netid
