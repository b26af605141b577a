#include <doctest.h>

#include <chrono>
#include <cmath>

#include "netid/bayes.hpp"
#include "netid/error.hpp"
#include "netid/simgen.hpp"
#include "netid/simulate.hpp"

using namespace netid;

namespace {

TimeSeriesDataset chain_data(std::size_t n, std::uint64_t seed, double gain = 0.8) {
  std::vector<TransferFunction> g(9);
  g[1 * 3 + 0] = TransferFunction::delay(gain);
  g[2 * 3 + 1] = TransferFunction::delay(gain, 2);
  return simulate_network(TransferNetwork(3, std::move(g), {1.0, 1.0, 1.0}), n, seed);
}

TimeSeriesDataset network_data(std::size_t L, std::size_t n, std::uint64_t seed) {
  SimConfig config;
  config.node_count = L;
  config.seed = seed;
  return simulate_network(random_network_model(config).model, n, seed + 1000);
}

}  // namespace

TEST_CASE("total scores decompose over nodes") {
  const auto data = network_data(4, 200, 3);
  const auto est = greedy_search(data, 10);
  double lml = 0.0;
  double evidence = 0.0;
  for (const auto& node : est.nodes) {
    lml += node.log_marginal_likelihood;
    evidence += node.log_evidence;
  }
  CHECK(std::abs(est.total_log_marginal_likelihood - lml) < 1e-10 * std::abs(lml));
  CHECK(std::abs(est.total_log_evidence - evidence) < 1e-10 * std::abs(evidence));
  const double cost = default_edge_cost(data.sample_count());
  CHECK(est.total_log_evidence ==
        doctest::Approx(est.total_log_marginal_likelihood -
                        cost * static_cast<double>(est.estimate.edge_count())));
  for (const auto& node : est.nodes)
    for (auto p : node.parents) CHECK(est.estimate.contains({node.target, p}));
}

TEST_CASE("exhaustive search returns the per-node argmax") {
  const auto data = chain_data(150, 11);
  const auto est = exhaustive_search(data, 8);
  const RegressorBank bank(data, 8);
  for (std::size_t target = 0; target < 3; ++target) {
    NodeEvaluator evaluator(bank, target);
    double best = -1e300;
    for (unsigned mask = 0; mask < 4; ++mask) {
      std::vector<std::size_t> parents;
      std::size_t slot = 0;
      for (std::size_t s = 0; s < 3; ++s) {
        if (s == target) continue;
        if (mask & (1u << slot)) parents.push_back(s);
        ++slot;
      }
      best = std::max(best, evaluator.evaluate(parents).log_evidence);
    }
    CHECK(est.nodes[target].log_evidence == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("greedy matches exhaustive on small networks") {
  int agree = 0;
  const int models = 8;
  for (int k = 0; k < models; ++k) {
    const auto data = network_data(4, 300, 40 + static_cast<std::uint64_t>(k));
    const auto greedy = greedy_search(data, 10);
    const auto full = exhaustive_search(data, 10);
    CHECK(greedy.total_log_evidence <= full.total_log_evidence + 1e-9);
    agree += std::abs(greedy.total_log_evidence - full.total_log_evidence) <= 1e-6;
  }
  CHECK(agree >= models - 1);
}

TEST_CASE("a strong single edge is recovered") {
  const auto data = chain_data(500, 5);
  const auto est = greedy_search(data, 10);
  CHECK(est.estimate.contains({1, 0}));
  CHECK(est.estimate.contains({2, 1}));
  CHECK(est.estimate.edge_count() == 2);
}

TEST_CASE("white noise yields the empty graph") {
  int empty = 0;
  const int seeds = 50;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto data =
        simulate_network(TransferNetwork::empty(3), 2000, static_cast<std::uint64_t>(seed));
    empty += greedy_search(data, default_bayes_order(2000)).estimate.edge_count() == 0;
  }
  CHECK(empty >= 45);
}

TEST_CASE("parallel search is deterministic") {
  const auto data = network_data(5, 200, 9);
  SearchOptions serial;
  SearchOptions parallel;
  parallel.jobs = 4;
  const auto a = greedy_search(data, 12, serial);
  const auto b = greedy_search(data, 12, parallel);
  CHECK(a.estimate.edges() == b.estimate.edges());
  CHECK(a.total_log_evidence == b.total_log_evidence);
}

TEST_CASE("zero edge cost compares raw evidence") {
  const auto data = chain_data(200, 21);
  SearchOptions raw;
  raw.edge_cost = 0.0;
  const auto est = greedy_search(data, 8, raw);
  CHECK(est.total_log_evidence == doctest::Approx(est.total_log_marginal_likelihood));
  SearchOptions negative;
  negative.edge_cost = -1.0;
  CHECK_THROWS_AS((void)greedy_search(data, 8, negative), Error);
}

TEST_CASE("search preconditions") {
  const auto data = chain_data(50, 1);
  CHECK_THROWS_AS((void)greedy_search(data, 0), Error);
  CHECK_THROWS_AS((void)greedy_search(data, 51), Error);
}

TEST_CASE("evaluator caches by sorted parent set") {
  const auto data = network_data(4, 120, 2);
  const RegressorBank bank(data, 6);
  NodeEvaluator evaluator(bank, 0);
  const auto& a = evaluator.evaluate({3, 1});
  const auto fits = evaluator.fits();
  const auto& b = evaluator.evaluate({1, 3});
  CHECK(&a == &b);
  CHECK(evaluator.fits() == fits);
  CHECK_THROWS_AS((void)evaluator.evaluate({0}), Error);
}
