#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netid/bayes.hpp"
#include "netid/error.hpp"
#include "netid/group.hpp"
#include "netid/regression.hpp"
#include "netid/simulate.hpp"

using namespace netid;

namespace {

SubjectEvidence evidence(double present, double absent, Edge edge = {1, 0}) {
  SubjectEvidence out;
  out.edge = edge;
  out.log_evidence_present = present;
  out.log_evidence_absent = absent;
  out.subgraph_count = 1;
  return out;
}

TimeSeriesDataset fan_in(std::size_t L, std::size_t n, std::uint64_t seed,
                         std::vector<std::pair<std::size_t, double>> sources) {
  std::vector<TransferFunction> g(L * L);
  for (auto [source, gain] : sources) g[0 * L + source] = TransferFunction::delay(gain);
  return simulate_network(TransferNetwork(L, std::move(g), std::vector<double>(L, 1.0)), n, seed);
}

double log_sum_exp(const std::vector<double>& values) {
  const double top = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

}  // namespace

TEST_CASE("Bayes factor algebra") {
  const std::vector<SubjectEvidence> equal{evidence(-10.0, -10.0), evidence(-3.0, -3.0)};
  const auto flat = group_bayes_factor(equal, "s1");
  CHECK(flat.bayes_factor == 0.0);
  CHECK(flat.posterior_h1 == 0.5);
  CHECK(flat.posterior == 0.5);
  CHECK(flat.strength == "weak");
  CHECK(flat.session == "s1");

  const std::vector<SubjectEvidence> one{evidence(-4.0, -4.5), evidence(-2.0, -2.5)};
  const auto g = group_bayes_factor(one);
  CHECK(g.bayes_factor == doctest::Approx(2.0));
  CHECK(g.posterior_h1 == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(g.posterior_h1 == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(g.optimal == Hypothesis::h1);

  const std::vector<SubjectEvidence> against{evidence(-9.0, -4.0)};
  const auto h0 = group_bayes_factor(against);
  CHECK(h0.optimal == Hypothesis::h0);
  CHECK(h0.posterior == doctest::Approx(1.0 - h0.posterior_h1));
  CHECK(h0.posterior >= 0.5);
  CHECK(h0.strength == "strong");
}

TEST_CASE("posterior is exact and stable for extreme factors") {
  for (double bf : {-5000.0, -40.0, -1.0, 0.0, 0.5, 8.266, 900.0}) {
    const double p = posterior_from_bayes_factor(bf);
    CHECK(std::isfinite(p));
    CHECK(p + posterior_from_bayes_factor(-bf) == doctest::Approx(1.0));
    if (std::abs(bf) < 50) CHECK(p == doctest::Approx(1.0 / (1.0 + std::exp(-bf / 2.0))));
  }
  CHECK(posterior_from_bayes_factor(8.266) == doctest::Approx(0.98).epsilon(0.005));
}

TEST_CASE("evidence strength labels") {
  CHECK(evidence_strength(0.0) == "weak");
  CHECK(evidence_strength(2.0) == "weak");
  CHECK(evidence_strength(-2.5) == "positive");
  CHECK(evidence_strength(6.0) == "positive");
  CHECK(evidence_strength(8.266) == "strong");
  CHECK(evidence_strength(10.0) == "strong");
  CHECK(evidence_strength(-10.5) == "very strong");
}

TEST_CASE("group factor ignores per-subject constants") {
  const std::vector<SubjectEvidence> base{evidence(-100.2, -101.7), evidence(-50.0, -49.1),
                                          evidence(-75.3, -75.0)};
  auto shifted = base;
  const double shifts[] = {1e3, -250.5, 17.25};
  for (std::size_t k = 0; k < shifted.size(); ++k) {
    shifted[k].log_evidence_present += shifts[k];
    shifted[k].log_evidence_absent += shifts[k];
  }
  CHECK(std::abs(group_bayes_factor(base).bayes_factor - group_bayes_factor(shifted).bayes_factor) <
        1e-10);
  auto permuted = base;
  std::reverse(permuted.begin(), permuted.end());
  CHECK(group_bayes_factor(permuted).bayes_factor ==
        doctest::Approx(group_bayes_factor(base).bayes_factor).epsilon(1e-14));
}

TEST_CASE("group factor preconditions") {
  const std::vector<SubjectEvidence> none;
  CHECK_THROWS_AS((void)group_bayes_factor(none), Error);
  const std::vector<SubjectEvidence> mixed{evidence(0, 0, {1, 0}), evidence(0, 0, {2, 0})};
  CHECK_THROWS_AS((void)group_bayes_factor(mixed), Error);
}

TEST_CASE("change protocol") {
  using enum Hypothesis;
  auto verdict = [](std::vector<Hypothesis> seq) { return change_protocol(seq); };

  auto v = verdict({h0, h0, h1, h0});
  CHECK(v.change_detected);
  CHECK(v.has_follow_up);
  CHECK_FALSE(v.persistent);

  v = verdict({h0, h1, h1, h1});
  CHECK_FALSE(v.change_detected);
  CHECK_FALSE(v.persistent);

  v = verdict({h0, h0, h0, h0});
  CHECK_FALSE(v.change_detected);

  v = verdict({h1, h1, h0, h0});
  CHECK(v.change_detected);
  CHECK(v.persistent);
  CHECK(v.rationale.find("H1") != std::string::npos);

  v = verdict({h1, h1, h0});
  CHECK(v.change_detected);
  CHECK_FALSE(v.has_follow_up);

  CHECK_THROWS_AS((void)verdict({h0, h1}), Error);
}

TEST_CASE("change protocol from group evidence") {
  std::vector<GroupEvidence> sessions(4);
  const double bfs[] = {-3.0, -1.0, 8.0, -2.0};
  for (std::size_t s = 0; s < 4; ++s) {
    const std::vector<SubjectEvidence> ev{evidence(bfs[s] / 2.0, 0.0, {2, 1})};
    sessions[s] = group_bayes_factor(ev);
  }
  const auto v = change_protocol(sessions);
  CHECK(v.edge == Edge{2, 1});
  CHECK(v.change_detected);
  CHECK_FALSE(v.persistent);
}

TEST_CASE("subgroup split") {
  std::vector<SubjectCovariate> subjects;
  for (int k = 0; k < 16; ++k)
    subjects.push_back({"s" + std::to_string(k), static_cast<double>((k * 7) % 16)});
  const auto split = subgroup_split(subjects);
  REQUIRE(split.first.size() == 8);
  REQUIRE(split.second.size() == 8);
  auto value = [&](const std::string& id) {
    return std::find_if(subjects.begin(), subjects.end(), [&](auto& s) { return s.id == id; })
        ->value;
  };
  double min_first = 1e9;
  double max_second = -1e9;
  for (auto& id : split.first) min_first = std::min(min_first, value(id));
  for (auto& id : split.second) max_second = std::max(max_second, value(id));
  CHECK(max_second < min_first);
  CHECK_FALSE(split.degenerate);

  const std::vector<SubjectCovariate> two{{"a", 1.0}, {"b", 2.0}};
  const auto pair = subgroup_split(two);
  CHECK(pair.first == std::vector<std::string>{"b"});
  CHECK(pair.second == std::vector<std::string>{"a"});

  const std::vector<SubjectCovariate> flat{{"c", 1.0}, {"a", 1.0}, {"b", 1.0}, {"d", 1.0}};
  const auto tied = subgroup_split(flat);
  CHECK(tied.degenerate);
  CHECK(tied.first == std::vector<std::string>{"a", "b"});

  const std::vector<SubjectCovariate> odd{{"a", 3.0}, {"b", 2.0}, {"c", 1.0}};
  CHECK(subgroup_split(odd).first.size() == 1);

  const std::vector<SubjectCovariate> lone{{"a", 1.0}};
  CHECK_THROWS_AS((void)subgroup_split(lone), Error);
}

TEST_CASE("selection frequency") {
  std::vector<BayesGraphEstimate> estimates(16);
  for (auto& e : estimates) e.estimate = DirectedGraph(3);
  CHECK(selection_frequency(estimates, {1, 0}) == 0);
  for (auto& e : estimates) e.estimate.add({1, 0});
  CHECK(selection_frequency(estimates, {1, 0}) == 16);
  estimates[3].estimate.remove({1, 0});
  CHECK(selection_frequency(estimates, {1, 0}) == 15);
  const std::vector<BayesGraphEstimate> none;
  CHECK_THROWS_AS((void)selection_frequency(none, {1, 0}), Error);
}

TEST_CASE("two nodes reduce to a single comparison") {
  const auto data = fan_in(2, 200, 3, {{1, 0.6}});
  const auto ev = subject_edge_evidence(data, {0, 1}, 8);
  CHECK(ev.subgraph_count == 1);
  CHECK(ev.pool.empty());
  const RegressorBank bank(data, 8);
  NodeEvaluator evaluator(bank, 0);
  const double with = evaluator.evaluate({1}).log_evidence;
  const double without = evaluator.evaluate({}).log_evidence;
  CHECK(ev.log_ratio() == doctest::Approx(with - without).epsilon(1e-12));
}

TEST_CASE("exact evidence matches enumeration of full graphs") {
  // Three nodes: every full graph is scored as a product of node evidences
  // fitted from raw regressor blocks, then summed under a uniform prior.
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto data = fan_in(3, 150, 20 + seed, {{1, 0.5}, {2, 0.3}});
    const std::size_t order = 6;
    const double cost = default_edge_cost(data.sample_count());
    std::vector<std::vector<double>> node_score(3, std::vector<double>(4));
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i < 3; ++i)
        if (i != j) others.push_back(i);
      for (unsigned mask = 0; mask < 4; ++mask) {
        std::vector<Eigen::MatrixXd> blocks;
        for (unsigned b = 0; b < 2; ++b)
          if (mask & (1u << b)) blocks.push_back(build_regressors(data, others[b], order));
        const auto fit = em_estimate(data.signal(j), blocks);
        node_score[j][mask] =
            fit.log_marginal_likelihood - cost * static_cast<double>(blocks.size());
      }
    }
    // Edge 1 -> 0 is bit 0 of node 0's mask.
    std::vector<double> present;
    std::vector<double> absent;
    for (unsigned graph = 0; graph < 64; ++graph) {
      const unsigned m0 = graph & 3u;
      const double score = node_score[0][m0] + node_score[1][(graph >> 2) & 3u] +
                           node_score[2][(graph >> 4) & 3u] - 6.0 * std::log(2.0);
      ((m0 & 1u) ? present : absent).push_back(score);
    }
    const double brute = log_sum_exp(present) - log_sum_exp(absent);
    const auto ev = subject_edge_evidence(data, {0, 1}, order);
    CHECK(ev.subgraph_count == 2);
    CHECK(std::abs(ev.log_ratio() - brute) < 1e-8);
  }
}

TEST_CASE("capped pool agrees with exact enumeration when two parents dominate") {
  int close = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto data = fan_in(4, 200, 60 + static_cast<std::uint64_t>(seed), {{1, 0.7}, {2, 0.6}});
    EvidenceOptions capped;
    capped.mode = EvidenceMode::capped;
    capped.cap = 2;
    // Tested edge 3 -> 0 is absent; the pool {1, 2} carries all the signal.
    const auto exact = subject_edge_evidence(data, {0, 3}, 6);
    const auto approx = subject_edge_evidence(data, {0, 3}, 6, capped);
    CHECK(approx.mode == EvidenceMode::capped);
    close += std::abs(exact.log_ratio() - approx.log_ratio()) < 0.5;
  }
  CHECK(close == seeds);
}

TEST_CASE("capped mode keeps the strongest parents") {
  const auto data = fan_in(5, 200, 8, {{3, 0.8}});
  EvidenceOptions capped;
  capped.mode = EvidenceMode::capped;
  capped.cap = 1;
  const auto ev = subject_edge_evidence(data, {0, 1}, 6, capped);
  CHECK(ev.pool == std::vector<std::size_t>{3});
  CHECK(ev.subgraph_count == 2);
}

TEST_CASE("strong true edge yields positive evidence") {
  int strong = 0;
  const int seeds = 10;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto data = fan_in(3, 300, 200 + static_cast<std::uint64_t>(seed), {{1, 1.0}});
    strong += subject_edge_evidence(data, {0, 1}, 20).log_ratio() > 3.0;
  }
  CHECK(strong >= 9);
}

TEST_CASE("hyperparameter reuse") {
  const auto data = fan_in(4, 200, 5, {{1, 0.7}});
  EvidenceOptions reuse;
  reuse.mode = EvidenceMode::capped;
  reuse.reuse_hyperparameters = true;
  const auto ev = subject_edge_evidence(data, {0, 1}, 6, reuse, "subject-1");
  CHECK(ev.reused_hyperparameters);
  CHECK(ev.subject == "subject-1");
  CHECK(ev.log_ratio() > 3.0);
  EvidenceOptions exact_reuse;
  exact_reuse.reuse_hyperparameters = true;
  CHECK_FALSE(subject_edge_evidence(data, {0, 1}, 6, exact_reuse).reused_hyperparameters);
}

TEST_CASE("exact mode refuses large pools") {
  const Eigen::MatrixXd noise = Eigen::MatrixXd::Random(23, 40);
  const TimeSeriesDataset data(noise);
  CHECK_THROWS_AS((void)subject_edge_evidence(data, {0, 1}, 1), Error);
  CHECK_THROWS_AS((void)subject_edge_evidence(data, {0, 0}, 1), Error);
}

TEST_CASE("in-memory group study") {
  const std::size_t subjects = 4;
  std::vector<std::vector<TimeSeriesDataset>> sessions(3);
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < subjects; ++k) ids.push_back("s" + std::to_string(k));
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t k = 0; k < subjects; ++k) {
      const double gain = s == 2 ? 0.0 : 0.8;
      const std::uint64_t seed = 1000 + 10 * s + k;
      sessions[s].push_back(fan_in(3, 200, seed, {{1, gain}}));
    }
  StudyOptions options;
  options.jobs = 2;
  const auto result = run_group_study(sessions, ids, {"a", "b", "c"}, {{0, 1}, {0, 2}}, 6, options);
  REQUIRE(result.rows.size() == 2);
  const auto& row = result.rows[0];
  CHECK(row.edge == Edge{0, 1});
  REQUIRE(row.sessions.size() == 3);
  CHECK(row.sessions[0].optimal == Hypothesis::h1);
  CHECK(row.sessions[1].optimal == Hypothesis::h1);
  CHECK(row.sessions[2].optimal == Hypothesis::h0);
  CHECK(row.sessions[0].subjects.size() == subjects);
  CHECK(row.has_verdict);
  CHECK(row.verdict.change_detected);
  CHECK_FALSE(result.rows[1].verdict.change_detected);

  options.jobs = 1;
  const auto serial = run_group_study(sessions, ids, {"a", "b", "c"}, {{0, 1}, {0, 2}}, 6, options);
  CHECK(serial.rows[0].sessions[2].bayes_factor == row.sessions[2].bayes_factor);

  const auto screened = run_group_study(sessions, ids, {"a", "b", "c"}, {}, 6, options, 2);
  CHECK(screened.screened);
  bool found = false;
  for (const auto& r : screened.rows) found = found || r.edge == Edge{0, 1};
  CHECK(found);
}
