#include "netid/group.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "netid/error.hpp"
#include "parallel.hpp"

namespace netid {

namespace {

/// Running log-sum-exp accumulator.
class LogSum {
 public:
  void add(double value) {
    if (value == -std::numeric_limits<double>::infinity()) return;
    if (value > top_) {
      sum_ = sum_ * std::exp(top_ - value) + 1.0;
      top_ = value;
    } else {
      sum_ += std::exp(value - top_);
    }
  }
  [[nodiscard]] double value() const { return top_ + std::log(sum_); }

 private:
  double top_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

std::vector<std::size_t> with_parent(std::vector<std::size_t> parents, std::size_t extra) {
  parents.insert(std::upper_bound(parents.begin(), parents.end(), extra), extra);
  return parents;
}

std::vector<std::size_t> subset(const std::vector<std::size_t>& pool, std::size_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < pool.size(); ++b)
    if (mask & (std::size_t{1} << b)) out.push_back(pool[b]);
  return out;
}

/// Other parents of the target, restricted to the top `cap` by single-parent
/// evidence in capped mode.
std::vector<std::size_t> candidate_pool(NodeEvaluator& evaluator, std::size_t source,
                                        const EvidenceOptions& options) {
  const std::size_t L = evaluator.bank().node_count();
  const std::size_t target = evaluator.target();
  std::vector<std::size_t> pool;
  for (std::size_t p = 0; p < L; ++p)
    if (p != target && p != source) pool.push_back(p);

  if (options.mode == EvidenceMode::exact) {
    if (pool.size() > kMaxExactPool)
      throw Error(ErrorKind::invalid_argument, "exact evidence would enumerate 2^" +
                                                   std::to_string(pool.size()) +
                                                   " parent subsets; use capped mode instead");
    return pool;
  }
  if (options.cap > kMaxExactPool)
    throw Error(ErrorKind::invalid_argument,
                "candidate cap must not exceed " + std::to_string(kMaxExactPool));
  if (pool.size() <= options.cap) return pool;

  std::vector<std::pair<double, std::size_t>> ranked;
  for (auto p : pool) ranked.emplace_back(evaluator.evaluate({p}).log_evidence, p);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  pool.clear();
  for (std::size_t k = 0; k < options.cap; ++k) pool.push_back(ranked[k].second);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::string to_string(EvidenceMode mode) {
  return mode == EvidenceMode::exact ? "exact" : "capped";
}

std::string to_string(Hypothesis hypothesis) { return hypothesis == Hypothesis::h1 ? "H1" : "H0"; }

SubjectEvidence subject_edge_evidence(NodeEvaluator& evaluator, std::size_t source,
                                      const EvidenceOptions& options, std::string subject) {
  const std::size_t L = evaluator.bank().node_count();
  const std::size_t target = evaluator.target();
  if (source >= L || source == target)
    throw Error(ErrorKind::invalid_argument, "invalid source " + std::to_string(source) +
                                                 " for target " + std::to_string(target));

  SubjectEvidence out;
  out.subject = std::move(subject);
  out.edge = {target, source};
  out.mode = options.mode;
  out.pool = candidate_pool(evaluator, source, options);
  const std::size_t subsets = std::size_t{1} << out.pool.size();
  out.subgraph_count = subsets;

  // Uniform prior over the target's incoming-edge sets.
  const double log_prior = -static_cast<double>(L - 1) * std::log(2.0);
  const double cost = evaluator.edge_cost();
  LogSum present;
  LogSum absent;

  if (options.mode == EvidenceMode::capped && options.reuse_hyperparameters) {
    out.reused_hyperparameters = true;
    const auto& full = evaluator.evaluate(with_parent(out.pool, source));
    std::map<std::size_t, EdgeKernelParams> params;
    for (std::size_t k = 0; k < full.parents.size(); ++k)
      params.emplace(full.parents[k], full.params[k]);
    auto score = [&](const std::vector<std::size_t>& parents) {
      return evaluator.evaluate_fixed(parents, params, full.noise_variance) -
             cost * static_cast<double>(parents.size());
    };
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      const auto others = subset(out.pool, mask);
      absent.add(log_prior + score(others));
      present.add(log_prior + score(with_parent(others, source)));
    }
  } else {
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      const auto others = subset(out.pool, mask);
      absent.add(log_prior + evaluator.evaluate(others).log_evidence);
      present.add(log_prior + evaluator.evaluate(with_parent(others, source)).log_evidence);
    }
  }
  out.log_evidence_present = present.value();
  out.log_evidence_absent = absent.value();
  if (!std::isfinite(out.log_evidence_present) || !std::isfinite(out.log_evidence_absent))
    throw Error(ErrorKind::numerical_failure, "conditional evidence is not finite");
  return out;
}

SubjectEvidence subject_edge_evidence(const TimeSeriesDataset& dataset, Edge edge,
                                      std::size_t order, const EvidenceOptions& options,
                                      std::string subject) {
  if (edge.target >= dataset.node_count() || edge.source >= dataset.node_count() ||
      edge.target == edge.source)
    throw Error(ErrorKind::invalid_argument, "edge must join two distinct nodes of the dataset");
  const RegressorBank bank(dataset, order);
  NodeEvaluator evaluator(bank, edge.target, options.em, options.edge_cost);
  return subject_edge_evidence(evaluator, edge.source, options, std::move(subject));
}

std::string evidence_strength(double bayes_factor) {
  const double size = std::abs(bayes_factor);
  if (size <= 2.0) return "weak";
  if (size <= 6.0) return "positive";
  if (size <= 10.0) return "strong";
  return "very strong";
}

double posterior_from_bayes_factor(double bayes_factor) {
  const double half = 0.5 * bayes_factor;
  if (half >= 0.0) return 1.0 / (1.0 + std::exp(-half));
  const double e = std::exp(half);
  return e / (1.0 + e);
}

GroupEvidence group_bayes_factor(std::span<const SubjectEvidence> evidences, std::string session) {
  if (evidences.empty())
    throw Error(ErrorKind::invalid_argument, "group test needs at least one subject");
  GroupEvidence out;
  out.edge = evidences.front().edge;
  out.session = std::move(session);
  double log_ratio = 0.0;
  for (const auto& e : evidences) {
    if (e.edge != out.edge)
      throw Error(ErrorKind::invalid_argument, "all subject evidences must concern one edge");
    log_ratio += e.log_evidence_present - e.log_evidence_absent;
  }
  out.bayes_factor = 2.0 * log_ratio;
  out.optimal = out.bayes_factor > 0.0 ? Hypothesis::h1 : Hypothesis::h0;
  out.posterior_h1 = posterior_from_bayes_factor(out.bayes_factor);
  out.posterior = out.optimal == Hypothesis::h1 ? out.posterior_h1
                                                : posterior_from_bayes_factor(-out.bayes_factor);
  out.strength = evidence_strength(out.bayes_factor);
  out.subjects.assign(evidences.begin(), evidences.end());
  return out;
}

ChangeVerdict change_protocol(std::span<const Hypothesis> hypotheses, Edge edge) {
  if (hypotheses.size() < 3)
    throw Error(ErrorKind::protocol, "change protocol needs at least three sessions, got " +
                                         std::to_string(hypotheses.size()));
  ChangeVerdict out;
  out.edge = edge;
  out.hypotheses.assign(hypotheses.begin(), hypotheses.end());
  const bool stable_baseline = hypotheses[0] == hypotheses[1];
  out.change_detected = stable_baseline && hypotheses[2] != hypotheses[1];
  out.has_follow_up = hypotheses.size() >= 4;
  out.persistent = out.change_detected && out.has_follow_up && hypotheses[3] == hypotheses[2];

  std::string sequence;
  for (auto h : hypotheses) sequence += (sequence.empty() ? "" : ",") + to_string(h);
  out.rationale = "sequence (" + sequence + "): ";
  if (!stable_baseline) {
    out.rationale += "baseline sessions disagree, no change attributed";
  } else if (!out.change_detected) {
    out.rationale += "session 3 matches the baseline";
  } else if (!out.has_follow_up) {
    out.rationale += "session 3 reverses the baseline";
  } else {
    out.rationale += out.persistent ? "session 3 reverses the baseline and session 4 keeps it"
                                    : "session 3 reverses the baseline but session 4 reverts";
  }
  return out;
}

ChangeVerdict change_protocol(std::span<const GroupEvidence> sessions) {
  std::vector<Hypothesis> sequence;
  for (const auto& s : sessions) {
    if (s.edge != sessions.front().edge)
      throw Error(ErrorKind::invalid_argument, "change protocol sessions must concern one edge");
    sequence.push_back(s.optimal);
  }
  return change_protocol(sequence, sessions.empty() ? Edge{} : sessions.front().edge);
}

std::size_t selection_frequency(std::span<const BayesGraphEstimate> estimates, Edge edge) {
  if (estimates.empty())
    throw Error(ErrorKind::invalid_argument, "selection frequency needs at least one estimate");
  return static_cast<std::size_t>(
      std::count_if(estimates.begin(), estimates.end(),
                    [&](const auto& e) { return e.estimate.contains(edge); }));
}

SubgroupSplit subgroup_split(std::span<const SubjectCovariate> subjects) {
  if (subjects.size() < 2)
    throw Error(ErrorKind::invalid_argument, "subgroup split needs at least two subjects");
  std::vector<SubjectCovariate> ranked(subjects.begin(), subjects.end());
  for (const auto& s : ranked)
    if (!std::isfinite(s.value))
      throw Error(ErrorKind::invalid_argument, "covariate of subject " + s.id + " is not finite");
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.id < b.id;
  });
  SubgroupSplit out;
  const std::size_t half = ranked.size() / 2;
  for (std::size_t k = 0; k < ranked.size(); ++k)
    (k < half ? out.first : out.second).push_back(ranked[k].id);
  out.degenerate = ranked.front().value == ranked.back().value;
  return out;
}

StudyResult run_group_study(const std::vector<std::vector<TimeSeriesDataset>>& sessions,
                            const std::vector<std::string>& subject_ids,
                            const std::vector<std::string>& session_labels,
                            std::vector<Edge> candidate_edges, std::size_t order,
                            const StudyOptions& options, std::size_t screening_threshold) {
  if (sessions.empty() || subject_ids.empty())
    throw Error(ErrorKind::invalid_argument, "study needs at least one session and one subject");
  if (session_labels.size() != sessions.size())
    throw Error(ErrorKind::invalid_argument, "one label per session is required");
  const std::size_t S = sessions.size();
  const std::size_t K = subject_ids.size();
  const auto& reference = sessions.front().front();
  const std::size_t L = reference.node_count();
  for (const auto& session : sessions) {
    if (session.size() != K)
      throw Error(ErrorKind::invalid_argument, "every session needs one dataset per subject");
    for (const auto& d : session)
      if (d.node_labels() != reference.node_labels())
        throw Error(ErrorKind::validation, "all datasets must share the same node labels");
  }

  StudyResult result;
  result.session_labels = session_labels;
  result.node_labels = reference.node_labels();
  result.order = order;
  result.mode = options.evidence.mode;
  result.reused_hyperparameters =
      options.evidence.mode == EvidenceMode::capped && options.evidence.reuse_hyperparameters;

  std::map<Edge, std::vector<std::size_t>> frequencies;
  if (candidate_edges.empty()) {
    result.screened = true;
    std::vector<BayesGraphEstimate> estimates(S * K);
    SearchOptions search;
    search.em = options.evidence.em;
    search.edge_cost = options.evidence.edge_cost;
    detail::parallel_for(S * K, options.jobs, [&](std::size_t job) {
      estimates[job] = greedy_search(sessions[job / K][job % K], order, search);
    });
    for (const auto& edge : DirectedGraph::complete(L).edges()) {
      std::vector<std::size_t> counts(S);
      for (std::size_t s = 0; s < S; ++s)
        counts[s] = selection_frequency(std::span(estimates).subspan(s * K, K), edge);
      bool keep = false;
      for (std::size_t s = 0; s + 1 < S; ++s) {
        const auto delta =
            counts[s] > counts[s + 1] ? counts[s] - counts[s + 1] : counts[s + 1] - counts[s];
        keep = keep || delta > screening_threshold;
      }
      if (keep) candidate_edges.push_back(edge);
      frequencies.emplace(edge, std::move(counts));
    }
  }
  std::sort(candidate_edges.begin(), candidate_edges.end());
  candidate_edges.erase(std::unique(candidate_edges.begin(), candidate_edges.end()),
                        candidate_edges.end());
  for (const auto& e : candidate_edges)
    if (e.target >= L || e.source >= L || e.target == e.source)
      throw Error(ErrorKind::invalid_argument, "candidate edge outside the network");

  // One job per (session, subject, target) so that a target's EM cache
  // serves all of its candidate edges.
  std::set<std::size_t> targets;
  for (const auto& e : candidate_edges) targets.insert(e.target);
  const std::vector<std::size_t> target_list(targets.begin(), targets.end());
  std::map<Edge, std::vector<std::vector<SubjectEvidence>>> evidence;
  for (const auto& e : candidate_edges) evidence[e].assign(S, std::vector<SubjectEvidence>(K));

  const std::size_t T = target_list.size();
  std::vector<std::vector<SubjectEvidence>> outputs(S * K * T);
  detail::parallel_for(S * K * T, options.jobs, [&](std::size_t job) {
    const std::size_t s = job / (K * T);
    const std::size_t k = (job / T) % K;
    const std::size_t j = target_list[job % T];
    const RegressorBank bank(sessions[s][k], order);
    NodeEvaluator evaluator(bank, j, options.evidence.em, options.evidence.edge_cost);
    for (const auto& e : candidate_edges)
      if (e.target == j)
        outputs[job].push_back(
            subject_edge_evidence(evaluator, e.source, options.evidence, subject_ids[k]));
  });
  for (std::size_t job = 0; job < outputs.size(); ++job) {
    const std::size_t s = job / (K * T);
    const std::size_t k = (job / T) % K;
    for (auto& ev : outputs[job]) evidence[ev.edge][s][k] = std::move(ev);
  }

  for (const auto& e : candidate_edges) {
    EdgeStudyRow row;
    row.edge = e;
    for (std::size_t s = 0; s < S; ++s)
      row.sessions.push_back(group_bayes_factor(evidence[e][s], session_labels[s]));
    if (auto it = frequencies.find(e); it != frequencies.end())
      row.selection_frequencies = it->second;
    if (S >= 3) {
      row.verdict = change_protocol(row.sessions);
      row.has_verdict = true;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

StudyResult run_group_study(const StudyManifest& manifest, const std::string& base_directory,
                            const StudyOptions& options) {
  if (manifest.subjects.empty())
    throw Error(ErrorKind::validation, "study manifest lists no subjects");
  const std::size_t S = manifest.session_labels.empty() ? manifest.subjects.front().sessions.size()
                                                        : manifest.session_labels.size();
  if (S == 0) throw Error(ErrorKind::validation, "study manifest lists no sessions");
  std::vector<std::string> labels = manifest.session_labels;
  for (std::size_t s = labels.size(); s < S; ++s)
    labels.push_back("session " + std::to_string(s + 1));

  std::vector<std::string> ids;
  std::vector<std::vector<TimeSeriesDataset>> sessions(S);
  for (const auto& subject : manifest.subjects) {
    if (subject.sessions.size() != S)
      throw Error(ErrorKind::validation, "subject " + subject.id + " has " +
                                             std::to_string(subject.sessions.size()) +
                                             " sessions, expected " + std::to_string(S));
    ids.push_back(subject.id);
    for (std::size_t s = 0; s < S; ++s) {
      std::filesystem::path path(subject.sessions[s]);
      if (path.is_relative()) path = std::filesystem::path(base_directory) / path;
      sessions[s].push_back(read_dataset_csv(path.string()));
    }
  }
  const auto& first = sessions.front().front();
  std::vector<Edge> edges;
  for (const auto& [source, target] : manifest.candidate_edges)
    edges.push_back({first.index_of(target), first.index_of(source)});
  const std::size_t order = manifest.order.value_or(default_bayes_order(first.sample_count()));
  return run_group_study(sessions, ids, labels, std::move(edges), order, options,
                         manifest.screening_threshold);
}

}  // namespace netid
