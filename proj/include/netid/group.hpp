#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netid/bayes.hpp"
#include "netid/dataset.hpp"
#include "netid/graph.hpp"

namespace netid {

enum class EvidenceMode { exact, capped };

enum class Hypothesis { h0, h1 };

[[nodiscard]] std::string to_string(EvidenceMode mode);
[[nodiscard]] std::string to_string(Hypothesis hypothesis);

struct EvidenceOptions {
  EvidenceMode mode = EvidenceMode::exact;
  /// Size of the candidate parent pool in capped mode.
  std::size_t cap = 8;
  /// Capped mode only: fit hyperparameters once on the full pool plus the
  /// tested parent and evaluate every subset with them instead of re-running EM.
  bool reuse_hyperparameters = false;
  EmOptions em;
  std::optional<double> edge_cost;
};

/// Largest pool exact mode enumerates (2^20 subsets per hypothesis).
inline constexpr std::size_t kMaxExactPool = 20;

struct SubjectEvidence {
  std::string subject;
  Edge edge;
  double log_evidence_present = 0.0;  // log p(D | e)
  double log_evidence_absent = 0.0;   // log p(D | not e)
  std::size_t subgraph_count = 0;     // subsets per hypothesis
  EvidenceMode mode = EvidenceMode::exact;
  bool reused_hyperparameters = false;
  std::vector<std::size_t> pool;  // other parents marginalized over

  [[nodiscard]] double log_ratio() const noexcept {
    return log_evidence_present - log_evidence_absent;
  }
};

/// Conditional evidences of `edge` for one subject, marginalizing over the
/// other incoming edges of the target with a uniform subgraph prior. Terms of
/// the other nodes are omitted since they cancel in the ratio.
///
/// Throws `Error{invalid_argument}` in exact mode when more than
/// `kMaxExactPool` other parents would have to be enumerated.
[[nodiscard]] SubjectEvidence subject_edge_evidence(const TimeSeriesDataset& dataset, Edge edge,
                                                    std::size_t order,
                                                    const EvidenceOptions& options = {},
                                                    std::string subject = {});

/// Same, reusing a node evaluator whose cache may serve several edges of
/// one target. The evaluator's edge cost and EM options take precedence.
[[nodiscard]] SubjectEvidence subject_edge_evidence(NodeEvaluator& evaluator, std::size_t source,
                                                    const EvidenceOptions& options = {},
                                                    std::string subject = {});

struct GroupEvidence {
  Edge edge;
  std::string session;
  double bayes_factor = 0.0;  // 2 log p(D|H1)/p(D|H0)
  double posterior_h1 = 0.5;
  double posterior = 0.5;  // of the optimal hypothesis
  Hypothesis optimal = Hypothesis::h0;
  std::string strength;
  std::vector<SubjectEvidence> subjects;
};

/// Kass-Raftery label of |BF|: weak up to 2, positive up to 6, strong up to
/// 10, very strong beyond.
[[nodiscard]] std::string evidence_strength(double bayes_factor);

/// 1 / (1 + exp(-BF / 2)) without overflow.
[[nodiscard]] double posterior_from_bayes_factor(double bayes_factor);

/// Throws `Error{invalid_argument}` on an empty list or mixed edges.
[[nodiscard]] GroupEvidence group_bayes_factor(std::span<const SubjectEvidence> evidences,
                                               std::string session = {});

struct ChangeVerdict {
  Edge edge;
  std::vector<Hypothesis> hypotheses;
  bool change_detected = false;
  /// Whether a fourth session exists to judge persistence.
  bool has_follow_up = false;
  bool persistent = false;
  std::string rationale;
};

/// Sessions 1 and 2 agreeing on H and session 3 switching to not-H counts as
/// a change; session 4 keeping session 3's hypothesis makes it persistent.
/// Throws `Error{protocol}` for fewer than three sessions.
[[nodiscard]] ChangeVerdict change_protocol(std::span<const Hypothesis> hypotheses, Edge edge = {});
[[nodiscard]] ChangeVerdict change_protocol(std::span<const GroupEvidence> sessions);

[[nodiscard]] std::size_t selection_frequency(std::span<const BayesGraphEstimate> estimates,
                                              Edge edge);

struct SubjectCovariate {
  std::string id;
  double value = 0.0;
};

struct SubgroupSplit {
  /// Higher covariate half (the smaller half when the count is odd).
  std::vector<std::string> first;
  std::vector<std::string> second;
  /// All covariates were equal, so the split only follows id order.
  bool degenerate = false;
};

/// Ranks by covariate, descending, breaking ties by id.
[[nodiscard]] SubgroupSplit subgroup_split(std::span<const SubjectCovariate> subjects);

struct StudySubject {
  std::string id;
  std::optional<double> covariate;
  std::vector<std::string> sessions;  // CSV paths, one per session
};

struct StudyManifest {
  std::vector<std::string> session_labels;
  std::vector<StudySubject> subjects;
  /// Tested edges as (source, target) node labels; when empty, edges are
  /// screened by selection frequency.
  std::vector<std::pair<std::string, std::string>> candidate_edges;
  /// Screening keeps edges whose selection frequency changes by more than
  /// this between two consecutive sessions.
  std::size_t screening_threshold = 2;
  std::optional<std::size_t> order;
};

struct StudyOptions {
  EvidenceOptions evidence;
  std::size_t jobs = 1;
};

struct EdgeStudyRow {
  Edge edge;
  std::vector<GroupEvidence> sessions;
  std::vector<std::size_t> selection_frequencies;  // per session, if screened
  ChangeVerdict verdict;                           // only with >= 3 sessions
  bool has_verdict = false;
};

struct StudyResult {
  std::vector<std::string> session_labels;
  std::vector<std::string> node_labels;
  std::size_t order = 0;
  EvidenceMode mode = EvidenceMode::exact;
  bool reused_hyperparameters = false;
  bool screened = false;
  std::vector<EdgeStudyRow> rows;
};

/// Loads every subject/session dataset and runs the group test per edge and
/// session. Relative CSV paths resolve against `base_directory`.
[[nodiscard]] StudyResult run_group_study(const StudyManifest& manifest,
                                          const std::string& base_directory,
                                          const StudyOptions& options = {});

/// Group test on in-memory data: `sessions[s][k]` is subject k in session s.
[[nodiscard]] StudyResult run_group_study(
    const std::vector<std::vector<TimeSeriesDataset>>& sessions,
    const std::vector<std::string>& subject_ids, const std::vector<std::string>& session_labels,
    std::vector<Edge> candidate_edges, std::size_t order, const StudyOptions& options = {},
    std::size_t screening_threshold = 2);

}  // namespace netid
