#include "netid/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

namespace netid {

namespace {

/// Reads fields of one JSON object and rejects unknown or mistyped ones.
class Fields {
 public:
  Fields(const Json& json, std::string context) : json_(json), context_(std::move(context)) {
    if (!json.is_object()) fail("expected a JSON object");
  }

  template <class T>
  bool read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = json_.find(key);
    if (it == json_.end() || it->is_null()) return false;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      fail("field '" + std::string(key) + "' has the wrong type");
    }
    return true;
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    const auto it = json_.find(key);
    return it == json_.end() || it->is_null() ? nullptr : &*it;
  }

  template <class T>
  T require(const char* key) {
    T out{};
    if (!read(key, out)) fail("missing field '" + std::string(key) + "'");
    return out;
  }

  void finish() const {
    for (const auto& item : json_.items())
      if (!seen_.count(item.key())) fail("unknown field '" + item.key() + "'");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::validation, context_ + ": " + message);
  }

  [[nodiscard]] const std::string& context() const { return context_; }

 private:
  const Json& json_;
  std::string context_;
  std::set<std::string> seen_;
};

Json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

Json matrix_rows(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t node_reference(const Json& value, const std::vector<std::string>& labels,
                           const Fields& fields) {
  if (value.is_number_unsigned()) {
    const auto index = value.get<std::size_t>();
    if (index >= labels.size())
      fields.fail("node index " + std::to_string(index) + " out of range");
    return index;
  }
  if (value.is_string()) {
    const auto name = value.get<std::string>();
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == name) return k;
    fields.fail("unknown node '" + name + "'");
  }
  fields.fail("node references must be labels or indices");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

}  // namespace

Json edges_to_json(const DirectedGraph& graph, const std::vector<std::string>& labels) {
  Json out = Json::array();
  for (const auto& e : graph.edges())
    out.push_back({{"source", labels.at(e.source)}, {"target", labels.at(e.target)}});
  return out;
}

Json to_json(const SimConfig& config) {
  return {{"node_count", config.node_count},
          {"edge_probability", config.edge_probability},
          {"transfer_order", config.transfer_order},
          {"pole_magnitude_max", config.pole_magnitude_max},
          {"gain_range", {config.gain_range.first, config.gain_range.second}},
          {"noise_variance_range",
           {config.noise_variance_range.first, config.noise_variance_range.second}},
          {"rejection_cap", config.rejection_cap},
          {"seed", config.seed}};
}

SimConfig sim_config_from_json(const Json& json, const std::string& source) {
  Fields f(json, source);
  SimConfig c;
  f.read("node_count", c.node_count);
  f.read("edge_probability", c.edge_probability);
  f.read("transfer_order", c.transfer_order);
  f.read("pole_magnitude_max", c.pole_magnitude_max);
  f.read("gain_range", c.gain_range);
  f.read("noise_variance_range", c.noise_variance_range);
  f.read("rejection_cap", c.rejection_cap);
  f.read("seed", c.seed);
  f.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    f.fail(e.what());
  }
  return c;
}

Json to_json(const TransferNetwork& model, const std::vector<std::string>& labels) {
  const std::size_t L = model.node_count();
  Json transfers = Json::array();
  for (std::size_t j = 0; j < L; ++j)
    for (std::size_t i = 0; i < L; ++i) {
      const auto& g = model.transfer(j, i);
      if (g.is_zero()) continue;
      transfers.push_back({{"source", labels.at(i)},
                           {"target", labels.at(j)},
                           {"numerator", g.numerator()},
                           {"denominator", g.denominator()}});
    }
  return {{"node_count", L},
          {"labels", labels},
          {"noise_variances", model.noise_variances()},
          {"transfers", std::move(transfers)},
          {"edges", edges_to_json(model.ground_truth(), labels)}};
}

TransferNetwork network_from_json(const Json& json, const std::string& source) {
  Fields f(json, source);
  const auto L = f.require<std::size_t>("node_count");
  std::vector<std::string> labels = default_labels(L);
  f.read("labels", labels);
  if (labels.size() != L) f.fail("labels must list node_count entries");
  const auto variances = f.require<std::vector<double>>("noise_variances");
  std::vector<TransferFunction> transfers(L * L);
  if (const Json* list = f.child("transfers")) {
    if (!list->is_array()) f.fail("'transfers' must be an array");
    for (std::size_t k = 0; k < list->size(); ++k) {
      Fields t((*list)[k], source + ": transfers[" + std::to_string(k) + "]");
      const Json* from = t.child("source");
      const Json* to = t.child("target");
      if (!from || !to) t.fail("transfer needs source and target");
      const auto i = node_reference(*from, labels, t);
      const auto j = node_reference(*to, labels, t);
      const auto num = t.require<std::vector<double>>("numerator");
      const auto den = t.require<std::vector<double>>("denominator");
      t.finish();
      try {
        transfers[j * L + i] = TransferFunction(num, den);
      } catch (const Error& e) {
        t.fail(e.what());
      }
    }
  }
  f.child("edges");  // derived, ignored on input
  f.finish();
  return TransferNetwork(L, std::move(transfers), variances);
}

Json to_json(const GrangerResult& result, const std::vector<std::string>& labels) {
  Json out = {{"order", result.order},
              {"sample_count", result.sample_count},
              {"test", result.test == SignificanceTest::f_test ? "f" : "chi2"},
              {"labels", labels},
              {"granger_values", matrix_rows(result.granger_values)},
              {"p_values", matrix_rows(result.p_values)}};
  if (result.estimate) {
    out["alpha"] = result.alpha;
    out["correction"] = result.fdr ? "benjamini-hochberg" : "none";
    out["edges"] = edges_to_json(*result.estimate, labels);
  }
  return out;
}

Json to_json(const BayesGraphEstimate& estimate, const std::vector<std::string>& labels) {
  Json nodes = Json::array();
  for (const auto& n : estimate.nodes) {
    Json parents = Json::array();
    for (std::size_t k = 0; k < n.parents.size(); ++k)
      parents.push_back({{"source", labels.at(n.parents[k])},
                         {"scale", n.params[k].scale},
                         {"decay", n.params[k].decay}});
    nodes.push_back({{"target", labels.at(n.target)},
                     {"parents", std::move(parents)},
                     {"noise_variance", n.noise_variance},
                     {"log_marginal_likelihood", n.log_marginal_likelihood},
                     {"log_evidence", n.log_evidence},
                     {"em_iterations", n.iterations}});
  }
  return {{"order", estimate.order},
          {"labels", labels},
          {"edges", edges_to_json(estimate.estimate, labels)},
          {"nodes", std::move(nodes)},
          {"total_log_marginal_likelihood", estimate.total_log_marginal_likelihood},
          {"total_log_evidence", estimate.total_log_evidence}};
}

StudyManifest study_manifest_from_json(const Json& json, const std::string& source) {
  Fields f(json, source);
  StudyManifest m;
  f.read("session_labels", m.session_labels);
  const Json* subjects = f.child("subjects");
  if (!subjects || !subjects->is_array() || subjects->empty())
    f.fail("'subjects' must be a nonempty array");
  for (std::size_t k = 0; k < subjects->size(); ++k) {
    Fields s((*subjects)[k], source + ": subjects[" + std::to_string(k) + "]");
    StudySubject subject;
    subject.id = s.require<std::string>("id");
    double covariate = 0.0;
    if (s.read("covariate", covariate)) subject.covariate = covariate;
    subject.sessions = s.require<std::vector<std::string>>("sessions");
    s.finish();
    const std::size_t expected =
        m.session_labels.empty()
            ? m.subjects.empty() ? subject.sessions.size() : m.subjects.front().sessions.size()
            : m.session_labels.size();
    if (subject.sessions.empty() || subject.sessions.size() != expected)
      s.fail("expected " + std::to_string(expected) + " session files, got " +
             std::to_string(subject.sessions.size()));
    for (const auto& other : m.subjects)
      if (other.id == subject.id) s.fail("duplicate subject id '" + subject.id + "'");
    m.subjects.push_back(std::move(subject));
  }
  if (const Json* edges = f.child("candidate_edges")) {
    if (!edges->is_array()) f.fail("'candidate_edges' must be an array");
    for (std::size_t k = 0; k < edges->size(); ++k) {
      Fields e((*edges)[k], source + ": candidate_edges[" + std::to_string(k) + "]");
      auto from = e.require<std::string>("source");
      auto to = e.require<std::string>("target");
      e.finish();
      m.candidate_edges.emplace_back(std::move(from), std::move(to));
    }
  }
  f.read("screening_threshold", m.screening_threshold);
  std::size_t order = 0;
  if (f.read("order", order)) {
    if (order == 0) f.fail("order must be at least 1");
    m.order = order;
  }
  f.finish();
  return m;
}

Json to_json(const StudyResult& result) {
  const auto& labels = result.node_labels;
  Json rows = Json::array();
  for (const auto& row : result.rows) {
    Json sessions = Json::array();
    for (const auto& s : row.sessions) {
      Json subjects = Json::array();
      for (const auto& e : s.subjects)
        subjects.push_back({{"subject", e.subject},
                            {"log_evidence_present", e.log_evidence_present},
                            {"log_evidence_absent", e.log_evidence_absent},
                            {"subgraph_count", e.subgraph_count}});
      sessions.push_back({{"session", s.session},
                          {"h_opt", to_string(s.optimal)},
                          {"bayes_factor", s.bayes_factor},
                          {"posterior", s.posterior},
                          {"posterior_h1", s.posterior_h1},
                          {"strength", s.strength},
                          {"subjects", std::move(subjects)}});
    }
    Json item = {{"source", labels.at(row.edge.source)},
                 {"target", labels.at(row.edge.target)},
                 {"sessions", std::move(sessions)}};
    if (!row.selection_frequencies.empty())
      item["selection_frequencies"] = row.selection_frequencies;
    if (row.has_verdict) {
      Json sequence = Json::array();
      for (auto h : row.verdict.hypotheses) sequence.push_back(to_string(h));
      item["verdict"] = {
          {"hypotheses", std::move(sequence)},
          {"change_detected", row.verdict.change_detected},
          {"persistent", row.verdict.has_follow_up ? Json(row.verdict.persistent) : Json(nullptr)},
          {"rationale", row.verdict.rationale}};
    }
    rows.push_back(std::move(item));
  }
  return {{"order", result.order},
          {"mode", to_string(result.mode)},
          {"reused_hyperparameters", result.reused_hyperparameters},
          {"screened", result.screened},
          {"session_labels", result.session_labels},
          {"edges", std::move(rows)}};
}

void write_study_csv(std::ostream& out, const StudyResult& result) {
  out << "edge";
  for (const auto& label : result.session_labels)
    out << ',' << label << " H_opt," << label << " BF," << label << " posterior";
  out << '\n';
  for (const auto& row : result.rows) {
    out << result.node_labels.at(row.edge.source) << "->" << result.node_labels.at(row.edge.target);
    for (const auto& s : row.sessions)
      out << ',' << to_string(s.optimal) << ',' << format_double(s.bayes_factor) << ','
          << format_double(s.posterior);
    out << '\n';
  }
}

BenchConfig bench_config_from_json(const Json& json, const std::string& source) {
  Fields f(json, source);
  BenchConfig c;
  f.read("sample_counts", c.sample_counts);
  f.read("node_counts", c.node_counts);
  f.read("model_count", c.model_count);
  f.read("alphas", c.alphas);
  if (const Json* sim = f.child("sim")) c.sim = sim_config_from_json(*sim, source + ": sim");
  if (const Json* orders = f.child("orders")) {
    if (!orders->is_object()) f.fail("'orders' must map data lengths to orders");
    for (const auto& item : orders->items()) {
      std::size_t n = 0;
      const auto& key = item.key();
      const auto parsed = std::from_chars(key.data(), key.data() + key.size(), n);
      if (parsed.ec != std::errc{} || parsed.ptr != key.data() + key.size() ||
          !item.value().is_number_unsigned() || item.value().get<std::size_t>() == 0)
        f.fail("bad order entry '" + key + "'");
      c.orders[n] = item.value().get<std::size_t>();
    }
  }
  f.read("granger_max_order", c.granger_max_order);
  f.read("run_bayes", c.run_bayes);
  f.read("run_granger", c.run_granger);
  double cost = 0.0;
  if (f.read("edge_cost", cost)) c.search.edge_cost = cost;
  f.read("seed", c.seed);
  f.read("jobs", c.jobs);
  f.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    f.fail(e.what());
  }
  return c;
}

Json to_json(const BenchConfig& config) {
  Json orders = Json::object();
  for (const auto& [n, m] : config.orders) orders[std::to_string(n)] = m;
  return {{"sample_counts", config.sample_counts},
          {"node_counts", config.node_counts},
          {"model_count", config.model_count},
          {"alphas", config.alphas},
          {"sim", to_json(config.sim)},
          {"orders", std::move(orders)},
          {"granger_max_order", config.granger_max_order},
          {"run_bayes", config.run_bayes},
          {"run_granger", config.run_granger},
          {"edge_cost", config.search.edge_cost ? Json(*config.search.edge_cost) : Json(nullptr)},
          {"seed", config.seed},
          {"jobs", config.jobs}};
}

Json to_json(const std::vector<RocRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records)
    out.push_back({{"method", r.method},
                   {"L", r.node_count},
                   {"N", r.sample_count},
                   {"alpha", r.alpha ? Json(*r.alpha) : Json(nullptr)},
                   {"mean_tpr", number(r.mean_tpr)},
                   {"mean_fpr", number(r.mean_fpr)},
                   {"tprs", r.tprs},
                   {"fprs", r.fprs},
                   {"seeds", r.seeds},
                   {"n_models", r.model_count},
                   {"n_failed", r.failed},
                   {"valid", r.valid},
                   {"failures", r.failures}});
  return out;
}

Json error_to_json(ErrorKind kind, const std::string& message) {
  return {{"error", {{"kind", to_string(kind)}, {"message", message}}}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::validation, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& json) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << json.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::io, "failed writing " + path);
}

}  // namespace netid
