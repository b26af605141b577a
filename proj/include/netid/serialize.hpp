#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "netid/bayes.hpp"
#include "netid/bench.hpp"
#include "netid/error.hpp"
#include "netid/granger.hpp"
#include "netid/group.hpp"
#include "netid/simgen.hpp"
#include "netid/transfer.hpp"

namespace netid {

using Json = nlohmann::ordered_json;

/// Edges as {"source": label, "target": label} objects.
[[nodiscard]] Json edges_to_json(const DirectedGraph& graph,
                                 const std::vector<std::string>& labels);

[[nodiscard]] Json to_json(const SimConfig& config);
/// Missing fields keep their defaults; unknown fields are rejected with
/// `Error{validation}` naming `source`.
[[nodiscard]] SimConfig sim_config_from_json(const Json& json, const std::string& source);

[[nodiscard]] Json to_json(const TransferNetwork& model, const std::vector<std::string>& labels);
[[nodiscard]] TransferNetwork network_from_json(const Json& json, const std::string& source);

[[nodiscard]] Json to_json(const GrangerResult& result, const std::vector<std::string>& labels);
[[nodiscard]] Json to_json(const BayesGraphEstimate& estimate,
                           const std::vector<std::string>& labels);

[[nodiscard]] StudyManifest study_manifest_from_json(const Json& json, const std::string& source);
[[nodiscard]] Json to_json(const StudyResult& result);
/// One row per edge: edge, then H_opt, BF and posterior for every session.
void write_study_csv(std::ostream& out, const StudyResult& result);

[[nodiscard]] BenchConfig bench_config_from_json(const Json& json, const std::string& source);
[[nodiscard]] Json to_json(const BenchConfig& config);
[[nodiscard]] Json to_json(const std::vector<RocRecord>& records);

[[nodiscard]] Json error_to_json(ErrorKind kind, const std::string& message);

/// Parses a JSON file, throwing `Error{io}` or `Error{validation}`.
[[nodiscard]] Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& json);

}  // namespace netid
