#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "netid/error.hpp"
#include "netid/serialize.hpp"
#include "netid/simulate.hpp"

using namespace netid;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::internal_consistency;
}

}  // namespace

TEST_CASE("simulation config round trip") {
  SimConfig config;
  config.node_count = 9;
  config.edge_probability = 0.4;
  config.gain_range = {0.1, 0.9};
  config.seed = 1234567890123ull;
  const auto back = sim_config_from_json(to_json(config), "cfg");
  CHECK(back.node_count == 9);
  CHECK(back.edge_probability == 0.4);
  CHECK(back.gain_range == config.gain_range);
  CHECK(back.seed == config.seed);
  CHECK(to_json(back) == to_json(config));
}

TEST_CASE("missing fields keep defaults") {
  const auto config = sim_config_from_json(Json::parse(R"({"node_count": 3})"), "cfg");
  CHECK(config.node_count == 3);
  CHECK(config.edge_probability == SimConfig{}.edge_probability);
}

TEST_CASE("unknown and mistyped fields are rejected with the source") {
  try {
    (void)sim_config_from_json(Json::parse(R"({"node_cont": 3})"), "conf.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find("conf.json") != std::string::npos);
    CHECK(std::string(e.what()).find("node_cont") != std::string::npos);
  }
  CHECK(kind_of([] { (void)sim_config_from_json(Json::parse(R"({"node_count": "six"})"), "c"); }) ==
        ErrorKind::validation);
  CHECK(kind_of([] { (void)sim_config_from_json(Json::parse("[1, 2]"), "c"); }) ==
        ErrorKind::validation);
}

TEST_CASE("network round trip") {
  SimConfig config;
  config.seed = 5;
  const auto model = random_network_model(config).model;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < model.node_count(); ++k) labels.push_back("n" + std::to_string(k));
  const auto json = to_json(model, labels);
  const auto back = network_from_json(json, "model");
  CHECK(back.ground_truth().edges() == model.ground_truth().edges());
  CHECK(back.noise_variances() == model.noise_variances());
  const auto a = simulate_network(model, 100, 3);
  const auto b = simulate_network(back, 100, 3);
  CHECK((a.data() - b.data()).norm() == 0.0);
}

TEST_CASE("network references by index and validation") {
  const auto json = Json::parse(R"({
    "node_count": 2, "noise_variances": [1.0, 2.0],
    "transfers": [{"source": 0, "target": 1, "numerator": [0.0, 0.5], "denominator": [1.0]}]
  })");
  const auto model = network_from_json(json, "m");
  CHECK(model.ground_truth().contains({1, 0}));
  CHECK(model.noise_variances()[1] == 2.0);

  auto bad = json;
  bad["transfers"][0]["denominator"] = {1.0, -1.5};
  CHECK(kind_of([&] { (void)network_from_json(bad, "m"); }) == ErrorKind::stability);
  bad = json;
  bad["transfers"][0]["source"] = "nowhere";
  CHECK(kind_of([&] { (void)network_from_json(bad, "m"); }) == ErrorKind::validation);
}

TEST_CASE("benchmark config round trip") {
  BenchConfig config;
  config.sample_counts = {50, 300};
  config.orders = {{50, 20}, {300, 60}};
  config.alphas = {0.05};
  config.search.edge_cost = 2.5;
  config.seed = 42;
  const auto back = bench_config_from_json(to_json(config), "bench");
  CHECK(back.sample_counts == config.sample_counts);
  CHECK(back.orders == config.orders);
  CHECK(back.alphas == config.alphas);
  CHECK(back.search.edge_cost == config.search.edge_cost);
  CHECK(back.seed == 42);
  const auto defaults = bench_config_from_json(to_json(BenchConfig{}), "bench");
  CHECK_FALSE(defaults.search.edge_cost);
  CHECK(kind_of([] { (void)bench_config_from_json(Json::parse(R"({"model_count": 0})"), "b"); }) ==
        ErrorKind::validation);
}

TEST_CASE("study manifest") {
  const auto json = Json::parse(R"({
    "session_labels": ["w1", "w2", "w3"],
    "subjects": [
      {"id": "a", "covariate": 3.5, "sessions": ["a1.csv", "a2.csv", "a3.csv"]},
      {"id": "b", "sessions": ["b1.csv", "b2.csv", "b3.csv"]}
    ],
    "candidate_edges": [{"source": "x", "target": "y"}],
    "order": 30
  })");
  const auto m = study_manifest_from_json(json, "study.json");
  CHECK(m.session_labels.size() == 3);
  REQUIRE(m.subjects.size() == 2);
  CHECK(m.subjects[0].covariate == 3.5);
  CHECK_FALSE(m.subjects[1].covariate);
  CHECK(m.candidate_edges == std::vector<std::pair<std::string, std::string>>{{"x", "y"}});
  CHECK(m.order == 30u);
  CHECK(m.screening_threshold == 2);

  auto bad = json;
  bad["subjects"][1]["sessions"] = {"b1.csv"};
  CHECK(kind_of([&] { (void)study_manifest_from_json(bad, "s"); }) == ErrorKind::validation);
  bad = json;
  bad["subjects"][1]["id"] = "a";
  CHECK(kind_of([&] { (void)study_manifest_from_json(bad, "s"); }) == ErrorKind::validation);
}

TEST_CASE("error JSON") {
  const auto json = error_to_json(ErrorKind::io, "cannot open x");
  CHECK(json["error"]["kind"] == "io");
  CHECK(json["error"]["message"] == "cannot open x");
}

TEST_CASE("JSON files") {
  const auto dir = std::filesystem::temp_directory_path() / "netid_serialize_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "x.json").string();
  write_json_file(path, Json{{"a", 1}});
  CHECK(read_json_file(path)["a"] == 1);
  {
    std::ofstream broken(dir / "broken.json");
    broken << "{\"a\": ";
  }
  CHECK(kind_of([&] { (void)read_json_file((dir / "broken.json").string()); }) ==
        ErrorKind::validation);
  CHECK(kind_of([&] { (void)read_json_file((dir / "missing.json").string()); }) == ErrorKind::io);
  std::filesystem::remove_all(dir);
}
