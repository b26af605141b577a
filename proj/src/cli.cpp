#include "netid/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "netid/bayes.hpp"
#include "netid/bench.hpp"
#include "netid/error.hpp"
#include "netid/granger.hpp"
#include "netid/group.hpp"
#include "netid/serialize.hpp"
#include "netid/simgen.hpp"
#include "netid/simulate.hpp"
#include "netid/whiteness.hpp"

namespace netid {

namespace {

void emit_json(const Json& json, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << json.dump(2) << '\n';
  } else {
    write_json_file(path, json);
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::io, "cannot write " + path);
  return file;
}

struct SimulateArgs {
  std::string config;
  std::string model_in;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 300;
  std::size_t burn_in = 500;
  bool standardize = false;
  std::string model_out;
  std::string data_out;
};

struct GrangerArgs {
  std::string data;
  std::optional<std::size_t> order;
  std::size_t max_order = 10;
  std::optional<double> alpha;
  bool fdr = false;
  std::string test = "f";
  std::string out;
};

struct BayesArgs {
  std::string data;
  std::optional<std::size_t> order;
  std::optional<double> edge_cost;
  std::size_t jobs = 1;
  std::string out;
};

struct GroupArgs {
  std::string manifest;
  std::string mode = "exact";
  std::size_t cap = 8;
  bool reuse = false;
  std::optional<std::size_t> order;
  std::optional<double> edge_cost;
  std::size_t jobs = 1;
  std::string out;
  std::string csv;
};

struct BenchArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> models;
  bool paper_scale = false;
  std::size_t jobs = 1;
  std::string csv;
  std::string out;
  bool quiet = false;
};

struct WhitenessArgs {
  std::string data;
  std::optional<std::size_t> order;
  std::size_t max_lag = 20;
  double alpha = 0.05;
  std::string out;
};

void run_simulate(const SimulateArgs& a, std::ostream& out) {
  SimConfig config;
  if (!a.config.empty()) config = sim_config_from_json(read_json_file(a.config), a.config);
  if (a.seed) config.seed = *a.seed;

  std::optional<TransferNetwork> model;
  std::vector<std::string> labels;
  Json report = Json::object();
  if (!a.model_in.empty()) {
    const auto json = read_json_file(a.model_in);
    model = network_from_json(json, a.model_in);
    if (json.contains("labels")) labels = json["labels"].get<std::vector<std::string>>();
  } else {
    auto generated = random_network_model(config);
    report["rejections"] = generated.rejections;
    model = std::move(generated.model);
  }
  SimulationOptions options;
  options.burn_in = a.burn_in;
  options.standardize = a.standardize;
  auto data = simulate_network(*model, a.samples, config.seed, options);
  if (!labels.empty()) data = TimeSeriesDataset(labels, data.data());

  report["config"] = to_json(config);
  report["model"] = to_json(*model, data.node_labels());
  if (!a.model_out.empty()) write_json_file(a.model_out, report);
  if (!a.data_out.empty()) {
    write_dataset_csv(a.data_out, data);
  } else {
    write_dataset_csv(out, data);
  }
  if (a.model_out.empty() && !a.data_out.empty()) out << report.dump(2) << '\n';
}

void run_granger(const GrangerArgs& a, std::ostream& out) {
  const auto data = read_dataset_csv(a.data);
  const std::size_t order =
      a.order ? *a.order : select_order_aic(data, max_feasible_order(data, a.max_order));
  const auto test = a.test == "chi2" ? SignificanceTest::chi_squared : SignificanceTest::f_test;
  auto result = granger_matrix(data, order, test);
  if (a.alpha) {
    result.estimate = threshold_graph(result, *a.alpha, a.fdr);
    result.alpha = *a.alpha;
    result.fdr = a.fdr;
  }
  emit_json(to_json(result, data.node_labels()), a.out, out);
}

void run_bayes(const BayesArgs& a, std::ostream& out) {
  const auto data = read_dataset_csv(a.data);
  SearchOptions options;
  options.jobs = a.jobs;
  options.edge_cost = a.edge_cost;
  const auto order = a.order.value_or(default_bayes_order(data.sample_count()));
  emit_json(to_json(greedy_search(data, order, options), data.node_labels()), a.out, out);
}

void run_group(const GroupArgs& a, std::ostream& out) {
  auto manifest = study_manifest_from_json(read_json_file(a.manifest), a.manifest);
  if (a.order) manifest.order = a.order;
  StudyOptions options;
  options.jobs = a.jobs;
  options.evidence.mode = a.mode == "capped" ? EvidenceMode::capped : EvidenceMode::exact;
  options.evidence.cap = a.cap;
  options.evidence.reuse_hyperparameters = a.reuse;
  options.evidence.edge_cost = a.edge_cost;
  const auto base = std::filesystem::path(a.manifest).parent_path().string();
  const auto result = run_group_study(manifest, base, options);
  if (!a.csv.empty()) {
    auto file = open_output(a.csv);
    write_study_csv(file, result);
  }
  emit_json(to_json(result), a.out, out);
}

void run_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchConfig config;
  if (!a.config.empty()) config = bench_config_from_json(read_json_file(a.config), a.config);
  if (a.seed) config.seed = *a.seed;
  if (a.paper_scale) config.model_count = kPaperModelCount;
  if (a.models) config.model_count = *a.models;
  config.jobs = a.jobs;
  BenchProgress progress;
  if (!a.quiet) progress = [&err](const std::string& line) { err << line << '\n'; };
  const auto records = run_benchmark(config, progress);
  if (!a.out.empty())
    write_json_file(a.out, {{"config", to_json(config)}, {"records", to_json(records)}});
  if (!a.csv.empty()) {
    auto file = open_output(a.csv);
    write_roc_csv(file, records);
  } else {
    write_roc_csv(out, records);
  }
}

void run_whiteness(const WhitenessArgs& a, std::ostream& out) {
  const auto data = read_dataset_csv(a.data);
  const std::size_t order =
      a.order ? *a.order : select_order_aic(data, max_feasible_order(data, 10));
  const auto report = validate_residuals(data, order, a.max_lag, a.alpha);
  Json nodes = Json::array();
  for (std::size_t k = 0; k < report.nodes.size(); ++k)
    nodes.push_back({{"node", data.node_labels()[k]},
                     {"statistic", report.nodes[k].statistic},
                     {"p_value", report.nodes[k].p_value},
                     {"white", report.nodes[k].pass}});
  emit_json({{"order", report.order},
             {"max_lag", report.max_lag},
             {"alpha", report.alpha},
             {"pass_fraction", report.pass_fraction()},
             {"nodes", std::move(nodes)}},
            a.out, out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topology identification of dynamic networks from time series"};
  app.name("netid");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate =
      app.add_subcommand("simulate", "generate a random stable network and simulate it");
  simulate->add_option("--config", sim.config, "SimConfig JSON");
  simulate->add_option("--model-in", sim.model_in, "simulate this network JSON instead");
  simulate->add_option("--seed", sim.seed, "master seed (overrides the config)");
  simulate->add_option("-n,--samples", sim.samples, "data length N")
      ->check(CLI::Range(2, 100000000));
  simulate->add_option("--burn-in", sim.burn_in, "discarded leading samples");
  simulate->add_flag("--standardize", sim.standardize, "rescale every node to unit variance");
  simulate->add_option("--model-out", sim.model_out, "write the model JSON here");
  simulate->add_option("--data-out", sim.data_out, "write the dataset CSV here (default stdout)");

  GrangerArgs gr;
  auto* granger = app.add_subcommand("granger", "conditional Granger analysis");
  granger->add_option("--data", gr.data, "dataset CSV")->required();
  granger->add_option("--order", gr.order, "VAR order (default: AIC)")->check(CLI::PositiveNumber);
  granger->add_option("--max-order", gr.max_order, "AIC search limit")->check(CLI::PositiveNumber);
  granger->add_option("--alpha", gr.alpha, "threshold p-values at this level")
      ->check(CLI::Range(0.0, 1.0));
  granger->add_flag("--fdr", gr.fdr, "Benjamini-Hochberg correction");
  granger->add_option("--test", gr.test, "f or chi2")->check(CLI::IsMember({"f", "chi2"}));
  granger->add_option("--out", gr.out, "output JSON (default stdout)");

  BayesArgs by;
  auto* bayes = app.add_subcommand("bayes", "greedy Bayesian topology search");
  bayes->add_option("--data", by.data, "dataset CSV")->required();
  bayes->add_option("--order", by.order, "kernel order m")->check(CLI::PositiveNumber);
  bayes->add_option("--edge-cost", by.edge_cost, "evidence cost per parent (default log N)")
      ->check(CLI::NonNegativeNumber);
  bayes->add_option("--jobs", by.jobs, "worker threads")->check(CLI::PositiveNumber);
  bayes->add_option("--out", by.out, "output JSON (default stdout)");

  GroupArgs gp;
  auto* group = app.add_subcommand("group-test", "group hypothesis test per edge and session");
  group->add_option("--manifest", gp.manifest, "study manifest JSON")->required();
  group->add_option("--mode", gp.mode, "exact or capped")
      ->check(CLI::IsMember({"exact", "capped"}));
  group->add_option("--cap", gp.cap, "candidate parents kept in capped mode")
      ->check(CLI::PositiveNumber);
  group->add_flag("--reuse-hyperparameters", gp.reuse,
                  "capped mode: one EM fit per subject and edge");
  group->add_option("--order", gp.order, "kernel order m")->check(CLI::PositiveNumber);
  group->add_option("--edge-cost", gp.edge_cost, "evidence cost per parent (default log N)")
      ->check(CLI::NonNegativeNumber);
  group->add_option("--jobs", gp.jobs, "worker threads")->check(CLI::PositiveNumber);
  group->add_option("--out", gp.out, "output JSON (default stdout)");
  group->add_option("--csv", gp.csv, "also write the results table as CSV");

  BenchArgs bn;
  auto* bench = app.add_subcommand("benchmark", "TPR/FPR comparison on random networks");
  bench->add_option("--config", bn.config, "BenchConfig JSON");
  bench->add_option("--seed", bn.seed, "master seed (overrides the config)");
  bench->add_option("--models", bn.models, "models per cell")->check(CLI::PositiveNumber);
  bench->add_flag("--paper-scale", bn.paper_scale, "50 models per cell");
  bench->add_option("--jobs", bn.jobs, "worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--csv", bn.csv, "RocRecord CSV (default stdout)");
  bench->add_option("--out", bn.out, "full JSON results");
  bench->add_flag("--quiet", bn.quiet, "no progress lines on stderr");

  WhitenessArgs wh;
  auto* white = app.add_subcommand("whiteness", "Ljung-Box test of VAR residuals");
  white->add_option("--data", wh.data, "dataset CSV")->required();
  white->add_option("--order", wh.order, "VAR order (default: AIC)")->check(CLI::PositiveNumber);
  white->add_option("--max-lag", wh.max_lag, "autocorrelation lags")->check(CLI::PositiveNumber);
  white->add_option("--alpha", wh.alpha, "test level")->check(CLI::Range(0.0, 1.0));
  white->add_option("--out", wh.out, "output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << app.help() << '\n'
        << error_to_json(ErrorKind::invalid_argument, e.what()).dump() << '\n';
    return 2;
  }

  try {
    if (*simulate) run_simulate(sim, out);
    if (*granger) run_granger(gr, out);
    if (*bayes) run_bayes(by, out);
    if (*group) run_group(gp, out);
    if (*bench) run_bench(bn, out, err);
    if (*white) run_whiteness(wh, out);
  } catch (const Error& e) {
    err << error_to_json(e.kind(), e.what()).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << error_to_json(ErrorKind::internal_consistency, e.what()).dump() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace netid
