#include "netid/simgen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "netid/error.hpp"
#include "netid/rng.hpp"

namespace netid {

namespace {

constexpr std::uint64_t kGraphStream = 0;
constexpr std::uint64_t kAttemptStream = 1;

std::vector<double> multiply(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> out(p.size() + q.size() - 1, 0.0);
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = 0; b < q.size(); ++b) out[a + b] += p[a] * q[b];
  return out;
}

}  // namespace

void SimConfig::validate() const {
  if (node_count < 2) throw Error(ErrorKind::invalid_argument, "node_count must be at least 2");
  if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
    throw Error(ErrorKind::invalid_argument, "edge_probability must lie in [0, 1]");
  if (transfer_order < 1)
    throw Error(ErrorKind::invalid_argument, "transfer_order must be at least 1");
  if (!(pole_magnitude_max >= 0.0 && pole_magnitude_max < 1.0))
    throw Error(ErrorKind::invalid_argument, "pole_magnitude_max must lie in [0, 1)");
  if (!(gain_range.first > 0.0 && gain_range.first <= gain_range.second))
    throw Error(ErrorKind::invalid_argument, "gain_range must be a positive interval");
  if (!(noise_variance_range.first > 0.0 &&
        noise_variance_range.first <= noise_variance_range.second))
    throw Error(ErrorKind::invalid_argument, "noise_variance_range must be a positive interval");
  if (rejection_cap < 1) throw Error(ErrorKind::invalid_argument, "rejection_cap must be >= 1");
}

double peak_gain(const TransferFunction& transfer) {
  double peak = 0.0;
  for (std::size_t k = 0; k < kGainGridPoints; ++k) {
    const double omega =
        std::numbers::pi * static_cast<double>(k) / static_cast<double>(kGainGridPoints - 1);
    peak = std::max(peak, std::abs(transfer.frequency_response(omega)));
  }
  return peak;
}

DirectedGraph random_graph(const SimConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, kGraphStream));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DirectedGraph graph(config.node_count);
  for (std::size_t j = 0; j < config.node_count; ++j)
    for (std::size_t i = 0; i < config.node_count; ++i)
      if (i != j && unit(rng) < config.edge_probability) graph.add({j, i});
  return graph;
}

TransferFunction random_stable_transfer(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t order = config.transfer_order;

  // Pole magnitudes uniform in (0, pmax]; 1 - U maps [0, 1) onto (0, 1].
  auto magnitude = [&] { return config.pole_magnitude_max * (1.0 - unit(rng)); };
  std::vector<double> denominator{1.0};
  for (std::size_t k = 0; k + 1 < order; k += 2) {
    const double r = magnitude();
    const double phase = std::numbers::pi * unit(rng);
    denominator = multiply(denominator, {1.0, -2.0 * r * std::cos(phase), r * r});
  }
  if (order % 2 == 1) {
    const double r = magnitude();
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    denominator = multiply(denominator, {1.0, -sign * r});
  }
  while (denominator.size() > 1 && denominator.back() == 0.0) denominator.pop_back();

  std::vector<double> numerator(order + 1, 0.0);
  double norm = 0.0;
  while (norm == 0.0) {
    for (std::size_t k = 1; k <= order; ++k) {
      numerator[k] = normal(rng);
      norm += std::abs(numerator[k]);
    }
  }
  const double target =
      config.gain_range.first + (config.gain_range.second - config.gain_range.first) * unit(rng);
  TransferFunction unscaled(numerator, denominator);
  const double scale = target / peak_gain(unscaled);
  for (auto& b : numerator) b *= scale;
  return TransferFunction(std::move(numerator), std::move(denominator));
}

GeneratedNetwork random_network_model(const SimConfig& config) {
  config.validate();
  const auto graph = random_graph(config);
  const std::size_t L = config.node_count;
  std::uniform_real_distribution<double> noise(config.noise_variance_range.first,
                                               config.noise_variance_range.second);

  for (std::size_t attempt = 0; attempt <= config.rejection_cap; ++attempt) {
    Rng rng(derive_seed(config.seed, {kAttemptStream, attempt}));
    std::vector<TransferFunction> transfers(L * L);
    for (const auto& edge : graph.edges())
      transfers[edge.target * L + edge.source] = random_stable_transfer(config, rng());
    std::vector<double> variances(L);
    for (auto& v : variances) v = noise(rng);
    TransferNetwork model(L, std::move(transfers), std::move(variances));
    if (check_network_stability(model)) return {std::move(model), attempt, config};
  }
  throw Error(ErrorKind::generation_failure,
              "no stable network after " + std::to_string(config.rejection_cap) +
                  " rejections; lower gain_range or edge_probability");
}

}  // namespace netid
