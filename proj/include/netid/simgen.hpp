#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "netid/graph.hpp"
#include "netid/transfer.hpp"

namespace netid {

struct SimConfig {
  std::size_t node_count = 6;
  double edge_probability = 0.25;
  std::size_t transfer_order = 2;
  double pole_magnitude_max = 0.8;
  std::pair<double, double> gain_range{0.3, 1.0};
  std::pair<double, double> noise_variance_range{0.5, 1.5};
  std::size_t rejection_cap = 10000;
  std::uint64_t seed = 0;

  /// Throws `Error{invalid_argument}` on out-of-range fields.
  void validate() const;
};

/// Frequency grid used to measure the peak gain of generated transfers.
inline constexpr std::size_t kGainGridPoints = 512;

/// Peak |G(e^{i w})| over `kGainGridPoints` equally spaced w in [0, pi].
[[nodiscard]] double peak_gain(const TransferFunction& transfer);

/// Each of the L(L-1) candidate edges is included independently.
[[nodiscard]] DirectedGraph random_graph(const SimConfig& config);

/// Stable transfer of `transfer_order` with poles in conjugate pairs of
/// magnitude in (0, pole_magnitude_max], a random strictly delayed numerator
/// and peak gain drawn uniformly from `gain_range`.
[[nodiscard]] TransferFunction random_stable_transfer(const SimConfig& config, std::uint64_t seed);

struct GeneratedNetwork {
  TransferNetwork model;
  std::size_t rejections = 0;
  SimConfig config;
};

/// Draws a random graph, then redraws transfers and noise variances until the
/// closed loop is stable. Throws `Error{generation_failure}` after
/// `rejection_cap` rejections.
[[nodiscard]] GeneratedNetwork random_network_model(const SimConfig& config);

}  // namespace netid
