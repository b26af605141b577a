#pragma once

#include <cstddef>
#include <cstdint>

#include "netid/dataset.hpp"
#include "netid/transfer.hpp"

namespace netid {

struct SimulationOptions {
  std::size_t burn_in = 500;
  bool standardize = false;
};

/// Iterates w(t) = G(q) w(t) + eta(t) from a zero state with i.i.d. Gaussian
/// node noise and drops the first `burn_in` samples. Identical arguments give
/// bit-identical output.
///
/// Throws `Error{stability}` if the closed loop is unstable and
/// `Error{simulation_divergence}` on non-finite values.
[[nodiscard]] TimeSeriesDataset simulate_network(const TransferNetwork& model,
                                                 std::size_t n_samples, std::uint64_t seed,
                                                 const SimulationOptions& options = {});

}  // namespace netid
