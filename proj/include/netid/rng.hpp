#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace netid {

using Rng = std::mt19937_64;

/// Counter-based seed split: mixes `counter` into `master` with the
/// splitmix64 finalizer. Distinct counters give decorrelated streams.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) noexcept;

/// Folds a path of counters, e.g. derive_seed(master, {L, N, model}).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master,
                                        std::initializer_list<std::uint64_t> path) noexcept;

}  // namespace netid
