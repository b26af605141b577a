#include "netid/rng.hpp"

namespace netid {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) noexcept {
  std::uint64_t z = master + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) noexcept {
  for (auto counter : path) master = derive_seed(master, counter);
  return master;
}

}  // namespace netid
