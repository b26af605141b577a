#include "netid/simulate.hpp"

#include <cmath>
#include <random>

#include "netid/error.hpp"
#include "netid/rng.hpp"

namespace netid {

TimeSeriesDataset simulate_network(const TransferNetwork& model, std::size_t n_samples,
                                   std::uint64_t seed, const SimulationOptions& options) {
  if (n_samples < 2)
    throw Error(ErrorKind::invalid_argument, "n_samples must be at least 2 (datasets need N >= 2)");
  if (!check_network_stability(model))
    throw Error(ErrorKind::stability, "network closed loop (I - G(q))^-1 is not stable");

  const std::size_t L = model.node_count();
  const auto realization = realize(model);
  const Eigen::Index states = realization.a.rows();

  Eigen::VectorXd sd(L);
  for (std::size_t j = 0; j < L; ++j) sd(j) = std::sqrt(model.noise_variances()[j]);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(states);
  Eigen::VectorXd w(L);
  Eigen::MatrixXd out(L, n_samples);

  const std::size_t total = options.burn_in + n_samples;
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t j = 0; j < L; ++j) w(j) = sd(j) * normal(rng);
    if (states > 0) {
      w.noalias() += realization.c * x;
      x = realization.a * x + realization.b * w;
    }
    if (!w.allFinite())
      throw Error(ErrorKind::simulation_divergence,
                  "simulation produced non-finite values at step " + std::to_string(t));
    if (t >= options.burn_in) out.col(t - options.burn_in) = w;
  }

  TimeSeriesDataset dataset(std::move(out));
  return options.standardize ? dataset.standardized() : dataset;
}

}  // namespace netid
