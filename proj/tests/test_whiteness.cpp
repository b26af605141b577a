#include <doctest.h>

#include <cmath>
#include <random>

#include "netid/error.hpp"
#include "netid/simulate.hpp"
#include "netid/whiteness.hpp"

using namespace netid;

TEST_CASE("Ljung-Box statistic on a hand-computed series") {
  // Mean 2.5, deviations -1.5 -0.5 0.5 1.5, c0 = 5, c1 = 0.75 - 0.25 + 0.75 = 1.25,
  // so Q = n (n + 2) rho^2 / (n - 1) = 24 * 0.0625 / 3 = 0.5.
  const std::vector<double> r{1.0, 2.0, 3.0, 4.0};
  const auto res = whiteness_test(r, 1, 0.05);
  const double rho = 1.25 / 5.0;
  CHECK(res.statistic == doctest::Approx(4.0 * 6.0 * rho * rho / 3.0));
  CHECK(res.statistic == doctest::Approx(0.5));
}

TEST_CASE("autocorrelated residuals fail the test") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(1000);
  double state = 0.0;
  for (auto& v : x) v = state = 0.7 * state + normal(rng);
  CHECK_FALSE(whiteness_test(x).pass);
}

TEST_CASE("empirical size on white noise is near alpha") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  int rejected = 0;
  for (int run = 0; run < 400; ++run) {
    std::vector<double> x(500);
    for (auto& v : x) v = normal(rng);
    rejected += !whiteness_test(x).pass;
  }
  CHECK(rejected / 400.0 == doctest::Approx(0.05).epsilon(0.6));
}

TEST_CASE("whiteness input checks") {
  CHECK_THROWS_AS((void)whiteness_test(std::vector<double>(10, 1.0), 3), Error);
  CHECK_THROWS_AS((void)whiteness_test(std::vector<double>{1.0, 2.0}, 5), Error);
}

TEST_CASE("residuals of a correctly ordered VAR are white") {
  const auto data = simulate_network(TransferNetwork::empty(3), 2000, 6);
  const auto report = validate_residuals(data, 2);
  CHECK(report.nodes.size() == 3);
  CHECK(report.residuals.cols() == 2000);
  CHECK(report.pass_fraction() >= 2.0 / 3.0);
}
