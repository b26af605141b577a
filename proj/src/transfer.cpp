#include "netid/transfer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "netid/error.hpp"

namespace netid {

namespace {

std::size_t effective_degree(const std::vector<double>& coefficients) {
  std::size_t degree = coefficients.size();
  while (degree > 0 && coefficients[degree - 1] == 0.0) --degree;
  return degree == 0 ? 0 : degree - 1;
}

}  // namespace

TransferFunction::TransferFunction() : numerator_{0.0}, denominator_{1.0} {}

TransferFunction::TransferFunction(std::vector<double> numerator, std::vector<double> denominator)
    : numerator_(std::move(numerator)), denominator_(std::move(denominator)) {
  if (numerator_.empty()) numerator_.push_back(0.0);
  if (denominator_.empty() || denominator_.front() != 1.0)
    throw Error(ErrorKind::invalid_argument, "transfer denominator must be monic (leading 1)");
  if (numerator_.front() != 0.0)
    throw Error(ErrorKind::invalid_argument,
                "transfer numerator must have a zero constant term (at least one sample delay)");
  for (double v : numerator_)
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "non-finite numerator");
  for (double v : denominator_)
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "non-finite denominator");
}

TransferFunction TransferFunction::delay(double gain, std::size_t lag) {
  if (lag == 0) throw Error(ErrorKind::invalid_argument, "delay must be at least one sample");
  std::vector<double> numerator(lag + 1, 0.0);
  numerator[lag] = gain;
  return TransferFunction(std::move(numerator), {1.0});
}

bool TransferFunction::is_zero() const noexcept {
  return std::all_of(numerator_.begin(), numerator_.end(), [](double v) { return v == 0.0; });
}

std::size_t TransferFunction::state_order() const noexcept {
  if (is_zero()) return 0;
  return std::max(effective_degree(numerator_), effective_degree(denominator_));
}

std::complex<double> TransferFunction::frequency_response(double omega) const {
  auto evaluate = [omega](const std::vector<double>& c) {
    std::complex<double> sum = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
      sum += c[k] * std::polar(1.0, -omega * static_cast<double>(k));
    return sum;
  };
  return evaluate(numerator_) / evaluate(denominator_);
}

std::vector<std::complex<double>> TransferFunction::poles() const {
  const std::size_t degree = effective_degree(denominator_);
  if (degree == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (std::size_t k = 0; k < degree; ++k) companion(0, k) = -denominator_[k + 1];
  for (std::size_t k = 1; k < degree; ++k) companion(k, k - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<std::complex<double>> roots;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
    roots.push_back(solver.eigenvalues()(k));
  return roots;
}

bool TransferFunction::is_stable(double tol) const {
  for (const auto& p : poles())
    if (std::abs(p) >= 1.0 - tol) return false;
  return true;
}

std::vector<double> TransferFunction::impulse_response(std::size_t length) const {
  std::vector<double> g(length, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    double value = t < numerator_.size() ? numerator_[t] : 0.0;
    for (std::size_t k = 1; k < denominator_.size() && k <= t; ++k)
      value -= denominator_[k] * g[t - k];
    g[t] = value;
  }
  return g;
}

TransferNetwork::TransferNetwork(std::size_t node_count, std::vector<TransferFunction> transfers,
                                 std::vector<double> noise_variances)
    : node_count_(node_count),
      transfers_(std::move(transfers)),
      noise_variances_(std::move(noise_variances)),
      truth_(node_count) {
  if (node_count_ < 1) throw Error(ErrorKind::invalid_argument, "network needs at least 1 node");
  if (transfers_.size() != node_count_ * node_count_)
    throw Error(ErrorKind::invalid_argument, "transfer matrix must be L x L");
  if (noise_variances_.size() != node_count_)
    throw Error(ErrorKind::invalid_argument, "need one noise variance per node");
  for (double v : noise_variances_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::invalid_argument, "noise variances must be finite and nonnegative");
  for (std::size_t j = 0; j < node_count_; ++j) {
    for (std::size_t i = 0; i < node_count_; ++i) {
      const auto& g = transfers_[j * node_count_ + i];
      if (g.is_zero()) continue;
      if (i == j)
        throw Error(ErrorKind::invalid_argument,
                    "self-transfer on node " + std::to_string(j) + " is not allowed");
      if (!g.is_stable())
        throw Error(ErrorKind::stability, "transfer from node " + std::to_string(i) + " to node " +
                                              std::to_string(j) + " is unstable");
      truth_.add({j, i});
    }
  }
}

TransferNetwork TransferNetwork::empty(std::size_t node_count, double noise_variance) {
  return TransferNetwork(node_count, std::vector<TransferFunction>(node_count * node_count),
                         std::vector<double>(node_count, noise_variance));
}

const TransferFunction& TransferNetwork::transfer(std::size_t target, std::size_t source) const {
  if (target >= node_count_ || source >= node_count_)
    throw Error(ErrorKind::invalid_argument, "transfer index out of range");
  return transfers_[target * node_count_ + source];
}

NetworkRealization realize(const TransferNetwork& model) {
  const std::size_t L = model.node_count();
  std::size_t states = 0;
  for (const auto& g : model.transfers()) states += g.state_order();

  NetworkRealization r{Eigen::MatrixXd::Zero(states, states), Eigen::MatrixXd::Zero(states, L),
                       Eigen::MatrixXd::Zero(L, states)};
  std::size_t offset = 0;
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t i = 0; i < L; ++i) {
      const auto& g = model.transfer(j, i);
      const std::size_t n = g.state_order();
      if (n == 0) continue;
      const auto& num = g.numerator();
      const auto& den = g.denominator();
      // Controllable canonical form: first row holds -a_k, ones on the
      // subdiagonal, input into the first state, output weights b_k.
      for (std::size_t k = 0; k < n; ++k) {
        if (k + 1 < den.size()) r.a(offset, offset + k) = -den[k + 1];
        if (k + 1 < num.size()) r.c(j, offset + k) = num[k + 1];
        if (k > 0) r.a(offset + k, offset + k - 1) = 1.0;
      }
      r.b(offset, i) = 1.0;
      offset += n;
    }
  }
  return r;
}

double closed_loop_spectral_radius(const TransferNetwork& model) {
  const auto r = realize(model);
  if (r.a.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(r.closed_loop(), false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool check_network_stability(const TransferNetwork& model, double tol) {
  return closed_loop_spectral_radius(model) < 1.0 - tol;
}

}  // namespace netid
