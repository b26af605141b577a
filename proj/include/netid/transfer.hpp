#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

#include "netid/graph.hpp"

namespace netid {

/// Rational transfer function in the delay operator q^-1:
///
///   G(q) = (b0 + b1 q^-1 + ... + bn q^-n) / (1 + a1 q^-1 + ... + ad q^-d)
///
/// `numerator` holds b0..bn and `denominator` holds 1, a1..ad. b0 must be
/// zero so every transfer is strictly delayed.
class TransferFunction {
 public:
  TransferFunction();  // identically zero
  TransferFunction(std::vector<double> numerator, std::vector<double> denominator);

  [[nodiscard]] static TransferFunction delay(double gain, std::size_t lag = 1);

  [[nodiscard]] const std::vector<double>& numerator() const noexcept { return numerator_; }
  [[nodiscard]] const std::vector<double>& denominator() const noexcept { return denominator_; }

  [[nodiscard]] bool is_zero() const noexcept;
  /// Number of states of a minimal controllable realization.
  [[nodiscard]] std::size_t state_order() const noexcept;

  [[nodiscard]] std::complex<double> frequency_response(double omega) const;
  /// Roots of the denominator in the z-plane.
  [[nodiscard]] std::vector<std::complex<double>> poles() const;
  [[nodiscard]] bool is_stable(double tol = 1e-9) const;
  /// First `length` impulse-response coefficients g_0, g_1, ...
  [[nodiscard]] std::vector<double> impulse_response(std::size_t length) const;

  bool operator==(const TransferFunction&) const = default;

 private:
  std::vector<double> numerator_;
  std::vector<double> denominator_;
};

/// Ground-truth dynamic network w(t) = G(q) w(t) + eta(t).
class TransferNetwork {
 public:
  /// `transfers` is row-major L x L with entry (j, i) the transfer from node i
  /// to node j. The ground-truth graph is the sparsity pattern of the matrix.
  /// Throws `Error{invalid_argument}` on shape errors, self-transfers, negative
  /// variances or unstable entries.
  TransferNetwork(std::size_t node_count, std::vector<TransferFunction> transfers,
                  std::vector<double> noise_variances);

  [[nodiscard]] static TransferNetwork empty(std::size_t node_count, double noise_variance = 1.0);

  [[nodiscard]] std::size_t node_count() const noexcept { return node_count_; }
  [[nodiscard]] const TransferFunction& transfer(std::size_t target, std::size_t source) const;
  [[nodiscard]] const std::vector<TransferFunction>& transfers() const noexcept {
    return transfers_;
  }
  [[nodiscard]] const std::vector<double>& noise_variances() const noexcept {
    return noise_variances_;
  }
  [[nodiscard]] const DirectedGraph& ground_truth() const noexcept { return truth_; }

  bool operator==(const TransferNetwork&) const = default;

 private:
  std::size_t node_count_;
  std::vector<TransferFunction> transfers_;
  std::vector<double> noise_variances_;
  DirectedGraph truth_;
};

/// State-space realization x(t+1) = A x(t) + B w(t), w(t) = C x(t) + eta(t)
/// built from controllable canonical forms of every nonzero transfer.
struct NetworkRealization {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;

  /// Closed-loop state matrix A + B C.
  [[nodiscard]] Eigen::MatrixXd closed_loop() const { return a + b * c; }
};

[[nodiscard]] NetworkRealization realize(const TransferNetwork& model);

/// Largest eigenvalue magnitude of the closed loop (0 for a network without
/// dynamics).
[[nodiscard]] double closed_loop_spectral_radius(const TransferNetwork& model);

/// True iff every closed-loop eigenvalue has magnitude < 1 - tol.
[[nodiscard]] bool check_network_stability(const TransferNetwork& model, double tol = 1e-9);

}  // namespace netid
