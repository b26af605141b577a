#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace netid {

/// L node signals observed over N time points (row = node, column = time).
class TimeSeriesDataset {
 public:
  /// Throws `Error{validation}` unless L >= 2, N >= 2, labels are unique and
  /// every entry is finite.
  TimeSeriesDataset(std::vector<std::string> node_labels, Eigen::MatrixXd data);

  /// Labels default to "w1", "w2", ...
  explicit TimeSeriesDataset(Eigen::MatrixXd data);

  [[nodiscard]] std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(data_.rows());
  }
  [[nodiscard]] std::size_t sample_count() const noexcept {
    return static_cast<std::size_t>(data_.cols());
  }
  [[nodiscard]] const std::vector<std::string>& node_labels() const noexcept { return labels_; }
  [[nodiscard]] const Eigen::MatrixXd& data() const noexcept { return data_; }

  /// Signal of one node as an N-vector.
  [[nodiscard]] Eigen::VectorXd signal(std::size_t node) const;

  /// Index of a label, throws `Error{invalid_argument}` when absent.
  [[nodiscard]] std::size_t index_of(const std::string& label) const;

  /// Copy with every node rescaled to zero mean and unit variance.
  [[nodiscard]] TimeSeriesDataset standardized() const;

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd data_;
};

[[nodiscard]] std::vector<std::string> default_labels(std::size_t node_count);

/// CSV layout: a header row of node labels, then one row per time point.
/// `source_name` is only used in error messages.
[[nodiscard]] TimeSeriesDataset read_dataset_csv(std::istream& in,
                                                 const std::string& source_name = "<stream>");
[[nodiscard]] TimeSeriesDataset read_dataset_csv(const std::string& path);
void write_dataset_csv(std::ostream& out, const TimeSeriesDataset& dataset);
void write_dataset_csv(const std::string& path, const TimeSeriesDataset& dataset);

}  // namespace netid
