#include "netid/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "netid/error.hpp"

namespace netid {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void fail_at(const std::string& source, std::size_t row, std::size_t column,
                          const std::string& what) {
  throw Error(ErrorKind::validation, source + ": row " + std::to_string(row) + ", column " +
                                         std::to_string(column) + ": " + what);
}

}  // namespace

std::vector<std::string> default_labels(std::size_t node_count) {
  std::vector<std::string> labels;
  labels.reserve(node_count);
  for (std::size_t i = 0; i < node_count; ++i) labels.push_back("w" + std::to_string(i + 1));
  return labels;
}

TimeSeriesDataset::TimeSeriesDataset(std::vector<std::string> node_labels, Eigen::MatrixXd data)
    : labels_(std::move(node_labels)), data_(std::move(data)) {
  if (data_.rows() < 2) throw Error(ErrorKind::validation, "dataset needs at least 2 nodes");
  if (data_.cols() < 2)
    throw Error(ErrorKind::validation, "dataset needs at least 2 samples per node");
  if (labels_.size() != static_cast<std::size_t>(data_.rows()))
    throw Error(ErrorKind::validation, "node label count does not match the number of signals");
  std::set<std::string> seen;
  for (const auto& label : labels_) {
    if (!seen.insert(label).second)
      throw Error(ErrorKind::validation, "duplicate node label '" + label + "'");
  }
  if (!data_.allFinite()) {
    for (Eigen::Index r = 0; r < data_.rows(); ++r)
      for (Eigen::Index c = 0; c < data_.cols(); ++c)
        if (!std::isfinite(data_(r, c)))
          throw Error(ErrorKind::validation,
                      "non-finite value at node '" + labels_[r] + "', time " + std::to_string(c));
  }
}

TimeSeriesDataset::TimeSeriesDataset(Eigen::MatrixXd data)
    : TimeSeriesDataset(default_labels(static_cast<std::size_t>(data.rows())),
                        Eigen::MatrixXd(data)) {}

Eigen::VectorXd TimeSeriesDataset::signal(std::size_t node) const {
  return data_.row(static_cast<Eigen::Index>(node)).transpose();
}

std::size_t TimeSeriesDataset::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  throw Error(ErrorKind::invalid_argument, "unknown node label '" + label + "'");
}

TimeSeriesDataset TimeSeriesDataset::standardized() const {
  Eigen::MatrixXd out = data_;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double mean = out.row(r).mean();
    out.row(r).array() -= mean;
    const double sd = std::sqrt(out.row(r).squaredNorm() / static_cast<double>(out.cols() - 1));
    if (sd > 0.0) out.row(r) /= sd;
  }
  return TimeSeriesDataset(labels_, std::move(out));
}

TimeSeriesDataset read_dataset_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) fail_at(source_name, 1, 1, "missing header row");
  auto labels = split_fields(line);
  for (std::size_t c = 0; c < labels.size(); ++c)
    if (labels[c].empty()) fail_at(source_name, 1, c + 1, "empty node label");

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != labels.size())
      fail_at(source_name, row_number, std::min(fields.size(), labels.size()) + 1,
              "expected " + std::to_string(labels.size()) + " fields, found " +
                  std::to_string(fields.size()));
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto& f = fields[c];
      const char* first = f.data();
      const char* last = f.data() + f.size();
      if (!f.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, values[c]);
      if (f.empty() || ec != std::errc() || ptr != last)
        fail_at(source_name, row_number, c + 1, "cannot parse '" + f + "' as a number");
      if (!std::isfinite(values[c]))
        fail_at(source_name, row_number, c + 1, "non-finite value '" + f + "'");
    }
    rows.push_back(std::move(values));
  }

  Eigen::MatrixXd data(static_cast<Eigen::Index>(labels.size()),
                       static_cast<Eigen::Index>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t c = 0; c < labels.size(); ++c) data(c, t) = rows[t][c];
  try {
    return TimeSeriesDataset(std::move(labels), std::move(data));
  } catch (const Error& e) {
    throw Error(ErrorKind::validation, source_name + ": " + e.what());
  }
}

TimeSeriesDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "' for reading");
  return read_dataset_csv(in, path);
}

void write_dataset_csv(std::ostream& out, const TimeSeriesDataset& dataset) {
  const auto& labels = dataset.node_labels();
  for (std::size_t c = 0; c < labels.size(); ++c) out << (c ? "," : "") << labels[c];
  out << '\n';
  const auto& data = dataset.data();
  char buffer[64];
  for (Eigen::Index t = 0; t < data.cols(); ++t) {
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
      auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), data(r, t));
      (void)ec;
      if (r) out << ',';
      out.write(buffer, ptr - buffer);
    }
    out << '\n';
  }
}

void write_dataset_csv(const std::string& path, const TimeSeriesDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  write_dataset_csv(out, dataset);
}

}  // namespace netid
