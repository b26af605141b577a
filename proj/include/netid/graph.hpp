#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace netid {

/// Directed edge from `source` to `target`; node indices are 0-based.
struct Edge {
  std::size_t target = 0;
  std::size_t source = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Directed graph over `node_count` nodes without self-loops.
class DirectedGraph {
 public:
  explicit DirectedGraph(std::size_t node_count = 0);
  DirectedGraph(std::size_t node_count, std::span<const Edge> edges);

  [[nodiscard]] static DirectedGraph complete(std::size_t node_count);

  [[nodiscard]] std::size_t node_count() const noexcept { return node_count_; }
  [[nodiscard]] std::size_t edge_count() const noexcept { return edge_count_; }
  [[nodiscard]] std::size_t candidate_edge_count() const noexcept {
    return node_count_ * (node_count_ == 0 ? 0 : node_count_ - 1);
  }

  [[nodiscard]] bool contains(Edge edge) const;
  void add(Edge edge);
  void remove(Edge edge);

  /// Edges in (target, source) lexicographic order.
  [[nodiscard]] std::vector<Edge> edges() const;
  [[nodiscard]] std::vector<std::size_t> parents(std::size_t target) const;

  bool operator==(const DirectedGraph&) const = default;

 private:
  void check(Edge edge) const;

  std::size_t node_count_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<unsigned char> adjacency_;  // row = target, column = source
};

}  // namespace netid
