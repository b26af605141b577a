#include "netid/graph.hpp"

#include <string>

#include "netid/error.hpp"

namespace netid {

DirectedGraph::DirectedGraph(std::size_t node_count)
    : node_count_(node_count), adjacency_(node_count * node_count, 0) {}

DirectedGraph::DirectedGraph(std::size_t node_count, std::span<const Edge> edges)
    : DirectedGraph(node_count) {
  for (const auto& edge : edges) add(edge);
}

DirectedGraph DirectedGraph::complete(std::size_t node_count) {
  DirectedGraph graph(node_count);
  for (std::size_t j = 0; j < node_count; ++j)
    for (std::size_t i = 0; i < node_count; ++i)
      if (i != j) graph.add({j, i});
  return graph;
}

void DirectedGraph::check(Edge edge) const {
  if (edge.target >= node_count_ || edge.source >= node_count_)
    throw Error(ErrorKind::invalid_argument,
                "edge (" + std::to_string(edge.target) + ", " + std::to_string(edge.source) +
                    ") out of range for " + std::to_string(node_count_) + " nodes");
  if (edge.target == edge.source)
    throw Error(ErrorKind::invalid_argument,
                "self-loop on node " + std::to_string(edge.target) + " is not allowed");
}

bool DirectedGraph::contains(Edge edge) const {
  if (edge.target >= node_count_ || edge.source >= node_count_) return false;
  return adjacency_[edge.target * node_count_ + edge.source] != 0;
}

void DirectedGraph::add(Edge edge) {
  check(edge);
  auto& slot = adjacency_[edge.target * node_count_ + edge.source];
  if (!slot) {
    slot = 1;
    ++edge_count_;
  }
}

void DirectedGraph::remove(Edge edge) {
  check(edge);
  auto& slot = adjacency_[edge.target * node_count_ + edge.source];
  if (slot) {
    slot = 0;
    --edge_count_;
  }
}

std::vector<Edge> DirectedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t j = 0; j < node_count_; ++j)
    for (std::size_t i = 0; i < node_count_; ++i)
      if (adjacency_[j * node_count_ + i]) out.push_back({j, i});
  return out;
}

std::vector<std::size_t> DirectedGraph::parents(std::size_t target) const {
  std::vector<std::size_t> out;
  if (target >= node_count_) return out;
  for (std::size_t i = 0; i < node_count_; ++i)
    if (adjacency_[target * node_count_ + i]) out.push_back(i);
  return out;
}

}  // namespace netid
