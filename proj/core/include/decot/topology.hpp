#ifndef DECOT_TOPOLOGY_HPP_
#define DECOT_TOPOLOGY_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "decot/types.hpp"

namespace decot {

// Undirected edge between two agents. Agents are 0-indexed in memory; the
// text format uses 1-indexed agents.
struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Static, connected, undirected agent network.
//
// Edges are normalized so that u < v and kept sorted. Neighbor lists are
// sorted by agent index, which fixes the summation order used everywhere a
// quantity is accumulated over neighbors.
class Graph {
 public:
  // Throws InvalidEdge for self-loops, duplicates or out-of-range endpoints
  // and DisconnectedGraph when the edge set does not span all agents.
  Graph(int num_agents, std::vector<Edge> edges);

  int num_agents() const { return num_agents_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const int> neighbors(int agent) const {
    return neighbors_[static_cast<std::size_t>(agent)];
  }
  int degree(int agent) const {
    return static_cast<int>(neighbors_[static_cast<std::size_t>(agent)].size());
  }
  bool has_edge(int a, int b) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_agents_ == b.num_agents_ && a.edges_ == b.edges_;
  }

 private:
  int num_agents_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
};

Graph build_graph(int num_agents, std::vector<Edge> edges);

// Random spanning tree (each agent, in a seeded random order, attaches to a
// uniformly chosen earlier agent) plus every remaining pair independently with
// probability edge_prob. Connected by construction; deterministic per seed.
Graph random_connected_graph(int num_agents, double edge_prob,
                             std::uint64_t seed);

Graph path_graph(int num_agents);
Graph complete_graph(int num_agents);
// Agent 0 is the hub.
Graph star_graph(int num_agents);

// L = D - A.
IntMatrix laplacian(const Graph& g);

// Laplacian with its last row removed: (N-1) x N, full row rank, null space
// spanned by the all-ones vector.
class ReducedLaplacian {
 public:
  explicit ReducedLaplacian(const Graph& g);

  int rows() const { return static_cast<int>(dense_.rows()); }
  int cols() const { return static_cast<int>(dense_.cols()); }
  std::int64_t operator()(int r, int c) const { return dense_(r, c); }
  const IntMatrix& dense() const { return dense_; }

  // Nonzero entries (row, value) of column `agent`, ordered by row. At most
  // degree(agent) + 1 entries.
  std::vector<std::pair<int, double>> column(int agent) const;

  Vector apply(const Vector& v) const;

 private:
  IntMatrix dense_;
};

// Plain-text format: first line N, then one "i j" line per edge, 1-indexed.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);

}  // namespace decot

#endif  // DECOT_TOPOLOGY_HPP_
