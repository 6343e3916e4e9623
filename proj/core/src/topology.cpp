#include "decot/topology.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "decot/errors.hpp"

namespace decot {

namespace {

bool is_connected(int n, const std::vector<std::vector<int>>& adj) {
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == n;
}

}  // namespace

Graph::Graph(int num_agents, std::vector<Edge> edges) : num_agents_(num_agents) {
  if (num_agents < 1) {
    throw InvalidEdge("graph needs at least one agent");
  }
  for (Edge& e : edges) {
    if (e.u < 0 || e.u >= num_agents || e.v < 0 || e.v >= num_agents) {
      throw InvalidEdge("edge (" + std::to_string(e.u + 1) + "," +
                        std::to_string(e.v + 1) + ") has an endpoint outside [1, " +
                        std::to_string(num_agents) + "]");
    }
    if (e.u == e.v) {
      throw InvalidEdge("self-loop at agent " + std::to_string(e.u + 1));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end());
      dup != edges.end()) {
    throw InvalidEdge("duplicate edge (" + std::to_string(dup->u + 1) + "," +
                      std::to_string(dup->v + 1) + ")");
  }
  edges_ = std::move(edges);

  neighbors_.assign(static_cast<std::size_t>(num_agents), {});
  for (const Edge& e : edges_) {
    neighbors_[static_cast<std::size_t>(e.u)].push_back(e.v);
    neighbors_[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());

  if (!is_connected(num_agents, neighbors_)) {
    throw DisconnectedGraph("graph on " + std::to_string(num_agents) +
                            " agents is not connected");
  }
}

bool Graph::has_edge(int a, int b) const {
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

Graph build_graph(int num_agents, std::vector<Edge> edges) {
  return Graph(num_agents, std::move(edges));
}

Graph random_connected_graph(int num_agents, double edge_prob,
                             std::uint64_t seed) {
  if (num_agents < 2) throw InvalidEdge("random graph needs at least 2 agents");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
    throw InvalidEdge("edge probability must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::vector<int> order(static_cast<std::size_t>(num_agents));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Edge> edges;
  std::vector<std::vector<char>> present(
      static_cast<std::size_t>(num_agents),
      std::vector<char>(static_cast<std::size_t>(num_agents), 0));
  for (int k = 1; k < num_agents; ++k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    const int a = order[static_cast<std::size_t>(k)];
    const int b = order[static_cast<std::size_t>(pick(rng))];
    edges.push_back({std::min(a, b), std::max(a, b)});
    present[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
    present[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 1;
  }
  std::bernoulli_distribution coin(edge_prob);
  for (int a = 0; a < num_agents; ++a) {
    for (int b = a + 1; b < num_agents; ++b) {
      if (present[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) continue;
      if (coin(rng)) edges.push_back({a, b});
    }
  }
  return Graph(num_agents, std::move(edges));
}

Graph path_graph(int num_agents) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < num_agents; ++i) edges.push_back({i, i + 1});
  return Graph(num_agents, std::move(edges));
}

Graph complete_graph(int num_agents) {
  std::vector<Edge> edges;
  for (int i = 0; i < num_agents; ++i) {
    for (int j = i + 1; j < num_agents; ++j) edges.push_back({i, j});
  }
  return Graph(num_agents, std::move(edges));
}

Graph star_graph(int num_agents) {
  std::vector<Edge> edges;
  for (int i = 1; i < num_agents; ++i) edges.push_back({0, i});
  return Graph(num_agents, std::move(edges));
}

IntMatrix laplacian(const Graph& g) {
  const int n = g.num_agents();
  IntMatrix lap = IntMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    lap(e.u, e.v) -= 1;
    lap(e.v, e.u) -= 1;
    lap(e.u, e.u) += 1;
    lap(e.v, e.v) += 1;
  }
  return lap;
}

ReducedLaplacian::ReducedLaplacian(const Graph& g) {
  const IntMatrix full = laplacian(g);
  dense_ = full.topRows(full.rows() - 1);
}

std::vector<std::pair<int, double>> ReducedLaplacian::column(int agent) const {
  std::vector<std::pair<int, double>> out;
  for (int r = 0; r < rows(); ++r) {
    if (dense_(r, agent) != 0) {
      out.emplace_back(r, static_cast<double>(dense_(r, agent)));
    }
  }
  return out;
}

Vector ReducedLaplacian::apply(const Vector& v) const {
  if (v.size() != cols()) {
    throw DimensionMismatch("reduced Laplacian expects a vector of length " +
                            std::to_string(cols()));
  }
  return dense_.cast<double>() * v;
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.num_agents() << '\n';
  for (const Edge& e : g.edges()) out << e.u + 1 << ' ' << e.v + 1 << '\n';
}

Graph read_graph(std::istream& in) {
  std::string line;
  int num_agents = -1;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    if (num_agents < 0) {
      if (!(fields >> num_agents) || num_agents < 1) {
        throw ParseError("graph: line " + std::to_string(line_no) +
                         ": expected a positive agent count");
      }
      continue;
    }
    int a = 0;
    int b = 0;
    if (!(fields >> a >> b)) {
      throw ParseError("graph: line " + std::to_string(line_no) +
                       ": expected an 'i j' edge");
    }
    edges.push_back({a - 1, b - 1});
  }
  if (num_agents < 0) throw ParseError("graph: empty input");
  return Graph(num_agents, std::move(edges));
}

}  // namespace decot
