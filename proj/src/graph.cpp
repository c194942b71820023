#include "glhs/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <string>

#include "glhs/error.hpp"

namespace glhs {

Graph Graph::from_edges(int vertex_count, std::vector<std::pair<Vertex, Vertex>> edges, Vertex origin) {
  if (vertex_count < 1) throw Error(ErrorKind::InvalidSize, "graph needs at least one vertex");
  if (origin < 0 || origin >= vertex_count) throw Error(ErrorKind::InvalidInput, "origin out of range");

  std::set<std::pair<Vertex, Vertex>> seen;
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count)
      throw Error(ErrorKind::InvalidInput, "edge endpoint out of range");
    if (a == b) throw Error(ErrorKind::InvalidInput, "self-loop at vertex " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second)
      throw Error(ErrorKind::InvalidInput,
                  "parallel edge {" + std::to_string(a) + "," + std::to_string(b) + "}");
  }
  std::sort(edges.begin(), edges.end());

  Graph g;
  g.origin_ = origin;
  g.adjacency_.assign(vertex_count, {});
  g.edges_.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [a, b] = edges[i];
    g.edges_.push_back({a, b, static_cast<int>(i), false});
    g.adjacency_[a].push_back(b);
    g.adjacency_[b].push_back(a);
  }
  for (auto& nb : g.adjacency_) {
    std::sort(nb.begin(), nb.end());
    g.degree_bound_ = std::max(g.degree_bound_, static_cast<int>(nb.size()));
  }

  g.distance_.assign(vertex_count, -1);
  std::queue<Vertex> frontier;
  g.distance_[origin] = 0;
  frontier.push(origin);
  while (!frontier.empty()) {
    const Vertex x = frontier.front();
    frontier.pop();
    for (Vertex y : g.adjacency_[x]) {
      if (g.distance_[y] < 0) {
        g.distance_[y] = g.distance_[x] + 1;
        frontier.push(y);
      }
    }
  }
  if (std::any_of(g.distance_.begin(), g.distance_.end(), [](int d) { return d < 0; }))
    throw Error(ErrorKind::InvalidInput, "graph is not connected");
  return g;
}

bool Graph::adjacent(Vertex x, Vertex y) const {
  const auto& nb = adjacency_[x];
  return std::binary_search(nb.begin(), nb.end(), y);
}

OrientedEdge Graph::oriented(int id) const {
  const int m = edge_count();
  if (id < 0 || id >= 2 * m) throw Error(ErrorKind::InvalidInput, "oriented edge id out of range");
  if (id < m) return edges_[id];
  const auto& b = edges_[id - m];
  return {b.head, b.tail, id, true};
}

OrientedEdge Graph::reversal(const OrientedEdge& b) const {
  const int m = edge_count();
  return oriented(b.is_reversed ? b.id - m : b.id + m);
}

std::vector<OrientedEdge> Graph::all_oriented_edges() const {
  std::vector<OrientedEdge> out;
  out.reserve(2 * edges_.size());
  for (int id = 0; id < 2 * edge_count(); ++id) out.push_back(oriented(id));
  return out;
}

Graph build_cycle(int n) {
  if (n < 3) throw Error(ErrorKind::InvalidSize, "cycle needs n >= 3, got " + std::to_string(n));
  return build_torus(n, 1);
}

Graph build_torus(int side, int dim) {
  if (side < 3) throw Error(ErrorKind::InvalidSize, "torus needs side >= 3, got " + std::to_string(side));
  if (dim != 1 && dim != 2) throw Error(ErrorKind::InvalidParameter, "torus dimension must be 1 or 2");

  std::vector<std::pair<Vertex, Vertex>> edges;
  if (dim == 1) {
    for (int i = 0; i < side; ++i) edges.emplace_back(i, (i + 1) % side);
  } else {
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        const int v = r * side + c;
        edges.emplace_back(v, r * side + (c + 1) % side);
        edges.emplace_back(v, ((r + 1) % side) * side + c);
      }
    }
  }
  const int n = dim == 1 ? side : side * side;
  Graph g = Graph::from_edges(n, std::move(edges), 0);
  g.side_ = side;
  g.dim_ = dim;
  return g;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  const int n = g.vertex_count();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& b : g.oriented_edges()) {
    lap(b.tail, b.tail) += 1.0;
    lap(b.head, b.head) += 1.0;
    lap(b.tail, b.head) -= 1.0;
    lap(b.head, b.tail) -= 1.0;
  }
  return lap;
}

double hessian_cross_term(const OrientedEdge& a, const OrientedEdge& b) noexcept {
  auto delta = [](Vertex u, Vertex v) { return u == v ? 1.0 : 0.0; };
  return delta(a.tail, b.tail) - delta(a.tail, b.head) - delta(a.head, b.tail) + delta(a.head, b.head);
}

EdgeGraph build_edge_graph(const Graph& g) {
  EdgeGraph eg;
  eg.nodes = g.all_oriented_edges();
  const int count = static_cast<int>(eg.nodes.size());

  // Oriented edges incident to each vertex; only these can have a nonzero cross term.
  std::vector<std::vector<int>> incident(g.vertex_count());
  for (const auto& b : eg.nodes) {
    incident[b.tail].push_back(b.id);
    incident[b.head].push_back(b.id);
  }

  eg.kite_adjacency.assign(count, {});
  eg.diagonal.assign(count, 0.0);
  eg.compensation.assign(count, 0.0);
  for (const auto& b : eg.nodes) {
    const int rev = g.reversal(b).id;
    std::vector<int> candidates = incident[b.tail];
    candidates.insert(candidates.end(), incident[b.head].begin(), incident[b.head].end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    double kite_sum = 0.0;
    for (int c : candidates) {
      if (c == b.id || c == rev) continue;
      const double w = hessian_cross_term(b, eg.nodes[c]);
      if (w < 0.0) {
        eg.kite_adjacency[b.id].push_back({c, w});
        kite_sum += w;
      }
    }
    eg.diagonal[b.id] = hessian_cross_term(b, b);
    eg.compensation[b.id] = -(eg.diagonal[b.id] + kite_sum);
  }
  return eg;
}

}  // namespace glhs
