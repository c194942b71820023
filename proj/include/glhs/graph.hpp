#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace glhs {

using Vertex = int;

struct OrientedEdge {
  Vertex tail = 0;
  Vertex head = 0;
  int id = 0;  // [0, m) canonical, [m, 2m) reversed copy of id - m
  bool is_reversed = false;
};

// Finite connected simple graph with one canonical orientation per edge.
// Canonical orientation is (min, max) and edges are sorted lexicographically,
// so the oriented-edge ids are a deterministic function of the edge set.
class Graph {
 public:
  // Validates connectivity, loops and parallel edges; throws Error otherwise.
  static Graph from_edges(int vertex_count, std::vector<std::pair<Vertex, Vertex>> edges, Vertex origin = 0);

  int vertex_count() const noexcept { return static_cast<int>(adjacency_.size()); }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  int degree(Vertex x) const { return static_cast<int>(adjacency_[x].size()); }
  int degree_bound() const noexcept { return degree_bound_; }
  Vertex origin() const noexcept { return origin_; }

  const std::vector<Vertex>& neighbors(Vertex x) const { return adjacency_[x]; }
  bool adjacent(Vertex x, Vertex y) const;

  // Canonical orientation B->; size m.
  const std::vector<OrientedEdge>& oriented_edges() const noexcept { return edges_; }
  // Both orientations B, ids 0..2m-1, materialized on demand.
  std::vector<OrientedEdge> all_oriented_edges() const;
  OrientedEdge oriented(int id) const;
  OrientedEdge reversal(const OrientedEdge& b) const;

  // Graph distance to the origin (BFS, computed at construction).
  int distance_to_origin(Vertex x) const { return distance_[x]; }

  // Present when the graph is a torus or cycle; 0 otherwise.
  int side() const noexcept { return side_; }
  int dim() const noexcept { return dim_; }

 private:
  Graph() = default;

  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<OrientedEdge> edges_;
  std::vector<int> distance_;
  Vertex origin_ = 0;
  int degree_bound_ = 0;
  int side_ = 0;
  int dim_ = 0;

  friend Graph build_torus(int side, int dim);
};

Graph build_cycle(int n);
// (Z / side Z)^dim with row-major vertex indexing.
Graph build_torus(int side, int dim);

// -1 at the tail, +1 at the head, 0 elsewhere.
constexpr int sgn(Vertex x, const OrientedEdge& b) noexcept {
  if (x == b.tail) return -1;
  if (x == b.head) return 1;
  return 0;
}

Eigen::MatrixXd laplacian(const Graph& g);

// Directed-edge graph of the Gaussian Hessian. Nodes are all 2m oriented
// edges; b' is a kite neighbor of b when b' is not the reversal of b and the
// cross term <d_tail(b) - d_head(b), d_tail(b') - d_head(b')> is negative.
struct EdgeGraph {
  struct Link {
    int node;
    double weight;
  };

  std::vector<OrientedEdge> nodes;
  std::vector<std::vector<Link>> kite_adjacency;
  std::vector<double> diagonal;  // d_b d_b H
  // Surplus of the kite walk over the Hessian on each node:
  // kappa_b = -(d_b d_b H + sum over kite neighbors of d_b d_b' H).
  // With this sign the Hessian acting on antisymmetric edge functions equals
  // (kite Laplacian) - kappa.
  std::vector<double> compensation;

  std::size_t size() const noexcept { return nodes.size(); }
};

// Gaussian Hessian cross term between two oriented edges.
double hessian_cross_term(const OrientedEdge& a, const OrientedEdge& b) noexcept;

EdgeGraph build_edge_graph(const Graph& g);

}  // namespace glhs
