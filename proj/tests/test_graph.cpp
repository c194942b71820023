#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "glhs/error.hpp"
#include "glhs/graph.hpp"

using namespace glhs;

namespace {

bool all_degrees(const Graph& g, int d) {
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    if (g.degree(x) != d) return false;
  }
  return true;
}

// Test-side vertex-vector inner product, independent of hessian_cross_term.
double gradient_inner_product(const OrientedEdge& a, const OrientedEdge& b, int n) {
  std::vector<double> va(n, 0.0), vb(n, 0.0);
  va[a.tail] += 1.0;
  va[a.head] -= 1.0;
  vb[b.tail] += 1.0;
  vb[b.head] -= 1.0;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += va[i] * vb[i];
  return s;
}

}  // namespace

TEST_CASE("cycles") {
  const Graph c4 = build_cycle(4);
  CHECK(c4.vertex_count() == 4);
  CHECK(c4.edge_count() == 4);
  CHECK(all_degrees(c4, 2));
  CHECK(c4.origin() == 0);

  const Graph c3 = build_cycle(3);
  CHECK(c3.edge_count() == 3);
  CHECK(c3.degree_bound() == 2);

  try {
    build_cycle(2);
    FAIL("expected invalid-size");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidSize);
  }
}

TEST_CASE("tori") {
  const Graph t4 = build_torus(4, 2);
  CHECK(t4.vertex_count() == 16);
  CHECK(t4.edge_count() == 32);
  CHECK(all_degrees(t4, 4));
  CHECK(t4.degree_bound() == 4);

  const Graph t16 = build_torus(16, 2);
  CHECK(t16.vertex_count() == 256);
  CHECK(t16.edge_count() == 512);

  const Graph ring = build_torus(3, 1);
  const Graph tri = build_cycle(3);
  REQUIRE(ring.edge_count() == tri.edge_count());
  for (int i = 0; i < ring.edge_count(); ++i) {
    CHECK(ring.oriented_edges()[i].tail == tri.oriented_edges()[i].tail);
    CHECK(ring.oriented_edges()[i].head == tri.oriented_edges()[i].head);
  }

  CHECK_THROWS_AS(build_torus(2, 2), Error);
  CHECK_THROWS_AS(build_torus(4, 3), Error);

  // Row-major indexing: vertex 10 is (2, 2), four steps from the origin.
  CHECK(t4.distance_to_origin(10) == 4);
  CHECK(t4.distance_to_origin(1) == 1);
  CHECK(t4.distance_to_origin(3) == 1);
  CHECK(t4.adjacent(0, 4));
  CHECK(t4.adjacent(0, 12));
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 0}}), Error);
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 1}, {1, 0}}), Error);
  CHECK_THROWS_AS(Graph::from_edges(4, {{0, 1}, {2, 3}}), Error);
  CHECK_NOTHROW(Graph::from_edges(2, {{1, 0}}));
}

TEST_CASE("canonical orientation and reversal") {
  const Graph g = build_torus(5, 2);
  const auto& edges = g.oriented_edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    CHECK(edges[i].tail < edges[i].head);
    if (i > 0) CHECK(std::pair(edges[i - 1].tail, edges[i - 1].head) < std::pair(edges[i].tail, edges[i].head));
  }
  for (const auto& b : g.all_oriented_edges()) {
    const auto r = g.reversal(b);
    CHECK(r.tail == b.head);
    CHECK(r.head == b.tail);
    CHECK(g.reversal(r).id == b.id);
    CHECK(r.is_reversed != b.is_reversed);
  }
}

TEST_CASE("sgn") {
  const OrientedEdge b{3, 7, 0, false};
  CHECK(sgn(3, b) == -1);
  CHECK(sgn(7, b) == 1);
  CHECK(sgn(5, b) == 0);

  const Graph g = build_torus(4, 2);
  for (const auto& e : g.all_oriented_edges()) {
    int total = 0;
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
      CHECK(sgn(x, e) == -sgn(x, g.reversal(e)));
      total += sgn(x, e);
    }
    CHECK(total == 0);
  }
}

TEST_CASE("laplacian") {
  const Graph path = Graph::from_edges(2, {{0, 1}});
  const Eigen::MatrixXd lp = laplacian(path);
  CHECK(lp(0, 0) == 1.0);
  CHECK(lp(0, 1) == -1.0);
  CHECK(lp(1, 0) == -1.0);
  CHECK(lp(1, 1) == 1.0);

  const Eigen::MatrixXd l4 = laplacian(build_cycle(4));
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(l4).eigenvalues();
  std::vector<double> expected;
  for (int k = 0; k < 4; ++k) expected.push_back(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / 4));
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < 4; ++k) CHECK(ev(k) == doctest::Approx(expected[k]).epsilon(1e-12));

  const Graph g = build_torus(5, 2);
  const Eigen::MatrixXd l = laplacian(g);
  CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd spec = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(l).eigenvalues();
  CHECK(std::fabs(spec(0)) < 1e-12);
  CHECK(spec(1) > 1e-6);  // kernel is exactly the constants
}

TEST_CASE("edge graph on the 2d torus") {
  const Graph g = build_torus(4, 2);
  const EdgeGraph eg = build_edge_graph(g);
  CHECK(eg.size() == 64);

  // Brute-force enumeration of the kite rule over all node pairs.
  for (const auto& b : eg.nodes) {
    std::set<int> brute;
    for (const auto& c : eg.nodes) {
      if (c.id == b.id || c.id == g.reversal(b).id) continue;
      if (gradient_inner_product(b, c, g.vertex_count()) < 0.0) brute.insert(c.id);
    }
    std::set<int> built;
    for (const auto& link : eg.kite_adjacency[b.id]) {
      built.insert(link.node);
      CHECK(link.weight == -1.0);
    }
    CHECK(built == brute);
    CHECK(built.size() == 6);
    CHECK(eg.compensation[b.id] == 4.0);
    CHECK(eg.diagonal[b.id] == 2.0);
  }

  // Symmetry of the kite relation.
  for (const auto& b : eg.nodes) {
    for (const auto& link : eg.kite_adjacency[b.id]) {
      const auto& back = eg.kite_adjacency[link.node];
      CHECK(std::any_of(back.begin(), back.end(), [&](const auto& l) { return l.node == b.id; }));
    }
  }
}

TEST_CASE("edge graph on a cycle") {
  const EdgeGraph eg = build_edge_graph(build_cycle(6));
  CHECK(eg.size() == 12);
  for (std::size_t b = 0; b < eg.size(); ++b) {
    CHECK(eg.kite_adjacency[b].size() == 2);
    CHECK(eg.compensation[b] == 0.0);
  }
}
