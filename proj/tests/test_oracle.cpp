#include <doctest.h>

#include <cmath>
#include <numbers>

#include "glhs/error.hpp"
#include "glhs/oracle.hpp"

using namespace glhs;

namespace {

std::vector<double> random_eta(RngStream& rng, int n) {
  std::vector<double> eta(n);
  for (auto& e : eta) e = 2.0 * rng.normal();
  return eta;
}

// Test-side L G(x) = L_e d_x g + sum_{z~x} V''(eta_x)(d_x g - d_z g) for
// degree <= 2 test functions, with L_e in the positive convention.
double generator_of_gradient(const GibbsSpec& spec, const TestFunction& g, Vertex x, std::span<const double> eta) {
  const Graph& graph = *spec.graph;
  const auto& v = spec.site;
  double le = 0;
  for (const auto& b : graph.oriented_edges()) {
    // d_b = d_head - d_tail on functions of eta.
    const double second = g.second_partial(x, b.head) - g.second_partial(x, b.tail);
    const double d_b_dbg = second;  // d_b (d_x g) is constant for degree <= 2
    const double d_b_d_b = 0.0;     // third derivatives vanish
    const double d_b_h = v.grad(eta[b.head]) - v.grad(eta[b.tail]);
    le += -d_b_d_b + d_b_h * d_b_dbg;
  }
  double lp = 0;
  for (Vertex z : graph.neighbors(x)) lp += v.curv(eta[x]) * (g.partial(eta, x) - g.partial(eta, z));
  return le + lp;
}

}  // namespace

TEST_CASE("heat kernel basics") {
  const Graph path = Graph::from_edges(2, {{0, 1}});
  for (double t : {0.0, 0.3, 1.0, 2.5}) {
    const auto p = heat_kernel(path, t);
    CHECK(p.entries(0, 0) == doctest::Approx((1 + std::exp(-2 * t)) / 2).epsilon(1e-12));
  }
  const Graph g = build_cycle(9);
  const auto id = heat_kernel(g, 0.0).entries;
  CHECK((id - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-12);

  const auto a = heat_kernel(g, 0.4).entries, b = heat_kernel(g, 0.7).entries, ab = heat_kernel(g, 1.1).entries;
  CHECK((a * b - ab).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < 9; ++i) {
    CHECK(a.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.row(i).minCoeff() >= -1e-15);
  }
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-14);

  const double gap = 2 - 2 * std::cos(2 * std::numbers::pi / 9);
  const auto far = heat_kernel(g, 50.0 / gap).entries;
  CHECK((far.array() - 1.0 / 9).abs().maxCoeff() < 1e-10);

  CHECK(gaussian_covariance(g, 0.0, 3, 3) == doctest::Approx(1.0));
  CHECK(std::fabs(gaussian_covariance(g, 0.0, 3, 4)) < 1e-12);
  CHECK_THROWS_AS(heat_kernel(build_torus(46, 2), 1.0), Error);
}

TEST_CASE("test function parsing") {
  CHECK(parse_test_function_kind("linear") == TestFunction::Kind::Linear);
  CHECK(parse_test_function_kind("quadratic") == TestFunction::Kind::Quadratic);
  CHECK(parse_test_function_kind("product") == TestFunction::Kind::Product);
  CHECK(parse_test_function_kind("constant") == TestFunction::Kind::Constant);
  CHECK_THROWS_AS(parse_test_function_kind("cubic"), Error);
}

TEST_CASE("intertwining identity") {
  const auto graph = std::make_shared<const Graph>(build_cycle(6));
  RngStream rng(77);
  for (const Potential& v : {gaussian(), smoothed_gaussian(0.5)}) {
    const GibbsSpec spec(graph, v);
    for (int probe = 0; probe < 100; ++probe) {
      const auto eta = random_eta(rng, 6);
      const Vertex x = static_cast<Vertex>(rng.uniform_int(6));
      for (auto kind : {TestFunction::Kind::Linear, TestFunction::Kind::Quadratic, TestFunction::Kind::Product}) {
        TestFunction g{kind, static_cast<Vertex>(rng.uniform_int(6)), static_cast<Vertex>(rng.uniform_int(6))};
        CHECK(intertwining_check(spec, g, x, eta) <= 1e-8);
      }
    }
    const auto eta = random_eta(rng, 6);
    const TestFunction c{TestFunction::Kind::Constant, 0, 0};
    CHECK(environment_generator(spec, c, eta) == 0.0);
    CHECK(intertwining_check(spec, c, 2, eta) == 0.0);
  }
}

TEST_CASE("finite-difference cross-check of the intertwining") {
  const GibbsSpec spec(std::make_shared<const Graph>(build_cycle(6)), smoothed_gaussian(0.5));
  RngStream rng(5);
  const double h = 1e-5;
  for (int probe = 0; probe < 50; ++probe) {
    auto eta = random_eta(rng, 6);
    const Vertex x = static_cast<Vertex>(rng.uniform_int(6));
    const TestFunction g{probe % 2 ? TestFunction::Kind::Quadratic : TestFunction::Kind::Product,
                         static_cast<Vertex>(rng.uniform_int(6)), static_cast<Vertex>(rng.uniform_int(6))};
    const double base = eta[x];
    eta[x] = base + h;
    const double up = environment_generator(spec, g, eta);
    eta[x] = base - h;
    const double down = environment_generator(spec, g, eta);
    eta[x] = base;
    const double fd = (up - down) / (2 * h);
    const double rhs = generator_of_gradient(spec, g, x, eta);
    CHECK(std::fabs(fd - rhs) <= 1e-5 * (1 + std::fabs(rhs)));
  }
}

TEST_CASE("integration by parts under the product measure") {
  const GibbsSpec spec(std::make_shared<const Graph>(build_cycle(6)), smoothed_gaussian(0.5));
  for (auto kind : {TestFunction::Kind::Linear, TestFunction::Kind::Quadratic, TestFunction::Kind::Product}) {
    const auto r = integration_by_parts_check(spec, TestFunction{kind, 1, 2}, 1, 200000, 99);
    CHECK(r.samples == 200000);
    CHECK(std::fabs(r.difference) <= 3 * r.std_error + 1e-12);
  }
}

TEST_CASE("kite graph generator") {
  const EdgeGraph eg = build_edge_graph(build_torus(8, 2));
  const Eigen::MatrixXd k = kite_generator(eg);
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(k.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(k(0, 0) == 6.0);

  const KiteReport rep = kite_proposition_check(8, {0.0, 0.5, 1.0});
  CHECK(rep.compensation == 4.0);
  CHECK(rep.compensation_uniform);
  CHECK(rep.raw[0] == doctest::Approx(1.0));
  CHECK(rep.values[0] == doctest::Approx(1.0));
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    CHECK(rep.values[i] == doctest::Approx(std::exp(4 * rep.times[i]) * rep.raw[i]).epsilon(1e-12));
  CHECK_THROWS_AS(kite_proposition_check(6, {0.5}), Error);
  CHECK_THROWS_AS(kite_proposition_check(8, {1.5}), Error);
}

TEST_CASE("spectral gaps") {
  for (int n : {8, 16, 32}) {
    const auto rep = spectral_report(build_cycle(n));
    const double exact = 2 - 2 * std::cos(2 * std::numbers::pi / n);
    CHECK(std::fabs(rep.lambda_env - exact) <= 1e-12);
    CHECK(std::fabs(rep.lambda_walk - exact) <= 1e-12);
  }
  const auto big = spectral_report(build_cycle(64));
  CHECK(big.lambda_env * 64 * 64 == doctest::Approx(4 * std::numbers::pi * std::numbers::pi).epsilon(0.01));
}

TEST_CASE("pair covariance oracle") {
  const Graph g = build_cycle(8);
  const Eigen::MatrixXd a = quadratic_hessian(g, 0.5);
  CHECK(a(0, 0) == 3.0);
  CHECK(a(0, 1) == 1.0);
  CHECK(a(0, 2) == 0.0);
  const Eigen::MatrixXd c = gaussian_pair_covariance(g, 0.5);
  CHECK(c(0, 1) < 0.0);
  CHECK(((a * c) - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
  // First order in the stiffness: Cov(eta_0, eta_1) = -2k + O(k^2).
  const double c1 = gaussian_pair_covariance(g, 1e-4)(0, 1);
  const double c2 = gaussian_pair_covariance(g, 2e-4)(0, 1);
  CHECK(c2 / c1 == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(c1 == doctest::Approx(-2e-4).epsilon(1e-3));
}
