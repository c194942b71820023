#include "glhs/oracle.hpp"

#include <cmath>
#include <string>

#include "glhs/error.hpp"
#include "glhs/rng.hpp"

namespace glhs {

SymmetricSemigroup::SymmetricSemigroup(const Eigen::MatrixXd& generator) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(generator);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Internal, "eigendecomposition failed");
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Eigen::MatrixXd SymmetricSemigroup::at(double t) const {
  const Eigen::VectorXd decay = (-t * values_.array()).exp();
  Eigen::MatrixXd out = vectors_ * decay.asDiagonal() * vectors_.transpose();
  return 0.5 * (out + out.transpose());
}

double SymmetricSemigroup::entry(double t, int i, int j) const {
  const Eigen::VectorXd decay = (-t * values_.array()).exp();
  return (vectors_.row(i).transpose().array() * decay.array() * vectors_.row(j).transpose().array()).sum();
}

OracleMatrix heat_kernel(const Graph& g, double t) {
  if (g.vertex_count() > kHeatKernelCap)
    throw Error(ErrorKind::DimensionCap, "heat kernel limited to " + std::to_string(kHeatKernelCap) + " vertices");
  if (t < 0.0) throw Error(ErrorKind::InvalidParameter, "heat kernel time must be nonnegative");
  OracleMatrix out;
  out.entries = SymmetricSemigroup(laplacian(g)).at(t);
  out.labels.reserve(g.vertex_count());
  for (Vertex x = 0; x < g.vertex_count(); ++x) out.labels.push_back(std::to_string(x));
  return out;
}

double gaussian_covariance(const Graph& g, double t, Vertex x, Vertex y) {
  if (g.vertex_count() > kHeatKernelCap)
    throw Error(ErrorKind::DimensionCap, "heat kernel limited to " + std::to_string(kHeatKernelCap) + " vertices");
  return SymmetricSemigroup(laplacian(g)).entry(t, x, y);
}

// ---- intertwining ---------------------------------------------------------

TestFunction::Kind parse_test_function_kind(const std::string& tag) {
  if (tag == "constant") return TestFunction::Kind::Constant;
  if (tag == "linear") return TestFunction::Kind::Linear;
  if (tag == "quadratic") return TestFunction::Kind::Quadratic;
  if (tag == "product") return TestFunction::Kind::Product;
  throw Error(ErrorKind::InvalidInput, "unknown test-function tag '" + tag + "'");
}

double TestFunction::value(std::span<const double> eta) const {
  switch (kind) {
    case Kind::Constant: return 1.0;
    case Kind::Linear: return eta[y];
    case Kind::Quadratic: return eta[y] * eta[y];
    case Kind::Product: return eta[y] * eta[z];
  }
  return 0.0;
}

double TestFunction::partial(std::span<const double> eta, Vertex x) const {
  switch (kind) {
    case Kind::Constant: return 0.0;
    case Kind::Linear: return x == y ? 1.0 : 0.0;
    case Kind::Quadratic: return x == y ? 2.0 * eta[y] : 0.0;
    case Kind::Product: return (x == y ? eta[z] : 0.0) + (x == z ? eta[y] : 0.0);
  }
  return 0.0;
}

double TestFunction::second_partial(Vertex a, Vertex b) const {
  switch (kind) {
    case Kind::Constant:
    case Kind::Linear: return 0.0;
    case Kind::Quadratic: return a == y && b == y ? 2.0 : 0.0;
    case Kind::Product: return (a == y && b == z ? 1.0 : 0.0) + (a == z && b == y ? 1.0 : 0.0);
  }
  return 0.0;
}

namespace {

void require_site_only(const GibbsSpec& spec) {
  if (spec.pair) throw Error(ErrorKind::InvalidInput, "intertwining identity is implemented for site potentials only");
}

}  // namespace

double environment_generator(const GibbsSpec& spec, const TestFunction& g, std::span<const double> eta) {
  double total = 0.0;
  for (const auto& b : spec.graph->oriented_edges()) {
    const Vertex u = b.tail;
    const Vertex v = b.head;
    const double second = g.second_partial(u, u) - 2.0 * g.second_partial(u, v) + g.second_partial(v, v);
    const double drift = spec.site.grad(eta[u]) - spec.site.grad(eta[v]);
    const double first = g.partial(eta, u) - g.partial(eta, v);
    total += -second + drift * first;
  }
  return total;
}

double intertwining_check(const GibbsSpec& spec, const TestFunction& g, Vertex x, std::span<const double> eta) {
  require_site_only(spec);
  const Graph& graph = *spec.graph;

  // d_x of the edge sum, differentiated term by term. Third derivatives of g vanish.
  double lhs = 0.0;
  for (const auto& b : graph.oriented_edges()) {
    const Vertex u = b.tail;
    const Vertex v = b.head;
    const double d_drift = (x == u ? spec.site.curv(eta[u]) : 0.0) - (x == v ? spec.site.curv(eta[v]) : 0.0);
    const double first = g.partial(eta, u) - g.partial(eta, v);
    const double drift = spec.site.grad(eta[u]) - spec.site.grad(eta[v]);
    const double d_first = g.second_partial(x, u) - g.second_partial(x, v);
    lhs += d_drift * first + drift * d_first;
  }

  // L_e applied to the degree <= 1 function d_x g: only the drift term survives.
  double env_part = 0.0;
  for (const auto& b : graph.oriented_edges()) {
    const double drift = spec.site.grad(eta[b.tail]) - spec.site.grad(eta[b.head]);
    env_part += drift * (g.second_partial(x, b.tail) - g.second_partial(x, b.head));
  }
  double walk_part = 0.0;
  const double rate = spec.site.curv(eta[x]);
  for (Vertex z : graph.neighbors(x)) walk_part += rate * (g.partial(eta, x) - g.partial(eta, z));

  return std::fabs(lhs - (env_part + walk_part));
}

IppResult integration_by_parts_check(const GibbsSpec& spec, const TestFunction& g, Vertex x, long samples,
                                     std::uint64_t seed) {
  require_site_only(spec);
  if (samples < 2) throw Error(ErrorKind::InvalidParameter, "need at least two samples");
  const Graph& graph = *spec.graph;
  const RngPlan plan(seed);

  double sum_l = 0.0, sum_r = 0.0, sum_d = 0.0, sum_d2 = 0.0;
  for (long s = 0; s < samples; ++s) {
    RngStream rng = plan.stream(static_cast<std::uint64_t>(s), Substream::Sampler);
    const Environment env = sample_product_environment(spec, rng);
    const std::span<const double> eta = env.masses;
    const double f = spec.site.grad(eta[x]);
    const double left = f * environment_generator(spec, g, eta);
    // Only d_x f is nonzero: sum over ordered pairs (x, y), y ~ x.
    double right = 0.0;
    const double df = spec.site.curv(eta[x]);
    for (Vertex y : graph.neighbors(x)) right += df * (g.partial(eta, x) - g.partial(eta, y));
    const double d = left - right;
    sum_l += left;
    sum_r += right;
    sum_d += d;
    sum_d2 += d * d;
  }
  const double n = static_cast<double>(samples);
  IppResult out;
  out.samples = samples;
  out.lhs = sum_l / n;
  out.rhs = sum_r / n;
  out.difference = sum_d / n;
  const double var = std::max(0.0, (sum_d2 - n * out.difference * out.difference) / (n - 1.0));
  out.std_error = std::sqrt(var / n);
  return out;
}

// ---- kite graph -----------------------------------------------------------

Eigen::MatrixXd kite_generator(const EdgeGraph& eg) {
  const auto n = static_cast<Eigen::Index>(eg.size());
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t b = 0; b < eg.size(); ++b) {
    for (const auto& link : eg.kite_adjacency[b]) {
      gen(b, link.node) -= 1.0;
      gen(b, b) += 1.0;
    }
  }
  return gen;
}

KiteReport kite_proposition_check(int side, const std::vector<double>& t_grid) {
  if (side < 8) throw Error(ErrorKind::InvalidParameter, "kite check needs side >= 8");
  for (double t : t_grid) {
    if (t < 0.0 || t > side / 8.0)
      throw Error(ErrorKind::InvalidParameter, "t=" + std::to_string(t) + " outside the wraparound window [0, side/8]");
  }
  const Graph g = build_torus(side, 2);
  if (2 * g.edge_count() > kKiteCap)
    throw Error(ErrorKind::DimensionCap, "kite graph limited to " + std::to_string(kKiteCap) + " nodes");
  const EdgeGraph eg = build_edge_graph(g);

  KiteReport report;
  report.side = side;
  report.reference_edge = 0;
  report.compensation = eg.compensation[0];
  report.compensation_uniform = true;
  for (double k : eg.compensation) report.compensation_uniform &= (k == report.compensation);

  const int b = report.reference_edge;
  const int rev = g.reversal(eg.nodes[b]).id;
  const SymmetricSemigroup semigroup(kite_generator(eg));
  for (double t : t_grid) {
    const double diff = semigroup.entry(t, b, b) - semigroup.entry(t, b, rev);
    report.times.push_back(t);
    report.raw.push_back(diff);
    report.values.push_back(std::exp(report.compensation * t) * diff);
  }
  return report;
}

// ---- spectral gaps ------------------------------------------------------------

double nontrivial_gap(const Eigen::MatrixXd& generator) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(generator, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Internal, "eigendecomposition failed");
  if (solver.eigenvalues().size() < 2) throw Error(ErrorKind::InvalidInput, "gap needs at least two states");
  // Connected graph: the kernel is exactly the constants, so skip one eigenvalue.
  return solver.eigenvalues()(1);
}

SpectralReport spectral_report(const Graph& g) {
  if (g.vertex_count() > kHeatKernelCap) throw Error(ErrorKind::DimensionCap, "spectral report dimension cap");
  const GibbsSpec spec(std::make_shared<const Graph>(g), gaussian());
  const int n = g.vertex_count();

  // Environment side: L_e maps linear functions to linear functions; read its
  // matrix off the generator applied to eta_y at the unit environments.
  Eigen::MatrixXd env = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> eta(n, 0.0);
  for (Vertex y = 0; y < n; ++y) {
    const TestFunction f{TestFunction::Kind::Linear, y, y};
    for (Vertex x = 0; x < n; ++x) {
      eta.assign(n, 0.0);
      eta[x] = 1.0;
      env(y, x) = environment_generator(spec, f, eta);
    }
  }

  // Walk side: rate V''(eta_x) to each neighbor, V'' = 1 in the Gaussian case.
  Eigen::MatrixXd walk = Eigen::MatrixXd::Zero(n, n);
  for (Vertex x = 0; x < n; ++x) {
    for (Vertex z : g.neighbors(x)) {
      const double rate = spec.site.curv(0.0);
      walk(x, z) -= rate;
      walk(x, x) += rate;
    }
  }

  SpectralReport report;
  report.lambda_env = nontrivial_gap(env);
  report.lambda_walk = nontrivial_gap(walk);
  report.env_method = "dense-eigen:linear-sector-of-L_e";
  report.walk_method = "dense-eigen:walk-generator";
  return report;
}

Eigen::MatrixXd quadratic_hessian(const Graph& g, double pair_stiffness) {
  const int n = g.vertex_count();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  // Each edge carries 2 W(eta_x + eta_y) in H.
  for (const auto& b : g.oriented_edges()) {
    const double k = 2.0 * pair_stiffness;
    h(b.tail, b.tail) += k;
    h(b.head, b.head) += k;
    h(b.tail, b.head) += k;
    h(b.head, b.tail) += k;
  }
  return h;
}

Eigen::MatrixXd gaussian_pair_covariance(const Graph& g, double pair_stiffness) {
  return quadratic_hessian(g, pair_stiffness).inverse();
}

}  // namespace glhs
