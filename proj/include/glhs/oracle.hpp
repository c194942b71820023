#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glhs/dynamics.hpp"
#include "glhs/graph.hpp"
#include "glhs/potential.hpp"

namespace glhs {

struct OracleMatrix {
  Eigen::MatrixXd entries;
  std::vector<std::string> labels;
};

// exp(-t A) for a symmetric generator A, from one dense eigendecomposition.
class SymmetricSemigroup {
 public:
  explicit SymmetricSemigroup(const Eigen::MatrixXd& generator);

  Eigen::MatrixXd at(double t) const;
  double entry(double t, int i, int j) const;
  const Eigen::VectorXd& eigenvalues() const noexcept { return values_; }

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

inline constexpr int kHeatKernelCap = 2048;
inline constexpr int kKiteCap = 4096;

// exp(-t Laplacian); rows are the laws of the rate-1-per-edge walk.
OracleMatrix heat_kernel(const Graph& g, double t);

// Cov(eta_x; P_t eta_y) under the unit Gaussian product measure.
double gaussian_covariance(const Graph& g, double t, Vertex x, Vertex y);

// Test functions for the intertwining identity, all of degree <= 2.
struct TestFunction {
  enum class Kind { Constant, Linear, Quadratic, Product };
  Kind kind = Kind::Linear;
  Vertex y = 0;
  Vertex z = 0;

  double value(std::span<const double> eta) const;
  double partial(std::span<const double> eta, Vertex x) const;
  double second_partial(Vertex a, Vertex b) const;
};

TestFunction::Kind parse_test_function_kind(const std::string& tag);

// Edge-indexed environment generator in the positive convention:
// L_e g = sum over canonical b of [ -d_b d_b g + d_b H d_b g ].
double environment_generator(const GibbsSpec& spec, const TestFunction& g, std::span<const double> eta);

// |d_x (L_e g)(eta) - (L G)(x, eta)| with G(z, eta) = d_z g(eta) and
// L = L_e + L_p, L_p G(x) = sum_{z~x} V''(eta_x) (G(x) - G(z)).
// Site potentials only.
double intertwining_check(const GibbsSpec& spec, const TestFunction& g, Vertex x, std::span<const double> eta);

struct IppResult {
  double lhs = 0.0;       // E[f L_e g]
  double rhs = 0.0;       // E[sum_{x~y} d_x f (d_x - d_y) g]
  double difference = 0.0;
  double std_error = 0.0;  // of the per-sample difference
  long samples = 0;
};

// Monte Carlo check of the integration-by-parts formula under the product
// measure with f = V'(eta_x).
IppResult integration_by_parts_check(const GibbsSpec& spec, const TestFunction& g, Vertex x, long samples,
                                     std::uint64_t seed);

struct KiteReport {
  int side = 0;
  int reference_edge = 0;
  double compensation = 0.0;
  bool compensation_uniform = false;
  std::vector<double> times;
  std::vector<double> values;  // c(t) = e^{kappa t} (p_t(b, b) - p_t(b, reverse b))
  std::vector<double> raw;     // p_t(b, b) - p_t(b, reverse b)
};

// Generator of the unit-rate simple random walk on the kite graph
// (positive convention: degree on the diagonal, -1 per kite neighbor).
Eigen::MatrixXd kite_generator(const EdgeGraph& eg);

KiteReport kite_proposition_check(int side, const std::vector<double>& t_grid);

struct SpectralReport {
  double lambda_env = 0.0;
  double lambda_walk = 0.0;
  std::string env_method;
  std::string walk_method;
};

// Smallest eigenvalue on the complement of the constants (connected graph).
double nontrivial_gap(const Eigen::MatrixXd& symmetric_generator);

// Gaussian branch: environment gap from the edge-dynamics Hessian, walk gap
// from the rate-V''-per-neighbor generator.
SpectralReport spectral_report(const Graph& g);

// Hessian of H for the Gaussian site potential plus a quadratic pair
// potential; its inverse is the equal-time covariance of the Gibbs measure.
Eigen::MatrixXd quadratic_hessian(const Graph& g, double pair_stiffness);
Eigen::MatrixXd gaussian_pair_covariance(const Graph& g, double pair_stiffness);

}  // namespace glhs
