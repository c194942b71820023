#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "glhs/dynamics.hpp"
#include "glhs/walker.hpp"

namespace glhs {

inline constexpr long kMinReplicas = 100;
inline constexpr double kSigmaBand = 3.0;

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long replicas = 0;
  std::string quantity_tag;
  double t = 0.0;
  Vertex x = 0;
  Vertex y = 0;
};

struct Verdict {
  std::string claim_tag;
  bool pass = false;
  // Signed distance to the failure boundary in units of the combined stderr.
  double margin_in_sigmas = 0.0;
  std::vector<Estimate> inputs;
  std::optional<double> oracle;
  std::string note;
};

// Per-replica record of a stationary joint simulation: the environment at
// every observation time and one walker per requested start vertex. All
// walkers and the environment share the replica; walkers use disjoint substreams.
class ReplicaSet {
 public:
  ReplicaSet(const GibbsSpec& spec, const IntegratorConfig& cfg, std::vector<Vertex> walker_starts, long replicas,
             unsigned workers = 0);

  long replicas() const noexcept { return replicas_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<Vertex>& walker_starts() const noexcept { return starts_; }
  const GibbsSpec& spec() const noexcept { return spec_; }

  // Index of an observation time; Query error when absent.
  std::size_t time_index(double t) const;
  // Index of a walker start; Query error when absent.
  std::size_t start_index(Vertex x) const;

  double mass(long replica, std::size_t time_idx, Vertex x) const {
    return masses_[(static_cast<std::size_t>(replica) * times_.size() + time_idx) * n_ + x];
  }
  Vertex walker(long replica, std::size_t time_idx, std::size_t start_idx) const {
    return positions_[(static_cast<std::size_t>(replica) * times_.size() + time_idx) * starts_.size() + start_idx];
  }

 private:
  GibbsSpec spec_;
  std::vector<double> times_;
  std::vector<Vertex> starts_;
  long replicas_;
  std::size_t n_;
  std::vector<double> masses_;
  std::vector<Vertex> positions_;
};

// Batch-means standard error of a statistic evaluated on floor(sqrt(n))
// contiguous replica batches; the last batch absorbs the remainder.
double batch_means_stderr(long replicas, const std::function<double(long lo, long hi)>& statistic);

// Sample covariance (empirical means subtracted) of a[i], b[i] over [lo, hi).
double sample_covariance(const std::function<double(long)>& a, const std::function<double(long)>& b, long lo,
                         long hi);

enum class Observable { Mass, VPrime };
Observable parse_observable(const std::string& tag);

// Cov(observable(eta_x(0)); eta_y(t)) over the replica set.
Estimate estimate_cov(const ReplicaSet& set, Vertex x, Vertex y, double t, Observable obs);
// Mean of 1{X(t) = y} for the walker started at x; binomial stderr.
Estimate estimate_walker_prob(const ReplicaSet& set, Vertex x, Vertex y, double t);

// (1/n) sum_x Cov(eta_x(0); eta_x(t)): the diagonal averaged over vertices,
// which coincide on vertex-transitive graphs.
Estimate estimate_diagonal_cov(const ReplicaSet& set, double t);

// Convenience forms that simulate a fresh stationary replica set.
Estimate estimate_cov(const GibbsSpec& spec, const IntegratorConfig& cfg, Vertex x, Vertex y, double t,
                      long replicas, Observable obs);
Estimate estimate_walker_prob(const GibbsSpec& spec, const IntegratorConfig& cfg, Vertex x, Vertex y, double t,
                              long replicas);

// (1/c_plus) W - 3s <= Cov(eta_x; P_t eta_y) <= (1/c_minus) W + 3s on one
// replica set; the equality band |Cov - W| <= 3s when c_minus = c_plus.
Verdict theorem_sandwich(const ReplicaSet& set, Vertex x, Vertex y, double t);
// |Cov(V'(eta_x); P_t eta_y) - W| <= 3s.
Verdict lemma_equality_check(const ReplicaSet& set, Vertex x, Vertex y, double t);

// Coordinatewise-Lipschitz functional with finitely many nonzero coefficients.
struct LipschitzSpec {
  enum class Kind { Linear, Tanh };
  Kind kind = Kind::Linear;
  std::vector<double> coefficients;  // L_f(x) per vertex

  double evaluate(const std::function<double(Vertex)>& eta) const;
  double norm() const;  // sum_x L_f(x)
  bool increasing() const;
  std::vector<Vertex> support() const;
};

// Cov(f(eta(0)); g(eta(t))) with batch-means stderr.
Estimate estimate_functional_cov(const ReplicaSet& set, const LipschitzSpec& f, const LipschitzSpec& g, double t);

// Cov(f; P_t g) >= -3s for increasing f, g.
Verdict fkg_check(const ReplicaSet& set, const LipschitzSpec& f, const LipschitzSpec& g, double t);
// Cov(f; P_t f) <= (1/c_minus) ||f||^2 max_x W(x, x, t) + 3s; needs walkers from every vertex.
Verdict corollary_bound_check(const ReplicaSet& set, const LipschitzSpec& f, double t);

struct NegativeCorrelationResult {
  Verdict verdict;
  Estimate moment;  // E[eta_x eta_y]
  double burn_in = 0.0;
};

// Equal-time E[eta_x eta_y] for x ~ y under a spec with a pair potential,
// equilibrated for 20 / gap before each sample. The gap is the smallest
// Hessian eigenvalue of the quadratic reference (Gaussian site + pair).
NegativeCorrelationResult negative_correlation_check(const GibbsSpec& spec, const IntegratorConfig& cfg, Vertex x,
                                                     Vertex y, long replicas, unsigned workers = 0);

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

// Least-squares slope of log(estimate - floor) against t, sign flipped.
// Requires >= 4 points, each above 5 stderr after subtracting the floor.
DecayFit decay_rate_fit(const std::vector<std::pair<double, Estimate>>& series, double floor);

}  // namespace glhs
