#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "glhs/graph.hpp"
#include "glhs/rng.hpp"

namespace glhs {

// V(t) = t^2/2, V'' = 1.
struct GaussianFamily {
  double grad(double t) const noexcept { return t; }
  double curv(double) const noexcept { return 1.0; }
  double unnormalized(double t) const noexcept { return 0.5 * t * t; }
};

// V(t) = t^2/2 + eps * log cosh t, V'' = 1 + eps * sech^2 t in [1, 1 + eps].
struct SmoothedGaussianFamily {
  double epsilon = 0.0;

  double grad(double t) const noexcept { return t + epsilon * std::tanh(t); }
  double curv(double t) const noexcept {
    const double th = std::tanh(t);
    return 1.0 + epsilon * (1.0 - th * th);
  }
  double unnormalized(double t) const noexcept;
};

using PotentialFamily = std::variant<GaussianFamily, SmoothedGaussianFamily>;

// Single-site potential, normalized so that the integral of exp(-V) is 1.
// Immutable value type; copies share nothing mutable.
class Potential {
 public:
  double eval(double t) const noexcept {
    return std::visit([t](const auto& f) { return f.unnormalized(t); }, family_) + log_norm_;
  }
  double grad(double t) const noexcept {
    return std::visit([t](const auto& f) { return f.grad(t); }, family_);
  }
  double curv(double t) const noexcept {
    return std::visit([t](const auto& f) { return f.curv(t); }, family_);
  }

  double c_minus() const noexcept { return c_minus_; }
  double c_plus() const noexcept { return c_plus_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  double mode() const noexcept { return mode_; }
  const PotentialFamily& family() const noexcept { return family_; }

  // "gaussian" or "smoothed_gaussian"
  std::string family_tag() const;
  double epsilon() const noexcept;

  // Hot loops dispatch once on the family, then run monomorphic code.
  template <typename Fn>
  decltype(auto) visit(Fn&& fn) const {
    return std::visit(std::forward<Fn>(fn), family_);
  }

 private:
  friend Potential gaussian();
  friend Potential smoothed_gaussian(double epsilon);

  PotentialFamily family_;
  double c_minus_ = 1.0;
  double c_plus_ = 1.0;
  double mean_ = 0.0;
  double variance_ = 1.0;
  double mode_ = 0.0;
  double log_norm_ = 0.0;
};

Potential gaussian();
// Requires 0 <= epsilon <= 10.
Potential smoothed_gaussian(double epsilon);

// Exact draw from exp(-V) by rejection from the Gaussian envelope
// N(mode, 1/c_minus), valid because V'' >= c_minus.
double sample_site(const Potential& p, RngStream& rng);

// Quadratic pair potential W(s) = stiffness * s^2 / 2 on s = eta_x + eta_y.
struct PairPotential {
  double stiffness = 0.0;

  double eval(double s) const noexcept { return 0.5 * stiffness * s * s; }
  double grad(double s) const noexcept { return stiffness * s; }
  double curv(double) const noexcept { return stiffness; }
  double c2_minus() const noexcept { return stiffness; }
  double c2_plus() const noexcept { return stiffness; }
};

// H(eta) = sum_x V(eta_x) + sum_x sum_{y~x} W(eta_x + eta_y); the pair sum
// runs over ordered neighbor pairs, so each edge enters twice.
struct GibbsSpec {
  std::shared_ptr<const Graph> graph;
  Potential site;
  std::optional<PairPotential> pair;

  GibbsSpec(std::shared_ptr<const Graph> g, Potential v, std::optional<PairPotential> w = std::nullopt)
      : graph(std::move(g)), site(std::move(v)), pair(w) {}
};

struct OrderCondition {
  bool holds = false;
  double margin = 0.0;
};

// Sufficient condition for the coordinatewise order to be preserved by the
// shared-noise coupling:
//   min_x min_{y~x} [sum_{z~y} c2m] - c2p + c1m >= 0  and  c2m >= 0.
OrderCondition order_preservation_condition(double c1m, double c1p, double c2m, double c2p, const Graph& g);

}  // namespace glhs
