#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glhs/potential.hpp"
#include "glhs/rng.hpp"

namespace glhs {

struct Environment {
  std::vector<double> masses;
  double time = 0.0;
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 0.0;
  std::vector<double> observation_times;  // sorted, within [0, t_end], multiples of dt
  std::uint64_t seed = 42;

  // Throws InvalidParameter on a bad grid or when dt exceeds 1/(4 d c_plus).
  void validate(const GibbsSpec& spec) const;
  // Step index of every observation time.
  std::vector<long> observation_steps() const;
  long total_steps() const;
};

// Observation grid {0} + times, t_end = max(times).
IntegratorConfig make_integrator_config(double dt, std::vector<double> times, std::uint64_t seed);

struct CoupledPair {
  Environment upper;
  Environment lower;
};

struct CoupledSnapshot {
  CoupledPair pair;
  double phi = 0.0;
};

// dH/d eta_x for every vertex.
void potential_gradient(const GibbsSpec& spec, std::span<const double> eta, std::span<double> out);

// Reusable workspace for repeated stepping of one trajectory.
class EdgeStepper {
 public:
  explicit EdgeStepper(const GibbsSpec& spec);

  // One Euler-Maruyama step of the conservative edge dynamics. noise[b] is an
  // N(0, dt) increment per canonical oriented edge b = (x, y); the edge moves
  // (d_b H dt - sqrt(2) noise_b) from x to y.
  void step(std::span<double> eta, double dt, std::span<const double> noise, double time);

  // Fills noise with N(0, dt) draws, one per canonical oriented edge.
  void draw_noise(RngStream& rng, double dt);
  std::span<const double> noise() const noexcept { return noise_; }

  const GibbsSpec& spec() const noexcept { return *spec_; }

 private:
  const GibbsSpec* spec_;
  std::vector<int> tails_;
  std::vector<int> heads_;
  std::vector<double> grad_;
  std::vector<double> noise_;
};

Environment euler_step(const Environment& env, const GibbsSpec& spec, double dt, std::span<const double> noise);

// Snapshots at cfg.observation_times; noise from the Environment substream of
// the given replica.
std::vector<Environment> run_trajectory(const GibbsSpec& spec, const IntegratorConfig& cfg, const Environment& init,
                                        std::uint64_t replica = 0);

// Both environments consume the identical noise array at every step.
std::vector<CoupledSnapshot> run_coupled(const GibbsSpec& spec, const IntegratorConfig& cfg, const CoupledPair& pair,
                                         std::uint64_t replica = 0);

// sum_x (2d)^{-|x|} phi_x^2 1{phi_x < 0} with phi = upper - lower.
double phi(const CoupledPair& pair, const Graph& g);

// Product-measure draw, the stationary law when no pair potential is present.
Environment sample_product_environment(const GibbsSpec& spec, RngStream& rng);

// Non-conservative overdamped Langevin d eta_x = -d_x H dt + sqrt(2) dW_x,
// reversible for the Gibbs measure including pair terms. Used to equilibrate
// before sampling equal-time correlations.
void relax_to_gibbs(const GibbsSpec& spec, std::span<double> eta, double duration, double dt, RngStream& rng);

// Total mass with compensated summation.
double total_mass(std::span<const double> eta) noexcept;

}  // namespace glhs
