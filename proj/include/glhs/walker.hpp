#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glhs/dynamics.hpp"

namespace glhs {

struct WalkerState {
  Vertex position = 0;
  double time = 0.0;
};

struct JointTrajectory {
  std::vector<double> times;
  std::vector<Environment> env_snapshots;
  std::vector<Vertex> walker_positions;
  Vertex start_vertex = 0;
  std::uint64_t seed = 0;
};

// Advances the walker over [t, t + dt] with the environment frozen.
// Proposals arrive at rate R = d * c_plus; each picks one of d neighbor slots
// (slots beyond the degree are self-loops) and is accepted with probability
// V''(eta_position) / c_plus, giving rate V''(eta_position) per neighbor.
// Uses one Bernoulli(R dt) proposal when R dt <= 0.1, a Poisson count otherwise.
WalkerState step_walker(const WalkerState& w, std::span<const double> eta, const GibbsSpec& spec, double dt,
                        RngStream& rng);

inline WalkerState step_walker(const WalkerState& w, const Environment& env, const GibbsSpec& spec, double dt,
                               RngStream& rng) {
  return step_walker(w, env.masses, spec, dt, rng);
}

// Environment and walker advanced on one grid; the walker reads the pre-step
// environment. Environment noise and walker draws come from disjoint substreams.
JointTrajectory run_joint(const GibbsSpec& spec, const IntegratorConfig& cfg, const Environment& init, Vertex start,
                          std::uint64_t replica = 0);

// 1 iff the walker sits at y at observation time t.
int hitting_indicator(const JointTrajectory& traj, double t, Vertex y);

}  // namespace glhs
