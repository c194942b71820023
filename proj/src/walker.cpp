#include "glhs/walker.hpp"

#include <cmath>
#include <string>

#include "glhs/error.hpp"

namespace glhs {
namespace {

constexpr double kBernoulliThreshold = 0.1;

Vertex propose(Vertex pos, std::span<const double> eta, const Graph& g, const Potential& v, RngStream& rng) {
  const int d = g.degree_bound();
  const auto slot = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(d)));
  const auto& nb = g.neighbors(pos);
  if (slot >= static_cast<int>(nb.size())) return pos;
  const double rate = v.curv(eta[pos]);
  if (rate > v.c_plus() * (1.0 + 1e-12))
    throw Error(ErrorKind::Internal, "V'' = " + std::to_string(rate) + " exceeds declared c_plus");
  return rng.uniform() * v.c_plus() < rate ? nb[slot] : pos;
}

}  // namespace

WalkerState step_walker(const WalkerState& w, std::span<const double> eta, const GibbsSpec& spec, double dt,
                        RngStream& rng) {
  WalkerState out{w.position, w.time + dt};
  if (dt <= 0.0) return out;
  const Graph& g = *spec.graph;
  const double mean = g.degree_bound() * spec.site.c_plus() * dt;
  if (mean <= kBernoulliThreshold) {
    if (rng.bernoulli(mean)) out.position = propose(out.position, eta, g, spec.site, rng);
  } else {
    const std::uint32_t events = rng.poisson(mean);
    for (std::uint32_t i = 0; i < events; ++i) out.position = propose(out.position, eta, g, spec.site, rng);
  }
  return out;
}

JointTrajectory run_joint(const GibbsSpec& spec, const IntegratorConfig& cfg, const Environment& init, Vertex start,
                          std::uint64_t replica) {
  if (init.masses.size() != static_cast<std::size_t>(spec.graph->vertex_count()))
    throw Error(ErrorKind::InvalidInput, "initial environment length does not match the graph");
  if (start < 0 || start >= spec.graph->vertex_count()) throw Error(ErrorKind::InvalidInput, "start vertex out of range");
  cfg.validate(spec);

  const RngPlan plan(cfg.seed);
  RngStream env_rng = plan.stream(replica, Substream::Environment);
  RngStream walk_rng = plan.stream(replica, Substream::Walker, static_cast<std::uint64_t>(start));
  EdgeStepper stepper(spec);

  JointTrajectory traj;
  traj.start_vertex = start;
  traj.seed = cfg.seed;
  const auto obs = cfg.observation_steps();
  Environment env = init;
  WalkerState walker{start, 0.0};
  std::size_t next = 0;
  const long steps = cfg.total_steps();
  for (long k = 0;; ++k) {
    while (next < obs.size() && obs[next] == k) {
      traj.times.push_back(cfg.observation_times[next]);
      traj.env_snapshots.push_back({env.masses, k * cfg.dt});
      traj.walker_positions.push_back(walker.position);
      ++next;
    }
    if (k == steps) break;
    walker = step_walker(walker, env.masses, spec, cfg.dt, walk_rng);
    stepper.draw_noise(env_rng, cfg.dt);
    stepper.step(env.masses, cfg.dt, stepper.noise(), k * cfg.dt);
  }
  return traj;
}

int hitting_indicator(const JointTrajectory& traj, double t, Vertex y) {
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (std::fabs(traj.times[i] - t) <= 1e-12) return traj.walker_positions[i] == y ? 1 : 0;
  }
  throw Error(ErrorKind::Query, "t=" + std::to_string(t) + " is not an observation time");
}

}  // namespace glhs
