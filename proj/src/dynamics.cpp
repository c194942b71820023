#include "glhs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glhs/error.hpp"

namespace glhs {
namespace {

constexpr double kGridTolerance = 1e-12;

double effective_c_plus(const GibbsSpec& spec) {
  double c = spec.site.c_plus();
  if (spec.pair) c += 2.0 * spec.graph->degree_bound() * spec.pair->c2_plus();
  return c;
}

}  // namespace

void IntegratorConfig::validate(const GibbsSpec& spec) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidParameter, "dt must be positive");
  if (!(t_end >= 0.0)) throw Error(ErrorKind::InvalidParameter, "t_end must be nonnegative");
  const double guard = 1.0 / (4.0 * spec.graph->degree_bound() * effective_c_plus(spec));
  if (dt > guard)
    throw Error(ErrorKind::InvalidParameter,
                "dt=" + std::to_string(dt) + " exceeds stability guard " + std::to_string(guard));
  if (!std::is_sorted(observation_times.begin(), observation_times.end()))
    throw Error(ErrorKind::InvalidParameter, "observation times must be sorted");
  for (double t : observation_times) {
    if (t < 0.0 || t > t_end + kGridTolerance)
      throw Error(ErrorKind::InvalidParameter, "observation time " + std::to_string(t) + " outside [0, t_end]");
    const double k = std::round(t / dt);
    if (std::fabs(k * dt - t) > kGridTolerance)
      throw Error(ErrorKind::InvalidParameter, "observation time " + std::to_string(t) + " is not a multiple of dt");
  }
}

std::vector<long> IntegratorConfig::observation_steps() const {
  std::vector<long> steps;
  steps.reserve(observation_times.size());
  for (double t : observation_times) steps.push_back(std::lround(t / dt));
  return steps;
}

long IntegratorConfig::total_steps() const { return std::lround(t_end / dt); }

IntegratorConfig make_integrator_config(double dt, std::vector<double> times, std::uint64_t seed) {
  times.push_back(0.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_end = times.back();
  cfg.observation_times = std::move(times);
  cfg.seed = seed;
  return cfg;
}

void potential_gradient(const GibbsSpec& spec, std::span<const double> eta, std::span<double> out) {
  spec.site.visit([&](const auto& fam) {
    for (std::size_t x = 0; x < eta.size(); ++x) out[x] = fam.grad(eta[x]);
  });
  if (spec.pair) {
    const Graph& g = *spec.graph;
    for (const auto& b : g.oriented_edges()) {
      // Each unordered edge appears twice in the ordered-pair sum.
      const double w = 2.0 * spec.pair->grad(eta[b.tail] + eta[b.head]);
      out[b.tail] += w;
      out[b.head] += w;
    }
  }
}

EdgeStepper::EdgeStepper(const GibbsSpec& spec) : spec_(&spec) {
  const Graph& g = *spec.graph;
  for (const auto& b : g.oriented_edges()) {
    tails_.push_back(b.tail);
    heads_.push_back(b.head);
  }
  grad_.resize(g.vertex_count());
  noise_.resize(g.edge_count());
}

void EdgeStepper::draw_noise(RngStream& rng, double dt) {
  const double scale = std::sqrt(dt);
  for (double& w : noise_) w = scale * rng.normal();
}

void EdgeStepper::step(std::span<double> eta, double dt, std::span<const double> noise, double time) {
  potential_gradient(*spec_, eta, grad_);
  double check = 0.0;
  for (double v : grad_) check += v;
  if (!std::isfinite(check))
    throw NumericalBlowup("non-finite drift at t=" + std::to_string(time), time, {eta.begin(), eta.end()});

  const std::size_t m = tails_.size();
  for (std::size_t e = 0; e < m; ++e) {
    const int x = tails_[e];
    const int y = heads_[e];
    const double flow = (grad_[x] - grad_[y]) * dt - std::numbers::sqrt2 * noise[e];
    eta[x] -= flow;
    eta[y] += flow;
  }
}

Environment euler_step(const Environment& env, const GibbsSpec& spec, double dt, std::span<const double> noise) {
  if (noise.size() != static_cast<std::size_t>(spec.graph->edge_count()))
    throw Error(ErrorKind::InvalidInput, "noise must have one entry per canonical oriented edge");
  Environment out = env;
  EdgeStepper stepper(spec);
  stepper.step(out.masses, dt, noise, env.time);
  out.time = env.time + dt;
  return out;
}

namespace {

void check_init(const GibbsSpec& spec, const Environment& init) {
  if (init.masses.size() != static_cast<std::size_t>(spec.graph->vertex_count()))
    throw Error(ErrorKind::InvalidInput, "initial environment length does not match the graph");
}

}  // namespace

std::vector<Environment> run_trajectory(const GibbsSpec& spec, const IntegratorConfig& cfg, const Environment& init,
                                        std::uint64_t replica) {
  check_init(spec, init);
  cfg.validate(spec);
  const auto obs = cfg.observation_steps();
  RngStream rng = RngPlan(cfg.seed).stream(replica, Substream::Environment);
  EdgeStepper stepper(spec);

  std::vector<Environment> out;
  out.reserve(obs.size());
  Environment cur = init;
  std::size_t next = 0;
  const long steps = cfg.total_steps();
  for (long k = 0;; ++k) {
    while (next < obs.size() && obs[next] == k) {
      out.push_back({cur.masses, k * cfg.dt});
      ++next;
    }
    if (k == steps) break;
    stepper.draw_noise(rng, cfg.dt);
    stepper.step(cur.masses, cfg.dt, stepper.noise(), k * cfg.dt);
  }
  return out;
}

std::vector<CoupledSnapshot> run_coupled(const GibbsSpec& spec, const IntegratorConfig& cfg, const CoupledPair& pair,
                                         std::uint64_t replica) {
  check_init(spec, pair.upper);
  check_init(spec, pair.lower);
  cfg.validate(spec);
  for (std::size_t x = 0; x < pair.upper.masses.size(); ++x) {
    if (pair.upper.masses[x] < pair.lower.masses[x])
      throw Error(ErrorKind::InvalidInput, "coupled pair is not ordered at t=0");
  }
  const auto obs = cfg.observation_steps();
  RngStream rng = RngPlan(cfg.seed).stream(replica, Substream::Environment);
  EdgeStepper stepper(spec);

  std::vector<CoupledSnapshot> out;
  out.reserve(obs.size());
  CoupledPair cur = pair;
  std::size_t next = 0;
  const long steps = cfg.total_steps();
  for (long k = 0;; ++k) {
    while (next < obs.size() && obs[next] == k) {
      cur.upper.time = cur.lower.time = k * cfg.dt;
      out.push_back({cur, phi(cur, *spec.graph)});
      ++next;
    }
    if (k == steps) break;
    stepper.draw_noise(rng, cfg.dt);
    stepper.step(cur.upper.masses, cfg.dt, stepper.noise(), k * cfg.dt);
    stepper.step(cur.lower.masses, cfg.dt, stepper.noise(), k * cfg.dt);
  }
  return out;
}

double phi(const CoupledPair& pair, const Graph& g) {
  const double base = 2.0 * g.degree_bound();
  double total = 0.0;
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    const double diff = pair.upper.masses[x] - pair.lower.masses[x];
    if (diff < 0.0) total += std::pow(base, -g.distance_to_origin(x)) * diff * diff;
  }
  return total;
}

Environment sample_product_environment(const GibbsSpec& spec, RngStream& rng) {
  Environment env;
  env.masses.resize(spec.graph->vertex_count());
  for (double& v : env.masses) v = sample_site(spec.site, rng);
  return env;
}

void relax_to_gibbs(const GibbsSpec& spec, std::span<double> eta, double duration, double dt, RngStream& rng) {
  std::vector<double> grad(eta.size());
  const long steps = std::lround(duration / dt);
  const double noise_scale = std::sqrt(2.0 * dt);
  for (long k = 0; k < steps; ++k) {
    potential_gradient(spec, eta, grad);
    for (std::size_t x = 0; x < eta.size(); ++x) eta[x] += -grad[x] * dt + noise_scale * rng.normal();
    if (!std::isfinite(eta[0]))
      throw NumericalBlowup("non-finite state during relaxation", k * dt, {eta.begin(), eta.end()});
  }
}

double total_mass(std::span<const double> eta) noexcept {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : eta) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace glhs
