#include "glhs/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "glhs/error.hpp"
#include "glhs/oracle.hpp"
#include "glhs/parallel.hpp"

namespace glhs {
namespace {

void require_replicas(long replicas) {
  if (replicas < kMinReplicas)
    throw Error(ErrorKind::InvalidParameter, "replicas=" + std::to_string(replicas) + " below the minimum of " +
                                                 std::to_string(kMinReplicas) + " for reliable stderr");
}

double range_mean(const std::function<double(long)>& a, long lo, long hi) {
  double s = 0.0;
  for (long i = lo; i < hi; ++i) s += a(i);
  return s / static_cast<double>(hi - lo);
}

void require_spread(double sigma, const std::string& claim) {
  if (!(sigma > 0.0))
    throw Error(ErrorKind::InsufficientSignal, claim + ": combined stderr is zero, verdict undefined");
}

}  // namespace

// ---- replica simulation -------------------------------------------------------

ReplicaSet::ReplicaSet(const GibbsSpec& spec, const IntegratorConfig& cfg, std::vector<Vertex> walker_starts,
                       long replicas, unsigned workers)
    : spec_(spec), times_(cfg.observation_times), starts_(std::move(walker_starts)), replicas_(replicas),
      n_(static_cast<std::size_t>(spec.graph->vertex_count())) {
  require_replicas(replicas);
  cfg.validate(spec);
  for (Vertex s : starts_) {
    if (s < 0 || s >= spec.graph->vertex_count()) throw Error(ErrorKind::InvalidInput, "walker start out of range");
  }
  const auto obs = cfg.observation_steps();
  const std::size_t n_times = times_.size();
  masses_.resize(static_cast<std::size_t>(replicas) * n_times * n_);
  positions_.resize(static_cast<std::size_t>(replicas) * n_times * starts_.size());

  const RngPlan plan(cfg.seed);
  const long steps = cfg.total_steps();
  parallel_for(static_cast<std::size_t>(replicas), workers, [&](std::size_t r) {
    RngStream init_rng = plan.stream(r, Substream::Init);
    Environment env = sample_product_environment(spec_, init_rng);
    RngStream env_rng = plan.stream(r, Substream::Environment);
    std::vector<RngStream> walk_rngs;
    std::vector<WalkerState> walkers;
    for (Vertex s : starts_) {
      walk_rngs.push_back(plan.stream(r, Substream::Walker, static_cast<std::uint64_t>(s)));
      walkers.push_back({s, 0.0});
    }
    EdgeStepper stepper(spec_);
    std::size_t next = 0;
    for (long k = 0;; ++k) {
      while (next < obs.size() && obs[next] == k) {
        const std::size_t slot = r * n_times + next;
        std::copy(env.masses.begin(), env.masses.end(), masses_.begin() + static_cast<std::ptrdiff_t>(slot * n_));
        for (std::size_t w = 0; w < walkers.size(); ++w) positions_[slot * starts_.size() + w] = walkers[w].position;
        ++next;
      }
      if (k == steps) break;
      for (std::size_t w = 0; w < walkers.size(); ++w)
        walkers[w] = step_walker(walkers[w], env.masses, spec_, cfg.dt, walk_rngs[w]);
      stepper.draw_noise(env_rng, cfg.dt);
      stepper.step(env.masses, cfg.dt, stepper.noise(), k * cfg.dt);
    }
  });
}

std::size_t ReplicaSet::time_index(double t) const {
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (std::fabs(times_[i] - t) <= 1e-12) return i;
  }
  throw Error(ErrorKind::Query, "t=" + std::to_string(t) + " is not an observation time of the replica set");
}

std::size_t ReplicaSet::start_index(Vertex x) const {
  const auto it = std::find(starts_.begin(), starts_.end(), x);
  if (it == starts_.end()) throw Error(ErrorKind::Query, "no walker started at vertex " + std::to_string(x));
  return static_cast<std::size_t>(it - starts_.begin());
}

// ---- statistics ---------------------------------------------------------------

double batch_means_stderr(long replicas, const std::function<double(long, long)>& statistic) {
  const long batches = static_cast<long>(std::floor(std::sqrt(static_cast<double>(replicas))));
  if (batches < 2) throw Error(ErrorKind::InvalidParameter, "batch means needs at least 4 replicas");
  const long size = replicas / batches;
  std::vector<double> values;
  values.reserve(batches);
  for (long b = 0; b < batches; ++b) {
    const long lo = b * size;
    const long hi = b + 1 == batches ? replicas : lo + size;
    values.push_back(statistic(lo, hi));
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

double sample_covariance(const std::function<double(long)>& a, const std::function<double(long)>& b, long lo,
                         long hi) {
  const double ma = range_mean(a, lo, hi);
  const double mb = range_mean(b, lo, hi);
  double s = 0.0;
  for (long i = lo; i < hi; ++i) s += (a(i) - ma) * (b(i) - mb);
  return s / static_cast<double>(hi - lo - 1);
}

Observable parse_observable(const std::string& tag) {
  if (tag == "mass") return Observable::Mass;
  if (tag == "vprime") return Observable::VPrime;
  throw Error(ErrorKind::InvalidInput, "unknown observable '" + tag + "'");
}

namespace {

struct Columns {
  std::function<double(long)> left;
  std::function<double(long)> right;
};

Columns cov_columns(const ReplicaSet& set, Vertex x, Vertex y, double t, Observable obs) {
  const std::size_t t0 = set.time_index(0.0);
  const std::size_t ti = set.time_index(t);
  const Potential& v = set.spec().site;
  Columns c;
  if (obs == Observable::Mass)
    c.left = [&set, t0, x](long r) { return set.mass(r, t0, x); };
  else
    c.left = [&set, t0, x, &v](long r) { return v.grad(set.mass(r, t0, x)); };
  c.right = [&set, ti, y](long r) { return set.mass(r, ti, y); };
  return c;
}

std::function<double(long)> hit_column(const ReplicaSet& set, Vertex x, Vertex y, double t) {
  const std::size_t ti = set.time_index(t);
  const std::size_t si = set.start_index(x);
  return [&set, ti, si, y](long r) { return set.walker(r, ti, si) == y ? 1.0 : 0.0; };
}

}  // namespace

Estimate estimate_cov(const ReplicaSet& set, Vertex x, Vertex y, double t, Observable obs) {
  const auto c = cov_columns(set, x, y, t, obs);
  Estimate e;
  e.quantity_tag = obs == Observable::Mass ? "cov_mass" : "cov_vprime";
  e.t = t;
  e.x = x;
  e.y = y;
  e.replicas = set.replicas();
  e.value = sample_covariance(c.left, c.right, 0, set.replicas());
  e.std_error = batch_means_stderr(set.replicas(),
                                   [&](long lo, long hi) { return sample_covariance(c.left, c.right, lo, hi); });
  return e;
}

Estimate estimate_walker_prob(const ReplicaSet& set, Vertex x, Vertex y, double t) {
  const auto hit = hit_column(set, x, y, t);
  Estimate e;
  e.quantity_tag = "walker_prob";
  e.t = t;
  e.x = x;
  e.y = y;
  e.replicas = set.replicas();
  e.value = range_mean(hit, 0, set.replicas());
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(set.replicas()));
  return e;
}

Estimate estimate_diagonal_cov(const ReplicaSet& set, double t) {
  const std::size_t t0 = set.time_index(0.0);
  const std::size_t ti = set.time_index(t);
  const Vertex n = set.spec().graph->vertex_count();
  auto stat = [&](long lo, long hi) {
    double s = 0.0;
    for (Vertex x = 0; x < n; ++x) {
      s += sample_covariance([&](long r) { return set.mass(r, t0, x); }, [&](long r) { return set.mass(r, ti, x); },
                             lo, hi);
    }
    return s / n;
  };
  Estimate e;
  e.quantity_tag = "cov_mass_diag";
  e.t = t;
  e.replicas = set.replicas();
  e.value = stat(0, set.replicas());
  e.std_error = batch_means_stderr(set.replicas(), stat);
  return e;
}

Estimate estimate_cov(const GibbsSpec& spec, const IntegratorConfig& cfg, Vertex x, Vertex y, double t,
                      long replicas, Observable obs) {
  const ReplicaSet set(spec, make_integrator_config(cfg.dt, {t}, cfg.seed), {}, replicas);
  return estimate_cov(set, x, y, t, obs);
}

Estimate estimate_walker_prob(const GibbsSpec& spec, const IntegratorConfig& cfg, Vertex x, Vertex y, double t,
                              long replicas) {
  const ReplicaSet set(spec, make_integrator_config(cfg.dt, {t}, cfg.seed), {x}, replicas);
  return estimate_walker_prob(set, x, y, t);
}

// ---- verdicts -------------------------------------------------------------------

namespace {

// Value and batch-means stderr of Cov(left, right) - k * mean(hit).
std::pair<double, double> shifted_difference(const Columns& c, const std::function<double(long)>& hit, double k,
                                             long replicas) {
  auto stat = [&](long lo, long hi) { return sample_covariance(c.left, c.right, lo, hi) - k * range_mean(hit, lo, hi); };
  return {stat(0, replicas), batch_means_stderr(replicas, stat)};
}

}  // namespace

Verdict theorem_sandwich(const ReplicaSet& set, Vertex x, Vertex y, double t) {
  const auto c = cov_columns(set, x, y, t, Observable::Mass);
  const auto hit = hit_column(set, x, y, t);
  const double cm = set.spec().site.c_minus();
  const double cp = set.spec().site.c_plus();
  const long n = set.replicas();

  Verdict v;
  v.claim_tag = "theorem-sandwich";
  v.inputs = {estimate_cov(set, x, y, t, Observable::Mass), estimate_walker_prob(set, x, y, t)};
  if (cm == cp) {
    const auto [d, s] = shifted_difference(c, hit, 1.0 / cm, n);
    require_spread(s, v.claim_tag);
    v.margin_in_sigmas = kSigmaBand - std::fabs(d) / s;
    v.note = "equality";
  } else {
    const auto [dl, sl] = shifted_difference(c, hit, 1.0 / cp, n);
    const auto [du, su] = shifted_difference(c, hit, 1.0 / cm, n);
    require_spread(sl, v.claim_tag);
    require_spread(su, v.claim_tag);
    v.margin_in_sigmas = std::min(dl / sl + kSigmaBand, kSigmaBand - du / su);
    v.note = "sandwich";
  }
  v.pass = v.margin_in_sigmas >= 0.0;
  return v;
}

Verdict lemma_equality_check(const ReplicaSet& set, Vertex x, Vertex y, double t) {
  const auto c = cov_columns(set, x, y, t, Observable::VPrime);
  const auto hit = hit_column(set, x, y, t);
  Verdict v;
  v.claim_tag = "lemma-equality";
  v.inputs = {estimate_cov(set, x, y, t, Observable::VPrime), estimate_walker_prob(set, x, y, t)};
  const auto [d, s] = shifted_difference(c, hit, 1.0, set.replicas());
  require_spread(s, v.claim_tag);
  v.margin_in_sigmas = kSigmaBand - std::fabs(d) / s;
  v.pass = v.margin_in_sigmas >= 0.0;
  return v;
}

// ---- functionals ------------------------------------------------------------------

double LipschitzSpec::evaluate(const std::function<double(Vertex)>& eta) const {
  double s = 0.0;
  for (std::size_t x = 0; x < coefficients.size(); ++x) {
    const double a = coefficients[x];
    if (a == 0.0) continue;
    const double v = eta(static_cast<Vertex>(x));
    s += a * (kind == Kind::Linear ? v : std::tanh(v));
  }
  return s;
}

double LipschitzSpec::norm() const {
  double s = 0.0;
  for (double a : coefficients) s += std::fabs(a);
  return s;
}

bool LipschitzSpec::increasing() const {
  return std::all_of(coefficients.begin(), coefficients.end(), [](double a) { return a >= 0.0; });
}

std::vector<Vertex> LipschitzSpec::support() const {
  std::vector<Vertex> out;
  for (std::size_t x = 0; x < coefficients.size(); ++x) {
    if (coefficients[x] != 0.0) out.push_back(static_cast<Vertex>(x));
  }
  return out;
}

namespace {

Columns functional_columns(const ReplicaSet& set, const LipschitzSpec& f, const LipschitzSpec& g, double t) {
  const auto n = static_cast<std::size_t>(set.spec().graph->vertex_count());
  if (f.coefficients.size() != n || g.coefficients.size() != n)
    throw Error(ErrorKind::InvalidInput, "functional coefficients must have one entry per vertex");
  const std::size_t t0 = set.time_index(0.0);
  const std::size_t ti = set.time_index(t);
  Columns c;
  c.left = [&set, &f, t0](long r) { return f.evaluate([&](Vertex x) { return set.mass(r, t0, x); }); };
  c.right = [&set, &g, ti](long r) { return g.evaluate([&](Vertex x) { return set.mass(r, ti, x); }); };
  return c;
}

}  // namespace

Estimate estimate_functional_cov(const ReplicaSet& set, const LipschitzSpec& f, const LipschitzSpec& g, double t) {
  const auto c = functional_columns(set, f, g, t);
  Estimate e;
  e.quantity_tag = "cov_functional";
  e.t = t;
  e.replicas = set.replicas();
  e.value = sample_covariance(c.left, c.right, 0, set.replicas());
  e.std_error = batch_means_stderr(set.replicas(),
                                   [&](long lo, long hi) { return sample_covariance(c.left, c.right, lo, hi); });
  return e;
}

Verdict fkg_check(const ReplicaSet& set, const LipschitzSpec& f, const LipschitzSpec& g, double t) {
  if (!f.increasing() || !g.increasing())
    throw Error(ErrorKind::InvalidInput, "FKG check needs increasing functionals (nonnegative coefficients)");
  Verdict v;
  v.claim_tag = "fkg";
  const Estimate e = estimate_functional_cov(set, f, g, t);
  v.inputs = {e};
  require_spread(e.std_error, v.claim_tag);
  v.margin_in_sigmas = e.value / e.std_error + kSigmaBand;
  v.pass = v.margin_in_sigmas >= 0.0;
  return v;
}

Verdict corollary_bound_check(const ReplicaSet& set, const LipschitzSpec& f, double t) {
  if (f.support().empty()) throw Error(ErrorKind::InvalidInput, "corollary check needs a functional with nonempty support");
  const Graph& g = *set.spec().graph;
  const auto c = functional_columns(set, f, f, t);
  std::vector<std::function<double(long)>> returns;
  for (Vertex x = 0; x < g.vertex_count(); ++x) returns.push_back(hit_column(set, x, x, t));
  const double scale = f.norm() * f.norm() / set.spec().site.c_minus();

  auto bound = [&](long lo, long hi) {
    double best = 0.0;
    for (const auto& col : returns) best = std::max(best, range_mean(col, lo, hi));
    return scale * best;
  };
  auto excess = [&](long lo, long hi) { return sample_covariance(c.left, c.right, lo, hi) - bound(lo, hi); };

  Verdict v;
  v.claim_tag = "corollary-bound";
  Estimate cov = estimate_functional_cov(set, f, f, t);
  Estimate b;
  b.quantity_tag = "corollary_bound";
  b.t = t;
  b.replicas = set.replicas();
  b.value = bound(0, set.replicas());
  b.std_error = batch_means_stderr(set.replicas(), bound);
  v.inputs = {cov, b};
  const double d = excess(0, set.replicas());
  const double s = batch_means_stderr(set.replicas(), excess);
  require_spread(s, v.claim_tag);
  v.margin_in_sigmas = kSigmaBand - d / s;
  v.pass = v.margin_in_sigmas >= 0.0;
  return v;
}

// ---- negative correlation ---------------------------------------------------------

NegativeCorrelationResult negative_correlation_check(const GibbsSpec& spec, const IntegratorConfig& cfg, Vertex x,
                                                     Vertex y, long replicas, unsigned workers) {
  if (!spec.pair) throw Error(ErrorKind::InvalidInput, "negative-correlation check needs a pair potential");
  if (spec.pair->c2_minus() <= 0.0) throw Error(ErrorKind::InvalidInput, "pair potential must be strictly convex");
  const Graph& g = *spec.graph;
  if (x < 0 || y < 0 || x >= g.vertex_count() || y >= g.vertex_count() || !g.adjacent(x, y))
    throw Error(ErrorKind::InvalidInput, "negative-correlation check needs neighboring vertices");
  require_replicas(replicas);

  // Lower curvature bound of H: c_minus on the diagonal plus the pair Hessian.
  Eigen::MatrixXd lower = quadratic_hessian(g, spec.pair->c2_minus());
  lower.diagonal().array() += spec.site.c_minus() - 1.0;
  const double gap = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(lower, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double burn_in = 20.0 / gap;

  const RngPlan plan(cfg.seed);
  std::vector<double> products(static_cast<std::size_t>(replicas));
  parallel_for(products.size(), workers, [&](std::size_t r) {
    RngStream init_rng = plan.stream(r, Substream::Init);
    Environment env = sample_product_environment(spec, init_rng);
    RngStream rng = plan.stream(r, Substream::Environment);
    relax_to_gibbs(spec, env.masses, burn_in, cfg.dt, rng);
    products[r] = env.masses[x] * env.masses[y];
  });

  auto col = [&](long r) { return products[static_cast<std::size_t>(r)]; };
  NegativeCorrelationResult out;
  out.burn_in = burn_in;
  out.moment.quantity_tag = "moment_xy";
  out.moment.x = x;
  out.moment.y = y;
  out.moment.replicas = replicas;
  out.moment.value = range_mean(col, 0, replicas);
  out.moment.std_error = batch_means_stderr(replicas, [&](long lo, long hi) { return range_mean(col, lo, hi); });

  Verdict& v = out.verdict;
  v.claim_tag = "negative-correlation";
  v.inputs = {out.moment};
  if (spec.site.family_tag() == "gaussian")
    v.oracle = gaussian_pair_covariance(g, spec.pair->stiffness)(x, y);
  require_spread(out.moment.std_error, v.claim_tag);
  v.margin_in_sigmas = -out.moment.value / out.moment.std_error - kSigmaBand;
  v.pass = v.margin_in_sigmas > 0.0;
  if (v.oracle) {
    const bool sign_agrees = (*v.oracle < 0.0) == (out.moment.value < 0.0);
    v.note = sign_agrees ? "oracle-sign-agrees" : "oracle-sign-disagrees";
    v.pass = v.pass && sign_agrees;
  }
  return out;
}

// ---- decay rates --------------------------------------------------------------------

DecayFit decay_rate_fit(const std::vector<std::pair<double, Estimate>>& series, double floor) {
  if (series.size() < 4) throw Error(ErrorKind::InsufficientSignal, "decay fit needs at least 4 time points");
  std::vector<double> ts, ls;
  for (const auto& [t, e] : series) {
    const double signal = e.value - floor;
    if (!(signal > 5.0 * e.std_error) || signal <= 0.0)
      throw Error(ErrorKind::InsufficientSignal, "estimate at t=" + std::to_string(t) + " is " +
                                                     std::to_string(signal) + " above the floor, stderr " +
                                                     std::to_string(e.std_error));
    ts.push_back(t);
    ls.push_back(std::log(signal));
  }
  const double n = static_cast<double>(ts.size());
  const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
  const double ml = std::accumulate(ls.begin(), ls.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - mt) * (ls[i] - ml);
    sxx += (ts[i] - mt) * (ts[i] - mt);
  }
  if (sxx <= 0.0) throw Error(ErrorKind::InsufficientSignal, "decay fit needs distinct time points");
  const double slope = sxy / sxx;
  return {-slope, ml - slope * mt, ts.size()};
}

}  // namespace glhs
