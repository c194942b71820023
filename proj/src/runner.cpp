#include "glhs/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "glhs/error.hpp"
#include "glhs/oracle.hpp"

namespace glhs {
namespace {

using nlohmann::json;

constexpr long kOrderReplicaCap = 1000;
constexpr long kNegcorrReplicaCap = 10000;
constexpr double kKiteTolerance = 1e-3;
constexpr double kKiteTarget = 0.5;
constexpr double kKiteCompensation = 4.0;
constexpr double kGapExactTolerance = 1e-12;
constexpr double kGapScalingTolerance = 0.05;
constexpr double kDecayTolerance = 0.10;
constexpr double kOrderPhiTolerance = 1e-4;
constexpr double kOrderSlackInSteps = 10.0;
constexpr double kOrderObservationSpacing = 0.01;

std::uint64_t experiment_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) h = (h ^ c) * 1099511628211ULL;
  return splitmix64(seed ^ h);
}

struct Context {
  const ExperimentConfig& cfg;
  std::shared_ptr<const Graph> graph;
  GibbsSpec spec;
  RunResult& out;

  bool gaussian_site() const { return spec.site.family_tag() == "gaussian"; }

  ResultRow row(const std::string& experiment, const std::string& quantity) const {
    ResultRow r;
    r.experiment = experiment;
    r.graph = cfg.graph.kind;
    r.side = cfg.graph.side;
    r.dim = cfg.graph.dim;
    r.potential = cfg.potential.family;
    r.epsilon = spec.site.epsilon();
    r.quantity = quantity;
    r.seed = cfg.seed;
    return r;
  }

  std::size_t push(ResultRow r) {
    out.rows.push_back(std::move(r));
    return out.rows.size() - 1;
  }

  std::size_t push_estimate(const std::string& experiment, const Estimate& e, std::optional<double> oracle,
                            bool with_xy = true) {
    ResultRow r = row(experiment, e.quantity_tag);
    r.t = e.t;
    if (with_xy) {
      r.x = e.x;
      r.y = e.y;
    }
    r.value = e.value;
    r.std_error = e.std_error;
    r.replicas = e.replicas;
    r.oracle = oracle;
    return push(std::move(r));
  }

  void push_verdict(const std::string& experiment, const Verdict& v, std::optional<double> t, std::optional<int> x,
                    std::optional<int> y, std::vector<std::size_t> input_rows, ResultRow base) {
    base.quantity = v.note.empty() ? v.claim_tag : v.claim_tag + ":" + v.note;
    base.t = t;
    base.x = x;
    base.y = y;
    base.verdict = v.pass;
    base.margin_sigmas = v.margin_in_sigmas;
    base.oracle = v.oracle;
    const std::size_t idx = push(std::move(base));
    out.verdicts.push_back({experiment, v, t, x, y, idx, std::move(input_rows)});
  }

  void push_verdict(const std::string& experiment, const Verdict& v, std::optional<double> t, std::optional<int> x,
                    std::optional<int> y, std::vector<std::size_t> input_rows) {
    push_verdict(experiment, v, t, x, y, std::move(input_rows), row(experiment, ""));
  }
};

std::vector<Vertex> all_vertices(const Graph& g) {
  std::vector<Vertex> v(g.vertex_count());
  for (Vertex x = 0; x < g.vertex_count(); ++x) v[x] = x;
  return v;
}

ReplicaSet joint_set(const Context& ctx, const std::string& experiment, std::vector<Vertex> starts) {
  const auto icfg = make_integrator_config(ctx.cfg.dt, ctx.cfg.t_list, experiment_seed(ctx.cfg.seed, experiment));
  return ReplicaSet(ctx.spec, icfg, std::move(starts), ctx.cfg.replicas, ctx.cfg.workers);
}

std::optional<double> heat_entry(const Context& ctx, double t, Vertex x, Vertex y) {
  if (!ctx.gaussian_site()) return std::nullopt;
  return gaussian_covariance(*ctx.graph, t, x, y);
}

void run_theorem(Context& ctx, const ReplicaSet& set) {
  const std::string name = "theorem";
  const Vertex x = ctx.cfg.x, y = ctx.cfg.y;
  auto one = [&](double t, Vertex a, Vertex b) {
    const Verdict v = theorem_sandwich(set, a, b, t);
    const auto oracle = heat_entry(ctx, t, a, b);
    const std::size_t r0 = ctx.push_estimate(name, v.inputs[0], oracle);
    const std::size_t r1 = ctx.push_estimate(name, v.inputs[1], oracle);
    ctx.push_verdict(name, v, t, a, b, {r0, r1});
  };
  for (double t : ctx.cfg.t_list) one(t, x, y);
  // At t = 0 the walker term is exactly 1 and the sandwich bounds the variance.
  one(0.0, x, x);
}

void run_lemma(Context& ctx, const ReplicaSet& set) {
  const std::string name = "lemma-equality";
  for (double t : ctx.cfg.t_list) {
    const Verdict v = lemma_equality_check(set, ctx.cfg.x, ctx.cfg.y, t);
    const auto oracle = heat_entry(ctx, t, ctx.cfg.x, ctx.cfg.y);
    const std::size_t r0 = ctx.push_estimate(name, v.inputs[0], oracle);
    const std::size_t r1 = ctx.push_estimate(name, v.inputs[1], oracle);
    ctx.push_verdict(name, v, t, ctx.cfg.x, ctx.cfg.y, {r0, r1});
  }
}

std::vector<std::pair<LipschitzSpec, LipschitzSpec>> random_increasing_pairs(const Graph& g, int count,
                                                                             std::uint64_t seed) {
  const RngPlan plan(seed);
  std::vector<std::pair<LipschitzSpec, LipschitzSpec>> out;
  for (int k = 0; k < count; ++k) {
    RngStream rng = plan.stream(static_cast<std::uint64_t>(k), Substream::Sampler);
    auto draw = [&] {
      LipschitzSpec f;
      f.coefficients.assign(g.vertex_count(), 0.0);
      for (double& a : f.coefficients) {
        if (rng.bernoulli(0.5)) a = rng.uniform();
      }
      if (f.support().empty()) f.coefficients[rng.uniform_int(static_cast<std::uint32_t>(g.vertex_count()))] = 1.0;
      return f;
    };
    LipschitzSpec f = draw();
    LipschitzSpec h = draw();
    out.emplace_back(std::move(f), std::move(h));
  }
  return out;
}

std::optional<double> functional_oracle(const Context& ctx, const LipschitzSpec& f, const LipschitzSpec& g, double t) {
  if (!ctx.gaussian_site() || f.kind != LipschitzSpec::Kind::Linear || g.kind != LipschitzSpec::Kind::Linear)
    return std::nullopt;
  const Eigen::MatrixXd p = heat_kernel(*ctx.graph, t).entries;
  const Eigen::Map<const Eigen::VectorXd> a(f.coefficients.data(), static_cast<Eigen::Index>(f.coefficients.size()));
  const Eigen::Map<const Eigen::VectorXd> b(g.coefficients.data(), static_cast<Eigen::Index>(g.coefficients.size()));
  return a.dot(p * b);
}

void run_fkg(Context& ctx, const ReplicaSet& set) {
  const std::string name = "fkg";
  const auto pairs = random_increasing_pairs(*ctx.graph, ctx.cfg.fkg_functionals, experiment_seed(ctx.cfg.seed, "fkg-functionals"));
  for (double t : ctx.cfg.t_list) {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [f, g] = pairs[k];
      Verdict v = fkg_check(set, f, g, t);
      v.note = "pair" + std::to_string(k);
      const std::size_t r0 = ctx.push_estimate(name, v.inputs[0], functional_oracle(ctx, f, g, t), false);
      ctx.push_verdict(name, v, t, std::nullopt, std::nullopt, {r0});
    }
  }
}

void run_corollary(Context& ctx, const ReplicaSet& set) {
  const std::string name = "corollary";
  LipschitzSpec f;
  f.coefficients.assign(ctx.graph->vertex_count(), 0.0);
  f.coefficients[ctx.cfg.x] = 1.0;
  f.coefficients[ctx.cfg.y] = 1.0;
  for (double t : ctx.cfg.t_list) {
    const Verdict v = corollary_bound_check(set, f, t);
    const std::size_t r0 = ctx.push_estimate(name, v.inputs[0], functional_oracle(ctx, f, f, t), false);
    const std::size_t r1 = ctx.push_estimate(name, v.inputs[1], std::nullopt, false);
    ctx.push_verdict(name, v, t, ctx.cfg.x, ctx.cfg.y, {r0, r1});
  }
}

void run_order(Context& ctx) {
  const std::string name = "order";
  const double t_max = *std::max_element(ctx.cfg.t_list.begin(), ctx.cfg.t_list.end());
  std::vector<double> times;
  const long stride = std::max(1L, std::lround(kOrderObservationSpacing / ctx.cfg.dt));
  for (long k = stride; k * ctx.cfg.dt <= t_max + 1e-12; k += stride) times.push_back(k * ctx.cfg.dt);
  times.push_back(t_max);
  const auto icfg = make_integrator_config(ctx.cfg.dt, times, experiment_seed(ctx.cfg.seed, name));
  const long replicas = std::min(ctx.cfg.replicas, kOrderReplicaCap);

  const OrderCondition cond =
      order_preservation_condition(ctx.spec.site.c_minus(), ctx.spec.site.c_plus(), 0.0, 0.0, *ctx.graph);
  ResultRow cr = ctx.row(name, "order_condition_margin");
  cr.value = cond.margin;
  ctx.push(std::move(cr));

  const RngPlan plan(icfg.seed);
  double min_phi = std::numeric_limits<double>::infinity();
  double max_Phi = 0.0;
  for (long r = 0; r < replicas; ++r) {
    RngStream init_rng = plan.stream(static_cast<std::uint64_t>(r), Substream::Init);
    CoupledPair pair;
    pair.lower = sample_product_environment(ctx.spec, init_rng);
    pair.upper = pair.lower;
    for (double& v : pair.upper.masses) v += 1.0;
    for (const auto& snap : run_coupled(ctx.spec, icfg, pair, static_cast<std::uint64_t>(r))) {
      for (std::size_t x = 0; x < snap.pair.upper.masses.size(); ++x)
        min_phi = std::min(min_phi, snap.pair.upper.masses[x] - snap.pair.lower.masses[x]);
      max_Phi = std::max(max_Phi, snap.phi);
    }
  }
  const double slack = kOrderSlackInSteps * ctx.cfg.dt;
  ResultRow a = ctx.row(name, "min_phi");
  a.t = t_max;
  a.value = min_phi;
  a.replicas = replicas;
  const std::size_t ra = ctx.push(std::move(a));
  ResultRow b = ctx.row(name, "max_Phi");
  b.t = t_max;
  b.value = max_Phi;
  b.replicas = replicas;
  const std::size_t rb = ctx.push(std::move(b));

  Verdict v;
  v.claim_tag = "order-preservation";
  v.note = "tolerance-units";
  // Margin in units of the deterministic tolerances rather than sigmas.
  v.margin_in_sigmas = std::min((min_phi + slack) / slack, (kOrderPhiTolerance - max_Phi) / kOrderPhiTolerance);
  v.pass = min_phi >= -slack && max_Phi <= kOrderPhiTolerance && cond.holds;
  ctx.push_verdict(name, v, t_max, std::nullopt, std::nullopt, {ra, rb});
}

void run_negcorr(Context& ctx) {
  const std::string name = "negcorr";
  const GibbsSpec spec(ctx.graph, ctx.spec.site, PairPotential{ctx.cfg.pair_stiffness});
  Vertex x = ctx.cfg.x;
  Vertex y = ctx.cfg.y;
  if (!ctx.graph->adjacent(x, y)) y = ctx.graph->neighbors(x).front();
  IntegratorConfig icfg;
  icfg.dt = ctx.cfg.dt;
  icfg.seed = experiment_seed(ctx.cfg.seed, name);
  const long replicas = std::min(ctx.cfg.replicas, kNegcorrReplicaCap);
  const auto res = negative_correlation_check(spec, icfg, x, y, replicas, ctx.cfg.workers);
  const std::size_t r0 = ctx.push_estimate(name, res.moment, res.verdict.oracle);
  ctx.push_verdict(name, res.verdict, std::nullopt, x, y, {r0});
}

void run_kite(Context& ctx) {
  const std::string name = "kite";
  const KiteReport rep = kite_proposition_check(ctx.cfg.kite_side, ctx.cfg.kite_t_list);
  auto base = [&](const std::string& q) {
    ResultRow r = ctx.row(name, q);
    r.graph = "torus";
    r.side = ctx.cfg.kite_side;
    r.dim = 2;
    r.potential = "gaussian";
    r.epsilon = 0.0;
    return r;
  };
  std::vector<std::size_t> rows;
  ResultRow comp = base("kite_compensation");
  comp.value = rep.compensation;
  comp.oracle = kKiteCompensation;
  const std::size_t rc = ctx.push(std::move(comp));

  double max_target_dev = 0.0;
  double max_drift = 0.0;
  // Constancy is judged on the interior of the grid: t > 0.
  std::optional<double> reference;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    ResultRow r = base("kite_c");
    r.t = rep.times[i];
    r.value = rep.values[i];
    r.oracle = kKiteTarget;
    rows.push_back(ctx.push(std::move(r)));
    if (rep.times[i] <= 0.0) continue;
    if (!reference) reference = rep.values[i];
    max_target_dev = std::max(max_target_dev, std::fabs(rep.values[i] - kKiteTarget));
    max_drift = std::max(max_drift, std::fabs(rep.values[i] - *reference) / std::fabs(*reference));
  }

  Verdict vc;
  vc.claim_tag = "kite-compensation";
  vc.note = "tolerance-units";
  vc.oracle = kKiteCompensation;
  vc.margin_in_sigmas = 1.0 - std::fabs(rep.compensation - kKiteCompensation) / kKiteTolerance;
  vc.pass = rep.compensation_uniform && std::fabs(rep.compensation - kKiteCompensation) <= 1e-12;
  ctx.push_verdict(name, vc, std::nullopt, std::nullopt, std::nullopt, {rc}, base(""));

  Verdict v;
  v.claim_tag = "kite-constancy";
  v.note = "tolerance-units";
  v.oracle = kKiteTarget;
  v.margin_in_sigmas = 1.0 - std::max(max_target_dev, max_drift) / kKiteTolerance;
  v.pass = max_target_dev <= kKiteTolerance && max_drift <= kKiteTolerance;
  ctx.push_verdict(name, v, std::nullopt, std::nullopt, std::nullopt, rows, base(""));
}

void run_gap(Context& ctx) {
  const std::string name = "gap";
  for (int n : ctx.cfg.gap_cycle_sizes) {
    const Graph g = build_cycle(n);
    const SpectralReport rep = spectral_report(g);
    const double exact = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / n);
    auto base = [&](const std::string& q) {
      ResultRow r = ctx.row(name, q);
      r.graph = "cycle";
      r.side = n;
      r.dim = 1;
      r.potential = "gaussian";
      r.epsilon = 0.0;
      return r;
    };
    ResultRow re = base("lambda_env");
    re.value = rep.lambda_env;
    re.oracle = exact;
    const std::size_t r0 = ctx.push(std::move(re));
    ResultRow rw = base("lambda_walk");
    rw.value = rep.lambda_walk;
    rw.oracle = exact;
    const std::size_t r1 = ctx.push(std::move(rw));
    const double scaling = 2.0 * std::numbers::pi * std::numbers::pi / (double(n) * n);
    ResultRow rs = base("gap_scaling_ratio");
    rs.value = rep.lambda_env / scaling;
    rs.oracle = 1.0;
    const std::size_t r2 = ctx.push(std::move(rs));

    Verdict v;
    v.claim_tag = "gap-exact";
    v.note = "tolerance-units";
    v.oracle = exact;
    const double dev = std::max(std::fabs(rep.lambda_env - exact), std::fabs(rep.lambda_walk - exact));
    v.margin_in_sigmas = 1.0 - dev / kGapExactTolerance;
    v.pass = dev <= kGapExactTolerance && rep.lambda_env >= rep.lambda_walk - kGapExactTolerance;
    ctx.push_verdict(name, v, std::nullopt, std::nullopt, std::nullopt, {r0, r1}, base(""));

    if (n == *std::max_element(ctx.cfg.gap_cycle_sizes.begin(), ctx.cfg.gap_cycle_sizes.end())) {
      Verdict s;
      s.claim_tag = "gap-scaling";
      s.note = "tolerance-units";
      s.oracle = 1.0;
      const double rel = std::fabs(rep.lambda_env / scaling - 1.0);
      s.margin_in_sigmas = 1.0 - rel / kGapScalingTolerance;
      s.pass = rel <= kGapScalingTolerance;
      ctx.push_verdict(name, s, std::nullopt, std::nullopt, std::nullopt, {r2}, base(""));
    }
  }

  // Monte Carlo decay of the diagonal covariance on the configured graph.
  const auto icfg = make_integrator_config(ctx.cfg.dt, ctx.cfg.gap_t_list, experiment_seed(ctx.cfg.seed, name));
  const ReplicaSet set(ctx.spec, icfg, {}, ctx.cfg.replicas, ctx.cfg.workers);
  const double floor = ctx.spec.site.variance() / ctx.graph->vertex_count();
  std::vector<std::pair<double, Estimate>> series;
  std::vector<std::size_t> rows;
  for (double t : ctx.cfg.gap_t_list) {
    const Estimate e = estimate_diagonal_cov(set, t);
    series.emplace_back(t, e);
    std::optional<double> oracle;
    if (ctx.gaussian_site()) oracle = heat_kernel(*ctx.graph, t).entries.diagonal().mean();
    rows.push_back(ctx.push_estimate(name, e, oracle, false));
  }
  const double exact_gap = nontrivial_gap(laplacian(*ctx.graph));
  ResultRow fr = ctx.row(name, "decay_rate");
  std::optional<DecayFit> fit;
  try {
    fit = decay_rate_fit(series, floor);
    fr.value = fit->rate;
  } catch (const Error&) {
  }
  fr.oracle = exact_gap;
  fr.replicas = ctx.cfg.replicas;
  rows.push_back(ctx.push(std::move(fr)));
  if (ctx.gaussian_site()) {
    Verdict v;
    v.claim_tag = "decay-rate";
    v.note = "tolerance-units";
    v.oracle = exact_gap;
    const double rel = fit ? std::fabs(fit->rate / exact_gap - 1.0) : std::numeric_limits<double>::infinity();
    v.margin_in_sigmas = fit ? 1.0 - rel / kDecayTolerance : -1.0;
    v.pass = fit.has_value() && rel <= kDecayTolerance;
    ctx.push_verdict(name, v, std::nullopt, std::nullopt, std::nullopt, rows);
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool RunResult::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const VerdictRecord& v) { return v.verdict.pass; });
}

RunResult run_experiments(const ExperimentConfig& cfg) {
  validate(cfg);
  RunResult result;
  auto graph = make_graph(cfg.graph);
  Context ctx{cfg, graph, GibbsSpec(graph, make_potential(cfg.potential)), result};
  const std::string& e = cfg.experiment;
  const bool all = e == "all";

  if (all) {
    // One stationary replica set with a walker from every vertex serves the
    // four covariance experiments.
    const ReplicaSet set = joint_set(ctx, "joint", all_vertices(*graph));
    run_theorem(ctx, set);
    run_lemma(ctx, set);
    run_fkg(ctx, set);
    run_corollary(ctx, set);
  } else if (e == "theorem" || e == "lemma-equality") {
    const ReplicaSet set = joint_set(ctx, "joint", {cfg.x});
    if (e == "theorem") run_theorem(ctx, set);
    else run_lemma(ctx, set);
  } else if (e == "fkg") {
    run_fkg(ctx, joint_set(ctx, "joint", {}));
  } else if (e == "corollary") {
    run_corollary(ctx, joint_set(ctx, "joint", all_vertices(*graph)));
  }
  if (all || e == "order") run_order(ctx);
  if (all || e == "negcorr") run_negcorr(ctx);
  if (all || e == "kite") run_kite(ctx);
  if (all || e == "gap") run_gap(ctx);
  return result;
}

void write_csv(std::ostream& out, const RunResult& result) {
  out << kCsvHeader << '\n';
  auto opt = [](const auto& v) -> std::string {
    using T = std::decay_t<decltype(*v)>;
    if (!v) return "";
    if constexpr (std::is_same_v<T, double>) return format_double(*v);
    else if constexpr (std::is_same_v<T, bool>) return *v ? "pass" : "fail";
    else return std::to_string(*v);
  };
  for (const auto& r : result.rows) {
    out << r.experiment << ',' << r.graph << ',' << r.side << ',' << r.dim << ',' << r.potential << ','
        << format_double(r.epsilon) << ',' << opt(r.t) << ',' << opt(r.x) << ',' << opt(r.y) << ',' << r.quantity
        << ',' << opt(r.value) << ',' << opt(r.std_error) << ',' << opt(r.replicas) << ',' << opt(r.oracle) << ','
        << opt(r.verdict) << ',' << opt(r.margin_sigmas) << ',' << r.seed << '\n';
  }
}

json summary_json(const ExperimentConfig& cfg, const RunResult& result) {
  json verdicts = json::array();
  for (const auto& rec : result.verdicts) {
    json v{{"experiment", rec.experiment},
           {"claim", rec.verdict.claim_tag},
           {"note", rec.verdict.note},
           {"pass", rec.verdict.pass},
           {"margin_sigmas", rec.verdict.margin_in_sigmas},
           {"row", rec.row},
           {"input_rows", rec.input_rows}};
    v["t"] = rec.t ? json(*rec.t) : json(nullptr);
    v["x"] = rec.x ? json(*rec.x) : json(nullptr);
    v["y"] = rec.y ? json(*rec.y) : json(nullptr);
    v["oracle"] = rec.verdict.oracle ? json(*rec.verdict.oracle) : json(nullptr);
    verdicts.push_back(std::move(v));
  }
  return json{{"config", cfg.to_json()},
              {"csv", cfg.output + ".csv"},
              {"all_pass", result.all_pass()},
              {"verdicts", std::move(verdicts)}};
}

int run(const ExperimentConfig& cfg) {
  const RunResult result = run_experiments(cfg);
  std::ostringstream csv;
  write_csv(csv, result);
  {
    std::ofstream f(cfg.output + ".csv", std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + cfg.output + ".csv");
    f << csv.str();
  }
  {
    std::ofstream f(cfg.output + ".summary.json", std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + cfg.output + ".summary.json");
    f << summary_json(cfg, result).dump(2) << '\n';
  }
  return result.all_pass() ? 0 : 1;
}

}  // namespace glhs
