#include <doctest.h>

#include <cmath>
#include <numbers>

#include "glhs/error.hpp"
#include "glhs/estimators.hpp"
#include "glhs/oracle.hpp"

using namespace glhs;

namespace {

std::shared_ptr<const Graph> cycle(int n) { return std::make_shared<const Graph>(build_cycle(n)); }

double cycle_heat_kernel(int n, double t, int x, int y) {
  double s = 0;
  for (int k = 0; k < n; ++k) {
    const double theta = 2 * std::numbers::pi * k / n;
    s += std::exp(-t * (2 - 2 * std::cos(theta))) * std::cos(theta * (x - y));
  }
  return s / n;
}

}  // namespace

TEST_CASE("refuses too few replicas") {
  const GibbsSpec spec(cycle(6), gaussian());
  const auto cfg = make_integrator_config(1e-3, {0.5}, 1);
  try {
    ReplicaSet(spec, cfg, {0}, 10);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
  CHECK_THROWS_AS(estimate_cov(spec, cfg, 0, 0, 0.5, 99, Observable::Mass), Error);
}

TEST_CASE("batch means on iid data") {
  RngStream rng(3);
  std::vector<double> xs(40000);
  for (auto& x : xs) x = rng.normal();
  const double se = batch_means_stderr(static_cast<long>(xs.size()), [&](long lo, long hi) {
    double s = 0;
    for (long i = lo; i < hi; ++i) s += xs[i];
    return s / (hi - lo);
  });
  CHECK(se == doctest::Approx(1.0 / 200).epsilon(0.15));
  CHECK_THROWS_AS(batch_means_stderr(3, [](long, long) { return 0.0; }), Error);
}

TEST_CASE("equal-time and walker estimates") {
  const GibbsSpec spec(cycle(8), smoothed_gaussian(0.5));
  const auto cfg = make_integrator_config(2e-3, {0.5}, 5);
  const ReplicaSet set(spec, cfg, {0, 2}, 20000);

  const Estimate var = estimate_cov(set, 0, 0, 0.0, Observable::Mass);
  CHECK(var.quantity_tag == "cov_mass");
  CHECK(std::fabs(var.value - spec.site.variance()) <= 3 * var.std_error);
  const Estimate vp = estimate_cov(set, 0, 0, 0.0, Observable::VPrime);
  CHECK(vp.quantity_tag == "cov_vprime");
  CHECK(std::fabs(vp.value - 1.0) <= 3 * vp.std_error);
  const Estimate off = estimate_cov(set, 0, 3, 0.0, Observable::Mass);
  CHECK(std::fabs(off.value) <= 3 * off.std_error);

  const Estimate p0 = estimate_walker_prob(set, 2, 2, 0.0);
  CHECK(p0.value == 1.0);
  CHECK(p0.std_error == 0.0);
  double total = 0;
  for (Vertex y = 0; y < 8; ++y) total += estimate_walker_prob(set, 0, y, 0.5).value;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(estimate_walker_prob(set, 1, 1, 0.5), Error);
  CHECK_THROWS_AS(estimate_cov(set, 0, 0, 0.3, Observable::Mass), Error);
  CHECK_THROWS_AS(parse_observable("mass2"), Error);
}

TEST_CASE("gaussian estimates match the heat kernel") {
  const GibbsSpec spec(cycle(8), gaussian());
  const ReplicaSet set(spec, make_integrator_config(2e-3, {1.0}, 6), {0}, 20000);
  const double exact = cycle_heat_kernel(8, 1.0, 0, 1);
  const Estimate p = estimate_walker_prob(set, 0, 1, 1.0);
  CHECK(std::fabs(p.value - exact) <= 3 * p.std_error);
  const Estimate c = estimate_cov(set, 0, 1, 1.0, Observable::Mass);
  CHECK(std::fabs(c.value - exact) <= 3 * c.std_error + 2e-3);
  const Verdict v = theorem_sandwich(set, 0, 1, 1.0);
  CHECK(v.claim_tag == "theorem-sandwich");
  CHECK(v.note == "equality");
  CHECK(v.pass);
}

TEST_CASE("determinism across worker counts") {
  const GibbsSpec spec(cycle(8), smoothed_gaussian(0.5));
  const auto cfg = make_integrator_config(2e-3, {0.5}, 44);
  const ReplicaSet a(spec, cfg, {0}, 500, 1);
  const ReplicaSet b(spec, cfg, {0}, 500, 4);
  const Estimate ea = estimate_cov(a, 0, 1, 0.5, Observable::Mass);
  const Estimate eb = estimate_cov(b, 0, 1, 0.5, Observable::Mass);
  CHECK(ea.value == eb.value);
  CHECK(ea.std_error == eb.std_error);
  CHECK(estimate_walker_prob(a, 0, 0, 0.5).value == estimate_walker_prob(b, 0, 0, 0.5).value);
}

TEST_CASE("lipschitz functionals and their checks") {
  const GibbsSpec spec(cycle(6), smoothed_gaussian(0.5));
  const ReplicaSet set(spec, make_integrator_config(2e-3, {0.5}, 7), {0, 1, 2, 3, 4, 5}, 2000);
  const LipschitzSpec f{LipschitzSpec::Kind::Linear, {1, 1, 0, 0, 0, 0}};
  CHECK(f.norm() == 2.0);
  CHECK(f.increasing());
  CHECK(f.support() == std::vector<Vertex>{0, 1});
  const LipschitzSpec g{LipschitzSpec::Kind::Tanh, {0, 0, 0.5, 0, 0, 0}};
  CHECK(g.evaluate([](Vertex) { return 1.0; }) == doctest::Approx(0.5 * std::tanh(1.0)));

  const LipschitzSpec decreasing{LipschitzSpec::Kind::Linear, {-1, 0, 0, 0, 0, 0}};
  CHECK_FALSE(decreasing.increasing());
  CHECK_THROWS_AS(fkg_check(set, decreasing, f, 0.5), Error);
  CHECK_THROWS_AS(corollary_bound_check(set, LipschitzSpec{LipschitzSpec::Kind::Linear, std::vector<double>(6, 0.0)}, 0.5),
                  Error);
  CHECK(fkg_check(set, f, g, 0.5).pass);
  CHECK(corollary_bound_check(set, f, 0.5).pass);
}

TEST_CASE("negative correlation input checks") {
  const auto cfg = make_integrator_config(1e-2, {}, 1);
  CHECK_THROWS_AS(negative_correlation_check(GibbsSpec(cycle(6), gaussian()), cfg, 0, 1, 200), Error);
  const GibbsSpec spec(cycle(6), gaussian(), PairPotential{0.5});
  CHECK_THROWS_AS(negative_correlation_check(spec, cfg, 0, 3, 200), Error);
  const auto res = negative_correlation_check(spec, cfg, 0, 1, 2000);
  REQUIRE(res.verdict.oracle.has_value());
  CHECK(*res.verdict.oracle < 0.0);
  CHECK(res.verdict.pass);
  CHECK(res.burn_in > 0.0);
}

TEST_CASE("decay fit on the exact diagonal covariance") {
  const int n = 8;
  std::vector<std::pair<double, Estimate>> series;
  for (double t = 3.0; t <= 8.0; t += 1.0) {
    Estimate e;
    e.value = cycle_heat_kernel(n, t, 0, 0);
    e.std_error = 1e-9;
    e.t = t;
    series.emplace_back(t, e);
  }
  const DecayFit fit = decay_rate_fit(series, 1.0 / n);
  const double gap = 2 - 2 * std::cos(2 * std::numbers::pi / n);
  CHECK(fit.rate == doctest::Approx(gap).epsilon(0.02));
  CHECK(fit.points == 6);

  auto flat = series;
  for (auto& [t, e] : flat) e.value = 1.0 / n;
  CHECK_THROWS_AS(decay_rate_fit(flat, 1.0 / n), Error);
  CHECK_THROWS_AS(decay_rate_fit({series.begin(), series.begin() + 3}, 1.0 / n), Error);
}
