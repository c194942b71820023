#include <doctest.h>

#include <cmath>
#include <numbers>

#include "glhs/error.hpp"
#include "glhs/potential.hpp"

using namespace glhs;

namespace {

// Composite Simpson on [-40, 40]; independent of the library quadrature.
template <typename F>
double simpson(F f) {
  const int n = 20000;
  const double a = -40.0, b = 40.0, h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

std::vector<double> probe_points() {
  std::vector<double> pts;
  double u = 0.5;
  for (int i = 0; i < 100; ++i) {
    u = std::fmod(u + 0.6180339887498949, 1.0);
    pts.push_back(-8.0 + 16.0 * u);
  }
  return pts;
}

}  // namespace

TEST_CASE("gaussian potential") {
  const Potential v = gaussian();
  CHECK(v.family_tag() == "gaussian");
  CHECK(v.grad(0.7) == 0.7);
  CHECK(v.curv(-3.0) == 1.0);
  CHECK(v.c_minus() == 1.0);
  CHECK(v.c_plus() == 1.0);
  CHECK(v.mean() == 0.0);
  CHECK(simpson([&](double t) { return std::exp(-v.eval(t)); }) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("smoothed gaussian potential") {
  const Potential flat = smoothed_gaussian(0.0);
  const Potential g = gaussian();
  for (double t : {-2.0, 0.0, 1.3}) CHECK(flat.eval(t) == doctest::Approx(g.eval(t)).epsilon(1e-12));

  const Potential v = smoothed_gaussian(0.5);
  CHECK(v.family_tag() == "smoothed_gaussian");
  CHECK(v.epsilon() == 0.5);
  CHECK(v.c_minus() == 1.0);
  CHECK(v.c_plus() == 1.5);
  CHECK(v.curv(0.0) == 1.5);
  CHECK(v.curv(10.0) > 1.0);
  CHECK(v.curv(10.0) < 1.0 + 1e-8);

  const double z = simpson([&](double t) { return std::exp(-v.eval(t)); });
  CHECK(z == doctest::Approx(1.0).epsilon(1e-9));
  const double mean = simpson([&](double t) { return t * std::exp(-v.eval(t)); });
  CHECK(std::fabs(mean) < 1e-10);
  CHECK(std::fabs(v.mean()) < 1e-10);
  const double var = simpson([&](double t) { return t * t * std::exp(-v.eval(t)); });
  CHECK(v.variance() == doctest::Approx(var).epsilon(1e-8));

  CHECK_THROWS_AS(smoothed_gaussian(-0.1), Error);
  CHECK_THROWS_AS(smoothed_gaussian(10.5), Error);
}

TEST_CASE("finite-difference consistency and curvature bounds") {
  const double h = 1e-5;
  for (const Potential& v : {gaussian(), smoothed_gaussian(0.5), smoothed_gaussian(3.0)}) {
    for (double t : probe_points()) {
      const double fd_grad = (v.eval(t + h) - v.eval(t - h)) / (2 * h);
      CHECK(std::fabs(fd_grad - v.grad(t)) <= 1e-6 * (1 + std::fabs(v.grad(t))));
      const double fd_curv = (v.grad(t + h) - v.grad(t - h)) / (2 * h);
      CHECK(std::fabs(fd_curv - v.curv(t)) <= 1e-6 * (1 + std::fabs(v.curv(t))));
      CHECK(v.curv(t) >= v.c_minus());
      CHECK(v.curv(t) <= v.c_plus());
    }
  }
}

TEST_CASE("site sampler moments") {
  const long n = 1000000;
  {
    const Potential v = gaussian();
    RngStream rng(7);
    double s1 = 0, s2 = 0;
    for (long i = 0; i < n; ++i) {
      const double x = sample_site(v, rng);
      s1 += x;
      s2 += x * x;
    }
    CHECK(std::fabs(s1 / n) < 3.0 / std::sqrt(double(n)));
    CHECK(std::fabs(s2 / n - 1.0) < 0.01);
  }
  {
    // Under exp(-V), E[V'(eta) eta] = 1 by integration by parts.
    const Potential v = smoothed_gaussian(0.5);
    RngStream rng(11);
    double s = 0, ss = 0;
    for (long i = 0; i < n; ++i) {
      const double x = sample_site(v, rng);
      const double y = v.grad(x) * x;
      s += y;
      ss += y * y;
    }
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    CHECK(std::fabs(mean - 1.0) < 3 * se);
  }
  {
    RngStream a(5), b(5);
    const Potential v = smoothed_gaussian(1.0);
    for (int i = 0; i < 100; ++i) CHECK(sample_site(v, a) == sample_site(v, b));
  }
}

TEST_CASE("pair potential and Holley identity") {
  const PairPotential w{0.5};
  CHECK(w.eval(2.0) == 1.0);
  CHECK(w.grad(2.0) == 1.0);
  CHECK(w.curv(0.0) == 0.5);
  const Potential v = smoothed_gaussian(0.5);
  for (double a : probe_points()) {
    const double b = -0.37 * a + 0.5;
    CHECK(v.eval(std::max(a, b)) + v.eval(std::min(a, b)) == v.eval(a) + v.eval(b));
    CHECK(w.eval(std::max(a, b)) + w.eval(std::min(a, b)) == w.eval(a) + w.eval(b));
  }
}

TEST_CASE("order preservation condition") {
  const Graph g = build_cycle(8);
  const auto site_only = order_preservation_condition(1.0, 1.5, 0.0, 0.0, g);
  CHECK(site_only.holds);
  CHECK(site_only.margin == 1.0);
  const auto with_pair = order_preservation_condition(1.0, 1.0, 0.5, 0.5, g);
  CHECK(with_pair.holds);
  CHECK(with_pair.margin == doctest::Approx(1.5));
  const auto broken = order_preservation_condition(0.1, 0.1, 0.1, 1.0, g);
  CHECK_FALSE(broken.holds);
  CHECK(broken.margin < 0);
  CHECK_THROWS_AS(order_preservation_condition(2.0, 1.0, 0.0, 0.0, g), Error);
}
