#include "glhs/potential.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "glhs/error.hpp"

namespace glhs {
namespace {

constexpr double kQuadratureHalfWidth = 50.0;

template <typename F>
double integrate(F&& f) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, -kQuadratureHalfWidth, kQuadratureHalfWidth, 15, 1e-14);
}

double log_cosh(double t) noexcept {
  const double a = std::fabs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

double SmoothedGaussianFamily::unnormalized(double t) const noexcept {
  return 0.5 * t * t + epsilon * log_cosh(t);
}

std::string Potential::family_tag() const {
  return std::holds_alternative<GaussianFamily>(family_) ? "gaussian" : "smoothed_gaussian";
}

double Potential::epsilon() const noexcept {
  if (const auto* s = std::get_if<SmoothedGaussianFamily>(&family_)) return s->epsilon;
  return 0.0;
}

Potential gaussian() {
  Potential p;
  p.family_ = GaussianFamily{};
  p.c_minus_ = 1.0;
  p.c_plus_ = 1.0;
  p.mean_ = 0.0;
  p.mode_ = 0.0;
  p.log_norm_ = 0.5 * std::log(2.0 * std::numbers::pi);
  return p;
}

Potential smoothed_gaussian(double epsilon) {
  if (!(epsilon >= 0.0) || epsilon > 10.0)
    throw Error(ErrorKind::InvalidParameter, "smoothed_gaussian requires 0 <= epsilon <= 10");
  Potential p;
  const SmoothedGaussianFamily fam{epsilon};
  p.family_ = fam;
  p.c_minus_ = 1.0;
  p.c_plus_ = 1.0 + epsilon;
  p.mode_ = 0.0;  // V' is odd and strictly increasing

  const double z = integrate([&](double t) { return std::exp(-fam.unnormalized(t)); });
  p.log_norm_ = std::log(z);
  // Zero by symmetry; kept numeric so asymmetric families go through the same path.
  p.mean_ = integrate([&](double t) { return t * std::exp(-fam.unnormalized(t)); }) / z;
  if (std::fabs(p.mean_) < 1e-14) p.mean_ = 0.0;
  const double mu = p.mean_;
  p.variance_ = integrate([&](double t) { return (t - mu) * (t - mu) * std::exp(-fam.unnormalized(t)); }) / z;
  return p;
}

double sample_site(const Potential& p, RngStream& rng) {
  const double sigma = 1.0 / std::sqrt(p.c_minus());
  const double m = p.mode();
  const double vm = p.eval(m);
  constexpr int kMaxProposals = 1'000'000;
  for (int i = 0; i < kMaxProposals; ++i) {
    const double t = m + sigma * rng.normal();
    // log of target / envelope, always <= 0 by the curvature lower bound
    const double excess = p.eval(t) - vm - 0.5 * p.c_minus() * (t - m) * (t - m);
    if (excess <= 0.0 || rng.uniform() < std::exp(-excess)) return t;
  }
  throw Error(ErrorKind::Internal, "rejection sampler exceeded proposal cap");
}

OrderCondition order_preservation_condition(double c1m, double c1p, double c2m, double c2p, const Graph& g) {
  if (c1m > c1p || c2m > c2p) throw Error(ErrorKind::InvalidParameter, "inconsistent curvature bounds");
  double inner = std::numeric_limits<double>::infinity();
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    for (Vertex y : g.neighbors(x)) inner = std::min(inner, g.degree(y) * c2m);
  }
  if (!std::isfinite(inner)) inner = 0.0;  // single vertex, no neighbors
  const double margin = inner - c2p + c1m;
  return {margin >= 0.0 && c2m >= 0.0, margin};
}

}  // namespace glhs
