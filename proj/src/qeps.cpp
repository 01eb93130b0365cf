#include "tubelab/qeps.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tubelab/error.hpp"

namespace tubelab {

namespace {

using boost::math::quadrature::gauss_kronrod;

// int_{x^2}^{x^2+eps^2} u^{2q} / (u + a sqrt(u))^2 du, with u = v^2 and v = x e^t
// so the 1/v behaviour of the flat profile near v = 0 becomes a plateau in t;
// the upper limit is written with log1p to keep the interval width exact for x >> eps
double inner(double x, double eps, double a, double q) {
  x = std::max(x, 1e-300);
  const double r = eps / x;
  const double hi = r > 1 ? std::log(r) + 0.5 * std::log1p(1 / (r * r)) : 0.5 * std::log1p(r * r);
  auto f = [&](double t) {
    const double v = x * std::exp(t);
    return 2 * std::pow(v, 4 * q) / ((v + a) * (v + a));
  };
  // a single panel is exact to rounding on short intervals, where the error
  // estimate sits on its roundoff floor and bisection would never terminate
  if (hi < 1e-2) return gauss_kronrod<double, 61>::integrate(f, 0.0, hi, 0, 1e-10);
  // split at the knee v = a where the integrand turns from its plateau to decay
  const double knee = std::log(a / x);
  if (knee <= 0 || knee >= hi) return gauss_kronrod<double, 61>::integrate(f, 0.0, hi, 12, 1e-10);
  return gauss_kronrod<double, 61>::integrate(f, 0.0, knee, 12, 1e-10) +
         gauss_kronrod<double, 61>::integrate(f, knee, hi, 12, 1e-10);
}

}  // namespace

const char* to_string(QepsScenario s) {
  return s == QepsScenario::bounded_profile ? "bounded_profile" : "flat_profile";
}

QepsScenario qeps_scenario_from_string(const std::string& name) {
  if (name == "bounded_profile") return QepsScenario::bounded_profile;
  if (name == "flat_profile") return QepsScenario::flat_profile;
  fail("scenario-invalid", "unknown Q scenario '" + name + "'");
}

QepsEntry qeps_estimate(QepsScenario scenario, double kappa, double eps, double delta, const QepsParams& params) {
  check_delta(delta);
  if (!(eps > 0 && eps <= 1)) fail("epsilon-range", "requires 0 < eps <= 1");
  QepsEntry e;
  e.epsilon = eps;
  const double a = std::pow(eps, delta);
  const double pref = kappa * kappa * std::pow(eps, 2 * (delta - 1));
  boost::math::quadrature::tanh_sinh<double> ts;
  if (scenario == QepsScenario::bounded_profile) {
    const double p = params.p;
    if (!(p > 0.75 && p < 1)) fail("p-range", "requires 3/4 < p < 1");
    if (!(delta > 2 - 2 * p)) fail("delta-range", "requires 2 - 2p < delta < 1/2");
    auto outer = [&](double x) { return std::exp(-2 * x * x) * inner(x, eps, a, p); };
    const double cut = std::min(eps, 1.0);
    const double s = ts.integrate(outer, 0.0, cut, 1e-9) +
                     gauss_kronrod<double, 61>::integrate(outer, cut, 9.0, 12, 1e-10);
    e.value = kappa == 0 ? 0.0 : pref * 2 * s;
    const double wnorm2 = std::sqrt(std::numbers::pi / 2);
    e.bound = kappa * kappa / (2 * p - 1) * std::pow(eps, 2 * delta + 4 * p - 4) * wnorm2;
  } else {
    const double m2 = params.amplitude * params.amplitude;
    auto outer = [&](double x) { return m2 * inner(x, eps, a, 0.0); };
    const double cut = std::min(eps, 0.5);
    double s = ts.integrate(outer, 0.0, cut, 1e-9);
    if (cut < 0.5) s += gauss_kronrod<double, 61>::integrate(outer, cut, 0.5, 12, 1e-10);
    e.value = kappa == 0 ? 0.0 : pref * s;
  }
  return e;
}

QepsReport qeps_sweep(QepsScenario scenario, double kappa, const std::vector<double>& ladder, double delta,
                      const QepsParams& params) {
  QepsReport rep;
  rep.scenario = scenario;
  std::vector<double> v;
  bool positive = true;
  for (double eps : ladder) {
    rep.entries.push_back(qeps_estimate(scenario, kappa, eps, delta, params));
    const auto& e = rep.entries.back();
    v.push_back(e.value);
    positive = positive && e.value > 0;
    if (e.bound && !(e.value <= *e.bound)) rep.bound_ok = false;
  }
  if (positive && ladder.size() >= 3) rep.fit = fit_rate(ladder, v);
  if (scenario == QepsScenario::bounded_profile) {
    rep.theoretical_slope = 2 * delta + 4 * params.p - 4;
    rep.monotone = strictly_decreasing(v);
    rep.pass = rep.bound_ok && rep.monotone;
  } else {
    rep.theoretical_slope = 2 * (delta - 1);
    rep.monotone = strictly_increasing(v);
    rep.pass = rep.monotone && rep.fit && std::abs(rep.fit->slope - rep.theoretical_slope) <= 0.2;
  }
  return rep;
}

}  // namespace tubelab
