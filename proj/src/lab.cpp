#include "tubelab/lab.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tubelab/error.hpp"
#include "tubelab/resolvent.hpp"

namespace tubelab {

namespace {

using boost::math::quadrature::gauss_kronrod;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Runs fn(0..n-1) with at most `jobs` rungs in flight; results ordered by rung.
template <typename R, typename F>
std::vector<R> run_rungs(std::size_t n, int jobs, F fn, const std::vector<double>& eps) {
  std::vector<R> out(n);
  auto guarded = [&](std::size_t i) {
    try {
      return fn(i);
    } catch (const Error& e) {
      throw Error(e.code(), "rung " + std::to_string(i) + " (eps=" + std::to_string(eps[i]) + "): " + e.what());
    }
  };
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = guarded(i);
    return out;
  }
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(jobs)) {
    std::vector<std::future<R>> batch;
    const std::size_t stop = std::min(n, start + static_cast<std::size_t>(jobs));
    for (std::size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, guarded, i));
    for (std::size_t i = start; i < stop; ++i) out[i] = batch[i - start].get();
  }
  return out;
}

VecC reduce_c(const VecC& v, const TubeGrid& g) {
  const Vec re = reduce_scaled(v.real(), g), im = reduce_scaled(v.imag(), g);
  return re.cast<std::complex<double>>() + std::complex<double>(0, 1) * im.cast<std::complex<double>>();
}

VecC lift_c(const VecC& s, const TubeGrid& g) {
  const Vec re = lift_scaled(s.real(), g), im = lift_scaled(s.imag(), g);
  return re.cast<std::complex<double>>() + std::complex<double>(0, 1) * im.cast<std::complex<double>>();
}

TubeOperatorSpec rung_spec(const TubeOperatorSpec& tmpl, const EpsilonLadder& ladder, double eps) {
  TubeOperatorSpec s = tmpl;
  s.epsilon = eps;
  s.kappa = ladder.kappa;
  s.delta = ladder.delta;
  s.shift_c = ladder.c;
  return s;
}

double integrate(const std::function<double(double)>& f, std::vector<double> breaks) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (breaks[i + 1] > breaks[i]) s += gauss_kronrod<double, 61>::integrate(f, breaks[i], breaks[i + 1], 12, 1e-11);
  return s;
}

}  // namespace

void EpsilonLadder::validate() const {
  if (epsilons.size() < 3) fail("ladder-too-short", "at least 3 rungs are required");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0 && epsilons[i] <= 1)) fail("epsilon-range", "every eps must lie in (0, 1]");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) fail("ladder-order", "ladder must be strictly decreasing");
  }
  check_delta(delta);
  if (kappa > 0 && !(c > kappa)) fail("shift-too-small", "requires c > kappa");
}

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& d) {
  if (eps.size() != d.size() || eps.size() < 3) fail("degenerate-fit", "need at least 3 matched points");
  const std::size_t n = d.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d[i] > 0) || !(eps[i] > 0)) fail("degenerate-fit", "distances must be positive");
    const double x = std::log(eps[i]), y = std::log(d[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) fail("degenerate-fit", "all eps values coincide");
  RateFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double r2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::log(d[i]) - (f.intercept + f.slope * std::log(eps[i]));
    r2 += e * e;
  }
  f.residual = std::sqrt(r2 / n);
  return f;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return !v.empty();
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return !v.empty();
}

NormEstimate estimate_norm(const LinearMap& d, const LinearMap& d_adjoint, Eigen::Index n, std::uint64_t seed,
                           int max_iterations, double tol) {
  NormEstimate est;
  VecC x = random_vector(n, seed).cast<std::complex<double>>();
  x.normalize();
  double prev = -1;
  double change = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    const VecC y = d(x);
    const double s = y.norm();
    est.history.push_back(s);
    est.iterations = it;
    est.value = s;
    if (s == 0) {
      est.converged = true;
      return est;
    }
    if (prev > 0) {
      change = std::abs(s - prev) / s;
      if (change <= tol) {
        est.converged = true;
        break;
      }
    }
    prev = s;
    x = d_adjoint(y);
    const double xn = x.norm();
    if (xn == 0) {
      est.converged = true;
      break;
    }
    x /= xn;
  }
  if (!est.converged && change > 1e-2) {
    std::string h;
    for (double v : est.history) h += " " + std::to_string(v);
    fail("norm-estimate-unreliable", "Rayleigh history:" + h);
  }
  return est;
}

const char* to_string(Pairing p) {
  switch (p) {
    case Pairing::P1: return "P1";
    case Pairing::P2: return "P2";
    case Pairing::T1: return "T1";
  }
  return "?";
}

Operator1D limit_operator(double kappa, const Grid1D& grid, const TwistProfile& twist, double C_S) {
  Operator1D h = assemble_HD(kappa, grid, twist, C_S);
  if (kappa != 0) return h;
  // no Coulomb term: the origin stays permeable
  const double hh = grid.spacing * grid.spacing;
  const int l = grid.half - 1, r = grid.half;
  h.off[l] = -1.0 / hh;
  h.diag[l] = 2.0 / hh + h.potential[l];
  h.diag[r] = 2.0 / hh + h.potential[r];
  h.dirichlet_at_origin = false;
  return h;
}

ConvergenceReport norm_resolvent_sweep(const EpsilonLadder& ladder, const TubeOperatorSpec& spec_template,
                                       const TubeGrid& grid, Pairing pairing, const LabOptions& opt) {
  ladder.validate();
  if (!(ladder.kappa > 0)) fail("kappa-sign", "norm-resolvent sweeps need kappa > 0");
  const PotentialDensity density = make_density(grid.transverse);
  const Operator1D limit = limit_operator(ladder.kappa, grid.x, spec_template.twist, grid.transverse.C_S);
  const ResolventOptions ropt{opt.rtol, 200};

  auto rung = [&](std::size_t idx) {
    const auto t0 = clock_type::now();
    const double eps = ladder.epsilons[idx];
    const TubeOperatorSpec spec = rung_spec(spec_template, ladder, eps);
    const auto forms = assemble_a_forms(spec, grid);
    const double reg = std::pow(eps, ladder.delta);
    std::complex<double> z;
    const SparseOperator* full = &forms.second;
    SparseOperator line;
    switch (pairing) {
      case Pairing::P1:
        z = 0;
        line = assemble_T_eps(ladder.kappa, eps, ladder.delta, ladder.c, grid.x, density).op();
        break;
      case Pairing::P2:
        z = std::complex<double>(ladder.c / reg, 1.0);
        line = assemble_T_eps(ladder.kappa, eps, ladder.delta, ladder.c, grid.x, density).op();
        break;
      case Pairing::T1:
        z = std::complex<double>(0, 1.0);
        full = &forms.first;
        line = limit.op();
        break;
    }
    const Resolvent ra(*full, z, ropt);
    const Resolvent rl(line, z, ropt);
    const LinearMap d = [&](const VecC& v) -> VecC { return ra.apply(v) - lift_c(rl.apply(reduce_c(v, grid)), grid); };
    const LinearMap da = [&](const VecC& v) -> VecC {
      return ra.apply_adjoint(v) - lift_c(rl.apply_adjoint(reduce_c(v, grid)), grid);
    };
    const NormEstimate est = estimate_norm(d, da, grid.size(), opt.seed, opt.power_iterations, opt.power_tolerance);
    RungResult r;
    r.epsilon = eps;
    r.distance = est.value;
    r.iterations = est.iterations;
    r.history = est.history;
    if (grid.transverse.axisymmetric)
      r.sector_bound = eps * eps / (grid.transverse.lambda1 - grid.transverse.lambda0);
    r.seconds = seconds_since(t0);
    return r;
  };

  ConvergenceReport rep;
  rep.theorem_tag = to_string(pairing);
  rep.rungs = run_rungs<RungResult>(ladder.epsilons.size(), opt.jobs, rung, ladder.epsilons);
  std::vector<double> d;
  for (const auto& r : rep.rungs) d.push_back(r.distance);
  rep.monotone = strictly_decreasing(d);
  bool positive = true;
  for (double v : d) positive = positive && v > 0;
  if (positive) rep.fit = fit_rate(ladder.epsilons, d);
  if (pairing == Pairing::P1) rep.theoretical_slope = 1 + ladder.delta / 2;
  if (pairing == Pairing::P2) rep.theoretical_slope = 1 - 1.5 * ladder.delta;
  if (rep.theoretical_slope)
    rep.pass = rep.monotone && rep.fit && rep.fit->slope >= *rep.theoretical_slope - 0.3;
  else
    rep.pass = rep.monotone;
  if (grid.transverse.axisymmetric) rep.note = "distances cover the m=0 block; sector_bound bounds the m>=1 blocks";
  return rep;
}

Vec transverse_excited_mode(const TransverseBasis& basis) {
  const SparseOperator op = from_form(basis.stiffness, basis.weights);
  const EigenPairs p = lowest_eigenpairs(op.matrix, 2, 0.0, 7, {}, 1e-12);
  Vec eta = op.to_nodal(p.vectors.col(1));
  eta -= eta.cwiseProduct(basis.u0).dot(basis.weights) * basis.u0;
  eta /= std::sqrt(eta.cwiseAbs2().dot(basis.weights));
  return eta;
}

std::vector<TestVector> standard_test_vectors(const TubeGrid& grid) {
  const Vec x = grid.x.nodes();
  const Vec wts = grid.weights();
  auto normalized = [&](Vec psi) {
    psi /= std::sqrt(psi.cwiseAbs2().dot(wts));
    return psi;
  };
  Vec smooth(x.size()), origin(x.size()), g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    smooth[i] = std::exp(-2 * (x[i] - 3) * (x[i] - 3));
    origin[i] = std::exp(-4 * x[i] * x[i]);
    g[i] = std::exp(-x[i] * x[i]);
  }
  const Vec eta = transverse_excited_mode(grid.transverse);
  const Eigen::Index ny = grid.transverse.size();
  Vec perp(grid.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) perp.segment(i * ny, ny) = g[i] * eta;
  return {{"L_smooth", normalized(lift(smooth, grid))},
          {"L_near_origin", normalized(lift(origin, grid))},
          {"L_perp", normalized(perp)}};
}

ConvergenceReport strong_resolvent_sweep(const EpsilonLadder& ladder, const TubeOperatorSpec& spec_template,
                                         const TubeGrid& grid, const std::vector<TestVector>& thetas,
                                         const Operator1D& limit_op, double z, const LabOptions& opt) {
  if (ladder.epsilons.size() < 3) fail("ladder-too-short", "at least 3 rungs are required");
  EpsilonLadder lad = ladder;
  if (lad.kappa > 0) fail("kappa-sign", "strong-resolvent sweeps use kappa <= 0");
  for (std::size_t i = 0; i < lad.epsilons.size(); ++i)
    if (!(lad.epsilons[i] > 0 && lad.epsilons[i] <= 1) || (i > 0 && !(lad.epsilons[i] < lad.epsilons[i - 1])))
      fail("ladder-order", "ladder must be strictly decreasing within (0, 1]");
  if (limit_op.grid.size() != grid.x.size()) fail("size-mismatch", "limit operator lives on another grid");
  const ResolventOptions ropt{opt.rtol, 200};
  const Resolvent rl(limit_op.op(), z, ropt);
  const Vec wts = grid.weights();
  std::vector<VecC> scaled, targets;
  for (const auto& t : thetas) {
    const Vec v = t.psi.cwiseProduct(wts.cwiseSqrt());
    scaled.push_back(v.cast<std::complex<double>>());
    targets.push_back(lift_c(rl.apply(reduce_c(scaled.back(), grid)), grid));
  }

  auto rung = [&](std::size_t idx) {
    const auto t0 = clock_type::now();
    const double eps = lad.epsilons[idx];
    TubeOperatorSpec spec = spec_template;
    spec.epsilon = eps;
    spec.kappa = lad.kappa;
    spec.delta.reset();
    spec.shift_c.reset();
    const SparseOperator b = assemble_b_form(spec, grid);
    const Resolvent r(b, z, ropt);
    RungResult out;
    out.epsilon = eps;
    for (std::size_t k = 0; k < scaled.size(); ++k) out.per_vector.push_back((r.apply(scaled[k]) - targets[k]).norm());
    out.distance = 0;
    for (double v : out.per_vector) out.distance = std::max(out.distance, v);
    out.seconds = seconds_since(t0);
    return out;
  };

  ConvergenceReport rep;
  rep.theorem_tag = "T2";
  rep.rungs = run_rungs<RungResult>(lad.epsilons.size(), opt.jobs, rung, lad.epsilons);
  rep.pass = true;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    std::vector<double> d;
    bool positive = true;
    for (const auto& r : rep.rungs) {
      d.push_back(r.per_vector[k]);
      positive = positive && r.per_vector[k] > 0;
    }
    rep.vector_names.push_back(thetas[k].name);
    rep.vector_monotone.push_back(strictly_decreasing(d));
    rep.vector_fits.push_back(positive ? fit_rate(lad.epsilons, d) : RateFit{});
    rep.pass = rep.pass && rep.vector_monotone.back();
  }
  std::vector<double> dmax;
  for (const auto& r : rep.rungs) dmax.push_back(r.distance);
  rep.monotone = strictly_decreasing(dmax);
  rep.note = "no rate is asserted for the repulsive case; pass is monotone decrease of every vector";
  return rep;
}

SpectrumReport spectrum_convergence(const EpsilonLadder& ladder, const TubeOperatorSpec& spec_template,
                                    const TubeGrid& grid, const Operator1D& limit_op, const LabOptions& opt) {
  ladder.validate();
  SpectrumReport rep;
  rep.limit_discrete = limit_op.eigenvalues(1)[0];
  const double twist_shift = spec_template.twist.family == TwistFamily::constant_rate
                                 ? spec_template.twist.rate * spec_template.twist.rate * grid.transverse.C_S
                                 : 0.0;
  rep.limit_analytic = spec_template.twist.family == TwistFamily::compact_bump
                           ? rep.limit_discrete
                           : -ladder.kappa * ladder.kappa / 4 + twist_shift;
  rep.bound_state = ladder.kappa > 0;
  std::vector<int> perm;
  if (rep.bound_state) perm = parity_permutation(spec_template, grid);

  auto rung = [&](std::size_t idx) {
    const double eps = ladder.epsilons[idx];
    const TubeOperatorSpec spec = rung_spec(spec_template, ladder, eps);
    const auto forms = assemble_a_forms(spec, grid);
    const double reg = std::pow(eps, ladder.delta);
    SpectrumRung r;
    r.epsilon = eps;
    const double floor = -std::abs(ladder.kappa) / reg - 2.0 - twist_shift;
    const EigenPairs low = lowest_eigenpairs(forms.first.matrix, 1, floor, opt.seed, {}, 1e-10, 400);
    r.lowest = low.values[0];
    r.lowest_error = std::abs(r.lowest - rep.limit_analytic);
    if (rep.bound_state) {
      const Projector odd = [&](Vec& v) {
        Vec p(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) p[i] = 0.5 * (v[i] - v[perm[i]]);
        v = p;
      };
      const EigenPairs br = lowest_eigenpairs(forms.first.matrix, 1, rep.limit_discrete - 1.0, opt.seed, odd, 1e-10, 400);
      r.dirichlet_branch = br.values[0];
      r.branch_error = std::abs(r.dirichlet_branch - rep.limit_analytic);
    } else {
      r.dirichlet_branch = std::numeric_limits<double>::quiet_NaN();
      r.branch_error = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
  };
  rep.rungs = run_rungs<SpectrumRung>(ladder.epsilons.size(), opt.jobs, rung, ladder.epsilons);
  std::vector<double> e1, e2;
  for (const auto& r : rep.rungs) {
    e1.push_back(r.lowest_error);
    e2.push_back(r.branch_error);
  }
  rep.lowest_monotone = strictly_decreasing(e1);
  rep.branch_monotone = rep.bound_state && strictly_decreasing(e2);
  if (!rep.bound_state) {
    for (const auto& r : rep.rungs)
      if (r.lowest < -1e-9) rep.bound_state = true;
  }
  return rep;
}

KlausReport klaus_check(double kappa, double delta, const std::vector<double>& ladder,
                        const PotentialDensity& density, double bounding_radius_sq, double threshold, int samples) {
  if (!(kappa > 0)) fail("kappa-sign", "Klaus conditions are checked for kappa > 0");
  check_delta(delta);
  KlausReport rep;
  rep.g = kappa / 2;
  rep.threshold = threshold;
  std::vector<double> xs(samples);
  for (int i = 0; i < samples; ++i) xs[i] = std::pow(10.0, -6.0 + 6.0 * i / (samples - 1));

  // trapezoid on [0,1] under x = t^3, doubled by symmetry
  auto trapezoid = [&](const std::function<double(double)>& f, int n) {
    double s = 0;
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      const double w = (k == 0 || k == n) ? 0.5 : 1.0;
      s += w * f(t * t * t) * 3 * t * t;
    }
    return 2 * s / n;
  };

  rep.condition_i = true;
  rep.condition_ii = true;
  for (double eps : ladder) {
    KlausRung r;
    r.epsilon = eps;
    r.envelope_ok = true;
    for (double x : xs) {
      const double v = std::abs(eval_V_eps(x, kappa, eps, delta, density));
      const double excess = v - kappa / x;
      r.envelope_worst = std::max(r.envelope_worst, excess);
      if (excess > 1e-8 * kappa / x) r.envelope_ok = false;
    }
    const auto v = [&](double x) { return eval_V_eps(x, kappa, eps, delta, density); };
    r.l1_norm = trapezoid([&](double x) { return std::abs(v(x)); }, 4000);
    r.l1_refined = trapezoid([&](double x) { return std::abs(v(x)); }, 8000);
    r.integral = -r.l1_norm;
    const double a = std::pow(eps, delta);
    const double ek = eps * eps * bounding_radius_sq;
    r.oracle_integral =
        -2 * kappa * integrate([&](double x) { return 1.0 / (std::sqrt(x * x + ek) + a); }, {0.0, std::min(1.0, 10 * eps), 1.0});
    for (double x = 0.1; x <= 1.0 + 1e-12; x += 0.05)
      r.pointwise_residual = std::max(r.pointwise_residual, std::abs(v(x) + kappa / x));
    rep.condition_i = rep.condition_i && r.envelope_ok;
    rep.condition_ii = rep.condition_ii && std::isfinite(r.l1_norm) &&
                       std::abs(r.l1_norm - r.l1_refined) <= 1e-3 * r.l1_refined;
    rep.rungs.push_back(r);
  }
  std::vector<double> res, integ;
  for (const auto& r : rep.rungs) {
    res.push_back(r.pointwise_residual);
    integ.push_back(r.integral);
  }
  rep.condition_iii = strictly_decreasing(res);
  rep.condition_iv = strictly_decreasing(integ) && integ.back() < threshold;
  for (std::size_t i = 1; i < rep.rungs.size(); ++i) {
    const double gap = rep.rungs[i].integral - rep.rungs[i - 1].integral;
    const double oracle = rep.rungs[i].oracle_integral - rep.rungs[i - 1].oracle_integral;
    rep.max_gap_deviation = std::max(rep.max_gap_deviation, std::abs(gap - oracle) / std::abs(oracle));
  }
  rep.condition_iv = rep.condition_iv && rep.max_gap_deviation <= 0.2;
  // V has one sign, so int |V| / int (-V) is identically 1
  double abs_sum = 0, neg_sum = 0;
  for (const auto& r : rep.rungs) {
    abs_sum += r.l1_norm;
    neg_sum += -r.integral;
  }
  rep.ratio_v = neg_sum > 0 ? abs_sum / neg_sum : 1.0;
  rep.condition_v = rep.ratio_v == 1.0;
  rep.pass = rep.condition_i && rep.condition_ii && rep.condition_iii && rep.condition_iv && rep.condition_v;
  return rep;
}

TrialFunction trial_function(const std::string& name) {
  if (name == "x_gauss")
    return {name, [](double x) { return x * std::exp(-x * x); },
            [](double x) { return (1 - 2 * x * x) * std::exp(-x * x); }};
  if (name == "gauss")
    return {name, [](double x) { return std::exp(-x * x); }, [](double x) { return -2 * x * std::exp(-x * x); }};
  if (name == "x2_gauss")
    return {name, [](double x) { return x * x * std::exp(-x * x); },
            [](double x) { return (2 * x - 2 * x * x * x) * std::exp(-x * x); }};
  fail("trial-unknown", "unknown trial function '" + name + "'");
}

namespace {

struct GammaPieces {
  double kinetic = 0;
  double twist = 0;
};

GammaPieces gamma_pieces(const TrialFunction& w, const TransverseBasis& basis, const TwistProfile& twist) {
  GammaPieces p;
  const std::vector<double> br{-9, -1, 0, 1, 9};
  p.kinetic = integrate([&](double x) { return w.dw(x) * w.dw(x); }, br);
  if (!twist.is_zero()) {
    double orth = 0;
    if (!basis.axisymmetric) orth = basis.u0.cwiseProduct(basis.angular * basis.u0).dot(basis.weights);
    p.twist = integrate(
        [&](double x) {
          const double a = twist.derivative(x);
          return a * a * basis.C_S * w.w(x) * w.w(x) - 2 * a * w.w(x) * w.dw(x) * orth;
        },
        br);
  }
  return p;
}

double coulomb_part(const TrialFunction& w, const PotentialDensity& rho, double eps) {
  auto u = [&](double x) {
    double s = 0;
    for (Eigen::Index k = 0; k < rho.mass.size(); ++k) {
      const double er = eps * rho.radius[k];
      s += rho.mass[k] / std::sqrt(x * x + er * er);
    }
    return w.w(x) * w.w(x) * s;
  };
  const double e = std::min(1.0, eps);
  return integrate(u, {-9, -1, -e, -e * 1e-3, 0, e * 1e-3, e, 1, 9});
}

}  // namespace

GammaReport gamma_trial_check(const TrialFunction& w, const std::vector<double>& ladder, double kappa,
                              const TransverseBasis& basis, const TwistProfile& twist, bool grid_check,
                              std::uint64_t seed) {
  if (kappa > 0) fail("kappa-sign", "Gamma trial uses kappa <= 0");
  if (std::abs(w.w(0.0)) > 1e-14) fail("not-in-limit-domain", "w(0) != 0, the limit form is +infinity");
  GammaReport rep;
  rep.epsilons = ladder;
  const GammaPieces p = gamma_pieces(w, basis, twist);
  const PotentialDensity rho = make_density(basis);
  for (double eps : ladder) rep.values.push_back(p.kinetic + p.twist - kappa * coulomb_part(w, rho, eps));
  const double mass = basis.weights.cwiseProduct(basis.u0.cwiseAbs2()).sum();
  const double limit_coulomb =
      integrate([&](double x) { return x == 0 ? 0.0 : w.w(x) * w.w(x) / std::abs(x); }, {-9, -1, 0, 1, 9});
  rep.limit = p.kinetic + p.twist - kappa * mass * limit_coulomb;
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.values.size(); ++i) rep.monotone = rep.monotone && rep.values[i] >= rep.values[i - 1];
  rep.relative_error = std::abs(rep.values.back() - rep.limit) / std::max(std::abs(rep.limit), 1e-300);

  rep.liminf_ok = true;
  if (grid_check) {
    TubeOperatorSpec spec;
    spec.kappa = kappa;
    spec.twist = twist;
    spec.mode = basis.axisymmetric ? TubeMode::axisymmetric : TubeMode::full_tensor;
    spec.x_length = 8;
    spec.x_spacing = 0.01;
    TubeGrid grid{make_grid(spec.x_length, spec.x_spacing), basis};
    Vec wx(grid.x.size());
    for (int i = 0; i < grid.x.size(); ++i) wx[i] = w.w(grid.x.node(i));
    const Vec base = lift(wx, grid);
    const Vec noise = project_onto_L(random_vector(grid.size(), seed), grid).eta;
    for (double eps : ladder) {
      spec.epsilon = eps;
      const SparseOperator b = assemble_b_form(spec, grid);
      const Vec eta = noise / std::sqrt(b.form(noise));
      rep.grid_values.push_back(b.form(base + eps * eta));
    }
    rep.liminf_ok = rep.grid_values.back() >= rep.limit - 0.01 * std::abs(rep.limit);
  }
  rep.pass = rep.monotone && rep.relative_error <= 0.01 && rep.liminf_ok;
  return rep;
}

GammaReport gamma_divergence_check(const TrialFunction& w, const std::vector<double>& ladder, double kappa,
                                   const TransverseBasis& basis, const TwistProfile& twist) {
  if (!(kappa < 0)) fail("kappa-sign", "divergence check uses kappa < 0");
  GammaReport rep;
  rep.epsilons = ladder;
  const GammaPieces p = gamma_pieces(w, basis, twist);
  const PotentialDensity rho = make_density(basis);
  for (double eps : ladder) rep.values.push_back(p.kinetic + p.twist - kappa * coulomb_part(w, rho, eps));
  rep.limit = std::numeric_limits<double>::infinity();
  rep.monotone = strictly_increasing(rep.values);
  const double w0 = w.w(0.0);
  const double predicted = 2 * std::abs(kappa) * w0 * w0 * std::log(ladder.front() / ladder.back());
  rep.divergent = rep.monotone && rep.values.back() - rep.values.front() >= 0.5 * predicted && predicted > 0;
  rep.pass = rep.divergent;
  return rep;
}

}  // namespace tubelab
