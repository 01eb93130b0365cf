#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tubelab/geometry.hpp"
#include "tubelab/line.hpp"
#include "tubelab/tube.hpp"

namespace tubelab {

struct EpsilonLadder {
  std::vector<double> epsilons;
  double delta = 0.3;
  double kappa = 1.0;
  double c = 2.0;

  /// Strictly decreasing, all in (0,1], at least 3 rungs.
  void validate() const;
};

struct RateFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;
};

/// Least-squares slope of log d against log eps; "degenerate-fit" on d <= 0.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& d);

bool strictly_decreasing(const std::vector<double>& v);
bool strictly_increasing(const std::vector<double>& v);

struct NormEstimate {
  double value = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

using LinearMap = std::function<VecC(const VecC&)>;

/// Largest singular value of D by power iteration on D* D from a seeded start.
/// Throws "norm-estimate-unreliable" when the Rayleigh history still moves by
/// more than 1% at the iteration cap.
NormEstimate estimate_norm(const LinearMap& d, const LinearMap& d_adjoint, Eigen::Index n, std::uint64_t seed,
                           int max_iterations = 30, double tol = 1e-4);

enum class Pairing { P1, P2, T1 };
const char* to_string(Pairing p);

struct RungResult {
  double epsilon = 0;
  double distance = 0;
  int iterations = 0;
  double seconds = 0;
  std::vector<double> history;
  std::vector<double> per_vector;
  std::optional<double> sector_bound;
};

struct ConvergenceReport {
  std::string theorem_tag;
  std::vector<RungResult> rungs;
  std::optional<RateFit> fit;
  std::optional<double> theoretical_slope;
  bool monotone = false;
  bool pass = false;
  std::vector<std::string> vector_names;
  std::vector<RateFit> vector_fits;
  std::vector<bool> vector_monotone;
  std::string note;
};

struct LabOptions {
  std::uint64_t seed = 12345;
  int jobs = 1;
  int power_iterations = 30;
  double power_tolerance = 1e-4;
  double rtol = 1e-9;
};

/// Limit operator on the tube's x-grid: H_D + alpha'^2 C(S) for kappa != 0,
/// the free (origin-coupled) Laplacian + alpha'^2 C(S) for kappa = 0.
Operator1D limit_operator(double kappa, const Grid1D& grid, const TwistProfile& twist, double C_S);

ConvergenceReport norm_resolvent_sweep(const EpsilonLadder& ladder, const TubeOperatorSpec& spec_template,
                                       const TubeGrid& grid, Pairing pairing, const LabOptions& opt = {});

/// Named test vector in nodal values on the tube grid.
struct TestVector {
  std::string name;
  Vec psi;
};

/// Standard set: L-sector smooth bump, L-sector concentrated near the origin, pure L-perp.
std::vector<TestVector> standard_test_vectors(const TubeGrid& grid);
/// Second transverse eigenvector made exactly orthogonal to u0.
Vec transverse_excited_mode(const TransverseBasis& basis);

ConvergenceReport strong_resolvent_sweep(const EpsilonLadder& ladder, const TubeOperatorSpec& spec_template,
                                         const TubeGrid& grid, const std::vector<TestVector>& thetas,
                                         const Operator1D& limit_op, double z = -1.0, const LabOptions& opt = {});

struct SpectrumRung {
  double epsilon = 0;
  double lowest = 0;
  double dirichlet_branch = 0;
  double lowest_error = 0;
  double branch_error = 0;
};

struct SpectrumReport {
  std::vector<SpectrumRung> rungs;
  double limit_discrete = 0;
  double limit_analytic = 0;
  bool bound_state = true;
  bool lowest_monotone = false;
  bool branch_monotone = false;
};

/// Lowest eigenvalue of A (= shifted A-dot minus c/eps^delta) per rung, plus
/// the lowest eigenvalue in the parity-odd sector.
SpectrumReport spectrum_convergence(const EpsilonLadder& ladder, const TubeOperatorSpec& spec_template,
                                    const TubeGrid& grid, const Operator1D& limit_op, const LabOptions& opt = {});

struct KlausRung {
  double epsilon = 0;
  bool envelope_ok = false;
  double envelope_worst = 0;
  double l1_norm = 0;
  double l1_refined = 0;
  double pointwise_residual = 0;
  double integral = 0;
  double oracle_integral = 0;
};

struct KlausReport {
  double g = 0, gamma = 1, beta = 1;
  std::vector<KlausRung> rungs;
  bool condition_i = false;
  bool condition_ii = false;
  bool condition_iii = false;
  bool condition_iv = false;
  double threshold = -5.0;
  double max_gap_deviation = 0;
  double ratio_v = 0;
  bool condition_v = false;
  bool pass = false;
};

KlausReport klaus_check(double kappa, double delta, const std::vector<double>& ladder,
                        const PotentialDensity& density, double bounding_radius_sq, double threshold = -5.0,
                        int samples = 50);

struct TrialFunction {
  std::string name;
  std::function<double(double)> w;
  std::function<double(double)> dw;
};

TrialFunction trial_function(const std::string& name);

struct GammaReport {
  std::vector<double> epsilons;
  std::vector<double> values;
  std::vector<double> grid_values;
  double limit = 0;
  bool monotone = false;
  double relative_error = 0;
  bool liminf_ok = false;
  bool pass = false;
  bool divergent = false;
};

/// b^eps(w u0) along the ladder against the limit form b^0(w).
GammaReport gamma_trial_check(const TrialFunction& w, const std::vector<double>& ladder, double kappa,
                              const TransverseBasis& basis, const TwistProfile& twist, bool grid_check = true,
                              std::uint64_t seed = 12345);

/// For w(0) != 0: b^eps(w u0) grows along the ladder like 2|kappa| w(0)^2 ln(1/eps).
GammaReport gamma_divergence_check(const TrialFunction& w, const std::vector<double>& ladder, double kappa,
                                   const TransverseBasis& basis, const TwistProfile& twist);

}  // namespace tubelab
