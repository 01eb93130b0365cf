#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tubelab/lab.hpp"

namespace tubelab {

enum class QepsScenario { bounded_profile, flat_profile };

const char* to_string(QepsScenario s);
QepsScenario qeps_scenario_from_string(const std::string& name);

struct QepsParams {
  double p = 0.9;
  double amplitude = 1.0;
};

struct QepsEntry {
  double epsilon = 0;
  double value = 0;
  std::optional<double> bound;
};

/// Q^eps by nested adaptive quadrature. Scenario 1 uses |psi| = |w(x)| u^p with
/// w(x) = exp(-x^2); scenario 2 uses |psi| = M on [0,1/2] x [0, 1/4 + eps^2].
QepsEntry qeps_estimate(QepsScenario scenario, double kappa, double eps, double delta, const QepsParams& params);

struct QepsReport {
  QepsScenario scenario = QepsScenario::bounded_profile;
  std::vector<QepsEntry> entries;
  std::optional<RateFit> fit;
  double theoretical_slope = 0;
  bool bound_ok = true;
  bool monotone = false;
  bool pass = false;
};

QepsReport qeps_sweep(QepsScenario scenario, double kappa, const std::vector<double>& ladder, double delta,
                      const QepsParams& params);

}  // namespace tubelab
