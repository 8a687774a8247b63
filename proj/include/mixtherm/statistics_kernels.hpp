#pragma once

#include <vector>

#include "mixtherm/core_types.hpp"

namespace mixtherm {

/// G_k(alpha) = int_0^inf x^(2k+2) / (exp(x^2 - alpha) + eta) dx,
/// eta = +1 (Fermi), -1 (Bose). The Bose branch is a stand-in restricted to alpha <= 0.
struct KernelParams {
  int order = 0;  // k in {0, 1}
  double alpha = 0.0;
  Statistics statistics = Statistics::Fermi;

  void validate() const;
};

double g_integral(const KernelParams& params, double relative_tolerance = 1e-10);

/// log G_k(alpha); finite for arbitrarily negative alpha.
double log_g_integral(const KernelParams& params, double relative_tolerance = 1e-10);

/// Supremum of G_0 on the Bose branch, G_0(0-) = (sqrt(pi)/4) zeta(3/2).
double bose_saturation_value();

/// Solve G_0(alpha) = y. Throws BoseSaturation when y >= G_0(0-) for bosons.
double invert_density(double y, Statistics statistics, double relative_tolerance = 1e-10);

struct ClassicalRatioReport {
  std::vector<double> alphas;
  std::vector<double> deviations;  // |(2/3) G_1 / G_0 - 1|
  double max_deviation = 0.0;
};

/// Requires every alpha <= -10.
ClassicalRatioReport classical_ratio_check(const std::vector<double>& alphas,
                                           Statistics statistics = Statistics::Fermi);

/// (2/3) G_1(alpha) / G_0(alpha): the ideal-gas tau / theta of one species.
double kinetic_ratio(double alpha, Statistics statistics, double relative_tolerance = 1e-10);

}  // namespace mixtherm
