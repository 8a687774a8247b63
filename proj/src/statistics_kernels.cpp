#include "mixtherm/statistics_kernels.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "mixtherm/quadrature.hpp"

namespace mixtherm {
namespace {

// Internal quadrature target, just above the GK15 roundoff floor of 50 eps per
// piece; tight enough that kinetic ratios stay clean at 1e-12.
constexpr double kInnerRelative = 3e-14;

// x^(2k+2) exp(-x^2) / (1 + eta exp(alpha - x^2)) for alpha <= 0; the overall
// factor exp(alpha) is kept out so deep classical alphas do not underflow.
double scaled_integrand(double x, int k, double alpha, int eta) {
  const double x2 = x * x;
  const double power = k == 0 ? x2 : x2 * x2;
  const double u = x2 - alpha;
  if (eta < 0) {
    // Bose: e^{-x^2} / (1 - e^{-u}) = e^{-x^2} / (-expm1(-u)); finite as u -> 0 against x^2.
    if (u == 0.0) return 0.0;
    return power * std::exp(-x2) / -std::expm1(-u);
  }
  return power * std::exp(-x2) / (1.0 + std::exp(-u));
}

// Direct Fermi integrand for alpha > 0.
double fermi_integrand(double x, int k, double alpha) {
  const double x2 = x * x;
  const double power = k == 0 ? x2 : x2 * x2;
  const double u = x2 - alpha;
  if (u > 0.0) {
    const double e = std::exp(-u);
    return power * e / (1.0 + e);
  }
  return power / (std::exp(u) + 1.0);
}

double inner_tolerance(double relative_tolerance) {
  return std::min(kInnerRelative, relative_tolerance);
}

}  // namespace

void KernelParams::validate() const {
  if (order != 0 && order != 1) throw Error(ErrorKind::DomainError, "kernel order must be 0 or 1");
  if (!std::isfinite(alpha)) throw Error(ErrorKind::DomainError, "alpha must be finite");
  if (statistics == Statistics::Bose && alpha > 0.0)
    throw Error(ErrorKind::DomainError, "Bose kernel is defined for alpha <= 0 only");
}

double log_g_integral(const KernelParams& params, double relative_tolerance) {
  params.validate();
  const int k = params.order;
  const double alpha = params.alpha;
  const double knee = std::sqrt(std::max(alpha, 0.0));
  const double split = knee + 5.0;
  // Beyond split + 30 the integrand carries exp(-(35^2)) relative weight at most.
  const double end = split + 30.0;
  quad::Options options{inner_tolerance(relative_tolerance), 0.0, 8000};
  const std::string what = "G_" + std::to_string(k) + "(" + std::to_string(alpha) + ")";

  if (params.statistics == Statistics::Fermi && alpha > 0.0) {
    std::vector<double> points{0.0};
    // Resolve the Fermi knee of width ~ 1/(2 sqrt(alpha)) at x = sqrt(alpha).
    const double width = 1.0 / (2.0 * std::max(knee, 1.0));
    if (knee - 40.0 * width > 0.0) points.push_back(knee - 40.0 * width);
    points.push_back(knee);
    points.push_back(std::min(knee + 40.0 * width, split));
    if (points.back() < split) points.push_back(split);
    points.push_back(end);
    auto f = [k, alpha](double x) { return fermi_integrand(x, k, alpha); };
    auto result = quad::integrate_pieces(f, points, false, options);
    if (!std::isfinite(result.value) || result.error > relative_tolerance * std::abs(result.value))
      throw Error(ErrorKind::QuadratureFailure, what + ": tolerance not met");
    return std::log(result.value);
  }

  const int eta = params.statistics == Statistics::Fermi ? 1 : -1;
  auto f = [k, alpha, eta](double x) { return scaled_integrand(x, k, alpha, eta); };
  auto result = quad::integrate_pieces(f, {0.0, 1.0, split, end}, false, options);
  if (!std::isfinite(result.value) || result.error > relative_tolerance * std::abs(result.value))
    throw Error(ErrorKind::QuadratureFailure, what + ": tolerance not met");
  return alpha + std::log(result.value);
}

double g_integral(const KernelParams& params, double relative_tolerance) {
  return std::exp(log_g_integral(params, relative_tolerance));
}

double bose_saturation_value() {
  static const double value = g_integral({0, 0.0, Statistics::Bose});
  return value;
}

double invert_density(double y, Statistics statistics, double relative_tolerance) {
  if (!(y > 0.0) || !std::isfinite(y))
    throw Error(ErrorKind::DomainError, "density kernel target must be positive");
  if (statistics == Statistics::Bose && y >= bose_saturation_value())
    throw Error(ErrorKind::BoseSaturation,
                "G_0 target " + std::to_string(y) + " at or above Bose supremum " +
                    std::to_string(bose_saturation_value()));

  const double log_y = std::log(y);
  auto residual = [&](double alpha) {
    return log_g_integral({0, alpha, statistics}, relative_tolerance) - log_y;
  };

  // Classical guess: G_0 ~ (sqrt(pi)/4) e^alpha; degenerate Fermi: G_0 ~ alpha^(3/2)/3.
  const double classical = std::log(4.0 * y / std::sqrt(M_PI));
  double lo, hi;
  if (statistics == Statistics::Bose) {
    hi = 0.0;
    lo = std::min(classical, 0.0) - 1.0;
    while (residual(lo) > 0.0) lo = 2.0 * lo - 1.0;
  } else {
    const double degenerate = std::pow(3.0 * y, 2.0 / 3.0);
    lo = std::min(classical, degenerate) - 1.0;
    hi = std::max(classical, degenerate) + 1.0;
    while (residual(lo) > 0.0) lo -= std::max(1.0, std::abs(lo));
    while (residual(hi) < 0.0) hi += std::max(1.0, std::abs(hi));
  }

  const double f_lo = residual(lo);
  const double f_hi = residual(hi);
  if (f_hi == 0.0) return hi;
  std::uintmax_t iterations = 200;
  boost::math::tools::eps_tolerance<double> tolerance(50);
  auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi, f_lo, f_hi, tolerance, iterations);
  const double alpha = 0.5 * (a + b);
  const double achieved = std::abs(std::expm1(residual(alpha)));
  if (iterations >= 200 || !(achieved <= relative_tolerance))
    throw Error(ErrorKind::ConvergenceFailure,
                "density inversion stalled at alpha " + std::to_string(alpha));
  return alpha;
}

double kinetic_ratio(double alpha, Statistics statistics, double relative_tolerance) {
  const double log_g1 = log_g_integral({1, alpha, statistics}, relative_tolerance);
  const double log_g0 = log_g_integral({0, alpha, statistics}, relative_tolerance);
  return 2.0 / 3.0 * std::exp(log_g1 - log_g0);
}

ClassicalRatioReport classical_ratio_check(const std::vector<double>& alphas, Statistics statistics) {
  ClassicalRatioReport report;
  for (double alpha : alphas) {
    if (alpha > -10.0) throw Error(ErrorKind::DomainError, "classical ratio check needs alpha <= -10");
    const double deviation = std::abs(kinetic_ratio(alpha, statistics) - 1.0);
    report.alphas.push_back(alpha);
    report.deviations.push_back(deviation);
    report.max_deviation = std::max(report.max_deviation, deviation);
  }
  return report;
}

}  // namespace mixtherm
