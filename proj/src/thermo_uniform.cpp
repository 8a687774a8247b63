#include "mixtherm/thermo_uniform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mixtherm/parallel.hpp"
#include "mixtherm/quadrature.hpp"
#include "mixtherm/statistics_kernels.hpp"

namespace mixtherm {

double ideal_density_target(const SpeciesSpec& species, double rho_a, double theta, double hbar) {
  return 2.0 * M_PI * M_PI * hbar * hbar * hbar * rho_a /
         (species.spin_degeneracy * std::pow(2.0 * species.mass * theta, 1.5));
}

double tau_from_alphas(const MixtureState& mixture, std::span<const SpeciesSpec> species,
                       std::span<const double> alphas, const UnitSystem& units) {
  const double theta = mixture.temperature;
  const double hbar = units.hbar;
  double sum = 0.0;
  for (std::size_t a = 0; a < species.size(); ++a) {
    // The ideal-gas kernel normalised to this density formula is twice the x-form G_1.
    const double g1 = 2.0 * g_integral({1, alphas[a], species[a].statistics});
    sum += species[a].spin_degeneracy * std::pow(species[a].mass, 1.5) * g1;
  }
  return std::sqrt(2.0) * std::pow(theta, 2.5) / (3.0 * M_PI * M_PI * hbar * hbar * hbar * mixture.total_density) *
         sum;
}

IdealSolution solve_ideal(const MixtureState& mixture, std::span<const SpeciesSpec> species,
                          const UnitSystem& units, double relative_tolerance) {
  units.validate();
  if (species.size() != mixture.fractions.size())
    throw Error(ErrorKind::IndexOutOfRange, "species list does not match mixture composition");
  if (!(mixture.temperature > 0.0))
    throw Error(ErrorKind::NonPositiveTemperature, "temperature must be positive");
  IdealSolution out;
  out.theta = mixture.temperature;
  out.rho = mixture.total_density;
  // tau = (2 theta / 3 rho) sum_a rho_a G_1(alpha_a) / G_0(alpha_a): identical to
  // the kernel-sum form, without a second round of quadrature.
  double weighted = 0.0;
  for (std::size_t a = 0; a < species.size(); ++a) {
    const double rho_a = mixture.species_density(a);
    const double y = ideal_density_target(species[a], rho_a, mixture.temperature, units.hbar);
    double alpha;
    try {
      alpha = invert_density(y, species[a].statistics, relative_tolerance);
    } catch (const Error& e) {
      throw Error(e.kind(), species[a].label + ": " + e.what(), species[a].label);
    }
    out.alphas.push_back(alpha);
    weighted += rho_a * 1.5 * kinetic_ratio(alpha, species[a].statistics, relative_tolerance);
  }
  out.tau = 2.0 * mixture.temperature / (3.0 * mixture.total_density) * weighted;
  return out;
}

namespace {

struct PairContext {
  std::size_t a, b;
  const PairPotential* potential;
  const CorrelationModel* correlation;
};

// Ordered pairs (a, b) with a non-vanishing potential; g_ab = g_ba for a > b.
std::vector<PairContext> interacting_pairs(std::size_t n, std::span<const PairPotential> potentials,
                                           std::span<const CorrelationModel> correlations) {
  std::vector<PairContext> out;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto* k = find_potential(potentials, a, b);
      if (k == nullptr || k->is_zero()) continue;
      const auto* g = find_correlation(correlations, a, b);
      if (g == nullptr)
        throw Error(ErrorKind::MissingCorrelation,
                    "no correlation model for pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
      out.push_back({a, b, k, g});
    }
  return out;
}

quad::Result radial_pieces(const PairPotential& k, const quad::Integrand& f, double tail_split_scale,
                           const quad::Options& q) {
  const double begin = k.range_begin();
  const double split = k.compact_support() ? k.range_end() : k.range_end() * tail_split_scale;
  std::vector<double> points{begin};
  for (double b : k.breakpoints())
    if (b > begin && b < split) points.push_back(b);
  if (split > points.back()) points.push_back(split);
  return quad::integrate_pieces(f, points, !k.compact_support(), q);
}

double radial_integral(const PairPotential& k, const quad::Integrand& f, const RadialOptions& options,
                       const std::string& what, double absolute = 0.0) {
  return quad::require(radial_pieces(k, f, options.tail_split_scale, {options.relative, absolute, 8000}), what);
}

double mean_at_jump(const std::function<double(double)>& f, double r) {
  const double eps = 1e-9 * std::max(r, 1.0);
  return 0.5 * (f(r - eps) + f(r + eps));
}

}  // namespace

ThermoPoint evaluate_thermo(const MixtureState& mixture, double tau, std::span<const PairPotential> potentials,
                            std::span<const CorrelationModel> correlations, const RadialOptions& options) {
  const double theta = mixture.temperature;
  const double rho = mixture.total_density;
  ThermoPoint out;
  out.tau = tau;
  out.kinetic_energy = 1.5 * tau * rho;
  out.kinetic_pressure = rho * tau;
  out.energy = out.kinetic_energy;
  out.pressure = out.kinetic_pressure;
  for (const auto& pair : interacting_pairs(mixture.fractions.size(), potentials, correlations)) {
    const auto& k = *pair.potential;
    const auto& g = *pair.correlation;
    const double weight = mixture.species_density(pair.a) * mixture.species_density(pair.b);
    auto g_at = [&](double r) { return g(theta, rho, r); };

    const double energy_integral =
        radial_integral(k, [&](double r) { return r * r * k.value(r) * g_at(r); }, options, "energy integral");
    double virial_integral = radial_integral(
        k, [&](double r) { return r * r * r * k.derivative(r) * g_at(r); }, options, "virial integral");
    for (const auto& jump : k.jumps()) virial_integral += std::pow(jump.r, 3) * jump.delta * mean_at_jump(g_at, jump.r);

    const double e_term = 2.0 * M_PI * weight * energy_integral;
    const double p_term = -2.0 * M_PI / 3.0 * weight * virial_integral;
    out.energy += e_term;
    out.pressure += p_term;
    out.energy_terms.push_back({pair.a, pair.b, e_term});
    out.pressure_terms.push_back({pair.a, pair.b, p_term});
  }
  return out;
}

double internal_energy(const MixtureState& mixture, double tau, std::span<const PairPotential> potentials,
                       std::span<const CorrelationModel> correlations, const RadialOptions& options) {
  return evaluate_thermo(mixture, tau, potentials, correlations, options).energy;
}

double pressure(const MixtureState& mixture, double tau, std::span<const PairPotential> potentials,
                std::span<const CorrelationModel> correlations, const RadialOptions& options) {
  return evaluate_thermo(mixture, tau, potentials, correlations, options).pressure;
}

double tau_equation_rhs(const MixtureState& mixture, std::span<const PairPotential> potentials,
                        std::span<const CorrelationModel> correlations, const RadialOptions& options) {
  const double theta = mixture.temperature;
  const double rho = mixture.total_density;
  double sum = 0.0;
  for (const auto& pair : interacting_pairs(mixture.fractions.size(), potentials, correlations)) {
    const auto& k = *pair.potential;
    const auto& g = *pair.correlation;
    auto terms = [&](double r) {
      const double kr = k.value(r);
      std::array<double, 3> t{r * theta * k.derivative(r) * g.d_theta(theta, rho, r), 0.0, 0.0};
      if (kr != 0.0) t = {t[0], -3.0 * rho * kr * g.d_rho(theta, rho, r), r * kr * g.d_r(theta, rho, r)};
      return t;
    };
    auto integrand = [&](double r) {
      const auto t = terms(r);
      return r * r * (t[0] + t[1] + t[2]);
    };
    // The bracket may cancel pointwise (g = exp(-K/theta) gives exactly zero),
    // so the error is judged against the size of its separate terms, plus the
    // roundoff carried in by differenced partials.
    auto weights = [&](double r) {
      return std::array<double, 3>{r * theta * std::abs(k.derivative(r)), 3.0 * rho * std::abs(k.value(r)),
                                   r * std::abs(k.value(r))};
    };
    // A rough yardstick is enough; its tail may be nothing but differencing noise.
    const double scale = radial_pieces(
                             k,
                             [&](double r) {
                               const auto t = terms(r);
                               return r * r * (std::abs(t[0]) + std::abs(t[1]) + std::abs(t[2]));
                             },
                             options.tail_split_scale, {1e-3, 0.0, 40})
                             .magnitude;
    RadialOptions loose = options;
    loose.relative = std::max(options.relative, 1e-6);
    double noise = 0.0;
    if (g.partial_noise(theta, rho, k.range_begin() + 1.0) != std::array<double, 3>{})
      noise = radial_integral(
          k,
          [&](double r) {
            const auto w = weights(r);
            const auto n = g.partial_noise(theta, rho, r);
            return r * r * (w[0] * n[0] + w[1] * n[1] + w[2] * n[2]);
          },
          loose, "tau-equation noise");
    double integral =
        radial_integral(k, integrand, options, "tau-equation integral", options.relative * scale + 10.0 * noise);
    for (const auto& jump : k.jumps()) {
      auto dg = [&](double r) { return g.d_theta(theta, rho, r); };
      integral += std::pow(jump.r, 3) * theta * jump.delta * mean_at_jump(dg, jump.r);
    }
    sum += mixture.species_density(pair.a) * mixture.species_density(pair.b) * integral;
  }
  return 4.0 * M_PI / (3.0 * rho) * sum;
}

double tau_equation_lhs_fd(const std::function<double(double, double)>& tau, double theta, double rho,
                           double h_theta, double h_rho) {
  const double dtheta = (tau(theta + h_theta, rho) - tau(theta - h_theta, rho)) / (2.0 * h_theta);
  const double drho = (tau(theta, rho + h_rho) - tau(theta, rho - h_rho)) / (2.0 * h_rho);
  return 2.0 * theta * dtheta + 3.0 * rho * drho - 2.0 * tau(theta, rho);
}

void TauDomain::validate() const {
  if (!(theta_min > 0.0) || !(theta_max > theta_min))
    throw Error(ErrorKind::DomainError, "tau domain needs 0 < theta_min < theta_max");
  if (!(rho_min > 0.0) || !(rho_max > rho_min))
    throw Error(ErrorKind::DomainError, "tau domain needs 0 < rho_min < rho_max");
  if (n_theta < 2 || n_rho < 2) throw Error(ErrorKind::DomainError, "tau domain needs at least 2x2 points");
  if (characteristics != 0 && characteristics < 4)
    throw Error(ErrorKind::DomainError, "need at least four characteristics to interpolate");
}

double TauDomain::theta_at(int i) const { return theta_min + (theta_max - theta_min) * i / (n_theta - 1); }
double TauDomain::rho_at(int j) const { return rho_min + (rho_max - rho_min) * j / (n_rho - 1); }

namespace {

// Dormand-Prince 5(4) on dtau/ds = 2 tau + F(theta_a e^{2s}, rho_a e^{3s}) from
// s = 0 down through each (negative, descending) target.
struct DopriResult {
  std::vector<double> values;
  int accepted = 0;
  int rejected = 0;
};

DopriResult integrate_backward(double tau0, const std::function<double(double)>& rhs_of_s,
                               const std::vector<double>& targets, double rtol, int max_steps) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto f = [&](double s, double tau) { return 2.0 * tau + rhs_of_s(s); };
  DopriResult out;
  double s = 0.0;
  double y = tau0;
  double k1 = f(s, y);
  double h = -0.05;
  const double atol = rtol * 1e-3 * std::max(std::abs(tau0), 1e-300);
  for (double target : targets) {
    while (s > target) {
      if (out.accepted + out.rejected > max_steps)
        throw Error(ErrorKind::StiffIntegration, "characteristic step budget exhausted");
      if (s + h < target) h = target - s;
      const double k2 = f(s + c2 * h, y + h * a21 * k1);
      const double k3 = f(s + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const double k4 = f(s + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const double k5 = f(s + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const double k6 = f(s + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const double y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const double k7 = f(s + h, y_new);
      const double err_abs = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
      const double scale = atol + rtol * std::max(std::abs(y), std::abs(y_new));
      const double err = err_abs / scale;
      if (!std::isfinite(err)) throw Error(ErrorKind::StiffIntegration, "non-finite characteristic state");
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        s += h;
        y = y_new;
        k1 = k7;
        ++out.accepted;
        h *= factor;
      } else {
        ++out.rejected;
        h *= std::min(factor, 1.0);
        if (std::abs(h) < 1e-12) throw Error(ErrorKind::StiffIntegration, "characteristic step underflow");
      }
    }
    s = target;
    out.values.push_back(y);
  }
  return out;
}

}  // namespace

TauField integrate_characteristics(const TauDomain& domain, const AnchorFn& anchor, const RhsFn& rhs,
                                   const CharacteristicsOptions& options) {
  domain.validate();
  TauField field;
  field.domain = domain;
  for (int i = 0; i < domain.n_theta; ++i) field.theta.push_back(domain.theta_at(i));
  for (int j = 0; j < domain.n_rho; ++j) field.rho.push_back(domain.rho_at(j));

  const int count = domain.characteristics > 0 ? domain.characteristics : 4 * std::max(domain.n_theta, domain.n_rho);
  const double c_min = domain.rho_min * std::pow(domain.theta_max, -1.5);
  const double c_max = domain.rho_max * std::pow(domain.theta_min, -1.5);
  std::vector<double> log_c(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    log_c[static_cast<std::size_t>(k)] = std::log(c_min) + (std::log(c_max) - std::log(c_min)) * k / (count - 1);

  // Every characteristic starts at theta_max and runs down through all grid thetas.
  const double theta_anchor = domain.theta_max;
  std::vector<double> targets;
  std::vector<double> thetas_desc(field.theta.rbegin(), field.theta.rend());
  for (double t : thetas_desc) targets.push_back(0.5 * std::log(t / theta_anchor));

  field.traces.resize(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), options.threads, [&](std::size_t k) {
    const double c = std::exp(log_c[k]);
    const double rho_anchor = c * std::pow(theta_anchor, 1.5);
    const double tau_anchor = anchor(theta_anchor, rho_anchor) + options.anchor_offset;
    auto rhs_of_s = [&](double s) { return rhs(theta_anchor * std::exp(2.0 * s), rho_anchor * std::exp(3.0 * s)); };
    auto solved = integrate_backward(tau_anchor, rhs_of_s, targets, options.relative, options.max_steps);
    auto& trace = field.traces[k];
    trace.label = c;
    trace.anchor_theta = theta_anchor;
    trace.anchor_rho = rho_anchor;
    trace.anchor_tau = tau_anchor;
    trace.anchor_correction = std::abs(tau_anchor / theta_anchor - 1.0);
    trace.accepted_steps = solved.accepted;
    trace.rejected_steps = solved.rejected;
    trace.theta = thetas_desc;
    trace.tau = std::move(solved.values);
  });
  for (const auto& t : field.traces) field.max_anchor_correction = std::max(field.max_anchor_correction, t.anchor_correction);

  // Monotone interpolation across characteristics in log c at each grid theta.
  field.tau.assign(field.theta.size() * field.rho.size(), 0.0);
  for (std::size_t i = 0; i < field.theta.size(); ++i) {
    const std::size_t row = field.theta.size() - 1 - i;  // traces are stored descending
    std::vector<double> ys;
    ys.reserve(static_cast<std::size_t>(count));
    for (const auto& t : field.traces) ys.push_back(t.tau[row]);
    MonotoneCubic across(log_c, std::move(ys));
    for (std::size_t j = 0; j < field.rho.size(); ++j) {
      const double x = std::clamp(std::log(field.rho[j] * std::pow(field.theta[i], -1.5)), across.front(), across.back());
      field.tau[i * field.rho.size() + j] = across(x);
    }
  }
  return field;
}

TauField solve_tau_field(const TauDomain& domain, std::span<const SpeciesSpec> species,
                         std::span<const PairPotential> potentials,
                         std::span<const CorrelationModel> correlations, const UnitSystem& units,
                         const CharacteristicsOptions& options) {
  domain.validate();
  const auto base = build_mixture(species, domain.theta_max);

  // The high-theta edge must be near-classical for the ideal anchor to stand in for tau -> theta.
  for (int j = 0; j < domain.n_rho; ++j) {
    const auto edge = solve_ideal(base.at(domain.theta_max, domain.rho_at(j)), species, units);
    for (std::size_t a = 0; a < edge.alphas.size(); ++a)
      if (!(edge.alphas[a] < options.anchor_alpha))
        throw Error(ErrorKind::AnchorNotClassical,
                    "alpha of '" + species[a].label + "' is " + std::to_string(edge.alphas[a]) +
                        " on the high-theta edge (need < " + std::to_string(options.anchor_alpha) + ")",
                    species[a].label);
  }

  AnchorFn anchor = [&](double theta, double rho) { return solve_ideal(base.at(theta, rho), species, units).tau; };
  RhsFn rhs = [&](double theta, double rho) {
    return tau_equation_rhs(base.at(theta, rho), potentials, correlations, options.radial);
  };
  return integrate_characteristics(domain, anchor, rhs, options);
}

HighTemperatureReport high_temperature_condition(const MixtureState& mixture,
                                                 std::span<const PairPotential> potentials,
                                                 std::span<const CorrelationModel> correlations,
                                                 const std::vector<double>& theta_sequence,
                                                 const RadialOptions& options) {
  for (std::size_t i = 1; i < theta_sequence.size(); ++i)
    if (!(theta_sequence[i] > theta_sequence[i - 1]))
      throw Error(ErrorKind::DomainError, "theta sequence must increase");
  HighTemperatureReport report;
  for (double theta : theta_sequence) {
    report.theta.push_back(theta);
    report.rhs.push_back(tau_equation_rhs(mixture.at(theta, mixture.total_density), potentials, correlations, options));
  }
  return report;
}

double bose_onset_temperature(const SpeciesSpec& species, double rho_a, double hbar) {
  // rho_a = kappa (2 m theta)^{3/2} / (2 pi^2 hbar^3) G_0(0-)
  const double scaled = 2.0 * M_PI * M_PI * std::pow(hbar, 3) * rho_a / (species.spin_degeneracy * bose_saturation_value());
  return std::pow(scaled, 2.0 / 3.0) / (2.0 * species.mass);
}

CondensateScan condensate_scan(const MixtureState& mixture, std::span<const SpeciesSpec> species,
                               const std::vector<double>& theta_descending, const UnitSystem& units) {
  for (std::size_t i = 1; i < theta_descending.size(); ++i)
    if (!(theta_descending[i] < theta_descending[i - 1]))
      throw Error(ErrorKind::DomainError, "condensate scan needs a descending theta grid");

  auto saturated_at = [&](double theta) {
    for (std::size_t a = 0; a < species.size(); ++a) {
      if (species[a].statistics != Statistics::Bose) continue;
      const double y = ideal_density_target(species[a], mixture.species_density(a), theta, units.hbar);
      if (y >= bose_saturation_value()) return true;
    }
    return false;
  };

  CondensateScan scan;
  std::optional<double> last_clear;
  for (double theta : theta_descending) {
    CondensateRow row;
    row.theta = theta;
    try {
      auto solved = solve_ideal(mixture.at(theta, mixture.total_density), species, units);
      row.tau = solved.tau;
      row.alphas = solved.alphas;
      if (!scan.onset_grid) last_clear = theta;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BoseSaturation) throw;
      row.saturated = true;
      row.saturated_species = e.path();
      if (!scan.onset_grid) scan.onset_grid = theta;
    }
    scan.rows.push_back(std::move(row));
  }

  if (scan.onset_grid && last_clear) {
    double hi = *last_clear;  // clear
    double lo = *scan.onset_grid;  // saturated
    while (hi - lo > 1e-13 * hi) {
      const double mid = 0.5 * (lo + hi);
      (saturated_at(mid) ? lo : hi) = mid;
    }
    scan.onset_refined = 0.5 * (lo + hi);
  }
  return scan;
}

}  // namespace mixtherm
