#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mixtherm/core_types.hpp"

namespace mixtherm {

/// Ideal-gas tau of a mixture together with each species' degeneracy parameter.
struct IdealSolution {
  double theta = 0.0;
  double rho = 0.0;
  double tau = 0.0;
  std::vector<double> alphas;
};

/// G_0 target for species a: the x-form kernel value that reproduces the
/// ideal density rho_a = kappa_a (2 m_a theta)^{3/2} / (2 pi^2 hbar^3) G_0(alpha_a).
double ideal_density_target(const SpeciesSpec& species, double rho_a, double theta, double hbar = 1.0);

IdealSolution solve_ideal(const MixtureState& mixture, std::span<const SpeciesSpec> species,
                          const UnitSystem& units = {}, double relative_tolerance = 1e-10);

/// Ideal tau recomputed from stored alphas, to audit an IdealSolution.
double tau_from_alphas(const MixtureState& mixture, std::span<const SpeciesSpec> species,
                       std::span<const double> alphas, const UnitSystem& units = {});

struct RadialOptions {
  double relative = 1e-10;
  /// Multiplies each potential's range end, where the analytic tail begins.
  double tail_split_scale = 1.0;
};

struct PairTerm {
  std::size_t a = 0;
  std::size_t b = 0;
  double value = 0.0;
};

struct ThermoPoint {
  double tau = 0.0;
  double energy = 0.0;          // per unit volume
  double kinetic_energy = 0.0;  // (3/2) tau N
  double pressure = 0.0;
  double kinetic_pressure = 0.0;  // rho tau
  std::vector<PairTerm> energy_terms;    // ordered pairs
  std::vector<PairTerm> pressure_terms;  // ordered pairs
};

/// E / V = (3/2) tau rho + 2 pi sum_{a,b} rho_a rho_b int r^2 K_ab g_ab dr.
double internal_energy(const MixtureState& mixture, double tau, std::span<const PairPotential> potentials,
                       std::span<const CorrelationModel> correlations, const RadialOptions& options = {});

/// p = rho tau - (2 pi / 3) sum_{a,b} rho_a rho_b int r^3 K'_ab g_ab dr.
double pressure(const MixtureState& mixture, double tau, std::span<const PairPotential> potentials,
                std::span<const CorrelationModel> correlations, const RadialOptions& options = {});

ThermoPoint evaluate_thermo(const MixtureState& mixture, double tau, std::span<const PairPotential> potentials,
                            std::span<const CorrelationModel> correlations, const RadialOptions& options = {});

/// Right-hand side of the tau(theta, rho) equation at fixed composition.
double tau_equation_rhs(const MixtureState& mixture, std::span<const PairPotential> potentials,
                        std::span<const CorrelationModel> correlations, const RadialOptions& options = {});

/// 2 theta d(tau)/d(theta) + 3 rho d(tau)/d(rho) - 2 tau by central differences.
double tau_equation_lhs_fd(const std::function<double(double, double)>& tau, double theta, double rho,
                           double h_theta, double h_rho);

struct TauDomain {
  double theta_min = 1.0;
  double theta_max = 10.0;
  double rho_min = 0.1;
  double rho_max = 1.0;
  int n_theta = 20;
  int n_rho = 20;
  int characteristics = 0;  // 0 = 4 * max(n_theta, n_rho)

  void validate() const;
  double theta_at(int i) const;
  double rho_at(int j) const;
};

struct CharacteristicTrace {
  double label = 0.0;  // c = rho theta^{-3/2}
  double anchor_theta = 0.0;
  double anchor_rho = 0.0;
  double anchor_tau = 0.0;
  double anchor_correction = 0.0;  // |tau_ideal / theta - 1| at the anchor
  int accepted_steps = 0;
  int rejected_steps = 0;
  std::vector<double> theta;  // grid thetas, descending from the anchor
  std::vector<double> tau;
};

struct TauField {
  TauDomain domain;
  std::vector<double> theta;
  std::vector<double> rho;
  std::vector<double> tau;  // row-major: tau[i * n_rho + j] at (theta[i], rho[j])
  std::vector<CharacteristicTrace> traces;
  double max_anchor_correction = 0.0;

  double at(int i, int j) const {
    return tau[static_cast<std::size_t>(i) * rho.size() + static_cast<std::size_t>(j)];
  }
};

struct CharacteristicsOptions {
  double relative = 1e-9;
  double anchor_alpha = -10.0;
  int threads = 1;
  int max_steps = 100000;
  RadialOptions radial = {};
  /// Added to every anchor value; used to probe stability.
  double anchor_offset = 0.0;
};

/// Method of characteristics for the tau equation along dtheta/ds = 2 theta,
/// drho/ds = 3 rho, dtau/ds = 2 tau + F(theta, rho); each characteristic is
/// anchored to the ideal-gas tau at theta_max.
TauField solve_tau_field(const TauDomain& domain, std::span<const SpeciesSpec> species,
                         std::span<const PairPotential> potentials,
                         std::span<const CorrelationModel> correlations, const UnitSystem& units = {},
                         const CharacteristicsOptions& options = {});

/// Characteristics with a caller-supplied anchor and right-hand side.
using AnchorFn = std::function<double(double theta, double rho)>;
using RhsFn = std::function<double(double theta, double rho)>;
TauField integrate_characteristics(const TauDomain& domain, const AnchorFn& anchor, const RhsFn& rhs,
                                   const CharacteristicsOptions& options = {});

struct HighTemperatureReport {
  std::vector<double> theta;
  std::vector<double> rhs;
};

/// Tau-equation right-hand side at tau = theta along increasing theta.
HighTemperatureReport high_temperature_condition(const MixtureState& mixture,
                                                 std::span<const PairPotential> potentials,
                                                 std::span<const CorrelationModel> correlations,
                                                 const std::vector<double>& theta_sequence,
                                                 const RadialOptions& options = {});

struct CondensateRow {
  double theta = 0.0;
  bool saturated = false;
  std::optional<double> tau;
  std::vector<double> alphas;
  std::string saturated_species;
};

struct CondensateScan {
  bool experimental = true;
  std::vector<CondensateRow> rows;
  std::optional<double> onset_grid;     // first grid theta with saturation
  std::optional<double> onset_refined;  // bisection between the bracketing grid points
};

CondensateScan condensate_scan(const MixtureState& mixture, std::span<const SpeciesSpec> species,
                               const std::vector<double>& theta_descending, const UnitSystem& units = {});

/// Closed-form saturation temperature of one Bose species at density rho_a.
double bose_onset_temperature(const SpeciesSpec& species, double rho_a, double hbar = 1.0);

}  // namespace mixtherm
