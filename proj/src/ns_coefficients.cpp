#include "mixtherm/ns_coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixtherm/quadrature.hpp"
#include "mixtherm/statistics_kernels.hpp"

namespace mixtherm {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// int f(p^2 / 2m) d^d p for d in {1, 3}.
double momentum_integral(const std::function<double(double)>& of_energy, double mass, int dimension,
                         double scale_energy) {
  const double p_scale = std::sqrt(2.0 * mass * scale_energy);
  auto radial = [&](double p) {
    const double e = of_energy(p * p / (2.0 * mass));
    return dimension == 3 ? 4.0 * M_PI * p * p * e : 2.0 * e;
  };
  quad::Options options{1e-13, 0.0, 4000};
  auto result = quad::integrate_pieces(radial, {0.0, p_scale, 4.0 * p_scale}, true, options);
  return quad::require(result, "momentum integral");
}

}  // namespace

double thermal_factor(const SpeciesSpec& species, double tau, double hbar, int dimension) {
  if (!(tau > 0.0)) throw Error(ErrorKind::NonPositiveTau, "tau must be positive");
  return species.density / species.spin_degeneracy *
         std::pow(2.0 * M_PI * hbar * hbar / (species.mass * tau), dimension / 2.0);
}

ThermalFactor thermal_factors(std::span<const SpeciesSpec> species, double tau, double hbar,
                              int dimension) {
  ThermalFactor out;
  for (const auto& s : species) out.values.push_back(thermal_factor(s, tau, hbar, dimension));
  return out;
}

double coefficient(const MultiIndex& s, const ThermalFactor& factors) {
  if (s.species_count() != factors.values.size())
    throw Error(ErrorKind::IndexOutOfRange, "multi-index and thermal factors disagree on species count");
  double value = 1.0;
  for (std::size_t a = 0; a < s.species_count(); ++a)
    value *= factorial(s[a]) * std::pow(factors.values[a], s[a]);
  return value;
}

double coefficient_by_recursion(const MultiIndex& s, const ThermalFactor& factors,
                                std::span<const std::size_t> species_order) {
  if (species_order.empty()) throw Error(ErrorKind::IndexOutOfRange, "empty descent order");
  MultiIndex current = s;
  double value = 1.0;
  std::size_t cursor = 0;
  while (current.order() > 0) {
    const std::size_t a = species_order[cursor++ % species_order.size()];
    if (a >= current.species_count()) throw Error(ErrorKind::IndexOutOfRange, "descent species out of range");
    if (current[a] == 0) continue;
    value *= current[a] * factors.values[a];
    current = current.lowered(a);
  }
  return value;
}

NsFamily::NsFamily(std::vector<SpeciesSpec> species, double tau, double hbar, int dimension)
    : species_(std::move(species)), tau_(tau), hbar_(hbar), dimension_(dimension) {
  if (!(tau > 0.0)) throw Error(ErrorKind::NonPositiveTau, "tau must be positive");
  if (dimension != 1 && dimension != 3) throw Error(ErrorKind::DomainError, "dimension must be 1 or 3");
  factors_ = thermal_factors(species_, tau_, hbar_, dimension_);
}

std::vector<double> default_z_grid(double tau, int points, double extent) {
  if (points < 2) throw Error(ErrorKind::DomainError, "z grid needs at least two points");
  std::vector<double> z(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) z[static_cast<std::size_t>(i)] = extent * tau * i / (points - 1);
  return z;
}

ReductionReport check_reduction(const Distribution& family, std::span<const SpeciesSpec> species,
                                const MultiIndex& s, std::size_t a, std::span<const double> z_grid,
                                double hbar, int dimension, double energy_scale) {
  if (a >= s.species_count() || s[a] < 1)
    throw Error(ErrorKind::IndexOutOfRange, "reduction needs s_a >= 1");
  const auto lowered = s.lowered(a);
  const auto& sp = species[a];
  const double prefactor =
      sp.spin_degeneracy / (s[a] * std::pow(2.0 * M_PI * hbar, dimension) * sp.density);

  ReductionReport report;
  for (double z : z_grid) {
    const double lower = family(lowered, z);
    const double reduced = prefactor * momentum_integral([&](double e) { return family(s, z + e); },
                                                         sp.mass, dimension, energy_scale);
    report.z.push_back(z);
    report.lower.push_back(lower);
    report.reduced.push_back(reduced);
    report.max_residual = std::max(report.max_residual, std::abs(reduced - lower) / std::abs(lower));
  }
  return report;
}

ReductionReport check_reduction(const NsFamily& family, const MultiIndex& s, std::size_t a,
                                std::span<const double> z_grid) {
  Distribution fn = [&family](const MultiIndex& idx, double z) { return family(idx, z); };
  auto report = check_reduction(fn, family.species(), s, a, z_grid, family.hbar(), family.dimension(),
                                family.tau());
  const auto& sp = family.species()[a];
  const int d = family.dimension();
  const double prefactor =
      sp.spin_degeneracy / (s[a] * std::pow(2.0 * M_PI * family.hbar(), d) * sp.density);
  const double gaussian = std::pow(2.0 * M_PI * sp.mass * family.tau(), d / 2.0);
  for (std::size_t i = 0; i < report.z.size(); ++i) {
    const double closed = prefactor * gaussian * family(s, report.z[i]);
    report.closed_form.push_back(closed);
    report.max_closed_form_residual =
        std::max(report.max_closed_form_residual, std::abs(closed - report.lower[i]) / report.lower[i]);
    report.max_quadrature_vs_closed =
        std::max(report.max_quadrature_vs_closed, std::abs(closed - report.reduced[i]) / closed);
  }
  return report;
}

std::string_view to_string(Candidate candidate) {
  switch (candidate) {
    case Candidate::Exponential: return "exponential";
    case Candidate::Fermi: return "fermi";
    case Candidate::Bose: return "bose";
  }
  return "unknown";
}

Candidate parse_candidate(std::string_view text) {
  if (text == "exponential") return Candidate::Exponential;
  if (text == "fermi") return Candidate::Fermi;
  if (text == "bose") return Candidate::Bose;
  throw Error(ErrorKind::DomainError, "unknown candidate distribution '" + std::string(text) + "'");
}

double relative_variation(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  return (*hi - *lo) / std::abs(mean);
}

namespace {

struct Normalized {
  std::function<double(double)> n;
  double chemical_potential;
};

// Candidate n(z) with its free constant fixed by the species normalization.
Normalized normalized_candidate(const CandidateSpecies& c, double mass, double temperature, double hbar) {
  if (!(c.density > 0.0) || c.kappa < 1)
    throw Error(ErrorKind::InvalidSpecies, "candidate species needs positive density and kappa");
  if (c.distribution == Candidate::Exponential) {
    SpeciesSpec sp{"", mass, c.kappa, Statistics::Fermi, c.density};
    const double amplitude = thermal_factor(sp, temperature, hbar, 3);
    return {[amplitude, temperature](double z) { return amplitude * std::exp(-z / temperature); },
            temperature * std::log(amplitude)};
  }
  // rho = kappa (2 m T)^{3/2} / (2 pi^2 hbar^3) G_0(mu / T) with the x-form kernel.
  const auto stats = c.distribution == Candidate::Fermi ? Statistics::Fermi : Statistics::Bose;
  const double y = 2.0 * M_PI * M_PI * std::pow(hbar, 3) * c.density /
                   (c.kappa * std::pow(2.0 * mass * temperature, 1.5));
  const double mu = temperature * invert_density(y, stats);
  const double eta = stats == Statistics::Fermi ? 1.0 : -1.0;
  return {[mu, temperature, eta](double z) { return 1.0 / (std::exp((z - mu) / temperature) + eta); }, mu};
}

}  // namespace

IncompatibilityReport incompatibility_demo(const CandidateSpecies& first, const CandidateSpecies& second,
                                           double mass, double temperature, std::span<const double> z_grid,
                                           double hbar) {
  if (!(mass > 0.0) || !(temperature > 0.0))
    throw Error(ErrorKind::DomainError, "mass and temperature must be positive");
  const auto one = normalized_candidate(first, mass, temperature, hbar);
  const auto two = normalized_candidate(second, mass, temperature, hbar);
  IncompatibilityReport report;
  report.chemical_potential_first = one.chemical_potential;
  report.chemical_potential_second = two.chemical_potential;
  for (double z : z_grid) {
    const double n1 = one.n(z);
    const double n2 = two.n(z);
    if (!(n1 > 0.0) || !(n2 > 0.0))
      throw Error(ErrorKind::DomainError, "candidate distribution not positive on the z grid");
    report.z.push_back(z);
    report.n_first.push_back(n1);
    report.n_second.push_back(n2);
    report.ratio.push_back(n2 / n1);
  }
  report.variation = relative_variation(report.ratio);
  report.proportional = report.variation < 1e-10;
  return report;
}

double smearing_ratio_variation(const std::function<double(double)>& n2, double mass,
                                const CandidateSpecies& first, const CandidateSpecies& second,
                                std::span<const double> z_grid, double hbar, double energy_scale) {
  const double norm = std::pow(2.0 * M_PI * hbar, 3);
  std::vector<double> ratio;
  for (double z : z_grid) {
    // Equal masses make the two momentum integrals the same; only prefactors differ.
    const double integral = momentum_integral([&](double e) { return n2(z + e); }, mass, 3, energy_scale);
    const double n_01 = first.kappa / (norm * first.density) * integral;
    const double n_10 = second.kappa / (norm * second.density) * integral;
    ratio.push_back(n_01 / n_10);
  }
  return relative_variation(ratio);
}

}  // namespace mixtherm
