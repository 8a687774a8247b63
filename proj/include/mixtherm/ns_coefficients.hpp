#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "mixtherm/core_types.hpp"

namespace mixtherm {

/// a_a = (rho_a / kappa_a) (2 pi hbar^2 / (m_a tau))^(d/2).
double thermal_factor(const SpeciesSpec& species, double tau, double hbar = 1.0, int dimension = 3);

struct ThermalFactor {
  std::vector<double> values;  // per species
};

ThermalFactor thermal_factors(std::span<const SpeciesSpec> species, double tau, double hbar = 1.0,
                              int dimension = 3);

/// Closed form A_s = prod_a s_a! a_a^{s_a} for a uniform medium.
double coefficient(const MultiIndex& s, const ThermalFactor& factors);

/// A_s by repeated descent A_s = s_a a_a A_{s - 1_a}, lowering species in the
/// cyclic order given by `species_order` until every count is zero.
double coefficient_by_recursion(const MultiIndex& s, const ThermalFactor& factors,
                                std::span<const std::size_t> species_order);

/// n_s(z) = A_s exp(-z / tau) with one tau for every s.
class NsFamily {
 public:
  NsFamily(std::vector<SpeciesSpec> species, double tau, double hbar = 1.0, int dimension = 3);

  double tau() const { return tau_; }
  double hbar() const { return hbar_; }
  int dimension() const { return dimension_; }
  std::span<const SpeciesSpec> species() const { return species_; }
  const ThermalFactor& factors() const { return factors_; }

  double coefficient(const MultiIndex& s) const { return mixtherm::coefficient(s, factors_); }
  double operator()(const MultiIndex& s, double z) const { return coefficient(s) * std::exp(-z / tau_); }

 private:
  std::vector<SpeciesSpec> species_;
  double tau_;
  double hbar_;
  int dimension_;
  ThermalFactor factors_;
};

/// Any candidate family n_s(z).
using Distribution = std::function<double(const MultiIndex& s, double z)>;

std::vector<double> default_z_grid(double tau, int points = 64, double extent = 10.0);

struct ReductionReport {
  std::vector<double> z;
  std::vector<double> lower;        // n_{s - 1_a}(z)
  std::vector<double> reduced;      // kappa_a / (s_a (2 pi hbar)^d rho_a) int n_s(z + p^2 / 2 m_a) d^d p
  double max_residual = 0.0;        // max relative |reduced - lower| / |lower|
  std::vector<double> closed_form;  // exponential family only
  double max_closed_form_residual = 0.0;
  double max_quadrature_vs_closed = 0.0;
};

/// Reduction relation between n_s and n_{s - 1_a} for an arbitrary family.
ReductionReport check_reduction(const Distribution& family, std::span<const SpeciesSpec> species,
                                const MultiIndex& s, std::size_t a, std::span<const double> z_grid,
                                double hbar = 1.0, int dimension = 3, double energy_scale = 1.0);

/// Exponential family: the momentum integral both by quadrature and in closed form.
ReductionReport check_reduction(const NsFamily& family, const MultiIndex& s, std::size_t a,
                                std::span<const double> z_grid);

enum class Candidate { Exponential, Fermi, Bose };

std::string_view to_string(Candidate candidate);
Candidate parse_candidate(std::string_view text);

struct CandidateSpecies {
  Candidate distribution = Candidate::Exponential;
  int kappa = 1;
  double density = 1.0;
};

struct IncompatibilityReport {
  std::vector<double> z;
  std::vector<double> n_first;   // n_1^{(1,0)}: species 1's own candidate
  std::vector<double> n_second;  // n_1^{(0,1)}: species 2's own candidate
  std::vector<double> ratio;     // n_second / n_first
  double chemical_potential_first = 0.0;
  double chemical_potential_second = 0.0;
  double variation = 0.0;        // (max - min) / mean of the ratio
  bool proportional = false;     // variation < 1e-10
};

/// Tests whether the two species' single-particle candidates can satisfy the
/// proportionality forced on them by the reduction maps at equal masses.
/// Each candidate's chemical potential (or amplitude) is fixed by its own
/// normalization rho = kappa / (2 pi hbar)^3 int n(p^2 / 2m) d^3 p.
IncompatibilityReport incompatibility_demo(const CandidateSpecies& first, const CandidateSpecies& second,
                                           double mass, double temperature, std::span<const double> z_grid,
                                           double hbar = 1.0);

/// Ratio variation of the two maps applied to one shared n_2^{(1,1)} with
/// m_1 = m_2; constant for any n_2.
double smearing_ratio_variation(const std::function<double(double)>& n2, double mass,
                                const CandidateSpecies& first, const CandidateSpecies& second,
                                std::span<const double> z_grid, double hbar = 1.0,
                                double energy_scale = 1.0);

double relative_variation(std::span<const double> values);

}  // namespace mixtherm
