#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "mixtherm/core_types.hpp"

namespace mixtherm {

/// One element of the product of symmetric groups S_{s_1} x ... x S_{s_n}.
/// Permutations never mix particles of different kinds.
struct GroupPermutation {
  std::vector<std::vector<int>> groups;  // groups[a][k] = image of k (0-based)
  std::vector<int> cycle_counts;         // nu_a
  std::vector<int> group_parity;         // +1 / -1 per group

  /// Product of parities over fermion groups only.
  int fermion_parity(std::span<const SpeciesSpec> species) const;
};

/// Count cycles of a permutation given as an image list.
int count_cycles(std::span<const int> image);
int permutation_parity(std::span<const int> image);

/// prod_a s_a!, saturating at UINT64_MAX.
std::uint64_t group_order(const MultiIndex& s);

/// All prod_a s_a! permutations in lexicographic order (group 1 slowest).
/// Throws TooLarge when order(s) > 10 or prod s_a! > limit.
std::vector<GroupPermutation> enumerate_permutations(const MultiIndex& s, double limit = 1e6);

/// (-1)^{p_s} prod_a kappa_a^{nu_a}, the sign taken over fermion groups.
std::int64_t kappa_weight(const GroupPermutation& p, std::span<const SpeciesSpec> species);

/// Spatial coordinates and momenta grouped per species; `dimension` in {1, 3},
/// unused components are ignored.
struct PhaseSpacePoint {
  using Vec = std::array<double, 3>;
  int dimension = 3;
  std::vector<std::vector<Vec>> positions;
  std::vector<std::vector<Vec>> momenta;

  void check(const MultiIndex& s) const;
};

/// Spin-summed exchange factor: (1/prod s_a!) sum_P (-1)^p kappa(P) exp(-(i/hbar) sum r_k . p_{P(k)}).
std::complex<double> omega(const PhaseSpacePoint& point, std::span<const SpeciesSpec> species,
                           const MultiIndex& s, double hbar = 1.0, double limit = 1e6);

/// Ideal same-species pair correlation 1 + eta/kappa exp(-m tau r^2 / hbar^2).
double ideal_pair_correlation(double r, const SpeciesSpec& species, double tau, double hbar = 1.0);

}  // namespace mixtherm
