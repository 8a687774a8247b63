#include "mixtherm/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mixtherm {

int count_cycles(std::span<const int> image) {
  std::vector<bool> seen(image.size(), false);
  int cycles = 0;
  for (std::size_t start = 0; start < image.size(); ++start) {
    if (seen[start]) continue;
    ++cycles;
    for (auto i = start; !seen[i]; i = static_cast<std::size_t>(image[i])) seen[i] = true;
  }
  return cycles;
}

int permutation_parity(std::span<const int> image) {
  const auto transpositions = static_cast<int>(image.size()) - count_cycles(image);
  return transpositions % 2 == 0 ? 1 : -1;
}

int GroupPermutation::fermion_parity(std::span<const SpeciesSpec> species) const {
  int sign = 1;
  for (std::size_t a = 0; a < groups.size(); ++a)
    if (species[a].statistics == Statistics::Fermi) sign *= group_parity[a];
  return sign;
}

std::uint64_t group_order(const MultiIndex& s) {
  std::uint64_t total = 1;
  for (int c : s.counts())
    for (int k = 2; k <= c; ++k) {
      if (total > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(k))
        return std::numeric_limits<std::uint64_t>::max();
      total *= static_cast<std::uint64_t>(k);
    }
  return total;
}

std::vector<GroupPermutation> enumerate_permutations(const MultiIndex& s, double limit) {
  const auto total = group_order(s);
  if (s.order() > 10 || static_cast<double>(total) > limit)
    throw Error(ErrorKind::TooLarge, "permutation enumeration of order " + std::to_string(s.order()) +
                                         " exceeds the factorial guard");
  const std::size_t n = s.species_count();

  // Per-group lexicographic lists, then their cartesian product.
  std::vector<std::vector<std::vector<int>>> per_group(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<int> image(static_cast<std::size_t>(s[a]));
    std::iota(image.begin(), image.end(), 0);
    do per_group[a].push_back(image);
    while (std::next_permutation(image.begin(), image.end()));
  }

  std::vector<GroupPermutation> out;
  out.reserve(total);
  std::vector<std::size_t> cursor(n, 0);
  while (true) {
    GroupPermutation p;
    p.groups.reserve(n);
    for (std::size_t a = 0; a < n; ++a) {
      const auto& image = per_group[a][cursor[a]];
      p.groups.push_back(image);
      p.cycle_counts.push_back(count_cycles(image));
      p.group_parity.push_back(permutation_parity(image));
    }
    out.push_back(std::move(p));
    // Odometer with the last group fastest.
    std::size_t a = n;
    while (a > 0) {
      --a;
      if (++cursor[a] < per_group[a].size()) break;
      cursor[a] = 0;
      if (a == 0) return out;
    }
    if (n == 0) return out;
  }
}

std::int64_t kappa_weight(const GroupPermutation& p, std::span<const SpeciesSpec> species) {
  if (species.size() != p.groups.size())
    throw Error(ErrorKind::IndexOutOfRange, "permutation groups do not match species list");
  std::int64_t weight = p.fermion_parity(species);
  for (std::size_t a = 0; a < p.groups.size(); ++a)
    for (int c = 0; c < p.cycle_counts[a]; ++c) weight *= species[a].spin_degeneracy;
  return weight;
}

void PhaseSpacePoint::check(const MultiIndex& s) const {
  if (dimension != 1 && dimension != 3) throw Error(ErrorKind::DomainError, "dimension must be 1 or 3");
  if (positions.size() != s.species_count() || momenta.size() != s.species_count())
    throw Error(ErrorKind::IndexOutOfRange, "phase-space groups do not match the multi-index");
  for (std::size_t a = 0; a < s.species_count(); ++a)
    if (positions[a].size() != static_cast<std::size_t>(s[a]) ||
        momenta[a].size() != static_cast<std::size_t>(s[a]))
      throw Error(ErrorKind::IndexOutOfRange, "phase-space group size does not match s_a");
}

std::complex<double> omega(const PhaseSpacePoint& point, std::span<const SpeciesSpec> species,
                           const MultiIndex& s, double hbar, double limit) {
  point.check(s);
  if (species.size() != s.species_count())
    throw Error(ErrorKind::IndexOutOfRange, "species list does not match the multi-index");
  const auto perms = enumerate_permutations(s, limit);
  const int d = point.dimension;
  std::complex<double> sum = 0.0;
  for (const auto& p : perms) {
    double phase = 0.0;
    for (std::size_t a = 0; a < p.groups.size(); ++a)
      for (std::size_t k = 0; k < p.groups[a].size(); ++k) {
        const auto& r = point.positions[a][k];
        const auto& q = point.momenta[a][static_cast<std::size_t>(p.groups[a][k])];
        for (int c = 0; c < d; ++c) phase += r[c] * q[c];
      }
    sum += static_cast<double>(kappa_weight(p, species)) * std::polar(1.0, -phase / hbar);
  }
  return sum / static_cast<double>(group_order(s));
}

double ideal_pair_correlation(double r, const SpeciesSpec& species, double tau, double hbar) {
  if (!(tau > 0.0)) throw Error(ErrorKind::NonPositiveTau, "tau must be positive");
  if (r < 0.0) throw Error(ErrorKind::DomainError, "separation must be non-negative");
  const double eta = exchange_sign(species.statistics);
  return 1.0 + eta / species.spin_degeneracy * std::exp(-species.mass * tau * r * r / (hbar * hbar));
}

}  // namespace mixtherm
