#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "mixtherm/exchange.hpp"

using namespace mixtherm;

namespace {

std::vector<SpeciesSpec> kinds(std::vector<std::pair<Statistics, int>> spec) {
  std::vector<SpeciesSpec> out;
  for (auto [s, k] : spec) out.push_back({"x", 1.0, k, s, 1.0});
  return out;
}

/// Number of spin assignments left unchanged by p, by direct enumeration.
long long brute_force_count(const GroupPermutation& p, const std::vector<SpeciesSpec>& species) {
  std::vector<int> image, kappa;
  int offset = 0;
  for (std::size_t a = 0; a < p.groups.size(); ++a) {
    for (int t : p.groups[a]) {
      image.push_back(offset + t);
      kappa.push_back(species[a].spin_degeneracy);
    }
    offset += static_cast<int>(p.groups[a].size());
  }
  std::vector<int> sigma(image.size(), 0);
  long long count = 0;
  while (true) {
    bool fixed = true;
    for (std::size_t k = 0; k < image.size() && fixed; ++k) fixed = sigma[static_cast<std::size_t>(image[k])] == sigma[k];
    count += fixed;
    std::size_t d = 0;
    while (d < sigma.size() && ++sigma[d] == kappa[d]) sigma[d++] = 0;
    if (d == sigma.size()) break;
  }
  return count;
}

}  // namespace

TEST_CASE("enumeration sizes") {
  CHECK(enumerate_permutations(MultiIndex({2})).size() == 2);
  CHECK(enumerate_permutations(MultiIndex({2, 1})).size() == 2);
  auto perms = enumerate_permutations(MultiIndex({3, 2}));
  CHECK(perms.size() == 12);
  std::set<std::vector<std::vector<int>>> distinct;
  for (const auto& p : perms) distinct.insert(p.groups);
  CHECK(distinct.size() == 12);
  CHECK(enumerate_permutations(MultiIndex({0, 0})).size() == 1);
  CHECK(group_order(MultiIndex({4, 3})) == 144);
}

TEST_CASE("enumeration guards") {
  CHECK_THROWS_AS(enumerate_permutations(MultiIndex({11})), Error);
  CHECK_THROWS_AS(enumerate_permutations(MultiIndex({10}), 1e5), Error);
  try {
    enumerate_permutations(MultiIndex({6, 5}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
}

TEST_CASE("cycle counts and parity") {
  for (const auto& p : enumerate_permutations(MultiIndex({4, 3}))) {
    for (std::size_t a = 0; a < p.groups.size(); ++a) {
      const int n = static_cast<int>(p.groups[a].size());
      CHECK(p.cycle_counts[a] >= 1);
      CHECK(p.cycle_counts[a] <= n);
      bool identity = true;
      for (int k = 0; k < n; ++k) identity = identity && p.groups[a][static_cast<std::size_t>(k)] == k;
      CHECK((p.cycle_counts[a] == n) == identity);
      CHECK(p.group_parity[a] == ((n - p.cycle_counts[a]) % 2 == 0 ? 1 : -1));
    }
  }
}

TEST_CASE("kappa weights from the worked cases") {
  auto fermi2 = kinds({{Statistics::Fermi, 2}});
  auto ident = enumerate_permutations(MultiIndex({3})).front();
  CHECK(kappa_weight(ident, fermi2) == 8);
  auto swap = enumerate_permutations(MultiIndex({2})).back();
  CHECK(kappa_weight(swap, fermi2) == -2);

  auto mixed = kinds({{Statistics::Fermi, 2}, {Statistics::Bose, 3}});
  auto both = enumerate_permutations(MultiIndex({2, 2})).back();
  CHECK(both.groups[0] == std::vector<int>{1, 0});
  CHECK(both.groups[1] == std::vector<int>{1, 0});
  CHECK(kappa_weight(both, mixed) == -6);
  CHECK(brute_force_count(both, mixed) == 6);
}

TEST_CASE("fermion parity ignores boson groups") {
  auto mixed = kinds({{Statistics::Bose, 2}, {Statistics::Fermi, 2}});
  for (const auto& p : enumerate_permutations(MultiIndex({2, 3}))) {
    CHECK(p.fermion_parity(mixed) == p.group_parity[1]);
  }
}

TEST_CASE("cycle weight equals brute-force spin count") {
  for (int s1 = 0; s1 <= 3; ++s1)
    for (int s2 = 0; s2 <= 3; ++s2)
      for (int k1 = 1; k1 <= 3; ++k1)
        for (int k2 = 1; k2 <= 3; ++k2) {
          auto species = kinds({{Statistics::Fermi, k1}, {Statistics::Bose, k2}});
          for (const auto& p : enumerate_permutations(MultiIndex({s1, s2}))) {
            const auto w = kappa_weight(p, species);
            CHECK(std::abs(w) == brute_force_count(p, species));
          }
        }
}

TEST_CASE("boson-only weight sum is positive") {
  auto bosons = kinds({{Statistics::Bose, 2}, {Statistics::Bose, 3}});
  long long total = 0;
  for (const auto& p : enumerate_permutations(MultiIndex({3, 2}))) {
    const auto w = kappa_weight(p, bosons);
    CHECK(w > 0);
    total += w;
  }
  CHECK(total > 0);
}

TEST_CASE("omega single particle") {
  auto sp = kinds({{Statistics::Fermi, 2}});
  PhaseSpacePoint pt;
  pt.positions = {{{0.3, -0.2, 1.1}}};
  pt.momenta = {{{1.5, 0.4, -0.7}}};
  const double phase = 0.3 * 1.5 - 0.2 * 0.4 - 1.1 * 0.7;
  auto w = omega(pt, sp, MultiIndex({1}));
  CHECK(std::abs(w - 2.0 * std::exp(std::complex<double>(0.0, -phase))) < 1e-14);
}

TEST_CASE("omega with equal momenta") {
  for (auto [stats, eta] : {std::pair{Statistics::Fermi, -1.0}, std::pair{Statistics::Bose, 1.0}}) {
    auto sp = kinds({{stats, 3}});
    PhaseSpacePoint pt;
    const PhaseSpacePoint::Vec p = {0.4, 1.0, -0.3};
    pt.positions = {{{0.1, 0.2, 0.3}, {-1.0, 0.5, 2.0}}};
    pt.momenta = {{p, p}};
    const double phase = p[0] * (0.1 - 1.0) + p[1] * (0.2 + 0.5) + p[2] * (0.3 + 2.0);
    auto expected = (9.0 + eta * 3.0) / 2.0 * std::exp(std::complex<double>(0.0, -phase));
    CHECK(std::abs(omega(pt, sp, MultiIndex({2})) - expected) < 1e-13);
  }
}

TEST_CASE("omega has no cross-group exchange") {
  auto sp = kinds({{Statistics::Fermi, 2}, {Statistics::Bose, 3}});
  PhaseSpacePoint pt;
  pt.positions = {{{0.1, 0.0, 0.0}}, {{0.7, 0.2, 0.0}}};
  pt.momenta = {{{1.0, 2.0, 0.5}}, {{-0.3, 0.1, 0.9}}};
  const double phase = 0.1 * 1.0 + 0.7 * -0.3 + 0.2 * 0.1;
  CHECK(std::abs(omega(pt, sp, MultiIndex({1, 1})) - 6.0 * std::exp(std::complex<double>(0.0, -phase))) < 1e-13);
}

TEST_CASE("omega interchange symmetry within a group") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  auto sp = kinds({{Statistics::Fermi, 2}, {Statistics::Bose, 1}});
  PhaseSpacePoint pt;
  pt.positions.resize(2);
  pt.momenta.resize(2);
  for (int k = 0; k < 3; ++k) {
    pt.positions[0].push_back({n(rng), n(rng), n(rng)});
    pt.momenta[0].push_back({n(rng), n(rng), n(rng)});
  }
  pt.positions[1].push_back({n(rng), n(rng), n(rng)});
  pt.momenta[1].push_back({n(rng), n(rng), n(rng)});
  const auto s = MultiIndex({3, 1});
  auto before = omega(pt, sp, s);
  std::swap(pt.positions[0][0], pt.positions[0][2]);
  std::swap(pt.momenta[0][0], pt.momenta[0][2]);
  CHECK(std::abs(omega(pt, sp, s) - before) < 1e-13);
}

TEST_CASE("omega at zero phase is the combinatorial sum") {
  auto sp = kinds({{Statistics::Fermi, 2}, {Statistics::Bose, 3}});
  const auto s = MultiIndex({3, 2});
  PhaseSpacePoint pt;
  pt.positions = {std::vector<PhaseSpacePoint::Vec>(3, {0, 0, 0}), std::vector<PhaseSpacePoint::Vec>(2, {0, 0, 0})};
  pt.momenta = {std::vector<PhaseSpacePoint::Vec>(3, {1, 2, 3}), std::vector<PhaseSpacePoint::Vec>(2, {-1, 0, 4})};
  // Fermion kappa = 2 over S_3: sum sign * 2^nu = 2^3 - 3 * 2^2 + 2 * 2 = 0;
  // the product with the boson sum vanishes.
  CHECK(std::abs(omega(pt, sp, s)) < 1e-12);
  auto bosons = kinds({{Statistics::Bose, 2}, {Statistics::Bose, 3}});
  // S_3 with kappa 2: 8 + 3*4 + 2*2 = 24 -> /6 = 4; S_2 with kappa 3: 9 + 3 = 12 -> /2 = 6.
  CHECK(std::abs(omega(pt, bosons, s) - 24.0) < 1e-12);
}

TEST_CASE("phase-space shape is checked") {
  auto sp = kinds({{Statistics::Fermi, 2}});
  PhaseSpacePoint pt;
  pt.positions = {{{0, 0, 0}}};
  pt.momenta = {{{0, 0, 0}}};
  CHECK_THROWS_AS(omega(pt, sp, MultiIndex({2})), Error);
}

TEST_CASE("ideal pair correlation limits") {
  SpeciesSpec fermion{"f", 1.0, 2, Statistics::Fermi, 1.0};
  SpeciesSpec boson{"b", 1.0, 1, Statistics::Bose, 1.0};
  CHECK(ideal_pair_correlation(0.0, fermion, 1.0) == doctest::Approx(0.5));
  CHECK(ideal_pair_correlation(0.0, boson, 1.0) == doctest::Approx(2.0));
  CHECK(ideal_pair_correlation(50.0, fermion, 1.0) == 1.0);
  CHECK(ideal_pair_correlation(1.0, boson, 2.0) == doctest::Approx(1.0 + std::exp(-2.0)));
}
