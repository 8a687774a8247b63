#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "mixtherm/statistics_kernels.hpp"
#include "mixtherm/thermo_uniform.hpp"

using namespace mixtherm;

namespace {

constexpr double pi = std::numbers::pi;

SpeciesSpec fermion(double density, double mass = 1.0, int kappa = 2) {
  return {"f", mass, kappa, Statistics::Fermi, density};
}

/// Density at which a single species has degeneracy parameter alpha at theta.
double density_for_alpha(const SpeciesSpec& sp, double alpha, double theta) {
  const double y = g_integral({0, alpha, sp.statistics});
  return y * sp.spin_degeneracy * std::pow(2.0 * sp.mass * theta, 1.5) / (2.0 * pi * pi);
}

double boost_semi_infinite(auto f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numeric_limits<double>::infinity(),
                                                                       15, 1e-13);
}

}  // namespace

TEST_CASE("ideal tau in the classical regime") {
  std::vector<SpeciesSpec> sp = {fermion(1e-3)};
  auto sol = solve_ideal(build_mixture(sp, 5e4), sp);
  REQUIRE(sol.alphas[0] < -20.0);
  CHECK(std::abs(sol.tau / sol.theta - 1.0) < 1e-6);
}

TEST_CASE("ideal tau in the degenerate Fermi regime") {
  auto sp0 = fermion(1.0);
  const double theta = 1e-3;
  sp0.density = density_for_alpha(sp0, 1e4, theta);
  std::vector<SpeciesSpec> sp = {sp0};
  auto sol = solve_ideal(build_mixture(sp, theta), sp);
  CHECK(sol.alphas[0] == doctest::Approx(1e4).epsilon(1e-9));
  const double eps_f = sol.alphas[0] * theta;
  CHECK(std::abs(1.5 * sol.tau / (0.6 * eps_f) - 1.0) < 1e-2);
  // Independent Fermi energy (hbar^2 / 2m) (6 pi^2 rho / kappa)^{2/3}.
  const double eps_f_direct = std::pow(6.0 * pi * pi * sp0.density / 2.0, 2.0 / 3.0) / 2.0;
  CHECK(std::abs(eps_f / eps_f_direct - 1.0) < 1e-2);
}

TEST_CASE("stored alphas reproduce tau and the density equation") {
  std::vector<SpeciesSpec> sp = {fermion(0.4, 1.0, 2), {"b", 3.0, 1, Statistics::Bose, 0.1}, fermion(0.2, 0.5, 4)};
  auto mix = build_mixture(sp, 1.7);
  auto sol = solve_ideal(mix, sp);
  CHECK(tau_from_alphas(mix, sp, sol.alphas) == doctest::Approx(sol.tau).epsilon(1e-10));
  for (std::size_t a = 0; a < sp.size(); ++a) {
    const double y = ideal_density_target(sp[a], mix.species_density(a), mix.temperature);
    CHECK(std::abs(g_integral({0, sol.alphas[a], sp[a].statistics}) / y - 1.0) < 1e-10);
  }
}

TEST_CASE("merging identical components changes nothing") {
  // Two copies of a kappa = 2 species pack like one kappa = 4 species.
  std::vector<SpeciesSpec> one = {fermion(0.8, 1.0, 4)};
  std::vector<SpeciesSpec> two = {fermion(0.4), fermion(0.4)};
  const double tau1 = solve_ideal(build_mixture(one, 0.6), one).tau;
  const double tau2 = solve_ideal(build_mixture(two, 0.6), two).tau;
  CHECK(tau2 == doctest::Approx(tau1).epsilon(1e-10));
}

TEST_CASE("Bose saturation carries the species label") {
  std::vector<SpeciesSpec> sp = {fermion(0.5), {"helium", 1.0, 1, Statistics::Bose, 10.0}};
  try {
    solve_ideal(build_mixture(sp, 0.1), sp);
    FAIL("expected BoseSaturation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BoseSaturation);
    CHECK(e.path() == "helium");
  }
}

TEST_CASE("ideal scaling symmetry") {
  std::vector<SpeciesSpec> sp = {fermion(0.3), {"b", 2.0, 3, Statistics::Bose, 0.05}};
  auto mix = build_mixture(sp, 1.2);
  const double base = solve_ideal(mix, sp).tau;
  for (double lambda : {0.5, 2.0, 4.0}) {
    auto scaled = mix.at(lambda * lambda * mix.temperature, std::pow(lambda, 3) * mix.total_density);
    CHECK(std::abs(solve_ideal(scaled, sp).tau / (lambda * lambda * base) - 1.0) < 1e-9);
  }
}

TEST_CASE("energy and pressure without interactions") {
  auto mix = build_mixture(std::vector<SpeciesSpec>{fermion(0.7)}, 1.0);
  auto pt = evaluate_thermo(mix, 1.3, {}, {});
  CHECK(pt.energy == doctest::Approx(1.5 * 1.3 * 0.7));
  CHECK(pt.pressure == doctest::Approx(0.7 * 1.3));
  CHECK(std::abs(pt.pressure - 2.0 / 3.0 * pt.energy) < 1e-12);
  std::vector<PairPotential> zero = {PairPotential::zero(0, 0)};
  CHECK(internal_energy(mix, 1.3, zero, {}) == doctest::Approx(1.5 * 1.3 * 0.7));
}

TEST_CASE("step potential with g = 1") {
  const double rho = 0.6, k0 = 2.0, radius = 1.5;
  auto mix = build_mixture(std::vector<SpeciesSpec>{fermion(rho)}, 1.0);
  std::vector<PairPotential> pots = {PairPotential::step(0, 0, k0, radius)};
  std::vector<CorrelationModel> corr = {CorrelationModel::unity(0, 0)};
  auto pt = evaluate_thermo(mix, 1.0, pots, corr);
  REQUIRE(pt.energy_terms.size() == 1);
  CHECK(pt.energy_terms[0].value == doctest::Approx(2.0 * pi * rho * rho * k0 * std::pow(radius, 3) / 3.0).epsilon(1e-10));
  // Only the jump contributes to the virial: -(2 pi / 3) rho^2 R^3 (-K0).
  CHECK(pt.pressure_terms[0].value == doctest::Approx(2.0 * pi / 3.0 * rho * rho * k0 * std::pow(radius, 3)).epsilon(1e-8));
}

TEST_CASE("cross potential counts both ordered pairs") {
  std::vector<SpeciesSpec> sp = {fermion(0.3), fermion(0.5, 2.0)};
  auto mix = build_mixture(sp, 1.0);
  std::vector<PairPotential> pots = {PairPotential::gaussian(0, 1, 1.0, 0.7)};
  std::vector<CorrelationModel> corr = {CorrelationModel::unity(1, 0)};
  auto pt = evaluate_thermo(mix, 1.0, pots, corr);
  CHECK(pt.energy_terms.size() == 2);
  // int r^2 exp(-r^2/w^2) dr = sqrt(pi) w^3 / 4
  const double hand = std::sqrt(pi) * std::pow(0.7, 3) / 4.0;
  CHECK(pt.energy - pt.kinetic_energy == doctest::Approx(2.0 * 2.0 * pi * 0.3 * 0.5 * hand).epsilon(1e-10));
}

TEST_CASE("exponential potential virial term") {
  const double rho = 0.9;
  auto mix = build_mixture(std::vector<SpeciesSpec>{fermion(rho)}, 1.0);
  std::vector<PairPotential> pots = {PairPotential::exponential(0, 0, 1.0, 1.0)};
  std::vector<CorrelationModel> corr = {CorrelationModel::unity(0, 0)};
  const double p = pressure(mix, 1.0, pots, corr);
  CHECK(p - rho == doctest::Approx(4.0 * pi * rho * rho).epsilon(1e-10));
}

TEST_CASE("degenerate pressure") {
  auto sp0 = fermion(1.0);
  const double theta = 1e-3;
  sp0.density = density_for_alpha(sp0, 1e4, theta);
  std::vector<SpeciesSpec> sp = {sp0};
  auto mix = build_mixture(sp, theta);
  auto sol = solve_ideal(mix, sp);
  const double p = pressure(mix, sol.tau, {}, {});
  CHECK(std::abs(p / (0.4 * sp0.density * sol.alphas[0] * theta) - 1.0) < 1e-2);
}

TEST_CASE("missing correlation") {
  auto mix = build_mixture(std::vector<SpeciesSpec>{fermion(0.5)}, 1.0);
  std::vector<PairPotential> pots = {PairPotential::exponential(0, 0, 1.0, 1.0)};
  try {
    internal_energy(mix, 1.0, pots, {});
    FAIL("expected MissingCorrelation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingCorrelation);
  }
}

TEST_CASE("tail split invariance") {
  auto mix = build_mixture(std::vector<SpeciesSpec>{fermion(0.4), fermion(0.2, 3.0)}, 1.5);
  std::vector<PairPotential> pots = {PairPotential::lennard_jones(0, 0, 1.0, 1.0),
                                     PairPotential::yukawa(0, 1, 0.5, 1.3)};
  std::vector<CorrelationModel> corr = {CorrelationModel::classical_boltzmann(pots[0]),
                                        CorrelationModel::classical_boltzmann(pots[1])};
  RadialOptions wide;
  wide.tail_split_scale = 2.0;
  auto a = evaluate_thermo(mix, 1.5, pots, corr);
  auto b = evaluate_thermo(mix, 1.5, pots, corr, wide);
  CHECK(std::abs(a.energy / b.energy - 1.0) < 1e-8);
  CHECK(std::abs(a.pressure / b.pressure - 1.0) < 1e-8);
}

TEST_CASE("tau equation right-hand side against an independent quadrature") {
  const double rho = 0.7, theta = 1.4;
  auto mix = build_mixture(std::vector<SpeciesSpec>{fermion(rho)}, theta);
  std::vector<PairPotential> pots = {PairPotential::exponential(0, 0, 1.0, 1.0)};
  // Partials left to the finite-difference fallback.
  std::vector<CorrelationModel> corr = {
      CorrelationModel(0, 0, "test", [](double t, double, double r) { return 1.0 + std::exp(-r * r) / t; })};
  const double ours = tau_equation_rhs(mix, pots, corr);
  const double integral = boost_semi_infinite(
      [&](double r) { return std::pow(r, 3) * std::exp(-r - r * r) / theta * (1.0 - 2.0 * r); });
  const double oracle = 4.0 * pi / (3.0 * rho) * rho * rho * integral;
  CHECK(ours == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("tau equation right-hand side vanishes for K-only correlations") {
  auto mix = build_mixture(std::vector<SpeciesSpec>{fermion(0.5)}, 2.0);
  std::vector<PairPotential> pots = {PairPotential::gaussian(0, 0, 1.0, 1.0)};
  std::vector<CorrelationModel> unity = {CorrelationModel::unity(0, 0)};
  CHECK(std::abs(tau_equation_rhs(mix, pots, unity)) < 1e-14);
  std::vector<CorrelationModel> boltz = {CorrelationModel::classical_boltzmann(pots[0])};
  CHECK(std::abs(tau_equation_rhs(mix, pots, boltz)) < 1e-12);
}

TEST_CASE("high temperature condition") {
  auto mix = build_mixture(std::vector<SpeciesSpec>{fermion(0.5)}, 1.0);
  std::vector<double> thetas = {1.0, 10.0, 100.0, 1000.0};
  auto none = high_temperature_condition(mix, {}, {}, thetas);
  for (double v : none.rhs) CHECK(v == 0.0);

  std::vector<PairPotential> pots = {PairPotential::exponential(0, 0, 1.0, 1.0)};
  std::vector<CorrelationModel> corr = {
      CorrelationModel(0, 0, "test", [](double t, double, double r) { return 1.0 + std::exp(-r * r) / t; })};
  auto rep = high_temperature_condition(mix, pots, corr, thetas);
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    CHECK(std::abs(rep.rhs[i]) < std::abs(rep.rhs[i - 1]));
    CHECK(rep.rhs[i] * thetas[i] == doctest::Approx(rep.rhs[0] * thetas[0]).epsilon(1e-6));
  }
  CHECK_THROWS_AS(high_temperature_condition(mix, pots, corr, {2.0, 1.0}), Error);
}

TEST_CASE("tau field without interactions reproduces the ideal solution") {
  std::vector<SpeciesSpec> sp = {fermion(0.1), {"b", 4.0, 1, Statistics::Bose, 0.05}};
  TauDomain dom{20.0, 1000.0, 0.002, 0.05, 12, 10, 0};
  auto field = solve_tau_field(dom, sp, {}, {});
  auto base = build_mixture(sp, 1.0);
  double worst = 0.0;
  for (int i = 0; i < dom.n_theta; ++i)
    for (int j = 0; j < dom.n_rho; ++j) {
      const double ideal = solve_ideal(base.at(field.theta[static_cast<std::size_t>(i)], field.rho[static_cast<std::size_t>(j)]), sp).tau;
      worst = std::max(worst, std::abs(field.at(i, j) / ideal - 1.0));
    }
  CHECK(worst < 1e-6);
  CHECK(field.max_anchor_correction < 1e-3);
  CHECK(field.traces.size() == 48);
}

TEST_CASE("constant right-hand side against the closed form") {
  TauDomain dom{1.0, 8.0, 0.5, 2.0, 9, 7, 40};
  const double c = 0.37;
  auto anchor = [](double theta, double rho) { return theta * (1.0 + 0.01 * rho); };
  auto field = integrate_characteristics(dom, anchor, [c](double, double) { return c; });
  for (const auto& trace : field.traces)
    for (std::size_t k = 0; k < trace.theta.size(); ++k) {
      const double grow = trace.theta[k] / trace.anchor_theta;  // e^{2s}
      const double exact = (trace.anchor_tau + c / 2.0) * grow - c / 2.0;
      CHECK(trace.tau[k] == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("anchor perturbation stays bounded") {
  TauDomain dom{1.0, 8.0, 0.5, 2.0, 9, 7, 40};
  auto anchor = [](double theta, double) { return theta; };
  auto rhs = [](double theta, double rho) { return 0.1 * rho / theta; };
  auto base = integrate_characteristics(dom, anchor, rhs);
  CharacteristicsOptions shifted;
  shifted.anchor_offset = 1e-6;
  auto moved = integrate_characteristics(dom, anchor, rhs, shifted);
  for (std::size_t t = 0; t < base.traces.size(); ++t)
    for (std::size_t k = 0; k < base.traces[t].theta.size(); ++k) {
      const double bound = base.traces[t].theta[k] / base.traces[t].anchor_theta * 1e-6;
      CHECK(std::abs(moved.traces[t].tau[k] - base.traces[t].tau[k]) <= bound * (1.0 + 1e-6) + 1e-15);
    }
}

TEST_CASE("anchor must be classical") {
  std::vector<SpeciesSpec> sp = {fermion(1.0)};
  TauDomain dom{0.1, 0.5, 0.5, 1.0, 5, 5, 0};
  try {
    solve_tau_field(dom, sp, {}, {});
    FAIL("expected AnchorNotClassical");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AnchorNotClassical);
  }
  CHECK_THROWS_AS(TauDomain({2.0, 1.0}).validate(), Error);
}

TEST_CASE("tau field with interactions satisfies the equation") {
  std::vector<SpeciesSpec> sp = {fermion(0.05)};
  std::vector<PairPotential> pots = {PairPotential::exponential(0, 0, 1.0, 1.0)};
  std::vector<CorrelationModel> corr = {
      CorrelationModel(0, 0, "test", [](double t, double, double r) { return 1.0 + std::exp(-r * r) / t; })};
  TauDomain dom{50.0, 1000.0, 0.005, 0.05, 6, 5, 0};
  CharacteristicsOptions opt;
  opt.threads = 2;
  auto field = solve_tau_field(dom, sp, pots, corr, {}, opt);
  // Along each characteristic the stored tau solves dtau/ds = 2 tau + F: compare
  // with a variation-of-constants quadrature.
  auto mix = build_mixture(sp, 1.0);
  const auto& trace = field.traces[field.traces.size() / 2];
  const double ta = trace.anchor_theta, ra = trace.anchor_rho;
  for (std::size_t k = 1; k < trace.theta.size(); ++k) {
    const double s_end = 0.5 * std::log(trace.theta[k] / ta);
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double s) {
          return std::exp(-2.0 * s) *
                 tau_equation_rhs(mix.at(ta * std::exp(2.0 * s), ra * std::exp(3.0 * s)), pots, corr);
        },
        0.0, s_end, 5, 1e-12);
    const double exact = std::exp(2.0 * s_end) * (trace.anchor_tau + integral);
    CHECK(trace.tau[k] == doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("condensate onset for a pure Bose gas") {
  SpeciesSpec b{"b", 1.0, 1, Statistics::Bose, 1.0};
  std::vector<SpeciesSpec> sp = {b};
  const double theta_c = bose_onset_temperature(b, 1.0);
  // rho = kappa (2 m theta_c)^{3/2} / (2 pi^2) G_0(0-)
  CHECK(std::pow(2.0 * theta_c, 1.5) / (2.0 * pi * pi) * bose_saturation_value() == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> grid;
  for (int k = 0; k < 30; ++k) grid.push_back(3.0 * theta_c * (1.0 - k / 30.0));
  auto scan = condensate_scan(build_mixture(sp, 1.0), sp, grid);
  CHECK(scan.experimental);
  REQUIRE(scan.onset_refined.has_value());
  CHECK(*scan.onset_refined == doctest::Approx(theta_c).epsilon(1e-10));
  CHECK(*scan.onset_grid <= theta_c);
  CHECK(scan.rows.back().saturated);
  CHECK(scan.rows.back().saturated_species == "b");
}

TEST_CASE("condensate onset falls with the boson fraction") {
  std::vector<double> grid;
  for (int k = 0; k < 200; ++k) grid.push_back(5.0 * std::pow(0.97, k));
  double prev = 1e300;
  for (double x : {1.0, 0.5, 0.1}) {
    std::vector<SpeciesSpec> sp = {{"b", 1.0, 1, Statistics::Bose, x}};
    if (x < 1.0) sp.push_back(fermion(1.0 - x));
    auto scan = condensate_scan(build_mixture(sp, 1.0), sp, grid);
    REQUIRE(scan.onset_refined.has_value());
    CHECK(*scan.onset_refined < prev);
    prev = *scan.onset_refined;
  }
}

TEST_CASE("fermion-only scan has no onset") {
  std::vector<SpeciesSpec> sp = {fermion(1.0)};
  auto scan = condensate_scan(build_mixture(sp, 1.0), sp, {2.0, 1.0, 0.5, 0.1});
  CHECK_FALSE(scan.onset_grid.has_value());
  for (const auto& row : scan.rows) CHECK(row.tau.has_value());
  CHECK_THROWS_AS(condensate_scan(build_mixture(sp, 1.0), sp, {1.0, 2.0}), Error);
}
