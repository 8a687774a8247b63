#include "mixtherm/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

// pchip.hpp calls unqualified isnan on double.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

namespace mixtherm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyMixture: return "EmptyMixture";
    case ErrorKind::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorKind::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorKind::InvalidSpecies: return "InvalidSpecies";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidPotential: return "InvalidPotential";
    case ErrorKind::OutOfTableRange: return "OutOfTableRange";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::BoseSaturation: return "BoseSaturation";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NonPositiveTau: return "NonPositiveTau";
    case ErrorKind::MissingCorrelation: return "MissingCorrelation";
    case ErrorKind::AnchorNotClassical: return "AnchorNotClassical";
    case ErrorKind::StiffIntegration: return "StiffIntegration";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ExperimentalRefused: return "ExperimentalRefused";
  }
  return "Unknown";
}

void UnitSystem::validate() const {
  if (!(hbar > 0.0)) throw Error(ErrorKind::DomainError, "hbar must be positive");
}

std::string_view to_string(Statistics stats) {
  return stats == Statistics::Fermi ? "fermi" : "bose";
}

Statistics parse_statistics(std::string_view text) {
  if (text == "fermi" || text == "Fermi" || text == "fermion") return Statistics::Fermi;
  if (text == "bose" || text == "Bose" || text == "boson") return Statistics::Bose;
  throw Error(ErrorKind::InvalidSpecies, "unknown statistics '" + std::string(text) + "'");
}

void SpeciesSpec::validate() const {
  if (!(mass > 0.0)) throw Error(ErrorKind::InvalidSpecies, "mass must be positive", label);
  if (spin_degeneracy < 1)
    throw Error(ErrorKind::InvalidSpecies, "spin degeneracy must be at least 1", label);
  if (!(density > 0.0)) throw Error(ErrorKind::NonPositiveDensity, "density must be positive", label);
}

MixtureState MixtureState::at(double theta, double rho) const {
  if (!(theta > 0.0)) throw Error(ErrorKind::NonPositiveTemperature, "temperature must be positive");
  if (!(rho > 0.0)) throw Error(ErrorKind::NonPositiveDensity, "total density must be positive");
  MixtureState out = *this;
  out.temperature = theta;
  out.total_density = rho;
  return out;
}

MixtureState build_mixture(std::span<const SpeciesSpec> species, double theta) {
  if (species.empty()) throw Error(ErrorKind::EmptyMixture, "mixture needs at least one species");
  if (!(theta > 0.0)) throw Error(ErrorKind::NonPositiveTemperature, "temperature must be positive");
  double rho = 0.0;
  for (const auto& s : species) {
    s.validate();
    rho += s.density;
  }
  MixtureState state;
  state.temperature = theta;
  state.total_density = rho;
  state.fractions.reserve(species.size());
  for (const auto& s : species) state.fractions.push_back(s.density / rho);
  return state;
}

std::vector<SpeciesSpec> with_densities(std::span<const SpeciesSpec> species,
                                        const MixtureState& state) {
  std::vector<SpeciesSpec> out(species.begin(), species.end());
  for (std::size_t a = 0; a < out.size(); ++a) out[a].density = state.species_density(a);
  return out;
}

MultiIndex::MultiIndex(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0) throw Error(ErrorKind::IndexOutOfRange, "multi-index counts must be non-negative");
    order_ += c;
  }
}

MultiIndex MultiIndex::one(std::size_t a, std::size_t n) {
  if (a >= n) throw Error(ErrorKind::IndexOutOfRange, "species index out of range");
  std::vector<int> c(n, 0);
  c[a] = 1;
  return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::two(std::size_t a, std::size_t n) {
  if (a >= n) throw Error(ErrorKind::IndexOutOfRange, "species index out of range");
  std::vector<int> c(n, 0);
  c[a] = 2;
  return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::pair(std::size_t a, std::size_t b, std::size_t n) {
  if (a >= n || b >= n || a == b)
    throw Error(ErrorKind::IndexOutOfRange, "(1_a 1_b) needs distinct in-range species");
  std::vector<int> c(n, 0);
  c[a] = 1;
  c[b] = 1;
  return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::lowered(std::size_t a) const {
  if (a >= counts_.size() || counts_[a] == 0)
    throw Error(ErrorKind::IndexOutOfRange, "cannot lower an empty group");
  auto c = counts_;
  --c[a];
  return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::raised(std::size_t a) const {
  if (a >= counts_.size()) throw Error(ErrorKind::IndexOutOfRange, "species index out of range");
  auto c = counts_;
  ++c[a];
  return MultiIndex(std::move(c));
}

MultiIndex multi_index(Shorthand shorthand, int n, int a, int b) {
  auto in_range = [n](int i) { return i >= 1 && i <= n; };
  if (n < 1 || !in_range(a)) throw Error(ErrorKind::IndexOutOfRange, "species index out of range");
  switch (shorthand) {
    case Shorthand::One: return MultiIndex::one(a - 1, n);
    case Shorthand::Two: return MultiIndex::two(a - 1, n);
    case Shorthand::Pair:
      if (!in_range(b) || a == b)
        throw Error(ErrorKind::IndexOutOfRange, "(1_a 1_b) needs distinct in-range species");
      return MultiIndex::pair(a - 1, b - 1, n);
  }
  throw Error(ErrorKind::IndexOutOfRange, "unknown shorthand");
}

struct MonotoneCubic::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 4)
    throw Error(ErrorKind::InvalidPotential, "table needs at least four (x, y) rows");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw Error(ErrorKind::InvalidPotential, "table abscissas must increase");
  front_ = x.front();
  back_ = x.back();
  try {
    impl_ = std::make_shared<const Impl>(
        Impl{boost::math::interpolators::pchip<std::vector<double>>(std::move(x), std::move(y))});
  } catch (const std::domain_error& e) {
    throw Error(ErrorKind::InvalidPotential, e.what());
  }
}

double MonotoneCubic::operator()(double x) const {
  if (x < front_ || x > back_)
    throw Error(ErrorKind::OutOfTableRange, "evaluation at " + std::to_string(x) + " outside table [" +
                                                std::to_string(front_) + ", " + std::to_string(back_) + "]");
  return impl_->spline(x);
}

double MonotoneCubic::derivative(double x) const {
  if (x < front_ || x > back_)
    throw Error(ErrorKind::OutOfTableRange, "derivative at " + std::to_string(x) + " outside table");
  return impl_->spline.prime(x);
}

PairPotential PairPotential::zero(std::size_t a, std::size_t b) {
  PairPotential p;
  p.a_ = a;
  p.b_ = b;
  p.name_ = "zero";
  p.value_ = [](double) { return 0.0; };
  p.derivative_ = [](double) { return 0.0; };
  p.range_end_ = 1.0;
  p.zero_ = true;
  p.compact_ = true;
  return p;
}

PairPotential PairPotential::step(std::size_t a, std::size_t b, double height, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidPotential, "step radius must be positive");
  PairPotential p;
  p.a_ = a;
  p.b_ = b;
  p.name_ = "step";
  p.value_ = [height, radius](double r) { return r < radius ? height : 0.0; };
  p.derivative_ = [](double) { return 0.0; };
  p.range_end_ = radius;
  p.breakpoints_ = {radius};
  p.jumps_ = {{radius, -height}};
  p.zero_ = height == 0.0;
  p.compact_ = true;
  return p;
}

PairPotential PairPotential::exponential(std::size_t a, std::size_t b, double amplitude,
                                         double length) {
  if (!(length > 0.0)) throw Error(ErrorKind::InvalidPotential, "decay length must be positive");
  return closed_form(
      a, b, [=](double r) { return amplitude * std::exp(-r / length); },
      [=](double r) { return -amplitude / length * std::exp(-r / length); }, length, "exponential");
}

PairPotential PairPotential::gaussian(std::size_t a, std::size_t b, double amplitude, double width) {
  if (!(width > 0.0)) throw Error(ErrorKind::InvalidPotential, "gaussian width must be positive");
  return closed_form(
      a, b, [=](double r) { return amplitude * std::exp(-r * r / (width * width)); },
      [=](double r) { return -2.0 * r / (width * width) * amplitude * std::exp(-r * r / (width * width)); },
      width, "gaussian");
}

PairPotential PairPotential::yukawa(std::size_t a, std::size_t b, double amplitude, double length) {
  if (!(length > 0.0)) throw Error(ErrorKind::InvalidPotential, "screening length must be positive");
  return closed_form(
      a, b, [=](double r) { return amplitude * std::exp(-r / length) / r; },
      [=](double r) { return -amplitude * std::exp(-r / length) * (1.0 / (r * r) + 1.0 / (r * length)); },
      length, "yukawa");
}

PairPotential PairPotential::lennard_jones(std::size_t a, std::size_t b, double epsilon, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidPotential, "sigma must be positive");
  auto p = closed_form(
      a, b,
      [=](double r) {
        const double s6 = std::pow(sigma / r, 6);
        return 4.0 * epsilon * (s6 * s6 - s6);
      },
      [=](double r) {
        const double s6 = std::pow(sigma / r, 6);
        return -24.0 * epsilon / r * (2.0 * s6 * s6 - s6);
      },
      sigma, "lennard-jones");
  p.breakpoints_ = {sigma, std::pow(2.0, 1.0 / 6.0) * sigma};
  return p;
}

PairPotential PairPotential::tabulated(std::size_t a, std::size_t b, std::vector<double> r,
                                       std::vector<double> k, std::optional<PowerTail> tail) {
  if (tail && !(tail->exponent > 3.0))
    throw Error(ErrorKind::InvalidPotential, "power tail exponent must exceed 3 for convergence");
  MonotoneCubic table(std::move(r), std::move(k));
  PairPotential p;
  p.a_ = a;
  p.b_ = b;
  p.name_ = "tabulated";
  p.range_begin_ = table.front();
  p.range_end_ = table.back();
  p.compact_ = tail && tail->coefficient == 0.0;
  const double end = table.back();
  p.value_ = [table, tail, end](double x) {
    if (x > end && tail) return tail->coefficient * std::pow(x, -tail->exponent);
    return table(x);
  };
  p.derivative_ = [table, tail, end](double x) {
    if (x > end && tail) return -tail->exponent * tail->coefficient * std::pow(x, -tail->exponent - 1.0);
    return table.derivative(x);
  };
  return p;
}

PairPotential PairPotential::closed_form(std::size_t a, std::size_t b, Radial value, Radial derivative,
                                         double scale, std::string name) {
  if (!value || !derivative) throw Error(ErrorKind::InvalidPotential, "closed form needs K and dK/dr");
  PairPotential p;
  p.a_ = a;
  p.b_ = b;
  p.name_ = std::move(name);
  p.value_ = std::move(value);
  p.derivative_ = std::move(derivative);
  p.range_end_ = 8.0 * scale;
  p.breakpoints_ = {scale, 2.0 * scale, 4.0 * scale};
  return p;
}

double PairPotential::value(double r) const { return value_(r); }
double PairPotential::derivative(double r) const { return derivative_(r); }

CorrelationModel::CorrelationModel(std::size_t a, std::size_t b, std::string name, Fn g,
                                   Partials partials, double fd_relative_step)
    : a_(a), b_(b), name_(std::move(name)), g_(std::move(g)), partials_(std::move(partials)),
      fd_relative_step_(fd_relative_step) {
  if (!g_) throw Error(ErrorKind::MissingCorrelation, "correlation model without evaluator");
}

CorrelationModel CorrelationModel::unity(std::size_t a, std::size_t b) {
  auto zero = [](double, double, double) { return 0.0; };
  return CorrelationModel(a, b, "unity", [](double, double, double) { return 1.0; }, {zero, zero, zero});
}

CorrelationModel CorrelationModel::classical_boltzmann(const PairPotential& potential) {
  const PairPotential k = potential;
  auto g = [k](double theta, double, double r) { return std::exp(-k.value(r) / theta); };
  Partials partials{
      [k](double theta, double, double r) {
        const double kr = k.value(r);
        return kr / (theta * theta) * std::exp(-kr / theta);
      },
      [](double, double, double) { return 0.0; },
      [k](double theta, double, double r) {
        return -k.derivative(r) / theta * std::exp(-k.value(r) / theta);
      }};
  return CorrelationModel(potential.first(), potential.second(), "classical-boltzmann", g, partials);
}

CorrelationModel CorrelationModel::tabulated(std::size_t a, std::size_t b, std::vector<double> r,
                                             std::vector<double> g) {
  MonotoneCubic table(std::move(r), std::move(g));
  auto value = [table](double, double, double x) { return x > table.back() ? 1.0 : table(x); };
  auto zero = [](double, double, double) { return 0.0; };
  auto slope = [table](double, double, double x) { return x > table.back() ? 0.0 : table.derivative(x); };
  return CorrelationModel(a, b, "tabulated", value, {zero, zero, slope});
}

double CorrelationModel::fd_step(double x) const {
  return fd_relative_step_ * std::max(std::abs(x), 1e-3);
}

double CorrelationModel::d_theta(double theta, double rho, double r) const {
  if (partials_.d_theta) return partials_.d_theta(theta, rho, r);
  const double h = fd_step(theta);
  return (g_(theta + h, rho, r) - g_(theta - h, rho, r)) / (2.0 * h);
}

double CorrelationModel::d_rho(double theta, double rho, double r) const {
  if (partials_.d_rho) return partials_.d_rho(theta, rho, r);
  const double h = fd_step(rho);
  return (g_(theta, rho + h, r) - g_(theta, rho - h, r)) / (2.0 * h);
}

double CorrelationModel::d_r(double theta, double rho, double r) const {
  if (partials_.d_r) return partials_.d_r(theta, rho, r);
  const double h = fd_step(r);
  return (g_(theta, rho, r + h) - g_(theta, rho, r - h)) / (2.0 * h);
}

std::array<double, 3> CorrelationModel::partial_noise(double theta, double rho, double r) const {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double g = std::abs(g_(theta, rho, r));
  auto bound = [&](const Fn& analytic, double x) { return analytic ? 0.0 : 4.0 * eps * g / fd_step(x); };
  return {bound(partials_.d_theta, theta), bound(partials_.d_rho, rho), bound(partials_.d_r, r)};
}

const PairPotential* find_potential(std::span<const PairPotential> potentials, std::size_t a,
                                    std::size_t b) {
  for (const auto& p : potentials)
    if (p.couples(a, b)) return &p;
  return nullptr;
}

const CorrelationModel* find_correlation(std::span<const CorrelationModel> correlations,
                                         std::size_t a, std::size_t b) {
  for (const auto& c : correlations)
    if (c.couples(a, b)) return &c;
  return nullptr;
}

}  // namespace mixtherm
