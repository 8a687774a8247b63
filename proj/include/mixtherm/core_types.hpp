#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixtherm/error.hpp"

namespace mixtherm {

/// Natural units: hbar = k_B = 1 unless rescaled for display.
struct UnitSystem {
  double hbar = 1.0;
  std::string convention = "natural units, hbar = k_B = 1";

  void validate() const;
};

enum class Statistics { Fermi, Bose };

std::string_view to_string(Statistics stats);
Statistics parse_statistics(std::string_view text);

/// Sign entering exchange terms: +1 for bosons, -1 for fermions.
inline int exchange_sign(Statistics stats) { return stats == Statistics::Bose ? 1 : -1; }

struct SpeciesSpec {
  std::string label;
  double mass = 1.0;
  int spin_degeneracy = 1;  // kappa = 2 s + 1
  Statistics statistics = Statistics::Fermi;
  double density = 1.0;     // rho_a = N_a / V

  void validate() const;
};

struct MixtureState {
  double temperature = 1.0;
  double total_density = 1.0;
  std::vector<double> fractions;

  double species_density(std::size_t a) const { return total_density * fractions.at(a); }
  /// Same composition at a different thermodynamic point.
  MixtureState at(double theta, double rho) const;
};

MixtureState build_mixture(std::span<const SpeciesSpec> species, double theta);

/// Species with densities taken from `state` (composition fractions x total density).
std::vector<SpeciesSpec> with_densities(std::span<const SpeciesSpec> species,
                                        const MixtureState& state);

/// Multi-index (s_1, ..., s_n) labelling the order of a reduced density matrix.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> counts);

  static MultiIndex zero(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }
  /// (1_a), 0-based species index.
  static MultiIndex one(std::size_t a, std::size_t n);
  /// (2_a)
  static MultiIndex two(std::size_t a, std::size_t n);
  /// (1_a 1_b), a != b
  static MultiIndex pair(std::size_t a, std::size_t b, std::size_t n);

  std::span<const int> counts() const { return counts_; }
  int operator[](std::size_t a) const { return counts_.at(a); }
  std::size_t species_count() const { return counts_.size(); }
  int order() const { return order_; }

  MultiIndex lowered(std::size_t a) const;
  MultiIndex raised(std::size_t a) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> counts_;
  int order_ = 0;
};

enum class Shorthand { One, Two, Pair };

/// 1-based species indices, as written in the notation (1_a), (2_a), (1_a 1_b).
MultiIndex multi_index(Shorthand shorthand, int n, int a, int b = 0);

/// Monotone piecewise-cubic (PCHIP) interpolant over a strictly increasing table.
/// Evaluation outside [front, back] raises OutOfTableRange.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double front() const { return front_; }
  double back() const { return back_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  double front_ = 0.0;
  double back_ = 0.0;
};

/// Radial pair potential K_ab(r). Immutable; copies share state.
class PairPotential {
 public:
  using Radial = std::function<double(double)>;

  /// K(r+) - K(r-) at a point discontinuity.
  struct Jump {
    double r;
    double delta;
  };

  /// Analytic continuation beyond a table: K = coefficient * r^(-exponent).
  struct PowerTail {
    double coefficient = 0.0;
    double exponent = 6.0;
  };

  static PairPotential zero(std::size_t a, std::size_t b);
  /// K0 for r < R, 0 beyond.
  static PairPotential step(std::size_t a, std::size_t b, double height, double radius);
  static PairPotential exponential(std::size_t a, std::size_t b, double amplitude, double length);
  static PairPotential gaussian(std::size_t a, std::size_t b, double amplitude, double width);
  static PairPotential yukawa(std::size_t a, std::size_t b, double amplitude, double length);
  static PairPotential lennard_jones(std::size_t a, std::size_t b, double epsilon, double sigma);
  /// Tabulated (r_i, K_i) with monotone cubic interpolation. Without a tail,
  /// evaluation past the last abscissa is an error.
  static PairPotential tabulated(std::size_t a, std::size_t b, std::vector<double> r,
                                 std::vector<double> k, std::optional<PowerTail> tail = {});
  /// Arbitrary closed form. `scale` is the length over which K varies.
  static PairPotential closed_form(std::size_t a, std::size_t b, Radial value, Radial derivative,
                                   double scale, std::string name = "custom");

  std::size_t first() const { return a_; }
  std::size_t second() const { return b_; }
  bool couples(std::size_t a, std::size_t b) const {
    return (a == a_ && b == b_) || (a == b_ && b == a_);
  }

  double value(double r) const;
  double derivative(double r) const;

  bool is_zero() const { return zero_; }
  /// K vanishes identically past range_end().
  bool compact_support() const { return compact_; }
  const std::string& name() const { return name_; }
  /// Radius past which the analytic tail takes over (table end, or a few
  /// characteristic lengths for closed forms).
  double range_end() const { return range_end_; }
  /// Radius where K starts (table front; 0 for closed forms).
  double range_begin() const { return range_begin_; }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const Jump> jumps() const { return jumps_; }

 private:
  PairPotential() = default;

  std::size_t a_ = 0, b_ = 0;
  std::string name_;
  Radial value_;
  Radial derivative_;
  double range_begin_ = 0.0;
  double range_end_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<Jump> jumps_;
  bool zero_ = false;
  bool compact_ = false;
};

/// Pair correlation g_ab(theta, rho, r) with partial derivatives.
/// Missing partials fall back to central differences with relative step 1e-5.
class CorrelationModel {
 public:
  using Fn = std::function<double(double theta, double rho, double r)>;

  struct Partials {
    Fn d_theta;
    Fn d_rho;
    Fn d_r;
  };

  CorrelationModel(std::size_t a, std::size_t b, std::string name, Fn g, Partials partials = {},
                   double fd_relative_step = 1e-5);

  static CorrelationModel unity(std::size_t a, std::size_t b);
  /// g = exp(-K/theta).
  static CorrelationModel classical_boltzmann(const PairPotential& potential);
  /// Density- and temperature-independent tabulated g(r); g = 1 past the table.
  static CorrelationModel tabulated(std::size_t a, std::size_t b, std::vector<double> r,
                                    std::vector<double> g);

  std::size_t first() const { return a_; }
  std::size_t second() const { return b_; }
  bool couples(std::size_t a, std::size_t b) const {
    return (a == a_ && b == b_) || (a == b_ && b == a_);
  }
  const std::string& name() const { return name_; }

  double operator()(double theta, double rho, double r) const { return g_(theta, rho, r); }
  double d_theta(double theta, double rho, double r) const;
  double d_rho(double theta, double rho, double r) const;
  double d_r(double theta, double rho, double r) const;
  /// Roundoff bound on the differenced partials (d_theta, d_rho, d_r); zero where analytic.
  std::array<double, 3> partial_noise(double theta, double rho, double r) const;

 private:
  double fd_step(double x) const;

  std::size_t a_, b_;
  std::string name_;
  Fn g_;
  Partials partials_;
  double fd_relative_step_;
};

const PairPotential* find_potential(std::span<const PairPotential> potentials, std::size_t a,
                                    std::size_t b);
const CorrelationModel* find_correlation(std::span<const CorrelationModel> correlations,
                                         std::size_t a, std::size_t b);

/// Numeric knobs with their documented defaults; all overridable from config.
struct Tolerances {
  double kernel_relative = 1e-10;        // G_k quadrature and inversion
  double radial_relative = 1e-10;        // radial quadratures in E, p and the tau equation
  double fd_relative_step = 1e-5;        // correlation partials fallback
  double characteristics_relative = 1e-9;
  double anchor_alpha = -10.0;           // classical anchor requirement
  double enumeration_limit = 1e6;        // prod s_a!
  int z_grid_points = 64;                // on [0, 10 tau]
  double z_grid_extent = 10.0;           // in units of tau
  int oracle_max_points = 512;           // dense eigendecomposition cap
  double resolvent_residual = 1e-10;
};

}  // namespace mixtherm
