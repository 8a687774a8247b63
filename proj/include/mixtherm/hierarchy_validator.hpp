#pragma once

#include <complex>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mixtherm/core_types.hpp"

namespace mixtherm {

using Complex = std::complex<double>;

enum class Boundary { Periodic, HardWall };

/// Uniform 1-D lattice. Periodic grids have x_i = i L / n; hard-wall grids
/// include both walls, x_i = i L / (n - 1).
struct Grid1D {
  int points = 64;
  double length = 1.0;
  Boundary boundary = Boundary::Periodic;

  void validate() const;
  double spacing() const;
  double x(int i) const;
  bool same_as(const Grid1D& other) const;
};

/// (z - p^2 / 2m)^{-1}; PoleHit when |z - p^2 / 2m| < 1e-14.
Complex free_resolvent(double p, Complex z, double mass, double hbar = 1.0);

struct ResolventField {
  Grid1D grid;
  double momentum = 0.0;
  Complex z;
  double mass = 1.0;
  std::vector<double> potential;
  std::vector<Complex> values;
  double residual = 0.0;  // max-norm of the discrete equation's defect
};

/// Conjugated single-particle operator on a periodic grid,
/// L_p = -(hbar^2/2m) D2 - (i hbar p / m) D1 + p^2/2m + U, with central differences.
/// L_p is Hermitian; the resolvent equation reads (z - L_p) v = 1.
std::vector<Complex> conjugated_operator(const Grid1D& grid, std::span<const double> potential, double p,
                                         double mass, double hbar = 1.0);

/// Solves (hbar^2/2m) v'' + (i hbar/m) p v' + (z - p^2/2m - U) v = 1 by dense LU.
/// SingularSystem when the solve fails or the residual exceeds `residual_tolerance`.
ResolventField resolvent_solve(const Grid1D& grid, std::span<const double> potential, double p, Complex z,
                               double mass, double hbar = 1.0, double residual_tolerance = 1e-10);

/// sum_v psi_v <psi_v, 1> / (z - eps_v) from a dense eigendecomposition of L_p.
/// TooLarge past `max_points`.
std::vector<Complex> resolvent_spectral(const Grid1D& grid, std::span<const double> potential, double p,
                                        Complex z, double mass, double hbar = 1.0, int max_points = 512);

/// Two same-species particles on a periodic grid with
/// U_2(x1, x2) = U(x1) + U(x2) + K(x1 - x2), solved spectrally.
/// Result is row-major v[i1 * n + i2].
std::vector<Complex> pair_resolvent_spectral(const Grid1D& grid, std::span<const double> potential,
                                             const std::function<double(double)>& pair_potential,
                                             double p1, double p2, Complex z, double mass,
                                             double hbar = 1.0, int max_points = 512);

/// rho_s at separation r (second particle displaced along x) for a uniform ideal
/// medium: the residue at the kinetic energy turns the contour integral into
/// n_s(sum p^2 / 2m), and the momentum integrals are done per particle by
/// Gauss-Hermite quadrature. UnsupportedOrder when order(s) > 2.
double density_from_contour(const MultiIndex& s, std::span<const SpeciesSpec> species, double tau, double r,
                            double hbar = 1.0, int dimension = 3, int hermite_points = 96);

struct ContourComparison {
  std::vector<double> residue;  // sum_v A e^{-eps_v/tau} |psi_v(x)|^2 / h
  std::vector<double> contour;  // numeric contour integral of the resolvent diagonal
  double max_relative_difference = 0.0;
};

/// Diagonal single-particle density on a periodic grid, once by residues over
/// the grid spectrum and once by composite Gauss-Legendre on a rectangle
/// enclosing the spectrum.
ContourComparison residue_versus_contour(const Grid1D& grid, std::span<const double> potential, double mass,
                                         double tau, double amplitude = 1.0, double hbar = 1.0,
                                         int panels_per_edge = 24, int nodes_per_panel = 16);

/// rho_s = A_s exp(-U_s / theta) for s = 1 on grid samples.
struct ClassicalAnsatz {
  Grid1D grid;
  std::vector<double> potential;  // U_1(x_i)
  double theta = 1.0;
  double normalizer = 1.0;

  double density(int i) const;
};

/// rho_2 = A_2 exp(-U_2(x, x') / theta) with U_2 given as a function.
struct PairAnsatz {
  Grid1D grid;
  std::function<double(double, double)> potential;
  double theta = 1.0;
  double normalizer = 1.0;

  double density(double x, double xp) const;
};

/// Signed separation x - x' (minimum image on periodic grids).
double separation(const Grid1D& grid, double x, double xp);

/// U_2 = K(x - x'), the low-density closure.
PairAnsatz low_density_closure(const Grid1D& grid, const PairPotential& potential, double theta,
                               double normalizer = 1.0);

/// U_1 from rho_1(x) = int rho_2(x, x') dx', with A_1 = 1.
ClassicalAnsatz marginal_ansatz(const PairAnsatz& pair);

struct BbgkyResidual {
  std::vector<double> lhs;  // dU_1/dx rho_1
  std::vector<double> rhs;  // int rho_2 dK/dx dx'
  double max_residual = 0.0;
};

/// First classical hierarchy equation for s = (1_a), b = a, in 1-D with no
/// external field. GridMismatch when the two ansatz grids differ.
BbgkyResidual classical_bbgky_residual(const ClassicalAnsatz& single, const PairAnsatz& pair,
                                       const PairPotential& potential, double relative_tolerance = 1e-12);

/// sum_k c_k cos(2 pi k x / L + phi_k), k = 1..modes, c_k uniform in [-amplitude, amplitude].
std::vector<double> random_periodic_potential(const Grid1D& grid, std::mt19937_64& rng, int modes,
                                              double amplitude);

struct ValidationRow {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool must_exceed = false;  // discriminator rows pass when residual > threshold
  bool passed = false;
};

struct ValidationOptions {
  unsigned long long seed = 20240917ULL;
  int random_potentials = 10;
  int grid_points = 128;
  int threads = 1;
  double resolvent_residual = 1e-10;
  int oracle_max_points = 512;
};

std::vector<ValidationRow> run_validation_suite(const ValidationOptions& options = {});

}  // namespace mixtherm
