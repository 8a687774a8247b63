#include "mixtherm/hierarchy_validator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include <Eigen/Dense>

#include "mixtherm/exchange.hpp"
#include "mixtherm/ns_coefficients.hpp"
#include "mixtherm/parallel.hpp"
#include "mixtherm/quadrature.hpp"

namespace mixtherm {

namespace {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr double pi = std::numbers::pi;

Matrix operator_matrix(const Grid1D& grid, std::span<const double> potential, double p, double mass,
                       double hbar) {
  grid.validate();
  if (grid.boundary != Boundary::Periodic)
    throw Error(ErrorKind::GridMismatch, "the resolvent operator needs a periodic grid");
  const int n = grid.points;
  if (static_cast<int>(potential.size()) != n)
    throw Error(ErrorKind::GridMismatch, "potential samples do not match the grid");
  if (!(mass > 0.0)) throw Error(ErrorKind::DomainError, "mass must be positive");
  const double h = grid.spacing();
  const double kinetic = hbar * hbar / (2.0 * mass) / (h * h);
  const double drift = hbar * p / mass / (2.0 * h);
  const Complex up(-kinetic, -drift);
  const Complex down(-kinetic, drift);
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 2.0 * kinetic + p * p / (2.0 * mass) + potential[static_cast<std::size_t>(i)];
    m(i, (i + 1) % n) += up;
    m(i, (i + n - 1) % n) += down;
  }
  return m;
}

void check_size(int rows, int max_points) {
  if (rows > max_points)
    throw Error(ErrorKind::TooLarge, "dense eigendecomposition capped at " + std::to_string(max_points) +
                                         " unknowns, got " + std::to_string(rows));
}

Vector spectral_apply_ones(const Matrix& op, Complex z) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(op);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "eigendecomposition failed");
  const auto& psi = eig.eigenvectors();
  const auto& eps = eig.eigenvalues();
  const Vector ones = Vector::Ones(op.rows());
  Vector out = Vector::Zero(op.rows());
  for (Eigen::Index v = 0; v < op.rows(); ++v) {
    const Complex overlap = psi.col(v).dot(ones);  // conjugates the first argument
    out += psi.col(v) * (overlap / (z - eps(v)));
  }
  return out;
}

std::vector<Complex> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

/// 5-point first derivative; one-sided 5-point forms at hard walls.
std::vector<double> derivative(const Grid1D& grid, const std::vector<double>& f) {
  const int n = grid.points;
  const double h = grid.spacing();
  std::vector<double> d(static_cast<std::size_t>(n));
  auto at = [&](int i) { return f[static_cast<std::size_t>(i)]; };
  for (int i = 0; i < n; ++i) {
    double value;
    if (grid.boundary == Boundary::Periodic) {
      auto w = [&](int k) { return at(((i + k) % n + n) % n); };
      value = (w(-2) - 8.0 * w(-1) + 8.0 * w(1) - w(2)) / (12.0 * h);
    } else if (i >= 2 && i <= n - 3) {
      value = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
    } else {
      // Five-point stencil on x_{b}, ..., x_{b+4} evaluated at x_i.
      const int base = i < 2 ? 0 : n - 5;
      const double t = i - base;
      value = 0.0;
      for (int k = 0; k < 5; ++k) {
        // Derivative of the k-th Lagrange basis polynomial at t.
        double denom = 1.0;
        for (int j = 0; j < 5; ++j)
          if (j != k) denom *= (k - j);
        double sum = 0.0;
        for (int j = 0; j < 5; ++j) {
          if (j == k) continue;
          double prod = 1.0;
          for (int l = 0; l < 5; ++l)
            if (l != k && l != j) prod *= (t - l);
          sum += prod;
        }
        value += at(base + k) * sum / denom;
      }
      value /= h;
    }
    d[static_cast<std::size_t>(i)] = value;
  }
  return d;
}

double signed_force(const PairPotential& potential, double d) {
  const double r = std::abs(d);
  if (r == 0.0) return 0.0;
  return d > 0.0 ? potential.derivative(r) : -potential.derivative(r);
}

}  // namespace

void Grid1D::validate() const {
  if (points < 16) throw Error(ErrorKind::GridMismatch, "grid needs at least 16 points");
  if (!(length > 0.0)) throw Error(ErrorKind::GridMismatch, "grid length must be positive");
}

double Grid1D::spacing() const {
  return boundary == Boundary::Periodic ? length / points : length / (points - 1);
}

double Grid1D::x(int i) const { return i * spacing(); }

bool Grid1D::same_as(const Grid1D& other) const {
  return points == other.points && length == other.length && boundary == other.boundary;
}

Complex free_resolvent(double p, Complex z, double mass, double hbar) {
  if (!(mass > 0.0)) throw Error(ErrorKind::DomainError, "mass must be positive");
  (void)hbar;
  const Complex gap = z - p * p / (2.0 * mass);
  if (std::abs(gap) < 1e-14) throw Error(ErrorKind::PoleHit, "z sits on the kinetic energy p^2/2m");
  return 1.0 / gap;
}

std::vector<Complex> conjugated_operator(const Grid1D& grid, std::span<const double> potential, double p,
                                         double mass, double hbar) {
  const Matrix m = operator_matrix(grid, potential, p, mass, hbar);
  std::vector<Complex> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  return out;
}

ResolventField resolvent_solve(const Grid1D& grid, std::span<const double> potential, double p, Complex z,
                               double mass, double hbar, double residual_tolerance) {
  const Matrix op = operator_matrix(grid, potential, p, mass, hbar);
  const Eigen::Index n = op.rows();
  const Matrix system = z * Matrix::Identity(n, n) - op;
  const Vector rhs = Vector::Ones(n);
  Eigen::PartialPivLU<Matrix> lu(system);
  const Vector v = lu.solve(rhs);
  const double residual = (system * v - rhs).cwiseAbs().maxCoeff();
  if (!v.allFinite() || !(residual <= residual_tolerance))
    throw Error(ErrorKind::SingularSystem,
                "resolvent system residual " + std::to_string(residual) + " above tolerance");
  ResolventField field;
  field.grid = grid;
  field.momentum = p;
  field.z = z;
  field.mass = mass;
  field.potential.assign(potential.begin(), potential.end());
  field.values = to_std(v);
  field.residual = residual;
  return field;
}

std::vector<Complex> resolvent_spectral(const Grid1D& grid, std::span<const double> potential, double p,
                                        Complex z, double mass, double hbar, int max_points) {
  check_size(grid.points, max_points);
  return to_std(spectral_apply_ones(operator_matrix(grid, potential, p, mass, hbar), z));
}

std::vector<Complex> pair_resolvent_spectral(const Grid1D& grid, std::span<const double> potential,
                                             const std::function<double(double)>& pair_potential,
                                             double p1, double p2, Complex z, double mass, double hbar,
                                             int max_points) {
  const int n = grid.points;
  check_size(n * n, max_points);
  const Matrix a = operator_matrix(grid, potential, p1, mass, hbar);
  const Matrix b = operator_matrix(grid, potential, p2, mass, hbar);
  // Kronecker sum L1 (x) 1 + 1 (x) L2, index i1 * n + i2.
  Matrix op = Matrix::Zero(n * n, n * n);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      const int row = i1 * n + i2;
      for (int j = 0; j < n; ++j) {
        op(row, j * n + i2) += a(i1, j);
        op(row, i1 * n + j) += b(i2, j);
      }
      op(row, row) += pair_potential(separation(grid, grid.x(i1), grid.x(i2)));
    }
  return to_std(spectral_apply_ones(op, z));
}

double density_from_contour(const MultiIndex& s, std::span<const SpeciesSpec> species, double tau, double r,
                            double hbar, int dimension, int hermite_points) {
  if (s.order() > 2) throw Error(ErrorKind::UnsupportedOrder, "contour densities are limited to order 2");
  if (s.order() < 1) throw Error(ErrorKind::IndexOutOfRange, "density needs at least one particle");
  if (s.species_count() != species.size())
    throw Error(ErrorKind::IndexOutOfRange, "multi-index does not match the species list");
  if (!(tau > 0.0)) throw Error(ErrorKind::NonPositiveTau, "tau must be positive");
  if (dimension != 1 && dimension != 3) throw Error(ErrorKind::DomainError, "dimension must be 1 or 3");

  // Global particle list: species index and x-position (0 for the first, r for the second).
  std::vector<std::size_t> kind;
  for (std::size_t a = 0; a < species.size(); ++a)
    for (int k = 0; k < s[a]; ++k) kind.push_back(a);
  std::vector<double> x(kind.size(), 0.0);
  if (x.size() == 2) x[1] = r;

  const auto rule = quad::gauss_hermite(hermite_points);
  // int exp(-p^2 / 2 m tau) cos(p delta / hbar) dp over the real line.
  auto gaussian_fourier = [&](double mass, double delta) {
    const double width = std::sqrt(2.0 * mass * tau);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      sum += rule.weights[k] * std::cos(rule.nodes[k] * width * delta / hbar);
    return width * sum;
  };

  double amplitude = 1.0;
  for (std::size_t a = 0; a < species.size(); ++a)
    amplitude *= std::pow(thermal_factor(species[a], tau, hbar, dimension), s[a]);

  double total = 0.0;
  for (const auto& perm : enumerate_permutations(s)) {
    // Global image of each particle under the permutation.
    std::vector<std::size_t> image(kind.size());
    std::size_t offset = 0;
    for (std::size_t a = 0; a < perm.groups.size(); ++a) {
      for (std::size_t k = 0; k < perm.groups[a].size(); ++k)
        image[offset + k] = offset + static_cast<std::size_t>(perm.groups[a][k]);
      offset += perm.groups[a].size();
    }
    // sum_k r_k (p_k - p_P(k)) = sum_j p_j (r_j - r_{P^-1(j)}).
    std::vector<double> delta(kind.size(), 0.0);
    for (std::size_t k = 0; k < kind.size(); ++k) {
      delta[k] += x[k];
      delta[image[k]] -= x[k];
    }
    double product = static_cast<double>(kappa_weight(perm, species));
    for (std::size_t j = 0; j < kind.size(); ++j) {
      const double mass = species[kind[j]].mass;
      product *= gaussian_fourier(mass, delta[j]) * std::pow(gaussian_fourier(mass, 0.0), dimension - 1);
    }
    total += product;
  }
  return amplitude * total / std::pow(2.0 * pi * hbar, dimension * s.order());
}

ContourComparison residue_versus_contour(const Grid1D& grid, std::span<const double> potential, double mass,
                                         double tau, double amplitude, double hbar, int panels_per_edge,
                                         int nodes_per_panel) {
  if (!(tau > 0.0)) throw Error(ErrorKind::NonPositiveTau, "tau must be positive");
  const Matrix h = operator_matrix(grid, potential, 0.0, mass, hbar);
  const Eigen::Index n = h.rows();
  const double cell = grid.spacing();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const auto& eps = eig.eigenvalues();
  ContourComparison out;
  out.residue.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index v = 0; v < n; ++v) {
    const double weight = amplitude * std::exp(-eps(v) / tau) / cell;
    for (Eigen::Index i = 0; i < n; ++i)
      out.residue[static_cast<std::size_t>(i)] += weight * std::norm(eig.eigenvectors()(i, v));
  }

  const double lo = eps.minCoeff();
  const double hi = eps.maxCoeff();
  const double margin = std::min(0.25 * (hi - lo), 4.0 * tau) + 0.1 * tau;
  const std::array<Complex, 5> corners = {Complex(lo - margin, -margin), Complex(hi + margin, -margin),
                                          Complex(hi + margin, margin), Complex(lo - margin, margin),
                                          Complex(lo - margin, -margin)};
  const auto rule = quad::gauss_legendre(nodes_per_panel);
  std::vector<Complex> acc(static_cast<std::size_t>(n), Complex(0.0));
  for (int e = 0; e < 4; ++e) {
    const Complex from = corners[static_cast<std::size_t>(e)];
    const Complex to = corners[static_cast<std::size_t>(e + 1)];
    const int panels = std::max(panels_per_edge, static_cast<int>(std::ceil(std::abs(to - from) / (0.5 * margin))));
    const Complex step = (to - from) / static_cast<double>(panels);
    for (int k = 0; k < panels; ++k) {
      const Complex mid = from + step * (k + 0.5);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const Complex z = mid + 0.5 * step * rule.nodes[q];
        const Matrix inverse = (z * Matrix::Identity(n, n) - h).partialPivLu().inverse();
        const Complex factor = 0.5 * step * rule.weights[q] * amplitude * std::exp(-z / tau);
        for (Eigen::Index i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] += factor * inverse(i, i);
      }
    }
  }
  out.contour.resize(static_cast<std::size_t>(n));
  double scale = 0.0;
  for (double v : out.residue) scale = std::max(scale, std::abs(v));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.contour[k] = (acc[k] / Complex(0.0, 2.0 * pi)).real() / cell;
    out.max_relative_difference =
        std::max(out.max_relative_difference, std::abs(out.contour[k] - out.residue[k]) / scale);
  }
  return out;
}

double ClassicalAnsatz::density(int i) const {
  return normalizer * std::exp(-potential.at(static_cast<std::size_t>(i)) / theta);
}

double PairAnsatz::density(double x, double xp) const { return normalizer * std::exp(-potential(x, xp) / theta); }

double separation(const Grid1D& grid, double x, double xp) {
  double d = x - xp;
  if (grid.boundary == Boundary::Periodic) d -= grid.length * std::round(d / grid.length);
  return d;
}

PairAnsatz low_density_closure(const Grid1D& grid, const PairPotential& potential, double theta,
                               double normalizer) {
  grid.validate();
  if (!(theta > 0.0)) throw Error(ErrorKind::NonPositiveTemperature, "temperature must be positive");
  PairAnsatz pair;
  pair.grid = grid;
  pair.theta = theta;
  pair.normalizer = normalizer;
  pair.potential = [grid, potential](double x, double xp) {
    return potential.value(std::abs(separation(grid, x, xp)));
  };
  return pair;
}

namespace {

/// int over the cell of f(x') dx': grid sums when periodic, adaptive quadrature
/// split at x otherwise.
double cell_integral(const Grid1D& grid, double x, const std::function<double(double)>& f, double rtol) {
  if (grid.boundary == Boundary::Periodic) {
    // Pair offsets k and n - k so odd integrands cancel exactly.
    const int n = grid.points;
    const double h = grid.spacing();
    double sum = f(x);
    for (int k = 1; 2 * k < n; ++k) sum += f(x + k * h) + f(x - k * h);
    if (n % 2 == 0) {
      const double half = 0.5 * n * h;
      sum += 0.5 * (f(x + half) + f(x - half));
    }
    return sum * h;
  }
  quad::Options opt;
  opt.relative = rtol;
  opt.absolute = 1e-300;
  std::vector<double> points = {0.0};
  if (x > 0.0 && x < grid.length) points.push_back(x);
  points.push_back(grid.length);
  return quad::require(quad::integrate_pieces(f, points, false, opt), "cell integral");
}

}  // namespace

ClassicalAnsatz marginal_ansatz(const PairAnsatz& pair) {
  pair.grid.validate();
  ClassicalAnsatz single;
  single.grid = pair.grid;
  single.theta = pair.theta;
  single.normalizer = 1.0;
  single.potential.resize(static_cast<std::size_t>(pair.grid.points));
  for (int i = 0; i < pair.grid.points; ++i) {
    const double x = pair.grid.x(i);
    const double rho1 = cell_integral(pair.grid, x, [&](double xp) { return pair.density(x, xp); }, 1e-13);
    single.potential[static_cast<std::size_t>(i)] = -pair.theta * std::log(rho1);
  }
  return single;
}

BbgkyResidual classical_bbgky_residual(const ClassicalAnsatz& single, const PairAnsatz& pair,
                                       const PairPotential& potential, double relative_tolerance) {
  if (!single.grid.same_as(pair.grid)) throw Error(ErrorKind::GridMismatch, "ansatz grids differ");
  const Grid1D& grid = single.grid;
  grid.validate();
  if (static_cast<int>(single.potential.size()) != grid.points)
    throw Error(ErrorKind::GridMismatch, "U_1 samples do not match the grid");
  const auto slope = derivative(grid, single.potential);
  BbgkyResidual out;
  out.lhs.resize(static_cast<std::size_t>(grid.points));
  out.rhs.resize(static_cast<std::size_t>(grid.points));
  for (int i = 0; i < grid.points; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double x = grid.x(i);
    out.lhs[k] = slope[k] * single.density(i);
    out.rhs[k] = cell_integral(
        grid, x, [&](double xp) { return pair.density(x, xp) * signed_force(potential, separation(grid, x, xp)); },
        relative_tolerance);
    out.max_residual = std::max(out.max_residual, std::abs(out.lhs[k] - out.rhs[k]));
  }
  return out;
}

namespace {

ValidationRow row(std::string name, double residual, double threshold, bool must_exceed = false) {
  ValidationRow r;
  r.name = std::move(name);
  r.residual = residual;
  r.threshold = threshold;
  r.must_exceed = must_exceed;
  r.passed = must_exceed ? residual > threshold : residual <= threshold;
  return r;
}

double max_difference(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

std::vector<double> random_periodic_potential(const Grid1D& grid, std::mt19937_64& rng, int modes,
                                              double amplitude) {
  std::uniform_real_distribution<double> coef(-amplitude, amplitude);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  std::vector<double> c(static_cast<std::size_t>(modes)), phi(static_cast<std::size_t>(modes));
  for (int k = 0; k < modes; ++k) {
    c[static_cast<std::size_t>(k)] = coef(rng);
    phi[static_cast<std::size_t>(k)] = phase(rng);
  }
  std::vector<double> u(static_cast<std::size_t>(grid.points));
  for (int i = 0; i < grid.points; ++i) {
    double sum = 0.0;
    for (int k = 0; k < modes; ++k)
      sum += c[static_cast<std::size_t>(k)] *
             std::cos(2.0 * pi * (k + 1) * grid.x(i) / grid.length + phi[static_cast<std::size_t>(k)]);
    u[static_cast<std::size_t>(i)] = sum;
  }
  return u;
}

std::vector<ValidationRow> run_validation_suite(const ValidationOptions& options) {
  std::vector<ValidationRow> rows;
  std::mt19937_64 rng(options.seed);
  const double mass = 1.0;
  const Complex z(0.7, 0.5);

  {
    Grid1D grid{options.grid_points, 2.0 * pi, Boundary::Periodic};
    const double p = 3.0;  // reciprocal-lattice momentum for L = 2 pi
    const std::vector<double> zero(static_cast<std::size_t>(grid.points), 0.0);
    const auto field = resolvent_solve(grid, zero, p, z, mass, 1.0, options.resolvent_residual);
    const Complex exact = free_resolvent(p, z, mass);
    double diff = 0.0;
    for (const auto& v : field.values) diff = std::max(diff, std::abs(v - exact));
    rows.push_back(row("free_resolvent_plane_wave", diff, 1e-9));
  }

  {
    Grid1D grid{options.grid_points, 2.0 * pi, Boundary::Periodic};
    const auto count = static_cast<std::size_t>(options.random_potentials);
    std::vector<std::vector<double>> potentials;
    std::vector<double> momenta;
    std::uniform_real_distribution<double> pdist(-2.0, 2.0);
    for (std::size_t k = 0; k < count; ++k) {
      potentials.push_back(random_periodic_potential(grid, rng, 4, 1.0));
      momenta.push_back(pdist(rng));
    }
    std::vector<double> diff(count), residual(count);
    parallel_for(count, options.threads, [&](std::size_t k) {
      const auto solved = resolvent_solve(grid, potentials[k], momenta[k], z, mass, 1.0, options.resolvent_residual);
      const auto oracle = resolvent_spectral(grid, potentials[k], momenta[k], z, mass, 1.0, options.oracle_max_points);
      diff[k] = max_difference(solved.values, oracle);
      residual[k] = solved.residual;
    });
    rows.push_back(row("resolvent_vs_spectral_oracle", *std::max_element(diff.begin(), diff.end()), 1e-8));
    rows.push_back(row("resolvent_solve_residual", *std::max_element(residual.begin(), residual.end()),
                       options.resolvent_residual));
  }

  {
    Grid1D grid{16, 2.0 * pi, Boundary::Periodic};
    const auto u = random_periodic_potential(grid, rng, 3, 0.5);
    const auto k = [](double d) { return std::exp(-d * d); };
    const double p1 = 0.8, p2 = -1.3;
    const auto forward = pair_resolvent_spectral(grid, u, k, p1, p2, z, mass, 1.0, options.oracle_max_points);
    const auto swapped = pair_resolvent_spectral(grid, u, k, p2, p1, z, mass, 1.0, options.oracle_max_points);
    const int n = grid.points;
    double diff = 0.0;
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        diff = std::max(diff, std::abs(forward[static_cast<std::size_t>(i1 * n + i2)] -
                                       swapped[static_cast<std::size_t>(i2 * n + i1)]));
    rows.push_back(row("pair_interchange_symmetry", diff, 1e-12));
  }

  {
    Grid1D grid{24, 2.0 * pi, Boundary::Periodic};
    const auto u = random_periodic_potential(grid, rng, 3, 1.0);
    const auto cmp = residue_versus_contour(grid, u, mass, 5.0);
    rows.push_back(row("residue_vs_contour", cmp.max_relative_difference, 1e-8));
  }

  {
    double diff = 0.0;
    for (const auto& [stats, kappa] : {std::pair{Statistics::Fermi, 2}, std::pair{Statistics::Bose, 3}}) {
      const std::vector<SpeciesSpec> sp = {{"a", 1.3, kappa, stats, 0.4}};
      const double tau = 0.9;
      for (int k = 0; k < 50; ++k) {
        const double r = 0.08 * k;
        const double rho2 = density_from_contour(MultiIndex::two(0, 1), sp, tau, r);
        diff = std::max(diff, std::abs(rho2 / (0.4 * 0.4) - ideal_pair_correlation(r, sp[0], tau)));
      }
    }
    rows.push_back(row("exchange_pair_correlation", diff, 1e-8));
  }

  {
    const std::vector<SpeciesSpec> sp = {{"a", 1.0, 2, Statistics::Fermi, 0.3},
                                         {"b", 2.5, 3, Statistics::Bose, 0.7}};
    double diff = 0.0;
    for (int k = 0; k < 50; ++k) {
      const double rho2 = density_from_contour(MultiIndex::pair(0, 1, 2), sp, 1.1, 0.1 * k);
      diff = std::max(diff, std::abs(rho2 / (0.3 * 0.7) - 1.0));
    }
    rows.push_back(row("cross_species_no_exchange", diff, 1e-12));
  }

  {
    double diff = 0.0;
    for (auto stats : {Statistics::Fermi, Statistics::Bose})
      for (const auto& [m, kappa, tau] : {std::tuple{1.0, 2, 1.0}, std::tuple{4.0, 1, 0.2}, std::tuple{0.3, 3, 7.0}}) {
        const std::vector<SpeciesSpec> sp = {{"a", m, kappa, stats, 0.8}};
        diff = std::max(diff, std::abs(density_from_contour(MultiIndex::one(0, 1), sp, tau, 0.0) / 0.8 - 1.0));
      }
    rows.push_back(row("single_particle_normalization", diff, 1e-10));
  }

  {
    const auto k = PairPotential::gaussian(0, 0, 1.0, 0.5);
    Grid1D box{401, 4.0, Boundary::HardWall};
    const auto pair = low_density_closure(box, k, 1.0);
    const auto single = marginal_ansatz(pair);
    rows.push_back(row("bbgky_low_density_closure", classical_bbgky_residual(single, pair, k).max_residual, 1e-6));

    auto wrong = pair;
    wrong.potential = [box, k](double x, double xp) { return -k.value(std::abs(separation(box, x, xp))); };
    rows.push_back(
        row("bbgky_wrong_sign_discriminates", classical_bbgky_residual(single, wrong, k).max_residual, 1e-2, true));

    Grid1D ring{128, 8.0, Boundary::Periodic};
    const auto uniform = low_density_closure(ring, k, 1.0);
    rows.push_back(row("bbgky_isotropic_uniform",
                       classical_bbgky_residual(marginal_ansatz(uniform), uniform, k).max_residual, 1e-12));
  }
  return rows;
}

}  // namespace mixtherm
