#include "mixtherm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "mixtherm/error.hpp"

namespace mixtherm::quad {
namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error, magnitude;
  bool operator<(const Piece& other) const { return error < other.error; }
};

Piece gk15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::abs(kronrod);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    kronrod += kWgk[j] * (fv1[j] + fv2[j]);
    abs_sum += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * (fv1[j] + fv2[j]);
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  const double value = kronrod * half;
  const double resabs = abs_sum * std::abs(half);
  const double resasc = asc * std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && error != 0.0) error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    error = std::max(50.0 * eps * resabs, error);
  return {a, b, value, error, resabs};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const Options& options) {
  if (a == b) return {0.0, 0.0, 0, true, 0.0};
  std::priority_queue<Piece> heap;
  Piece first = gk15(f, a, b);
  double total = first.value;
  double total_error = first.error;
  double magnitude = first.magnitude;
  heap.push(first);
  int count = 1;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto tolerance = [&] { return std::max(options.absolute, options.relative * std::max(std::abs(total), magnitude)); };
  while (total_error > tolerance() && count < options.max_intervals) {
    Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (std::abs(worst.b - worst.a) <= 4.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b)))
      break;
    heap.pop();
    Piece left = gk15(f, worst.a, mid);
    Piece right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    magnitude += left.magnitude + right.magnitude - worst.magnitude;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the drift of incremental updates.
  total = 0.0;
  total_error = 0.0;
  magnitude = 0.0;
  std::vector<Piece> pieces;
  pieces.reserve(heap.size());
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& l, const Piece& r) { return l.a < r.a; });
  for (const auto& p : pieces) {
    total += p.value;
    total_error += p.error;
    magnitude += p.magnitude;
  }
  const bool ok = std::isfinite(total) && total_error <= tolerance();
  return {total, total_error, count, ok, magnitude};
}

Result integrate_to_infinity(const Integrand& f, double a, const Options& options) {
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double x = a + t / one_minus;
    const double value = f(x);
    return value == 0.0 ? 0.0 : value / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, options);
}

Result integrate_pieces(const Integrand& f, const std::vector<double>& points, bool to_infinity,
                        const Options& options) {
  std::vector<Result> parts;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    parts.push_back(integrate(f, points[i], points[i + 1], options));
  if (to_infinity && !points.empty()) parts.push_back(integrate_to_infinity(f, points.back(), options));

  // A piece that is negligible against the whole may miss its own relative
  // target; only the combined error is judged, against int |f|.
  Result total;
  for (const auto& r : parts) {
    total.value += r.value;
    total.error += r.error;
    total.intervals += r.intervals;
    total.magnitude += r.magnitude;
  }
  total.converged = std::isfinite(total.value) &&
                    total.error <= std::max(options.absolute, options.relative * total.magnitude);
  return total;
}

double require(const Result& result, const std::string& what) {
  if (!result.converged)
    throw Error(ErrorKind::QuadratureFailure,
                fmt::format("{}: quadrature did not reach tolerance (value {:.6g}, error {:.3g})", what,
                            result.value, result.error));
  return result.value;
}

namespace {

Rule golub_welsch(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& offdiagonal, double mu0) {
  const auto n = diagonal.size();
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    jacobi(i, i) = diagonal(i);
    if (i + 1 < n) jacobi(i, i + 1) = jacobi(i + 1, i) = offdiagonal(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

Rule gauss_legendre(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(diag, off, 2.0);
}

Rule gauss_hermite(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k / 2.0);
  return golub_welsch(diag, off, std::sqrt(M_PI));
}

}  // namespace mixtherm::quad
