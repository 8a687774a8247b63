#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mixtherm::quad {

using Integrand = std::function<double(double)>;

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
  double magnitude = 0.0;  // estimate of int |f|
};

struct Options {
  double relative = 1e-12;
  double absolute = 0.0;
  int max_intervals = 4000;
};

/// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Endpoints are never sampled.
/// Converged when the error estimate is below max(absolute, relative * int |f|).
Result integrate(const Integrand& f, double a, double b, const Options& options = {});

/// Same over [a, inf) through x = a + t / (1 - t).
Result integrate_to_infinity(const Integrand& f, double a, const Options& options = {});

/// Sum of adaptive integrals over consecutive pieces [p_0, p_1], ..., the last
/// extending to infinity when `to_infinity` is set. Errors add.
Result integrate_pieces(const Integrand& f, const std::vector<double>& points, bool to_infinity,
                        const Options& options = {});

/// Throws QuadratureFailure (with `what` as context) when `result` did not converge.
double require(const Result& result, const std::string& what);

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);
/// n-point Gauss-Hermite rule for weight exp(-x^2) on the real line.
Rule gauss_hermite(int n);

}  // namespace mixtherm::quad
