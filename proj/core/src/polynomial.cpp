#include "cuspidal/polynomial.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/Polynomials>

namespace cuspidal {

double poly_eval(std::span<const double> coeffs, double t, int order) {
  const int n = static_cast<int>(coeffs.size());
  double acc = 0.0;
  for (int i = n - 1; i >= order; --i) {
    double falling = 1.0;
    for (int k = 0; k < order; ++k) falling *= static_cast<double>(i - k);
    acc = acc * t + falling * coeffs[static_cast<std::size_t>(i)];
  }
  return acc;
}

double poly_norm(std::span<const double> coeffs) {
  double m = 0.0;
  for (double c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

std::vector<std::complex<double>> poly_roots(std::span<const double> coeffs, double drop_tol) {
  const double norm = poly_norm(coeffs);
  if (norm == 0.0) return {};
  int degree = static_cast<int>(coeffs.size()) - 1;
  while (degree > 0 && std::abs(coeffs[static_cast<std::size_t>(degree)]) <= drop_tol * norm)
    --degree;
  if (degree <= 0) return {};
  if (degree == 1) return {std::complex<double>(-coeffs[0] / coeffs[1], 0.0)};

  Eigen::VectorXd c(degree + 1);
  for (int i = 0; i <= degree; ++i) c[i] = coeffs[static_cast<std::size_t>(i)] / norm;
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(c);
  const auto& r = solver.roots();
  std::vector<std::complex<double>> out(r.data(), r.data() + r.size());
  // Companion eigenvalues are accurate to ~1e-12 for simple roots; one
  // complex Newton step on the original coefficients tightens them.
  for (auto& z : out) {
    std::complex<double> p = 0.0, dp = 0.0;
    for (int i = degree; i >= 0; --i) {
      dp = dp * z + p;
      p = p * z + coeffs[static_cast<std::size_t>(i)];
    }
    if (std::abs(dp) > 1e-8 * norm) {
      const std::complex<double> step = p / dp;
      if (std::abs(step) < 1e-6 * (1.0 + std::abs(z))) z -= step;
    }
  }
  return out;
}

}  // namespace cuspidal
