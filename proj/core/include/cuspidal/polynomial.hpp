#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cuspidal {

/// Evaluates the order-th derivative of sum c[i] t^i at t (Horner on the
/// differentiated coefficients).
double poly_eval(std::span<const double> coeffs, double t, int order = 0);

/// Complex roots of sum c[i] t^i. Leading coefficients with magnitude below
/// drop_tol * max|c| are trimmed first, so the result may have fewer roots
/// than the nominal degree.
std::vector<std::complex<double>> poly_roots(std::span<const double> coeffs,
                                             double drop_tol = 0.0);

/// max |c[i]|.
double poly_norm(std::span<const double> coeffs);

}  // namespace cuspidal
