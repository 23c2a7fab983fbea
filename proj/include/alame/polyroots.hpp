#pragma once

#include <complex>
#include <span>
#include <vector>

namespace alame {

/// All roots of a0 + a1 w + ... + aN w^N (aN != 0), by Durand-Kerner
/// simultaneous iteration polished with Newton steps. Roots are returned
/// sorted by (Re, Im). Throws numeric_error if the iteration stalls.
std::vector<std::complex<double>> poly_roots(std::span<const std::complex<double>> coeffs);
std::vector<std::complex<double>> poly_roots(std::span<const double> coeffs);

/// Group roots into clusters of radius tol*(1+|w|); returns per-root
/// multiplicities (parallel to the input order).
std::vector<int> root_multiplicities(const std::vector<std::complex<double>>& roots, double tol);

} // namespace alame
