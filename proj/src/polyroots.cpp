#include "alame/polyroots.hpp"

#include <algorithm>
#include <cmath>

#include "alame/errors.hpp"

namespace alame {

namespace {

using complex = std::complex<double>;

complex horner(std::span<const complex> a, complex w) {
    complex acc = a.back();
    for (std::size_t i = a.size() - 1; i-- > 0;) acc = acc * w + a[i];
    return acc;
}

complex horner_deriv(std::span<const complex> a, complex w) {
    complex acc = double(a.size() - 1) * a.back();
    for (std::size_t i = a.size() - 1; i-- > 1;) acc = acc * w + double(i) * a[i];
    return acc;
}

} // namespace

std::vector<complex> poly_roots(std::span<const complex> coeffs) {
    const std::size_t deg = coeffs.size() - 1;
    if (coeffs.empty() || std::abs(coeffs.back()) == 0.0)
        throw std::invalid_argument("poly_roots: zero leading coefficient");
    if (deg == 0) return {};
    if (deg == 1) return {-coeffs[0] / coeffs[1]};

    // monic copy
    std::vector<complex> a(coeffs.begin(), coeffs.end());
    for (auto& c : a) c /= coeffs.back();

    // Cauchy bound for the root radius
    double radius = 0.0;
    for (std::size_t i = 0; i < deg; ++i) radius = std::max(radius, std::abs(a[i]));
    radius = 1.0 + radius;

    // Durand-Kerner with the usual (0.4 + 0.9i)^j spread of starting points
    std::vector<complex> w(deg);
    const complex seed(0.4, 0.9);
    complex pw = 1.0;
    for (std::size_t j = 0; j < deg; ++j) {
        pw *= seed;
        w[j] = radius * pw / std::abs(pw) * (0.3 + 0.7 * double(j + 1) / deg);
    }

    bool converged = false;
    for (int it = 0; it < 600 && !converged; ++it) {
        double max_step = 0.0;
        for (std::size_t j = 0; j < deg; ++j) {
            complex den = 1.0;
            for (std::size_t i = 0; i < deg; ++i)
                if (i != j) den *= (w[j] - w[i]);
            if (std::abs(den) == 0.0) {
                w[j] += complex(1e-8, 2e-8) * radius;
                max_step = 1.0;
                continue;
            }
            const complex delta = horner(a, w[j]) / den;
            w[j] -= delta;
            max_step = std::max(max_step, std::abs(delta) / (1.0 + std::abs(w[j])));
        }
        converged = max_step < 1e-14;
    }
    if (!converged) {
        // clustered (multiple) roots converge only linearly; accept if the
        // residuals are already at the noise floor, otherwise report failure
        for (std::size_t j = 0; j < deg; ++j)
            if (std::abs(horner(a, w[j])) > 1e-10 * std::pow(1.0 + std::abs(w[j]), double(deg)))
                throw numeric_error("poly_roots: Durand-Kerner failed to converge", w[j]);
    }

    // Newton polish on the original (non-monic) coefficients
    std::vector<complex> orig(coeffs.begin(), coeffs.end());
    for (auto& r : w) {
        for (int it = 0; it < 6; ++it) {
            const complex d = horner_deriv(orig, r);
            if (std::abs(d) == 0.0) break;
            const complex step = horner(orig, r) / d;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            if (std::abs(step) > 0.1 * (1.0 + std::abs(r))) break; // multiple root, keep DK value
            r -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(r))) break;
        }
    }

    std::sort(w.begin(), w.end(), [](complex x, complex y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return w;
}

std::vector<complex> poly_roots(std::span<const double> coeffs) {
    std::vector<complex> c(coeffs.begin(), coeffs.end());
    return poly_roots(std::span<const complex>(c));
}

std::vector<int> root_multiplicities(const std::vector<complex>& roots, double tol) {
    std::vector<int> mult(roots.size(), 1);
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = 0; j < roots.size(); ++j)
            if (i != j && std::abs(roots[i] - roots[j]) < tol * (1.0 + std::abs(roots[i])))
                ++mult[i];
    return mult;
}

} // namespace alame
