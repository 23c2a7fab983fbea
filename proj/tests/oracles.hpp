#pragma once

// Test-side oracles, independent of the library evaluation paths:
//   - adaptive Simpson quadrature of the defining K integral
//   - truncated lattice sums for wp and the invariants
//   - finite-difference derivatives
//   - RK4 one-period transfer (monodromy) matrix
//   - Ferrari closed form for quartic roots

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

using complex = std::complex<double>;

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    // n even
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// K(k) by direct quadrature of the defining integral.
inline double K_quadrature(double k2, int n = 20000) {
    return simpson([k2](double phi) { return 1.0 / std::sqrt(1.0 - k2 * std::sin(phi) * std::sin(phi)); },
                   0.0, std::asin(1.0) /* pi/2 */, n);
}

/// wp(z) by the defining lattice sum, truncated at |m|,|n| <= N with
/// symmetric (m,n)/(-m,-n) pairing. Converges like 1/N^2; an oracle for
/// identity, not for precision.
inline complex wp_lattice_sum(complex z, complex two_omega1, complex two_omega3, int N) {
    complex acc = 1.0 / (z * z);
    for (int m = -N; m <= N; ++m) {
        for (int n = -N; n <= N; ++n) {
            if (m == 0 && n == 0) continue;
            const complex w = double(m) * two_omega1 + double(n) * two_omega3;
            acc += 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w);
        }
    }
    return acc;
}

/// g2, g3 by truncated lattice sums over the full periods.
inline std::array<double, 2> invariants_lattice_sum(complex two_omega1, complex two_omega3, int N) {
    complex g2 = 0.0, g3 = 0.0;
    for (int m = -N; m <= N; ++m) {
        for (int n = -N; n <= N; ++n) {
            if (m == 0 && n == 0) continue;
            const complex w = double(m) * two_omega1 + double(n) * two_omega3;
            const complex w2 = w * w, w4 = w2 * w2;
            g2 += 1.0 / w4;
            g3 += 1.0 / (w4 * w2);
        }
    }
    return {60.0 * g2.real(), 140.0 * g3.real()};
}

// Five-point central differences.
template <class F>
auto fd_first(F&& f, double x, double h) {
    return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
}
template <class F>
auto fd_second(F&& f, double x, double h) {
    return (-f(x - 2 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2 * h)) /
           (12.0 * h * h);
}
// Seven-point third derivative, O(h^4).
template <class F>
auto fd_third(F&& f, double x, double h) {
    return (-13.0 / 8.0 * (f(x + h) - f(x - h)) + (f(x + 2 * h) - f(x - 2 * h)) -
            1.0 / 8.0 * (f(x + 3 * h) - f(x - 3 * h))) /
           (h * h * h);
}

/// One-period transfer matrix of -y'' + V y = E y by classical RK4 on
/// y'' = (V - E) y, columns from (1,0) and (0,1) initial data at x0 = 0.
struct Monodromy {
    double m11, m12, m21, m22;
    double trace() const { return m11 + m22; }
    std::array<complex, 2> multipliers() const {
        const complex half = complex(trace() / 2.0, 0.0);
        const complex root = std::sqrt(half * half - 1.0);
        return {half + root, half - root};
    }
};

inline Monodromy monodromy_rk4(const std::function<double(double)>& V, double E, double T, int steps) {
    double y1 = 1.0, p1 = 0.0, y2 = 0.0, p2 = 1.0;
    const double h = T / steps;
    auto rhs = [&](double x, double y, double p, double& dy, double& dp) {
        dy = p;
        dp = (V(x) - E) * y;
    };
    for (int i = 0; i < steps; ++i) {
        const double x = i * h;
        double k1y, k1p, k2y, k2p, k3y, k3p, k4y, k4p;
        auto step = [&](double& y, double& p) {
            rhs(x, y, p, k1y, k1p);
            rhs(x + h / 2, y + h / 2 * k1y, p + h / 2 * k1p, k2y, k2p);
            rhs(x + h / 2, y + h / 2 * k2y, p + h / 2 * k2p, k3y, k3p);
            rhs(x + h, y + h * k3y, p + h * k3p, k4y, k4p);
            y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
            p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        };
        step(y1, p1);
        step(y2, p2);
    }
    return {y1, y2, p1, p2};
}

/// Determinant by Gaussian elimination with partial pivoting (dense oracle
/// for the banded-recurrence determinants).
inline double det_dense(std::vector<std::vector<double>> M) {
    const std::size_t n = M.size();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        if (M[piv][col] == 0.0) return 0.0;
        if (piv != col) {
            std::swap(M[piv], M[col]);
            det = -det;
        }
        det *= M[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = M[r][col] / M[col][col];
            for (std::size_t c2 = col; c2 < n; ++c2) M[r][c2] -= f * M[col][c2];
        }
    }
    return det;
}

/// Roots of a0 + a1 t + a2 t^2 + a3 t^3 + a4 t^4 with a4 != 0 (Ferrari).
inline std::array<complex, 4> quartic_roots(double a0, double a1, double a2, double a3, double a4) {
    const double b = a3 / a4, c = a2 / a4, d = a1 / a4, e = a0 / a4;
    const double p = c - 3.0 * b * b / 8.0;
    const double q = d - b * c / 2.0 + b * b * b / 8.0;
    const double r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b * b * b * b / 256.0;
    // resolvent cubic: m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0
    const complex A = 1.0, B = p, C = p * p / 4.0 - r, D = -q * q / 8.0;
    // depressed cubic via Cardano in complex arithmetic
    const complex sh = B / (3.0 * A);
    const complex pp = C / A - B * B / (3.0 * A * A);
    const complex qq = 2.0 * B * B * B / (27.0 * A * A * A) - B * C / (3.0 * A * A) + D / A;
    const complex disc = qq * qq / 4.0 + pp * pp * pp / 27.0;
    const complex u = std::pow(-qq / 2.0 + std::sqrt(disc), 1.0 / 3.0);
    complex m = (std::abs(u) > 1e-30) ? u - pp / (3.0 * u) - sh : -sh;
    // polish the resolvent root
    for (int i = 0; i < 40; ++i) {
        const complex f = ((m + B) * m + C) * m + D;
        const complex df = (3.0 * m + 2.0 * B) * m + C;
        if (std::abs(df) < 1e-300) break;
        m -= f / df;
    }
    const complex s2 = 2.0 * m;
    const complex s = std::sqrt(s2);
    std::array<complex, 4> roots;
    const complex t1 = -(2.0 * p + s2), t2 = 2.0 * q / s;
    roots[0] = (s + std::sqrt(t1 - t2)) / 2.0;
    roots[1] = (s - std::sqrt(t1 - t2)) / 2.0;
    roots[2] = (-s + std::sqrt(t1 + t2)) / 2.0;
    roots[3] = (-s - std::sqrt(t1 + t2)) / 2.0;
    for (auto& t : roots) t -= b / 4.0;
    // Newton polish on the original quartic
    for (auto& t : roots) {
        for (int i = 0; i < 40; ++i) {
            const complex f = (((a4 * t + a3) * t + a2) * t + a1) * t + a0;
            const complex df = ((4.0 * a4 * t + 3.0 * a3) * t + 2.0 * a2) * t + a1;
            if (std::abs(df) < 1e-300) break;
            const complex step = f / df;
            t -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(t))) break;
        }
    }
    return roots;
}

} // namespace oracles
