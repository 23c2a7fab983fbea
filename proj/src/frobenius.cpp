#include "alame/frobenius.hpp"

#include <algorithm>
#include <cmath>

#include "alame/polyroots.hpp"

namespace alame {

ModelParams::ModelParams(int m_, int ell_, double k2_) : m(m_), ell(ell_), k2(k2_) {
    if (ell < 0 || m < ell)
        throw std::invalid_argument("ModelParams: need integer m >= ell >= 0");
    if (m + ell < 1)
        throw std::invalid_argument("ModelParams: (m,ell) = (0,0) is free space, not supported");
    if (!(k2 > 0.0 && k2 < 1.0))
        throw std::invalid_argument("ModelParams: k2 outside (0,1)");
}

double shift_energy(double E, const ModelParams& p, const LatticeData& lat) {
    return lat.e3 * p.m * (p.m + 1) + (E - p.ell * (p.ell + 1)) * lat.ebar3;
}

complex shift_energy(complex E, const ModelParams& p, const LatticeData& lat) {
    return lat.e3 * double(p.m * (p.m + 1)) + (E - double(p.ell * (p.ell + 1))) * lat.ebar3;
}

namespace {

template <typename S>
struct Trip {
    S f0, f1, f2;
};

template <typename S>
Trip<S> f_eval(int rho, const ModelParams& p, S Etilde, const LatticeData& lat) {
    const double r = rho, l = p.ell, mm1 = double(p.m) * (p.m + 1);
    Trip<S> t;
    t.f0 = lat.ebar3 * r * (r - 1.0 - 2.0 * l) * (2.0 * r - 2.0 * l - 1.0);
    t.f1 = 2.0 * (r - l) * (lat.e1 * (mm1 - 3.0 * (r - l) * (r - l)) - Etilde);
    t.f2 = lat.ebar2 * (r - p.m - l) * (r + p.m - l + 1.0) * (2.0 * r + 1.0 - 2.0 * l);
    return t;
}

template <typename S>
S det_F_impl(int r, const ModelParams& p, S Etilde, const LatticeData& lat) {
    if (r < 0) throw std::invalid_argument("det_F: r must be >= 0");
    S Fm2 = 1.0, Fm1 = 1.0; // F_0 = 1
    for (int j = 1; j <= r; ++j) {
        const auto fj = f_eval(j - 1, p, Etilde, lat);
        S Fj = fj.f1 * Fm1;
        if (j >= 2) {
            const auto f2row = f_eval(j - 2, p, Etilde, lat);
            Fj -= fj.f0 * f2row.f2 * Fm2;
        }
        Fm2 = Fm1;
        Fm1 = Fj;
    }
    return Fm1;
}

// a_0..a_{m+l} for scalar type S; throws on the degenerate configurations.
template <typename S>
std::vector<S> coefficients_impl(const ModelParams& p, S Etilde, const LatticeData& lat) {
    const int N = p.series_degree();
    const int twol = 2 * p.ell;
    const int nu = p.m - p.ell;
    std::vector<S> a(N + 1, S(0.0));
    a[0] = 1.0;

    // low coefficients a_r = (-1)^r F_r / prod_{s=1}^r f0(s), r <= 2l
    S Fm2 = 1.0, Fm1 = 1.0, prod_f0 = 1.0;
    double sign = 1.0;
    for (int r = 1; r <= std::min(twol, N); ++r) {
        const auto fr = f_eval(r - 1, p, Etilde, lat);
        S Fr = fr.f1 * Fm1;
        if (r >= 2) Fr -= fr.f0 * f_eval(r - 2, p, Etilde, lat).f2 * Fm2;
        Fm2 = Fm1;
        Fm1 = Fr;
        prod_f0 *= f_eval(r, p, Etilde, lat).f0; // never 0 for 1 <= r <= 2l
        sign = -sign;
        a[r] = sign * Fr / prod_f0;
    }

    if (nu == 0) return a; // m == l: series ends at a_{2l}, a_{2l+1} = 0 automatically

    // trailing minors D_j: top-left j x j blocks of the F_{m+l+1} matrix,
    // D_j = f1(N+1-j) D_{j-1} - f0(N+2-j) f2(N+1-j) D_{j-2}
    std::vector<S> D(nu + 1);
    D[0] = 1.0;
    double dscale = 1.0;
    for (int j = 1; j <= nu; ++j) {
        const auto fj = f_eval(N + 1 - j, p, Etilde, lat);
        const S t1 = fj.f1 * D[j - 1];
        const S t2 = (j >= 2) ? S(f_eval(N + 2 - j, p, Etilde, lat).f0 * fj.f2 * D[j - 2])
                              : S(0.0);
        D[j] = t1 - t2;
        if (j == nu) dscale = std::abs(t1) + std::abs(t2);
    }
    if (std::abs(D[nu]) < 1e-12 * std::max(dscale, 1e-300))
        throw degenerate_energy_error(
            "coefficients: minor D_{m-ell} vanishes at this energy (degenerate configuration)");

    double amax = 0.0;
    for (int r = 0; r <= twol; ++r) amax = std::max(amax, std::abs(a[r]));
    if (std::abs(a[twol]) < 1e-12 * amax)
        throw degenerate_energy_error(
            "coefficients: a_{2ell} vanishes at this energy (degenerate configuration)");

    S prod_f2 = 1.0;
    sign = 1.0;
    for (int r = 1; r <= nu; ++r) {
        prod_f2 *= f_eval(twol + r - 1, p, Etilde, lat).f2;
        sign = -sign;
        a[twol + r] = sign * D[nu - r] * prod_f2 / D[nu] * a[twol];
    }
    return a;
}

} // namespace

FTriplet f_triplet(int rho, const ModelParams& p, double Etilde, const LatticeData& lat) {
    const auto t = f_eval(rho, p, Etilde, lat);
    return {t.f0, t.f1, t.f2};
}

FTripletC f_triplet(int rho, const ModelParams& p, complex Etilde, const LatticeData& lat) {
    const auto t = f_eval(rho, p, Etilde, lat);
    return {t.f0, t.f1, t.f2};
}

double det_F(int r, const ModelParams& p, double Etilde, const LatticeData& lat) {
    return det_F_impl(r, p, Etilde, lat);
}

complex det_F(int r, const ModelParams& p, complex Etilde, const LatticeData& lat) {
    return det_F_impl(r, p, Etilde, lat);
}

std::vector<std::vector<double>> det_F_matrix(int r, const ModelParams& p, double Etilde,
                                              const LatticeData& lat) {
    std::vector<std::vector<double>> M(r, std::vector<double>(r, 0.0));
    for (int i = 0; i < r; ++i) {
        M[i][i] = f_eval(r - 1 - i, p, Etilde, lat).f1;
        if (i + 1 < r) {
            M[i][i + 1] = f_eval(r - 2 - i, p, Etilde, lat).f2;
            M[i + 1][i] = f_eval(r - 1 - i, p, Etilde, lat).f0;
        }
    }
    return M;
}

FrobeniusSolution coefficients(const ModelParams& p, double E, const LatticeData& lat) {
    FrobeniusSolution sol{p, E, shift_energy(E, p, lat), {}, {}, {}, {}, {}, {}, {}};
    sol.a = coefficients_impl(p, sol.Etilde, lat);
    sol.indicialExponents = {0.0, 2.0 * p.ell + 1.0, p.ell + 0.5};
    return sol;
}

std::vector<complex> coefficients_diagnostic(const ModelParams& p, complex E,
                                             const LatticeData& lat) {
    return coefficients_impl(p, shift_energy(E, p, lat), lat);
}

double recurrence_residual(const FrobeniusSolution& sol, const LatticeData& lat) {
    const auto& a = sol.a;
    const int N = sol.params.series_degree();
    auto at = [&](int r) { return (r >= 0 && r <= N) ? a[r] : 0.0; };
    double amax = 0.0;
    for (double v : a) amax = std::max(amax, std::abs(v));
    double worst = 0.0;
    // rows r = 0 .. N (the last two rows are the truncation continuation)
    for (int r = 0; r <= N; ++r) {
        const double t0 = at(r + 2) * f_eval(r + 2, sol.params, sol.Etilde, lat).f0;
        const double t1 = at(r + 1) * f_eval(r + 1, sol.params, sol.Etilde, lat).f1;
        const double t2 = at(r) * f_eval(r, sol.params, sol.Etilde, lat).f2;
        worst = std::max(worst, std::abs(t0 + t1 + t2));
    }
    // and the first-order relation a_1 f0(1) + a_0 f1(0) = 0
    worst = std::max(worst, std::abs(at(1) * f_eval(1, sol.params, sol.Etilde, lat).f0 +
                                     at(0) * f_eval(0, sol.params, sol.Etilde, lat).f1));
    return worst / amax;
}

std::vector<complex> char_roots(FrobeniusSolution& sol, const LatticeData& lat) {
    const int N = sol.params.series_degree();
    double amax = 0.0;
    for (double v : sol.a) amax = std::max(amax, std::abs(v));
    if (std::abs(sol.a[N]) < 1e-12 * amax)
        throw degenerate_energy_error(
            "char_roots: leading coefficient vanishes, characteristic polynomial degenerates");

    // roots in w = (e1 - t)/ebar2, then mapped to t
    const auto w = poly_roots(std::span<const double>(sol.a));
    sol.c.clear();
    for (const auto& wj : w) sol.c.push_back(lat.e1 - lat.ebar2 * wj);
    std::sort(sol.c.begin(), sol.c.end(), [](complex x, complex y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });

    // residual sanity against the coefficient scale
    for (const auto& t : sol.c) {
        const complex wv = (lat.e1 - t) / lat.ebar2;
        complex pv = 0.0;
        double scale = 0.0;
        complex wp_pow = 1.0;
        for (int r = 0; r <= N; ++r) {
            pv += sol.a[r] * wp_pow;
            scale += std::abs(sol.a[r]) * std::abs(wp_pow);
            wp_pow *= wv;
        }
        if (std::abs(pv) > 1e-9 * scale)
            throw numeric_error("char_roots: root residual too large", t);
    }
    sol.c_mult = root_multiplicities(sol.c, 1e-7);
    return sol.c;
}

namespace {

// Psi'(b_j) from the product form, with wp(b_j) = c_j substituted:
// wp'(b_j) prod_{r != j} (c_j - c_r) / (c_j - e1)^l.
complex psi_prime_at(const std::vector<complex>& c, std::size_t j, complex wp_prime_bj, int ell,
                     const LatticeData& lat) {
    complex acc = wp_prime_bj;
    for (std::size_t r = 0; r < c.size(); ++r)
        if (r != j) acc *= (c[j] - c[r]);
    for (int i = 0; i < ell; ++i) acc /= (c[j] - lat.e1);
    return acc;
}

} // namespace

void locate_b(FrobeniusSolution& sol, const LatticeData& lat) {
    if (sol.c.empty()) char_roots(sol, lat);
    for (std::size_t j = 0; j < sol.c.size(); ++j) {
        if (sol.c_mult[j] > 1)
            throw degenerate_energy_error(
                "locate_b: repeated characteristic root (Psi' vanishes); E is typically "
                "at a band edge");
    }

    const double px = 2.0 * lat.omega1.real(), py = 2.0 * lat.omega3.imag();
    auto fold = [&](complex z) {
        double x = z.real() - px * std::floor(z.real() / px);
        double y = z.imag() - py * std::floor(z.imag() / py);
        if (x >= px) x -= px;
        if (y >= py) y -= py;
        return complex(x, y);
    };

    const std::size_t n = sol.c.size();
    sol.b.assign(n, complex(0.0, 0.0));
    sol.b_sign.assign(n, +1);
    std::vector<complex> v(n);
    complex gamma = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const complex b0 = inverse_wp(sol.c[j], lat);
        const complex w1 = wp_prime(b0, lat);
        if (std::abs(w1) < 1e-10 * (1.0 + std::abs(sol.c[j])))
            throw degenerate_energy_error(
                "locate_b: wp'(b_r) ~ 0 (c_r at a lattice root e_i); E is typically at a "
                "band edge");
        const complex vj = psi_prime_at(sol.c, j, w1, sol.params.ell, lat);
        if (j == 0) {
            // canonical representative fixes the overall sign convention
            sol.b[0] = b0;
            gamma = vj;
            v[0] = vj;
            continue;
        }
        // |Psi'(b_j)| must match |gamma| whatever the sign
        if (std::abs(std::abs(vj) - std::abs(gamma)) > 1e-8 * std::abs(gamma))
            throw numeric_error(
                "locate_b: |Psi'(b_j)| differs across j; no consistent sign assignment", b0);
        if (std::abs(vj - gamma) <= std::abs(-vj - gamma)) {
            sol.b[j] = b0;
            v[j] = vj;
        } else {
            sol.b[j] = fold(-b0);
            sol.b_sign[j] = -1;
            v[j] = -vj;
        }
        if (std::abs(v[j] - gamma) > 1e-8 * std::abs(gamma))
            throw numeric_error(
                "locate_b: Psi'(b_j) does not match the common value within tolerance",
                sol.b[j]);
    }
    sol.psiPrimeAtB = gamma;
}

FrobeniusSolution solve_frobenius(const ModelParams& p, double E, const LatticeData& lat) {
    FrobeniusSolution sol = coefficients(p, E, lat);
    char_roots(sol, lat);
    locate_b(sol, lat);
    return sol;
}

} // namespace alame
