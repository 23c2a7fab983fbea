#include "alame/bloch.hpp"

#include <algorithm>
#include <cmath>

namespace alame {

double potential(double x, const ModelParams& p) {
    const auto j = jacobi_real(x, p.k2);
    return p.m * (p.m + 1) * p.k2 * j.sn * j.sn +
           p.ell * (p.ell + 1) * p.k2 * (j.cn * j.cn) / (j.dn * j.dn);
}

complex product_solution(complex z, const FrobeniusSolution& sol, const LatticeData& lat) {
    const complex pz = wp(z, lat);
    complex acc = 1.0;
    for (const auto& c : sol.c) acc *= (pz - c);
    for (int i = 0; i < sol.params.ell; ++i) acc /= (pz - lat.e1);
    return acc / sol.psiPrimeAtB;
}

ProductDerivs product_derivs(complex z, const FrobeniusSolution& sol, const LatticeData& lat) {
    const complex pz = wp(z, lat);
    const complex dpz = wp_prime(z, lat);
    const complex d2pz = 6.0 * pz * pz - 0.5 * lat.g2;
    complex Psi = 1.0, L = 0.0, dL = 0.0;
    for (const auto& c : sol.c) {
        const complex q = pz - c;
        Psi *= q;
        L += dpz / q;
        dL += d2pz / q - (dpz / q) * (dpz / q);
    }
    const complex q1 = pz - lat.e1;
    for (int i = 0; i < sol.params.ell; ++i) Psi /= q1;
    L -= double(sol.params.ell) * dpz / q1;
    dL -= double(sol.params.ell) * (d2pz / q1 - (dpz / q1) * (dpz / q1));
    Psi /= sol.psiPrimeAtB;
    return {Psi, Psi * L, Psi * (L * L + dL)};
}

// ---------------------------------------------------------------------------
// BlochPair

BlochPair::BlochPair(const ModelParams& p, double E_, FrobeniusSolution s, LatticeData l)
    : params(p), E(E_), sol(std::move(s)), lat(std::move(l)) {
    sum_zeta_b_ = 0.0;
    sum_b_ = 0.0;
    for (const auto& b : sol.b) {
        sum_zeta_b_ += wzeta(b, lat);
        sum_b_ += b;
    }
    period = params.period(lat);

    // closed-form multiplier over 2K: exp[-2 (omega1 sum zeta(b) - eta1 sum b)]
    multiplier2K = std::exp(-2.0 * (lat.omega1 * sum_zeta_b_ - lat.eta1 * sum_b_));

    phase = {complex(1.0, 0.0), complex(1.0, 0.0)};
    double x0 = lat.K;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const complex vp = psi_raw(+1, x0), vm = psi_raw(-1, x0);
        const complex vpm = psi_raw(+1, -x0);
        if (std::abs(vp) > 1e-100 && std::abs(vm) > 1e-100 && std::abs(vpm) > 1e-100) {
            phase = {std::abs(vp) / vp, std::abs(vm) / vm};
            // mirror convention: psi- is the positive multiple of psi+(-x)
            // (V is even); this pins the relative sign of the pair, which the
            // realification alone leaves free when psi- has nodes
            const complex rho = (phase[1] * vm) / (phase[0] * vpm);
            if (rho.real() < 0.0) phase[1] = -phase[1];
            break;
        }
        x0 += 0.237 * lat.K; // node at the anchor, shift to a generic point
    }

    if (params.m == params.ell) {
        double xa = 0.311 * lat.K;
        complex va = psi_raw(+1, xa);
        for (int attempt = 0; attempt < 8 && std::abs(va) < 1e-100; ++attempt) {
            xa += 0.171 * lat.K;
            va = psi_raw(+1, xa);
        }
        floquetMultiplier = psi_raw(+1, xa + period) / va;
        const complex sq = floquetMultiplier * floquetMultiplier;
        if (std::abs(sq - multiplier2K) > 1e-8 * std::abs(multiplier2K))
            throw numeric_error("bloch_pair: period-K multiplier inconsistent with the "
                                "closed form over 2K",
                                floquetMultiplier);
    } else {
        floquetMultiplier = multiplier2K;
    }
    floquetExponent = std::log(floquetMultiplier);

    const double xw = 0.4321 * lat.K;
    wronskian = psi(+1, xw) * dpsi(-1, xw) - dpsi(+1, xw) * psi(-1, xw);
}

complex BlochPair::z_of_x(double x) const {
    return complex(x, -lat.Kprime) / lat.scale;
}

complex BlochPair::log_psi_raw(int sign, double x) const {
    const complex Z = z_of_x(x);
    const double sg = sign >= 0 ? 1.0 : -1.0;
    complex acc = 0.0;
    for (const auto& b : sol.b) acc += log_wsigma(Z + sg * b, lat);
    acc -= double(params.ell) * log_wsigma(Z + lat.omega1, lat);
    acc -= double(params.m) * log_wsigma(Z, lat);
    acc += x / lat.scale * (double(params.ell) * lat.eta1 - sg * sum_zeta_b_);
    return acc;
}

complex BlochPair::psi_raw(int sign, double x) const {
    return std::exp(log_psi_raw(sign, x));
}

complex BlochPair::psi(int sign, double x) const {
    return phase[sign >= 0 ? 0 : 1] * psi_raw(sign, x);
}

complex BlochPair::log_deriv(int sign, double x) const {
    const complex Z = z_of_x(x);
    const double sg = sign >= 0 ? 1.0 : -1.0;
    complex acc = 0.0;
    for (const auto& b : sol.b) acc += wzeta(Z + sg * b, lat);
    acc -= double(params.ell) * wzeta(Z + lat.omega1, lat);
    acc -= double(params.m) * wzeta(Z, lat);
    acc += double(params.ell) * lat.eta1 - sg * sum_zeta_b_;
    return acc / lat.scale;
}

complex BlochPair::log_deriv2(int sign, double x) const {
    const complex Z = z_of_x(x);
    const double sg = sign >= 0 ? 1.0 : -1.0;
    complex acc = 0.0;
    for (const auto& b : sol.b) acc -= wp(Z + sg * b, lat);
    acc += double(params.ell) * wp(Z + lat.omega1, lat);
    acc += double(params.m) * wp(Z, lat);
    return acc / lat.ebar3;
}

complex BlochPair::dpsi(int sign, double x) const {
    return psi(sign, x) * log_deriv(sign, x);
}

BlochPair bloch_pair(const ModelParams& p, double E, const LatticeData& lat) {
    return BlochPair(p, E, solve_frobenius(p, E, lat), lat);
}

// ---------------------------------------------------------------------------
// Hill discriminant / monodromy

std::array<complex, 2> Monodromy::multipliers() const {
    const double t = trace();
    if (std::abs(t) > 2.0) {
        // det = 1: take the larger root without cancellation, invert for the other
        const double big = t / 2.0 + std::copysign(std::sqrt(t * t / 4.0 - 1.0), t);
        return {complex(big, 0.0), complex(1.0 / big, 0.0)};
    }
    const complex half(t / 2.0, 0.0);
    const complex root = std::sqrt(half * half - 1.0);
    return {half + root, half - root};
}

HillIntegrator::HillIntegrator(const ModelParams& p, const LatticeData& lat, int steps)
    : T_(p.period(lat)), n_(steps) {
    if (steps < 16) throw std::invalid_argument("HillIntegrator: too few steps");
    V_.resize(2 * n_ + 1);
    const double h2 = T_ / (2.0 * n_);
    for (int j = 0; j <= 2 * n_; ++j) V_[j] = potential(j * h2, p);
}

Monodromy HillIntegrator::monodromy(double E) const {
    const double h = T_ / n_;
    double y1 = 1.0, p1 = 0.0, y2 = 0.0, p2 = 1.0;
    for (int i = 0; i < n_; ++i) {
        const double w0 = V_[2 * i] - E, wh = V_[2 * i + 1] - E, w1 = V_[2 * i + 2] - E;
        auto advance = [&](double& y, double& p) {
            const double k1y = p, k1p = w0 * y;
            const double k2y = p + 0.5 * h * k1p, k2p = wh * (y + 0.5 * h * k1y);
            const double k3y = p + 0.5 * h * k2p, k3p = wh * (y + 0.5 * h * k2y);
            const double k4y = p + h * k3p, k4p = w1 * (y + h * k3y);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        };
        advance(y1, p1);
        advance(y2, p2);
    }
    return {y1, y2, p1, p2};
}

double hill_discriminant(const ModelParams& p, double E, const LatticeData& lat, int steps) {
    return HillIntegrator(p, lat, steps).discriminant(E);
}

std::vector<double> scan_band_edges(const ModelParams& p, const LatticeData& lat, double emin,
                                    double emax, double coarse, double resolution, int steps) {
    if (!(emin < emax)) throw std::invalid_argument("scan_band_edges: emin >= emax");
    HillIntegrator hill(p, lat, steps);
    std::vector<double> edges;
    auto refine = [&](double lo, double hi, double target) {
        double flo = hill.discriminant(lo) - target;
        while (hi - lo > resolution) {
            const double mid = 0.5 * (lo + hi);
            const double fm = hill.discriminant(mid) - target;
            if ((flo < 0.0) == (fm < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        edges.push_back(0.5 * (lo + hi));
    };
    double prev = hill.discriminant(emin);
    for (double e = emin + coarse; e <= emax + 0.5 * coarse; e += coarse) {
        const double cur = hill.discriminant(e);
        for (double target : {2.0, -2.0}) {
            if ((prev - target < 0.0) != (cur - target < 0.0)) refine(e - coarse, e, target);
        }
        prev = cur;
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [&](double a, double b) { return std::abs(a - b) < 4.0 * resolution; }),
                edges.end());
    return edges;
}

ResidualReport schrodinger_residual(const BlochPair& bp, double xmin, double xmax, int n,
                                    double h) {
    const double margin = 1e-2;
    double max_rel = 0.0;
    for (int sign : {+1, -1}) {
        double vmax = 0.0, rmax = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = (xmin + margin) + (xmax - xmin - 2.0 * margin) * i / (n - 1.0);
            const complex pm2 = bp.psi(sign, x - 2.0 * h), pm1 = bp.psi(sign, x - h);
            const complex p0 = bp.psi(sign, x);
            const complex pp1 = bp.psi(sign, x + h), pp2 = bp.psi(sign, x + 2.0 * h);
            const complex d2 =
                (-pm2 + 16.0 * pm1 - 30.0 * p0 + 16.0 * pp1 - pp2) / (12.0 * h * h);
            const complex res = -d2 + (potential(x, bp.params) - bp.E) * p0;
            vmax = std::max(vmax, std::abs(p0));
            rmax = std::max(rmax, std::abs(res));
        }
        max_rel = std::max(max_rel, rmax / vmax);
    }

    // Wronskian drift over the same window
    complex wsum = 0.0;
    std::vector<complex> ws;
    const int nw = std::min(n, 257);
    for (int i = 0; i < nw; ++i) {
        const double x = xmin + (xmax - xmin) * i / (nw - 1.0);
        const complex w =
            bp.psi(+1, x) * bp.dpsi(-1, x) - bp.dpsi(+1, x) * bp.psi(-1, x);
        ws.push_back(w);
        wsum += w;
    }
    const complex wmean = wsum / double(nw);
    double wdev = 0.0;
    for (const auto& w : ws) wdev = std::max(wdev, std::abs(w - wmean));
    return {max_rel, wdev / std::abs(wmean)};
}

} // namespace alame
