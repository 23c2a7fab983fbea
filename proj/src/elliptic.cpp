#include "alame/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace alame {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double pole_radius = 1e-9; // exclusion radius around lattice points

void check_modulus(double k2, const char* who) {
    if (!(k2 > 0.0 && k2 < 1.0)) {
        std::ostringstream os;
        os << who << ": modulus k2 = " << k2 << " outside (0,1)";
        throw std::invalid_argument(os.str());
    }
}

std::string fmt_complex(complex z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

} // namespace

Modulus::Modulus(double k2_) : k2(k2_), kprime2(1.0 - k2_) {
    check_modulus(k2_, "Modulus");
}

double complete_K(double k2) {
    check_modulus(k2, "complete_K");
    double a = 1.0, g = std::sqrt(1.0 - k2);
    for (int i = 0; i < 60 && std::abs(a - g) > 2e-17 * a; ++i) {
        const double an = 0.5 * (a + g);
        g = std::sqrt(a * g);
        a = an;
    }
    return pi / (2.0 * a);
}

JacobiReal jacobi_real(double u, double k2) {
    check_modulus(k2, "jacobi_real");
    // Descending Landen scale. a[n], c[n] drive the backward amplitude
    // recurrence phi_{n-1} = (phi_n + asin((c_n/a_n) sin phi_n)) / 2.
    double a[64], c[64];
    a[0] = 1.0;
    c[0] = std::sqrt(k2);
    double b = std::sqrt(1.0 - k2);
    int n = 0;
    while (std::abs(c[n]) > 1e-16 * a[n] && n < 62) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    const double Kv = pi / (2.0 * a[n]); // AGM(1,k') falls out of the scale
    const double ur = std::remainder(u, 4.0 * Kv);
    double phi = std::ldexp(a[n] * ur, n);
    for (int i = n; i >= 1; --i) {
        const double t = std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0);
        phi = 0.5 * (phi + std::asin(t));
    }
    const double sn = std::sin(phi), cn = std::cos(phi);
    const double dn = std::sqrt(1.0 - k2 * sn * sn); // dn > 0 for real u
    return {sn, cn, dn};
}

JacobiTriple jacobi(complex u, double k2) {
    check_modulus(k2, "jacobi");
    if (!std::isfinite(u.real()) || !std::isfinite(u.imag()))
        throw std::invalid_argument("jacobi: non-finite argument");
    const double x = u.real(), y = u.imag();
    const auto jx = jacobi_real(x, k2);
    if (y == 0.0) return {jx.sn, jx.cn, jx.dn};
    const auto jy = jacobi_real(y, 1.0 - k2);
    const double den = jy.cn * jy.cn + k2 * jx.sn * jx.sn * jy.sn * jy.sn;
    if (std::abs(den) < 1e-17) {
        const double Kv = complete_K(k2), Kpv = complete_K(1.0 - k2);
        const complex nearest(std::round(x / (2.0 * Kv)) * 2.0 * Kv,
                              y > 0 ? Kpv : -Kpv);
        throw pole_error("jacobi: argument at a pole of sn near " + fmt_complex(nearest), u);
    }
    const complex sn(jx.sn * jy.dn / den, jx.cn * jx.dn * jy.sn * jy.cn / den);
    const complex cn(jx.cn * jy.cn / den, -jx.sn * jx.dn * jy.sn * jy.dn / den);
    const complex dn(jx.dn * jy.cn * jy.dn / den, -k2 * jx.sn * jx.cn * jy.sn / den);
    return {sn, cn, dn};
}

// ---------------------------------------------------------------------------
// LatticeData construction

LatticeData LatticeData::from_modulus(double k2, double ebar3) {
    const Modulus mod(k2); // validates the range
    if (!(ebar3 > 0.0) || !std::isfinite(ebar3))
        throw std::invalid_argument("lattice_from_modulus: ebar3 must be positive");

    LatticeData lat;
    lat.k2 = mod.k2;
    lat.kprime2 = mod.kprime2;
    lat.K = complete_K(k2);
    lat.Kprime = complete_K(1.0 - k2);
    lat.ebar3 = ebar3;
    lat.scale = std::sqrt(ebar3);
    lat.ebar2 = lat.kprime2 * ebar3;

    // Base roots for the (K, iK') lattice; scaling multiplies them by ebar3.
    lat.e1b_ = (2.0 - k2) / 3.0;
    lat.e2b_ = (2.0 * k2 - 1.0) / 3.0;
    lat.e3b_ = -(1.0 + k2) / 3.0;
    lat.e1 = ebar3 * lat.e1b_;
    lat.e2 = ebar3 * lat.e2b_;
    lat.e3 = ebar3 * lat.e3b_;
    lat.g2 = -4.0 * (lat.e1 * lat.e2 + lat.e1 * lat.e3 + lat.e2 * lat.e3);
    lat.g3 = 4.0 * lat.e1 * lat.e2 * lat.e3;

    lat.omega1 = complex(lat.K / lat.scale, 0.0);
    lat.omega3 = complex(0.0, lat.Kprime / lat.scale);
    lat.omega2 = lat.omega1 + lat.omega3;

    const double q = std::exp(-pi * lat.Kprime / lat.K);
    lat.nome = q;
    lat.q4_ = std::pow(q, 0.25);

    // Series tables. Bound |Im v| <= pi K'/(2K) (arguments are reduced to the
    // centered cell before evaluation) plus margin for root-search iterates.
    const double vmax = pi * lat.Kprime / (2.0 * lat.K) * 1.10 + 0.05;
    const double boost = std::exp(vmax);
    {
        double qp = 1.0, b2 = boost * boost; // q^{n(n+1)}; e^{(2n+1)vmax}
        double amp = boost;
        for (int n = 0; n < 200; ++n) {
            lat.q_odd_.push_back(qp);
            if (qp * amp < 1e-22 && n >= 4) break;
            qp *= std::pow(q, 2 * (n + 1));
            amp *= b2;
        }
        if (lat.q_odd_.size() >= 200)
            throw numeric_error("lattice_from_modulus: theta series too slow (modulus too extreme)");
    }
    {
        double amp = boost * boost;
        for (int n = 1; n < 200; ++n) {
            const double qn = std::pow(q, double(n) * n);
            lat.q_sq_.push_back(qn);
            if (qn * amp < 1e-22 && n >= 4) break;
            amp *= boost * boost;
        }
    }

    double A = 0.0, B = 0.0; // sum (-1)^n (2n+1)^{1,3} q^{n(n+1)}
    for (std::size_t n = 0; n < lat.q_odd_.size(); ++n) {
        const double m = 2.0 * double(n) + 1.0;
        const double s = (n % 2 ? -1.0 : 1.0) * lat.q_odd_[n];
        A += s * m;
        B += s * m * m * m;
    }
    lat.th1p0_ = A;
    lat.eta1b_ = pi * pi * B / (12.0 * lat.K * A);
    // Legendre: eta1 omega3 - eta3 omega1 = i pi / 2 (base units).
    lat.eta3b_ = (lat.eta1b_ * complex(0.0, lat.Kprime) - complex(0.0, pi / 2.0)) / lat.K;
    lat.eta1 = lat.scale * lat.eta1b_;
    lat.eta3 = lat.scale * lat.eta3b_;

    // Internal consistency: K must equal (pi/2) theta3(0)^2 for this nome.
    const double th3 = lat.theta3(complex(0.0, 0.0)).real();
    if (std::abs(pi / 2.0 * th3 * th3 - lat.K) > 1e-11 * lat.K)
        throw numeric_error("lattice_from_modulus: theta/K consistency check failed");

    return lat;
}

LatticeData lattice_from_modulus(double k2, double ebar3) {
    return LatticeData::from_modulus(k2, ebar3);
}

// ---------------------------------------------------------------------------
// Theta series (argument v, nome from construction)

complex LatticeData::theta1(complex v) const {
    const complex s = std::sin(v), c = std::cos(v);
    const complex s2 = 2.0 * s * c, c2 = c * c - s * s;
    complex sn = s, cn = c, acc = 0.0;
    for (std::size_t n = 0; n < q_odd_.size(); ++n) {
        acc += (n % 2 ? -q_odd_[n] : q_odd_[n]) * sn;
        const complex ns = sn * c2 + cn * s2, nc = cn * c2 - sn * s2;
        sn = ns;
        cn = nc;
    }
    return 2.0 * q4_ * acc;
}

complex LatticeData::theta1_prime(complex v) const {
    const complex s = std::sin(v), c = std::cos(v);
    const complex s2 = 2.0 * s * c, c2 = c * c - s * s;
    complex sn = s, cn = c, acc = 0.0;
    for (std::size_t n = 0; n < q_odd_.size(); ++n) {
        const double m = 2.0 * double(n) + 1.0;
        acc += (n % 2 ? -q_odd_[n] : q_odd_[n]) * m * cn;
        const complex ns = sn * c2 + cn * s2, nc = cn * c2 - sn * s2;
        sn = ns;
        cn = nc;
    }
    return 2.0 * q4_ * acc;
}

complex LatticeData::theta2(complex v) const {
    const complex s = std::sin(v), c = std::cos(v);
    const complex s2 = 2.0 * s * c, c2 = c * c - s * s;
    complex sn = s, cn = c, acc = 0.0;
    for (std::size_t n = 0; n < q_odd_.size(); ++n) {
        acc += q_odd_[n] * cn;
        const complex ns = sn * c2 + cn * s2, nc = cn * c2 - sn * s2;
        sn = ns;
        cn = nc;
    }
    return 2.0 * q4_ * acc;
}

complex LatticeData::theta3(complex v) const {
    const complex s2 = std::sin(2.0 * v), c2 = std::cos(2.0 * v);
    complex sn = s2, cn = c2, acc = 1.0;
    for (std::size_t n = 0; n < q_sq_.size(); ++n) {
        acc += 2.0 * q_sq_[n] * cn;
        const complex ns = sn * c2 + cn * s2, nc = cn * c2 - sn * s2;
        sn = ns;
        cn = nc;
    }
    return acc;
}

complex LatticeData::theta4(complex v) const {
    const complex s2 = std::sin(2.0 * v), c2 = std::cos(2.0 * v);
    complex sn = s2, cn = c2, acc = 1.0;
    for (std::size_t n = 0; n < q_sq_.size(); ++n) {
        acc += 2.0 * ((n % 2 == 0) ? -q_sq_[n] : q_sq_[n]) * cn;
        const complex ns = sn * c2 + cn * s2, nc = cn * c2 - sn * s2;
        sn = ns;
        cn = nc;
    }
    return acc;
}

double LatticeData::theta1_prime0() const { return 2.0 * q4_ * th1p0_; }

LatticeData::Reduced LatticeData::reduce(complex z_base) const {
    const double n1 = std::round(z_base.real() / (2.0 * K));
    const double n3 = std::round(z_base.imag() / (2.0 * Kprime));
    const complex zr(z_base.real() - 2.0 * K * n1, z_base.imag() - 2.0 * Kprime * n3);
    return {zr, static_cast<long>(n1), static_cast<long>(n3)};
}

// wp on the base lattice; zr already reduced. Uses wp = e3 + k (th4/th1)^2,
// which is the theta form of the sn^2 bridge.
complex LatticeData::wp_base(complex zr) const {
    const complex v = pi / (2.0 * K) * zr;
    const complex r = theta4(v) / theta1(v);
    return e3b_ + std::sqrt(k2) * r * r;
}

complex LatticeData::wp_prime_base(complex zr) const {
    const complex v = pi / (2.0 * K) * zr;
    const complex t1 = theta1(v);
    const double kkp = std::sqrt(k2) * std::sqrt(kprime2);
    return -2.0 * kkp * theta2(v) * theta3(v) * theta4(v) / (t1 * t1 * t1);
}

// ---------------------------------------------------------------------------
// Public Weierstrass functions (scaled units)

complex wp(complex z, const LatticeData& lat) {
    const auto red = lat.reduce(lat.scale * z);
    if (std::abs(red.zr) < pole_radius)
        throw pole_error("wp: argument on the period lattice near " + fmt_complex(z), z);
    return lat.ebar3 * lat.wp_base(red.zr);
}

complex wp_prime(complex z, const LatticeData& lat) {
    const auto red = lat.reduce(lat.scale * z);
    if (std::abs(red.zr) < pole_radius)
        throw pole_error("wp_prime: argument on the period lattice near " + fmt_complex(z), z);
    return lat.ebar3 * lat.scale * lat.wp_prime_base(red.zr);
}

complex wp_second(complex z, const LatticeData& lat) {
    const complex p = wp(z, lat);
    return 6.0 * p * p - 0.5 * lat.g2;
}

complex wzeta(complex z, const LatticeData& lat) {
    const auto red = lat.reduce(lat.scale * z);
    if (std::abs(red.zr) < pole_radius)
        throw pole_error("wzeta: argument on the period lattice near " + fmt_complex(z), z);
    const complex v = pi / (2.0 * lat.K) * red.zr;
    complex zeta_b = lat.eta1b_ * red.zr / lat.K +
                     pi / (2.0 * lat.K) * lat.theta1_prime(v) / lat.theta1(v);
    zeta_b += 2.0 * double(red.n1) * lat.eta1b_ + 2.0 * double(red.n3) * lat.eta3b_;
    return lat.scale * zeta_b;
}

complex log_wsigma(complex z, const LatticeData& lat) {
    const auto red = lat.reduce(lat.scale * z);
    const complex v = pi / (2.0 * lat.K) * red.zr;
    const complex H = double(red.n1) * lat.eta1b_ + double(red.n3) * lat.eta3b_;
    const complex Om(double(red.n1) * lat.K, double(red.n3) * lat.Kprime);
    complex ls = std::log(2.0 * lat.K / (pi * lat.theta1_prime0())) +
                 lat.eta1b_ * red.zr * red.zr / (2.0 * lat.K) + std::log(lat.theta1(v));
    // sigma(z + 2 n1 w1 + 2 n3 w3) = (-1)^{n1+n3+n1 n3} e^{2H(z + Om)} sigma(z)
    ls += 2.0 * H * (red.zr + Om);
    if ((red.n1 + red.n3 + red.n1 * red.n3) % 2 != 0) ls += complex(0.0, pi);
    return ls - std::log(complex(lat.scale, 0.0));
}

complex wsigma(complex z, const LatticeData& lat) {
    return std::exp(log_wsigma(z, lat));
}

// ---------------------------------------------------------------------------
// Inversion of wp

namespace {

// Fold into the fundamental domain Re in [0, 2 w1), Im in [0, 2 |w3|).
complex fold_fundamental(complex b, const LatticeData& lat) {
    const double px = 2.0 * lat.omega1.real(), py = 2.0 * lat.omega3.imag();
    double x = b.real() - px * std::floor(b.real() / px);
    double y = b.imag() - py * std::floor(b.imag() / py);
    if (x >= px) x -= px; // guard against floor rounding at the boundary
    if (y >= py) y -= py;
    return {x, y};
}

complex newton_wp(complex c, complex b0, const LatticeData& lat) {
    const double sc = std::max({1.0, std::abs(c), lat.e1});
    complex b = b0, best = b0;
    double best_err = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 80; ++it) {
        complex w;
        try {
            w = wp(b, lat);
        } catch (const pole_error&) {
            b += complex(3e-3, 2e-3) * lat.omega1.real();
            continue;
        }
        const double err = std::abs(w - c);
        if (err < best_err) {
            best_err = err;
            best = b;
        }
        if (err <= 1e-13 * sc) return b;
        const complex d = wp_prime(b, lat);
        if (std::abs(d) < 1e-14 * sc) {
            b += complex(1e-4, 7e-5) * lat.omega1.real();
            continue;
        }
        complex step = (w - c) / d;
        const double max_step = 0.6 * std::min(lat.omega1.real(), lat.omega3.imag());
        if (std::abs(step) > max_step) step *= max_step / std::abs(step);
        b -= step;
    }
    if (best_err <= 1e-11 * sc) return best;
    throw numeric_error("inverse_wp: Newton iteration did not converge (|wp(b)-c| = " +
                            std::to_string(best_err) + ")",
                        best);
}

// Bisection of a real-valued, monotone section of wp along a segment
// p(t) = z0 + t*dir, t in (0, tmax).
complex bisect_segment(complex c, complex z0, complex dir, double tmax, bool increasing,
                       const LatticeData& lat) {
    double lo = 1e-12 * tmax, hi = tmax * (1.0 - 1e-12);
    auto val = [&](double t) { return wp(z0 + t * dir, lat).real(); };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = val(mid) - c.real();
        if ((f > 0.0) != increasing)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * tmax) break;
    }
    return z0 + 0.5 * (lo + hi) * dir;
}

} // namespace

complex inverse_wp(complex c, const LatticeData& lat) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("inverse_wp: non-finite value");

    const double w1 = lat.omega1.real(), w3 = lat.omega3.imag();
    const double spread = lat.ebar3;
    const complex omegas[3] = {lat.omega1, lat.omega2, lat.omega3};
    const double es[3] = {lat.e1, lat.e2, lat.e3};

    // Exactly (or nearly) a lattice root: b = omega_i.
    for (int i = 0; i < 3; ++i)
        if (std::abs(c - es[i]) <= 1e-12 * std::max(1.0, std::abs(es[i])))
            return fold_fundamental(omegas[i], lat);

    // Near a root the quadratic expansion wp(omega_i + d) = e_i + wp''(omega_i) d^2/2
    // seeds Newton through the vanishing-derivative region.
    for (int i = 0; i < 3; ++i) {
        if (std::abs(c - es[i]) < 1e-4 * spread) {
            const double pp = 6.0 * es[i] * es[i] - 0.5 * lat.g2;
            const complex d = std::sqrt(2.0 * (c - es[i]) / pp);
            return fold_fundamental(newton_wp(c, omegas[i] + d, lat), lat);
        }
    }

    // Real values: wp is real and monotone on the four boundary segments of the
    // quarter cell; bisection gives a certified bracket.
    if (std::abs(c.imag()) <= 1e-11 * (1.0 + std::abs(c.real()))) {
        const double cr = c.real();
        const complex creal(cr, 0.0);
        complex b;
        if (cr > lat.e1) {
            // (0, w1): decreasing from +inf to e1
            b = bisect_segment(creal, complex(0, 0), complex(1, 0), w1, false, lat);
        } else if (cr > lat.e2) {
            // w1 + i(0, w3): decreasing from e1 to e2
            b = bisect_segment(creal, lat.omega1, complex(0, 1), w3, false, lat);
        } else if (cr > lat.e3) {
            // i w3 + (0, w1): increasing from e3 to e2
            b = bisect_segment(creal, lat.omega3, complex(1, 0), w1, true, lat);
        } else {
            // i(0, w3): increasing from -inf to e3
            b = bisect_segment(creal, complex(0, 0), complex(0, 1), w3, true, lat);
        }
        b = newton_wp(creal, b, lat);
        // keep exact realness of the representative where it belongs
        if (cr > lat.e1) b = complex(std::abs(b.real()), 0.0);
        return fold_fundamental(b, lat);
    }

    // Genuinely complex value: scan the lower half cell (a fundamental domain
    // for the values of wp) for the best starting point, then Newton.
    const int nx = 48, ny = 24;
    complex b0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const complex zt((i + 0.5) * 2.0 * w1 / nx, (j + 0.5) * w3 / ny);
            const double err = std::abs(wp(zt, lat) - c);
            if (err < best) {
                best = err;
                b0 = zt;
            }
        }
    }
    return fold_fundamental(newton_wp(c, b0, lat), lat);
}

} // namespace alame
