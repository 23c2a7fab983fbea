#pragma once

#include <complex>
#include <vector>

#include "alame/errors.hpp"

namespace alame {

using complex = std::complex<double>;

/// Jacobi elliptic modulus, k^2 in (0,1).
struct Modulus {
    double k2;
    double kprime2; // 1 - k2

    explicit Modulus(double k2_);
    double k() const { return std::sqrt(k2); }
    double kprime() const { return std::sqrt(kprime2); }
};

/// Complete elliptic integral K(k) = \int_0^{pi/2} dphi / sqrt(1 - k^2 sin^2 phi),
/// evaluated by the arithmetic-geometric mean. K' is complete_K(1 - k2).
double complete_K(double k2);

struct JacobiReal {
    double sn, cn, dn;
};
struct JacobiTriple {
    complex sn, cn, dn;
};

/// sn, cn, dn for real argument (descending Landen / AGM scale).
JacobiReal jacobi_real(double u, double k2);

/// sn, cn, dn for complex argument, via the real-argument values of u.re
/// (modulus k) and u.im (modulus k') combined with the addition theorem.
/// Throws pole_error at the poles of sn (u == iK' mod the period lattice).
JacobiTriple jacobi(complex u, double k2);

/// Lattice constants and theta-series machinery for the Weierstrass functions
/// on the rectangular lattice with half-periods omega1 = K/sqrt(ebar3),
/// omega3 = iK'/sqrt(ebar3). The default normalization ebar3 = 1 pins
/// e1 = (2-k^2)/3, e2 = (2k^2-1)/3, e3 = -(1+k^2)/3; a different scale
/// multiplies the e_i by ebar3 and rescales arguments, so downstream formulas
/// that keep sqrt(ebar3) explicit are scale-independent.
class LatticeData {
public:
    static LatticeData from_modulus(double k2, double ebar3 = 1.0);

    // Jacobi-side constants (unscaled, Jacobi argument units).
    double k2{}, kprime2{};
    double K{}, Kprime{};

    // Weierstrass data, scaled so that e1 - e3 == ebar3.
    double e1{}, e2{}, e3{};
    double ebar2{}, ebar3{}; // ebar_i = e1 - e_i
    complex omega1{}, omega2{}, omega3{};
    double g2{}, g3{};
    double eta1{};  // zeta(omega1), real
    complex eta3{}; // zeta(omega3), purely imaginary
    double nome{};  // q = exp(-pi K'/K)
    double scale{}; // sqrt(ebar3); z_weierstrass = z_jacobi / scale

    double discriminant() const { return g2 * g2 * g2 - 27.0 * g3 * g3; }

    // Jacobi theta functions of the nome q, argument v (theta1 has the
    // 2 q^{1/4} factor included). Exposed for tests.
    complex theta1(complex v) const;
    complex theta1_prime(complex v) const; // d/dv
    complex theta2(complex v) const;
    complex theta3(complex v) const;
    complex theta4(complex v) const;
    double theta1_prime0() const;

    struct Reduced {
        complex zr;
        long n1, n3;
    };
    /// z (base units) minus the nearest lattice point 2 n1 K + 2 n3 iK'.
    Reduced reduce(complex z_base) const;

private:
    LatticeData() = default;

    // base-lattice (ebar3 = 1) constants
    double e1b_{}, e2b_{}, e3b_{};
    double eta1b_{};
    complex eta3b_{};
    double q4_{};                // q^{1/4}
    double th1p0_{};             // theta1'(0) without the 2 q^{1/4} factor
    std::vector<double> q_odd_;  // q^{n(n+1)}, n = 0,1,...
    std::vector<double> q_sq_;   // q^{n^2},   n = 1,2,...

    friend complex wp(complex, const LatticeData&);
    friend complex wp_prime(complex, const LatticeData&);
    friend complex wzeta(complex, const LatticeData&);
    friend complex wsigma(complex, const LatticeData&);
    friend complex log_wsigma(complex, const LatticeData&);

    complex wp_base(complex zr) const;
    complex wp_prime_base(complex zr) const;
};

/// Convenience factory matching the operation name used elsewhere.
LatticeData lattice_from_modulus(double k2, double ebar3 = 1.0);

/// Weierstrass P, P', zeta, sigma on the lattice of `lat` (scaled units).
/// wp/wp_prime/wzeta throw pole_error within 1e-9 of a lattice point.
complex wp(complex z, const LatticeData& lat);
complex wp_prime(complex z, const LatticeData& lat);
/// P'' from the algebraic identity 6 P^2 - g2/2.
complex wp_second(complex z, const LatticeData& lat);
complex wzeta(complex z, const LatticeData& lat);
complex wsigma(complex z, const LatticeData& lat);
/// A (branch-arbitrary) logarithm of sigma; exp(log_wsigma(z)) == wsigma(z)
/// exactly, suitable for overflow-free products of many sigma factors.
complex log_wsigma(complex z, const LatticeData& lat);

/// Invert wp: returns b in the fundamental domain (Re in [0, 2 omega1),
/// Im in [0, Im 2 omega3)) with wp(b) = c to ~1e-12 relative. The caller is
/// responsible for the +-b ambiguity. Throws numeric_error (carrying the
/// last iterate) if the root search fails.
complex inverse_wp(complex c, const LatticeData& lat);

} // namespace alame
