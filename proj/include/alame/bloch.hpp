#pragma once

#include <array>

#include "alame/frobenius.hpp"

namespace alame {

/// The associated Lame potential V(x) = m(m+1) k^2 sn^2 x + l(l+1) k^2 cn^2 x / dn^2 x.
double potential(double x, const ModelParams& p);

/// Normalized product solution Psi(z) = prod_r [wp(z) - c_r] / [(wp(z) - e1)^l gamma],
/// gamma chosen by locate_b so that Psi'(b_r) = +1.
complex product_solution(complex z, const FrobeniusSolution& sol, const LatticeData& lat);

/// Psi and its first two z-derivatives (logarithmic-derivative closed forms).
struct ProductDerivs {
    complex Psi, dPsi, d2Psi;
};
ProductDerivs product_derivs(complex z, const FrobeniusSolution& sol, const LatticeData& lat);

/// The two Bloch solutions at energy E, assembled from the sigma-product form.
/// psi(+1, x) and psi(-1, x) carry a global phase fixed so psi(sign, x0) is
/// real positive at x0 = K (deterministic figure data); psi_raw omits it.
class BlochPair {
public:
    ModelParams params;
    double E;
    FrobeniusSolution sol;
    LatticeData lat;

    double period;              // 2K, or K when m == ell
    complex floquetMultiplier;  // psi(+1, x+period)/psi(+1, x)
    complex floquetExponent;    // principal log of the multiplier
    complex multiplier2K;       // closed form over 2K from the zeta/b sums
    complex wronskian;          // W(psi+, psi-), constant in x
    std::array<complex, 2> phase; // applied phase factors for sign = +1, -1

    complex psi(int sign, double x) const;      // sign = +1 or -1
    complex dpsi(int sign, double x) const;
    complex psi_raw(int sign, double x) const;  // bare sigma-product form, no phase
    complex log_deriv(int sign, double x) const;
    complex log_deriv2(int sign, double x) const;
    /// z-plane image of the real line, z = (x - iK') / sqrt(ebar3).
    complex z_of_x(double x) const;

private:
    friend BlochPair bloch_pair(const ModelParams&, double, const LatticeData&);
    BlochPair(const ModelParams& p, double E_, FrobeniusSolution s, LatticeData l);
    complex log_psi_raw(int sign, double x) const;
    complex sum_zeta_b_;  // sum zeta(b_r)
    complex sum_b_;       // sum b_r
};

BlochPair bloch_pair(const ModelParams& p, double E, const LatticeData& lat);

/// One-period transfer matrix of -y'' + V y = E y by RK4 with the potential
/// cached on the integration grid (cheap repeated-energy evaluation).
struct Monodromy {
    double m11, m12, m21, m22;
    double trace() const { return m11 + m22; }
    std::array<complex, 2> multipliers() const;
};

class HillIntegrator {
public:
    HillIntegrator(const ModelParams& p, const LatticeData& lat, int steps = 8192);
    double period() const { return T_; }
    Monodromy monodromy(double E) const;
    double discriminant(double E) const { return monodromy(E).trace(); }

private:
    double T_;
    int n_;
    std::vector<double> V_; // V at j h/2, j = 0..2n
};

/// Trace of the one-period transfer matrix; |trace| <= 2 iff E is in an
/// allowed band.
double hill_discriminant(const ModelParams& p, double E, const LatticeData& lat,
                         int steps = 8192);

/// Band edges in [emin, emax] located as |D(E)| = 2 crossings: coarse scan at
/// `coarse` spacing, bisection refinement to `resolution`. Bands narrower than
/// the coarse step can be missed.
std::vector<double> scan_band_edges(const ModelParams& p, const LatticeData& lat, double emin,
                                    double emax, double coarse = 0.02,
                                    double resolution = 1e-6, int steps = 4096);

/// Finite-difference verification of the Bloch pair on a uniform grid:
/// max |-psi'' + (V - E) psi| / max|psi| (5-point second derivative, interior
/// step h) and the relative variation of the Wronskian.
struct ResidualReport {
    double max_residual_rel;
    double wronskian_variation;
};
ResidualReport schrodinger_residual(const BlochPair& bp, double xmin, double xmax, int n,
                                    double h = 1e-3);

} // namespace alame
