#pragma once

#include <array>
#include <vector>

#include "alame/elliptic.hpp"

namespace alame {

/// Potential parameters: V = m(m+1) k^2 sn^2 x + l(l+1) k^2 cn^2 x / dn^2 x,
/// integer m >= ell >= 0 (and m + ell >= 1; the (0,0) case is free space).
struct ModelParams {
    int m;
    int ell;
    double k2;

    ModelParams(int m_, int ell_, double k2_);
    int series_degree() const { return m + ell; }
    /// real period of the potential: 2K for m != ell, K for m == ell
    double period(const LatticeData& lat) const { return (m == ell) ? lat.K : 2.0 * lat.K; }
};

/// Shifted energy for the Weierstrass form:
/// Etilde = e3 m(m+1) + [E - l(l+1)] ebar3.
double shift_energy(double E, const ModelParams& p, const LatticeData& lat);
complex shift_energy(complex E, const ModelParams& p, const LatticeData& lat);

/// Recurrence coefficient triple at integer index rho:
///   f0(rho) = ebar3 rho (rho - 1 - 2l)(2 rho - 2l - 1)
///   f1(rho) = 2 (rho - l) { e1 [m(m+1) - 3(rho - l)^2] - Etilde }
///   f2(rho) = ebar2 (rho - m - l)(rho + m - l + 1)(2 rho + 1 - 2l)
struct FTriplet {
    double f0, f1, f2;
};
FTriplet f_triplet(int rho, const ModelParams& p, double Etilde, const LatticeData& lat);
struct FTripletC {
    complex f0, f1, f2;
};
FTripletC f_triplet(int rho, const ModelParams& p, complex Etilde, const LatticeData& lat);

/// r x r banded determinant F_r via the stable three-term recurrence
/// F_r = f1(r-1) F_{r-1} - f0(r-1) f2(r-2) F_{r-2}, F_0 = 1.
double det_F(int r, const ModelParams& p, double Etilde, const LatticeData& lat);
complex det_F(int r, const ModelParams& p, complex Etilde, const LatticeData& lat);

/// The matrix behind F_r, for the skew-symmetry witness tests.
std::vector<std::vector<double>> det_F_matrix(int r, const ModelParams& p, double Etilde,
                                              const LatticeData& lat);

/// Terminating Frobenius solution data.
struct FrobeniusSolution {
    ModelParams params;
    double E{};
    double Etilde{};
    std::vector<double> a;       // a_0 .. a_{m+l}, a_0 = 1
    std::vector<complex> c;      // zeros of the characteristic polynomial in t
    std::vector<int> c_mult;     // multiplicities of the c_r
    std::vector<complex> b;      // sign-fixed points with wp(b_r) = c_r
    std::vector<int> b_sign;     // +1: canonical inverse_wp representative, -1: negated
    complex psiPrimeAtB{};       // common value of Psi' at the b_r before rescaling
    std::array<double, 3> indicialExponents{}; // {0, 2l+1, l+1/2}
};

/// a_0..a_{m+l} and Etilde. Throws degenerate_energy_error when a minor
/// denominator vanishes (isolated energies, typically band edges).
FrobeniusSolution coefficients(const ModelParams& p, double E, const LatticeData& lat);
/// Complex-energy variant for diagnostics (coefficients only).
std::vector<complex> coefficients_diagnostic(const ModelParams& p, complex E,
                                             const LatticeData& lat);

/// Largest relative residual of the three-term recurrence over all rows,
/// including the continuation rows a_{N+1} = a_{N+2} = 0.
double recurrence_residual(const FrobeniusSolution& sol, const LatticeData& lat);

/// Zeros c_r of sum_r a_r [(e1 - t)/ebar2]^r; fills sol.c / sol.c_mult.
std::vector<complex> char_roots(FrobeniusSolution& sol, const LatticeData& lat);

/// Resolve the sign ambiguity of b_r = +-inverse_wp(c_r) by requiring one
/// common value of Psi'(b_j); records that value in psiPrimeAtB.
void locate_b(FrobeniusSolution& sol, const LatticeData& lat);

/// coefficients + char_roots + locate_b.
FrobeniusSolution solve_frobenius(const ModelParams& p, double E, const LatticeData& lat);

} // namespace alame
