#pragma once

#include <memory>
#include <optional>

#include "alame/bloch.hpp"

namespace alame {

/// Closed-form band-edge data for (m,l) = (3,1): E1 = 1 + 4k^2, E2 = 1 + 9k^2,
/// the sn cn/dn pair 10 + 2k^2 -+ 2 sqrt(k^4 + 9 k'^2), and the three ordered
/// roots of E^3 - (11k^2+20)E^2 + (19k^4+216k^2+64)E - (9k^6+388k^4+448k^2).
struct BandEdges31 {
    double k2{};
    std::vector<double> edges;          // all closed-form edges, sorted
    std::array<double, 3> cubic_roots{}; // sorted; cubic_roots[0] is E0
    double snccn_radicand{};            // k^4 + 9 k'^2
    bool snccn_pair_real{};             // radicand >= 0 (always, kept for the record)
};
BandEdges31 band_edges_31(double k2);

/// Band/gap structure of the potential: sorted edges plus the classification
/// of every interval between them. Gap indices count forbidden intervals from
/// below; the semi-infinite region below the spectrum is gap 0.
struct Spectrum {
    std::vector<double> edges;
    std::vector<bool> band_after; // band_after[i]: (edges[i], edges[i+1]) allowed;
                                  // band_after.back() refers to (edges.back(), inf)
    enum class Where { Band, Gap, Edge };
    Where classify(double E, int* gap_index = nullptr, double edge_tol = 1e-9) const;
    double E0() const { return edges.front(); }
    /// first finite forbidden interval (lo, hi)
    std::optional<std::pair<double, double>> first_finite_gap() const;
};

/// Closed forms for (3,1), Hill-discriminant scan otherwise.
Spectrum analyze_spectrum(const ModelParams& p, const LatticeData& lat,
                          double emax_margin = 8.0);

/// Transformation request. order 1 uses eps1 with either a pure Bloch seed
/// (lambda1 = 0, sign selects psi+ or psi-) or the combination
/// u = psi+ + lambda1 psi-. order 2 uses u_i = psi_i+ + lambda_i psi_i-.
struct SusySpec {
    int order = 1;
    double eps1 = 0.0;
    double eps2 = 0.0;
    int sign = +1;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    bool defect() const { return order == 1 ? lambda1 != 0.0 : (lambda1 != 0.0 || lambda2 != 0.0); }
};

/// Placement validation: order 1 requires eps1 strictly below E0; order 2
/// requires eps1 != eps2 in one common forbidden gap. Throws spec_error with
/// the violated rule; node checks happen at construction time.
SusySpec validate_spec(const SusySpec& spec, const ModelParams& p, const LatticeData& lat);

/// A SUSY partner potential with its seeds and bookkeeping.
class PartnerPotential {
public:
    double operator()(double x) const;  // partner value
    double base(double x) const;        // original V(x)

    const SusySpec& spec() const;
    const ModelParams& params() const;
    int order() const;
    bool periodic() const;
    double period() const; // 2K

    /// energies of the extra bound states created by a defect transformation
    const std::vector<double>& bound_state_energies() const;
    /// evaluator of the j-th bound state (1/u, or u_{2}/W and u_{1}/W)
    double bound_state(int j, double x) const;

    /// smallest interval outside which the defect partner matches its
    /// side-specific asymptotic periodic partner below `threshold`
    std::optional<std::pair<double, double>> defect_window() const;
    double defect_threshold() const;
    /// asymptotic periodic references of a defect partner (equal to the
    /// partner itself for periodic variants)
    double periodic_reference_left(double x) const;
    double periodic_reference_right(double x) const;

    /// seed functions u_i and derivatives (i = 0 for order 1; 0,1 for order 2)
    complex seed(int i, double x) const;
    complex seed_deriv(int i, double x) const;
    const BlochPair& seed_pair(int i) const;

    /// log-derivative data used by the intertwiner
    complex intertwine_apply(double x, const BlochPair& f, int fsign = +1) const;

    struct Impl;
    explicit PartnerPotential(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<const Impl> impl_;
};

PartnerPotential susy1_periodic(const ModelParams& p, double eps, int sign,
                                const LatticeData& lat);
PartnerPotential susy1_defect(const ModelParams& p, double eps, double lambda,
                              const LatticeData& lat);
PartnerPotential susy2_periodic(const ModelParams& p, double eps1, double eps2,
                                const LatticeData& lat);
PartnerPotential susy2_defect(const ModelParams& p, double eps1, double eps2, double lambda1,
                              double lambda2, const LatticeData& lat);

/// Apply the intertwiner built from the partner's seeds to the Bloch solution
/// of H at testE and measure the Schrodinger residual of B psi under the
/// partner potential, plus the finite-difference annihilation residual of the
/// seeds themselves.
struct IntertwineReport {
    double testE;
    bool in_band;
    double residual_rel;     // max |-(Bpsi)'' + (Vt - E) Bpsi| / max |Bpsi|
    double annihilation_rel; // max |Bu| relative to the cancellation scale
};
IntertwineReport intertwine_check(const PartnerPotential& partner, double testE,
                                  const LatticeData& lat);

} // namespace alame
