#include "alame/susy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace alame {

namespace {

// Three real roots of E^3 + a E^2 + b E + c (trigonometric form, Newton-polished).
std::array<double, 3> cubic_roots_real(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    if (!(p < 0.0) || disc <= 0.0)
        throw numeric_error("cubic_roots_real: discriminant not positive, roots not all real");
    const double rho = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * rho), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    std::array<double, 3> roots{};
    for (int k = 0; k < 3; ++k)
        roots[k] = rho * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - a / 3.0;
    for (double& r : roots) {
        for (int it = 0; it < 8; ++it) {
            const double f = ((r + a) * r + b) * r + c;
            const double df = (3.0 * r + 2.0 * a) * r + b;
            if (df == 0.0) break;
            r -= f / df;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace

BandEdges31 band_edges_31(double k2) {
    if (!(k2 > 0.0 && k2 < 1.0))
        throw std::invalid_argument("band_edges_31: k2 outside (0,1)");
    BandEdges31 be;
    be.k2 = k2;
    const double k4 = k2 * k2, kp2 = 1.0 - k2;
    be.snccn_radicand = k4 + 9.0 * kp2;
    be.snccn_pair_real = be.snccn_radicand >= 0.0;
    be.cubic_roots = cubic_roots_real(-(11.0 * k2 + 20.0), 19.0 * k4 + 216.0 * k2 + 64.0,
                                      -(9.0 * k4 * k2 + 388.0 * k4 + 448.0 * k2));
    be.edges = {be.cubic_roots[0], be.cubic_roots[1], be.cubic_roots[2], 1.0 + 4.0 * k2,
                1.0 + 9.0 * k2};
    if (be.snccn_pair_real) {
        be.edges.push_back(10.0 + 2.0 * k2 - 2.0 * std::sqrt(be.snccn_radicand));
        be.edges.push_back(10.0 + 2.0 * k2 + 2.0 * std::sqrt(be.snccn_radicand));
    }
    std::sort(be.edges.begin(), be.edges.end());
    return be;
}

Spectrum::Where Spectrum::classify(double E, int* gap_index, double edge_tol) const {
    for (double e : edges) {
        if (std::abs(E - e) <= edge_tol * (1.0 + std::abs(e))) {
            if (gap_index) *gap_index = -1;
            return Where::Edge;
        }
    }
    if (E < edges.front()) {
        if (gap_index) *gap_index = 0;
        return Where::Gap;
    }
    std::size_t i = 0;
    while (i + 1 < edges.size() && E > edges[i + 1]) ++i;
    if (E > edges.back()) i = edges.size() - 1;
    int gaps_before = 1; // the semi-infinite gap below the spectrum
    for (std::size_t j = 0; j < i; ++j)
        if (!band_after[j]) ++gaps_before;
    if (band_after[i]) {
        if (gap_index) *gap_index = -1;
        return Where::Band;
    }
    if (gap_index) *gap_index = gaps_before;
    return Where::Gap;
}

std::optional<std::pair<double, double>> Spectrum::first_finite_gap() const {
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (!band_after[i]) return std::make_pair(edges[i], edges[i + 1]);
    return std::nullopt;
}

Spectrum analyze_spectrum(const ModelParams& p, const LatticeData& lat, double emax_margin) {
    Spectrum sp;
    if (p.m == 3 && p.ell == 1) {
        sp.edges = band_edges_31(p.k2).edges;
    } else {
        double vmax = 0.0;
        for (int i = 0; i <= 256; ++i)
            vmax = std::max(vmax, potential(i / 256.0 * p.period(lat), p));
        sp.edges = scan_band_edges(p, lat, -0.5, vmax + emax_margin);
        if (sp.edges.empty())
            throw numeric_error("analyze_spectrum: no band edges found in the scanned range");
    }
    HillIntegrator hill(p, lat);
    for (std::size_t i = 0; i < sp.edges.size(); ++i) {
        const double mid = (i + 1 < sp.edges.size()) ? 0.5 * (sp.edges[i] + sp.edges[i + 1])
                                                     : sp.edges[i] + 1.0;
        sp.band_after.push_back(std::abs(hill.discriminant(mid)) <= 2.0);
    }
    return sp;
}

// ---------------------------------------------------------------------------
// PartnerPotential implementation

struct PartnerPotential::Impl {
    ModelParams p;
    LatticeData lat;
    SusySpec spec;
    std::vector<BlochPair> seeds;
    std::vector<double> bound_energies;
    std::optional<std::pair<double, double>> window;
    double threshold = 1e-6;
    bool is_periodic = true;
    // per-seed dominant component on each side of a defect (+1: psi+, -1: psi-)
    std::array<int, 2> left_sign{+1, +1}, right_sign{+1, +1};

    static double real_guarded(complex v, const char* who) {
        if (std::abs(v.imag()) > 1e-6 * (1.0 + std::abs(v.real())))
            throw numeric_error(std::string(who) + ": non-real value where a real potential "
                                                   "was expected",
                                v);
        return v.real();
    }

    complex u(int i, double x) const {
        const double lam = (i == 0) ? spec.lambda1 : spec.lambda2;
        if (spec.order == 1 && spec.lambda1 == 0.0) return seeds[0].psi(spec.sign, x);
        return seeds[i].psi(+1, x) + lam * seeds[i].psi(-1, x);
    }
    complex du(int i, double x) const {
        const double lam = (i == 0) ? spec.lambda1 : spec.lambda2;
        if (spec.order == 1 && spec.lambda1 == 0.0) return seeds[0].dpsi(spec.sign, x);
        return seeds[i].dpsi(+1, x) + lam * seeds[i].dpsi(-1, x);
    }

    // first-order closed form with seed sign sgn
    double v1_closed(double x, int sgn) const {
        const double k2 = p.k2;
        const auto j = jacobi_real(x, k2);
        double acc = p.m * (p.m - 1) * k2 * j.sn * j.sn +
                     p.ell * (p.ell - 1) * k2 * j.cn * j.cn / (j.dn * j.dn);
        complex sum = 0.0;
        for (const auto& b : seeds[0].sol.b) {
            const complex arg = complex(x, 0.0) + double(sgn) * lat.scale * b;
            const complex sn = jacobi(arg, k2).sn;
            sum += sn * sn;
        }
        return acc + 2.0 * k2 * real_guarded(sum, "susy1 partner");
    }

    // second-order closed form; s1/s2 select the b or -b set per seed
    double v2_closed(double x, int s1, int s2) const {
        const double k2 = p.k2;
        const auto j = jacobi_real(x, k2);
        double acc = p.m * (p.m - 3) * k2 * j.sn * j.sn +
                     p.ell * (p.ell - 3) * k2 * j.cn * j.cn / (j.dn * j.dn);
        const complex Z = seeds[0].z_of_x(x);
        complex sn_sum = 0.0, g = 0.0, dg = 0.0, d2g = 0.0;
        const double s = lat.scale;
        for (int i = 0; i < 2; ++i) {
            const double sgn = (i == 0 ? s1 : s2);
            const double fl = (i == 0 ? -1.0 : +1.0); // g = [ln(u2/u1)]'
            for (const auto& b0 : seeds[i].sol.b) {
                const complex b = sgn * b0;
                const complex snv = jacobi(complex(x, 0.0) + s * b, k2).sn;
                sn_sum += snv * snv;
                g += fl * (wzeta(Z + b, lat) - wzeta(b, lat));
                dg += -fl * wp(Z + b, lat);
                d2g += -fl * wp_prime(Z + b, lat);
            }
        }
        g /= s;
        dg /= s * s;
        d2g /= s * s * s;
        const complex lng2 = d2g / g - (dg / g) * (dg / g);
        return acc + 2.0 * k2 * real_guarded(sn_sum, "susy2 partner") -
               2.0 * real_guarded(lng2, "susy2 (ln g)''");
    }

    // [ln W(u1,u2)]'' via W' = (eps1-eps2) u1 u2 and W'' = (eps1-eps2)(u1 u2)'
    complex lnW2(double x, bool combination) const {
        complex u1, u2, du1, du2;
        if (combination) {
            u1 = u(0, x);
            u2 = u(1, x);
            du1 = du(0, x);
            du2 = du(1, x);
        } else {
            u1 = seeds[0].psi(+1, x);
            u2 = seeds[1].psi(+1, x);
            du1 = seeds[0].dpsi(+1, x);
            du2 = seeds[1].dpsi(+1, x);
        }
        const complex W = u1 * du2 - du1 * u2;
        const double de = spec.eps1 - spec.eps2;
        const complex Wp = de * u1 * u2;
        const complex Wpp = de * (du1 * u2 + u1 * du2);
        return Wpp / W - (Wp / W) * (Wp / W);
    }

    double tilde(double x) const {
        if (spec.order == 1) {
            if (spec.lambda1 == 0.0) return v1_closed(x, spec.sign);
            // Vnp = V+ - 2 [ln phi]'' with [ln phi]'' = ((ln psi+)')^2 - (u'/u)^2
            const complex lp = seeds[0].log_deriv(+1, x);
            const complex r = du(0, x) / u(0, x);
            return v1_closed(x, +1) - 2.0 * real_guarded(lp * lp - r * r, "susy1 defect");
        }
        if (!spec.defect()) return v2_closed(x, +1, +1);
        const complex delta = lnW2(x, true) - lnW2(x, false);
        return v2_closed(x, +1, +1) - 2.0 * real_guarded(delta, "susy2 defect");
    }

    double reference(double x, bool left) const {
        if (is_periodic) return tilde(x);
        const auto& sgn = left ? left_sign : right_sign;
        if (spec.order == 1) return v1_closed(x, sgn[0]);
        return v2_closed(x, sgn[0], sgn[1]);
    }
};

namespace {

// sign of the component of u_i = psi+ + lambda psi- that dominates as x -> +inf
int dominant_sign_right(const BlochPair& bp, double lambda) {
    if (lambda == 0.0) return +1;
    return std::abs(bp.floquetMultiplier) > 1.0 ? +1 : -1;
}

void scan_nodeless(const std::function<double(double)>& f, double halfwidth, int n,
                   const char* what) {
    double prev = f(-halfwidth);
    for (int i = 1; i <= n; ++i) {
        const double x = -halfwidth + 2.0 * halfwidth * i / n;
        const double cur = f(x);
        if ((prev < 0.0) != (cur < 0.0)) {
            // refine the node location for the report
            double lo = x - 2.0 * halfwidth / n, hi = x, flo = prev;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi), fm = f(mid);
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            throw node_error(std::string(what) + " has a node", 0.5 * (lo + hi));
        }
        prev = cur;
    }
}

void compute_defect_window(PartnerPotential::Impl& im) {
    const double period = 2.0 * im.lat.K;
    double half = 4.0 * period;
    const double thr = im.threshold;
    const int per_period = 64;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const int n = int(2.0 * half / period * per_period);
        bool left_ok = true, right_ok = true;
        // ends must already be converged to their side references
        for (int i = 0; i <= per_period; ++i) {
            const double xl = -half + i * period / per_period;
            const double xr = half - i * period / per_period;
            if (std::abs(im.tilde(xl) - im.reference(xl, true)) >= thr) left_ok = false;
            if (std::abs(im.tilde(xr) - im.reference(xr, false)) >= thr) right_ok = false;
        }
        if (!left_ok || !right_ok) {
            half *= 2.0;
            continue;
        }
        double lo = -half, hi = half;
        for (int i = 0; i <= n; ++i) {
            const double x = -half + 2.0 * half * i / n;
            if (std::abs(im.tilde(x) - im.reference(x, true)) >= thr) break;
            lo = x;
        }
        for (int i = 0; i <= n; ++i) {
            const double x = half - 2.0 * half * i / n;
            if (std::abs(im.tilde(x) - im.reference(x, false)) >= thr) break;
            hi = x;
        }
        if (lo < hi) im.window = std::make_pair(lo, hi);
        return;
    }
    throw numeric_error("defect window: partner does not approach its periodic references "
                        "within the maximum scanned range");
}

std::shared_ptr<PartnerPotential::Impl> make_impl(const ModelParams& p, const LatticeData& lat,
                                                  const SusySpec& spec) {
    auto im = std::make_shared<PartnerPotential::Impl>(
        PartnerPotential::Impl{p, lat, spec, {}, {}, {}, 1e-6, true, {+1, +1}, {+1, +1}});
    im->seeds.push_back(bloch_pair(p, spec.eps1, lat));
    if (spec.order == 2) im->seeds.push_back(bloch_pair(p, spec.eps2, lat));
    return im;
}

} // namespace

double PartnerPotential::operator()(double x) const { return impl_->tilde(x); }
double PartnerPotential::base(double x) const { return potential(x, impl_->p); }
const SusySpec& PartnerPotential::spec() const { return impl_->spec; }
const ModelParams& PartnerPotential::params() const { return impl_->p; }
int PartnerPotential::order() const { return impl_->spec.order; }
bool PartnerPotential::periodic() const { return impl_->is_periodic; }
double PartnerPotential::period() const { return 2.0 * impl_->lat.K; }
const std::vector<double>& PartnerPotential::bound_state_energies() const {
    return impl_->bound_energies;
}
std::optional<std::pair<double, double>> PartnerPotential::defect_window() const {
    return impl_->window;
}
double PartnerPotential::defect_threshold() const { return impl_->threshold; }
double PartnerPotential::periodic_reference_left(double x) const {
    return impl_->reference(x, true);
}
double PartnerPotential::periodic_reference_right(double x) const {
    return impl_->reference(x, false);
}
complex PartnerPotential::seed(int i, double x) const { return impl_->u(i, x); }
complex PartnerPotential::seed_deriv(int i, double x) const { return impl_->du(i, x); }
const BlochPair& PartnerPotential::seed_pair(int i) const { return impl_->seeds.at(i); }

double PartnerPotential::bound_state(int j, double x) const {
    if (impl_->spec.order == 1) return (1.0 / impl_->u(0, x)).real();
    // state at eps1 is u2/W, state at eps2 is u1/W
    const complex u1 = impl_->u(0, x), u2 = impl_->u(1, x);
    const complex W = u1 * impl_->du(1, x) - impl_->du(0, x) * u2;
    return ((j == 0 ? u2 : u1) / W).real();
}

complex PartnerPotential::intertwine_apply(double x, const BlochPair& f, int fsign) const {
    const auto& im = *impl_;
    const complex fv = f.psi(fsign, x), fd = f.dpsi(fsign, x);
    if (im.spec.order == 1) return fd - im.du(0, x) / im.u(0, x) * fv;
    const complex u1 = im.u(0, x), u2 = im.u(1, x);
    const complex du1 = im.du(0, x), du2 = im.du(1, x);
    const complex W = u1 * du2 - du1 * u2;
    const double de = im.spec.eps1 - im.spec.eps2;
    const double V = potential(x, im.p);
    // B f = f'' - (ln W)' f' + [(eps1-eps2) u1' u2 / W - V + eps1] f, with
    // f'' = (V - E) f; all coefficients regular since W is nodeless
    return (V - f.E) * fv - de * u1 * u2 / W * fd + (de * du1 * u2 / W - V + im.spec.eps1) * fv;
}

// ---------------------------------------------------------------------------
// validation and constructors

SusySpec validate_spec(const SusySpec& spec, const ModelParams& p, const LatticeData& lat) {
    if (spec.order != 1 && spec.order != 2)
        throw spec_error("validate_spec: order must be 1 or 2");
    const Spectrum sp = analyze_spectrum(p, lat);
    if (spec.order == 1) {
        if (!(spec.eps1 < sp.E0())) {
            std::ostringstream os;
            os << "validate_spec: first-order factorization energy must lie strictly below "
                  "the lowest band edge E0 = "
               << sp.E0() << " (got " << spec.eps1 << ")";
            throw spec_error(os.str());
        }
        if (spec.lambda1 != 0.0) {
            // combination seed must be nodeless
            auto bp = bloch_pair(p, spec.eps1, lat);
            scan_nodeless(
                [&](double x) {
                    return (bp.psi(+1, x) + spec.lambda1 * bp.psi(-1, x)).real();
                },
                3.0 * lat.K, 6000, "first-order combination seed u");
        }
        return spec;
    }
    if (spec.eps1 == spec.eps2)
        throw spec_error("validate_spec: second-order factorization energies must differ "
                         "(confluent case not supported)");
    int g1 = -1, g2v = -1;
    const auto w1 = sp.classify(spec.eps1, &g1);
    const auto w2 = sp.classify(spec.eps2, &g2v);
    if (w1 != Spectrum::Where::Gap || w2 != Spectrum::Where::Gap) {
        std::ostringstream os;
        os << "validate_spec: second-order factorization energies must lie inside forbidden "
              "gaps; "
           << spec.eps1 << " is " << (w1 == Spectrum::Where::Gap ? "ok" : "not in a gap")
           << ", " << spec.eps2 << " is "
           << (w2 == Spectrum::Where::Gap ? "ok" : "not in a gap");
        throw spec_error(os.str());
    }
    if (g1 != g2v) {
        std::ostringstream os;
        os << "validate_spec: second-order factorization energies must share one forbidden "
              "gap ("
           << spec.eps1 << " in gap " << g1 << ", " << spec.eps2 << " in gap " << g2v << ")";
        throw spec_error(os.str());
    }
    return spec;
}

PartnerPotential susy1_periodic(const ModelParams& p, double eps, int sign,
                                const LatticeData& lat) {
    if (sign != +1 && sign != -1)
        throw spec_error("susy1_periodic: sign must be +1 or -1");
    SusySpec spec{1, eps, 0.0, sign, 0.0, 0.0};
    validate_spec(spec, p, lat);
    auto im = make_impl(p, lat, spec);
    return PartnerPotential(std::move(im));
}

PartnerPotential susy1_defect(const ModelParams& p, double eps, double lambda,
                              const LatticeData& lat) {
    SusySpec spec{1, eps, 0.0, +1, lambda, 0.0};
    validate_spec(spec, p, lat);
    auto im = make_impl(p, lat, spec);
    if (lambda != 0.0) {
        scan_nodeless([&](double x) { return im->u(0, x).real(); }, 3.0 * lat.K, 6000,
                      "first-order combination seed u");
        im->is_periodic = false;
        im->bound_energies = {eps};
        const int d = dominant_sign_right(im->seeds[0], lambda);
        im->right_sign = {d == +1 ? +1 : -1, +1};
        im->left_sign = {d == +1 ? -1 : +1, +1};
        compute_defect_window(*im);
    }
    return PartnerPotential(std::move(im));
}

PartnerPotential susy2_periodic(const ModelParams& p, double eps1, double eps2,
                                const LatticeData& lat) {
    SusySpec spec{2, eps1, eps2, +1, 0.0, 0.0};
    validate_spec(spec, p, lat);
    auto im = make_impl(p, lat, spec);
    // guaranteed nodeless for a same-gap pair, still verified
    auto W = [&](double x) {
        const complex u1 = im->seeds[0].psi(+1, x), u2 = im->seeds[1].psi(+1, x);
        return (u1 * im->seeds[1].dpsi(+1, x) - im->seeds[0].dpsi(+1, x) * u2).real();
    };
    try {
        scan_nodeless(W, 3.0 * lat.K, 6000, "second-order Wronskian W(u1,u2)");
    } catch (const node_error& e) {
        throw numeric_error(std::string("susy2_periodic: ") + e.what() +
                            " (should not happen for a validated same-gap pair)");
    }
    return PartnerPotential(std::move(im));
}

PartnerPotential susy2_defect(const ModelParams& p, double eps1, double eps2, double lambda1,
                              double lambda2, const LatticeData& lat) {
    SusySpec spec{2, eps1, eps2, +1, lambda1, lambda2};
    validate_spec(spec, p, lat);
    auto im = make_impl(p, lat, spec);
    auto W = [&](double x) {
        const complex u1 = im->u(0, x), u2 = im->u(1, x);
        return (u1 * im->du(1, x) - im->du(0, x) * u2).real();
    };
    scan_nodeless(W, 3.0 * lat.K, 6000, "second-order Wronskian W(u1,u2)");
    if (spec.defect()) {
        im->is_periodic = false;
        im->bound_energies = {eps1, eps2};
        im->right_sign = {dominant_sign_right(im->seeds[0], lambda1),
                          dominant_sign_right(im->seeds[1], lambda2)};
        im->left_sign = {lambda1 == 0.0 ? +1 : -im->right_sign[0],
                         lambda2 == 0.0 ? +1 : -im->right_sign[1]};
        compute_defect_window(*im);
    }
    return PartnerPotential(std::move(im));
}

// ---------------------------------------------------------------------------
// intertwining check

IntertwineReport intertwine_check(const PartnerPotential& partner, double testE,
                                  const LatticeData& lat) {
    const ModelParams& p = partner.params();
    for (double eps : {partner.spec().eps1, partner.spec().order == 2 ? partner.spec().eps2
                                                                      : partner.spec().eps1}) {
        if (std::abs(testE - eps) < 1e-9)
            throw spec_error("intertwine_check: testE must differ from the factorization "
                             "energies");
    }
    auto f = bloch_pair(p, testE, lat);
    const bool in_band = std::abs(hill_discriminant(p, testE, lat)) <= 2.0;

    const double K = lat.K;
    const double h = 1e-3;
    const int n = 601;
    double bmax = 0.0, rmax = 0.0;
    auto Bf = [&](double x) { return partner.intertwine_apply(x, f); };
    for (int i = 0; i < n; ++i) {
        const double x = -2.0 * K + 4.0 * K * i / (n - 1.0);
        const complex d2 = (-Bf(x - 2.0 * h) + 16.0 * Bf(x - h) - 30.0 * Bf(x) +
                            16.0 * Bf(x + h) - Bf(x + 2.0 * h)) /
                           (12.0 * h * h);
        const complex res = -d2 + (partner(x) - testE) * Bf(x);
        bmax = std::max(bmax, std::abs(Bf(x)));
        rmax = std::max(rmax, std::abs(res));
    }

    // seed annihilation with finite-difference derivatives (independent of the
    // analytic derivative path); relative to the largest cancellation scale on
    // the grid, since every term vanishes together at nodes of a seed
    double amax = 0.0, ascale = 0.0;
    const int nseeds = partner.order();
    for (int i = 0; i < nseeds; ++i) {
        for (int j = 0; j < 121; ++j) {
            const double x = -1.5 * K + 3.0 * K * j / 120.0;
            auto uf = [&](double t) { return partner.seed(i, t); };
            const complex d1 =
                (uf(x - 2 * h) - 8.0 * uf(x - h) + 8.0 * uf(x + h) - uf(x + 2 * h)) /
                (12.0 * h);
            complex A;
            double scale;
            if (partner.order() == 1) {
                const complex t2 = partner.seed_deriv(0, x);
                A = d1 - t2;
                scale = std::abs(d1) + std::abs(t2);
            } else {
                const complex d2u = (-uf(x - 2 * h) + 16.0 * uf(x - h) - 30.0 * uf(x) +
                                     16.0 * uf(x + h) - uf(x + 2 * h)) /
                                    (12.0 * h * h);
                const complex u1 = partner.seed(0, x), u2 = partner.seed(1, x);
                const complex W = u1 * partner.seed_deriv(1, x) -
                                  partner.seed_deriv(0, x) * u2;
                const double de = partner.spec().eps1 - partner.spec().eps2;
                const double V = potential(x, p);
                const complex t1 = -de * u1 * u2 / W * d1;
                const complex t0 =
                    (de * partner.seed_deriv(0, x) * u2 / W - V + partner.spec().eps1) *
                    uf(x);
                A = d2u + t1 + t0;
                scale = std::abs(d2u) + std::abs(t1) + std::abs(t0);
            }
            amax = std::max(amax, std::abs(A));
            ascale = std::max(ascale, scale);
        }
    }
    return {testE, in_band, rmax / bmax, amax / std::max(ascale, 1e-300)};
}

} // namespace alame
