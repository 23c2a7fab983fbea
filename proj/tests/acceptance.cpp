// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "alame/susy.hpp"
#include "alame/verify.hpp"

using namespace alame;

namespace {

int failures = 0;

struct Criterion {
    const char* name;
    double budget_s;
    std::function<bool(std::string&)> body;
};

template <class F>
double fd2(F&& f, double x, double h) {
    return (-f(x - 2 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2 * h)) /
           (12.0 * h * h);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

bool criterion1(std::string& detail) {
    const double k2 = 0.95;
    auto be = band_edges_31(k2);
    const double d_root = std::abs(be.cubic_roots[0] - 4.79991);
    const double d_e1 = std::abs((1.0 + 4.0 * k2) - 4.8);
    const double d_e2 = std::abs((1.0 + 9.0 * k2) - 9.55);
    auto lat = lattice_from_modulus(k2);
    auto sp = analyze_spectrum(ModelParams(3, 1, k2), lat);
    auto gap = sp.first_finite_gap();
    const bool gap_ok = gap && std::abs(gap->first - 4.8) < 1e-12 &&
                        std::abs(gap->second - 9.55) < 1e-12;
    char buf[160];
    std::snprintf(buf, sizeof buf, "E0 dev %.2e (tol 1e-4), E1/E2 dev %.1e/%.1e, gap %s",
                  d_root, d_e1, d_e2, gap_ok ? "(4.8,9.55)" : "WRONG");
    detail = buf;
    return d_root < 1e-4 && d_e1 < 1e-12 && d_e2 < 1e-12 && gap_ok;
}

bool criterion2(std::string& detail) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> uE(-10.0, 30.0);
    const double k2s[] = {0.05, 0.25, 0.5, 0.75, 0.95};
    double worst = 0.0;
    for (auto [m, l] : {std::pair{1, 1}, {2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
        for (int t = 0; t < 20; ++t) {
            const double k2 = k2s[t % 5];
            auto lat = lattice_from_modulus(k2);
            ModelParams p(m, l, k2);
            const double Et = shift_energy(uE(rng), p, lat);
            const auto f1 = f_triplet(2 * l, p, Et, lat);
            const auto f2 = f_triplet(2 * l - 1, p, Et, lat);
            const double scale = std::abs(f1.f1 * det_F(2 * l, p, Et, lat)) +
                                 std::abs(f1.f0 * f2.f2 * det_F(2 * l - 1, p, Et, lat));
            worst = std::max(worst, std::abs(det_F(2 * l + 1, p, Et, lat)) /
                                        std::max(scale, 1e-30));
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst |F_{2l+1}|/scale = %.2e (tol 1e-10)", worst);
    detail = buf;
    return worst < 1e-10;
}

bool criterion3(std::string& detail) {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> uE(-8.0, 25.0);
    auto lat = lattice_from_modulus(0.95);
    ModelParams p(3, 1, 0.95);
    double worst = 0.0;
    int done = 0;
    while (done < 10) {
        const double E = uE(rng);
        const double Et = shift_energy(E, p, lat);
        const double den = Et * Et + 15.0 * lat.e1 * Et + 25.0 * lat.ebar2 * lat.ebar3;
        if (std::abs(den) < 1e-2) continue;
        const auto sol = coefficients(p, E, lat);
        const double ref[5] = {
            1.0, (9.0 * lat.e1 - Et) / lat.ebar3, 6.0 * lat.ebar2 / lat.ebar3,
            -45.0 * (Et + 15.0 * lat.e1) * lat.ebar2 * lat.ebar2 / (den * lat.ebar3),
            225.0 * lat.ebar2 * lat.ebar2 * lat.ebar2 / (den * lat.ebar3)};
        for (int r = 1; r <= 4; ++r)
            worst = std::max(worst, std::abs(sol.a[r] - ref[r]) / std::abs(ref[r]));
        ++done;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst relative a_r deviation = %.2e (tol 1e-12)", worst);
    detail = buf;
    return worst < 1e-12;
}

// criteria 4 + 5 share their runs
bool criterion45(std::string& detail, bool check5) {
    double worst_res = 0.0, worst_mult = 0.0, worst_wr = 0.0, worst_psip = 0.0;
    for (auto [m, l] : {std::pair{1, 0}, {2, 0}, {1, 1}, {2, 1}, {3, 1}, {2, 2}}) {
        const double k2 = (m == 3) ? 0.95 : 0.5;
        auto lat = lattice_from_modulus(k2);
        ModelParams p(m, l, k2);
        HillIntegrator hill(p, lat);
        const double vmax = m * (m + 1) * k2 + l * (l + 1) * k2;
        std::vector<double> energies;
        int bands = 0, gaps = 0;
        double last_pick = -1e9;
        for (double E = 0.1; E < vmax + 12.0 && (bands < 3 || gaps < 3); E += 0.08) {
            if (E - last_pick < 0.3) continue;
            const double D = hill.discriminant(E);
            if (std::abs(D) > 2.2 && gaps < 3) {
                energies.push_back(E);
                ++gaps;
                last_pick = E;
            } else if (std::abs(D) < 1.8 && bands < 3) {
                energies.push_back(E);
                ++bands;
                last_pick = E;
            }
        }
        if (energies.size() < 5 || bands == 0 || gaps == 0) {
            char msg[120];
            std::snprintf(msg, sizeof msg,
                          "could not select 5 energies for (m,l)=(%d,%d): %d band, %d gap", m,
                          l, bands, gaps);
            detail = msg;
            return false;
        }
        for (double E : energies) {
            BlochPair bp = [&] {
                try {
                    return bloch_pair(p, E, lat);
                } catch (const degenerate_energy_error&) {
                    return bloch_pair(p, E + 0.013, lat);
                }
            }();
            const auto rep = schrodinger_residual(bp, 0.0, p.period(lat), 801);
            worst_res = std::max(worst_res, rep.max_residual_rel);
            const auto mults = hill.monodromy(bp.E).multipliers();
            const double dm = std::min(std::abs(mults[0] - bp.floquetMultiplier),
                                       std::abs(mults[1] - bp.floquetMultiplier)) /
                              std::abs(bp.floquetMultiplier);
            worst_mult = std::max(worst_mult, dm);
            if (check5) {
                const auto wrep = schrodinger_residual(bp, -4.0 * lat.K, 4.0 * lat.K, 801);
                worst_wr = std::max(worst_wr, wrep.wronskian_variation);
                for (const auto& b : bp.sol.b) {
                    const complex dPsi = product_derivs(b, bp.sol, lat).dPsi;
                    worst_psip = std::max(worst_psip, std::abs(dPsi - 1.0));
                }
            }
        }
    }
    char buf[160];
    if (check5) {
        std::snprintf(buf, sizeof buf,
                      "Wronskian variation %.2e (tol 1e-8), Psi'(b_j) spread %.2e (tol 1e-8)",
                      worst_wr, worst_psip);
        detail = buf;
        return worst_wr < 1e-8 && worst_psip < 1e-8;
    }
    std::snprintf(buf, sizeof buf,
                  "worst residual %.2e (tol 1e-6), multiplier dev %.2e (tol 1e-6)", worst_res,
                  worst_mult);
    detail = buf;
    return worst_res < 1e-6 && worst_mult < 1e-6;
}

bool criterion6(std::string& detail) {
    auto lat = lattice_from_modulus(0.95);
    ModelParams p(3, 1, 0.95);
    double worst1 = 0.0, worst2 = 0.0, worst_per = 0.0, worst_tail = 0.0;

    auto fig1 = susy1_periodic(p, 4.75, +1, lat);
    auto fig2 = susy1_defect(p, 4.75, 1.0, lat);
    auto fig3 = susy2_periodic(p, 9.4, 9.5, lat);
    auto fig4 = susy2_defect(p, 9.4, 9.5, 1.0, -2.0, lat);

    for (int i = 0; i <= 60; ++i) {
        const double x = -2.0 * lat.K + 4.0 * lat.K * i / 60.0 + 0.011;
        {
            auto bp = &fig1;
            auto lnu = [&](double t) { return std::log(std::abs(bp->seed(0, t).real())); };
            worst1 = std::max(worst1, std::abs((*bp)(x) - (potential(x, p) -
                                                           2.0 * fd2(lnu, x, 1e-3))));
        }
        {
            auto lnu = [&](double t) { return std::log(std::abs(fig2.seed(0, t).real())); };
            worst1 = std::max(worst1, std::abs(fig2(x) - (potential(x, p) -
                                                          2.0 * fd2(lnu, x, 1e-3))));
        }
        for (auto* part : {&fig3, &fig4}) {
            auto lnW = [&](double t) {
                const complex W = part->seed(0, t) * part->seed_deriv(1, t) -
                                  part->seed_deriv(0, t) * part->seed(1, t);
                return std::log(std::abs(W.real()));
            };
            worst2 = std::max(worst2, std::abs((*part)(x) - (potential(x, p) -
                                                             2.0 * fd2(lnW, x, 1e-3))));
        }
        for (auto* per : {&fig1, &fig3})
            worst_per = std::max(worst_per,
                                 std::abs((*per)(x + 2.0 * lat.K) - (*per)(x)));
    }
    for (auto* def : {&fig2, &fig4}) {
        auto w = def->defect_window();
        if (!w) return false;
        for (int i = 1; i <= 16; ++i) {
            const double xl = w->first - 0.77 * i, xr = w->second + 0.77 * i;
            worst_tail = std::max(worst_tail,
                                  std::abs((*def)(xl) - def->periodic_reference_left(xl)));
            worst_tail = std::max(worst_tail,
                                  std::abs((*def)(xr) - def->periodic_reference_right(xr)));
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "FD dev o1 %.2e (1e-7) o2 %.2e (1e-6), periodicity %.2e (1e-8), tails %.2e "
                  "(1e-6)",
                  worst1, worst2, worst_per, worst_tail);
    detail = buf;
    return worst1 < 1e-7 && worst2 < 1e-6 && worst_per < 1e-8 && worst_tail < 1e-6;
}

bool criterion7(std::string& detail) {
    auto lat = lattice_from_modulus(0.95);
    ModelParams p(3, 1, 0.95);
    auto per1 = susy1_periodic(p, 4.75, +1, lat);
    auto per2 = susy2_periodic(p, 9.4, 9.5, lat);
    const auto b1 = intertwine_check(per1, 12.0, lat); // band (checked in_band below)
    const auto g1 = intertwine_check(per1, 7.0, lat);  // inside (4.8, 9.55)
    const auto b2 = intertwine_check(per2, 12.0, lat);
    const auto g2 = intertwine_check(per2, 7.0, lat);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "o1 band/gap %.2e/%.2e (1e-6), o2 %.2e/%.2e (1e-5), annihilation %.2e "
                  "(1e-8)",
                  b1.residual_rel, g1.residual_rel, b2.residual_rel, g2.residual_rel,
                  std::max({b1.annihilation_rel, b2.annihilation_rel}));
    detail = buf;
    return b1.in_band && !g1.in_band && b1.residual_rel < 1e-6 && g1.residual_rel < 1e-6 &&
           b2.residual_rel < 1e-5 && g2.residual_rel < 1e-5 &&
           b1.annihilation_rel < 1e-8 && b2.annihilation_rel < 1e-8;
}

bool criterion8(std::string& detail) {
    auto lat = lattice_from_modulus(0.95);
    ModelParams p(3, 1, 0.95);
    auto fig2 = susy1_defect(p, 4.75, 1.0, lat);
    auto fig4 = susy2_defect(p, 9.4, 9.5, 1.0, -2.0, lat);
    double worst_tail = 0.0, worst_res = 0.0;

    struct StateCase {
        const PartnerPotential* part;
        int j;
        double eps;
    };
    const StateCase cases[] = {{&fig2, 0, 4.75}, {&fig4, 0, 9.4}, {&fig4, 1, 9.5}};
    for (const auto& sc : cases) {
        auto v = [&](double x) { return sc.part->bound_state(sc.j, x); };
        // residual under the partner potential
        double vmax = 0.0;
        for (double x : {-1.4, -0.5, 0.55, 1.3, 2.1}) vmax = std::max(vmax, std::abs(v(x)));
        for (double x : {-1.4, -0.5, 0.55, 1.3, 2.1}) {
            const double r = -fd2(v, x, 1e-3) + ((*sc.part)(x) - sc.eps) * v(x);
            worst_res = std::max(worst_res, std::abs(r) / vmax);
        }
        // tail-increment convergence of the norm integral
        auto v2 = [&](double x) {
            const double t = v(x);
            return t * t;
        };
        const auto w = sc.part->defect_window();
        double X = w ? std::max(std::abs(w->first), w->second) : 10.0;
        double total = simpson(v2, -X, X, 4000);
        const double T = sc.part->period();
        double inc = 1.0;
        for (int b = 0; b < 300; ++b) {
            inc = simpson(v2, X, X + T, 200) + simpson(v2, -X - T, -X, 200);
            X += T;
            total += inc;
            if (inc < 1e-8 * total) break;
        }
        worst_tail = std::max(worst_tail, inc / total);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "bound-state residual %.2e (tol 1e-6), tail increment %.2e (tol 1e-8)",
                  worst_res, worst_tail);
    detail = buf;
    return worst_res < 1e-6 && worst_tail < 1e-8;
}

bool criterion9(std::string& detail) {
    const auto rep = verify::run_suite("elliptic");
    double worst = 0.0;
    for (const auto& ch : rep.checks) worst = std::max(worst, ch.measured);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu identities, worst deviation %.2e (tol 1e-10)",
                  rep.checks.size(), worst);
    detail = buf;
    return rep.all_pass();
}

void run(const Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = c.body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = dt < c.budget_s;
    if (!in_budget) detail += " [OVER TIME BUDGET]";
    const bool pass = ok && in_budget;
    std::printf("[%s] %s: %s (%.2fs / %.0fs)\n", pass ? "PASS" : "FAIL", c.name,
                detail.c_str(), dt, c.budget_s);
    if (!pass) ++failures;
}

} // namespace

int main() {
    const Criterion criteria[] = {
        {"criterion 1: (3,1) band edges and first finite gap", 1.0, criterion1},
        {"criterion 2: F_{2l+1} determinant vanishing", 1.0, criterion2},
        {"criterion 3: (3,1) closed-form coefficients a_1..a_4", 1.0, criterion3},
        {"criterion 4: Bloch pair exact solvability across (m,l)", 60.0,
         [](std::string& d) { return criterion45(d, false); }},
        {"criterion 5: Wronskian constancy and Psi'(b_j) convention", 60.0,
         [](std::string& d) { return criterion45(d, true); }},
        {"criterion 6: SUSY partner correctness (figures 1-4)", 30.0, criterion6},
        {"criterion 7: spectrum transport through the intertwiner", 10.0, criterion7},
        {"criterion 8: defect bound states (figures 2 and 4)", 10.0, criterion8},
        {"criterion 9: elliptic identity suite", 5.0, criterion9},
    };
    for (const auto& c : criteria) run(c);
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", std::size(criteria));
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures;
}
