#include "alame/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "alame/susy.hpp"

namespace alame::verify {

namespace {

struct Collector {
    std::vector<Check>& out;
    void add(const std::string& name, double measured, double tol) {
        out.push_back({name, measured, tol, measured < tol});
    }
};

double rel(complex a, complex b) { return std::abs(a - b) / (1.0 + std::abs(a) + std::abs(b)); }

std::vector<complex> cell_points(const LatticeData& lat, int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.97, 0.97);
    const double w1 = lat.omega1.real(), w3 = lat.omega3.imag();
    std::vector<complex> pts;
    while (int(pts.size()) < n) {
        complex z(u(rng) * w1, u(rng) * w3);
        bool ok = true;
        for (double mx : {0.0, w1, -w1})
            for (double my : {0.0, w3, -w3})
                if (std::abs(z - complex(mx, my)) < 0.05 * std::min(w1, w3)) ok = false;
        if (ok) pts.push_back(z);
    }
    return pts;
}

void elliptic_suite(std::vector<Check>& out) {
    Collector c{out};
    for (double k2 : {0.05, 0.5, 0.95}) {
        auto lat = lattice_from_modulus(k2);
        const double k = std::sqrt(k2), kp = std::sqrt(1.0 - k2);
        const double K = lat.K, Kp = lat.Kprime;
        std::ostringstream tag;
        tag << " [k2=" << k2 << "]";
        auto pts = cell_points(lat, 100, 2024);

        double d_sn2 = 0, d_dn2 = 0, d_shiftK = 0, d_shift2K = 0, d_shiftiKp = 0;
        double d_wpp = 0, d_wp2 = 0, d_zq = 0, d_sq = 0, d_zadd = 0, d_sadd = 0, d_bridge = 0;
        const complex eta[3] = {complex(lat.eta1, 0.0), lat.eta1 + lat.eta3, lat.eta3};
        const complex omg[3] = {lat.omega1, lat.omega2, lat.omega3};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const complex z = pts[i];
            const complex u = lat.scale * z; // Jacobi-units argument
            const auto [sn, cn, dn] = jacobi(u, k2);
            d_sn2 = std::max(d_sn2, std::abs(sn * sn + cn * cn - 1.0) /
                                        (1.0 + std::norm(sn) + std::norm(cn)));
            d_dn2 = std::max(d_dn2, std::abs(dn * dn + k2 * sn * sn - 1.0) /
                                        (1.0 + std::norm(dn) + std::norm(sn)));
            const auto sK = jacobi(u + K, k2);
            d_shiftK = std::max({d_shiftK, rel(sK.sn, cn / dn), rel(sK.cn, -kp * sn / dn),
                                 rel(sK.dn, kp / dn)});
            const auto s2K = jacobi(u + 2.0 * K, k2);
            d_shift2K = std::max({d_shift2K, rel(s2K.sn, -sn), rel(s2K.cn, -cn), rel(s2K.dn, dn)});
            const auto sKp = jacobi(u + complex(0.0, Kp), k2);
            d_shiftiKp = std::max({d_shiftiKp, rel(sKp.sn, 1.0 / (k * sn)),
                                   rel(sKp.cn, complex(0, -1) / k * dn / sn),
                                   rel(sKp.dn, complex(0, -1) * cn / sn)});

            const complex p = wp(z, lat), pp = wp_prime(z, lat);
            d_wpp = std::max(d_wpp, rel(pp * pp, 4.0 * (p - lat.e1) * (p - lat.e2) *
                                                     (p - lat.e3)));
            // wp'' via the Jacobi route, independent of 6 wp^2 - g2/2
            const complex sn2 = sn * sn;
            const complex pp2_jac = lat.ebar3 * lat.ebar3 *
                                    (2.0 * (dn * dn + k2 * cn * cn) / sn2 +
                                     6.0 * cn * cn * dn * dn / (sn2 * sn2));
            d_wp2 = std::max(d_wp2, rel(pp2_jac, wp_second(z, lat)));
            d_bridge = std::max(d_bridge, rel(p, lat.e3 + lat.ebar3 / (sn * sn)));

            const int j = int(i % 3);
            d_zq = std::max(d_zq, std::abs(wzeta(z + 2.0 * omg[j], lat) - wzeta(z, lat) -
                                           2.0 * eta[j]));
            d_sq = std::max(d_sq, rel(wsigma(z + 2.0 * omg[j], lat),
                                      -std::exp(2.0 * eta[j] * (z + omg[j])) * wsigma(z, lat)));

            const complex y = 0.47 * pts[(i + 7) % pts.size()];
            if (std::abs(z - y) > 0.05 && std::abs(z + y) > 0.05) {
                d_zadd = std::max(d_zadd, rel(wzeta(z + y, lat),
                                              wzeta(z, lat) + wzeta(y, lat) +
                                                  0.5 * (wp_prime(z, lat) - wp_prime(y, lat)) /
                                                      (wp(z, lat) - wp(y, lat))));
                const complex sz = wsigma(z, lat), sy = wsigma(y, lat);
                d_sadd = std::max(d_sadd, rel(wsigma(z + y, lat) * wsigma(z - y, lat),
                                              -sz * sz * sy * sy * (wp(z, lat) - wp(y, lat))));
            }
        }
        c.add("sn^2+cn^2=1" + tag.str(), d_sn2, 1e-10);
        c.add("dn^2+k^2 sn^2=1" + tag.str(), d_dn2, 1e-10);
        c.add("shift +K" + tag.str(), d_shiftK, 1e-10);
        c.add("shift +2K" + tag.str(), d_shift2K, 1e-10);
        c.add("shift +iK'" + tag.str(), d_shiftiKp, 1e-10);
        c.add("wp'^2 = 4 prod(wp-e_i)" + tag.str(), d_wpp, 1e-10);
        c.add("wp'' = 6wp^2 - g2/2 (Jacobi route)" + tag.str(), d_wp2, 1e-10);
        c.add("zeta quasi-periodicity" + tag.str(), d_zq, 1e-10);
        c.add("sigma quasi-periodicity" + tag.str(), d_sq, 1e-10);
        c.add("zeta addition formula" + tag.str(), d_zadd, 1e-10);
        c.add("sigma addition formula" + tag.str(), d_sadd, 1e-10);
        c.add("bridge wp = e3 + ebar3/sn^2" + tag.str(), d_bridge, 1e-10);
    }
}

void frobenius_suite(std::vector<Check>& out) {
    Collector c{out};
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uE(-10.0, 30.0);
    const double k2s[] = {0.05, 0.25, 0.5, 0.75, 0.95};
    const std::pair<int, int> pairs[] = {{1, 1}, {2, 1}, {3, 1}, {2, 2}, {3, 2}};

    double worst_det = 0.0;
    for (auto [m, l] : pairs) {
        for (int t = 0; t < 20; ++t) {
            const double k2 = k2s[t % 5];
            auto lat = lattice_from_modulus(k2);
            ModelParams p(m, l, k2);
            const double Et = shift_energy(uE(rng), p, lat);
            const auto t1 = f_triplet(2 * l, p, Et, lat);
            const auto t2 = f_triplet(2 * l - 1, p, Et, lat);
            const double scale = std::abs(t1.f1 * det_F(2 * l, p, Et, lat)) +
                                 std::abs(t1.f0 * t2.f2 * det_F(2 * l - 1, p, Et, lat));
            worst_det = std::max(worst_det, std::abs(det_F(2 * l + 1, p, Et, lat)) /
                                                std::max(scale, 1e-30));
        }
    }
    c.add("F_{2l+1} = 0 (5 pairs, 20 energies)", worst_det, 1e-10);

    double worst_rec = 0.0;
    for (auto [m, l] : {std::pair{1, 0}, {2, 0}, {1, 1}, {2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
        auto lat = lattice_from_modulus(0.6);
        ModelParams p(m, l, 0.6);
        int done = 0;
        while (done < 5) {
            try {
                auto sol = coefficients(p, uE(rng), lat);
                worst_rec = std::max(worst_rec, recurrence_residual(sol, lat));
                ++done;
            } catch (const degenerate_energy_error&) {
            }
        }
    }
    c.add("recurrence + truncation residual", worst_rec, 1e-10);

    double worst_a = 0.0;
    {
        auto lat = lattice_from_modulus(0.95);
        ModelParams p(3, 1, 0.95);
        int done = 0;
        while (done < 10) {
            const double E = uE(rng);
            const double Et = shift_energy(E, p, lat);
            const double den = Et * Et + 15.0 * lat.e1 * Et + 25.0 * lat.ebar2 * lat.ebar3;
            if (std::abs(den) < 1e-2) continue;
            auto sol = coefficients(p, E, lat);
            const double a1 = (9.0 * lat.e1 - Et) / lat.ebar3;
            const double a2 = 6.0 * lat.ebar2 / lat.ebar3;
            const double a3 =
                -45.0 * (Et + 15.0 * lat.e1) * lat.ebar2 * lat.ebar2 / (den * lat.ebar3);
            const double a4 = 225.0 * std::pow(lat.ebar2, 3) / (den * lat.ebar3);
            worst_a = std::max({worst_a, std::abs(sol.a[1] - a1) / (1.0 + std::abs(a1)),
                                std::abs(sol.a[2] - a2) / (1.0 + std::abs(a2)),
                                std::abs(sol.a[3] - a3) / (1.0 + std::abs(a3)),
                                std::abs(sol.a[4] - a4) / (1.0 + std::abs(a4))});
            ++done;
        }
    }
    c.add("(3,1) closed-form a_1..a_4", worst_a, 1e-12);
}

void bloch_suite(std::vector<Check>& out) {
    Collector c{out};
    double worst_res = 0.0, worst_wr = 0.0, worst_mult = 0.0;
    for (auto [m, l, k2, E] :
         {std::tuple{3, 1, 0.95, 4.75}, {2, 1, 0.5, 1.7}, {1, 0, 0.5, 0.75}, {2, 2, 0.5, 2.3}}) {
        auto lat = lattice_from_modulus(k2);
        ModelParams p(m, l, k2);
        auto bp = bloch_pair(p, E, lat);
        auto rep = schrodinger_residual(bp, -2.0 * lat.K, 2.0 * lat.K, 301);
        worst_res = std::max(worst_res, rep.max_residual_rel);
        worst_wr = std::max(worst_wr, rep.wronskian_variation);
        auto mults = HillIntegrator(p, lat).monodromy(E).multipliers();
        const double dm = std::min(std::abs(mults[0] - bp.floquetMultiplier),
                                   std::abs(mults[1] - bp.floquetMultiplier)) /
                          std::abs(bp.floquetMultiplier);
        worst_mult = std::max(worst_mult, dm);
    }
    c.add("Schrodinger residual of psi+-", worst_res, 1e-6);
    c.add("Wronskian constancy", worst_wr, 1e-8);
    c.add("Floquet multiplier vs period map", worst_mult, 1e-6);

    auto be = band_edges_31(0.95);
    auto lat = lattice_from_modulus(0.95);
    HillIntegrator hill(ModelParams(3, 1, 0.95), lat);
    double worst_edge = 0.0;
    for (double e : be.edges)
        worst_edge = std::max(worst_edge, std::abs(std::abs(hill.discriminant(e)) - 2.0));
    c.add("(3,1) closed-form edges have |D| = 2", worst_edge, 1e-6);
}

void susy_suite(std::vector<Check>& out) {
    Collector c{out};
    auto lat = lattice_from_modulus(0.95);
    ModelParams p(3, 1, 0.95);

    auto fd2 = [](const std::function<double(double)>& f, double x, double h) {
        return (-f(x - 2 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) -
                f(x + 2 * h)) /
               (12.0 * h * h);
    };

    // figure 1: periodic first order
    {
        auto part = susy1_periodic(p, 4.75, +1, lat);
        auto bp = bloch_pair(p, 4.75, lat);
        double worst = 0.0, per = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double x = -2.0 * lat.K + 4.0 * lat.K * i / 40.0;
            auto lnu = [&](double t) { return std::log(bp.psi(+1, t)).real(); };
            worst = std::max(worst, std::abs(part(x) - (potential(x, p) -
                                                        2.0 * fd2(lnu, x, 1e-3))));
            per = std::max(per, std::abs(part(x + 2.0 * lat.K) - part(x)));
        }
        c.add("fig1: V+ = V - 2[ln psi+]'' (FD)", worst, 1e-7);
        c.add("fig1: periodicity 2K", per, 1e-8);
    }
    // figure 2: defect first order
    {
        auto def = susy1_defect(p, 4.75, 1.0, lat);
        double worst = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double x = -2.0 * lat.K + 4.0 * lat.K * i / 40.0;
            auto lnu = [&](double t) { return std::log(def.seed(0, t).real()); };
            worst = std::max(worst, std::abs(def(x) - (potential(x, p) -
                                                       2.0 * fd2(lnu, x, 1e-3))));
        }
        c.add("fig2: Vnp = V - 2[ln u]'' (FD)", worst, 1e-7);
        auto win = def.defect_window();
        double tail = 0.0;
        if (win) {
            for (int i = 1; i <= 12; ++i) {
                tail = std::max(tail, std::abs(def(win->first - 0.8 * i) -
                                               def.periodic_reference_left(win->first - 0.8 * i)));
                tail = std::max(tail,
                                std::abs(def(win->second + 0.8 * i) -
                                         def.periodic_reference_right(win->second + 0.8 * i)));
            }
        } else {
            tail = 1.0;
        }
        c.add("fig2: |Vnp - Vper| < 1e-6 outside window", tail, 1e-6);
        double bres = 0.0;
        for (double x : {-1.1, 0.4, 1.6}) {
            auto v = [&](double t) { return def.bound_state(0, t); };
            bres = std::max(bres, std::abs(-fd2(v, x, 1e-3) + (def(x) - 4.75) * v(x)) /
                                      std::abs(v(x)));
        }
        c.add("fig2: bound state at eps = 4.75", bres, 1e-6);
    }
    // figure 3: periodic second order
    {
        auto part = susy2_periodic(p, 9.4, 9.5, lat);
        double worst = 0.0, per = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double x = -2.0 * lat.K + 4.0 * lat.K * i / 40.0 + 0.013;
            auto lnW = [&](double t) {
                const complex W = part.seed(0, t) * part.seed_deriv(1, t) -
                                  part.seed_deriv(0, t) * part.seed(1, t);
                return std::log(std::abs(W.real()));
            };
            worst = std::max(worst, std::abs(part(x) - (potential(x, p) -
                                                        2.0 * fd2(lnW, x, 1e-3))));
            per = std::max(per, std::abs(part(x + 2.0 * lat.K) - part(x)));
        }
        c.add("fig3: Vt = V - 2[ln W]'' (FD)", worst, 1e-6);
        c.add("fig3: periodicity 2K", per, 1e-8);
    }
    // figure 4: defect second order
    {
        auto def = susy2_defect(p, 9.4, 9.5, 1.0, -2.0, lat);
        double worst = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double x = -2.0 * lat.K + 4.0 * lat.K * i / 40.0 + 0.017;
            auto lnW = [&](double t) {
                const complex W = def.seed(0, t) * def.seed_deriv(1, t) -
                                  def.seed_deriv(0, t) * def.seed(1, t);
                return std::log(std::abs(W.real()));
            };
            worst = std::max(worst, std::abs(def(x) - (potential(x, p) -
                                                       2.0 * fd2(lnW, x, 1e-3))));
        }
        c.add("fig4: Vnp = V - 2[ln W]'' (FD)", worst, 1e-6);
        auto win = def.defect_window();
        double tail = 0.0;
        if (win) {
            for (int i = 1; i <= 12; ++i) {
                tail = std::max(tail, std::abs(def(win->first - 0.8 * i) -
                                               def.periodic_reference_left(win->first - 0.8 * i)));
                tail = std::max(tail,
                                std::abs(def(win->second + 0.8 * i) -
                                         def.periodic_reference_right(win->second + 0.8 * i)));
            }
        } else {
            tail = 1.0;
        }
        c.add("fig4: |Vnp - Vt| < 1e-6 outside window", tail, 1e-6);
    }
    // intertwining
    {
        auto per1 = susy1_periodic(p, 4.75, +1, lat);
        auto rep1 = intertwine_check(per1, 12.0, lat);
        c.add("intertwine order 1, band E = 12", rep1.residual_rel, 1e-6);
        c.add("intertwine order 1, seeds annihilated", rep1.annihilation_rel, 1e-8);
        auto rep1g = intertwine_check(per1, 7.0, lat);
        c.add("intertwine order 1, gap E = 7", rep1g.residual_rel, 1e-6);
        auto per2 = susy2_periodic(p, 9.4, 9.5, lat);
        auto rep2 = intertwine_check(per2, 12.0, lat);
        c.add("intertwine order 2, band E = 12", rep2.residual_rel, 1e-5);
        c.add("intertwine order 2, seeds annihilated", rep2.annihilation_rel, 1e-8);
    }
}

} // namespace

bool Report::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Report run_suite(const std::string& suite) {
    Report rep;
    rep.suite = suite;
    if (suite == "elliptic") {
        elliptic_suite(rep.checks);
    } else if (suite == "frobenius") {
        frobenius_suite(rep.checks);
    } else if (suite == "bloch") {
        bloch_suite(rep.checks);
    } else if (suite == "susy") {
        susy_suite(rep.checks);
    } else if (suite == "all") {
        elliptic_suite(rep.checks);
        frobenius_suite(rep.checks);
        bloch_suite(rep.checks);
        susy_suite(rep.checks);
    } else {
        throw std::invalid_argument("unknown suite '" + suite +
                                    "' (expected elliptic, frobenius, bloch, susy, all)");
    }
    return rep;
}

std::string report_text(const Report& rep) {
    std::ostringstream os;
    for (const auto& ch : rep.checks) {
        os << (ch.pass ? "[PASS] " : "[FAIL] ") << ch.name << "  measured=" << ch.measured
           << "  tol=" << ch.tolerance << "\n";
    }
    std::size_t np = 0;
    for (const auto& ch : rep.checks)
        if (ch.pass) ++np;
    os << "suite '" << rep.suite << "': " << np << "/" << rep.checks.size() << " checks passed\n";
    return os.str();
}

std::string report_json(const Report& rep) {
    nlohmann::ordered_json j;
    j["suite"] = rep.suite;
    j["all_pass"] = rep.all_pass();
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& ch : rep.checks) {
        j["checks"].push_back({{"name", ch.name},
                               {"measured", ch.measured},
                               {"tolerance", ch.tolerance},
                               {"pass", ch.pass}});
    }
    return j.dump(2) + "\n";
}

} // namespace alame::verify
