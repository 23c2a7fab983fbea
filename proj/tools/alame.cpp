// alame: exact Bloch solutions of the associated Lame equation and their
// first/second-order SUSY partner potentials, as deterministic file-producing
// subcommands (edges, solve, partner, verify).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "alame/series.hpp"
#include "alame/susy.hpp"
#include "alame/verify.hpp"

using namespace alame;

namespace {

// ---------------------------------------------------------------------------
// configuration precedence: flags > environment (LAME_*) > config file > defaults

class Settings {
public:
    void load_config(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::invalid_argument("cannot read config file '" + path + "'");
        std::string line;
        while (std::getline(is, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
            if (!key.empty()) cfg_[key] = val;
        }
    }

    std::optional<std::string> lookup(const std::string& key) const {
        std::string env = "LAME_";
        for (char ch : key) env += char(std::toupper(static_cast<unsigned char>(ch)));
        if (const char* v = std::getenv(env.c_str())) return std::string(v);
        if (auto it = cfg_.find(key); it != cfg_.end()) return it->second;
        return std::nullopt;
    }

    template <typename T>
    T resolve(const CLI::Option* opt, const T& flag_value, const std::string& key,
              const T& fallback) const {
        if (opt && opt->count() > 0) return flag_value;
        if (auto s = lookup(key)) {
            if constexpr (std::is_same_v<T, std::string>) {
                return *s;
            } else if constexpr (std::is_same_v<T, int>) {
                return std::stoi(*s);
            } else {
                return std::stod(*s);
            }
        }
        return fallback;
    }

private:
    std::map<std::string, std::string> cfg_;
};

int parse_sign(const std::string& s) {
    if (s == "+" || s == "+1" || s == "plus" || s == "1") return +1;
    if (s == "-" || s == "-1" || s == "minus") return -1;
    throw std::invalid_argument("--sign must be + or -");
}

void emit(const GridSeries& series, const std::string& format, const std::string& output,
          const std::string& plot) {
    // build every requested representation before writing anything
    std::string data;
    if (!output.empty()) {
        if (format == "csv")
            data = to_csv(series);
        else if (format == "json")
            data = to_json(series);
        else
            throw std::invalid_argument("--format must be csv or json");
    }
    std::string svg;
    if (!plot.empty()) svg = to_svg(series);
    if (!output.empty()) write_file_atomic(output, data);
    if (!plot.empty()) write_file_atomic(plot, svg);
}

struct GridArgs {
    double xmin, xmax;
    int samples;
};

// ---------------------------------------------------------------------------

int cmd_edges(int m, int ell, double k2, double emin, double emax, bool have_range,
              const std::string& format, const std::string& output) {
    auto lat = lattice_from_modulus(k2);
    ModelParams p(m, ell, k2);
    std::vector<double> edges;
    std::string method;
    if (m == 3 && ell == 1) {
        edges = band_edges_31(k2).edges;
        method = "closed-form";
    } else {
        double vmax = 0.0;
        for (int i = 0; i <= 256; ++i)
            vmax = std::max(vmax, potential(i / 256.0 * p.period(lat), p));
        const double lo = have_range ? emin : -0.5;
        const double hi = have_range ? emax : vmax + 8.0;
        edges = scan_band_edges(p, lat, lo, hi);
        method = "discriminant-scan";
        if (edges.empty()) {
            std::cerr << "warning: no band edges bracketed in the scanned range [" << lo
                      << ", " << hi << "]\n";
        }
    }

    HillIntegrator hill(p, lat);
    std::vector<std::pair<double, double>> gaps;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (std::abs(hill.discriminant(0.5 * (edges[i] + edges[i + 1]))) > 2.0)
            gaps.emplace_back(edges[i], edges[i + 1]);
    }

    std::ostringstream head;
    head << "# m=" << m << "\n# ell=" << ell << "\n# k2=" << format_number(k2)
         << "\n# method=" << method << "\n";
    for (std::size_t i = 0; i < gaps.size(); ++i)
        head << "# gap" << i + 1 << "=(" << format_number(gaps[i].first) << ","
             << format_number(gaps[i].second) << ")\n";
    if (!gaps.empty())
        head << "# first_finite_gap=(" << format_number(gaps[0].first) << ","
             << format_number(gaps[0].second) << ")\n";

    std::cout << head.str() << "index,energy\n";
    for (std::size_t i = 0; i < edges.size(); ++i)
        std::cout << i << "," << format_number(edges[i]) << "\n";

    if (!output.empty()) {
        std::string data;
        if (format == "csv") {
            data = head.str() + "index,energy\n";
            for (std::size_t i = 0; i < edges.size(); ++i)
                data += std::to_string(i) + "," + format_number(edges[i]) + "\n";
        } else if (format == "json") {
            std::ostringstream js;
            js << "{\n  \"meta\": {\"m\": " << m << ", \"ell\": " << ell
               << ", \"k2\": " << format_number(k2) << ", \"method\": \"" << method
               << "\"},\n  \"edges\": [";
            for (std::size_t i = 0; i < edges.size(); ++i)
                js << (i ? ", " : "") << format_number(edges[i]);
            js << "],\n  \"gaps\": [";
            for (std::size_t i = 0; i < gaps.size(); ++i)
                js << (i ? ", " : "") << "[" << format_number(gaps[i].first) << ", "
                   << format_number(gaps[i].second) << "]";
            js << "]\n}\n";
            data = js.str();
        } else {
            throw std::invalid_argument("--format must be csv or json");
        }
        write_file_atomic(output, data);
    }
    return 0;
}

int cmd_solve(int m, int ell, double k2, double E, GridArgs grid, const std::string& format,
              const std::string& output, const std::string& plot) {
    auto lat = lattice_from_modulus(k2);
    ModelParams p(m, ell, k2);

    std::optional<BlochPair> bp;
    try {
        bp.emplace(bloch_pair(p, E, lat));
    } catch (const degenerate_energy_error& e) {
        // name the nearest band edge in the explanation
        double nearest = 0.0;
        bool have = false;
        try {
            const auto sp = analyze_spectrum(p, lat);
            double best = 1e300;
            for (double edge : sp.edges) {
                if (std::abs(edge - E) < best) {
                    best = std::abs(edge - E);
                    nearest = edge;
                    have = true;
                }
            }
        } catch (...) {
        }
        std::ostringstream os;
        os << "energy E = " << E << " is degenerate for the Bloch construction ("
           << e.what() << ")";
        if (have) os << "; nearest band edge: " << format_number(nearest);
        throw degenerate_energy_error(os.str());
    }

    GridSeries s;
    s.xs = uniform_grid(grid.xmin, grid.xmax, grid.samples);
    std::vector<double> V(s.xs.size()), pr(s.xs.size()), pi(s.xs.size()), mr(s.xs.size()),
        mi(s.xs.size());
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        const double x = s.xs[i];
        V[i] = potential(x, p);
        const complex up = bp->psi(+1, x), um = bp->psi(-1, x);
        pr[i] = up.real();
        pi[i] = up.imag();
        mr[i] = um.real();
        mi[i] = um.imag();
    }
    const auto rep = schrodinger_residual(*bp, grid.xmin, grid.xmax, 801);

    s.add_meta("m", double(m));
    s.add_meta("ell", double(ell));
    s.add_meta("k2", k2);
    s.add_meta("energy", E);
    s.add_meta("period", bp->period);
    s.add_meta("floquet_multiplier_re", bp->floquetMultiplier.real());
    s.add_meta("floquet_multiplier_im", bp->floquetMultiplier.imag());
    s.add_meta("floquet_exponent_re", bp->floquetExponent.real());
    s.add_meta("floquet_exponent_im", bp->floquetExponent.imag());
    s.add_meta("wronskian_re", bp->wronskian.real());
    s.add_meta("wronskian_im", bp->wronskian.imag());
    s.add_meta("max_residual_rel", rep.max_residual_rel);
    s.add_meta("wronskian_variation", rep.wronskian_variation);
    s.add_column("V", std::move(V));
    s.add_column("psi_plus_re", std::move(pr));
    s.add_column("psi_plus_im", std::move(pi));
    s.add_column("psi_minus_re", std::move(mr));
    s.add_column("psi_minus_im", std::move(mi));

    std::cout << "verification: max_residual_rel=" << rep.max_residual_rel
              << " wronskian_variation=" << rep.wronskian_variation
              << " floquet_multiplier=(" << format_number(bp->floquetMultiplier.real()) << ","
              << format_number(bp->floquetMultiplier.imag()) << ")\n";
    emit(s, format, output, plot);
    return 0;
}

int cmd_partner(int m, int ell, double k2, int order, int sign, double eps1, double eps2,
                bool have_eps2, double lambda1, double lambda2, GridArgs grid,
                const std::string& format, const std::string& output,
                const std::string& plot) {
    auto lat = lattice_from_modulus(k2);
    ModelParams p(m, ell, k2);

    std::optional<PartnerPotential> part;
    if (order == 1) {
        if (lambda1 != 0.0)
            part.emplace(susy1_defect(p, eps1, lambda1, lat));
        else
            part.emplace(susy1_periodic(p, eps1, sign, lat));
    } else if (order == 2) {
        if (!have_eps2)
            throw spec_error("order 2 requires --epsilon2");
        if (lambda1 != 0.0 || lambda2 != 0.0)
            part.emplace(susy2_defect(p, eps1, eps2, lambda1, lambda2, lat));
        else
            part.emplace(susy2_periodic(p, eps1, eps2, lat));
    } else {
        throw spec_error("--order must be 1 or 2");
    }

    GridSeries s;
    s.xs = uniform_grid(grid.xmin, grid.xmax, grid.samples);
    std::vector<double> V(s.xs.size()), Vt(s.xs.size());
    std::vector<double> Vl, Vr;
    const bool defect = !part->periodic();
    if (defect) {
        Vl.resize(s.xs.size());
        Vr.resize(s.xs.size());
    }
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        const double x = s.xs[i];
        V[i] = part->base(x);
        Vt[i] = (*part)(x);
        if (defect) {
            Vl[i] = part->periodic_reference_left(x);
            Vr[i] = part->periodic_reference_right(x);
        }
    }

    s.add_meta("m", double(m));
    s.add_meta("ell", double(ell));
    s.add_meta("k2", k2);
    s.add_meta("order", double(order));
    s.add_meta("epsilon1", eps1);
    if (order == 2) s.add_meta("epsilon2", eps2);
    if (order == 1 && lambda1 == 0.0) s.add_meta("sign", sign > 0 ? "+" : "-");
    if (lambda1 != 0.0 || order == 2) s.add_meta("lambda1", lambda1);
    if (order == 2) s.add_meta("lambda2", lambda2);
    s.add_meta("periodic", part->periodic() ? "true" : "false");
    s.add_meta("period", part->period());
    if (auto w = part->defect_window()) {
        s.add_meta("defect_window_lo", w->first);
        s.add_meta("defect_window_hi", w->second);
        s.add_meta("defect_threshold", part->defect_threshold());
    }
    {
        std::string bs;
        for (double e : part->bound_state_energies())
            bs += (bs.empty() ? "" : ";") + format_number(e);
        if (!bs.empty()) s.add_meta("bound_states", bs);
    }
    s.add_column("V", std::move(V));
    s.add_column("V_partner", std::move(Vt));
    if (defect) {
        s.add_column("V_periodic_left", std::move(Vl));
        s.add_column("V_periodic_right", std::move(Vr));
    }

    std::cout << "partner: order=" << order << " periodic=" << (part->periodic() ? "yes" : "no");
    if (auto w = part->defect_window())
        std::cout << " defect_window=[" << format_number(w->first) << ","
                  << format_number(w->second) << "]";
    if (!part->bound_state_energies().empty()) {
        std::cout << " bound_states=";
        for (double e : part->bound_state_energies()) std::cout << format_number(e) << " ";
    }
    std::cout << "\n";
    emit(s, format, output, plot);
    return 0;
}

int cmd_verify(const std::string& suite, const std::string& output) {
    const auto rep = verify::run_suite(suite);
    std::cout << verify::report_text(rep);
    if (!output.empty()) write_file_atomic(output, verify::report_json(rep));
    return rep.all_pass() ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"associated Lame equation: Bloch solutions, band edges, and SUSY partner "
                 "potentials"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "plain-text key=value configuration file");

    // shared option storage; resolution order: flags > LAME_* env > config > defaults
    int m = 1, ell = 0, order = 1, samples = 2001;
    double k2 = 0.5, energy = 0.0, eps1 = 0.0, eps2 = 0.0, lambda1 = 0.0, lambda2 = 0.0;
    double xmin = 0.0, xmax = 0.0, emin = 0.0, emax = 0.0;
    std::string sign = "+", format = "csv", output, plot, suite = "all";

    auto add_common = [&](CLI::App* sub, bool with_grid) {
        sub->fallthrough(); // allow the global --config after the subcommand
        sub->add_option("--m", m, "first potential parameter (integer)");
        sub->add_option("--ell", ell, "second potential parameter (integer)");
        sub->add_option("--k2", k2, "elliptic modulus parameter in (0,1)");
        sub->add_option("--format", format, "output format: csv or json");
        sub->add_option("--output", output, "output file path");
        if (with_grid) {
            sub->add_option("--xmin", xmin, "grid start (default -4K)");
            sub->add_option("--xmax", xmax, "grid end (default 4K)");
            sub->add_option("--samples", samples, "grid samples (default 2001)");
            sub->add_option("--plot", plot, "write a minimal SVG line plot to this path");
        }
    };

    auto* edges = app.add_subcommand("edges", "band edges and gap intervals");
    add_common(edges, false);
    edges->add_option("--emin", emin, "scan range start (non-(3,1) potentials)");
    edges->add_option("--emax", emax, "scan range end");

    auto* solve = app.add_subcommand("solve", "Bloch pair at a given energy");
    add_common(solve, true);
    solve->add_option("--energy", energy, "energy E");

    auto* partner = app.add_subcommand("partner", "SUSY partner potential");
    add_common(partner, true);
    partner->add_option("--order", order, "transformation order: 1 or 2");
    partner->add_option("--sign", sign, "Bloch seed sign for order 1: + or -");
    partner->add_option("--epsilon1", eps1, "first factorization energy");
    partner->add_option("--epsilon2", eps2, "second factorization energy (order 2)");
    partner->add_option("--lambda1", lambda1, "combination weight of psi1- (0: pure Bloch)");
    partner->add_option("--lambda2", lambda2, "combination weight of psi2- (0: pure Bloch)");

    auto* verify_cmd = app.add_subcommand("verify", "run the numerical verification suites");
    verify_cmd->fallthrough();
    verify_cmd->add_option("--suite", suite, "elliptic, frobenius, bloch, susy, or all");
    verify_cmd->add_option("--output", output, "write the JSON report to this path");

    try {
        app.parse(argc, argv);

        Settings st;
        if (app.count("--config") > 0) st.load_config(config_path);
        auto R = [&](CLI::App* sub, const char* name, auto& var) {
            var = st.resolve(sub->count(name) ? sub->get_option(name) : nullptr, var,
                             std::string(name).substr(2), var);
        };
        // resolve env/config fallbacks for options that were not passed as flags
        for (CLI::App* sub : {edges, solve, partner}) {
            if (!sub->parsed()) continue;
            R(sub, "--m", m);
            R(sub, "--ell", ell);
            R(sub, "--k2", k2);
            R(sub, "--format", format);
            R(sub, "--output", output);
        }
        if (solve->parsed()) R(solve, "--energy", energy);
        if (partner->parsed()) {
            R(partner, "--order", order);
            R(partner, "--sign", sign);
            R(partner, "--epsilon1", eps1);
            R(partner, "--epsilon2", eps2);
            R(partner, "--lambda1", lambda1);
            R(partner, "--lambda2", lambda2);
        }
        for (CLI::App* sub : {solve, partner}) {
            if (!sub->parsed()) continue;
            R(sub, "--xmin", xmin);
            R(sub, "--xmax", xmax);
            R(sub, "--samples", samples);
            R(sub, "--plot", plot);
        }
        if (verify_cmd->parsed()) {
            R(verify_cmd, "--suite", suite);
            R(verify_cmd, "--output", output);
        }

        if (solve->parsed() || partner->parsed()) {
            const double K = complete_K(k2);
            GridArgs grid{xmin, xmax, samples};
            const bool have_xmin =
                (solve->parsed() ? solve : partner)->count("--xmin") > 0 ||
                st.lookup("xmin").has_value();
            const bool have_xmax =
                (solve->parsed() ? solve : partner)->count("--xmax") > 0 ||
                st.lookup("xmax").has_value();
            if (!have_xmin) grid.xmin = -4.0 * K;
            if (!have_xmax) grid.xmax = 4.0 * K;
            if (solve->parsed())
                return cmd_solve(m, ell, k2, energy, grid, format, output, plot);
            const bool have_eps2 =
                partner->count("--epsilon2") > 0 || st.lookup("epsilon2").has_value();
            return cmd_partner(m, ell, k2, order, parse_sign(sign), eps1, eps2, have_eps2,
                               lambda1, lambda2, grid, format, output, plot);
        }
        if (edges->parsed()) {
            const bool have_range =
                (edges->count("--emin") > 0 || st.lookup("emin").has_value()) &&
                (edges->count("--emax") > 0 || st.lookup("emax").has_value());
            if (edges->count("--emin") == 0 && st.lookup("emin"))
                emin = std::stod(*st.lookup("emin"));
            if (edges->count("--emax") == 0 && st.lookup("emax"))
                emax = std::stod(*st.lookup("emax"));
            return cmd_edges(m, ell, k2, emin, emax, have_range, format, output);
        }
        return cmd_verify(suite, output);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const spec_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const node_error& e) {
        std::cerr << "error: " << e.what() << " (location x = " << e.location << ")\n";
        return 2;
    } catch (const degenerate_energy_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pole_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
}
