// Command-line surface: JSON in, JSON out.  Exit codes: 0 success, 1
// verification failure (residual above tolerance or formula/exact coefficient
// mismatch, itemized under "discrepancies"), 2 input error.

#include <CLI11.hpp>
#include <json.hpp>

#include "siegel/cusps.hpp"
#include "siegel/eisen.hpp"
#include "siegel/gauss.hpp"
#include "siegel/localforms.hpp"
#include "siegel/symplectic.hpp"
#include "siegel/theta.hpp"

#include <complex>
#include <fstream>
#include <iostream>

using json = nlohmann::json;
using namespace siegel;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    return j;
}

SymIntMat read_sym(const std::string& path) {
    try {
        return symmat_from_json(read_json_file(path));
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

json int_json(const Int& v) {
    if (v.fits_slong_p()) return v.get_si();
    return v.get_str();
}

json rat_json(const Rat& r) {
    return json::array({int_json(r.get_num()), int_json(r.get_den())});
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json profile_json(const CuspRep& rep) {
    json out = json::array();
    for (auto& p : rep.profile) {
        json jp;
        jp["q"] = int_json(p.q);
        jp["e"] = p.e;
        jp["d"] = p.d;
        jp["local"] = to_json(p.local);
        out.push_back(jp);
    }
    return out;
}

json exact_json(const ExactCoeff& c) {
    json out;
    out["complex"] = complex_json(c.embed());
    if (c.is_rational()) out["rational"] = rat_json(c.rational());
    return out;
}

std::complex<double> parse_tau(std::string s) {
    std::erase(s, ' ');
    if (s.empty()) throw InputError("empty tau");
    auto num = [](const std::string& t) -> double {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) throw InputError("bad number in tau: " + t);
        return v;
    };
    try {
        if (s.back() != 'i') return {num(s), 0.0};
        s.pop_back();
        // Split at the last top-level +/- (not a leading sign, not after e/E).
        size_t split = std::string::npos;
        for (size_t p = 1; p < s.size(); ++p)
            if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E')
                split = p;
        if (split == std::string::npos) return {0.0, num(s)};
        return {num(s.substr(0, split)), num(s.substr(split))};
    } catch (const InputError&) {
        throw;
    } catch (const std::exception&) {
        throw InputError("cannot parse tau");
    }
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact cusp, Gauss-sum, and theta/Eisenstein decomposition toolkit"};
    app.require_subcommand(1);

    std::string q_file, j_file, m_file, mm_file;
    long opt_n = 1, opt_level = 1, opt_e = 0, opt_h = 1, opt_bound = 20;
    long opt_radius = 4000;
    std::string opt_q = "2";
    bool flag_dedupe = false, flag_brute = false, flag_closed = false;
    bool have_m = false, have_level = false;
    std::vector<std::string> opt_taus;

    auto* c_level = app.add_subcommand("level", "Level of an even integral form");
    c_level->add_option("Q", q_file, "Gram matrix JSON")->required();

    auto* c_jordan = app.add_subcommand("jordan", "q-adic Jordan splitting");
    c_jordan->add_option("--q", opt_q, "prime")->required();
    c_jordan->add_option("--e", opt_e, "exponent")->required();
    c_jordan->add_option("Q", q_file, "Gram matrix JSON")->required();

    auto* c_cusps = app.add_subcommand("cusps", "Reduced cusp representatives");
    c_cusps->add_option("--n", opt_n, "degree")->required();
    c_cusps->add_option("--level", opt_level, "level N")->required();
    c_cusps->add_flag("--dedupe", flag_dedupe, "collapse oracle-equivalent entries");

    auto* c_reduce = app.add_subcommand("reduce", "Reduce gamma_M with witnesses");
    c_reduce->add_option("--n", opt_n, "degree")->required();
    c_reduce->add_option("--level", opt_level, "level N")->required();
    c_reduce->add_option("M", m_file, "symmetric M JSON")->required();

    auto* c_oracle = app.add_subcommand("cusp-oracle", "Brute-force double cosets");
    c_oracle->add_option("--n", opt_n, "degree")->required();
    c_oracle->add_option("--level", opt_level, "level N")->required();

    auto* c_gauss = app.add_subcommand("gauss", "Generalized Gauss sum");
    c_gauss->set_help_flag("--help", "print help"); // frees -h for the exponent
    c_gauss->add_option("--q", opt_q, "prime")->required();
    c_gauss->add_option("--h", opt_h, "exponent")->required();
    c_gauss->add_flag("--brute", flag_brute, "brute-force summation");
    c_gauss->add_flag("--closed", flag_closed, "closed form (default)");
    c_gauss->add_option("J", j_file, "J matrix JSON")->required();
    c_gauss->add_option("M", m_file, "M matrix JSON")->required();

    auto* c_coeffs = app.add_subcommand("coeffs", "Coefficient table a(L, M)");
    c_coeffs->add_option("Q", q_file, "Gram matrix JSON")->required();
    c_coeffs->add_option("--n", opt_n, "degree")->required();
    c_coeffs->add_option("--level", opt_level, "level N")->required();

    auto* c_theta = app.add_subcommand("theta", "Theta series coefficients");
    c_theta->add_option("Q", q_file, "Gram matrix JSON")->required();
    c_theta->add_option("--n", opt_n, "degree")->required();
    c_theta->add_option("--bound", opt_bound, "trace bound")->required();

    auto* c_verify = app.add_subcommand("verify", "Verification reports");
    c_verify->require_subcommand(1);
    auto* c_p51 = c_verify->add_subcommand("prop51", "Cusp limits vs coefficients");
    c_p51->add_option("Q", q_file, "Gram matrix JSON")->required();
    c_p51->add_option("--n", opt_n, "degree")->required();
    c_p51->add_option("--level", opt_level, "level N (must match Q)")
        ->each([&](const std::string&) { have_level = true; });
    c_p51->add_option("--M", mm_file, "single M JSON")
        ->each([&](const std::string&) { have_m = true; });
    auto* c_t11 = c_verify->add_subcommand("thm11", "Degree-1 decomposition");
    c_t11->add_option("Q", q_file, "Gram matrix JSON")->required();
    c_t11->add_option("--tau", opt_taus, "sample point(s) \"x+yi\"");
    c_t11->add_option("--radius", opt_radius, "Eisenstein truncation radius");
    c_t11->add_option("--bound", opt_bound, "theta trace bound")->default_val(60);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_level) {
            json out;
            out["level"] = int_json(level(read_sym(q_file)));
            emit(out);
        } else if (*c_jordan) {
            auto sp = jordan_split(read_sym(q_file), Int(opt_q), opt_e);
            json out;
            out["blocks"] = json::array();
            for (auto& b : sp.blocks)
                out["blocks"].push_back({{"scale", b.scale}, {"J", to_json(b.J)}});
            out["witness"] = to_json(sp.G);
            emit(out);
        } else if (*c_cusps) {
            auto reps = enumerate_reduced(int(opt_n), opt_level);
            if (flag_dedupe) reps = dedupe_reduced(reps);
            json out = json::array();
            for (auto& r : reps)
                out.push_back({{"M", to_json(r.M)},
                               {"profile", profile_json(r)},
                               {"partial", r.partial}});
            emit(out);
        } else if (*c_reduce) {
            auto red = reduce_cusp(read_sym(m_file), int(opt_n), opt_level);
            json out;
            out["M"] = to_json(red.rep.M);
            out["profile"] = profile_json(red.rep);
            out["witnesses"] = {{"G", to_json(red.G)}, {"beta", to_json(red.beta)}};
            emit(out);
        } else if (*c_oracle) {
            SpOracle oracle(int(opt_n), opt_level);
            json out;
            out["group_order"] = oracle.group_order();
            out["double_cosets"] = oracle.double_coset_count();
            out["orbit_reps"] = json::array();
            for (auto& g : oracle.orbit_reps()) out["orbit_reps"].push_back(to_json(g));
            emit(out);
        } else if (*c_gauss) {
            auto J = read_sym(j_file), M = read_sym(m_file);
            json out;
            if (flag_brute) {
                auto b = gauss_sum_brute(J, M, Int(opt_q), opt_h);
                out["complex"] = complex_json(b.value);
            } else {
                auto v = gauss_sum_reduce(J, M, Int(opt_q), opt_h);
                out["value"] = to_json(v);
                out["complex"] = complex_json(v.embed());
            }
            emit(out);
        } else if (*c_coeffs) {
            auto Q = read_sym(q_file);
            if (level(Q) != opt_level)
                throw InputError("--level does not match the level of Q");
            json out, table = json::array(), disc = json::array();
            out["kappa"] = rat_json(kappa(opt_level));
            for (auto& rep : enumerate_reduced(int(opt_n), opt_level)) {
                auto f = a_total_formula(Q, rep);
                auto ex = a_total_exact(Q, rep.M, opt_level);
                bool agree = std::abs(f.embed() - ex.embed()) <= 1e-9;
                table.push_back({{"M", to_json(rep.M)},
                                 {"a_formula", to_json(f)},
                                 {"a_exact", exact_json(ex)},
                                 {"agree", agree}});
                if (!agree)
                    disc.push_back({{"M", to_json(rep.M)},
                                    {"a_formula", to_json(f)},
                                    {"a_exact", exact_json(ex)}});
            }
            out["table"] = table;
            out["discrepancies"] = disc;
            emit(out);
            return disc.empty() ? 0 : 1;
        } else if (*c_theta) {
            auto ts = theta_coeffs(read_sym(q_file), int(opt_n), opt_bound);
            json out, cj = json::array();
            for (auto& [T, cnt] : ts.coeffs) {
                IMat t(ts.n, ts.n);
                for (int i = 0; i < ts.n; ++i)
                    for (int j = 0; j < ts.n; ++j) t.at(i, j) = T[size_t(i) * ts.n + j];
                cj.push_back({{"T", to_json(t)}, {"count", int_json(cnt)}});
            }
            out["coeffs"] = cj;
            emit(out);
        } else if (*c_p51) {
            auto Q = read_sym(q_file);
            Int N = level(Q);
            if (have_level && N != opt_level)
                throw InputError("--level does not match the level of Q");
            std::vector<SymIntMat> Ms;
            if (have_m)
                Ms.push_back(read_sym(mm_file));
            else
                for (auto& rep : enumerate_reduced(int(opt_n), N)) Ms.push_back(rep.M);
            json out, rows = json::array(), disc = json::array();
            double worst = 0;
            for (auto& M : Ms) {
                auto nmr = theta_cusp_limit_numeric(Q, M, int(opt_n), 20.0);
                auto ex = theta_cusp_limit_exact(Q, M, int(opt_n));
                double res = std::abs(nmr - ex.embed());
                worst = std::max(worst, res);
                rows.push_back({{"M", to_json(M)},
                                {"numeric", complex_json(nmr)},
                                {"exact", exact_json(ex)},
                                {"residual", res}});
                if (res > 1e-6)
                    disc.push_back({{"M", to_json(M)}, {"residual", res}});
            }
            out["rows"] = rows;
            out["max_residual"] = worst;
            out["discrepancies"] = disc;
            emit(out);
            return disc.empty() ? 0 : 1;
        } else if (*c_t11) {
            auto Q = read_sym(q_file);
            std::vector<std::complex<double>> taus;
            for (auto& s : opt_taus) taus.push_back(parse_tau(s));
            if (taus.empty()) taus = {{0.0, 1.0}, {0.1, 0.8}, {-0.3, 1.2}};
            for (auto t : taus)
                if (t.imag() <= 0) throw InputError("tau must have positive imaginary part");
            auto rep = verify_theorem_n1(Q, taus, opt_radius, opt_bound);
            json out, ct = json::array(), samples = json::array(), disc = json::array();
            out["N"] = int_json(rep.N);
            out["k"] = rep.k;
            out["kappa"] = rat_json(kappa(rep.N));
            for (auto& c : rep.coeffs) {
                ct.push_back({{"M", to_json(c.M)},
                              {"a_formula", to_json(c.formula)},
                              {"a_exact", exact_json(c.exact)},
                              {"agree", c.agree}});
                if (!c.agree)
                    disc.push_back({{"kind", "formula/exact coefficient mismatch"},
                                    {"M", to_json(c.M)},
                                    {"a_formula", to_json(c.formula)},
                                    {"a_exact", exact_json(c.exact)}});
            }
            for (auto& s : rep.samples) {
                samples.push_back({{"tau", complex_json(s.tau)},
                                   {"lhs", complex_json(s.lhs)},
                                   {"rhs", complex_json(s.rhs)},
                                   {"residual", s.residual}});
                if (s.residual > 1e-3)
                    disc.push_back({{"kind", "sample residual above tolerance"},
                                    {"tau", complex_json(s.tau)},
                                    {"residual", s.residual}});
            }
            out["coeff_table"] = ct;
            out["samples"] = samples;
            out["max_residual"] = rep.max_residual;
            out["discrepancies"] = disc;
            emit(out);
            return disc.empty() ? 0 : 1;
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
