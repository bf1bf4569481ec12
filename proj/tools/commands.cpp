#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#ifndef EME_VERSION
#define EME_VERSION "0.0.0"
#endif

namespace eme::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using cd = std::complex<double>;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::vector<Flavor> flavors_for(const std::string& flavor) {
    if (flavor == "all") return {Flavor::Linear, Flavor::Kerr, Flavor::Effective};
    try {
        return {parse_flavor(flavor)};
    } catch (const Error&) {
        throw ConfigError("--flavor: expected linear, kerr, effective or all, got '" + flavor + "'");
    }
}

EffectiveModel build_configured(const AppConfig& cfg, Flavor flavor, unsigned order) {
    if (cfg.model.kind == ModelCase::Case1 && cfg.model.representation == Representation::NumberBasis &&
        flavor == Flavor::Effective)
        return build_case1_number_basis(cfg.model.epsilon, cfg.model.omega_a, cfg.bath, cfg.model.levels,
                                        cfg.build_options(order));
    return build_model(cfg.model_params(order), flavor);
}

namespace {

// ---- output plumbing ----

struct Run {
    std::string command;
    const CliOptions& opts;
    AppConfig cfg;
    fs::path out;
    std::vector<std::string> outputs;
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::string started_utc;

    Run(std::string cmd, const CliOptions& o, AppConfig c) : command(std::move(cmd)), opts(o), cfg(std::move(c)) {
        out = opts.out;
        fs::create_directories(out);
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        started_utc = buf;
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path p = out / name;
        std::ofstream f(p, std::ios::binary);
        f << content;
        f.close();
        if (!f) throw Error("failed to write " + p.string());
        outputs.push_back(p.string());
    }

    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    json parameters() const {
        json p = cfg.resolved();
        p["cli"] = {{"flavor", opts.flavor}, {"order", opts.order}, {"seed", opts.seed}};
        return p;
    }

    // Manifest goes last and marks completion.
    int finish(std::ostream& log) {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json m;
        m["command"] = command;
        m["config"] = cfg.path;
        m["config_hash"] = blob_hash(cfg.text);
        m["tool_version"] = EME_VERSION;
        m["parameters"] = parameters();
        m["outputs"] = outputs;
        m["started_utc"] = started_utc;
        m["wall_clock_seconds"] = wall;
        m["status"] = violations.empty() ? "ok" : "violations";
        m["violations"] = violations;
        m["warnings"] = warnings;
        const fs::path p = out / "manifest.json";
        std::ofstream f(p, std::ios::binary);
        f << m.dump(2) << "\n";
        f.close();
        if (!f) throw Error("failed to write " + p.string());
        for (const auto& v : violations) log << "violation: " << v << "\n";
        for (const auto& o : outputs) log << "wrote " << o << "\n";
        log << "wrote " << p.string() << "\n";
        return violations.empty() ? kExitOk : kExitViolation;
    }
};

AppConfig load(const CliOptions& opts) {
    if (opts.config.empty()) throw ConfigError("--config is required");
    if (opts.order != 1 && opts.order != 2) throw ConfigError("--order: expected 1 or 2");
    return load_config(opts.config);
}

// ---- verify helpers ----

using ExactPoly = ExactPolynomial;

json exact_json(const ExactComplex& c) {
    if (sgn(c.im) == 0) return rational_string(c.re);
    return to_string(c);
}

json complex_json(cd c) { return json::array({c.real(), c.imag()}); }

VerifyRow exact_row(std::string name, const ExactComplex& expected, const ExactComplex& got) {
    return {std::move(name), exact_json(expected), exact_json(got), expected == got};
}

VerifyRow count_row(std::string name, long expected, long got) {
    return {std::move(name), expected, got, expected == got};
}

VerifyRow float_row(std::string name, cd expected, cd got, double tol) {
    return {std::move(name), complex_json(expected), complex_json(got), std::abs(expected - got) <= tol};
}

Monomial mono1(unsigned m, unsigned n) { return Monomial(std::vector<ExponentPair>{{m, n}}); }
Monomial mono2(unsigned ma, unsigned na, unsigned mc, unsigned nc) {
    return Monomial(std::vector<ExponentPair>{{ma, na}, {mc, nc}});
}

ExactComplex q(long p, long d = 1) { return ExactComplex(mpq_class(p, d)); }

void single_mode_rows(std::vector<VerifyRow>& rows) {
    const QuadraticSpectrum<ExactComplex> unit{{mpq_class(1)}};
    const auto X = ExactPoly::quadrature_x(1, 0);
    const auto quartic = power(X, 4);
    const auto split = split_secular(quartic);

    const auto s4 = to_number_form(split.secular);
    auto nf = [&](unsigned k) {
        const auto it = s4.find({k});
        return it == s4.end() ? ExactComplex() : it->second;
    };
    rows.push_back(exact_row("S4 n^2", q(6), nf(2)));
    rows.push_back(exact_row("S4 n", q(6), nf(1)));
    rows.push_back(exact_row("S4 1", q(3), nf(0)));
    rows.push_back(count_row("S4 number-form terms", 3, static_cast<long>(s4.size())));

    const auto first = solve_first_order(unit, cosine_series_term<ExactComplex>({mpq_class(1)}, mpq_class(1), 2));
    const auto& g4 = first.generator4;
    rows.push_back(exact_row("G4 a†^4", q(1, 192), g4.coefficient(mono1(4, 0))));
    rows.push_back(exact_row("G4 a^4", q(-1, 192), g4.coefficient(mono1(0, 4))));
    rows.push_back(exact_row("G4 a†^3 a", q(1, 24), g4.coefficient(mono1(3, 1))));
    rows.push_back(exact_row("G4 a† a^3", q(-1, 24), g4.coefficient(mono1(1, 3))));
    rows.push_back(exact_row("G4 a†^2", q(1, 16), g4.coefficient(mono1(2, 0))));
    rows.push_back(exact_row("G4 a^2", q(-1, 16), g4.coefficient(mono1(0, 2))));
    rows.push_back(count_row("G4 terms", 6, static_cast<long>(g4.size())));
    rows.push_back({"G4 anti-Hermitian", true, dagger(g4) == -g4, dagger(g4) == -g4});

    const auto xg = commutator(X, g4);
    rows.push_back(exact_row("[X,G4] a", q(1, 8), xg.coefficient(mono1(0, 1))));
    rows.push_back(exact_row("[X,G4] a†", q(1, 8), xg.coefficient(mono1(1, 0))));
    rows.push_back(exact_row("[X,G4] a† a^2", q(1, 8), xg.coefficient(mono1(1, 2))));
    rows.push_back(exact_row("[X,G4] a†^2 a", q(1, 8), xg.coefficient(mono1(2, 1))));
    rows.push_back(exact_row("[X,G4] a^3", q(-1, 48), xg.coefficient(mono1(0, 3))));
    rows.push_back(exact_row("[X,G4] a†^3", q(-1, 48), xg.coefficient(mono1(3, 0))));
    rows.push_back(count_row("[X,G4] terms", 6, static_cast<long>(xg.size())));

    const auto res4 = commutator(quadratic_hamiltonian(unit), g4) - first.nonsecular4;
    rows.push_back(count_row("single-mode [H2,G4] - N4 terms", 0, static_cast<long>(res4.size())));

    const auto sextic = split_secular(cosine_series_term<ExactComplex>({mpq_class(1)}, mpq_class(1), 3));
    const auto second =
        solve_generator6(unit, first.secular4, first.nonsecular4, g4, sextic.nonsecular, sextic.secular);
    const auto res6 = generator6_residual(unit, first.secular4, first.nonsecular4, g4, sextic.nonsecular,
                                          second.generator6);
    rows.push_back(count_row("single-mode G6 residual terms", 0, static_cast<long>(res6.size())));
    const auto h2 = to_number_form(second.secular_correction);
    const auto it = h2.find({2});
    rows.push_back(exact_row("H_eff eps^2 n^2", q(-3, 128), it == h2.end() ? ExactComplex() : it->second));
}

void two_mode_exact_rows(std::vector<VerifyRow>& rows, std::mt19937_64& rng) {
    const auto census = count_word_expansion<ExactComplex>({q(2, 3), q(3, 5)}, 4);
    rows.push_back(count_row("two-mode quartic words", 256, static_cast<long>(census.total)));
    rows.push_back(count_row("two-mode quartic secular words", 36, static_cast<long>(census.secular)));
    rows.push_back(count_row("two-mode quartic non-secular words", 220, static_cast<long>(census.nonsecular)));

    std::uniform_int_distribution<long> num(20, 400), den(7, 97);
    auto rational = [&] {
        mpq_class r(num(rng), den(rng));
        r.canonicalize();
        return r;
    };
    int solved = 0, failed = 0;
    while (solved < 50) {
        const QuadraticSpectrum<ExactComplex> spec{{rational(), rational()}};
        const auto quartic = cosine_series_term<ExactComplex>({rational(), rational()}, rational(), 2);
        try {
            const auto first = solve_first_order(spec, quartic);
            const auto res = commutator(quadratic_hamiltonian(spec), first.generator4) - first.nonsecular4;
            if (!res.is_zero()) ++failed;
            ++solved;
        } catch (const ResonantDenominator&) {
        }
    }
    rows.push_back(count_row("two-mode [H2,G4] - N4 nonzero over 50 exact pairs", 0, failed));
}

struct ClosedFormRow {
    Monomial mono;
    cd coefficient;
};

// Closed forms of the [Y_a, G4] rows; the c.c. rows conjugate the coefficient and swap exponents.
std::vector<ClosedFormRow> ya_closed_forms(double uaa, double uac, double oa, double oc, double wb) {
    const cd I(0.0, 1.0);
    const double s = uaa * uaa + uac * uac;
    const double dpm = wb / (oa + oc) - wb / (oa - oc);
    const std::vector<ClosedFormRow> base{
        {mono2(0, 1, 0, 0), I / 8.0 * wb / oa * uaa * uaa * s},
        {mono2(1, 2, 0, 0), I / 8.0 * wb / oa * std::pow(uaa, 4)},
        {mono2(0, 3, 0, 0), I / 16.0 * wb / oa * std::pow(uaa, 4)},
        {mono2(0, 0, 0, 1), I / 4.0 * dpm * uaa * uac * s},
        {mono2(0, 0, 1, 2), I / 4.0 * dpm * uaa * std::pow(uac, 3)},
        {mono2(0, 0, 0, 3), I / 12.0 * (wb / (oa + 3 * oc) - wb / (oa - 3 * oc)) * uaa * std::pow(uac, 3)},
        {mono2(0, 1, 1, 1), I / 4.0 * wb / oa * uaa * uaa * uac * uac},
        {mono2(1, 1, 0, 1), I / 2.0 * dpm * std::pow(uaa, 3) * uac},
        {mono2(0, 1, 0, 2), I / 8.0 * (wb / (oc + oa) + wb / oc) * uaa * uaa * uac * uac},
        {mono2(0, 1, 2, 0), I / 8.0 * (wb / (oa - oc) - wb / oc) * uac * uac * uaa * uaa},
        {mono2(0, 2, 0, 1), I / 4.0 * (wb / (oc + 3 * oa) + wb / (oc + oa)) * uac * std::pow(uaa, 3)},
        {mono2(2, 0, 0, 1), I / 4.0 * (wb / (oc - oa) + wb / (oc - 3 * oa)) * uac * std::pow(uaa, 3)},
    };
    std::vector<ClosedFormRow> rows;
    for (const auto& r : base) {
        rows.push_back(r);
        rows.push_back({r.mono.dagger(), std::conj(r.coefficient)});
    }
    return rows;
}

Monomial swap_modes(const Monomial& m) { return Monomial(std::vector<ExponentPair>{m[1], m[0]}); }

bool non_resonant(const HybridizationResult& h) {
    const double a = h.omega_a, c = h.omega_c, top = std::max(a, c);
    return std::abs(a - c) > 0.05 * top && std::abs(a - 3 * c) > 0.05 * top && std::abs(c - 3 * a) > 0.05 * top;
}

void two_mode_closed_form_rows(std::vector<VerifyRow>& rows, int samples, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ratio(0.5, 1.5), coupling(0.02, 0.3);
    for (int k = 0; k < samples;) {
        BareModel bare{ratio(rng), 1.0, coupling(rng), 0.2};
        HybridizationResult h;
        try {
            h = hybridize(bare);
        } catch (const ModeCollapse&) {
            continue;
        }
        if (!non_resonant(h)) continue;
        ++k;
        const auto terms = two_mode_terms(bare, h);
        const auto g4 = solve_generator4(terms.spectrum, split_secular(terms.quartic).nonsecular);
        const std::string tag = "sample[" + std::to_string(k) + "] ";
        const auto labels = default_mode_labels(2);

        const auto ya = commutator(FloatPolynomial::quadrature_y(2, 0), g4);
        const auto forms_a = ya_closed_forms(h.u_aa(), h.u_ac(), h.omega_a, h.omega_c, bare.omega_bar_a);
        for (const auto& r : forms_a)
            rows.push_back(float_row(tag + "[Y_a,G4] " + r.mono.to_string(labels), r.coefficient,
                                     ya.coefficient(r.mono), 1e-12));
        rows.push_back(count_row(tag + "[Y_a,G4] terms", static_cast<long>(forms_a.size()),
                                 static_cast<long>(ya.size())));

        // Cavity-like quadrature: u_aa <-> u_ac, omega_a <-> omega_c, a <-> c.
        const auto yc = commutator(FloatPolynomial::quadrature_y(2, 1), g4);
        const auto forms_c = ya_closed_forms(h.u_ac(), h.u_aa(), h.omega_c, h.omega_a, bare.omega_bar_a);
        for (const auto& r : forms_c) {
            const auto m = swap_modes(r.mono);
            rows.push_back(float_row(tag + "[Y_c,G4] " + m.to_string(labels), r.coefficient, yc.coefficient(m), 1e-12));
        }
        rows.push_back(count_row(tag + "[Y_c,G4] terms", static_cast<long>(forms_c.size()),
                                 static_cast<long>(yc.size())));
    }
}

std::string sign_char(double x) { return x > 0 ? "+" : (x < 0 ? "-" : "0"); }

void sign_rows(std::vector<VerifyRow>& rows) {
    struct Case {
        double omega_bar_a;
        std::vector<std::pair<std::string, std::string>> expected;
    };
    const std::vector<Case> cases{
        {0.8, {{"u_aa", "+"}, {"u_ac", "+"}, {"u_ca", "-"}, {"u_cc", "+"}, {"v_aa", "+"}, {"v_ac", "+"},
               {"v_ca", "-"}, {"v_cc", "+"}, {"r_a", "+"}, {"r_c", "+"}}},
        {1.25, {{"u_aa", "+"}, {"u_ac", "-"}, {"u_ca", "+"}, {"u_cc", "+"}, {"v_aa", "+"}, {"v_ac", "-"},
                {"v_ca", "+"}, {"v_cc", "+"}, {"r_a", "+"}, {"r_c", "-"}}},
    };
    for (const auto& cs : cases) {
        const double gmax = 0.5 * std::sqrt(cs.omega_bar_a);
        std::map<std::string, std::set<std::string>> seen;
        for (int k = 1; k <= 20; ++k) {
            const BareModel bare{cs.omega_bar_a, 1.0, 0.98 * gmax * k / 20.0, 0.2};
            const auto h = hybridize(bare);
            const auto r = correction_signs(bare, h);
            const std::map<std::string, double> vals{{"u_aa", h.u_aa()}, {"u_ac", h.u_ac()}, {"u_ca", h.u_ca()},
                                                     {"u_cc", h.u_cc()}, {"v_aa", h.v_aa()}, {"v_ac", h.v_ac()},
                                                     {"v_ca", h.v_ca()}, {"v_cc", h.v_cc()}, {"r_a", r.r_a},
                                                     {"r_c", r.r_c}};
            for (const auto& [name, v] : vals) seen[name].insert(sign_char(v));
        }
        std::ostringstream ratio;
        ratio << "signs omega_bar_a/omega_bar_c=" << cs.omega_bar_a << " ";
        for (const auto& [name, want] : cs.expected) {
            std::string got;
            for (const auto& s : seen[name]) got += s;
            rows.push_back({ratio.str() + name, want, got, got == want});
        }
    }
}

void hybridization_rows(std::vector<VerifyRow>& rows) {
    const BareModel bare{0.8, 1.0, 0.27, 0.2};
    const auto h = hybridize(bare);
    auto near = [&](std::string name, double want, double got, double tol) {
        rows.push_back({std::move(name), want, got, std::abs(want - got) <= tol});
    };
    near("hybridization omega_a", 0.55, h.omega_a, 0.01);
    near("hybridization omega_c", 1.15, h.omega_c, 0.01);
    near("hybridization |u_aa|", 0.69, std::abs(h.u_aa()), 0.01);
    near("hybridization |u_ac|", 0.69, std::abs(h.u_ac()), 0.01);
    near("hybridization |v_cc|", 0.76, std::abs(h.v_cc()), 0.01);
    near("hybridization |v_ca|", 0.76, std::abs(h.v_ca()), 0.01);
    near("hybridization u v^T - 1", 0.0, symplectic_residual(h), 1e-12);
    near("hybridization quadratic form", 0.0, quadratic_form_residual(bare, h), 1e-12);
}

void eom_rows(std::vector<VerifyRow>& rows, std::mt19937_64& rng) {
    std::vector<Eigen::MatrixXcd> samples;
    for (int k = 0; k < 20; ++k) samples.push_back(random_density_matrix(12, 8, rng));
    const auto check = quadrature_eom_check(0.2, 1.0, 0.04, FockTruncation{{12}}, samples);
    rows.push_back({"quadrature EOM residual", 0.0, check.max_residual, check.max_residual <= 1e-9});
}

// ---- sweep ----

std::string csv_join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
    return line + "\n";
}

} // namespace

std::vector<VerifyRow> verify_rows(const AppConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<VerifyRow> rows;
    single_mode_rows(rows);
    two_mode_exact_rows(rows, rng);
    two_mode_closed_form_rows(rows, cfg.verify.samples, rng);
    sign_rows(rows);
    hybridization_rows(rows);
    eom_rows(rows, rng);
    return rows;
}

std::vector<SweepRow> sweep_rows(const SweepSection& s) {
    std::vector<SweepRow> rows(static_cast<std::size_t>(s.steps));
    for (int k = 0; k < s.steps; ++k)
        rows[k].g = s.steps == 1 ? s.g_min : s.g_min + (s.g_max - s.g_min) * k / (s.steps - 1);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) {
            auto& row = rows[k];
            const BareModel bare{s.detuning_ratio, 1.0, row.g, s.epsilon};
            try {
                row.hyb = hybridize(bare);
                row.signs = correction_signs(bare, row.hyb);
            } catch (const ModeCollapse&) {
                row.status = "mode_collapse";
            } catch (const ResonantDenominator&) {
                row.status = "resonant";
            } catch (const InvalidModel&) {
                row.status = "invalid";
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), rows.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = csv_join({"g", "status", "omega_a", "omega_c", "theta", "u_aa", "u_ac", "u_ca", "u_cc", "v_aa",
                                "v_ac", "v_ca", "v_cc", "r_a", "r_c"});
    for (const auto& r : rows) {
        std::vector<std::string> cells{format_double(r.g), r.status};
        const auto& h = r.hyb;
        const std::vector<double> vals{h.omega_a, h.omega_c, h.theta,  h.u_aa(), h.u_ac(),   h.u_ca(),  h.u_cc(),
                                       h.v_aa(),  h.v_ac(),  h.v_ca(), h.v_cc(), r.signs.r_a, r.signs.r_c};
        for (double v : vals) cells.push_back(r.status == "ok" ? format_double(v) : "");
        out += csv_join(cells);
    }
    return out;
}

int run_derive(const CliOptions& opts, std::ostream& log) {
    const auto flavors = flavors_for(opts.flavor);
    Run run("derive", opts, load(opts));
    for (Flavor f : flavors) {
        const auto model = build_configured(run.cfg, f, opts.order);
        for (const auto& w : model.warnings)
            if (std::find(run.warnings.begin(), run.warnings.end(), w) == run.warnings.end()) run.warnings.push_back(w);
        run.write_json("model_" + to_string(f) + ".json", to_json(model));
    }
    return run.finish(log);
}

int run_simulate(const CliOptions& opts, std::ostream& log) {
    Run run("simulate", opts, load(opts));
    const auto& cfg = run.cfg;
    const SimulationConfig base = cfg.simulation_config();

    std::vector<EffectiveModel> models;
    if (!cfg.model_file.empty()) {
        fs::path p = cfg.model_file;
        if (p.is_relative()) p = fs::path(cfg.path).parent_path() / p;
        std::ifstream in(p);
        if (!in) throw ConfigError(cfg.path + ": key 'model_file': cannot open " + p.string());
        models.push_back(model_from_json(json::parse(in)));
    } else {
        for (Flavor f : flavors_for(opts.flavor)) models.push_back(build_configured(cfg, f, opts.order));
    }

    const std::size_t modes = models.front().modes;
    const FockTruncation trunc = cfg.truncation();
    trunc.validate(modes);
    SimulationConfig sim = base;
    for (const auto& o : cfg.simulation->observables) sim.observables.push_back(parse_observable(o, modes));

    std::vector<std::future<TimeSeries>> jobs;
    for (const auto& m : models)
        jobs.push_back(std::async(std::launch::async, [&m, &trunc, &sim] { return evolve(m, trunc, sim); }));
    std::vector<TimeSeries> series;
    for (auto& j : jobs) series.push_back(j.get());

    std::vector<std::string> header{"t"};
    std::vector<const std::vector<double>*> cols;
    json meta;
    meta["parameters"] = run.parameters();
    meta["config_hash"] = blob_hash(cfg.text);
    json diag = json::object();
    for (std::size_t k = 0; k < models.size(); ++k) {
        const auto name = to_string(models[k].flavor);
        const auto& s = series[k];
        if (s.times.size() != series.front().times.size()) throw Error("flavor series are not aligned in time");
        for (std::size_t c = 0; c < s.columns.size(); ++c) {
            header.push_back(name + ":" + s.columns[c]);
            cols.push_back(&s.values[c]);
        }
        const auto& d = s.diagnostics;
        diag[name] = {{"dt", d.dt},
                      {"steps", d.steps},
                      {"frame_transform", d.frame_transform},
                      {"max_trace_drift", d.max_trace_drift},
                      {"max_hermiticity_drift", d.max_hermiticity_drift},
                      {"min_eigenvalue", d.min_eigenvalue},
                      {"positivity_warnings", d.positivity_warnings},
                      {"max_top_population", d.max_top_population}};
        if (d.max_trace_drift > 1e-7)
            run.violations.push_back(name + ": trace drift " + format_double(d.max_trace_drift) + " above 1e-7");
        if (d.max_hermiticity_drift > 1e-10)
            run.violations.push_back(name + ": hermiticity drift " + format_double(d.max_hermiticity_drift) +
                                     " above 1e-10");
        if (d.positivity_warnings > 0)
            run.warnings.push_back(name + ": " + std::to_string(d.positivity_warnings) +
                                   " records with eigenvalues below the positivity floor");
        for (const auto& w : models[k].warnings) run.warnings.push_back(name + ": " + w);
    }
    meta["diagnostics"] = diag;

    std::string csv = csv_join(header);
    const auto& times = series.front().times;
    for (std::size_t r = 0; r < times.size(); ++r) {
        std::vector<std::string> cells{format_double(times[r])};
        for (const auto* c : cols) cells.push_back(format_double((*c)[r]));
        csv += csv_join(cells);
    }
    run.write("simulate.csv", csv);
    run.write_json("simulate.meta.json", meta);
    return run.finish(log);
}

int run_verify(const CliOptions& opts, std::ostream& log) {
    Run run("verify", opts, load(opts));
    const auto rows = verify_rows(run.cfg, opts.seed);
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"row", r.row}, {"expected", r.expected}, {"got", r.got}, {"match", r.match}});
        if (!r.match) run.violations.push_back("verify mismatch: " + r.row);
    }
    run.write_json("verify.json", out);
    log << rows.size() << " rows, " << run.violations.size() << " mismatches\n";
    return run.finish(log);
}

int run_sweep(const CliOptions& opts, std::ostream& log) {
    Run run("sweep", opts, load(opts));
    const SweepSection s = run.cfg.sweep.value_or(SweepSection{});
    const auto rows = sweep_rows(s);
    for (const auto& r : rows) {
        if (r.status != "ok") {
            run.warnings.push_back("g=" + format_double(r.g) + ": " + r.status);
            continue;
        }
        const auto& h = r.hyb;
        for (double v : {h.omega_a, h.omega_c, h.u_aa(), h.u_ac(), h.v_ca(), h.v_cc(), r.signs.r_a, r.signs.r_c})
            if (!std::isfinite(v)) {
                run.violations.push_back("non-finite value in row g=" + format_double(r.g));
                break;
            }
    }
    run.write("sweep.csv", sweep_csv(rows));
    return run.finish(log);
}

} // namespace eme::app
