#include "eme/eme_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace eme {

using cd = std::complex<double>;

std::string to_string(Flavor f) {
    switch (f) {
    case Flavor::Linear: return "linear";
    case Flavor::Kerr: return "kerr";
    case Flavor::Effective: return "effective";
    }
    return "unknown";
}

std::string to_string(Representation r) { return r == Representation::Compact ? "compact" : "number_basis"; }

Flavor parse_flavor(const std::string& s) {
    if (s == "linear") return Flavor::Linear;
    if (s == "kerr") return Flavor::Kerr;
    if (s == "effective") return Flavor::Effective;
    throw Error("unknown flavor '" + s + "' (expected linear, kerr or effective)");
}

BathSpec BathSpec::flat(double s0) {
    if (!(s0 >= 0) || !std::isfinite(s0)) throw InvalidModel("flat bath value must be finite and non-negative");
    BathSpec b;
    b.s0_ = s0;
    return b;
}

BathSpec BathSpec::tabulated(std::vector<std::pair<double, double>> points) {
    if (points.size() < 2) throw InvalidModel("tabulated bath needs at least two points");
    std::sort(points.begin(), points.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].second >= 0)) throw InvalidModel("tabulated bath values must be non-negative");
        if (i > 0 && points[i].first == points[i - 1].first)
            throw InvalidModel("tabulated bath has duplicate frequencies");
    }
    BathSpec b;
    b.points_ = std::move(points);
    return b;
}

double BathSpec::operator()(double omega) const {
    if (is_flat()) return s0_;
    if (omega < points_.front().first || omega > points_.back().first)
        throw BathRangeError("bath queried at omega = " + std::to_string(omega) + " outside tabulated range");
    auto hi = std::lower_bound(points_.begin(), points_.end(), std::make_pair(omega, -1.0));
    if (hi->first == omega) return hi->second;
    auto lo = hi - 1;
    const double t = (omega - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

nlohmann::ordered_json BathSpec::to_json() const {
    nlohmann::ordered_json j;
    if (is_flat()) {
        j["kind"] = "flat";
        j["S0"] = s0_;
    } else {
        j["kind"] = "tabulated";
        j["points"] = nlohmann::ordered_json::array();
        for (const auto& [w, s] : points_) j["points"].push_back({w, s});
    }
    return j;
}

BathSpec BathSpec::from_json(const nlohmann::ordered_json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "flat") return flat(j.at("S0").get<double>());
    if (kind == "tabulated") {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : j.at("points")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        return tabulated(std::move(pts));
    }
    throw Error("unknown bath kind '" + kind + "'");
}

namespace {

using Signature = std::vector<int>;

std::string channel_label(const Signature& sig) {
    const auto labels = default_mode_labels(sig.size());
    std::string out;
    auto factor = [&](const std::string& sym, int k) {
        if (!out.empty()) out += " ";
        out += sym;
        if (k > 1) out += "^" + std::to_string(k);
    };
    for (std::size_t i = 0; i < sig.size(); ++i)
        if (sig[i] > 0) factor(labels[i] + "\xE2\x80\xA0", sig[i]);
    for (std::size_t i = 0; i < sig.size(); ++i)
        if (sig[i] < 0) factor(labels[i], -sig[i]);
    return out;
}

int photon_count(const Signature& sig) {
    int n = 0;
    for (int s : sig) n += std::abs(s);
    return n;
}

template <class C>
std::map<Signature, PolynomialSeries<C>> group_by_signature(const PolynomialSeries<C>& s) {
    std::map<Signature, PolynomialSeries<C>> out;
    for (std::size_t k = 0; k < s.orders.size(); ++k) {
        for (const auto& [m, c] : s.orders[k].terms()) {
            auto& g = out[m.signature()];
            if (g.orders.empty()) {
                g.modes = s.modes;
                g.orders.assign(s.orders.size(), OperatorPolynomial<C>(s.modes));
            }
            g.orders[k].add(m, c);
        }
    }
    return out;
}

// First nonzero coefficient of the lowest nonzero order.
template <class C>
std::optional<C> leading_coefficient(const PolynomialSeries<C>& s) {
    for (const auto& o : s.orders)
        if (!o.is_zero()) return o.terms().begin()->second;
    return std::nullopt;
}

// Splits an operator series into frequency-resolved lowering channels sampled from the bath.
std::vector<CollapseTerm> extract_channels(const FloatSeries& series, const ExactSeries* exact,
                                           const std::vector<double>& omega, const BathSpec& bath,
                                           bool multi_photon) {
    const double wmax = *std::max_element(omega.begin(), omega.end());
    auto groups = group_by_signature(series);
    std::map<Signature, ExactSeries> exact_groups;
    if (exact) exact_groups = group_by_signature(*exact);

    std::vector<std::pair<Signature, CollapseTerm>> channels;
    for (auto& [sig, g] : groups) {
        double w = 0.0;
        for (std::size_t i = 0; i < sig.size(); ++i) w -= sig[i] * omega[i];
        if (w <= kResonanceTolerance * wmax) continue; // raising or static parts: no emission at T = 0
        if (!multi_photon && photon_count(sig) != 1) continue;

        CollapseTerm t;
        t.label = channel_label(sig);
        t.frequency = w;
        t.rate = bath(w);
        // D[.] is invariant under a global phase; make the leading coefficient positive real.
        const cd lead = leading_coefficient(g).value_or(cd(1.0));
        const cd phase = std::conj(lead) / std::abs(lead);
        for (auto& o : g.orders) o *= phase;
        t.series = g;
        if (exact) {
            auto it = exact_groups.find(sig);
            if (it != exact_groups.end()) {
                auto e = it->second;
                const auto elead = leading_coefficient(e).value_or(ExactComplex(1));
                std::optional<ExactComplex> ephase;
                if (sgn(elead.im) == 0)
                    ephase = ExactComplex(sgn(elead.re));
                else if (sgn(elead.re) == 0)
                    ephase = ExactComplex(mpq_class(0), mpq_class(-sgn(elead.im)));
                if (ephase) {
                    for (auto& o : e.orders) o *= *ephase;
                    t.exact_series = std::move(e);
                }
            }
        }
        channels.emplace_back(sig, std::move(t));
    }
    std::stable_sort(channels.begin(), channels.end(), [](const auto& x, const auto& y) {
        const int px = photon_count(x.first), py = photon_count(y.first);
        if (px != py) return px < py;
        return x.first < y.first;
    });
    std::vector<CollapseTerm> out;
    for (auto& [sig, t] : channels) out.push_back(std::move(t));
    return out;
}

void check_common(double epsilon, const BuildOptions& opts) {
    if (!(epsilon >= 0) || !(epsilon < 1)) throw InvalidModel("epsilon must lie in [0, 1)");
    if (opts.order != 1 && opts.order != 2) throw InvalidModel("generator order must be 1 or 2");
}

FloatPolynomial scaled(const ExactPolynomial& p, double s) { return to_float(p) * cd(s); }

} // namespace

EffectiveModel build_case1(double epsilon, double omega_a, const BathSpec& bath, Flavor flavor,
                           const BuildOptions& opts) {
    check_common(epsilon, opts);
    if (!(omega_a > 0)) throw InvalidModel("omega_a must be positive");
    const Flavor content = epsilon == 0.0 ? Flavor::Linear : flavor;

    EffectiveModel model;
    model.flavor = flavor;
    model.representation = Representation::Compact;
    model.epsilon = epsilon;
    model.modes = 1;
    model.mode_frequencies = {omega_a};
    model.bath = bath;
    if (epsilon > 0.3) model.warnings.push_back("epsilon above 0.3; first-order corrections may be unreliable");

    // All coefficients are exact in units of omega_a; the generator is frequency independent.
    const QuadraticSpectrum<ExactComplex> unit{{mpq_class(1)}};
    const auto X = ExactPolynomial::quadrature_x(1, 0);
    model.hamiltonian.modes = 1;
    model.hamiltonian.orders = {scaled(quadratic_hamiltonian(unit), omega_a)};

    ExactSeries coupling{1, {X}};
    if (content != Flavor::Linear) {
        const auto quartic = cosine_series_term<ExactComplex>({mpq_class(1)}, mpq_class(1), 2);
        if (content == Flavor::Kerr && opts.order == 1) {
            model.hamiltonian.orders.push_back(scaled(-split_secular(quartic).secular, omega_a));
        } else {
            auto first = solve_first_order(unit, quartic);
            model.hamiltonian.orders.push_back(scaled(first.hamiltonian.orders[1], omega_a));
            if (opts.order == 2) {
                const auto sextic = split_secular(cosine_series_term<ExactComplex>({mpq_class(1)}, mpq_class(1), 3));
                auto second = solve_generator6(unit, first.secular4, first.nonsecular4, first.generator4,
                                               sextic.nonsecular, sextic.secular);
                model.hamiltonian.orders.push_back(scaled(second.secular_correction, omega_a));
                if (content == Flavor::Effective) model.generator6 = to_float(second.generator6);
            }
            if (content == Flavor::Effective) {
                coupling = transform_series(X, first.generator4);
                model.generator4 = to_float(first.generator4);
                model.exact_generator4 = first.generator4;
            }
        }
    }
    const auto fcoupling = to_float(coupling);
    model.collapse_terms = extract_channels(fcoupling, &coupling, model.mode_frequencies, bath,
                                            opts.include_three_photon);
    return model;
}

EffectiveModel build_case1_number_basis(double epsilon, double omega_a, const BathSpec& bath, int n_levels,
                                        const BuildOptions& opts) {
    if (n_levels < 2) throw InvalidModel("number-basis model needs at least two levels");
    BuildOptions compact_opts = opts;
    compact_opts.include_three_photon = false;
    EffectiveModel model = build_case1(epsilon, omega_a, bath, Flavor::Effective, compact_opts);
    model.representation = Representation::NumberBasis;
    model.collapse_terms.clear();

    const double e = epsilon;
    for (int n = 1; n < n_levels; ++n) {
        CollapseTerm t;
        t.label = "|" + std::to_string(n - 1) + "><" + std::to_string(n) + "|";
        t.frequency = (1.0 - e * n / 4.0) * omega_a;
        const double amp = 1.0 + e * n / 8.0;
        t.rate = amp * amp * n * bath(t.frequency);
        t.transition = Transition{{n}, {n - 1}};
        model.collapse_terms.push_back(std::move(t));
    }
    if (opts.include_three_photon && e > 0) {
        for (int n = 3; n < n_levels; ++n) {
            CollapseTerm t;
            t.label = "|" + std::to_string(n - 3) + "><" + std::to_string(n) + "|";
            t.frequency = 3.0 * (1.0 - e * (n - 1) / 4.0) * omega_a;
            t.rate = (e / 48.0) * (e / 48.0) * n * (n - 1) * (n - 2) * bath(t.frequency);
            t.transition = Transition{{n}, {n - 3}};
            model.collapse_terms.push_back(std::move(t));
        }
    }
    return model;
}

BuildOptions case2_defaults() {
    BuildOptions o;
    o.include_three_photon = false;
    return o;
}

TwoModeTerms two_mode_terms(const BareModel& bare, const HybridizationResult& hyb) {
    TwoModeTerms t;
    t.spectrum.omega = {hyb.omega_a, hyb.omega_c};
    const std::vector<double> w{hyb.u_aa(), hyb.u_ac()};
    t.quartic = cosine_series_term<cd>(w, bare.omega_bar_a, 2);
    t.sextic = cosine_series_term<cd>(w, bare.omega_bar_a, 3);
    return t;
}

FloatPolynomial bare_cavity_quadrature(const HybridizationResult& hyb) {
    return FloatPolynomial::quadrature_y(2, 1) * cd(hyb.v_cc()) + FloatPolynomial::quadrature_y(2, 0) * cd(hyb.v_ca());
}

EffectiveModel build_case2(const BareModel& bare, const HybridizationResult& hyb, const BathSpec& bath,
                           Flavor flavor, const BuildOptions& opts) {
    check_common(bare.epsilon, opts);
    EffectiveModel model;
    model.warnings = validate(bare);
    const Flavor content = bare.epsilon == 0.0 ? Flavor::Linear : flavor;
    model.flavor = flavor;
    model.representation = Representation::Compact;
    model.epsilon = bare.epsilon;
    model.modes = 2;
    model.mode_frequencies = {hyb.omega_a, hyb.omega_c};
    model.bath = bath;
    model.bare = bare;
    model.hybridization = hyb;

    const auto terms = two_mode_terms(bare, hyb);
    model.hamiltonian.modes = 2;
    model.hamiltonian.orders = {quadratic_hamiltonian(terms.spectrum)};
    FloatSeries coupling{2, {bare_cavity_quadrature(hyb)}};
    if (content != Flavor::Linear) {
        if (content == Flavor::Kerr && opts.order == 1) {
            model.hamiltonian.orders.push_back(-split_secular(terms.quartic).secular);
        } else {
            auto first = solve_first_order(terms.spectrum, terms.quartic);
            model.hamiltonian.orders.push_back(first.hamiltonian.orders[1]);
            if (opts.order == 2) {
                const auto sextic = split_secular(terms.sextic);
                auto second = solve_generator6(terms.spectrum, first.secular4, first.nonsecular4, first.generator4,
                                               sextic.nonsecular, sextic.secular);
                model.hamiltonian.orders.push_back(second.secular_correction);
                if (content == Flavor::Effective) model.generator6 = second.generator6;
            }
            if (content == Flavor::Effective) {
                coupling = transform_series(coupling.orders[0], first.generator4);
                model.generator4 = first.generator4;
            }
        }
    }
    model.collapse_terms =
        extract_channels(coupling, nullptr, model.mode_frequencies, bath, opts.include_three_photon);
    return model;
}

EffectiveModel expand_to_number_basis(const EffectiveModel& model, const std::vector<int>& dims) {
    if (model.representation != Representation::Compact) throw Error("model is already in number-basis form");
    if (dims.size() != model.modes) throw ModeMismatch("dims do not match model mode count");
    EffectiveModel out = model;
    out.representation = Representation::NumberBasis;
    out.collapse_terms.clear();

    const Eigen::VectorXcd energies = to_matrix(model.effective_hamiltonian(), dims).diagonal();
    const long total = energies.size();
    std::vector<long> stride(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) stride[i - 1] = stride[i] * dims[i];
    auto levels = [&](long idx) {
        std::vector<int> l(dims.size());
        for (std::size_t i = 0; i < dims.size(); ++i) {
            l[i] = static_cast<int>(idx / stride[i]);
            idx %= stride[i];
        }
        return l;
    };
    auto ket = [](const std::vector<int>& l) {
        std::string s;
        for (std::size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
        return s;
    };
    for (const auto& term : model.collapse_terms) {
        const SparseMatrix m = to_sparse_matrix(model.collapse_operator(term), dims);
        for (int k = 0; k < m.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
                const long row = it.row(), col = it.col();
                const double w = (energies(col) - energies(row)).real();
                if (w <= 0.0 || row >= total) continue;
                CollapseTerm t;
                const auto from = levels(col), to = levels(row);
                t.label = term.label + ":|" + ket(to) + "><" + ket(from) + "|";
                t.frequency = w;
                t.rate = std::norm(it.value()) * model.bath(w);
                t.transition = Transition{from, to};
                out.collapse_terms.push_back(std::move(t));
            }
        }
    }
    return out;
}

CorrectionSigns correction_signs(const BareModel& bare, const HybridizationResult& hyb) {
    const double wa = hyb.omega_a, wc = hyb.omega_c;
    if (std::abs(wa - wc) < kResonanceTolerance * std::max(wa, wc))
        throw ResonantDenominator("omega_a - omega_c", wa - wc);
    const double e = bare.epsilon, wba = bare.omega_bar_a;
    const double uaa = hyb.u_aa(), uac = hyb.u_ac(), vca = hyb.v_ca(), vcc = hyb.v_cc();
    const double sum = uaa * uaa + uac * uac;
    CorrectionSigns r;
    r.r_a = -(e / 8.0 * wba / wa * vca * uaa * uaa + e / 2.0 * wba * wa / (wa * wa - wc * wc) * vcc * uac * uaa) * sum;
    r.r_c = -(e / 8.0 * wba / wc * vcc * uac * uac + e / 2.0 * wba * wc / (wc * wc - wa * wa) * vca * uaa * uac) * sum;
    return r;
}

namespace {

nlohmann::ordered_json series_json(const FloatSeries& s) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& o : s.orders) a.push_back(to_json(o));
    return a;
}

nlohmann::ordered_json exact_series_json(const ExactSeries& s) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& o : s.orders) a.push_back(to_json(o));
    return a;
}

template <class C>
PolynomialSeries<C> series_from_json(const nlohmann::ordered_json& j, std::size_t modes) {
    PolynomialSeries<C> s;
    s.modes = modes;
    for (const auto& o : j) s.orders.push_back(polynomial_from_json<C>(o));
    return s;
}

nlohmann::ordered_json number_form_json(const FloatPolynomial& p) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& [powers, c] : to_number_form(p)) {
        nlohmann::ordered_json t;
        t["n_powers"] = powers;
        t["coefficient"] = c.real();
        a.push_back(std::move(t));
    }
    return a;
}

} // namespace

nlohmann::ordered_json to_json(const EffectiveModel& m) {
    nlohmann::ordered_json j;
    j["flavor"] = to_string(m.flavor);
    j["representation"] = to_string(m.representation);
    j["epsilon"] = m.epsilon;
    j["modes"] = m.modes;
    j["mode_frequencies"] = m.mode_frequencies;
    j["bath"] = m.bath.to_json();
    if (m.bare) {
        j["bare"] = {{"omega_bar_a", m.bare->omega_bar_a},
                     {"omega_bar_c", m.bare->omega_bar_c},
                     {"g", m.bare->g},
                     {"epsilon", m.bare->epsilon}};
    }
    if (m.hybridization) j["hybridization"] = to_json(*m.hybridization);

    nlohmann::ordered_json ham;
    ham["number_form"] = number_form_json(m.effective_hamiltonian());
    nlohmann::ordered_json orders = nlohmann::ordered_json::array();
    for (const auto& o : m.hamiltonian.orders) orders.push_back(number_form_json(o));
    ham["orders"] = orders;
    ham["series"] = series_json(m.hamiltonian);
    j["hamiltonian"] = ham;

    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const auto& t : m.collapse_terms) {
        nlohmann::ordered_json c;
        c["label"] = t.label;
        c["rate"] = t.rate;
        c["frequency"] = t.frequency;
        if (t.transition) {
            c["transition"] = {{"from", t.transition->from}, {"to", t.transition->to}};
        } else {
            nlohmann::ordered_json op;
            op["series"] = series_json(t.series);
            if (t.exact_series) op["exact_series"] = exact_series_json(*t.exact_series);
            c["operator"] = op;
        }
        terms.push_back(std::move(c));
    }
    j["collapse_terms"] = terms;
    if (m.exact_generator4) j["generator4_exact"] = to_json(*m.exact_generator4);
    if (m.generator4) j["generator4"] = to_json(*m.generator4);
    if (m.generator6) j["generator6"] = to_json(*m.generator6);
    j["warnings"] = m.warnings;
    return j;
}

EffectiveModel model_from_json(const nlohmann::ordered_json& j) {
    EffectiveModel m;
    m.flavor = parse_flavor(j.at("flavor").get<std::string>());
    const auto rep = j.at("representation").get<std::string>();
    if (rep == "compact")
        m.representation = Representation::Compact;
    else if (rep == "number_basis")
        m.representation = Representation::NumberBasis;
    else
        throw Error("unknown representation '" + rep + "'");
    m.epsilon = j.at("epsilon").get<double>();
    m.modes = j.at("modes").get<std::size_t>();
    m.mode_frequencies = j.at("mode_frequencies").get<std::vector<double>>();
    m.bath = BathSpec::from_json(j.at("bath"));
    if (j.contains("bare")) {
        const auto& b = j.at("bare");
        m.bare = BareModel{b.at("omega_bar_a").get<double>(), b.at("omega_bar_c").get<double>(),
                           b.at("g").get<double>(), b.at("epsilon").get<double>()};
    }
    if (j.contains("hybridization")) m.hybridization = hybridization_from_json(j.at("hybridization"));
    m.hamiltonian = series_from_json<cd>(j.at("hamiltonian").at("series"), m.modes);
    for (const auto& c : j.at("collapse_terms")) {
        CollapseTerm t;
        t.label = c.at("label").get<std::string>();
        t.rate = c.at("rate").get<double>();
        t.frequency = c.at("frequency").get<double>();
        if (c.contains("transition")) {
            t.transition = Transition{c.at("transition").at("from").get<std::vector<int>>(),
                                      c.at("transition").at("to").get<std::vector<int>>()};
        } else {
            t.series = series_from_json<cd>(c.at("operator").at("series"), m.modes);
            if (c.at("operator").contains("exact_series"))
                t.exact_series = series_from_json<ExactComplex>(c.at("operator").at("exact_series"), m.modes);
        }
        if (!(t.rate >= 0)) throw InvalidModel("collapse term '" + t.label + "' has a negative rate");
        m.collapse_terms.push_back(std::move(t));
    }
    if (j.contains("generator4_exact")) m.exact_generator4 = polynomial_from_json<ExactComplex>(j.at("generator4_exact"));
    if (j.contains("generator4")) m.generator4 = polynomial_from_json<cd>(j.at("generator4"));
    if (j.contains("generator6")) m.generator6 = polynomial_from_json<cd>(j.at("generator6"));
    if (j.contains("warnings")) m.warnings = j.at("warnings").get<std::vector<std::string>>();
    return m;
}

} // namespace eme
