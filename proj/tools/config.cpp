#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

namespace eme::app {

namespace {

using cd = std::complex<double>;

std::string where(const std::string& source, const YAML::Mark& mark, const std::string& key) {
    std::ostringstream os;
    os << source;
    if (mark.line >= 0) os << ":" << mark.line + 1 << ":" << mark.column + 1;
    os << ": key '" << key << "'";
    return os.str();
}

struct Ctx {
    std::string source;

    [[noreturn]] void fail(const YAML::Node& n, const std::string& key, const std::string& msg) const {
        YAML::Mark mark = YAML::Mark::null_mark();
        try {
            mark = n.Mark();
        } catch (const YAML::Exception&) {
        }
        throw ConfigError(where(source, mark, key) + ": " + msg);
    }

    void check_keys(const YAML::Node& n, const std::string& section, const std::set<std::string>& allowed) const {
        if (!n.IsMap()) fail(n, section, "expected a mapping");
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, section.empty() ? key : section + "." + key, "unknown key");
        }
    }

    template <class T>
    T as(const YAML::Node& n, const std::string& key) const {
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, key, "value has the wrong type");
        }
    }

    template <class T>
    void read(const YAML::Node& parent, const std::string& section, const std::string& key, T& out) const {
        if (const auto n = parent[key]) out = as<T>(n, section + "." + key);
    }

    template <class T>
    void read(const YAML::Node& parent, const std::string& section, const std::string& key,
              std::optional<T>& out) const {
        if (const auto n = parent[key]) out = as<T>(n, section + "." + key);
    }

    cd amplitude(const YAML::Node& n, const std::string& key) const {
        if (n.IsSequence()) {
            if (n.size() != 2) fail(n, key, "complex amplitude must be [re, im]");
            return {as<double>(n[0], key), as<double>(n[1], key)};
        }
        return {as<double>(n, key), 0.0};
    }
};

ModelSection parse_model(const Ctx& c, const YAML::Node& n) {
    c.check_keys(n, "model",
                 {"case", "units", "epsilon", "omega_a", "omega_bar_a", "omega_bar_c", "g", "representation",
                  "levels", "include_three_photon"});
    ModelSection m;
    if (const auto k = n["case"]) {
        const auto s = c.as<std::string>(k, "model.case");
        if (s == "case1" || s == "1")
            m.kind = ModelCase::Case1;
        else if (s == "case2" || s == "2")
            m.kind = ModelCase::Case2;
        else
            c.fail(k, "model.case", "expected case1 or case2, got '" + s + "'");
    }
    c.read(n, "model", "units", m.units);
    if (m.units != "omega_bar_c" && m.units != "absolute")
        c.fail(n["units"], "model.units", "expected omega_bar_c or absolute");
    c.read(n, "model", "epsilon", m.epsilon);
    c.read(n, "model", "omega_a", m.omega_a);
    m.bare.omega_bar_a = 0.8;
    m.bare.omega_bar_c = 1.0;
    c.read(n, "model", "omega_bar_a", m.bare.omega_bar_a);
    c.read(n, "model", "omega_bar_c", m.bare.omega_bar_c);
    c.read(n, "model", "g", m.bare.g);
    m.bare.epsilon = m.epsilon;
    if (m.units == "omega_bar_c" && m.bare.omega_bar_c != 1.0)
        c.fail(n["omega_bar_c"], "model.omega_bar_c", "must be 1 when units is omega_bar_c");
    if (const auto r = n["representation"]) {
        const auto s = c.as<std::string>(r, "model.representation");
        if (s == "compact")
            m.representation = Representation::Compact;
        else if (s == "number_basis")
            m.representation = Representation::NumberBasis;
        else
            c.fail(r, "model.representation", "expected compact or number_basis");
    }
    c.read(n, "model", "levels", m.levels);
    c.read(n, "model", "include_three_photon", m.include_three_photon);
    if (!(m.epsilon >= 0) || !(m.epsilon < 1)) c.fail(n["epsilon"], "model.epsilon", "must lie in [0, 1)");
    if (m.kind == ModelCase::Case1 && !(m.omega_a > 0)) c.fail(n["omega_a"], "model.omega_a", "must be positive");
    if (m.levels < 2) c.fail(n["levels"], "model.levels", "must be at least 2");
    if (m.kind == ModelCase::Case2 && m.representation == Representation::NumberBasis)
        c.fail(n["representation"], "model.representation", "number_basis is only available for case1");
    return m;
}

BathSpec parse_bath(const Ctx& c, const YAML::Node& n) {
    c.check_keys(n, "bath", {"kind", "S0", "kappa", "points"});
    std::string kind = "flat";
    c.read(n, "bath", "kind", kind);
    if (kind == "flat") {
        if (n["S0"] && n["kappa"]) c.fail(n["kappa"], "bath.kappa", "give either S0 or kappa, not both");
        if (n["points"]) c.fail(n["points"], "bath.points", "only valid for a tabulated bath");
        double s0 = 0.0;
        c.read(n, "bath", "S0", s0);
        if (const auto k = n["kappa"]) s0 = 2.0 * c.as<double>(k, "bath.kappa");
        if (!(s0 >= 0)) c.fail(n, "bath.S0", "must be non-negative");
        return BathSpec::flat(s0);
    }
    if (kind == "tabulated") {
        const auto pts = n["points"];
        if (!pts || !pts.IsSequence()) c.fail(n, "bath.points", "tabulated bath needs a list of [omega, S] pairs");
        std::vector<std::pair<double, double>> points;
        for (const auto& p : pts) {
            if (!p.IsSequence() || p.size() != 2) c.fail(p, "bath.points", "each point must be [omega, S]");
            points.emplace_back(c.as<double>(p[0], "bath.points"), c.as<double>(p[1], "bath.points"));
        }
        try {
            return BathSpec::tabulated(std::move(points));
        } catch (const Error& e) {
            c.fail(pts, "bath.points", e.what());
        }
    }
    c.fail(n["kind"], "bath.kind", "expected flat or tabulated, got '" + kind + "'");
}

InitialState parse_initial(const Ctx& c, const YAML::Node& n) {
    c.check_keys(n, "simulation.initial_state", {"kind", "terms", "modes"});
    std::string kind = "vacuum";
    c.read(n, "simulation.initial_state", "kind", kind);
    if (kind == "vacuum") return InitialState::vacuum();
    if (kind == "fock") {
        const auto terms = n["terms"];
        if (!terms || !terms.IsSequence() || terms.size() == 0)
            c.fail(n, "simulation.initial_state.terms", "fock state needs a non-empty list of terms");
        std::vector<std::pair<std::vector<int>, cd>> out;
        for (const auto& t : terms) {
            c.check_keys(t, "simulation.initial_state.terms", {"levels", "amplitude"});
            if (!t["levels"]) c.fail(t, "simulation.initial_state.terms.levels", "missing");
            auto levels = c.as<std::vector<int>>(t["levels"], "simulation.initial_state.terms.levels");
            cd amp{1.0, 0.0};
            if (const auto a = t["amplitude"]) amp = c.amplitude(a, "simulation.initial_state.terms.amplitude");
            out.emplace_back(std::move(levels), amp);
        }
        return InitialState::fock_superposition(std::move(out));
    }
    if (kind == "product") {
        const auto modes = n["modes"];
        if (!modes || !modes.IsSequence())
            c.fail(n, "simulation.initial_state.modes", "product state needs per-mode amplitude lists");
        std::vector<std::vector<cd>> out;
        for (const auto& m : modes) {
            if (!m.IsSequence()) c.fail(m, "simulation.initial_state.modes", "expected a list of amplitudes");
            std::vector<cd> amps;
            for (const auto& a : m) amps.push_back(c.amplitude(a, "simulation.initial_state.modes"));
            out.push_back(std::move(amps));
        }
        return InitialState::product_state(std::move(out));
    }
    c.fail(n["kind"], "simulation.initial_state.kind", "expected vacuum, fock or product");
}

SimulationSection parse_simulation(const Ctx& c, const YAML::Node& n) {
    c.check_keys(n, "simulation",
                 {"t_final", "dt", "record_every", "dims", "observables", "frame_transform",
                  "positivity_check_every", "initial_state"});
    SimulationSection s;
    c.read(n, "simulation", "t_final", s.t_final);
    c.read(n, "simulation", "dt", s.dt);
    c.read(n, "simulation", "record_every", s.record_every);
    c.read(n, "simulation", "dims", s.dims);
    c.read(n, "simulation", "observables", s.observables);
    c.read(n, "simulation", "frame_transform", s.frame_transform);
    c.read(n, "simulation", "positivity_check_every", s.positivity_check_every);
    if (const auto i = n["initial_state"]) s.initial = parse_initial(c, i);
    if (!(s.t_final > 0)) c.fail(n["t_final"], "simulation.t_final", "must be positive");
    if (s.dt < 0) c.fail(n["dt"], "simulation.dt", "must be positive (or 0 for the default)");
    if (s.dt > 0 && s.t_final < s.dt) c.fail(n["t_final"], "simulation.t_final", "must be at least dt");
    if (s.record_every < 1) c.fail(n["record_every"], "simulation.record_every", "must be at least 1");
    return s;
}

SweepSection parse_sweep(const Ctx& c, const YAML::Node& n) {
    c.check_keys(n, "sweep", {"detuning_ratio", "g_min", "g_max", "steps", "epsilon"});
    SweepSection s;
    c.read(n, "sweep", "detuning_ratio", s.detuning_ratio);
    c.read(n, "sweep", "g_min", s.g_min);
    c.read(n, "sweep", "g_max", s.g_max);
    c.read(n, "sweep", "steps", s.steps);
    c.read(n, "sweep", "epsilon", s.epsilon);
    if (!(s.detuning_ratio > 0)) c.fail(n["detuning_ratio"], "sweep.detuning_ratio", "must be positive");
    if (s.steps < 1) c.fail(n["steps"], "sweep.steps", "must be at least 1");
    if (s.g_max < s.g_min) c.fail(n["g_max"], "sweep.g_max", "must not be below g_min");
    return s;
}

} // namespace

AppConfig parse_config(const std::string& text, const std::string& source) {
    const Ctx c{source};
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": " + e.msg);
    }
    AppConfig cfg;
    cfg.path = source;
    cfg.text = text;
    if (root.IsNull()) return cfg;
    c.check_keys(root, "", {"model", "bath", "simulation", "sweep", "verify", "model_file"});
    if (const auto m = root["model"]) cfg.model = parse_model(c, m);
    if (const auto b = root["bath"]) cfg.bath = parse_bath(c, b);
    if (const auto s = root["simulation"]) cfg.simulation = parse_simulation(c, s);
    if (const auto s = root["sweep"]) cfg.sweep = parse_sweep(c, s);
    if (const auto v = root["verify"]) {
        c.check_keys(v, "verify", {"samples"});
        c.read(v, "verify", "samples", cfg.verify.samples);
        if (cfg.verify.samples < 1) c.fail(v["samples"], "verify.samples", "must be at least 1");
    }
    if (const auto f = root["model_file"]) cfg.model_file = c.as<std::string>(f, "model_file");

    if (cfg.simulation) {
        auto& s = *cfg.simulation;
        const auto node = root["simulation"];
        if (s.dims.empty()) s.dims.assign(cfg.modes(), 8);
        if (s.dims.size() != cfg.modes() && cfg.model_file.empty())
            c.fail(node["dims"], "simulation.dims", "expected one dimension per mode");
        if (s.observables.empty()) {
            s.observables.emplace_back("n_a");
            if (cfg.modes() == 2) s.observables.emplace_back("n_c");
        }
        if (cfg.model_file.empty()) {
            for (const auto& o : s.observables) {
                try {
                    parse_observable(o, cfg.modes());
                } catch (const Error& e) {
                    c.fail(node["observables"], "simulation.observables", e.what());
                }
            }
        }
    }
    return cfg;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str(), path);
}

BuildOptions AppConfig::build_options(unsigned order) const {
    BuildOptions o = model.kind == ModelCase::Case1 ? BuildOptions{} : case2_defaults();
    o.order = order;
    if (model.include_three_photon) o.include_three_photon = *model.include_three_photon;
    return o;
}

ModelParams AppConfig::model_params(unsigned order) const {
    if (model.kind == ModelCase::Case1) return Case1Params{model.epsilon, model.omega_a, bath, build_options(order)};
    return Case2Params{model.bare, bath, build_options(order)};
}

FockTruncation AppConfig::truncation() const {
    FockTruncation t;
    t.dims = simulation ? simulation->dims : std::vector<int>(modes(), 8);
    return t;
}

SimulationConfig AppConfig::simulation_config() const {
    if (!simulation) throw ConfigError(path + ": key 'simulation': section is required for this command");
    const auto& s = *simulation;
    SimulationConfig cfg;
    cfg.t_final = s.t_final;
    cfg.dt = s.dt;
    cfg.record_every = s.record_every;
    cfg.initial = s.initial;
    cfg.apply_frame_transform = s.frame_transform;
    cfg.positivity_check_every = s.positivity_check_every;
    return cfg;
}

nlohmann::ordered_json AppConfig::resolved() const {
    nlohmann::ordered_json j;
    j["model"]["case"] = model.kind == ModelCase::Case1 ? "case1" : "case2";
    j["model"]["units"] = model.units;
    j["model"]["epsilon"] = model.epsilon;
    if (model.kind == ModelCase::Case1) {
        j["model"]["omega_a"] = model.omega_a;
        j["model"]["representation"] = to_string(model.representation);
        j["model"]["levels"] = model.levels;
    } else {
        j["model"]["omega_bar_a"] = model.bare.omega_bar_a;
        j["model"]["omega_bar_c"] = model.bare.omega_bar_c;
        j["model"]["g"] = model.bare.g;
    }
    if (model.include_three_photon) j["model"]["include_three_photon"] = *model.include_three_photon;
    j["bath"] = bath.to_json();
    if (simulation) {
        const auto& s = *simulation;
        j["simulation"]["t_final"] = s.t_final;
        j["simulation"]["dt"] = s.dt;
        j["simulation"]["record_every"] = s.record_every;
        j["simulation"]["dims"] = s.dims;
        j["simulation"]["observables"] = s.observables;
        if (s.frame_transform) j["simulation"]["frame_transform"] = *s.frame_transform;
    }
    if (sweep) {
        j["sweep"]["detuning_ratio"] = sweep->detuning_ratio;
        j["sweep"]["g_min"] = sweep->g_min;
        j["sweep"]["g_max"] = sweep->g_max;
        j["sweep"]["steps"] = sweep->steps;
        j["sweep"]["epsilon"] = sweep->epsilon;
    }
    j["verify"]["samples"] = verify.samples;
    if (!model_file.empty()) j["model_file"] = model_file;
    return j;
}

std::string blob_hash(const std::string& content) {
    const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
    EVP_DigestUpdate(ctx, header.data(), header.size());
    EVP_DigestUpdate(ctx, content.data(), content.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

} // namespace eme::app
