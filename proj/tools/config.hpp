#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eme/eme_builder.hpp"
#include "eme/errors.hpp"
#include "eme/lindblad_sim.hpp"

namespace eme::app {

// Parse or validation failure, prefixed with "<source>:<line>:<column>: key '<key>'" when known.
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class ModelCase { Case1, Case2 };

struct ModelSection {
    ModelCase kind = ModelCase::Case1;
    // "omega_bar_c": frequencies are multiples of the bare cavity frequency, which must be 1.
    // "absolute": frequencies are used as given.
    std::string units = "omega_bar_c";
    double epsilon = 0.2;
    double omega_a = 1.0; // case 1
    BareModel bare;       // case 2
    Representation representation = Representation::Compact;
    int levels = 8; // number-basis truncation dimension
    std::optional<bool> include_three_photon;
};

struct SimulationSection {
    double t_final = 1.0;
    double dt = 0.0;
    int record_every = 1;
    std::vector<int> dims;
    std::vector<std::string> observables;
    std::optional<bool> frame_transform;
    int positivity_check_every = 1;
    InitialState initial;
};

struct SweepSection {
    double detuning_ratio = 0.8; // omega_bar_a / omega_bar_c
    double g_min = 0.0;
    double g_max = 0.3;
    int steps = 31;
    double epsilon = 0.2;
};

struct VerifySection {
    int samples = 5;
};

struct AppConfig {
    std::string path;
    std::string text;
    ModelSection model;
    BathSpec bath = BathSpec::flat(0.0);
    std::optional<SimulationSection> simulation;
    std::optional<SweepSection> sweep;
    VerifySection verify;
    std::string model_file;

    BuildOptions build_options(unsigned order) const;
    ModelParams model_params(unsigned order) const;
    std::size_t modes() const { return model.kind == ModelCase::Case1 ? 1 : 2; }
    FockTruncation truncation() const;
    SimulationConfig simulation_config() const;
    nlohmann::ordered_json resolved() const;
};

AppConfig parse_config(const std::string& text, const std::string& source = "<config>");
AppConfig load_config(const std::string& path);

// Git-style blob hash: sha1("blob <size>\0" + content), lowercase hex.
std::string blob_hash(const std::string& content);

} // namespace eme::app
