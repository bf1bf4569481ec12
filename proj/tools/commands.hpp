#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace eme::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1; // outputs written, but a check failed
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct CliOptions {
    std::string config;
    std::string out = "out";
    std::string flavor = "all";
    unsigned order = 1;
    std::uint64_t seed = 20240611;
};

std::vector<Flavor> flavors_for(const std::string& flavor);

// Builds the model for one flavor, honoring the number-basis representation for case 1.
EffectiveModel build_configured(const AppConfig& cfg, Flavor flavor, unsigned order);

struct VerifyRow {
    std::string row;
    nlohmann::ordered_json expected;
    nlohmann::ordered_json got;
    bool match = false;
};

std::vector<VerifyRow> verify_rows(const AppConfig& cfg, std::uint64_t seed);

struct SweepRow {
    double g = 0.0;
    std::string status = "ok";
    HybridizationResult hyb;
    CorrectionSigns signs;
};

std::vector<SweepRow> sweep_rows(const SweepSection& s);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Locale-independent shortest round-trip rendering.
std::string format_double(double x);

int run_derive(const CliOptions& opts, std::ostream& log);
int run_simulate(const CliOptions& opts, std::ostream& log);
int run_verify(const CliOptions& opts, std::ostream& log);
int run_sweep(const CliOptions& opts, std::ostream& log);

} // namespace eme::app
