#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eme/boson_algebra.hpp"
#include "eme/hybridizer.hpp"
#include "eme/sw_generator.hpp"

namespace eme {

enum class Flavor { Linear, Kerr, Effective };
enum class Representation { Compact, NumberBasis };

std::string to_string(Flavor f);
std::string to_string(Representation r);
Flavor parse_flavor(const std::string& s);

// Zero-temperature bath spectral function S(omega).
class BathSpec {
public:
    static BathSpec flat(double s0);
    // Linear interpolation between (omega, S) points; queries outside the table throw.
    static BathSpec tabulated(std::vector<std::pair<double, double>> points);

    double operator()(double omega) const;
    bool is_flat() const { return points_.empty(); }
    double flat_value() const { return s0_; }
    const std::vector<std::pair<double, double>>& points() const { return points_; }

    nlohmann::ordered_json to_json() const;
    static BathSpec from_json(const nlohmann::ordered_json& j);

private:
    double s0_ = 0.0;
    std::vector<std::pair<double, double>> points_;
};

// |to><from| in the multi-mode number basis.
struct Transition {
    std::vector<int> from;
    std::vector<int> to;
};

struct CollapseTerm {
    std::string label;
    double rate = 0.0;      // 2 kappa; the dissipator is rate * D[C]
    double frequency = 0.0; // frequency at which the bath was sampled
    FloatSeries series;     // compact form, C = sum_k eps^k series.orders[k]
    std::optional<ExactSeries> exact_series;
    std::optional<Transition> transition; // number-basis form; series unused when set

    bool is_transition() const { return transition.has_value(); }
};

struct EffectiveModel {
    Flavor flavor = Flavor::Linear;
    Representation representation = Representation::Compact;
    double epsilon = 0.0;
    std::size_t modes = 1;
    std::vector<double> mode_frequencies;
    FloatSeries hamiltonian; // secular orders in eps
    std::vector<CollapseTerm> collapse_terms;
    std::optional<FloatPolynomial> generator4; // present for the Effective flavor
    std::optional<ExactPolynomial> exact_generator4;
    std::optional<FloatPolynomial> generator6;
    std::optional<BareModel> bare;
    std::optional<HybridizationResult> hybridization;
    BathSpec bath = BathSpec::flat(0.0);
    std::vector<std::string> warnings;

    FloatPolynomial effective_hamiltonian() const { return hamiltonian.evaluate(epsilon); }
    FloatPolynomial collapse_operator(const CollapseTerm& t) const { return t.series.evaluate(epsilon); }
};

struct BuildOptions {
    unsigned order = 1;               // 2 adds the eps^2 Hamiltonian (collapse operators stay first order)
    bool include_three_photon = true; // multi-photon channels from the order-eps coupling correction
};

EffectiveModel build_case1(double epsilon, double omega_a, const BathSpec& bath, Flavor flavor,
                           const BuildOptions& opts = {});

// Per-level transitions |n-1><n| and |n-3><n| with closed-form rates.
EffectiveModel build_case1_number_basis(double epsilon, double omega_a, const BathSpec& bath, int n_levels,
                                        const BuildOptions& opts = {});

BuildOptions case2_defaults();

EffectiveModel build_case2(const BareModel& bare, const HybridizationResult& hyb, const BathSpec& bath,
                           Flavor flavor, const BuildOptions& opts = case2_defaults());

// Transition-by-transition expansion of a compact model up to the given dims; each transition
// samples the bath at its own effective-Hamiltonian energy difference.
EffectiveModel expand_to_number_basis(const EffectiveModel& model, const std::vector<int>& dims);

// Quartic and sextic Josephson terms of the two-mode model, in normal-mode operators.
struct TwoModeTerms {
    QuadraticSpectrum<std::complex<double>> spectrum;
    FloatPolynomial quartic; // (omega_bar_a/48)(u_aa X_a + u_ac X_c)^4
    FloatPolynomial sextic;  // (omega_bar_a/1440)(u_aa X_a + u_ac X_c)^6
};
TwoModeTerms two_mode_terms(const BareModel& bare, const HybridizationResult& hyb);

// Bare coupling quadrature Y_c = v_cc Y_c' + v_ca Y_a' in normal-mode operators.
FloatPolynomial bare_cavity_quadrature(const HybridizationResult& hyb);

struct CorrectionSigns {
    double r_a = 0.0;
    double r_c = 0.0;
};
CorrectionSigns correction_signs(const BareModel& bare, const HybridizationResult& hyb);

nlohmann::ordered_json to_json(const EffectiveModel& m);
EffectiveModel model_from_json(const nlohmann::ordered_json& j);

} // namespace eme
