#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "eme/boson_algebra.hpp"
#include "eme/eme_builder.hpp"

namespace eme {

struct FockTruncation {
    std::vector<int> dims;
    long max_total_dim = 4096;

    long total() const;
    // Throws if a dimension is below 2, the mode count differs, or the cap is exceeded.
    void validate(std::size_t modes) const;
};

enum class ObservableKind { Occupation, QuadratureX, QuadratureY, PhaseSpace };

struct Observable {
    ObservableKind kind = ObservableKind::Occupation;
    std::size_t mode = 0;
};

// "n_a", "X_c", "Y_a", "phase_a" (labels a, c for two modes, a for one).
Observable parse_observable(const std::string& s, std::size_t modes);
// PhaseSpace contributes two columns (X then Y).
std::vector<std::string> column_names(const Observable& o, std::size_t modes);

struct InitialState {
    enum class Kind { Vacuum, FockSuperposition, ProductState, DensityMatrix };
    Kind kind = Kind::Vacuum;
    // sum_k amp_k |levels_k>, normalized on use
    std::vector<std::pair<std::vector<int>, std::complex<double>>> superposition;
    // tensor product of per-mode pure states (amplitudes over that mode's Fock levels)
    std::vector<std::vector<std::complex<double>>> product;
    Eigen::MatrixXcd density;

    static InitialState vacuum();
    static InitialState fock_superposition(std::vector<std::pair<std::vector<int>, std::complex<double>>> terms);
    static InitialState product_state(std::vector<std::vector<std::complex<double>>> per_mode);
    static InitialState density_matrix(Eigen::MatrixXcd rho);
};

Eigen::MatrixXcd initial_density(const InitialState& s, const FockTruncation& trunc);

struct SimulationConfig {
    double t_final = 1.0;
    double dt = 0.0; // 0 selects (2 pi / omega_max) / 200
    int record_every = 1;
    std::vector<Observable> observables;
    InitialState initial;
    std::optional<bool> apply_frame_transform; // unset: on for models carrying a generator
    int positivity_check_every = 1;            // in records; 0 disables
    double positivity_floor = -1e-8;
    double leak_threshold = 1e-6;
};

struct Diagnostics {
    double dt = 0.0;
    long steps = 0;
    double max_trace_drift = 0.0;
    double max_hermiticity_drift = 0.0;
    double min_eigenvalue = 1.0;
    int positivity_warnings = 0;
    double max_top_population = 0.0;
    bool frame_transform = false;
};

struct TimeSeries {
    std::vector<std::string> columns;
    std::vector<double> times;
    std::vector<std::vector<double>> values; // values[column][record]
    Diagnostics diagnostics;

    const std::vector<double>& column(const std::string& name) const;
};

// Right-hand side of d rho/dt = -i[H, rho] + sum_j rate_j D[C_j] rho on a truncated space.
class LindbladGenerator {
public:
    LindbladGenerator(const EffectiveModel& model, const FockTruncation& trunc);

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
    const SparseMatrix& hamiltonian() const { return h_; }
    std::size_t jump_count() const { return jumps_.size(); }
    long dimension() const { return dim_; }

private:
    long dim_ = 0;
    SparseMatrix h_;
    SparseMatrix k_; // H - (i/2) sum_j J_j^dag J_j
    SparseMatrix k_adj_;
    std::vector<SparseMatrix> jumps_;
    std::vector<SparseMatrix> jumps_adj_;
};

double default_time_step(const EffectiveModel& model);

// Fixed-step RK4. Throws TruncationLeak when the top two levels of any mode pick up population.
TimeSeries evolve(const EffectiveModel& model, const FockTruncation& trunc, const SimulationConfig& config);

// Random full-rank density matrix supported on levels 0..support-1 of a single mode of size dim.
Eigen::MatrixXcd random_density_matrix(int dim, int support, std::mt19937_64& rng);

struct EomCheck {
    double max_residual = 0.0;  // order-eps part of the mismatch; should vanish
    double max_remainder = 0.0; // eps^2 part from the dissipator, not covered by the identity
};

// Validates the first-order quadrature equations of motion against the Lindblad right-hand side
// of the single-photon case-(i) effective model.
EomCheck quadrature_eom_check(double epsilon, double omega_a, double kappa_a, const FockTruncation& trunc,
                              const std::vector<Eigen::MatrixXcd>& rho_samples);

struct Case1Params {
    double epsilon = 0.0;
    double omega_a = 1.0;
    BathSpec bath = BathSpec::flat(0.0);
    BuildOptions options;
};

struct Case2Params {
    BareModel bare;
    BathSpec bath = BathSpec::flat(0.0);
    BuildOptions options = case2_defaults();
};

using ModelParams = std::variant<Case1Params, Case2Params>;

EffectiveModel build_model(const ModelParams& p, Flavor flavor);

struct FlavorComparison {
    std::vector<double> times;
    std::vector<std::string> columns; // "<flavor>:<observable>"
    std::vector<std::vector<double>> values;
    std::map<std::string, Diagnostics> diagnostics;

    const std::vector<double>& column(const std::string& name) const;
};

// Runs the requested flavors (in parallel) from the same rho(0) and aligns their series.
FlavorComparison compare_flavors(const ModelParams& params, const FockTruncation& trunc, const SimulationConfig& config,
                                 const std::vector<Flavor>& flavors = {Flavor::Linear, Flavor::Kerr,
                                                                       Flavor::Effective});

} // namespace eme
