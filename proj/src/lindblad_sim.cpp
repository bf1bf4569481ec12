#include "eme/lindblad_sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <Eigen/Eigenvalues>

namespace eme {

using cd = std::complex<double>;

long FockTruncation::total() const { return total_dimension(dims, MatrixOptions{max_total_dim}); }

void FockTruncation::validate(std::size_t modes) const {
    if (dims.size() != modes)
        throw ModeMismatch("truncation lists " + std::to_string(dims.size()) + " modes, model has " +
                           std::to_string(modes));
    for (int d : dims)
        if (d < 2) throw Error("truncation dimension must be at least 2");
    total();
}

Observable parse_observable(const std::string& s, std::size_t modes) {
    const auto labels = default_mode_labels(modes);
    auto split = s.find('_');
    if (split == std::string::npos) throw Error("observable '" + s + "' must look like n_a, X_a, Y_a or phase_a");
    const std::string kind = s.substr(0, split), label = s.substr(split + 1);
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw Error("observable '" + s + "' names an unknown mode '" + label + "'");
    Observable o;
    o.mode = static_cast<std::size_t>(it - labels.begin());
    if (kind == "n")
        o.kind = ObservableKind::Occupation;
    else if (kind == "X")
        o.kind = ObservableKind::QuadratureX;
    else if (kind == "Y")
        o.kind = ObservableKind::QuadratureY;
    else if (kind == "phase")
        o.kind = ObservableKind::PhaseSpace;
    else
        throw Error("observable '" + s + "' has unknown kind '" + kind + "'");
    return o;
}

std::vector<std::string> column_names(const Observable& o, std::size_t modes) {
    const auto label = default_mode_labels(modes).at(o.mode);
    switch (o.kind) {
    case ObservableKind::Occupation: return {"n_" + label};
    case ObservableKind::QuadratureX: return {"X_" + label};
    case ObservableKind::QuadratureY: return {"Y_" + label};
    case ObservableKind::PhaseSpace: return {"X_" + label, "Y_" + label};
    }
    return {};
}

InitialState InitialState::vacuum() { return {}; }

InitialState InitialState::fock_superposition(std::vector<std::pair<std::vector<int>, cd>> terms) {
    InitialState s;
    s.kind = Kind::FockSuperposition;
    s.superposition = std::move(terms);
    return s;
}

InitialState InitialState::product_state(std::vector<std::vector<cd>> per_mode) {
    InitialState s;
    s.kind = Kind::ProductState;
    s.product = std::move(per_mode);
    return s;
}

InitialState InitialState::density_matrix(Eigen::MatrixXcd rho) {
    InitialState s;
    s.kind = Kind::DensityMatrix;
    s.density = std::move(rho);
    return s;
}

namespace {

std::vector<long> strides(const std::vector<int>& dims) {
    std::vector<long> stride(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) stride[i - 1] = stride[i] * dims[i];
    return stride;
}

} // namespace

Eigen::MatrixXcd initial_density(const InitialState& s, const FockTruncation& trunc) {
    const long n = trunc.total();
    const auto stride = strides(trunc.dims);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
    switch (s.kind) {
    case InitialState::Kind::Vacuum: psi(0) = 1.0; break;
    case InitialState::Kind::FockSuperposition:
        for (const auto& [levels, amp] : s.superposition) {
            if (levels.size() != trunc.dims.size()) throw ModeMismatch("superposition term has wrong mode count");
            long idx = 0;
            for (std::size_t i = 0; i < levels.size(); ++i) {
                if (levels[i] < 0 || levels[i] >= trunc.dims[i]) throw Error("superposition level outside truncation");
                idx += levels[i] * stride[i];
            }
            psi(idx) += amp;
        }
        break;
    case InitialState::Kind::ProductState: {
        if (s.product.size() != trunc.dims.size()) throw ModeMismatch("product state has wrong mode count");
        Eigen::VectorXcd acc = Eigen::VectorXcd::Ones(1);
        for (std::size_t i = 0; i < s.product.size(); ++i) {
            if (static_cast<int>(s.product[i].size()) > trunc.dims[i])
                throw Error("product state amplitudes exceed truncation");
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(trunc.dims[i]);
            for (std::size_t k = 0; k < s.product[i].size(); ++k) v(k) = s.product[i][k];
            Eigen::VectorXcd next(acc.size() * v.size());
            for (long a = 0; a < acc.size(); ++a) next.segment(a * v.size(), v.size()) = acc(a) * v;
            acc = std::move(next);
        }
        psi = acc;
        break;
    }
    case InitialState::Kind::DensityMatrix: {
        if (s.density.rows() != n || s.density.cols() != n) throw Error("initial density matrix has wrong size");
        const cd tr = s.density.trace();
        if (std::abs(tr) == 0.0) throw Error("initial density matrix has zero trace");
        return s.density / tr;
    }
    }
    const double norm = psi.norm();
    if (norm == 0.0) throw Error("initial state has zero norm");
    psi /= norm;
    return psi * psi.adjoint();
}

LindbladGenerator::LindbladGenerator(const EffectiveModel& model, const FockTruncation& trunc) {
    trunc.validate(model.modes);
    dim_ = trunc.total();
    auto h = model.effective_hamiltonian();
    // The identity term is a global phase.
    h.add(Monomial(model.modes), -h.coefficient(Monomial(model.modes)));
    h_ = to_sparse_matrix(h, trunc.dims, MatrixOptions{trunc.max_total_dim});

    const auto stride = strides(trunc.dims);
    SparseMatrix loss(dim_, dim_);
    for (const auto& term : model.collapse_terms) {
        if (term.rate <= 0.0) continue;
        SparseMatrix j;
        if (term.transition) {
            const auto& tr = *term.transition;
            if (tr.from.size() != trunc.dims.size() || tr.to.size() != trunc.dims.size())
                throw ModeMismatch("transition '" + term.label + "' has wrong mode count");
            long from = 0, to = 0;
            bool inside = true;
            for (std::size_t i = 0; i < trunc.dims.size(); ++i) {
                inside = inside && tr.from[i] < trunc.dims[i] && tr.to[i] < trunc.dims[i];
                from += tr.from[i] * stride[i];
                to += tr.to[i] * stride[i];
            }
            if (!inside) continue;
            j.resize(dim_, dim_);
            j.insert(to, from) = 1.0;
        } else {
            j = to_sparse_matrix(model.collapse_operator(term), trunc.dims, MatrixOptions{trunc.max_total_dim});
        }
        j.prune(cd(0.0));
        if (j.nonZeros() == 0) continue;
        j *= cd(std::sqrt(term.rate));
        SparseMatrix jd = j.adjoint();
        loss += jd * j;
        jumps_.push_back(std::move(j));
        jumps_adj_.push_back(std::move(jd));
    }
    k_ = h_ - cd(0.0, 0.5) * loss;
    k_adj_ = k_.adjoint();
}

Eigen::MatrixXcd LindbladGenerator::apply(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd out = k_ * rho;
    Eigen::MatrixXcd right = rho * k_adj_;
    out = cd(0.0, -1.0) * (out - right);
    for (std::size_t j = 0; j < jumps_.size(); ++j) {
        Eigen::MatrixXcd jr = jumps_[j] * rho;
        out.noalias() += jr * jumps_adj_[j];
    }
    return out;
}

double default_time_step(const EffectiveModel& model) {
    const double wmax = *std::max_element(model.mode_frequencies.begin(), model.mode_frequencies.end());
    return 2.0 * M_PI / wmax / 200.0;
}

const std::vector<double>& TimeSeries::column(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error("no column '" + name + "'");
    return values[static_cast<std::size_t>(it - columns.begin())];
}

const std::vector<double>& FlavorComparison::column(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error("no column '" + name + "'");
    return values[static_cast<std::size_t>(it - columns.begin())];
}

namespace {

FloatPolynomial observable_polynomial(ObservableKind kind, std::size_t modes, std::size_t mode) {
    switch (kind) {
    case ObservableKind::Occupation: return FloatPolynomial::number(modes, mode);
    case ObservableKind::QuadratureX: return FloatPolynomial::quadrature_x(modes, mode);
    case ObservableKind::QuadratureY: return FloatPolynomial::quadrature_y(modes, mode);
    case ObservableKind::PhaseSpace: break;
    }
    throw Error("phase-space observable has no single polynomial");
}

double expectation(const Eigen::MatrixXcd& rho, const SparseMatrix& op) {
    cd acc = 0.0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
    return acc.real();
}

} // namespace

TimeSeries evolve(const EffectiveModel& model, const FockTruncation& trunc, const SimulationConfig& config) {
    if (!(config.t_final > 0)) throw Error("t_final must be positive");
    if (config.dt < 0) throw Error("dt must be positive");
    if (config.record_every < 1) throw Error("record_every must be at least 1");
    const LindbladGenerator gen(model, trunc);
    const MatrixOptions mopts{trunc.max_total_dim};

    const bool frame = config.apply_frame_transform.value_or(true) && model.generator4.has_value() &&
                       model.epsilon > 0.0;
    Eigen::MatrixXcd rho = initial_density(config.initial, trunc);
    SparseMatrix g4m;
    if (frame) {
        g4m = to_sparse_matrix(*model.generator4, trunc.dims, mopts);
        rho = transform_state_first_order(rho, Eigen::MatrixXcd(g4m), model.epsilon);
    }

    TimeSeries series;
    std::vector<SparseMatrix> ops;
    for (const auto& o : config.observables) {
        if (o.mode >= model.modes) throw ModeMismatch("observable mode outside model");
        const auto names = column_names(o, model.modes);
        series.columns.insert(series.columns.end(), names.begin(), names.end());
        std::vector<ObservableKind> kinds;
        if (o.kind == ObservableKind::PhaseSpace)
            kinds = {ObservableKind::QuadratureX, ObservableKind::QuadratureY};
        else
            kinds = {o.kind};
        for (auto k : kinds) {
            auto p = observable_polynomial(k, model.modes, o.mode);
            if (frame) p = transform_first_order(p, *model.generator4, model.epsilon);
            ops.push_back(to_sparse_matrix(p, trunc.dims, mopts));
        }
    }
    series.values.assign(ops.size(), {});

    double dt = config.dt > 0 ? config.dt : default_time_step(model);
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(config.t_final / dt - 1e-9)));
    dt = config.t_final / static_cast<double>(steps);
    auto& diag = series.diagnostics;
    diag.dt = dt;
    diag.steps = steps;
    diag.frame_transform = frame;

    const auto stride = strides(trunc.dims);
    const long n = gen.dimension();
    std::vector<std::vector<long>> top_levels(trunc.dims.size());
    for (long idx = 0; idx < n; ++idx)
        for (std::size_t i = 0; i < trunc.dims.size(); ++i)
            if (trunc.dims[i] >= 4 && (idx / stride[i]) % trunc.dims[i] >= trunc.dims[i] - 2)
                top_levels[i].push_back(idx);

    long record_index = 0;
    auto record = [&](double t) {
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        diag.max_hermiticity_drift = std::max(diag.max_hermiticity_drift, herm);
        rho = 0.5 * (rho + rho.adjoint()).eval();
        diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(rho.trace() - cd(1.0)));
        if (config.leak_threshold > 0) {
            for (std::size_t i = 0; i < top_levels.size(); ++i) {
                double pop = 0.0;
                for (long idx : top_levels[i]) pop += rho(idx, idx).real();
                diag.max_top_population = std::max(diag.max_top_population, pop);
                if (pop > config.leak_threshold) throw TruncationLeak(static_cast<int>(i), pop);
            }
        }
        if (config.positivity_check_every > 0 && record_index % config.positivity_check_every == 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
            const double lo = es.eigenvalues().minCoeff();
            diag.min_eigenvalue = std::min(diag.min_eigenvalue, lo);
            if (lo < config.positivity_floor) ++diag.positivity_warnings;
        }
        series.times.push_back(t);
        for (std::size_t k = 0; k < ops.size(); ++k) series.values[k].push_back(expectation(rho, ops[k]));
        ++record_index;
    };

    record(0.0);
    for (long s = 1; s <= steps; ++s) {
        const Eigen::MatrixXcd k1 = gen.apply(rho);
        const Eigen::MatrixXcd k2 = gen.apply(rho + (0.5 * dt) * k1);
        const Eigen::MatrixXcd k3 = gen.apply(rho + (0.5 * dt) * k2);
        const Eigen::MatrixXcd k4 = gen.apply(rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (s % config.record_every == 0 || s == steps) record(static_cast<double>(s) * dt);
    }
    return series;
}

Eigen::MatrixXcd random_density_matrix(int dim, int support, std::mt19937_64& rng) {
    if (support < 1 || support > dim) throw Error("random_density_matrix: support must lie in [1, dim]");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd g(support, support);
    for (int i = 0; i < support; ++i)
        for (int j = 0; j < support; ++j) g(i, j) = cd(normal(rng), normal(rng));
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho.topLeftCorner(support, support) = g * g.adjoint();
    return rho / rho.trace();
}

EomCheck quadrature_eom_check(double epsilon, double omega_a, double kappa_a, const FockTruncation& trunc,
                              const std::vector<Eigen::MatrixXcd>& rho_samples) {
    trunc.validate(1);
    BuildOptions opts;
    opts.include_three_photon = false;
    const auto bath = BathSpec::flat(2.0 * kappa_a);
    const auto& dims = trunc.dims;

    const auto X = FloatPolynomial::quadrature_x(1, 0);
    const auto Y = FloatPolynomial::quadrature_y(1, 0);
    const auto Ha = FloatPolynomial::number(1, 0) + FloatPolynomial::identity(1, cd(0.5));
    const SparseMatrix mx = to_sparse_matrix(X, dims), my = to_sparse_matrix(Y, dims);
    const SparseMatrix hx = to_sparse_matrix(anticommutator(Ha, X), dims);
    const SparseMatrix hy = to_sparse_matrix(anticommutator(Ha, Y), dims);

    // mismatch between the Lindblad RHS and the analytic EOM, per sample and quadrature
    auto mismatch = [&](double e) {
        const LindbladGenerator gen(build_case1(e, omega_a, bath, Flavor::Effective, opts), trunc);
        std::vector<double> out;
        for (const auto& rho : rho_samples) {
            const Eigen::MatrixXcd drho = gen.apply(rho);
            const double x = expectation(rho, mx), y = expectation(rho, my);
            const double hxv = expectation(rho, hx), hyv = expectation(rho, hy);
            const double dx = expectation(drho, mx), dy = expectation(drho, my);
            out.push_back(dx - (-kappa_a * (x + e / 8.0 * hxv) + omega_a * (y - e / 8.0 * hyv)));
            out.push_back(dy - (-kappa_a * (y + e / 8.0 * hyv) - omega_a * (x - e / 8.0 * hxv)));
        }
        return out;
    };
    // The RHS is quadratic in eps; remove the eps^2 part using samples at 0, eps/2, eps.
    const auto r0 = mismatch(0.0), rh = mismatch(0.5 * epsilon), r1 = mismatch(epsilon);
    EomCheck check;
    for (std::size_t k = 0; k < r1.size(); ++k) {
        const double second = 2.0 * (r1[k] - 2.0 * rh[k] + r0[k]);
        check.max_residual = std::max(check.max_residual, std::abs(r1[k] - second));
        check.max_remainder = std::max(check.max_remainder, std::abs(second));
    }
    return check;
}

EffectiveModel build_model(const ModelParams& p, Flavor flavor) {
    if (const auto* c1 = std::get_if<Case1Params>(&p))
        return build_case1(c1->epsilon, c1->omega_a, c1->bath, flavor, c1->options);
    const auto& c2 = std::get<Case2Params>(p);
    return build_case2(c2.bare, hybridize(c2.bare), c2.bath, flavor, c2.options);
}

FlavorComparison compare_flavors(const ModelParams& params, const FockTruncation& trunc, const SimulationConfig& config,
                                 const std::vector<Flavor>& flavors) {
    std::vector<std::future<TimeSeries>> jobs;
    for (Flavor f : flavors)
        jobs.push_back(std::async(std::launch::async, [&, f] { return evolve(build_model(params, f), trunc, config); }));
    FlavorComparison out;
    for (std::size_t k = 0; k < flavors.size(); ++k) {
        TimeSeries s = jobs[k].get();
        const auto name = to_string(flavors[k]);
        if (k == 0)
            out.times = s.times;
        else if (s.times.size() != out.times.size())
            throw Error("flavor series are not aligned in time");
        for (std::size_t c = 0; c < s.columns.size(); ++c) {
            out.columns.push_back(name + ":" + s.columns[c]);
            out.values.push_back(std::move(s.values[c]));
        }
        out.diagnostics[name] = s.diagnostics;
    }
    return out;
}

} // namespace eme
