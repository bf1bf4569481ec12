#include "eme/sw_generator.hpp"

#include <algorithm>
#include <cmath>

namespace eme {

template <class C>
void validate(const QuadraticSpectrum<C>& spectrum) {
    using T = CoefficientTraits<C>;
    if (spectrum.omega.empty()) throw InvalidModel("quadratic spectrum has no modes");
    for (const auto& w : spectrum.omega)
        if (!(T::to_double(w) > 0)) throw InvalidModel("normal-mode frequencies must be positive");
}

template <class C>
OperatorPolynomial<C> quadratic_hamiltonian(const QuadraticSpectrum<C>& spectrum) {
    using T = CoefficientTraits<C>;
    const std::size_t modes = spectrum.modes();
    OperatorPolynomial<C> h(modes);
    typename T::Real zero_point(0);
    for (std::size_t i = 0; i < modes; ++i) {
        h += OperatorPolynomial<C>::number(modes, i) * T::from_real(spectrum.omega[i]);
        zero_point = zero_point + spectrum.omega[i];
    }
    h += OperatorPolynomial<C>::identity(modes, T::from_real(zero_point / 2));
    return h;
}

template <class C>
typename CoefficientTraits<C>::Real frequency_denominator(const QuadraticSpectrum<C>& spectrum, const Monomial& m) {
    if (m.modes() != spectrum.modes()) throw ModeMismatch("monomial and spectrum disagree on mode count");
    typename CoefficientTraits<C>::Real delta(0);
    const auto sig = m.signature();
    for (std::size_t i = 0; i < sig.size(); ++i) delta = delta + spectrum.omega[i] * sig[i];
    return delta;
}

template <class C>
OperatorPolynomial<C> solve_homological(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& rhs) {
    using T = CoefficientTraits<C>;
    validate(spectrum);
    if (rhs.modes() != spectrum.modes()) throw ModeMismatch("rhs and spectrum disagree on mode count");
    double max_omega = 0.0;
    for (const auto& w : spectrum.omega) max_omega = std::max(max_omega, T::to_double(w));
    OperatorPolynomial<C> g(rhs.modes());
    for (const auto& [m, c] : rhs.terms()) {
        const auto delta = frequency_denominator(spectrum, m);
        const double d = T::to_double(delta);
        if (std::abs(d) < kResonanceTolerance * max_omega || d == 0.0) throw ResonantDenominator(m.to_string(), d);
        g.add(m, c / T::from_real(delta));
    }
    return g;
}

template <class C>
OperatorPolynomial<C> solve_generator4(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& nonsecular) {
    for (const auto& [m, c] : nonsecular.terms())
        if (m.is_secular()) throw Error("solve_generator4: secular monomial " + m.to_string() + " in input");
    return solve_homological(spectrum, nonsecular);
}

template <class C>
OperatorPolynomial<C> cosine_series_term(const std::vector<typename CoefficientTraits<C>::Real>& weights,
                                         const typename CoefficientTraits<C>::Real& omega_bar, unsigned k,
                                         const AlgebraOptions& opts) {
    using T = CoefficientTraits<C>;
    const std::size_t modes = weights.size();
    OperatorPolynomial<C> linear(modes);
    for (std::size_t i = 0; i < modes; ++i)
        linear += OperatorPolynomial<C>::quadrature_x(modes, i) * T::from_real(weights[i]);
    typename T::Real factorial(1);
    for (unsigned j = 2; j <= 2 * k; ++j) factorial = factorial * j;
    typename T::Real prefactor = omega_bar / (factorial * 2);
    return power(linear, 2 * k, opts) * T::from_real(prefactor);
}

template <class C>
FirstOrderSolution<C> solve_first_order(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& quartic) {
    auto split = split_secular(quartic);
    auto g4 = solve_generator4(spectrum, split.nonsecular);
    PolynomialSeries<C> h;
    h.modes = spectrum.modes();
    h.orders = {quadratic_hamiltonian(spectrum), -split.secular};
    return {std::move(split.secular), std::move(split.nonsecular), std::move(g4), std::move(h)};
}

template <class C>
SecondOrderSolution<C> solve_generator6(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& S4,
                                        const OperatorPolynomial<C>& N4, const OperatorPolynomial<C>& G4,
                                        const OperatorPolynomial<C>& N6, const OperatorPolynomial<C>& S6) {
    const C half = CoefficientTraits<C>::from_real(typename CoefficientTraits<C>::Real(1) / 2);
    auto mixed = split_secular(commutator(N4, G4));
    // [H2, G6] = -N6 + [S4, G4] + N([N4, G4])/2
    auto rhs = -N6 + commutator(S4, G4) + mixed.nonsecular * half;
    auto g6 = solve_homological(spectrum, rhs);
    auto correction = S6 - mixed.secular * half;
    PolynomialSeries<C> h;
    h.modes = spectrum.modes();
    h.orders = {quadratic_hamiltonian(spectrum), -S4, correction};
    return {std::move(g6), std::move(correction), std::move(h)};
}

template <class C>
OperatorPolynomial<C> generator6_residual(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& S4,
                                          const OperatorPolynomial<C>& N4, const OperatorPolynomial<C>& G4,
                                          const OperatorPolynomial<C>& N6, const OperatorPolynomial<C>& G6) {
    const C half = CoefficientTraits<C>::from_real(typename CoefficientTraits<C>::Real(1) / 2);
    auto h2 = quadratic_hamiltonian(spectrum);
    auto mixed = split_secular(commutator(N4, G4));
    return commutator(h2, G6) + N6 - commutator(S4, G4) - mixed.nonsecular * half;
}

template <class C>
OperatorPolynomial<C> transform_first_order(const OperatorPolynomial<C>& op, const OperatorPolynomial<C>& G4,
                                            const typename CoefficientTraits<C>::Real& eps) {
    return op + commutator(op, G4) * CoefficientTraits<C>::from_real(eps);
}

template <class C>
PolynomialSeries<C> transform_series(const OperatorPolynomial<C>& op, const OperatorPolynomial<C>& G4) {
    PolynomialSeries<C> s;
    s.modes = op.modes();
    s.orders = {op, commutator(op, G4)};
    return s;
}

Eigen::MatrixXcd transform_state_first_order(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& G4, double eps) {
    if (rho.rows() != rho.cols() || G4.rows() != G4.cols() || rho.rows() != G4.rows())
        throw DimensionOverflow("transform_state_first_order: dimension mismatch");
    Eigen::MatrixXcd out = rho + eps * (rho * G4 - G4 * rho);
    const std::complex<double> tr = out.trace();
    if (std::abs(tr) > 0) out /= tr;
    return out;
}

#define EME_INSTANTIATE(C)                                                                                       \
    template void validate(const QuadraticSpectrum<C>&);                                                        \
    template OperatorPolynomial<C> quadratic_hamiltonian(const QuadraticSpectrum<C>&);                          \
    template CoefficientTraits<C>::Real frequency_denominator(const QuadraticSpectrum<C>&, const Monomial&);    \
    template OperatorPolynomial<C> solve_homological(const QuadraticSpectrum<C>&, const OperatorPolynomial<C>&); \
    template OperatorPolynomial<C> solve_generator4(const QuadraticSpectrum<C>&, const OperatorPolynomial<C>&);  \
    template OperatorPolynomial<C> cosine_series_term(const std::vector<CoefficientTraits<C>::Real>&,           \
                                                      const CoefficientTraits<C>::Real&, unsigned,              \
                                                      const AlgebraOptions&);                                   \
    template FirstOrderSolution<C> solve_first_order(const QuadraticSpectrum<C>&, const OperatorPolynomial<C>&); \
    template SecondOrderSolution<C> solve_generator6(                                                           \
        const QuadraticSpectrum<C>&, const OperatorPolynomial<C>&, const OperatorPolynomial<C>&,                \
        const OperatorPolynomial<C>&, const OperatorPolynomial<C>&, const OperatorPolynomial<C>&);              \
    template OperatorPolynomial<C> generator6_residual(                                                         \
        const QuadraticSpectrum<C>&, const OperatorPolynomial<C>&, const OperatorPolynomial<C>&,                \
        const OperatorPolynomial<C>&, const OperatorPolynomial<C>&, const OperatorPolynomial<C>&);              \
    template OperatorPolynomial<C> transform_first_order(const OperatorPolynomial<C>&,                          \
                                                         const OperatorPolynomial<C>&,                          \
                                                         const CoefficientTraits<C>::Real&);                    \
    template PolynomialSeries<C> transform_series(const OperatorPolynomial<C>&, const OperatorPolynomial<C>&);

EME_INSTANTIATE(ExactComplex)
EME_INSTANTIATE(std::complex<double>)

#undef EME_INSTANTIATE

} // namespace eme
