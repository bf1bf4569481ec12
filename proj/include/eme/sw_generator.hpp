#pragma once

#include <optional>
#include <vector>

#include "eme/boson_algebra.hpp"

namespace eme {

// Normal-mode frequencies of H2 = sum_i omega_i (n_i + 1/2).
template <class C>
struct QuadraticSpectrum {
    using Real = typename CoefficientTraits<C>::Real;
    std::vector<Real> omega;

    std::size_t modes() const { return omega.size(); }
};

// Relative tolerance on |Delta| / max(omega) below which a denominator counts as resonant.
inline constexpr double kResonanceTolerance = 1e-9;

template <class C>
void validate(const QuadraticSpectrum<C>& spectrum);

template <class C>
OperatorPolynomial<C> quadratic_hamiltonian(const QuadraticSpectrum<C>& spectrum);

// Delta = sum_i (m_i - n_i) omega_i, so that [H2, M] = Delta M.
template <class C>
typename CoefficientTraits<C>::Real frequency_denominator(const QuadraticSpectrum<C>& spectrum, const Monomial& m);

// Solves [H2, G] = rhs term by term. Throws ResonantDenominator when a denominator vanishes.
template <class C>
OperatorPolynomial<C> solve_homological(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& rhs);

// Same as solve_homological, but rejects secular input outright.
template <class C>
OperatorPolynomial<C> solve_generator4(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& nonsecular);

// (omega_bar / 2) (sum_i w_i X_i)^(2k) / (2k)!, the k-th cosine-series term without its sign.
template <class C>
OperatorPolynomial<C> cosine_series_term(const std::vector<typename CoefficientTraits<C>::Real>& weights,
                                         const typename CoefficientTraits<C>::Real& omega_bar, unsigned k,
                                         const AlgebraOptions& opts = {});

template <class C>
struct Generator {
    OperatorPolynomial<C> order4;
    std::optional<OperatorPolynomial<C>> order6;
    typename CoefficientTraits<C>::Real epsilon{0};
};

// Hamiltonian H2 - eps H4 + eps^2 H6 is mapped to H2 - eps S4 (+ eps^2 [S6 - S([N4,G4])/2]).
template <class C>
struct FirstOrderSolution {
    OperatorPolynomial<C> secular4;
    OperatorPolynomial<C> nonsecular4;
    OperatorPolynomial<C> generator4;
    PolynomialSeries<C> hamiltonian; // orders {H2, -S4}
};

template <class C>
FirstOrderSolution<C> solve_first_order(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& quartic);

template <class C>
struct SecondOrderSolution {
    OperatorPolynomial<C> generator6;
    OperatorPolynomial<C> secular_correction; // S6 - S([N4,G4])/2
    PolynomialSeries<C> hamiltonian;          // orders {H2, -S4, S6 - S([N4,G4])/2}
};

template <class C>
SecondOrderSolution<C> solve_generator6(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& S4,
                                        const OperatorPolynomial<C>& N4, const OperatorPolynomial<C>& G4,
                                        const OperatorPolynomial<C>& N6, const OperatorPolynomial<C>& S6);

// [H2, G6] + N6 - [S4, G4] - N([N4, G4])/2; vanishes for the solved G6.
template <class C>
OperatorPolynomial<C> generator6_residual(const QuadraticSpectrum<C>& spectrum, const OperatorPolynomial<C>& S4,
                                          const OperatorPolynomial<C>& N4, const OperatorPolynomial<C>& G4,
                                          const OperatorPolynomial<C>& N6, const OperatorPolynomial<C>& G6);

// op + eps [op, G4]
template <class C>
OperatorPolynomial<C> transform_first_order(const OperatorPolynomial<C>& op, const OperatorPolynomial<C>& G4,
                                            const typename CoefficientTraits<C>::Real& eps);

// Series form {op, [op, G4]} of the same map.
template <class C>
PolynomialSeries<C> transform_series(const OperatorPolynomial<C>& op, const OperatorPolynomial<C>& G4);

// rho + eps [rho, G4], renormalized to unit trace.
Eigen::MatrixXcd transform_state_first_order(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& G4, double eps);

} // namespace eme
