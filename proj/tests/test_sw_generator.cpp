#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "eme/sw_generator.hpp"

using namespace eme;
using cd = std::complex<double>;
using EP = ExactPolynomial;
using FP = FloatPolynomial;

namespace {

mpq_class rat(long p, long d = 1) {
    mpq_class r(p, d);
    r.canonicalize();
    return r;
}
ExactComplex q(long p, long d = 1) { return ExactComplex(rat(p, d)); }
Monomial m1(unsigned m, unsigned n) { return Monomial(std::vector<ExponentPair>{{m, n}}); }

const QuadraticSpectrum<ExactComplex> kUnit{{mpq_class(1)}};

EP quartic1() { return cosine_series_term<ExactComplex>({mpq_class(1)}, mpq_class(1), 2); }
EP g4_single() { return solve_generator4(kUnit, split_secular(quartic1()).nonsecular); }

// Sorted eigenvalues of n + 1/2 - eps X^4/48 + eps^2 X^6/1440 on a truncated Fock space.
Eigen::VectorXd cosine_levels(double eps, int dim) {
    const FP h = FP::number(1, 0) + FP::identity(1, cd(0.5)) -
                 cosine_series_term<cd>({1.0}, 1.0, 2) * cd(eps) + cosine_series_term<cd>({1.0}, 1.0, 3) * cd(eps * eps);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_matrix(h, {dim}));
    return es.eigenvalues();
}

} // namespace

TEST_CASE("cosine series terms carry the factorial weights") {
    const auto x = EP::quadrature_x(1, 0);
    CHECK(quartic1() == power(x, 4) * q(1, 48));
    CHECK(cosine_series_term<ExactComplex>({mpq_class(1)}, mpq_class(1), 3) == power(x, 6) * q(1, 1440));
}

TEST_CASE("single-mode quartic generator has six exact coefficients") {
    const auto g4 = g4_single();
    CHECK(g4.size() == 6);
    CHECK(g4.coefficient(m1(4, 0)) == q(1, 192));
    CHECK(g4.coefficient(m1(0, 4)) == q(-1, 192));
    CHECK(g4.coefficient(m1(3, 1)) == q(1, 24));
    CHECK(g4.coefficient(m1(1, 3)) == q(-1, 24));
    CHECK(g4.coefficient(m1(2, 0)) == q(1, 16));
    CHECK(g4.coefficient(m1(0, 2)) == q(-1, 16));
    CHECK((commutator(quadratic_hamiltonian(kUnit), g4) - split_secular(quartic1()).nonsecular).is_zero());
}

TEST_CASE("first-order secular part and effective Hamiltonian") {
    const auto first = solve_first_order(kUnit, quartic1());
    const auto s4 = to_number_form(first.secular4);
    CHECK(s4.at({2}) == q(1, 8));
    CHECK(s4.at({1}) == q(1, 8));
    CHECK(s4.at({0}) == q(1, 16));
    // H2 - eps S4 = (1 - eps/8) n - (eps/8) n^2 + const
    const auto h = to_number_form(first.hamiltonian.evaluate(rat(1, 5)));
    CHECK(h.at({1}) == q(39, 40));
    CHECK(h.at({2}) == q(-1, 40));
    CHECK(first.generator4 == g4_single());
}

TEST_CASE("zero input gives a zero generator") {
    CHECK(solve_generator4(kUnit, EP(1)).is_zero());
    CHECK(solve_homological(kUnit, EP(1)).is_zero());
}

TEST_CASE("secular input and resonant denominators are rejected") {
    CHECK_THROWS_AS(solve_generator4(kUnit, EP::number(1, 0)), Error);
    const QuadraticSpectrum<ExactComplex> degenerate{{mpq_class(1), mpq_class(1)}};
    const auto swap = EP::monomial(Monomial(std::vector<ExponentPair>{{1, 0}, {0, 1}}));
    CHECK_THROWS_AS(solve_generator4(degenerate, swap), ResonantDenominator);
    const QuadraticSpectrum<cd> near{{1.0, 1.0 + 1e-12}};
    CHECK_THROWS_AS(solve_generator4(near, to_float(swap)), ResonantDenominator);
    try {
        solve_generator4(degenerate, swap);
    } catch (const ResonantDenominator& e) {
        CHECK(e.delta() == 0.0);
        CHECK(!e.monomial().empty());
    }
    CHECK_THROWS_AS(validate(QuadraticSpectrum<cd>{{1.0, -0.5}}), InvalidModel);
    CHECK_THROWS_AS(solve_generator4(kUnit, EP::lowering(2, 0)), ModeMismatch);
}

TEST_CASE("two-mode generator: anti-Hermitian, same support, exact residual") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> num(10, 200), den(3, 61);
    int done = 0;
    while (done < 10) {
        const QuadraticSpectrum<ExactComplex> spec{{rat(num(rng), den(rng)), rat(num(rng), den(rng))}};
        const auto quartic = cosine_series_term<ExactComplex>({rat(num(rng), den(rng)), rat(num(rng), den(rng))},
                                                              rat(4, 5), 2);
        const auto n4 = split_secular(quartic).nonsecular;
        EP g4;
        try {
            g4 = solve_generator4(spec, n4);
        } catch (const ResonantDenominator&) {
            continue;
        }
        ++done;
        CHECK(dagger(g4) == -g4);
        CHECK(g4.size() == n4.size());
        for (const auto& [m, c] : n4.terms()) CHECK(!g4.coefficient(m).is_zero());
        CHECK((commutator(quadratic_hamiltonian(spec), g4) - n4).is_zero());
    }
}

TEST_CASE("float two-mode residual stays at round-off") {
    const QuadraticSpectrum<cd> spec{{0.5519, 1.1556}};
    const auto n4 = split_secular(cosine_series_term<cd>({0.6822, 0.6856}, 0.8, 2)).nonsecular;
    const auto g4 = solve_generator4(spec, n4);
    const auto res = commutator(quadratic_hamiltonian(spec), g4) - n4;
    double worst = 0.0;
    for (const auto& [m, c] : res.terms()) worst = std::max(worst, std::abs(c));
    CHECK(worst < 1e-10);
    CHECK((dagger(g4) + g4).is_zero());
}

TEST_CASE("observable transform of X") {
    const auto x = EP::quadrature_x(1, 0);
    const auto g4 = g4_single();
    const auto series = transform_series(x, g4);
    REQUIRE(series.orders.size() == 2);
    CHECK(series.orders[0] == x);
    const auto& xg = series.orders[1];
    CHECK(xg.size() == 6);
    CHECK(xg.coefficient(m1(0, 1)) == q(1, 8));
    CHECK(xg.coefficient(m1(1, 0)) == q(1, 8));
    CHECK(xg.coefficient(m1(1, 2)) == q(1, 8));
    CHECK(xg.coefficient(m1(2, 1)) == q(1, 8));
    CHECK(xg.coefficient(m1(0, 3)) == q(-1, 48));
    CHECK(xg.coefficient(m1(3, 0)) == q(-1, 48));
    CHECK(transform_first_order(x, g4, rat(1, 5)) == series.evaluate(rat(1, 5)));
}

TEST_CASE("second order: residual, hermiticity and the n^2 coefficient") {
    const auto first = solve_first_order(kUnit, quartic1());
    const auto six = split_secular(cosine_series_term<ExactComplex>({mpq_class(1)}, mpq_class(1), 3));
    const auto second =
        solve_generator6(kUnit, first.secular4, first.nonsecular4, first.generator4, six.nonsecular, six.secular);
    CHECK(generator6_residual(kUnit, first.secular4, first.nonsecular4, first.generator4, six.nonsecular,
                              second.generator6)
              .is_zero());
    CHECK(dagger(second.generator6) == -second.generator6);

    const auto sc = split_secular(commutator(first.nonsecular4, first.generator4, AlgebraOptions{12})).secular;
    CHECK(dagger(sc) == sc);
    CHECK(is_secular(sc));

    const auto nf = to_number_form(second.secular_correction);
    CHECK(nf.at({2}) == q(-3, 128));
    CHECK(second.hamiltonian.orders.size() == 3);
}

TEST_CASE("second-order level shifts match exact diagonalization") {
    const auto first = solve_first_order(kUnit, quartic1());
    const auto six = split_secular(cosine_series_term<ExactComplex>({mpq_class(1)}, mpq_class(1), 3));
    const auto second =
        solve_generator6(kUnit, first.secular4, first.nonsecular4, first.generator4, six.nonsecular, six.secular);
    const auto nf = to_number_form(second.secular_correction);
    const double frozen[5] = {-0.0078125, -0.0703125, -0.2734375, -0.7109375, -1.4765625};

    const double d = 1e-3;
    const int dim = 40;
    const auto lp = cosine_levels(d, dim), lm = cosine_levels(-d, dim), l0 = cosine_levels(0.0, dim);
    for (int n = 0; n < 5; ++n) {
        mpq_class poly = 0;
        for (const auto& [e, c] : nf) {
            mpq_class term = c.re;
            for (unsigned k = 0; k < e[0]; ++k) term *= n;
            poly += term;
        }
        CHECK(poly.get_d() == doctest::Approx(frozen[n]).epsilon(1e-12));
        const double second_diff = (lp(n) + lm(n) - 2.0 * l0(n)) / (2.0 * d * d);
        CHECK(second_diff == doctest::Approx(frozen[n]).epsilon(1e-4));
        const double first_diff = (lp(n) - lm(n)) / (2.0 * d);
        CHECK(first_diff == doctest::Approx(-(6.0 * n * n + 6.0 * n + 3.0) / 48.0).epsilon(1e-5));
    }
}

TEST_CASE("state transform agrees with the unitary map to second order") {
    const auto G = to_matrix(g4_single(), {12});
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(12, 12);
    rho(1, 1) = 1.0;
    // remainder constant measured at eps = 0.2 (0.2062) and frozen
    const double C = 0.21;
    for (double eps : {0.05, 0.1, 0.2}) {
        const Eigen::MatrixXcd exact = (-eps * G).exp() * rho * (eps * G).exp();
        const Eigen::MatrixXcd approx = transform_state_first_order(rho, G, eps);
        CHECK((exact - approx).norm() <= C * eps * eps);
        CHECK(std::abs(approx.trace() - 1.0) < 1e-14);
        CHECK((approx - approx.adjoint()).norm() < 1e-14);
    }
    CHECK((transform_state_first_order(rho, G, 0.0) - rho).norm() < 1e-15);
    const Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(12, 12) / 12.0;
    CHECK((transform_state_first_order(mixed, G, 0.2) - mixed).norm() < 1e-15);
    CHECK_THROWS_AS(transform_state_first_order(rho, Eigen::MatrixXcd::Zero(5, 5), 0.1), DimensionOverflow);
}
