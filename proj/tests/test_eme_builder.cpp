#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "eme/eme_builder.hpp"

using namespace eme;
using cd = std::complex<double>;

namespace {

Monomial m1(unsigned m, unsigned n) { return Monomial(std::vector<ExponentPair>{{m, n}}); }
Monomial m2(unsigned ma, unsigned na, unsigned mc, unsigned nc) {
    return Monomial(std::vector<ExponentPair>{{ma, na}, {mc, nc}});
}

const CollapseTerm* find_channel(const EffectiveModel& m, const std::string& label) {
    for (const auto& t : m.collapse_terms)
        if (t.label == label) return &t;
    return nullptr;
}

bool lowering_only(const EffectiveModel& m) {
    for (const auto& t : m.collapse_terms)
        for (const auto& o : t.series.orders)
            for (const auto& [mono, c] : o.terms()) {
                int exc = 0;
                for (int s : mono.signature()) exc += s;
                if (exc >= 0) return false;
            }
    return true;
}

std::map<std::pair<std::vector<int>, std::vector<int>>, double> transition_rates(const EffectiveModel& m) {
    std::map<std::pair<std::vector<int>, std::vector<int>>, double> r;
    for (const auto& t : m.collapse_terms) {
        REQUIRE(t.is_transition());
        if (t.rate > 0) r[{t.transition->from, t.transition->to}] += t.rate;
    }
    return r;
}

} // namespace

TEST_CASE("bath spectra") {
    const auto flat = BathSpec::flat(0.3);
    CHECK(flat(0.1) == 0.3);
    CHECK(flat(7.0) == 0.3);
    const auto tab = BathSpec::tabulated({{0.0, 0.0}, {2.0, 2.0}, {4.0, 0.0}});
    CHECK(tab(0.5) == doctest::Approx(0.5));
    CHECK(tab(3.0) == doctest::Approx(1.0));
    CHECK(tab(4.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(tab(4.5), BathRangeError);
    CHECK_THROWS_AS(tab(-0.1), BathRangeError);
    CHECK_THROWS_AS(BathSpec::flat(-1.0), InvalidModel);
    CHECK_THROWS_AS(BathSpec::tabulated({{1.0, 1.0}}), InvalidModel);
    CHECK_THROWS_AS(BathSpec::tabulated({{1.0, 1.0}, {1.0, 2.0}}), InvalidModel);
    const auto back = BathSpec::from_json(tab.to_json());
    CHECK(back.points() == tab.points());
}

TEST_CASE("flavor names") {
    CHECK(parse_flavor("kerr") == Flavor::Kerr);
    CHECK(to_string(Flavor::Effective) == "effective");
    CHECK_THROWS_AS(parse_flavor("quantum"), Error);
}

TEST_CASE("eps = 0 collapses all flavors onto the linear model") {
    const auto bath = BathSpec::flat(0.08);
    const auto lin = build_case1(0.0, 1.0, bath, Flavor::Linear);
    for (Flavor f : {Flavor::Kerr, Flavor::Effective}) {
        const auto m = build_case1(0.0, 1.0, bath, f);
        CHECK(m.effective_hamiltonian() == lin.effective_hamiltonian());
        REQUIRE(m.collapse_terms.size() == lin.collapse_terms.size());
        CHECK(m.collapse_operator(m.collapse_terms[0]) == lin.collapse_operator(lin.collapse_terms[0]));
        CHECK(m.collapse_terms[0].rate == lin.collapse_terms[0].rate);
    }
}

TEST_CASE("single-mode linear and Kerr dissipators") {
    const auto bath = BathSpec::flat(0.08);
    const auto lin = build_case1(0.2, 1.0, bath, Flavor::Linear);
    REQUIRE(lin.collapse_terms.size() == 1);
    CHECK(lin.collapse_terms[0].label == "a");
    CHECK(lin.collapse_terms[0].rate == 0.08);
    CHECK(lin.collapse_operator(lin.collapse_terms[0]) == FloatPolynomial::lowering(1, 0));

    const auto k1 = build_case1(0.1, 1.0, bath, Flavor::Kerr), k2 = build_case1(0.25, 1.0, bath, Flavor::Kerr);
    REQUIRE(k1.collapse_terms.size() == 1);
    CHECK(k1.collapse_operator(k1.collapse_terms[0]) == k2.collapse_operator(k2.collapse_terms[0]));
    CHECK(k1.collapse_operator(k1.collapse_terms[0]) == FloatPolynomial::lowering(1, 0));
    CHECK(!k1.generator4.has_value());
}

TEST_CASE("Kerr and effective share the first-order Hamiltonian") {
    const auto bath = BathSpec::flat(0.08);
    const auto k = build_case1(0.2, 1.3, bath, Flavor::Kerr), e = build_case1(0.2, 1.3, bath, Flavor::Effective);
    CHECK(k.effective_hamiltonian() == e.effective_hamiltonian());
    const auto h = e.effective_hamiltonian();
    CHECK(h.coefficient(m1(1, 1)).real() == doctest::Approx(1.3 * (1.0 - 0.2 / 4.0)));
    CHECK(h.coefficient(m1(2, 2)).real() == doctest::Approx(-1.3 * 0.2 / 8.0));
}

TEST_CASE("effective single-mode collapse operators") {
    const auto bath = BathSpec::flat(0.08);
    const auto e = build_case1(0.2, 1.0, bath, Flavor::Effective);
    CHECK(e.generator4.has_value());
    const auto* a = find_channel(e, "a");
    REQUIRE(a != nullptr);
    CHECK(a->rate == 0.08);
    const auto c = e.collapse_operator(*a);
    CHECK(c.coefficient(m1(1, 2)).real() == doctest::Approx(0.025));
    CHECK(c.coefficient(m1(0, 1)).real() == doctest::Approx(1.025));
    REQUIRE(a->exact_series.has_value());
    CHECK(a->exact_series->orders[1].coefficient(m1(1, 2)) == ExactComplex(mpq_class(1, 8)));

    const auto* a3 = find_channel(e, "a^3");
    REQUIRE(a3 != nullptr);
    CHECK(a3->frequency == doctest::Approx(3.0));
    CHECK(std::abs(e.collapse_operator(*a3).coefficient(m1(0, 3))) == doctest::Approx(0.2 / 48.0));
    CHECK(lowering_only(e));

    const auto tab = BathSpec::tabulated({{0.0, 0.0}, {4.0, 4.0}});
    const auto et = build_case1(0.2, 1.0, tab, Flavor::Effective);
    CHECK(find_channel(et, "a^3")->rate == doctest::Approx(3.0));
    CHECK(find_channel(et, "a")->rate == doctest::Approx(1.0));

    BuildOptions no3;
    no3.include_three_photon = false;
    CHECK(build_case1(0.2, 1.0, bath, Flavor::Effective, no3).collapse_terms.size() == 1);
}

TEST_CASE("single-mode number-basis rates") {
    const auto bath = BathSpec::flat(0.05);
    const auto z = build_case1_number_basis(0.0, 1.0, bath, 6);
    CHECK(z.representation == Representation::NumberBasis);
    CHECK(z.collapse_terms.front().rate == doctest::Approx(0.05));
    CHECK(z.collapse_terms.size() == 5);

    const auto m = build_case1_number_basis(0.2, 1.0, bath, 6);
    const auto rates = transition_rates(m);
    CHECK(rates.at({{3}, {0}}) == doctest::Approx((0.2 / 48.0) * (0.2 / 48.0) * 6.0 * 0.05));
    CHECK(rates.at({{2}, {1}}) == doctest::Approx(2.0 * (1.0 + 0.2 * 2 / 8.0) * (1.0 + 0.2 * 2 / 8.0) * 0.05));
    CHECK_THROWS_AS(build_case1_number_basis(0.2, 1.0, bath, 1), InvalidModel);
}

TEST_CASE("expanding the compact model reproduces the closed-form transitions under a flat bath") {
    const auto bath = BathSpec::flat(0.05);
    const double eps = 0.15;
    const auto expanded = expand_to_number_basis(build_case1(eps, 1.0, bath, Flavor::Effective), {7});
    CHECK(expanded.representation == Representation::NumberBasis);
    const auto got = transition_rates(expanded);
    const auto want = transition_rates(build_case1_number_basis(eps, 1.0, bath, 7));
    REQUIRE(got.size() == want.size());
    for (const auto& [k, r] : want) CHECK(got.at(k) == doctest::Approx(r).epsilon(1e-12));
    CHECK_THROWS_AS(expand_to_number_basis(expanded, {7}), Error);
    CHECK_THROWS_AS(expand_to_number_basis(build_case1(eps, 1.0, bath, Flavor::Effective), {7, 7}), ModeMismatch);
}

TEST_CASE("model JSON round trip") {
    const auto bath = BathSpec::flat(0.05);
    for (Flavor f : {Flavor::Linear, Flavor::Kerr, Flavor::Effective}) {
        const auto m = build_case1(0.2, 1.0, bath, f);
        const auto j = to_json(m);
        CHECK(to_json(model_from_json(j)) == j);
    }
    const BareModel bare{0.8, 1.0, 0.27, 0.2};
    const auto m2m = build_case2(bare, hybridize(bare), BathSpec::tabulated({{0.0, 0.1}, {3.0, 0.2}}),
                                 Flavor::Effective);
    const auto j = to_json(m2m);
    CHECK(to_json(model_from_json(j)) == j);
    auto bad = j;
    bad["collapse_terms"][0]["rate"] = -1.0;
    CHECK_THROWS_AS(model_from_json(bad), InvalidModel);
}

TEST_CASE("case 2 at g = 0 couples only the cavity, without corrections") {
    const BareModel bare{0.8, 1.0, 0.0, 0.2};
    const auto h = hybridize(bare);
    for (Flavor f : {Flavor::Linear, Flavor::Effective}) {
        const auto m = build_case2(bare, h, BathSpec::flat(0.04), f);
        REQUIRE(m.collapse_terms.size() == 1);
        CHECK(m.collapse_terms[0].label == "c");
        const auto c = m.collapse_operator(m.collapse_terms[0]);
        CHECK(c.size() == 1);
        CHECK(std::abs(c.coefficient(m2(0, 0, 0, 1))) == doctest::Approx(1.0));
    }
    const auto s = correction_signs(bare, h);
    CHECK(s.r_a == 0.0);
    CHECK(s.r_c == 0.0);
}

TEST_CASE("case 2 channels at the coupled operating point") {
    const BareModel bare{0.8, 1.0, 0.27, 0.2};
    const auto h = hybridize(bare);
    const auto bath = BathSpec::flat(0.04636);
    const auto lin = build_case2(bare, h, bath, Flavor::Linear);
    const auto eff = build_case2(bare, h, bath, Flavor::Effective);
    const auto kerr = build_case2(bare, h, bath, Flavor::Kerr);
    CHECK(lowering_only(eff));
    CHECK(kerr.effective_hamiltonian() == eff.effective_hamiltonian());
    for (const char* label : {"a", "c"}) {
        const auto* l = find_channel(lin, label);
        const auto* e = find_channel(eff, label);
        REQUIRE(l != nullptr);
        REQUIRE(e != nullptr);
        CHECK(e->series.orders[0] == l->series.orders[0]);
        CHECK(e->series.orders.size() == 2);
        CHECK(!e->series.orders[1].is_zero());
        CHECK(e->frequency == l->frequency);
    }
    CHECK(std::abs(find_channel(lin, "a")->series.orders[0].coefficient(m2(0, 1, 0, 0))) ==
          doctest::Approx(std::abs(h.v_ca())));
    CHECK(std::abs(find_channel(lin, "c")->series.orders[0].coefficient(m2(0, 0, 0, 1))) ==
          doctest::Approx(std::abs(h.v_cc())));
    CHECK(find_channel(lin, "a")->frequency == doctest::Approx(h.omega_a));
}

TEST_CASE("correction signs follow the detuning and vanish with g") {
    for (int k = 1; k <= 10; ++k) {
        const BareModel below{0.8, 1.0, 0.4 * k / 10.0, 0.2};
        const auto sb = correction_signs(below, hybridize(below));
        CHECK(sb.r_a > 0);
        CHECK(sb.r_c > 0);
        const BareModel above{1.25, 1.0, 0.5 * k / 10.0, 0.2};
        const auto sa = correction_signs(above, hybridize(above));
        CHECK(sa.r_a > 0);
        CHECK(sa.r_c < 0);
    }
    const BareModel tiny{0.8, 1.0, 1e-4, 0.2}, small{0.8, 1.0, 1e-2, 0.2};
    CHECK(std::abs(correction_signs(tiny, hybridize(tiny)).r_c) <
          std::abs(correction_signs(small, hybridize(small)).r_c));
    const BareModel res{1.0, 1.0, 0.0, 0.2};
    CHECK_THROWS_AS(correction_signs(res, hybridize(res)), ResonantDenominator);
}

TEST_CASE("invalid parameters") {
    const auto bath = BathSpec::flat(0.05);
    CHECK_THROWS_AS(build_case1(1.2, 1.0, bath, Flavor::Effective), InvalidModel);
    CHECK_THROWS_AS(build_case1(0.2, -1.0, bath, Flavor::Effective), InvalidModel);
    BuildOptions o3;
    o3.order = 3;
    CHECK_THROWS_AS(build_case1(0.2, 1.0, bath, Flavor::Effective, o3), InvalidModel);
    CHECK(!build_case1(0.35, 1.0, bath, Flavor::Effective).warnings.empty());
}

TEST_CASE("second-order build adds the eps^2 Hamiltonian only") {
    const auto bath = BathSpec::flat(0.05);
    BuildOptions o2;
    o2.order = 2;
    const auto m = build_case1(0.2, 1.0, bath, Flavor::Effective, o2);
    CHECK(m.hamiltonian.orders.size() == 3);
    CHECK(m.generator6.has_value());
    CHECK(to_number_form(m.hamiltonian.orders[2]).at({2}).real() == doctest::Approx(-3.0 / 128.0));
    const auto m1st = build_case1(0.2, 1.0, bath, Flavor::Effective);
    CHECK(m.collapse_operator(m.collapse_terms[0]) == m1st.collapse_operator(m1st.collapse_terms[0]));
}
