#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <gmpxx.h>
#include <json.hpp>

#include "eme/errors.hpp"

namespace eme {

// Complex rational number; both parts are arbitrary-precision rationals.
struct ExactComplex {
    mpq_class re{0};
    mpq_class im{0};

    ExactComplex() = default;
    ExactComplex(long r) : re(r) {}
    ExactComplex(mpq_class r) : re(std::move(r)) {}
    ExactComplex(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

    static ExactComplex imaginary_unit() { return {mpq_class(0), mpq_class(1)}; }

    ExactComplex& operator+=(const ExactComplex& o);
    ExactComplex& operator-=(const ExactComplex& o);
    ExactComplex& operator*=(const ExactComplex& o);
    ExactComplex& operator/=(const ExactComplex& o);

    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

ExactComplex operator+(ExactComplex a, const ExactComplex& b);
ExactComplex operator-(ExactComplex a, const ExactComplex& b);
ExactComplex operator*(ExactComplex a, const ExactComplex& b);
ExactComplex operator/(ExactComplex a, const ExactComplex& b);
ExactComplex operator-(const ExactComplex& a);
bool operator==(const ExactComplex& a, const ExactComplex& b);
ExactComplex conj(const ExactComplex& a);
std::string to_string(const ExactComplex& c);

// Canonical "p/q" rendering (integers carry "/1") and its inverse.
std::string rational_string(const mpq_class& q);
mpq_class parse_rational(const std::string& s);

template <class C>
struct CoefficientTraits;

template <>
struct CoefficientTraits<ExactComplex> {
    using Real = mpq_class;
    static constexpr bool exact = true;
    static bool is_zero(const ExactComplex& c) { return c.is_zero(); }
    static ExactComplex conj(const ExactComplex& c) { return eme::conj(c); }
    static std::complex<double> to_complex(const ExactComplex& c) { return c.to_complex(); }
    static double to_double(const Real& r) { return r.get_d(); }
    static ExactComplex from_real(const Real& r) { return ExactComplex(r); }
    static ExactComplex i() { return ExactComplex::imaginary_unit(); }
};

template <>
struct CoefficientTraits<std::complex<double>> {
    using Real = double;
    static constexpr bool exact = false;
    // Float mode prunes any coefficient with modulus at or below this value.
    static constexpr double zero_tolerance = 1e-14;
    static bool is_zero(const std::complex<double>& c) { return std::abs(c) <= zero_tolerance; }
    static std::complex<double> conj(const std::complex<double>& c) { return std::conj(c); }
    static std::complex<double> to_complex(const std::complex<double>& c) { return c; }
    static double to_double(double r) { return r; }
    static std::complex<double> from_real(double r) { return {r, 0.0}; }
    static std::complex<double> i() { return {0.0, 1.0}; }
};

struct ExponentPair {
    unsigned dag = 0; // power of the creation operator
    unsigned low = 0; // power of the annihilation operator
    auto operator<=>(const ExponentPair&) const = default;
};

// Normal-ordered product over modes of (b_i^dag)^m_i b_i^n_i.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::size_t modes) : powers_(modes) {}
    explicit Monomial(std::vector<ExponentPair> powers) : powers_(std::move(powers)) {}

    static Monomial single(std::size_t modes, std::size_t mode, unsigned dag, unsigned low);

    std::size_t modes() const { return powers_.size(); }
    const ExponentPair& operator[](std::size_t mode) const { return powers_[mode]; }
    ExponentPair& operator[](std::size_t mode) { return powers_[mode]; }
    const std::vector<ExponentPair>& powers() const { return powers_; }

    unsigned degree() const;
    bool is_secular() const;
    bool is_identity() const;
    Monomial dagger() const;
    // m - n per mode; the excitation change produced by the monomial.
    std::vector<int> signature() const;
    std::string to_string(const std::vector<std::string>& labels = {}) const;

    auto operator<=>(const Monomial&) const = default;

private:
    std::vector<ExponentPair> powers_;
};

// Mode names used for printing: "a", "c" for two modes, "a" for one, "b<i>" otherwise.
std::vector<std::string> default_mode_labels(std::size_t modes);

struct Ladder {
    std::size_t mode = 0;
    bool dagger = false;
};

struct AlgebraOptions {
    unsigned max_degree = 8;
};

template <class C>
class OperatorPolynomial {
public:
    using Coefficient = C;
    using Traits = CoefficientTraits<C>;
    using Real = typename Traits::Real;
    using Terms = std::map<Monomial, C>;

    OperatorPolynomial() = default;
    explicit OperatorPolynomial(std::size_t modes) : modes_(modes) {}

    static OperatorPolynomial identity(std::size_t modes, const C& c = C(1));
    static OperatorPolynomial monomial(const Monomial& m, const C& c = C(1));
    static OperatorPolynomial lowering(std::size_t modes, std::size_t mode);
    static OperatorPolynomial raising(std::size_t modes, std::size_t mode);
    static OperatorPolynomial number(std::size_t modes, std::size_t mode);
    // X = b + b^dag
    static OperatorPolynomial quadrature_x(std::size_t modes, std::size_t mode);
    // Y = i(b^dag - b)
    static OperatorPolynomial quadrature_y(std::size_t modes, std::size_t mode);
    // Product of ladder operators in the given (arbitrary) order, normal-ordered.
    static OperatorPolynomial from_word(std::size_t modes, const std::vector<Ladder>& word,
                                        const C& c = C(1), const AlgebraOptions& opts = {});

    void add(const Monomial& m, const C& c);

    std::size_t modes() const { return modes_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    unsigned degree() const;
    C coefficient(const Monomial& m) const;

    OperatorPolynomial& operator+=(const OperatorPolynomial& o);
    OperatorPolynomial& operator-=(const OperatorPolynomial& o);
    OperatorPolynomial& operator*=(const C& s);

    std::string to_string() const;

    bool operator==(const OperatorPolynomial& o) const { return modes_ == o.modes_ && terms_ == o.terms_; }

private:
    void check_context(const OperatorPolynomial& o) const;

    std::size_t modes_ = 0;
    Terms terms_;
};

using ExactPolynomial = OperatorPolynomial<ExactComplex>;
using FloatPolynomial = OperatorPolynomial<std::complex<double>>;

template <class C>
OperatorPolynomial<C> operator+(OperatorPolynomial<C> p, const OperatorPolynomial<C>& q) { return p += q; }
template <class C>
OperatorPolynomial<C> operator-(OperatorPolynomial<C> p, const OperatorPolynomial<C>& q) { return p -= q; }
template <class C>
OperatorPolynomial<C> operator-(OperatorPolynomial<C> p) { return p *= C(-1); }
template <class C>
OperatorPolynomial<C> operator*(const C& s, OperatorPolynomial<C> p) { return p *= s; }
template <class C>
OperatorPolynomial<C> operator*(OperatorPolynomial<C> p, const C& s) { return p *= s; }

template <class C>
OperatorPolynomial<C> multiply(const OperatorPolynomial<C>& p, const OperatorPolynomial<C>& q,
                               const AlgebraOptions& opts = {});
template <class C>
OperatorPolynomial<C> operator*(const OperatorPolynomial<C>& p, const OperatorPolynomial<C>& q) {
    return multiply(p, q);
}
template <class C>
OperatorPolynomial<C> commutator(const OperatorPolynomial<C>& p, const OperatorPolynomial<C>& q,
                                 const AlgebraOptions& opts = {});
template <class C>
OperatorPolynomial<C> anticommutator(const OperatorPolynomial<C>& p, const OperatorPolynomial<C>& q,
                                     const AlgebraOptions& opts = {});
template <class C>
OperatorPolynomial<C> power(const OperatorPolynomial<C>& p, unsigned k, const AlgebraOptions& opts = {});

template <class C>
struct SecularSplit {
    OperatorPolynomial<C> secular;
    OperatorPolynomial<C> nonsecular;
};

template <class C>
SecularSplit<C> split_secular(const OperatorPolynomial<C>& p);
template <class C>
bool is_secular(const OperatorPolynomial<C>& p);
template <class C>
OperatorPolynomial<C> dagger(const OperatorPolynomial<C>& p);

FloatPolynomial to_float(const ExactPolynomial& p);

// Polynomial in number operators: exponent vector (one entry per mode) -> coefficient.
template <class C>
using NumberPolynomial = std::map<std::vector<unsigned>, C>;

// Rewrites a secular polynomial in powers of n_i; throws Error on non-secular input.
template <class C>
NumberPolynomial<C> to_number_form(const OperatorPolynomial<C>& p);
template <class C>
OperatorPolynomial<C> from_number_form(std::size_t modes, const NumberPolynomial<C>& n);

struct MatrixOptions {
    long max_total_dim = 4096;
};

using SparseMatrix = Eigen::SparseMatrix<std::complex<double>>;

long total_dimension(const std::vector<int>& dims, const MatrixOptions& opts = {});

// Tensor-product Fock basis with mode 0 as the slowest index.
template <class C>
Eigen::MatrixXcd to_matrix(const OperatorPolynomial<C>& p, const std::vector<int>& dims,
                           const MatrixOptions& opts = {});
template <class C>
SparseMatrix to_sparse_matrix(const OperatorPolynomial<C>& p, const std::vector<int>& dims,
                              const MatrixOptions& opts = {});

// JSON: {"modes": N, "terms": [{"exponents": [[m,n],...], "re": ..., "im": ...}]}.
// Exact coefficients are "p/q" strings, float coefficients are numbers.
template <class C>
nlohmann::ordered_json to_json(const OperatorPolynomial<C>& p);
template <class C>
OperatorPolynomial<C> polynomial_from_json(const nlohmann::ordered_json& j);

// Term census of (sum_i c_i (b_i + b_i^dag))^power before normal ordering.
struct WordCensus {
    std::size_t total = 0;
    std::size_t secular = 0;
    std::size_t nonsecular = 0;
};

template <class C>
WordCensus count_word_expansion(const std::vector<C>& mode_weights, unsigned power);

// Truncated power series sum_k eps^k orders[k].
template <class C>
struct PolynomialSeries {
    std::size_t modes = 0;
    std::vector<OperatorPolynomial<C>> orders;

    OperatorPolynomial<C> evaluate(const typename CoefficientTraits<C>::Real& eps) const;
};

using ExactSeries = PolynomialSeries<ExactComplex>;
using FloatSeries = PolynomialSeries<std::complex<double>>;

FloatSeries to_float(const ExactSeries& s);

} // namespace eme
