#include "eme/boson_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace eme {

ExactComplex& ExactComplex::operator+=(const ExactComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
}

ExactComplex& ExactComplex::operator-=(const ExactComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
}

ExactComplex& ExactComplex::operator*=(const ExactComplex& o) {
    mpq_class r = re * o.re - im * o.im;
    mpq_class i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

ExactComplex& ExactComplex::operator/=(const ExactComplex& o) {
    mpq_class den = o.re * o.re + o.im * o.im;
    if (sgn(den) == 0) throw Error("division by exact zero");
    mpq_class r = (re * o.re + im * o.im) / den;
    mpq_class i = (im * o.re - re * o.im) / den;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
ExactComplex operator-(const ExactComplex& a) { return {mpq_class(-a.re), mpq_class(-a.im)}; }
bool operator==(const ExactComplex& a, const ExactComplex& b) { return a.re == b.re && a.im == b.im; }
ExactComplex conj(const ExactComplex& a) { return {a.re, mpq_class(-a.im)}; }

std::string rational_string(const mpq_class& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

mpq_class parse_rational(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw Error("malformed rational '" + s + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const ExactComplex& c) {
    if (sgn(c.im) == 0) return c.re.get_str();
    if (sgn(c.re) == 0) return c.im.get_str() + "i";
    return "(" + c.re.get_str() + (sgn(c.im) > 0 ? "+" : "") + c.im.get_str() + "i)";
}

namespace {

std::string coefficient_string(const ExactComplex& c) { return to_string(c); }

std::string coefficient_string(const std::complex<double>& c) {
    std::ostringstream os;
    os.precision(12);
    if (c.imag() == 0.0) {
        os << c.real();
    } else if (c.real() == 0.0) {
        os << c.imag() << "i";
    } else {
        os << "(" << c.real() << (c.imag() >= 0 ? "+" : "") << c.imag() << "i)";
    }
    return os.str();
}

// C(n,k) C(p,k) k! for the single-mode product rule.
unsigned long long contraction_weight(unsigned n, unsigned p, unsigned k) {
    auto binom = [](unsigned a, unsigned b) {
        unsigned long long r = 1;
        for (unsigned i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    unsigned long long f = 1;
    for (unsigned i = 2; i <= k; ++i) f *= i;
    return binom(n, k) * binom(p, k) * f;
}

} // namespace

Monomial Monomial::single(std::size_t modes, std::size_t mode, unsigned dag, unsigned low) {
    if (mode >= modes) throw ModeMismatch("mode index out of range");
    Monomial m(modes);
    m.powers_[mode] = {dag, low};
    return m;
}

unsigned Monomial::degree() const {
    unsigned d = 0;
    for (const auto& p : powers_) d += p.dag + p.low;
    return d;
}

bool Monomial::is_secular() const {
    return std::all_of(powers_.begin(), powers_.end(), [](const ExponentPair& p) { return p.dag == p.low; });
}

bool Monomial::is_identity() const { return degree() == 0; }

Monomial Monomial::dagger() const {
    Monomial m(*this);
    for (auto& p : m.powers_) std::swap(p.dag, p.low);
    return m;
}

std::vector<int> Monomial::signature() const {
    std::vector<int> s;
    s.reserve(powers_.size());
    for (const auto& p : powers_) s.push_back(static_cast<int>(p.dag) - static_cast<int>(p.low));
    return s;
}

std::vector<std::string> default_mode_labels(std::size_t modes) {
    if (modes == 1) return {"a"};
    if (modes == 2) return {"a", "c"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < modes; ++i) out.push_back("b" + std::to_string(i));
    return out;
}

std::string Monomial::to_string(const std::vector<std::string>& labels_in) const {
    auto labels = labels_in.empty() ? default_mode_labels(modes()) : labels_in;
    std::string out;
    auto factor = [&](const std::string& sym, unsigned k) {
        if (k == 0) return;
        if (!out.empty()) out += " ";
        out += sym;
        if (k > 1) out += "^" + std::to_string(k);
    };
    for (std::size_t i = 0; i < modes(); ++i) factor(labels[i] + "\xE2\x80\xA0", powers_[i].dag);
    for (std::size_t i = 0; i < modes(); ++i) factor(labels[i], powers_[i].low);
    return out.empty() ? "1" : out;
}

template <class C>
OperatorPolynomial<C> OperatorPolynomial<C>::identity(std::size_t modes, const C& c) {
    OperatorPolynomial p(modes);
    p.add(Monomial(modes), c);
    return p;
}

template <class C>
OperatorPolynomial<C> OperatorPolynomial<C>::monomial(const Monomial& m, const C& c) {
    OperatorPolynomial p(m.modes());
    p.add(m, c);
    return p;
}

template <class C>
OperatorPolynomial<C> OperatorPolynomial<C>::lowering(std::size_t modes, std::size_t mode) {
    return monomial(Monomial::single(modes, mode, 0, 1));
}

template <class C>
OperatorPolynomial<C> OperatorPolynomial<C>::raising(std::size_t modes, std::size_t mode) {
    return monomial(Monomial::single(modes, mode, 1, 0));
}

template <class C>
OperatorPolynomial<C> OperatorPolynomial<C>::number(std::size_t modes, std::size_t mode) {
    return monomial(Monomial::single(modes, mode, 1, 1));
}

template <class C>
OperatorPolynomial<C> OperatorPolynomial<C>::quadrature_x(std::size_t modes, std::size_t mode) {
    return lowering(modes, mode) + raising(modes, mode);
}

template <class C>
OperatorPolynomial<C> OperatorPolynomial<C>::quadrature_y(std::size_t modes, std::size_t mode) {
    return (raising(modes, mode) - lowering(modes, mode)) * Traits::i();
}

template <class C>
OperatorPolynomial<C> OperatorPolynomial<C>::from_word(std::size_t modes, const std::vector<Ladder>& word,
                                                       const C& c, const AlgebraOptions& opts) {
    auto result = identity(modes, c);
    for (const auto& l : word) {
        auto factor = l.dagger ? raising(modes, l.mode) : lowering(modes, l.mode);
        result = multiply(result, factor, opts);
    }
    return result;
}

template <class C>
void OperatorPolynomial<C>::add(const Monomial& m, const C& c) {
    if (m.modes() != modes_) throw ModeMismatch("monomial mode count does not match polynomial");
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        if (!Traits::is_zero(c)) terms_.emplace(m, c);
        return;
    }
    it->second += c;
    if (Traits::is_zero(it->second)) terms_.erase(it);
}

template <class C>
unsigned OperatorPolynomial<C>::degree() const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
}

template <class C>
C OperatorPolynomial<C>::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? C(0) : it->second;
}

template <class C>
void OperatorPolynomial<C>::check_context(const OperatorPolynomial& o) const {
    if (modes_ != o.modes_)
        throw ModeMismatch("mode context mismatch: " + std::to_string(modes_) + " vs " + std::to_string(o.modes_));
}

template <class C>
OperatorPolynomial<C>& OperatorPolynomial<C>::operator+=(const OperatorPolynomial& o) {
    check_context(o);
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
}

template <class C>
OperatorPolynomial<C>& OperatorPolynomial<C>::operator-=(const OperatorPolynomial& o) {
    check_context(o);
    for (const auto& [m, c] : o.terms_) add(m, C(0) - c);
    return *this;
}

template <class C>
OperatorPolynomial<C>& OperatorPolynomial<C>::operator*=(const C& s) {
    if (Traits::is_zero(s)) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= s;
        if (Traits::is_zero(it->second))
            it = terms_.erase(it);
        else
            ++it;
    }
    return *this;
}

template <class C>
std::string OperatorPolynomial<C>::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
        if (!out.empty()) out += " + ";
        out += coefficient_string(c);
        if (!m.is_identity()) out += " " + m.to_string();
    }
    return out;
}

template <class C>
OperatorPolynomial<C> multiply(const OperatorPolynomial<C>& p, const OperatorPolynomial<C>& q,
                               const AlgebraOptions& opts) {
    if (p.modes() != q.modes()) throw ModeMismatch("multiply: mode context mismatch");
    if (p.degree() + q.degree() > opts.max_degree)
        throw DegreeCapExceeded("product degree " + std::to_string(p.degree() + q.degree()) + " exceeds cap " +
                                std::to_string(opts.max_degree));
    const std::size_t modes = p.modes();
    std::map<Monomial, C> acc;
    // Per-mode expansions of (b^dag^m b^n)(b^dag^r b^s), combined as a cartesian product.
    struct Piece {
        ExponentPair e;
        unsigned long long w;
    };
    std::vector<std::vector<Piece>> per_mode(modes);
    for (const auto& [mp, cp] : p.terms()) {
        for (const auto& [mq, cq] : q.terms()) {
            for (std::size_t i = 0; i < modes; ++i) {
                auto& list = per_mode[i];
                list.clear();
                const auto [m, n] = mp[i];
                const auto [r, s] = mq[i];
                for (unsigned k = 0; k <= std::min(n, r); ++k)
                    list.push_back({{m + r - k, n + s - k}, contraction_weight(n, r, k)});
            }
            const C base = cp * cq;
            std::vector<std::size_t> idx(modes, 0);
            bool more = true;
            while (more) {
                Monomial out(modes);
                unsigned long long w = 1;
                for (std::size_t i = 0; i < modes; ++i) {
                    out[i] = per_mode[i][idx[i]].e;
                    w *= per_mode[i][idx[i]].w;
                }
                C term = base * C(static_cast<long>(w));
                auto it = acc.find(out);
                if (it == acc.end())
                    acc.emplace(std::move(out), std::move(term));
                else
                    it->second += term;
                more = false;
                for (std::size_t i = modes; i-- > 0;) {
                    if (++idx[i] < per_mode[i].size()) {
                        more = true;
                        break;
                    }
                    idx[i] = 0;
                }
            }
        }
    }
    OperatorPolynomial<C> result(modes);
    for (auto& [m, c] : acc)
        if (!CoefficientTraits<C>::is_zero(c)) result.add(m, c);
    return result;
}

template <class C>
OperatorPolynomial<C> commutator(const OperatorPolynomial<C>& p, const OperatorPolynomial<C>& q,
                                 const AlgebraOptions& opts) {
    return multiply(p, q, opts) - multiply(q, p, opts);
}

template <class C>
OperatorPolynomial<C> anticommutator(const OperatorPolynomial<C>& p, const OperatorPolynomial<C>& q,
                                     const AlgebraOptions& opts) {
    return multiply(p, q, opts) + multiply(q, p, opts);
}

template <class C>
OperatorPolynomial<C> power(const OperatorPolynomial<C>& p, unsigned k, const AlgebraOptions& opts) {
    auto result = OperatorPolynomial<C>::identity(p.modes());
    for (unsigned i = 0; i < k; ++i) result = multiply(result, p, opts);
    return result;
}

template <class C>
SecularSplit<C> split_secular(const OperatorPolynomial<C>& p) {
    SecularSplit<C> s{OperatorPolynomial<C>(p.modes()), OperatorPolynomial<C>(p.modes())};
    for (const auto& [m, c] : p.terms()) (m.is_secular() ? s.secular : s.nonsecular).add(m, c);
    return s;
}

template <class C>
bool is_secular(const OperatorPolynomial<C>& p) {
    return std::all_of(p.terms().begin(), p.terms().end(), [](const auto& t) { return t.first.is_secular(); });
}

template <class C>
OperatorPolynomial<C> dagger(const OperatorPolynomial<C>& p) {
    OperatorPolynomial<C> out(p.modes());
    for (const auto& [m, c] : p.terms()) out.add(m.dagger(), CoefficientTraits<C>::conj(c));
    return out;
}

FloatPolynomial to_float(const ExactPolynomial& p) {
    FloatPolynomial out(p.modes());
    for (const auto& [m, c] : p.terms()) out.add(m, c.to_complex());
    return out;
}

namespace {

// Coefficients of the falling factorial n(n-1)...(n-k+1) in powers of n.
std::vector<long> falling_factorial_coefficients(unsigned k) {
    std::vector<long> poly{1};
    for (unsigned j = 0; j < k; ++j) {
        std::vector<long> next(poly.size() + 1, 0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] += poly[i];
            next[i] -= static_cast<long>(j) * poly[i];
        }
        poly = std::move(next);
    }
    return poly;
}

// Stirling numbers of the second kind S(j, k) for k = 0..j.
std::vector<long> stirling_second_row(unsigned j) {
    std::vector<std::vector<long>> s(j + 1, std::vector<long>(j + 1, 0));
    s[0][0] = 1;
    for (unsigned n = 1; n <= j; ++n)
        for (unsigned k = 1; k <= n; ++k) s[n][k] = k * s[n - 1][k] + s[n - 1][k - 1];
    return s[j];
}

} // namespace

template <class C>
NumberPolynomial<C> to_number_form(const OperatorPolynomial<C>& p) {
    NumberPolynomial<C> out;
    const std::size_t modes = p.modes();
    for (const auto& [m, c] : p.terms()) {
        if (!m.is_secular()) throw Error("to_number_form: non-secular monomial " + m.to_string());
        std::map<std::vector<unsigned>, long> expansion{{std::vector<unsigned>(modes, 0), 1}};
        for (std::size_t i = 0; i < modes; ++i) {
            auto ff = falling_factorial_coefficients(m[i].dag);
            std::map<std::vector<unsigned>, long> next;
            for (const auto& [key, w] : expansion) {
                for (std::size_t e = 0; e < ff.size(); ++e) {
                    if (ff[e] == 0) continue;
                    auto k = key;
                    k[i] = static_cast<unsigned>(e);
                    next[k] += w * ff[e];
                }
            }
            expansion = std::move(next);
        }
        for (const auto& [key, w] : expansion) {
            if (w == 0) continue;
            out[key] += c * C(w);
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (CoefficientTraits<C>::is_zero(it->second))
            it = out.erase(it);
        else
            ++it;
    }
    return out;
}

template <class C>
OperatorPolynomial<C> from_number_form(std::size_t modes, const NumberPolynomial<C>& n) {
    OperatorPolynomial<C> out(modes);
    for (const auto& [key, c] : n) {
        if (key.size() != modes) throw ModeMismatch("from_number_form: exponent vector size mismatch");
        std::map<std::vector<unsigned>, long> expansion{{std::vector<unsigned>(modes, 0), 1}};
        for (std::size_t i = 0; i < modes; ++i) {
            auto row = stirling_second_row(key[i]);
            std::map<std::vector<unsigned>, long> next;
            for (const auto& [k0, w] : expansion) {
                for (std::size_t k = 0; k < row.size(); ++k) {
                    if (row[k] == 0) continue;
                    auto k1 = k0;
                    k1[i] = static_cast<unsigned>(k);
                    next[k1] += w * row[k];
                }
            }
            expansion = std::move(next);
        }
        for (const auto& [k, w] : expansion) {
            Monomial m(modes);
            for (std::size_t i = 0; i < modes; ++i) m[i] = {k[i], k[i]};
            out.add(m, c * C(w));
        }
    }
    return out;
}

long total_dimension(const std::vector<int>& dims, const MatrixOptions& opts) {
    long total = 1;
    for (int d : dims) {
        if (d < 1) throw Error("truncation dimension must be >= 1");
        total *= d;
        if (total > opts.max_total_dim)
            throw DimensionOverflow("total Fock dimension exceeds cap " + std::to_string(opts.max_total_dim));
    }
    return total;
}

template <class C>
SparseMatrix to_sparse_matrix(const OperatorPolynomial<C>& p, const std::vector<int>& dims,
                              const MatrixOptions& opts) {
    if (dims.size() != p.modes()) throw ModeMismatch("to_matrix: truncation has wrong number of modes");
    const long total = total_dimension(dims, opts);
    const std::size_t modes = dims.size();
    std::vector<long> stride(modes, 1);
    for (std::size_t i = modes; i-- > 1;) stride[i - 1] = stride[i] * dims[i];

    std::vector<Eigen::Triplet<std::complex<double>>> triplets;
    std::vector<int> level(modes);
    for (long col = 0; col < total; ++col) {
        long rem = col;
        for (std::size_t i = 0; i < modes; ++i) {
            level[i] = static_cast<int>(rem / stride[i]);
            rem %= stride[i];
        }
        for (const auto& [m, c] : p.terms()) {
            double amp = 1.0;
            long row = 0;
            bool alive = true;
            for (std::size_t i = 0; i < modes && alive; ++i) {
                int k = level[i];
                const int n = static_cast<int>(m[i].low);
                const int dg = static_cast<int>(m[i].dag);
                if (k < n) {
                    alive = false;
                    break;
                }
                for (int j = 0; j < n; ++j) amp *= std::sqrt(static_cast<double>(k - j));
                k -= n;
                if (k + dg >= dims[i]) {
                    alive = false;
                    break;
                }
                for (int j = 1; j <= dg; ++j) amp *= std::sqrt(static_cast<double>(k + j));
                k += dg;
                row += k * stride[i];
            }
            if (alive) triplets.emplace_back(row, col, CoefficientTraits<C>::to_complex(c) * amp);
        }
    }
    SparseMatrix s(total, total);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return s;
}

template <class C>
Eigen::MatrixXcd to_matrix(const OperatorPolynomial<C>& p, const std::vector<int>& dims, const MatrixOptions& opts) {
    return Eigen::MatrixXcd(to_sparse_matrix(p, dims, opts));
}

namespace {

nlohmann::ordered_json coefficient_json(const mpq_class& q) { return rational_string(q); }
nlohmann::ordered_json coefficient_json(double d) { return d; }

template <class C>
C coefficient_from_json(const nlohmann::ordered_json& re, const nlohmann::ordered_json& im);

template <>
ExactComplex coefficient_from_json<ExactComplex>(const nlohmann::ordered_json& re, const nlohmann::ordered_json& im) {
    if (!re.is_string() || !im.is_string()) throw Error("exact polynomial JSON requires \"p/q\" strings");
    return {parse_rational(re.get<std::string>()), parse_rational(im.get<std::string>())};
}

template <>
std::complex<double> coefficient_from_json<std::complex<double>>(const nlohmann::ordered_json& re, const nlohmann::ordered_json& im) {
    auto value = [](const nlohmann::ordered_json& j) {
        if (j.is_number()) return j.get<double>();
        if (j.is_string()) return parse_rational(j.get<std::string>()).get_d();
        throw Error("polynomial JSON coefficient must be a number or \"p/q\" string");
    };
    return {value(re), value(im)};
}

} // namespace

template <class C>
nlohmann::ordered_json to_json(const OperatorPolynomial<C>& p) {
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const auto& [m, c] : p.terms()) {
        nlohmann::ordered_json exps = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < m.modes(); ++i) exps.push_back({m[i].dag, m[i].low});
        nlohmann::ordered_json t;
        t["exponents"] = exps;
        if constexpr (CoefficientTraits<C>::exact) {
            t["re"] = coefficient_json(c.re);
            t["im"] = coefficient_json(c.im);
        } else {
            t["re"] = coefficient_json(c.real());
            t["im"] = coefficient_json(c.imag());
        }
        terms.push_back(std::move(t));
    }
    return {{"modes", p.modes()}, {"terms", terms}};
}

template <class C>
OperatorPolynomial<C> polynomial_from_json(const nlohmann::ordered_json& j) {
    const auto modes = j.at("modes").get<std::size_t>();
    OperatorPolynomial<C> p(modes);
    for (const auto& t : j.at("terms")) {
        const auto& exps = t.at("exponents");
        if (exps.size() != modes) throw Error("polynomial JSON: exponent list length differs from mode count");
        Monomial m(modes);
        for (std::size_t i = 0; i < modes; ++i) m[i] = {exps[i].at(0).get<unsigned>(), exps[i].at(1).get<unsigned>()};
        p.add(m, coefficient_from_json<C>(t.at("re"), t.at("im")));
    }
    return p;
}

template <class C>
WordCensus count_word_expansion(const std::vector<C>& mode_weights, unsigned power) {
    // Each factor contributes one of 2N ladder operators; zero-weight modes are skipped.
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < mode_weights.size(); ++i)
        if (!CoefficientTraits<C>::is_zero(mode_weights[i])) active.push_back(i);
    WordCensus census;
    const std::size_t choices = 2 * active.size();
    if (choices == 0) return census;
    std::vector<std::size_t> word(power, 0);
    std::vector<int> balance(mode_weights.size());
    while (true) {
        std::fill(balance.begin(), balance.end(), 0);
        for (auto w : word) balance[active[w / 2]] += (w % 2 == 0) ? 1 : -1;
        ++census.total;
        if (std::all_of(balance.begin(), balance.end(), [](int b) { return b == 0; }))
            ++census.secular;
        else
            ++census.nonsecular;
        std::size_t i = power;
        while (i > 0) {
            --i;
            if (++word[i] < choices) break;
            word[i] = 0;
            if (i == 0) return census;
        }
        if (power == 0) return census;
    }
}

template <class C>
OperatorPolynomial<C> PolynomialSeries<C>::evaluate(const typename CoefficientTraits<C>::Real& eps) const {
    OperatorPolynomial<C> out(modes);
    typename CoefficientTraits<C>::Real w(1);
    for (const auto& term : orders) {
        out += term * CoefficientTraits<C>::from_real(w);
        w = w * eps;
    }
    return out;
}

FloatSeries to_float(const ExactSeries& s) {
    FloatSeries out;
    out.modes = s.modes;
    for (const auto& o : s.orders) out.orders.push_back(to_float(o));
    return out;
}

#define EME_INSTANTIATE(C)                                                                                  \
    template class OperatorPolynomial<C>;                                                                  \
    template struct PolynomialSeries<C>;                                                                   \
    template OperatorPolynomial<C> multiply(const OperatorPolynomial<C>&, const OperatorPolynomial<C>&,    \
                                            const AlgebraOptions&);                                        \
    template OperatorPolynomial<C> commutator(const OperatorPolynomial<C>&, const OperatorPolynomial<C>&,  \
                                              const AlgebraOptions&);                                      \
    template OperatorPolynomial<C> anticommutator(const OperatorPolynomial<C>&,                            \
                                                  const OperatorPolynomial<C>&, const AlgebraOptions&);    \
    template OperatorPolynomial<C> power(const OperatorPolynomial<C>&, unsigned, const AlgebraOptions&);   \
    template SecularSplit<C> split_secular(const OperatorPolynomial<C>&);                                  \
    template bool is_secular(const OperatorPolynomial<C>&);                                                \
    template OperatorPolynomial<C> dagger(const OperatorPolynomial<C>&);                                   \
    template NumberPolynomial<C> to_number_form(const OperatorPolynomial<C>&);                             \
    template OperatorPolynomial<C> from_number_form(std::size_t, const NumberPolynomial<C>&);              \
    template Eigen::MatrixXcd to_matrix(const OperatorPolynomial<C>&, const std::vector<int>&,             \
                                        const MatrixOptions&);                                             \
    template SparseMatrix to_sparse_matrix(const OperatorPolynomial<C>&, const std::vector<int>&,          \
                                           const MatrixOptions&);                                          \
    template nlohmann::ordered_json to_json(const OperatorPolynomial<C>&);                                         \
    template OperatorPolynomial<C> polynomial_from_json(const nlohmann::ordered_json&);                            \
    template WordCensus count_word_expansion(const std::vector<C>&, unsigned);

EME_INSTANTIATE(ExactComplex)
EME_INSTANTIATE(std::complex<double>)

#undef EME_INSTANTIATE

} // namespace eme
