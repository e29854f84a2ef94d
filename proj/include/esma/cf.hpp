#pragma once

#include <gmpxx.h>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "interval.hpp"
#include "poly.hpp"

namespace esma {

/// Point of the projective line; den == 0 is infinity.
struct ProjectivePoint {
    mpz_class num = 0, den = 1;
    bool infinite() const { return den == 0; }
    mpq_class value() const {
        if (den == 0) throw PoleError("point at infinity has no finite value", 0);
        mpq_class v(num, den);
        v.canonicalize();
        return v;
    }
    static ProjectivePoint infinity() { return {1, 0}; }
};

/// x -> (a x + b) / (c x + d), composed by matrix product.
struct MobiusMap {
    mpz_class a = 1, b = 0, c = 0, d = 1;

    static MobiusMap identity() { return {}; }
    /// The CF layer b / (a + x), i.e. the matrix (0 b; 1 a).
    static MobiusMap layer(const mpz_class& an, const mpz_class& bn) { return {0, bn, 1, an}; }

    mpz_class det() const { return a * d - b * c; }

    friend MobiusMap operator*(const MobiusMap& m, const MobiusMap& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    MobiusMap& operator*=(const MobiusMap& o) { return *this = *this * o; }
    friend bool operator==(const MobiusMap& x, const MobiusMap& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }

    /// Adjugate: the inverse up to the scalar det.
    MobiusMap adjugate() const { return {d, -b, -c, a}; }

    /// Same projective map with coprime entries and a canonical overall sign.
    MobiusMap normalized() const {
        mpz_class g = gcd(gcd(a, b), gcd(c, d));
        if (g == 0) return *this;
        MobiusMap r{a / g, b / g, c / g, d / g};
        const mpz_class& lead = r.c != 0 ? r.c : r.d;
        if (lead < 0) r = {-r.a, -r.b, -r.c, -r.d};
        return r;
    }
    bool same_map(const MobiusMap& o) const { return normalized() == o.normalized(); }

    ProjectivePoint apply(const ProjectivePoint& x) const {
        ProjectivePoint r{a * x.num + b * x.den, c * x.num + d * x.den};
        if (r.num == 0 && r.den == 0) throw std::domain_error("degenerate Mobius map");
        return r;
    }
    mpq_class apply(const mpq_class& x) const {
        mpz_class n = a * x.get_num() + b * x.get_den(), m = c * x.get_num() + d * x.get_den();
        if (m == 0) throw PoleError("Mobius pole", 0);
        mpq_class r(n, m);
        r.canonicalize();
        return r;
    }
    /// Image of an interval; throws when the pole -d/c lies inside.
    RationalInterval apply(const RationalInterval& x) const {
        if (c != 0) {
            mpq_class pole(-d, c);
            pole.canonicalize();
            if (x.contains(pole)) throw PoleError("Mobius pole inside interval", 0);
        }
        mpq_class u = apply(x.lo), v = apply(x.hi);
        return u <= v ? RationalInterval(u, v) : RationalInterval(v, u);
    }
    /// Image of infinity: a/c.
    ProjectivePoint at_infinity() const { return apply(ProjectivePoint::infinity()); }

    std::string to_string(const std::string& var = "x") const {
        auto lin = [&](const mpz_class& p, const mpz_class& q) {
            return Poly(std::vector<mpz_class>{q, p}).to_string(var.empty() ? 'x' : var[0]);
        };
        return "(" + lin(a, b) + ")/(" + lin(c, d) + ")";
    }
    json to_json() const { return {{"a", int_to_json(a)}, {"b", int_to_json(b)}, {"c", int_to_json(c)}, {"d", int_to_json(d)}}; }
    static MobiusMap from_json(const json& j) {
        return {int_from_json(j.at("a")), int_from_json(j.at("b")), int_from_json(j.at("c")), int_from_json(j.at("d"))};
    }
};

/// 2x2 matrix of integer polynomials in n.
struct PolyMatrix {
    Poly c, d, e, f;

    static PolyMatrix identity() { return {1, 0, 0, 1}; }
    static PolyMatrix layer(const Poly& a, const Poly& b) { return {0, b, 1, a}; }

    friend PolyMatrix operator*(const PolyMatrix& x, const PolyMatrix& y) {
        return {x.c * y.c + x.d * y.e, x.c * y.d + x.d * y.f, x.e * y.c + x.f * y.e, x.e * y.d + x.f * y.f};
    }
    Poly det() const { return c * f - d * e; }
    MobiusMap at(const mpz_class& n) const { return {c(n), d(n), e(n), f(n)}; }
    MobiusMap at(long n) const { return at(mpz_class(n)); }
    PolyMatrix shifted(long s) const { return {c.shifted(s), d.shifted(s), e.shifted(s), f.shifted(s)}; }
    friend bool operator==(const PolyMatrix& x, const PolyMatrix& y) {
        return x.c == y.c && x.d == y.d && x.e == y.e && x.f == y.f;
    }
};

struct Term {
    mpz_class a, b;
};

/// a0 + b1/(a1 + b2/(a2 + ...)) with terms produced on demand.
struct GeneralizedCF {
    mpz_class a0 = 0;
    std::function<Term(std::size_t)> generator;
    std::optional<std::size_t> length;
    std::string source;

    Term term(std::size_t j) const {
        if (j == 0) throw std::out_of_range("terms are indexed from 1");
        if (length && j > *length) throw std::out_of_range("past the end of a finite continued fraction");
        Term t = generator(j);
        if (t.b == 0) throw std::domain_error("zero partial numerator at index " + std::to_string(j));
        return t;
    }

    static GeneralizedCF from_terms(const mpz_class& a0, std::vector<Term> terms, std::string source = "list") {
        GeneralizedCF cf;
        cf.a0 = a0;
        cf.length = terms.size();
        auto shared = std::make_shared<const std::vector<Term>>(std::move(terms));
        cf.generator = [shared](std::size_t j) { return (*shared)[j - 1]; };
        cf.source = std::move(source);
        return cf;
    }
    static GeneralizedCF from_lists(const mpz_class& a0, const std::vector<mpz_class>& a,
                                    const std::vector<mpz_class>& b, std::string source = "list") {
        if (a.size() != b.size()) throw std::invalid_argument("a and b lists differ in length");
        std::vector<Term> t;
        for (std::size_t i = 0; i < a.size(); ++i) t.push_back({a[i], b[i]});
        return from_terms(a0, std::move(t), std::move(source));
    }
};

struct Convergent {
    mpz_class p, q;
    std::size_t depth = 0;
    bool pole() const { return q == 0; }
    mpq_class value() const {
        if (q == 0) throw PoleError("convergent has zero denominator", depth);
        mpq_class v(p, q);
        v.canonicalize();
        return v;
    }
};

/// Runs the recursion p_j = a_j p_{j-1} + b_j p_{j-2} one term at a time.
class ConvergentStream {
public:
    explicit ConvergentStream(const GeneralizedCF& cf) : cf_(cf) {
        cur_ = {cf.a0, 1, 0};
        prev_ = {1, 0, 0};
    }
    const Convergent& current() const { return cur_; }
    const Convergent& previous() const { return prev_; }
    const Term& last_term() const { return term_; }
    bool exhausted() const { return cf_.length && cur_.depth >= *cf_.length; }

    bool next() {
        if (exhausted()) return false;
        term_ = cf_.term(cur_.depth + 1);
        Convergent n{term_.a * cur_.p + term_.b * prev_.p, term_.a * cur_.q + term_.b * prev_.q, cur_.depth + 1};
        prev_ = std::move(cur_);
        cur_ = std::move(n);
        return true;
    }
    /// Advances to `depth` (or the end of a finite CF).
    void advance_to(std::size_t depth) {
        while (cur_.depth < depth && next()) {}
    }

private:
    const GeneralizedCF& cf_;
    Convergent cur_, prev_;
    Term term_;
};

/// Convergents p_j/q_j for j = 0..depth (fewer for a shorter finite CF). Poles are kept in the
/// list with q = 0; use first_pole to locate them.
inline std::vector<Convergent> convergents(const GeneralizedCF& cf, std::size_t depth) {
    if (depth < 1) throw std::invalid_argument("depth must be positive");
    std::vector<Convergent> out;
    ConvergentStream s(cf);
    out.push_back(s.current());
    while (s.current().depth < depth && s.next()) out.push_back(s.current());
    return out;
}

inline std::optional<std::size_t> first_pole(const std::vector<Convergent>& cs) {
    for (const auto& c : cs)
        if (c.pole()) return c.depth;
    return std::nullopt;
}

inline Convergent convergent_at(const GeneralizedCF& cf, std::size_t depth) {
    ConvergentStream s(cf);
    s.advance_to(depth);
    return s.current();
}

inline mpq_class cf_value(const GeneralizedCF& cf, std::size_t depth) { return convergent_at(cf, depth).value(); }

inline DecimalConstant evaluate_cf(const GeneralizedCF& cf, std::size_t depth, unsigned long digits) {
    Convergent c = convergent_at(cf, depth);
    if (c.pole()) throw PoleError("pole at requested depth", c.depth);
    DecimalConstant dc;
    dc.label = cf.source;
    dc.digits = digits;
    dc.provenance = "cf:" + cf.source + "@" + std::to_string(c.depth);
    mpz_class n = abs(c.p) * pow10(digits);
    mpz_tdiv_q(n.get_mpz_t(), n.get_mpz_t(), mpz_class(abs(c.q)).get_mpz_t());
    dc.scaled = n;
    dc.sign = sgn(c.p) * sgn(c.q) < 0 && n != 0 ? -1 : 1;
    return dc;
}

/// a'_j = g_j a_j, b'_j = g_{j-1} g_j b_j with g_0 = 1.
inline GeneralizedCF equivalence_transform(const GeneralizedCF& cf, std::function<mpz_class(std::size_t)> g) {
    GeneralizedCF out = cf;
    auto inner = cf.generator;
    out.generator = [inner, g](std::size_t j) {
        mpz_class gj = g(j), gp = j == 1 ? mpz_class(1) : g(j - 1);
        if (gj == 0 || gp == 0) throw std::domain_error("equivalence sequence has a zero entry");
        Term t = inner(j);
        return Term{gj * t.a, gp * gj * t.b};
    };
    out.source = cf.source + " (equivalence)";
    return out;
}

/// Product of the layer matrices for terms 1..depth, prefixed by (1 a0; 0 1).
inline MobiusMap layer_product(const GeneralizedCF& cf, std::size_t depth) {
    MobiusMap m{1, cf.a0, 0, 1};
    for (std::size_t j = 1; j <= depth; ++j) {
        Term t = cf.term(j);
        m *= MobiusMap::layer(t.a, t.b);
    }
    return m;
}

/// A target for error measurement: the point value plus its resolution (log10 of the
/// enclosure width).
struct ErrorTarget {
    mpq_class value;
    double resolution_log10 = -std::numeric_limits<double>::infinity();

    static ErrorTarget from(const DecimalConstant& c) {
        return {c.value(), -static_cast<double>(c.digits)};
    }
    static ErrorTarget exact(const mpq_class& v) { return {v, -std::numeric_limits<double>::infinity()}; }
};

/// log10 |p/q - target|, with the insufficient-precision and exact-match cases raised.
inline double log10_error(const Convergent& c, const ErrorTarget& t, double guard = 10.0) {
    if (c.pole()) throw PoleError("pole while measuring error", c.depth);
    mpq_class diff = mpq_class(c.p, c.q) - t.value;
    diff.canonicalize();
    if (diff == 0) throw std::domain_error("exact match, rate undefined");
    double l = log10_abs(diff);
    if (l < t.resolution_log10 + guard)
        throw PrecisionError("approximation error at depth " + std::to_string(c.depth) +
                                 " is below the target resolution",
                             static_cast<long>(-l));
    return l;
}

/// (digits(n1) - digits(n0)) / (n1 - n0) with digits(n) = -log10 |p_n/q_n - target|.
inline double digits_per_term(const GeneralizedCF& cf, const ErrorTarget& target, std::size_t n0 = 0,
                              std::size_t n1 = 100) {
    if (n1 <= n0) throw std::invalid_argument("window must satisfy n0 < n1");
    ConvergentStream s(cf);
    s.advance_to(n0);
    double d0 = -log10_error(s.current(), target);
    s.advance_to(n1);
    double d1 = -log10_error(s.current(), target);
    return (d1 - d0) / static_cast<double>(n1 - n0);
}

inline double digits_per_term(const GeneralizedCF& cf, const DecimalConstant& target, std::size_t n0 = 0,
                              std::size_t n1 = 100) {
    return digits_per_term(cf, ErrorTarget::from(target), n0, n1);
}

/// (depth, log10 error) for every depth 1..depth; stops early at the resolution limit.
inline std::vector<std::pair<std::size_t, double>> convergence_profile(const GeneralizedCF& cf,
                                                                      const ErrorTarget& target,
                                                                      std::size_t depth) {
    std::vector<std::pair<std::size_t, double>> rows;
    ConvergentStream s(cf);
    while (s.current().depth < depth && s.next()) {
        try {
            rows.emplace_back(s.current().depth, log10_error(s.current(), target));
        } catch (const PrecisionError&) {
            break;
        }
    }
    return rows;
}

}  // namespace esma
