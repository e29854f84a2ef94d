#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bigint.hpp"

namespace esma {

/// Dense integer polynomial, ascending coefficients, no trailing zeros.
class Poly {
public:
    Poly() = default;
    Poly(long c) { if (c != 0) c_.emplace_back(c); }
    Poly(const mpz_class& c) { if (c != 0) c_.push_back(c); }
    explicit Poly(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<long> coeffs) {
        for (long v : coeffs) c_.emplace_back(v);
        trim();
    }

    static Poly var() { return Poly({0, 1}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    const std::vector<mpz_class>& coeffs() const { return c_; }
    mpz_class coeff(std::size_t k) const { return k < c_.size() ? c_[k] : mpz_class(0); }
    mpz_class lead() const { return c_.empty() ? mpz_class(0) : c_.back(); }
    mpz_class constant() const { return coeff(0); }

    mpz_class operator()(const mpz_class& x) const {
        mpz_class r = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
        return r;
    }
    mpz_class operator()(long x) const { return (*this)(mpz_class(x)); }

    mpq_class operator()(const mpq_class& x) const {
        mpq_class r = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + mpq_class(*it);
        return r;
    }

    /// p(q(n)).
    Poly compose(const Poly& q) const {
        Poly r;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * q + Poly(*it);
        return r;
    }
    /// p(n + s).
    Poly shifted(const mpz_class& s) const { return compose(Poly(std::vector<mpz_class>{s, 1})); }
    Poly shifted(long s) const { return shifted(mpz_class(s)); }
    /// p(a*n + b).
    Poly affine(long a, long b) const {
        return compose(Poly(std::vector<mpz_class>{mpz_class(b), mpz_class(a)}));
    }

    Poly operator-() const {
        Poly r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }
    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o) { return *this += -o; }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<mpz_class> r(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(r));
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    friend bool operator<(const Poly& a, const Poly& b) {
        if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
        return a.c_ < b.c_;
    }

    mpz_class content() const {
        mpz_class g = 0;
        for (const auto& v : c_) g = gcd(g, v);
        return g;
    }

    Poly exact_div(const mpz_class& d) const {
        Poly r = *this;
        for (auto& v : r.c_) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), d.get_mpz_t());
        return r;
    }

    std::string to_string(char v = 'n') const {
        if (c_.empty()) return "0";
        std::string out;
        for (int k = degree(); k >= 0; --k) {
            const mpz_class& a = c_[k];
            if (a == 0) continue;
            mpz_class m = abs(a);
            std::string term;
            if (k == 0 || m != 1) term = esma::to_string(m);
            if (k >= 1) term += v;
            if (k >= 2) term += "^" + std::to_string(k);
            if (out.empty()) out = (a < 0 ? "-" : "") + term;
            else out += (a < 0 ? "-" : "+") + term;
        }
        return out;
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& v : c_) arr.push_back(int_to_json(v));
        return arr;
    }
    static Poly from_json(const json& j) {
        if (j.is_number() || j.is_string()) return Poly(int_from_json(j));
        if (!j.is_array()) throw ParseError("polynomial must be a coefficient array");
        std::vector<mpz_class> c;
        for (const auto& v : j) c.push_back(int_from_json(v));
        return Poly(std::move(c));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<mpz_class> c_;
};

/// Parses expressions like "3n-1", "-x^2+4*x", "12" in a single variable.
inline Poly parse_poly(const std::string& text, char v = 'n') {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw ParseError("empty polynomial");
    std::vector<mpz_class> coeffs;
    std::size_t i = 0;
    auto add = [&](std::size_t k, const mpz_class& c) {
        if (coeffs.size() <= k) coeffs.resize(k + 1);
        coeffs[k] += c;
    };
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        } else if (i != 0) {
            throw ParseError("bad polynomial '" + text + "'");
        }
        std::size_t st = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        mpz_class c = st == i ? mpz_class(1) : parse_integer(s.substr(st, i - st));
        bool had_digits = st != i;
        std::size_t k = 0;
        if (i < s.size() && s[i] == '*') {
            if (!had_digits) throw ParseError("bad polynomial '" + text + "'");
            ++i;
        }
        if (i < s.size() && s[i] == v) {
            ++i;
            k = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                std::size_t es = i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                if (es == i) throw ParseError("bad exponent in '" + text + "'");
                k = std::stoul(s.substr(es, i - es));
            }
        } else if (!had_digits) {
            throw ParseError("bad polynomial '" + text + "'");
        }
        add(k, sign * c);
    }
    return Poly(std::move(coeffs));
}

/// Smallest integer R >= 1 such that p has constant nonzero sign on [R, inf) (Cauchy root bound).
inline mpz_class root_free_from(const Poly& p) {
    if (p.is_constant()) return 1;
    mpz_class m = 0;
    for (int k = 0; k < p.degree(); ++k) m = std::max(m, mpz_class(abs(p.coeff(k))));
    return 1 + ceil_div(m, abs(p.lead())) + 1;
}

/// Smallest s >= start with p(n) >= lower for every integer n >= s; nullopt if p - lower is
/// eventually negative or identically below.
inline std::optional<mpz_class> first_index_at_least(const Poly& p, const mpz_class& lower,
                                                     const mpz_class& start = 1) {
    Poly q = p - Poly(lower);
    if (q.is_constant()) {
        if (q.constant() >= 0) return start;
        return std::nullopt;
    }
    if (q.lead() < 0) return std::nullopt;
    mpz_class r = root_free_from(q);
    if (r - start > 10000000) throw BudgetError("polynomial root bound too large: " + p.to_string());
    mpz_class s = start;
    for (mpz_class n = std::max(r, start) - 1; n >= start; --n) {
        if (q(n) < 0) {
            s = n + 1;
            break;
        }
    }
    return s;
}

inline bool at_least_from(const Poly& p, const mpz_class& lower, const mpz_class& start = 1) {
    auto s = first_index_at_least(p, lower, start);
    return s && *s == start;
}

/// p(n) != 0 for every integer n >= start.
inline bool nonvanishing_from(const Poly& p, const mpz_class& start = 1) {
    if (p.is_constant()) return !p.is_zero();
    mpz_class r = root_free_from(p);
    for (mpz_class n = start; n < r; ++n)
        if (p(n) == 0) return false;
    return true;
}

/// Minimal-degree integer polynomial with p(x0 + k) = ys[k] for every k; degree <= max_deg and
/// at least one redundant point is required to accept a degree.
inline std::optional<Poly> fit_integer_poly(const std::vector<mpz_class>& ys, int max_deg,
                                            long x0 = 1) {
    const std::size_t m = ys.size();
    if (m == 0) return std::nullopt;
    std::vector<std::vector<mpz_class>> diff{ys};
    int deg = -1;
    for (int d = 0; d <= max_deg && static_cast<std::size_t>(d) + 2 <= m; ++d) {
        const auto& prev = diff.back();
        std::vector<mpz_class> next(prev.size() - 1);
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) next[i] = prev[i + 1] - prev[i];
        diff.push_back(next);
        if (std::all_of(next.begin(), next.end(), [](const mpz_class& v) { return v == 0; })) {
            deg = d;
            break;
        }
    }
    if (deg < 0) return std::nullopt;
    // Newton form in the binomial basis C(n - x0, k).
    std::vector<mpq_class> acc(deg + 1);
    std::vector<mpq_class> basis{mpq_class(1)};
    mpz_class fact = 1;
    for (int k = 0; k <= deg; ++k) {
        if (k > 0) {
            std::vector<mpq_class> nb(basis.size() + 1);
            mpq_class root(x0 + k - 1);
            for (std::size_t i = 0; i < basis.size(); ++i) {
                nb[i + 1] += basis[i];
                nb[i] -= basis[i] * root;
            }
            basis = std::move(nb);
            fact *= k;
        }
        mpq_class w(diff[k][0], fact);
        w.canonicalize();
        for (std::size_t i = 0; i < basis.size(); ++i) acc[i] += w * basis[i];
    }
    std::vector<mpz_class> coeffs;
    for (auto& v : acc) {
        v.canonicalize();
        if (v.get_den() != 1) return std::nullopt;
        coeffs.push_back(v.get_num());
    }
    Poly p(std::move(coeffs));
    for (std::size_t k = 0; k < m; ++k)
        if (p(mpz_class(x0 + static_cast<long>(k))) != ys[k]) return std::nullopt;
    return p;
}

}  // namespace esma
