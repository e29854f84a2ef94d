#pragma once

#include <gmpxx.h>

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "errors.hpp"
#include "interval.hpp"
#include "poly.hpp"

namespace esma {

namespace detail {

// Primitive part with positive leading coefficient.
inline Poly primitive(const Poly& p) {
    if (p.is_zero()) return p;
    Poly q = p.exact_div(p.content());
    return q.lead() < 0 ? -q : q;
}

// Pseudo-remainder of a by b over Z.
inline Poly pseudo_rem(Poly a, const Poly& b) {
    while (!a.is_zero() && a.degree() >= b.degree()) {
        int k = a.degree() - b.degree();
        std::vector<mpz_class> mono(k + 1);
        mono[k] = a.lead();
        a = a * Poly(b.lead()) - Poly(std::move(mono)) * b;
    }
    return a;
}

}  // namespace detail

inline Poly derivative(const Poly& p) {
    std::vector<mpz_class> d;
    for (int k = 1; k <= p.degree(); ++k) d.push_back(p.coeff(k) * k);
    return Poly(std::move(d));
}

/// Primitive gcd over Z[x] with positive leading coefficient.
inline Poly poly_gcd(Poly a, Poly b) {
    a = detail::primitive(a);
    b = detail::primitive(b);
    while (!b.is_zero()) {
        Poly r = detail::primitive(detail::pseudo_rem(a, b));
        a = b;
        b = r;
    }
    return a;
}

/// a / b when b divides a exactly over Z[x].
inline Poly poly_divexact(Poly a, const Poly& b) {
    if (b.is_zero()) throw std::domain_error("division by the zero polynomial");
    std::vector<mpz_class> q(a.degree() >= b.degree() ? a.degree() - b.degree() + 1 : 0);
    while (!a.is_zero() && a.degree() >= b.degree()) {
        int k = a.degree() - b.degree();
        mpz_class c;
        if (!mpz_divisible_p(a.lead().get_mpz_t(), b.lead().get_mpz_t()))
            throw std::domain_error("inexact polynomial division");
        c = a.lead() / b.lead();
        q[k] = c;
        std::vector<mpz_class> mono(k + 1);
        mono[k] = c;
        a -= Poly(std::move(mono)) * b;
    }
    if (!a.is_zero()) throw std::domain_error("inexact polynomial division");
    return Poly(std::move(q));
}

/// f(x) / g(x) with integer coefficients.
struct RationalFunction {
    Poly f, g{1};

    /// f/g independent of x, i.e. f g' - f' g = 0.
    bool constant_valued() const { return (f * derivative(g) - derivative(f) * g).is_zero(); }

    /// Reduced by the polynomial gcd, content removed, leading coefficient of g positive.
    RationalFunction canonical() const {
        if (g.is_zero()) throw std::domain_error("rational function with zero denominator");
        if (f.is_zero()) return {Poly(), Poly(1)};
        Poly h = poly_gcd(f, g);
        Poly nf = poly_divexact(f, h), ng = poly_divexact(g, h);
        mpz_class c = gcd(nf.content(), ng.content());
        nf = nf.exact_div(c);
        ng = ng.exact_div(c);
        if (ng.lead() < 0) {
            nf = -nf;
            ng = -ng;
        }
        return {nf, ng};
    }

    mpq_class operator()(const mpq_class& x) const {
        mpq_class den = g(x);
        if (den == 0) throw PoleError("rational function pole", 0);
        return f(x) / den;
    }

    RationalInterval operator()(const RationalInterval& x) const {
        auto horner = [&](const Poly& p) {
            RationalInterval r(mpq_class(0));
            const auto& c = p.coeffs();
            for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + RationalInterval(mpq_class(*it));
            return r;
        };
        RationalInterval den = horner(g);
        if (den.contains_zero()) throw PoleError("rational function pole near the constant", 0);
        return horner(f) / den;
    }

    std::string to_string() const {
        std::string num = f.to_string('x'), den = g.to_string('x');
        if (g == Poly(1)) return num;
        return "(" + num + ")/(" + den + ")";
    }

    json to_json() const { return {{"f", f.to_json()}, {"g", g.to_json()}, {"text", to_string()}}; }
    static RationalFunction from_json(const json& j) {
        if (j.is_string()) return parse(j.get<std::string>());
        return {Poly::from_json(j.at("f")), Poly::from_json(j.at("g"))};
    }

    /// "(2x+2)/(3x-1)", "x-1", "1/(x-2)".
    static RationalFunction parse(const std::string& text) {
        std::string s;
        for (char ch : text)
            if (ch != ' ') s += ch;
        auto strip = [](std::string t) {
            if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
            return t;
        };
        int depth = 0;
        std::size_t slash = std::string::npos;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '(') ++depth;
            else if (s[i] == ')') --depth;
            else if (s[i] == '/' && depth == 0) {
                if (slash != std::string::npos) throw ParseError("bad rational function '" + text + "'");
                slash = i;
            }
        }
        RationalFunction r;
        if (slash == std::string::npos) {
            r.f = parse_poly(strip(s), 'x');
            r.g = Poly(1);
        } else {
            r.f = parse_poly(strip(s.substr(0, slash)), 'x');
            r.g = parse_poly(strip(s.substr(slash + 1)), 'x');
        }
        if (r.g.is_zero()) throw ParseError("zero denominator in '" + text + "'");
        return r;
    }

    /// Height ordering: max degree, then sum of |coefficients|, then coefficients.
    auto order_key() const {
        mpz_class h = 0;
        for (const auto& c : f.coeffs()) h += abs(c);
        for (const auto& c : g.coeffs()) h += abs(c);
        auto padded = [](const Poly& p, int deg) {
            std::vector<mpz_class> v(deg + 1);
            for (int k = 0; k <= p.degree(); ++k) v[k] = p.coeff(k);
            return v;
        };
        int deg = std::max(f.degree(), g.degree());
        return std::make_tuple(deg, h, g.degree(), padded(g, deg), padded(f, deg));
    }
    friend bool operator<(const RationalFunction& a, const RationalFunction& b) { return a.order_key() < b.order_key(); }
    friend bool operator==(const RationalFunction& a, const RationalFunction& b) { return a.f == b.f && a.g == b.g; }
};

}  // namespace esma
