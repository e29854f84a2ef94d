#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "cf.hpp"
#include "errors.hpp"
#include "poly.hpp"

namespace esma {

/// Periodic partial numerators: b_j = signs[(j-1) mod period].
struct SignPattern {
    std::vector<int> signs{1};

    SignPattern() = default;
    explicit SignPattern(std::vector<int> s) : signs(std::move(s)) {
        if (signs.empty()) throw std::invalid_argument("empty sign pattern");
        for (int v : signs)
            if (v != 1 && v != -1) throw std::invalid_argument("sign pattern entries must be +1 or -1");
    }

    std::size_t period() const { return signs.size(); }
    int at(std::size_t j) const { return signs[(j - 1) % signs.size()]; }
    bool all_positive() const {
        return std::all_of(signs.begin(), signs.end(), [](int v) { return v == 1; });
    }
    /// True when no shorter period generates the same infinite expansion.
    bool primitive() const {
        const std::size_t p = period();
        for (std::size_t d = 1; d < p; ++d) {
            if (p % d) continue;
            bool rep = true;
            for (std::size_t i = d; i < p && rep; ++i) rep = signs[i] == signs[i - d];
            if (rep) return false;
        }
        return true;
    }

    /// Accepts "1,-1", "+1,-1", "+-", "[+1,-1]".
    static SignPattern parse(const std::string& text) {
        std::string s;
        for (char ch : text)
            if (ch != ' ' && ch != '[' && ch != ']') s += ch;
        std::vector<int> v;
        if (!s.empty() && s.find(',') == std::string::npos && s.find('1') == std::string::npos) {
            for (char ch : s) {
                if (ch == '+') v.push_back(1);
                else if (ch == '-') v.push_back(-1);
                else throw ParseError("bad sign pattern '" + text + "'");
            }
        } else {
            std::size_t pos = 0;
            while (pos <= s.size()) {
                std::size_t q = s.find(',', pos);
                std::string tok = s.substr(pos, q == std::string::npos ? std::string::npos : q - pos);
                if (tok == "1" || tok == "+1" || tok == "+") v.push_back(1);
                else if (tok == "-1" || tok == "-") v.push_back(-1);
                else throw ParseError("bad sign pattern '" + text + "'");
                if (q == std::string::npos) break;
                pos = q + 1;
            }
        }
        return SignPattern(v);
    }
    std::string to_string() const {
        std::string out = "[";
        for (std::size_t i = 0; i < signs.size(); ++i) out += (i ? "," : "") + std::string(signs[i] > 0 ? "+1" : "-1");
        return out + "]";
    }
    json to_json() const { return signs; }
    static SignPattern from_json(const json& j) { return SignPattern(j.get<std::vector<int>>()); }

    friend bool operator==(const SignPattern& a, const SignPattern& b) { return a.signs == b.signs; }
    friend bool operator<(const SignPattern& a, const SignPattern& b) {
        if (a.period() != b.period()) return a.period() < b.period();
        return a.signs > b.signs;  // +1 before -1
    }
};

/// Interlaced closed form: a_{h+(n-1)beta+i} = A_i(n), b likewise with B_i, n >= 1, where h is
/// the number of head terms after a0. head[0] = (a0, 0); an empty head means a0 = 0.
struct InterlacedClosedForm {
    std::vector<Poly> A, B;
    std::vector<std::pair<mpz_class, mpz_class>> head;

    std::size_t beta() const { return A.size(); }
    mpz_class a0() const { return head.empty() ? mpz_class(0) : head[0].first; }
    std::size_t head_terms() const { return head.empty() ? 0 : head.size() - 1; }

    void validate() const {
        if (A.empty() || A.size() != B.size()) throw std::invalid_argument("closed form needs beta >= 1 with |A| = |B|");
        for (const auto& b : B)
            if (b.is_zero()) throw std::invalid_argument("partial numerator polynomial is identically zero");
    }

    Term term_at(std::size_t j) const {
        if (j == 0) throw std::out_of_range("terms are indexed from 1");
        const std::size_t h = head_terms();
        if (j <= h) return {head[j].first, head[j].second};
        std::size_t idx = j - h - 1;
        mpz_class n(static_cast<unsigned long>(idx / beta() + 1));
        std::size_t i = idx % beta();
        return {A[i](n), B[i](n)};
    }

    bool signed_constant_numerators() const {
        return std::all_of(B.begin(), B.end(), [](const Poly& b) {
            return b.is_constant() && (b.constant() == 1 || b.constant() == -1);
        });
    }
    bool simple_numerators() const {
        return std::all_of(B.begin(), B.end(), [](const Poly& b) { return b == Poly(1); });
    }
    /// SICF: constant +-1 numerators and A_i(n) > 0 for all n >= 1.
    bool is_sicf() const {
        if (!signed_constant_numerators()) return false;
        return std::all_of(A.begin(), A.end(), [](const Poly& a) { return at_least_from(a, 1); });
    }
    bool is_simple() const { return simple_numerators() && is_sicf(); }

    friend bool operator==(const InterlacedClosedForm& x, const InterlacedClosedForm& y) {
        return x.A == y.A && x.B == y.B && x.head == y.head;
    }

    std::string to_string() const {
        std::string out;
        if (!head.empty()) {
            out += "a0=" + esma::to_string(a0());
            for (std::size_t k = 1; k < head.size(); ++k)
                out += " (" + esma::to_string(head[k].first) + "," + esma::to_string(head[k].second) + ")";
            out += " ";
        }
        out += "[";
        for (std::size_t i = 0; i < beta(); ++i) {
            if (i) out += ", ";
            out += "(" + A[i].to_string() + "," + B[i].to_string() + ")";
        }
        return out + "]";
    }

    json to_json() const {
        json j;
        j["beta"] = beta();
        j["A"] = json::array();
        j["B"] = json::array();
        for (const auto& p : A) j["A"].push_back(p.to_json());
        for (const auto& p : B) j["B"].push_back(p.to_json());
        j["head"] = json::array();
        for (const auto& [a, b] : head) j["head"].push_back({int_to_json(a), int_to_json(b)});
        return j;
    }
    static InterlacedClosedForm from_json(const json& j) {
        InterlacedClosedForm f;
        for (const auto& p : j.at("A")) f.A.push_back(Poly::from_json(p));
        if (j.contains("B")) {
            for (const auto& p : j.at("B")) f.B.push_back(Poly::from_json(p));
        } else {
            f.B.assign(f.A.size(), Poly(1));
        }
        if (j.contains("head"))
            for (const auto& h : j.at("head")) f.head.emplace_back(int_from_json(h.at(0)), int_from_json(h.at(1)));
        if (j.contains("beta") && j.at("beta").get<std::size_t>() != f.A.size())
            throw ParseError("beta does not match the number of A polynomials");
        f.validate();
        return f;
    }
};

/// (1 a0; 0 1) times the head layers: original value = head_prefix(pattern value).
inline MobiusMap head_prefix(const InterlacedClosedForm& f) {
    MobiusMap m{1, f.a0(), 0, 1};
    for (std::size_t k = 1; k < f.head.size(); ++k) m *= MobiusMap::layer(f.head[k].first, f.head[k].second);
    return m;
}

/// Product of the beta layer matrices of one period as polynomials in n.
inline PolyMatrix collapse(const InterlacedClosedForm& f) {
    f.validate();
    PolyMatrix m = PolyMatrix::identity();
    for (std::size_t i = 0; i < f.beta(); ++i) m = m * PolyMatrix::layer(f.A[i], f.B[i]);
    return m;
}

/// (-1)^beta prod B_i(n).
inline Poly collapsed_determinant(const InterlacedClosedForm& f) {
    Poly d = f.beta() % 2 ? Poly(-1) : Poly(1);
    for (const auto& b : f.B) d *= b;
    return d;
}

/// Rotates the period by k layers. The returned map absorbs the head and the first k layers at
/// n = 1, so original value = map(rotated value) and the rotated form has no head.
inline std::pair<MobiusMap, InterlacedClosedForm> shift_period(const InterlacedClosedForm& f, std::size_t k) {
    f.validate();
    if (k >= f.beta()) throw std::invalid_argument("shift must satisfy 0 <= k < beta");
    if (k == 0) return {MobiusMap::identity(), f};
    MobiusMap m = head_prefix(f);
    InterlacedClosedForm g;
    for (std::size_t i = 0; i < k; ++i) m *= MobiusMap::layer(f.A[i](1L), f.B[i](1L));
    for (std::size_t i = k; i < f.beta(); ++i) {
        g.A.push_back(f.A[i]);
        g.B.push_back(f.B[i]);
    }
    for (std::size_t i = 0; i < k; ++i) {
        g.A.push_back(f.A[i].shifted(1));
        g.B.push_back(f.B[i].shifted(1));
    }
    return {m, g};
}

inline GeneralizedCF to_general_cf(const InterlacedClosedForm& f) {
    f.validate();
    GeneralizedCF cf;
    cf.a0 = f.a0();
    auto shared = std::make_shared<const InterlacedClosedForm>(f);
    cf.generator = [shared](std::size_t j) { return shared->term_at(j); };
    cf.source = f.to_string();
    return cf;
}

/// Re-expresses the pattern with period beta * m (same term stream).
inline InterlacedClosedForm unroll(const InterlacedClosedForm& f, std::size_t m) {
    if (m == 0) throw std::invalid_argument("unroll factor must be positive");
    InterlacedClosedForm g;
    g.head = f.head;
    const long ml = static_cast<long>(m);
    for (std::size_t t = 0; t < m; ++t)
        for (std::size_t i = 0; i < f.beta(); ++i) {
            // Old period index n_old = m*n - m + t + 1.
            g.A.push_back(f.A[i].affine(ml, 1 - ml + static_cast<long>(t)));
            g.B.push_back(f.B[i].affine(ml, 1 - ml + static_cast<long>(t)));
        }
    return g;
}

}  // namespace esma
