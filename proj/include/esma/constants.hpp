#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <functional>
#include <regex>
#include <string>
#include <vector>

#include "bigint.hpp"
#include "errors.hpp"
#include "interval.hpp"

namespace esma {

struct EvalOptions {
    unsigned long guard_digits = 20;
    unsigned long max_digits = 10100;
};

/// A target constant: either a catalog entry (with Bessel parameters when relevant) or a
/// user-supplied decimal string.
struct ConstantSpec {
    enum class Kind { catalog, user_decimal };
    Kind kind = Kind::catalog;
    std::string label;
    // Bessel entries: J_{order1}(arg1), optionally divided by J_{order2}(arg2).
    int order1 = -1, order2 = -1;
    mpq_class arg1 = 0, arg2 = 0;
    std::string decimal;

    bool is_bessel() const { return order1 >= 0; }
    friend bool operator==(const ConstantSpec& a, const ConstantSpec& b) {
        return a.kind == b.kind && a.label == b.label && a.decimal == b.decimal;
    }

    json to_json() const {
        if (kind == Kind::user_decimal) return {{"kind", "user-decimal"}, {"label", label}, {"decimal", decimal}};
        return {{"kind", "catalog"}, {"label", label}};
    }
    static ConstantSpec from_json(const json& j);
};

/// Truncated decimal value: |x| = (scaled + theta) / 10^digits with 0 <= theta < 1.
struct DecimalConstant {
    std::string label;
    unsigned long digits = 0;
    int sign = 1;
    mpz_class scaled;
    std::string provenance;

    std::string to_string() const {
        std::string s = esma::to_string(scaled);
        if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
        std::string out = sign < 0 ? "-" : "";
        out += s.substr(0, s.size() - digits);
        if (digits > 0) out += "." + s.substr(s.size() - digits);
        return out;
    }
    mpq_class value() const {
        mpq_class v(sign * scaled, pow10(digits));
        v.canonicalize();
        return v;
    }
    /// Interval guaranteed to contain the true constant.
    RationalInterval interval() const {
        mpz_class den = pow10(digits);
        mpq_class a(scaled, den), b(scaled + 1, den);
        a.canonicalize();
        b.canonicalize();
        if (sign < 0) return {-b, -a};
        return {a, b};
    }
};

namespace detail {

using TermFn = std::function<mpz_class(unsigned long)>;

struct PQT {
    mpz_class P, Q, T;
};

// Binary splitting over k in [a, b): P = prod p(k), Q = prod q(k),
// T = sum_k (p(a)..p(k)) (q(k+1)..q(b-1)), so sum_k prod_{i<=k} p/q = T/Q.
inline PQT split(unsigned long a, unsigned long b, const TermFn& p, const TermFn& q) {
    if (b - a == 1) {
        mpz_class pa = p(a);
        return {pa, q(a), pa};
    }
    unsigned long m = a + (b - a) / 2;
    PQT l = split(a, m, p, q), r = split(m, b, p, q);
    return {l.P * r.P, l.Q * r.Q, l.T * r.Q + l.P * r.T};
}

enum class Tail { alternating, ratio_bounded };

// Encloses sum_{k>=0} t_k where t_k = t_k-1 * p(k)/q(k). For ratio_bounded, `ratio_after(n)`
// must bound |t_{k+1}/t_k| for all k > n.
inline RationalInterval hypergeometric(const mpq_class& t0, const TermFn& p, const TermFn& q,
                                       Tail tail, unsigned long digits, unsigned long min_terms,
                                       const std::function<mpq_class(unsigned long)>& ratio_after = {}) {
    if (t0 == 0) return RationalInterval(mpq_class(0));
    double target = -static_cast<double>(digits) - 2.0;
    double lt = log10_abs(t0);
    unsigned long n = 0;
    while (true) {
        double r = std::log10(std::fabs(p(n + 1).get_d())) - std::log10(std::fabs(q(n + 1).get_d()));
        lt += r;
        ++n;
        if (n >= min_terms && lt < target) break;
        if (n > 50000000UL) throw BudgetError("series term estimate diverged");
    }
    mpq_class bound_target(1, pow10(digits));
    for (;;) {
        PQT head = split(1, n + 1, p, q);
        mpq_class sum = t0 * (1 + mpq_class(head.T, head.Q));
        mpq_class next = t0 * mpq_class(head.P * p(n + 1), head.Q * q(n + 1));
        sum.canonicalize();
        next.canonicalize();
        mpq_class bound = abs(next);
        if (tail == Tail::ratio_bounded) {
            mpq_class rho = ratio_after(n);
            if (rho >= 1) {
                n += n / 4 + 10;
                continue;
            }
            bound = bound / (1 - rho);
        }
        if (bound <= bound_target) return {sum - bound, sum + bound};
        n += n / 4 + 10;
    }
}

inline mpq_class rat(long a, long b = 1) {
    mpq_class r(a, b);
    r.canonicalize();
    return r;
}

inline RationalInterval exp_rational(const mpq_class& x, unsigned long digits) {
    if (x < 0) throw std::domain_error("exp_rational expects a non-negative argument");
    mpz_class u = x.get_num(), v = x.get_den();
    auto p = [u](unsigned long) -> mpz_class { return u; };
    auto q = [v](unsigned long k) -> mpz_class { return v * k; };
    unsigned long floor_x = floor_q(x).get_ui();
    auto rho = [x](unsigned long n) -> mpq_class { return x / mpq_class(n + 2); };
    return hypergeometric(mpq_class(1), p, q, Tail::ratio_bounded, digits, floor_x + 2, rho)
        .rounded(digits + 2);
}

inline RationalInterval sin_rational(const mpq_class& x, unsigned long digits) {
    mpz_class u2 = x.get_num() * x.get_num(), v2 = x.get_den() * x.get_den();
    auto p = [u2](unsigned long) -> mpz_class { return mpz_class(-u2); };
    auto q = [v2](unsigned long k) -> mpz_class { return v2 * (2 * k) * (2 * k + 1); };
    unsigned long m = floor_q(abs(x)).get_ui() + 2;
    return hypergeometric(x, p, q, Tail::alternating, digits, m).rounded(digits + 2);
}

inline RationalInterval cos_rational(const mpq_class& x, unsigned long digits) {
    mpz_class u2 = x.get_num() * x.get_num(), v2 = x.get_den() * x.get_den();
    auto p = [u2](unsigned long) -> mpz_class { return mpz_class(-u2); };
    auto q = [v2](unsigned long k) -> mpz_class { return v2 * (2 * k - 1) * (2 * k); };
    unsigned long m = floor_q(abs(x)).get_ui() + 2;
    return hypergeometric(mpq_class(1), p, q, Tail::alternating, digits, m).rounded(digits + 2);
}

inline RationalInterval atan_inv(unsigned long m, unsigned long digits) {
    mpz_class m2 = mpz_class(m) * m;
    auto p = [](unsigned long k) -> mpz_class { return mpz_class(-(2 * static_cast<long>(k) - 1)); };
    auto q = [m2](unsigned long k) -> mpz_class { return m2 * (2 * k + 1); };
    return hypergeometric(rat(1, static_cast<long>(m)), p, q, Tail::alternating, digits, 1)
        .rounded(digits + 2);
}

inline RationalInterval pi(unsigned long digits) {
    RationalInterval a = atan_inv(5, digits + 2), b = atan_inv(239, digits + 2);
    return (RationalInterval(mpq_class(16)) * a - RationalInterval(mpq_class(4)) * b).rounded(digits + 1);
}

inline RationalInterval zeta3(unsigned long digits) {
    auto p = [](unsigned long i) -> mpz_class {
        mpz_class k(i);
        return mpz_class(-k * k * k);
    };
    auto q = [](unsigned long i) -> mpz_class {
        mpz_class k(i);
        return mpz_class(2 * (k + 1) * (k + 1) * (2 * k + 1));
    };
    RationalInterval s = hypergeometric(rat(1, 2), p, q, Tail::alternating, digits + 1, 1);
    return (RationalInterval(rat(5, 2)) * s).rounded(digits + 2);
}

inline RationalInterval sqrt_integer(unsigned long n, unsigned long digits) {
    mpz_class s = mpz_class(n) * pow10(2 * (digits + 2));
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), s.get_mpz_t());
    mpz_class den = pow10(digits + 2);
    mpq_class lo(r, den), hi(r * r == s ? r : r + 1, den);
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
}

inline RationalInterval bessel_j(unsigned order, const mpq_class& x, unsigned long digits) {
    if (x == 0) return RationalInterval(mpq_class(order == 0 ? 1 : 0));
    mpq_class half = x / 2;
    mpq_class t0 = 1;
    for (unsigned i = 0; i < order; ++i) t0 *= half;
    mpz_class fact = 1;
    for (unsigned i = 2; i <= order; ++i) fact *= i;
    t0 /= mpq_class(fact);
    mpz_class u2 = x.get_num() * x.get_num(), v2 = x.get_den() * x.get_den();
    auto p = [u2](unsigned long) -> mpz_class { return mpz_class(-u2); };
    auto q = [v2, order](unsigned long m) -> mpz_class { return 4 * v2 * m * (m + order); };
    // Magnitudes decrease once m(m+order) > x^2/4, certainly for m > |x|.
    unsigned long m0 = floor_q(abs(x)).get_ui() + 2;
    unsigned long extra = order > 0 ? static_cast<unsigned long>(std::max(0.0, -log10_abs(t0))) : 0;
    return hypergeometric(t0, p, q, Tail::alternating, digits + extra, m0).rounded(digits + 2);
}

inline mpq_class parse_rational(const std::string& s) {
    static const std::regex re(R"(^([+-]?\d+)(?:/(\d+))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw ParseError("not a rational: '" + s + "'");
    mpz_class num = parse_integer(m[1]);
    mpz_class den = m[2].matched ? parse_integer(m[2]) : mpz_class(1);
    if (den == 0) throw ParseError("zero denominator in '" + s + "'");
    mpq_class r(num, den);
    r.canonicalize();
    return r;
}

inline std::string rational_text(const mpq_class& q) {
    return q.get_den() == 1 ? q.get_num().get_str() : q.get_str();
}

}  // namespace detail

inline const std::vector<std::string>& catalog_labels() {
    static const std::vector<std::string> labels = {
        "e",           "e^2",         "sqrt(e)",     "tan(1)",      "tanh(1/4)",
        "phi",         "sqrt(2)",     "J0(1)/J1(1)", "J1(1)/J2(1)", "J0(1)/J2(1)",
        "J1(1)/J3(1)", "J3(1)/J5(1)", "J5(1)/J3(1)", "pi",          "zeta(3)"};
    return labels;
}

inline ConstantSpec parse_constant(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (ch != ' ') s += ch;
    static const std::vector<std::pair<std::string, std::string>> aliases = {
        {"e2", "e^2"},     {"exp(2)", "e^2"}, {"sqrte", "sqrt(e)"}, {"exp(1/2)", "sqrt(e)"},
        {"tan1", "tan(1)"}, {"sqrt2", "sqrt(2)"}, {"zeta3", "zeta(3)"}, {"golden", "phi"}};
    for (const auto& [a, b] : aliases)
        if (s == a) s = b;
    ConstantSpec spec;
    spec.label = s;
    static const std::regex bessel(R"(^J(\d+)\(([^()]+)\)(?:/J(\d+)\(([^()]+)\))?$)");
    std::smatch m;
    if (std::regex_match(s, m, bessel)) {
        spec.order1 = std::stoi(m[1]);
        spec.arg1 = detail::parse_rational(m[2]);
        if (m[3].matched) {
            spec.order2 = std::stoi(m[3]);
            spec.arg2 = detail::parse_rational(m[4]);
        }
        spec.label = "J" + std::to_string(spec.order1) + "(" + detail::rational_text(spec.arg1) + ")";
        if (spec.order2 >= 0)
            spec.label += "/J" + std::to_string(spec.order2) + "(" + detail::rational_text(spec.arg2) + ")";
        return spec;
    }
    for (const auto& l : catalog_labels())
        if (s == l) return spec;
    std::string dec = s.rfind("decimal:", 0) == 0 ? s.substr(8) : s;
    static const std::regex decimal(R"(^[+-]?\d+(\.\d+)?$)");
    if (std::regex_match(dec, decimal)) {
        spec.kind = ConstantSpec::Kind::user_decimal;
        spec.decimal = dec;
        spec.label = dec.size() > 24 ? dec.substr(0, 24) + "..." : dec;
        return spec;
    }
    throw ParseError("unknown constant '" + text + "'");
}

inline ConstantSpec ConstantSpec::from_json(const json& j) {
    if (j.is_string()) return parse_constant(j.get<std::string>());
    if (j.value("kind", "catalog") == "user-decimal") return parse_constant("decimal:" + j.at("decimal").get<std::string>());
    return parse_constant(j.at("label").get<std::string>());
}

inline std::vector<ConstantSpec> list_catalog() {
    std::vector<ConstantSpec> out;
    for (const auto& l : catalog_labels()) out.push_back(parse_constant(l));
    return out;
}

/// Rigorous enclosure of the constant with width at most 10^-(digits).
inline RationalInterval enclose_constant(const ConstantSpec& spec, unsigned long digits,
                                         const EvalOptions& opt = {}) {
    if (digits > opt.max_digits + opt.guard_digits)
        throw PrecisionError("digit budget " + std::to_string(digits) + " exceeds maximum");
    using namespace detail;
    if (spec.kind == ConstantSpec::Kind::user_decimal) {
        const std::string& d = spec.decimal;
        auto dot = d.find('.');
        unsigned long frac = dot == std::string::npos ? 0 : d.size() - dot - 1;
        std::string digits_only;
        for (char ch : d)
            if (std::isdigit(static_cast<unsigned char>(ch))) digits_only += ch;
        mpz_class n = parse_integer(digits_only);
        mpq_class a(n, pow10(frac)), b(n + (frac > 0 ? 1 : 0), pow10(frac));
        a.canonicalize();
        b.canonicalize();
        if (d[0] == '-') return {-b, -a};
        return {a, b};
    }
    const std::string& l = spec.label;
    unsigned long p = digits + 2;
    if (spec.is_bessel()) {
        RationalInterval num = bessel_j(spec.order1, spec.arg1, p);
        if (spec.order2 < 0) return num;
        for (unsigned long extra = 5;; extra += 20) {
            RationalInterval den = bessel_j(spec.order2, spec.arg2, p + extra);
            if (den.contains_zero()) {
                if (den.exact()) throw std::domain_error("Bessel ratio with zero denominator");
                continue;
            }
            num = bessel_j(spec.order1, spec.arg1, p + extra);
            RationalInterval r = num / den;
            if (r.width() <= mpq_class(1, pow10(digits))) return r.rounded(digits + 1);
            if (extra > digits + 200) throw PrecisionError("Bessel ratio failed to converge");
        }
    }
    if (l == "e") return exp_rational(rat(1), p);
    if (l == "e^2") return exp_rational(rat(2), p);
    if (l == "sqrt(e)") return exp_rational(rat(1, 2), p);
    if (l == "tan(1)") return (sin_rational(rat(1), p + 1) / cos_rational(rat(1), p + 1)).rounded(p);
    if (l == "tanh(1/4)") {
        RationalInterval s = exp_rational(rat(1, 2), p + 1);
        mpq_class lo = (s.lo - 1) / (s.lo + 1), hi = (s.hi - 1) / (s.hi + 1);
        return RationalInterval(lo, hi).rounded(p);
    }
    if (l == "phi") {
        RationalInterval s = sqrt_integer(5, p);
        return RationalInterval((1 + s.lo) / 2, (1 + s.hi) / 2);
    }
    if (l == "sqrt(2)") return sqrt_integer(2, p);
    if (l == "pi") return pi(p);
    if (l == "zeta(3)") return zeta3(p);
    throw ParseError("unknown constant '" + l + "'");
}

/// Truncates an enclosure to `digits` fraction digits; throws if the enclosure straddles a
/// truncation boundary.
inline DecimalConstant truncate_enclosure(const std::string& label, const RationalInterval& x,
                                          unsigned long digits, const std::string& provenance) {
    DecimalConstant dc;
    dc.label = label;
    dc.digits = digits;
    dc.provenance = provenance;
    mpz_class s = pow10(digits);
    auto trunc_abs = [&](const mpq_class& v) { return floor_q(abs(v) * s); };
    if (sgn(x.lo) >= 0) {
        dc.sign = 1;
    } else if (sgn(x.hi) <= 0) {
        dc.sign = -1;
    } else {
        // Straddles zero: fine only if both sides truncate to zero.
        if (trunc_abs(x.lo) != 0 || trunc_abs(x.hi) != 0)
            throw PrecisionError("enclosure straddles a truncation boundary");
        dc.sign = 1;
        dc.scaled = 0;
        return dc;
    }
    mpz_class a = trunc_abs(x.lo), b = trunc_abs(x.hi);
    // Exact decimals at the upper end are still truncation-consistent.
    if (a != b) throw PrecisionError("enclosure straddles a truncation boundary");
    dc.scaled = a;
    return dc;
}

inline DecimalConstant evaluate_constant(const ConstantSpec& spec, unsigned long digits,
                                         const EvalOptions& opt = {}) {
    if (digits < 1) throw std::invalid_argument("digits must be positive");
    if (digits > opt.max_digits)
        throw PrecisionError("digit budget " + std::to_string(digits) + " exceeds maximum " +
                             std::to_string(opt.max_digits));
    if (spec.kind == ConstantSpec::Kind::user_decimal) {
        auto dot = spec.decimal.find('.');
        unsigned long frac = dot == std::string::npos ? 0 : spec.decimal.size() - dot - 1;
        if (digits > frac)
            throw PrecisionError("user-supplied constant has only " + std::to_string(frac) + " fraction digits",
                                 static_cast<long>(frac));
        // The supplied digits are a truncation, so shortening them is plain string truncation.
        std::string mag;
        for (char ch : spec.decimal)
            if (std::isdigit(static_cast<unsigned char>(ch))) mag += ch;
        mag.resize(mag.size() - (frac - digits));
        DecimalConstant dc;
        dc.label = spec.label;
        dc.digits = digits;
        dc.provenance = "user-supplied";
        dc.scaled = parse_integer(mag);
        dc.sign = spec.decimal[0] == '-' && dc.scaled != 0 ? -1 : 1;
        return dc;
    }
    for (unsigned long guard = opt.guard_digits;; guard += 40) {
        RationalInterval x = enclose_constant(spec, digits + guard, opt);
        try {
            return truncate_enclosure(spec.label, x, digits, "catalog:" + spec.label);
        } catch (const PrecisionError&) {
            if (guard > opt.guard_digits + 400) throw;
        }
    }
}

inline DecimalConstant eval_bessel_first_kind(unsigned order, const mpq_class& arg, unsigned long digits,
                                              const EvalOptions& opt = {}) {
    ConstantSpec spec;
    spec.order1 = static_cast<int>(order);
    spec.arg1 = arg;
    spec.label = "J" + std::to_string(order) + "(" + detail::rational_text(arg) + ")";
    return evaluate_constant(spec, digits, opt);
}

}  // namespace esma
