#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "json.hpp"

#include "errors.hpp"

namespace esma {

using json = nlohmann::json;

inline mpz_class pow10(unsigned long k) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
    return r;
}

inline mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline mpz_class ceil_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline mpz_class floor_q(const mpq_class& x) { return floor_div(x.get_num(), x.get_den()); }
inline mpz_class ceil_q(const mpq_class& x) { return ceil_div(x.get_num(), x.get_den()); }

inline int sgn(const mpz_class& x) { return mpz_sgn(x.get_mpz_t()); }
inline int sgn(const mpq_class& x) { return mpq_sgn(x.get_mpq_t()); }

/// log10 |x| without overflow for huge operands; -inf for zero.
inline double log10_abs(const mpz_class& x) {
    if (x == 0) return -std::numeric_limits<double>::infinity();
    long e = 0;
    double m = mpz_get_d_2exp(&e, x.get_mpz_t());
    return std::log10(std::fabs(m)) + static_cast<double>(e) * std::log10(2.0);
}

inline double log10_abs(const mpq_class& x) {
    if (x == 0) return -std::numeric_limits<double>::infinity();
    return log10_abs(x.get_num()) - log10_abs(x.get_den());
}

inline bool fits_int64(const mpz_class& x) {
    return mpz_fits_slong_p(x.get_mpz_t()) != 0 && sizeof(long) == 8;
}

inline std::string to_string(const mpz_class& x) { return x.get_str(10); }

inline mpz_class parse_integer(const std::string& s) {
    std::string t = s;
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    mpz_class r;
    if (t.empty() || r.set_str(t, 10) != 0) throw ParseError("not an integer: '" + s + "'");
    return r;
}

/// Integers go to JSON as numbers when they fit in 64 bits, as decimal strings otherwise.
inline json int_to_json(const mpz_class& x) {
    if (fits_int64(x)) return json(static_cast<std::int64_t>(x.get_si()));
    return json(to_string(x));
}

inline mpz_class int_from_json(const json& j) {
    if (j.is_number_integer()) return mpz_class(std::to_string(j.get<std::int64_t>()), 10);
    if (j.is_number_unsigned()) return mpz_class(std::to_string(j.get<std::uint64_t>()), 10);
    if (j.is_string()) return parse_integer(j.get<std::string>());
    throw ParseError("expected an integer, got " + j.dump());
}

/// Truncated decimal expansion of x with exactly `digits` fraction digits.
inline std::string truncated_decimal(const mpq_class& x, unsigned long digits) {
    mpz_class scaled = abs(x.get_num()) * pow10(digits);
    mpz_class n;
    mpz_tdiv_q(n.get_mpz_t(), scaled.get_mpz_t(), x.get_den().get_mpz_t());
    std::string s = to_string(n);
    if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
    std::string out = sgn(x) < 0 ? "-" : "";
    out += s.substr(0, s.size() - digits);
    if (digits > 0) out += "." + s.substr(s.size() - digits);
    return out;
}

}  // namespace esma
