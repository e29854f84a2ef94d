#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <initializer_list>
#include <stdexcept>

#include "bigint.hpp"

namespace esma {

/// Closed interval [lo, hi] with exact rational endpoints.
struct RationalInterval {
    mpq_class lo, hi;

    RationalInterval() = default;
    RationalInterval(const mpq_class& x) : lo(x), hi(x) {}
    RationalInterval(const mpq_class& l, const mpq_class& h) : lo(l), hi(h) {
        if (hi < lo) throw std::invalid_argument("interval with hi < lo");
    }

    bool exact() const { return lo == hi; }
    mpq_class width() const { return hi - lo; }
    mpq_class mid() const { return (lo + hi) / 2; }
    bool contains(const mpq_class& x) const { return lo <= x && x <= hi; }
    bool contains_zero() const { return sgn(lo) <= 0 && sgn(hi) >= 0; }

    friend RationalInterval operator+(const RationalInterval& a, const RationalInterval& b) {
        return {a.lo + b.lo, a.hi + b.hi};
    }
    friend RationalInterval operator-(const RationalInterval& a, const RationalInterval& b) {
        return {a.lo - b.hi, a.hi - b.lo};
    }
    friend RationalInterval operator-(const RationalInterval& a) { return {-a.hi, -a.lo}; }
    friend RationalInterval operator*(const RationalInterval& a, const RationalInterval& b) {
        mpq_class p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
    }
    friend RationalInterval operator/(const RationalInterval& a, const RationalInterval& b) {
        if (b.contains_zero()) throw std::domain_error("interval division by an interval containing 0");
        return a * RationalInterval(1 / b.hi, 1 / b.lo);
    }

    /// Widens outward to the grid 10^-k so endpoints stay small.
    RationalInterval rounded(unsigned long k) const {
        mpz_class s = pow10(k);
        mpq_class l(floor_q(lo * s), s), h(ceil_q(hi * s), s);
        l.canonicalize();
        h.canonicalize();
        return {l, h};
    }
};

}  // namespace esma
