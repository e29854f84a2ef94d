#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "bigint.hpp"
#include "constants.hpp"
#include "interval.hpp"
#include "rational_function.hpp"
#include "sicf.hpp"

namespace esma {

struct SequenceSample {
    std::vector<mpz_class> terms;  // a_0..a_k
    SignPattern pattern;
    bool terminated = false;
    std::optional<std::size_t> precision_exhausted_at;

    GeneralizedCF to_cf() const {
        std::vector<Term> t;
        for (std::size_t j = 1; j < terms.size(); ++j) t.push_back({terms[j], pattern.at(j)});
        return GeneralizedCF::from_terms(terms.empty() ? mpz_class(0) : terms[0], std::move(t), "extracted");
    }
};

namespace detail {

struct Frac {
    mpz_class num, den;  // den > 0
};

inline Frac to_frac(const mpq_class& q) { return {q.get_num(), q.get_den()}; }

}  // namespace detail

/// Signed generalized Euclidean algorithm on an enclosure of the constant: a_i is the floor of
/// the complete quotient when b_{i+1} = +1 and its ceiling when b_{i+1} = -1. Stops at an exact
/// zero residual, at depth N (terms a_0..a_N), or when the enclosure no longer determines the
/// next term.
inline SequenceSample extract_signed_cf(const RationalInterval& c, const SignPattern& pattern, std::size_t depth) {
    using detail::Frac;
    SequenceSample out;
    out.pattern = pattern;
    Frac lo = detail::to_frac(c.lo), hi = detail::to_frac(c.hi);
    const bool exact = c.exact();
    for (std::size_t i = 0;; ++i) {
        const int next = pattern.at(i + 1);
        auto pick = [next](const Frac& x) { return next > 0 ? floor_div(x.num, x.den) : ceil_div(x.num, x.den); };
        mpz_class a = pick(lo);
        if (!exact && pick(hi) != a) {
            out.precision_exhausted_at = i;
            break;
        }
        out.terms.push_back(a);
        lo.num -= a * lo.den;
        hi.num -= a * hi.den;
        if (exact && lo.num == 0) {
            out.terminated = true;
            break;
        }
        if (i == depth) break;
        // Residual must have one strict sign across the enclosure before inverting.
        if (!exact && (lo.num == 0 || hi.num == 0 || sgn(lo.num) != sgn(hi.num))) {
            out.precision_exhausted_at = i + 1;
            break;
        }
        auto invert = [next](Frac& x) {
            mpz_class n = next * x.den, d = x.num;
            if (d < 0) {
                n = -n;
                d = -d;
            }
            x = {n, d};
        };
        invert(lo);
        invert(hi);
    }
    return out;
}

inline SequenceSample extract_signed_cf(const DecimalConstant& c, const SignPattern& pattern, std::size_t depth) {
    return extract_signed_cf(c.interval(), pattern, depth);
}

inline SequenceSample extract_signed_cf(const mpq_class& c, const SignPattern& pattern, std::size_t depth) {
    return extract_signed_cf(RationalInterval(c), pattern, depth);
}

}  // namespace esma
