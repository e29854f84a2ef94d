#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bigint.hpp"
#include "poly.hpp"
#include "sicf.hpp"

namespace esma {

inline constexpr std::uint64_t kDefaultPrime = 199;
inline const std::vector<std::uint64_t>& prime_ladder() {
    static const std::vector<std::uint64_t> ladder{199ULL, 1000000007ULL, 1000000000000000009ULL};
    return ladder;
}

/// a_j + sum_{i=1..L} c_i a_{j-i} = 0 for j >= L.
struct LinearRecurrence {
    std::size_t L = 0;
    std::vector<mpz_class> connection;  // c_1..c_L
    std::vector<mpz_class> initial;     // a_0..a_{L-1}
    std::uint64_t prime = kDefaultPrime;

    mpz_class next(const std::vector<mpz_class>& seq, std::size_t j) const {
        mpz_class s = 0;
        for (std::size_t i = 1; i <= L; ++i) s -= connection[i - 1] * seq[j - i];
        return s;
    }

    bool reproduces(const std::vector<mpz_class>& sample) const {
        if (sample.size() < L) return false;
        for (std::size_t j = 0; j < L; ++j)
            if (initial[j] != sample[j]) return false;
        for (std::size_t j = L; j < sample.size(); ++j)
            if (next(sample, j) != sample[j]) return false;
        return true;
    }

    /// "a_j - 2a_{j-3} + a_{j-6} = 0"
    std::string to_string() const {
        std::string out = "a_j";
        for (std::size_t i = 1; i <= L; ++i) {
            const mpz_class& c = connection[i - 1];
            if (c == 0) continue;
            out += c < 0 ? " - " : " + ";
            mpz_class m = abs(c);
            if (m != 1) out += m.get_str();
            out += "a_{j-" + std::to_string(i) + "}";
        }
        return out + " = 0";
    }

    json to_json() const {
        json j;
        j["L"] = L;
        j["connection"] = json::array();
        j["initial"] = json::array();
        for (const auto& c : connection) j["connection"].push_back(int_to_json(c));
        for (const auto& a : initial) j["initial"].push_back(int_to_json(a));
        j["prime"] = prime;
        return j;
    }
    static LinearRecurrence from_json(const json& j) {
        LinearRecurrence r;
        for (const auto& c : j.at("connection")) r.connection.push_back(int_from_json(c));
        for (const auto& a : j.at("initial")) r.initial.push_back(int_from_json(a));
        r.L = r.connection.size();
        if (j.contains("L") && j.at("L").get<std::size_t>() != r.L) throw ParseError("L does not match the connection length");
        if (r.initial.size() != r.L) throw ParseError("recurrence needs L initial terms");
        r.prime = j.value("prime", kDefaultPrime);
        return r;
    }
    friend bool operator==(const LinearRecurrence& a, const LinearRecurrence& b) {
        return a.connection == b.connection && a.initial == b.initial;
    }
};

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    for (; e; e >>= 1, a = mulmod(a, a, p))
        if (e & 1) r = mulmod(r, a, p);
    return r;
}

inline std::uint64_t reduce(const mpz_class& x, std::uint64_t p) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), mpz_class(std::to_string(p)).get_mpz_t());
    return std::stoull(r.get_str());
}

}  // namespace detail

/// Raw result over GF(p): L and connection c_1..c_L in [0, p).
struct ModularRegister {
    std::size_t L = 0;
    std::vector<std::uint64_t> connection;
};

/// Berlekamp-Massey over GF(p), p prime below 2^63.
inline ModularRegister berlekamp_massey_mod(const std::vector<std::uint64_t>& s, std::uint64_t p) {
    using detail::mulmod;
    std::vector<std::uint64_t> C{1}, B{1};
    std::size_t L = 0, m = 1;
    std::uint64_t b = 1;
    for (std::size_t n = 0; n < s.size(); ++n) {
        std::uint64_t d = s[n] % p;
        for (std::size_t i = 1; i <= L && i < C.size(); ++i) d = (d + mulmod(C[i], s[n - i] % p, p)) % p;
        if (d == 0) {
            ++m;
            continue;
        }
        std::uint64_t coef = mulmod(d, detail::powmod(b, p - 2, p), p);
        std::vector<std::uint64_t> T = C;
        if (C.size() < B.size() + m) C.resize(B.size() + m, 0);
        for (std::size_t i = 0; i < B.size(); ++i) C[i + m] = (C[i + m] + p - mulmod(coef, B[i], p)) % p;
        if (2 * L <= n) {
            L = n + 1 - L;
            B = std::move(T);
            b = d;
            m = 1;
        } else {
            ++m;
        }
    }
    C.resize(L + 1, 0);
    return {L, std::vector<std::uint64_t>(C.begin() + 1, C.end())};
}

inline ModularRegister berlekamp_massey_mod(const std::vector<mpz_class>& sample, std::uint64_t p) {
    std::vector<std::uint64_t> s;
    s.reserve(sample.size());
    for (const auto& v : sample) s.push_back(detail::reduce(v, p));
    return berlekamp_massey_mod(s, p);
}

/// Minimal register over the smallest prime of the ladder (starting at `prime`) whose signed lift
/// reproduces the sample over Z. Falls back to the trivial register of length n.
inline LinearRecurrence berlekamp_massey(const std::vector<mpz_class>& sample, std::uint64_t prime = kDefaultPrime) {
    if (sample.size() < 2) throw std::invalid_argument("Berlekamp-Massey needs at least two terms");
    std::vector<std::uint64_t> primes{prime};
    for (auto q : prime_ladder())
        if (q > prime) primes.push_back(q);
    for (auto p : primes) {
        ModularRegister reg = berlekamp_massey_mod(sample, p);
        LinearRecurrence rec;
        rec.L = reg.L;
        rec.prime = p;
        for (auto c : reg.connection) {
            mpz_class v(std::to_string(c));
            if (c > p / 2) v -= mpz_class(std::to_string(p));
            rec.connection.push_back(v);
        }
        rec.initial.assign(sample.begin(), sample.begin() + static_cast<long>(std::min(rec.L, sample.size())));
        if (rec.L <= sample.size() && rec.reproduces(sample)) return rec;
    }
    LinearRecurrence trivial;
    trivial.L = sample.size();
    trivial.connection.assign(sample.size(), 0);
    trivial.initial = sample;
    trivial.prime = primes.back();
    return trivial;
}

inline bool is_significant(std::size_t L, std::size_t n) { return 2 * L < n; }

inline std::vector<mpz_class> extend_sequence(const LinearRecurrence& rec, std::size_t count) {
    std::vector<mpz_class> seq(rec.initial.begin(), rec.initial.begin() + static_cast<long>(std::min(count, rec.L)));
    seq.reserve(count);
    for (std::size_t j = seq.size(); j < count; ++j) seq.push_back(rec.next(seq, j));
    return seq;
}

struct DecomposeOptions {
    std::size_t beta_max = 16;
    int deg_max = 3;
    std::size_t head_max = 1;  // extra head terms allowed, in periods of beta_a
};

/// Splits a_0, a_1, ... (from rec) into a0, at most one period of head terms, and beta_a
/// interlaced polynomial sub-sequences; the partial numerators come from the sign pattern and the
/// final period is lcm(beta_a, beta_b). Accepts the smallest beta_a, then the shortest head, that
/// regenerates the extended sequence.
inline std::optional<InterlacedClosedForm> interlace_decompose(const LinearRecurrence& rec,
                                                               const std::vector<mpz_class>& sample,
                                                               const SignPattern& pattern = SignPattern(),
                                                               const DecomposeOptions& opt = {}) {
    if (!rec.reproduces(sample)) throw std::invalid_argument("recurrence does not reproduce the sample");
    const std::size_t n = sample.size();
    for (std::size_t ba = 1; ba <= opt.beta_max; ++ba) {
        const std::size_t smax = ba * opt.head_max + 1;
        const std::size_t count =
            std::max(3 * n, smax + ba * static_cast<std::size_t>(opt.deg_max + 3));
        const std::vector<mpz_class> ext = extend_sequence(rec, count);
        for (std::size_t s = 1; s <= smax; ++s) {
            std::vector<Poly> A;
            for (std::size_t i = 0; i < ba; ++i) {
                std::vector<mpz_class> ys;
                for (std::size_t j = s + i; j < ext.size(); j += ba) ys.push_back(ext[j]);
                auto p = fit_integer_poly(ys, opt.deg_max, 1);
                if (!p) break;
                A.push_back(*p);
            }
            if (A.size() != ba) continue;
            InterlacedClosedForm f;
            f.head.emplace_back(ext[0], 0);
            for (std::size_t j = 1; j < s; ++j) f.head.emplace_back(ext[j], pattern.at(j));
            f.A = A;
            f.B.assign(ba, Poly(1));
            const std::size_t beta = std::lcm(ba, pattern.period());
            if (beta != ba) f = unroll(f, beta / ba);
            for (std::size_t i = 0; i < beta; ++i) f.B[i] = Poly(pattern.at(s + i));
            return f;
        }
    }
    return std::nullopt;
}

}  // namespace esma
