#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bigint.hpp"
#include "cf.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "extraction.hpp"
#include "rational_function.hpp"
#include "recurrence.hpp"
#include "sicf.hpp"

namespace esma {

struct SearchSpace {
    int m = 1;                     // max degree of f and g
    long L = 3;                    // coefficient bound
    std::size_t beta_b = 5;        // max sign-pattern period
    std::size_t N = 50;            // extraction depth
    unsigned long verify_digits = 1000;
    std::uint64_t prime = kDefaultPrime;

    void validate() const {
        if (m < 0 || L < 1 || beta_b < 1 || N < 2 || verify_digits < 1 || prime < 3)
            throw std::invalid_argument("search space parameters must be positive (m >= 0, N >= 2)");
    }

    /// (2L+1)^{2(m+1)} 2^{beta_b} N^2
    mpz_class complexity_estimate() const {
        mpz_class c;
        mpz_ui_pow_ui(c.get_mpz_t(), static_cast<unsigned long>(2 * L + 1), static_cast<unsigned long>(2 * (m + 1)));
        c <<= beta_b;
        c *= static_cast<unsigned long>(N * N);
        return c;
    }

    json to_json() const {
        return {{"m", m}, {"L", L}, {"beta_b", beta_b}, {"N", N}, {"verify_digits", verify_digits}, {"prime", prime}};
    }
    static SearchSpace from_json(const json& j) {
        SearchSpace s;
        s.m = j.value("m", s.m);
        s.L = j.value("L", s.L);
        s.beta_b = j.value("beta_b", s.beta_b);
        s.N = j.value("N", s.N);
        s.verify_digits = j.value("verify_digits", s.verify_digits);
        s.prime = j.value("prime", s.prime);
        return s;
    }
};

/// Canonical, deduplicated, non-constant f/g with deg <= m and coefficients in [-L, L], in
/// height order.
inline std::vector<RationalFunction> enumerate_rational_functions(int m, long L) {
    if (m < 0 || L < 1) throw std::invalid_argument("enumerate_rational_functions needs m >= 0 and L >= 1");
    const std::size_t k = static_cast<std::size_t>(m) + 1;
    const long base = 2 * L + 1;
    std::vector<Poly> polys;
    std::vector<long> digits(k, -L);
    for (;;) {
        std::vector<mpz_class> c(digits.begin(), digits.end());
        polys.emplace_back(std::move(c));
        std::size_t i = 0;
        while (i < k && ++digits[i] > L) digits[i++] = -L;
        if (i == k) break;
    }
    (void)base;
    std::set<RationalFunction> seen;
    for (const auto& g : polys) {
        if (g.is_zero()) continue;
        for (const auto& f : polys) {
            RationalFunction r{f, g};
            if (r.constant_valued()) continue;
            seen.insert(r.canonical());
        }
    }
    return {seen.begin(), seen.end()};
}

/// All +-1 tuples of period 1..beta_b in period-then-lexicographic order (+1 first). Unless raw,
/// tuples that repeat a shorter period are dropped.
inline std::vector<SignPattern> enumerate_sign_patterns(std::size_t beta_b, bool raw = false) {
    if (beta_b < 1) throw std::invalid_argument("beta_b must be positive");
    std::vector<SignPattern> out;
    for (std::size_t p = 1; p <= beta_b; ++p) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
            std::vector<int> s(p);
            for (std::size_t i = 0; i < p; ++i) s[i] = (mask >> (p - 1 - i)) & 1 ? -1 : 1;
            SignPattern sp(s);
            if (raw || sp.primitive()) out.push_back(sp);
        }
    }
    return out;
}

struct Conjecture {
    ConstantSpec constant;
    RationalFunction rational_function;
    SignPattern sign_pattern;
    LinearRecurrence recurrence;
    std::optional<InterlacedClosedForm> closed_form;
    unsigned long verified_digits = 0;
    std::optional<double> rate;
    SearchSpace search_params;
    std::string created_at;
    std::vector<std::string> equivalents;  // other rational functions with the same tail

    /// a_0 .. a_{count-1} regenerated from the recurrence.
    std::vector<mpz_class> terms(std::size_t count) const { return extend_sequence(recurrence, count); }

    GeneralizedCF to_cf() const {
        auto rec = std::make_shared<LinearRecurrence>(recurrence);
        auto cache = std::make_shared<std::vector<mpz_class>>(extend_sequence(recurrence, std::max<std::size_t>(recurrence.L, 2)));
        auto mtx = std::make_shared<std::mutex>();
        GeneralizedCF cf;
        cf.a0 = (*cache)[0];
        SignPattern pat = sign_pattern;
        cf.generator = [rec, cache, mtx, pat](std::size_t j) {
            std::lock_guard<std::mutex> lock(*mtx);
            while (cache->size() <= j) cache->push_back(rec->next(*cache, cache->size()));
            return Term{(*cache)[j], mpz_class(pat.at(j))};
        };
        cf.source = rational_function.to_string() + " of " + constant.label;
        return cf;
    }

    json to_json() const {
        json j;
        j["constant"] = constant.to_json();
        j["rational_function"] = rational_function.to_json();
        j["sign_pattern"] = sign_pattern.to_json();
        j["recurrence"] = recurrence.to_json();
        j["recurrence_text"] = recurrence.to_string();
        j["closed_form"] = closed_form ? closed_form->to_json() : json(nullptr);
        if (closed_form) j["closed_form_text"] = closed_form->to_string();
        j["verified_digits"] = verified_digits;
        j["rate"] = rate ? json(*rate) : json(nullptr);
        j["search_params"] = search_params.to_json();
        j["created_at"] = created_at;
        j["equivalents"] = equivalents;
        return j;
    }
    static Conjecture from_json(const json& j) {
        Conjecture c;
        c.constant = ConstantSpec::from_json(j.at("constant"));
        c.rational_function = RationalFunction::from_json(j.at("rational_function"));
        c.sign_pattern = SignPattern::from_json(j.at("sign_pattern"));
        c.recurrence = LinearRecurrence::from_json(j.at("recurrence"));
        if (j.contains("closed_form") && !j.at("closed_form").is_null())
            c.closed_form = InterlacedClosedForm::from_json(j.at("closed_form"));
        c.verified_digits = j.value("verified_digits", 0UL);
        if (j.contains("rate") && !j.at("rate").is_null()) c.rate = j.at("rate").get<double>();
        if (j.contains("search_params")) c.search_params = SearchSpace::from_json(j.at("search_params"));
        c.created_at = j.value("created_at", std::string());
        if (j.contains("equivalents")) c.equivalents = j.at("equivalents").get<std::vector<std::string>>();
        return c;
    }
};

struct VerifyResult {
    bool verified = false;
    std::optional<unsigned long> mismatch_digit;  // agreement before the CF settled elsewhere
    unsigned long achieved_digits = 0;
    std::size_t depth = 0;
    std::string message;

    json to_json() const {
        json j{{"verified", verified}, {"achieved_digits", achieved_digits}, {"depth", depth}, {"message", message}};
        if (mismatch_digit) j["mismatch_digit"] = *mismatch_digit;
        return j;
    }
};

/// Enclosure of f(c)/g(c) for the record's constant, at least `digits` + 50 digits wide.
inline RationalInterval target_enclosure(const ConstantSpec& spec, const RationalFunction& rf, unsigned long digits) {
    RationalInterval c;
    try {
        c = evaluate_constant(spec, digits + 100).interval();
    } catch (const PrecisionError& e) {
        if (spec.kind != ConstantSpec::Kind::user_decimal || e.achieved() <= 0) throw;
        c = evaluate_constant(spec, static_cast<unsigned long>(e.achieved())).interval();
    }
    return rf(c);
}

/// Runs the convergent recursion on (terms, signs) until the approximation settles to `digits`
/// digits, then compares with the target. Depth bound 10 * digits + 100.
inline VerifyResult verify_terms(const std::function<Term(std::size_t)>& term, const mpz_class& a0,
                                 const RationalInterval& target, unsigned long digits, std::size_t max_depth = 0) {
    VerifyResult res;
    if (max_depth == 0) max_depth = 10 * static_cast<std::size_t>(digits) + 100;
    const double res_log = target.exact() ? -1e300 : log10_abs(target.width());
    if (res_log > -static_cast<double>(digits) - 5) throw PrecisionError("target enclosure too wide for verification");
    const unsigned long K = digits + 20;
    const mpz_class scale = pow10(K), tol = pow10(K - digits), settle = pow10(digits), loose = pow10(K + 6);
    const mpz_class U = floor_q(target.mid() * scale);
    mpz_class p_prev = 1, q_prev = 0, p = a0, q = 1;
    double best = 0;
    for (std::size_t j = 1; j <= max_depth; ++j) {
        Term t = term(j);
        mpz_class pn = t.a * p + t.b * p_prev, qn = t.a * q + t.b * q_prev;
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(pn);
        q = std::move(qn);
        res.depth = j;
        if (q == 0 || q_prev == 0) continue;
        const mpz_class aq = abs(q);
        const mpz_class E = abs(p * scale - q * U);
        const mpz_class gap_den = aq * abs(q_prev);
        if (E == 0) best = static_cast<double>(K);
        else best = std::max(best, static_cast<double>(K) - log10_abs(mpq_class(E, aq)));
        if (gap_den > settle && E < aq * tol) {
            res.verified = true;
            res.achieved_digits = digits;
            res.message = "verified";
            return res;
        }
        // Successive convergents agree far better than they agree with the target.
        if (gap_den > pow10(10) && E * abs(q_prev) > loose) {
            mpq_class err(E, aq * scale);
            res.mismatch_digit = static_cast<unsigned long>(std::max(0.0, std::floor(-log10_abs(err))));
            res.achieved_digits = *res.mismatch_digit;
            res.message = "mismatch at digit " + std::to_string(*res.mismatch_digit);
            return res;
        }
    }
    res.achieved_digits = static_cast<unsigned long>(std::max(0.0, std::min(best, static_cast<double>(digits))));
    res.message = "depth bound reached before " + std::to_string(digits) + " digits";
    return res;
}

inline VerifyResult verify_conjecture(const Conjecture& conj, unsigned long digits,
                                      const std::optional<RationalInterval>& target = std::nullopt) {
    RationalInterval x = target ? *target : target_enclosure(conj.constant, conj.rational_function, digits);
    GeneralizedCF cf = conj.to_cf();
    return verify_terms([&cf](std::size_t j) { return cf.generator(j); }, cf.a0, x, digits);
}

struct SearchStats {
    std::size_t candidates = 0, pole = 0, precision = 0, significant = 0, verified = 0, rejected = 0, emitted = 0;
    std::vector<std::string> log;

    json to_json() const {
        return {{"candidates", candidates}, {"pole", pole}, {"precision", precision}, {"significant", significant},
                {"verified", verified}, {"rejected", rejected}, {"emitted", emitted}};
    }
};

struct RunOptions {
    std::size_t jobs = 1;
    bool dedupe = true;
    bool raw_patterns = false;
    std::optional<std::vector<SignPattern>> patterns;  // overrides the enumeration
    std::optional<std::string> created_at;             // fixed stamp for reproducible output
};

inline std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace detail {

inline constexpr std::size_t kTailStart = 60, kTailWindow = 40, kTailShift = 30;

// Two records are Mobius-equivalent when their (a_j, b_j) streams agree on a long window up to
// a bounded index shift.
inline bool same_tail(const Conjecture& x, const std::vector<mpz_class>& xa, const Conjecture& y,
                      const std::vector<mpz_class>& ya) {
    for (std::size_t s = kTailStart - kTailShift; s <= kTailStart + kTailShift; ++s) {
        bool ok = true;
        for (std::size_t w = 0; w < kTailWindow && ok; ++w) {
            const std::size_t i = kTailStart + w, k = s + w;
            ok = xa[i] == ya[k] && x.sign_pattern.at(i) == y.sign_pattern.at(k);
        }
        if (ok) return true;
    }
    return false;
}

inline bool representative_less(const Conjecture& a, const Conjecture& b) {
    if (a.recurrence.L != b.recurrence.L) return a.recurrence.L < b.recurrence.L;
    if (!(a.rational_function == b.rational_function)) return a.rational_function < b.rational_function;
    return a.sign_pattern < b.sign_pattern;
}

}  // namespace detail

/// Groups Mobius-equivalent records and keeps the one with the shortest recurrence, then the
/// smallest rational function; the others are listed in `equivalents`.
inline std::vector<Conjecture> dedupe_conjectures(std::vector<Conjecture> in) {
    using namespace detail;
    const std::size_t n = in.size();
    std::vector<std::vector<mpz_class>> tails(n);
    for (std::size_t i = 0; i < n; ++i) tails[i] = in[i].terms(kTailStart + kTailShift + kTailWindow + 1);
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t i) { return parent[i] == i ? i : parent[i] = root(parent[i]); };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (root(i) != root(j) && same_tail(in[i], tails[i], in[j], tails[j])) parent[root(j)] = root(i);
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[root(i)].push_back(i);
    std::vector<Conjecture> out;
    for (auto& [r, members] : groups) {
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return representative_less(in[a], in[b]); });
        Conjecture rep = in[members[0]];
        for (std::size_t k = 1; k < members.size(); ++k) {
            rep.equivalents.push_back(in[members[k]].rational_function.to_string());
            for (const auto& e : in[members[k]].equivalents) rep.equivalents.push_back(e);
        }
        std::sort(rep.equivalents.begin(), rep.equivalents.end());
        rep.equivalents.erase(std::unique(rep.equivalents.begin(), rep.equivalents.end()), rep.equivalents.end());
        out.push_back(std::move(rep));
    }
    return out;
}

inline bool conjecture_order(const Conjecture& a, const Conjecture& b) {
    if (!(a.rational_function == b.rational_function)) return a.rational_function < b.rational_function;
    return a.sign_pattern < b.sign_pattern;
}

/// Processes one (rational function, sign pattern) candidate. Returns a verified record or
/// nothing; failures are counted in `stats` under the caller's lock.
inline std::optional<Conjecture> search_candidate(const ConstantSpec& spec, const RationalInterval& c,
                                                  const RationalFunction& rf, const SignPattern& pattern,
                                                  const SearchSpace& space, std::string& note, int& outcome) {
    // outcome: 0 pole, 1 precision, 2 not significant, 3 rejected, 4 verified
    RationalInterval x;
    try {
        x = rf(c);
    } catch (const PoleError&) {
        outcome = 0;
        return std::nullopt;
    } catch (const std::domain_error&) {
        outcome = 0;
        return std::nullopt;
    }
    SequenceSample sample = extract_signed_cf(x, pattern, space.N);
    if (sample.terms.size() < 2) {
        outcome = 1;
        note = "precision exhausted after " + std::to_string(sample.terms.size()) + " terms";
        return std::nullopt;
    }
    LinearRecurrence rec = berlekamp_massey(sample.terms, space.prime);
    if (!is_significant(rec.L, sample.terms.size())) {
        outcome = 2;
        return std::nullopt;
    }
    Conjecture conj;
    conj.constant = spec;
    conj.rational_function = rf;
    conj.sign_pattern = pattern;
    conj.recurrence = rec;
    conj.search_params = space;
    VerifyResult v = verify_terms(
        [g = conj.to_cf()](std::size_t j) { return g.generator(j); }, sample.terms[0], x, space.verify_digits);
    if (!v.verified) {
        outcome = 3;
        note = v.message;
        return std::nullopt;
    }
    conj.verified_digits = space.verify_digits;
    conj.closed_form = interlace_decompose(rec, sample.terms, pattern);
    try {
        ErrorTarget t{x.mid(), log10_abs(x.width())};
        conj.rate = digits_per_term(conj.to_cf(), t, 0, 100);
    } catch (const std::exception&) {
        conj.rate.reset();
    }
    outcome = 4;
    return conj;
}

inline std::vector<Conjecture> run_search(const ConstantSpec& spec, const SearchSpace& space, const RunOptions& opt = {},
                                          SearchStats* stats = nullptr) {
    space.validate();
    const std::vector<RationalFunction> rfs = enumerate_rational_functions(space.m, space.L);
    const std::vector<SignPattern> patterns = opt.patterns ? *opt.patterns : enumerate_sign_patterns(space.beta_b, opt.raw_patterns);
    const RationalInterval c = [&] {
        try {
            return evaluate_constant(spec, space.verify_digits + 100).interval();
        } catch (const PrecisionError& e) {
            if (spec.kind != ConstantSpec::Kind::user_decimal || e.achieved() <= 0) throw;
            return evaluate_constant(spec, static_cast<unsigned long>(e.achieved())).interval();
        }
    }();
    const std::string stamp = opt.created_at ? *opt.created_at : utc_timestamp();

    const std::size_t total = rfs.size() * patterns.size();
    std::vector<std::optional<Conjecture>> found(total);
    SearchStats local;
    local.candidates = total;
    std::mutex mtx;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            const RationalFunction& rf = rfs[i / patterns.size()];
            const SignPattern& pat = patterns[i % patterns.size()];
            std::string note;
            int outcome = -1;
            std::optional<Conjecture> r;
            try {
                r = search_candidate(spec, c, rf, pat, space, note, outcome);
            } catch (const std::exception& e) {
                outcome = 1;
                note = e.what();
            }
            std::lock_guard<std::mutex> lock(mtx);
            switch (outcome) {
                case 0: ++local.pole; break;
                case 1: ++local.precision; break;
                case 3: ++local.significant; ++local.rejected; break;
                case 4: ++local.significant; ++local.verified; break;
                default: break;
            }
            if (!note.empty()) local.log.push_back(rf.to_string() + " " + pat.to_string() + ": " + note);
            if (r) {
                r->created_at = stamp;
                found[i] = std::move(r);
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, opt.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::vector<Conjecture> out;
    for (auto& f : found)
        if (f) out.push_back(std::move(*f));
    if (opt.dedupe) out = dedupe_conjectures(std::move(out));
    std::sort(out.begin(), out.end(), conjecture_order);
    std::sort(local.log.begin(), local.log.end());
    local.emitted = out.size();
    if (stats) *stats = std::move(local);
    return out;
}

inline json conjectures_to_json(const std::vector<Conjecture>& cs) {
    json a = json::array();
    for (const auto& c : cs) a.push_back(c.to_json());
    return a;
}

inline std::vector<Conjecture> conjectures_from_json(const json& j) {
    std::vector<Conjecture> out;
    for (const auto& c : j) out.push_back(Conjecture::from_json(c));
    return out;
}

}  // namespace esma
