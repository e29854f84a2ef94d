#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "cf.hpp"
#include "errors.hpp"
#include "poly.hpp"
#include "sicf.hpp"

namespace esma {

// ---------------------------------------------------------------------------------------------
// Folding transform

struct FoldResult {
    MobiusMap mobius;  // source value = mobius(folded value)
    Poly b_poly, a_poly;
    long start_index = 2;

    GeneralizedCF folded_cf() const {
        GeneralizedCF cf;
        auto b = b_poly, a = a_poly;
        const long s = start_index;
        cf.generator = [a, b, s](std::size_t j) {
            mpz_class n(static_cast<long>(j) + s - 1);
            return Term{a(n), b(n)};
        };
        cf.source = "fold: b'(n) = " + b_poly.to_string() + ", a'(n) = " + a_poly.to_string();
        return cf;
    }

    json to_json() const {
        return {{"mobius", mobius.to_json()}, {"b", b_poly.to_json()}, {"a", a_poly.to_json()},
                {"start_index", start_index}, {"b_text", b_poly.to_string()}, {"a_text", a_poly.to_string()}};
    }
};

/// Conjugates the collapsed product by U_n = (1 c_n; 0 e_n) and normalizes with g_n = e_n.
inline FoldResult fold(const InterlacedClosedForm& form) {
    const PolyMatrix M = collapse(form);
    const Poly &c = M.c, &d = M.d, &e = M.e, &f = M.f;
    if (e.is_zero()) throw std::domain_error("fold: collapsed e_n is identically zero (divergent source)");
    if (!nonvanishing_from(e, 1)) throw std::domain_error("fold: collapsed e_n vanishes at some n >= 1");
    const Poly delta = e * d - c * f;
    FoldResult r;
    r.b_poly = e.shifted(-1) * e.shifted(1) * delta;
    r.a_poly = e * c.shifted(1) + f * e.shifted(1);
    r.start_index = 2;
    const MobiusMap U2{1, c(2L), 0, e(2L)};
    r.mobius = head_prefix(form) * M.at(1L) * U2 * MobiusMap{1, 0, 0, e(1L)};
    if (r.mobius.det() == 0) throw std::domain_error("fold: singular Mobius map");
    if (r.b_poly.is_zero()) throw std::domain_error("fold: zero partial numerator");
    return r;
}

/// Digits of agreement between the source at depth head + beta*(depth+1) and the folded CF at
/// `depth` mapped through the Mobius relation.
inline double fold_agreement(const InterlacedClosedForm& form, const FoldResult& r, std::size_t depth) {
    const std::size_t src_depth = form.head_terms() + form.beta() * (depth + 1);
    mpq_class src = cf_value(to_general_cf(form), src_depth);
    Convergent fc = convergent_at(r.folded_cf(), depth);
    mpq_class val = r.mobius.apply(mpq_class(fc.p, fc.q));
    mpq_class diff = src - val;
    diff.canonicalize();
    if (diff == 0) return std::numeric_limits<double>::infinity();
    return -log10_abs(diff);
}

/// fold() followed by a numeric identity check to `digits` digits.
inline FoldResult fold(const InterlacedClosedForm& form, unsigned long digits) {
    FoldResult r = fold(form);
    if (digits == 0) return r;
    double best = 0;
    for (std::size_t depth = 16; depth <= 4096; depth *= 2) {
        best = fold_agreement(form, r, depth);
        if (best >= static_cast<double>(digits)) return r;
    }
    throw PrecisionError("fold: numeric identity not confirmed to the requested digits", static_cast<long>(best));
}

// ---------------------------------------------------------------------------------------------
// Degrees and convergence

struct DegreePrediction {
    int deg_b = 0, deg_a = 0;
    std::array<int, 4> profile{};  // deg c, d, e, f of the collapsed matrix

    json to_json() const { return {{"deg_b", deg_b}, {"deg_a", deg_a}, {"profile", profile}}; }
};

inline DegreePrediction predict_degrees(const InterlacedClosedForm& form) {
    form.validate();
    if (!form.simple_numerators()) throw std::invalid_argument("predict_degrees needs partial numerators B_i = 1");
    for (const auto& a : form.A)
        if (!at_least_from(a, 1)) throw std::invalid_argument("predict_degrees needs A_i(n) > 0 for n >= 1");
    const std::size_t beta = form.beta();
    std::vector<int> deg;
    for (const auto& a : form.A) deg.push_back(a.degree());
    if (std::all_of(deg.begin(), deg.end(), [](int v) { return v == 0; }))
        throw std::invalid_argument("predict_degrees needs a non-constant A_i");
    auto sum = [&](std::size_t from, std::size_t to) {  // 1-based inclusive
        int s = 0;
        for (std::size_t i = from; i <= to; ++i) s += deg[i - 1];
        return s;
    };
    DegreePrediction p;
    p.deg_b = 2 * sum(1, beta - 1);
    p.deg_a = p.deg_b + deg[beta - 1];
    if (beta == 1) p.profile = {-1, 0, 0, deg[0]};
    else p.profile = {sum(2, beta - 1), sum(2, beta), sum(1, beta - 1), sum(1, beta)};
    return p;
}

enum class Convergence { super_exponential, exponential, divergent, unknown };

inline std::string to_string(Convergence c) {
    switch (c) {
        case Convergence::super_exponential: return "super-exponential";
        case Convergence::exponential: return "exponential";
        case Convergence::divergent: return "divergent";
        default: return "unknown";
    }
}

/// Polynomial CF b'(n)/(a'(n) + ...) classified by the degree ratio of b' and a'.
inline Convergence classify_convergence(const FoldResult& r) {
    if (r.b_poly.is_zero() || r.a_poly.is_zero() || r.a_poly.lead() <= 0) return Convergence::unknown;
    const int db = r.b_poly.degree(), da = r.a_poly.degree();
    if (db < 2 * da) return Convergence::super_exponential;
    if (db > 2 * da) return Convergence::unknown;
    const mpz_class la = r.a_poly.lead(), lb = r.b_poly.lead();
    if (la * la + 4 * lb > 0) return Convergence::exponential;
    return Convergence::unknown;
}

// ---------------------------------------------------------------------------------------------
// Tietze

enum class Irrationality { irrational, inconclusive };

struct TietzeResult {
    Irrationality verdict = Irrationality::inconclusive;
    bool symbolic = false;      // true: proved on the closed form for all n
    std::size_t from_index = 0;  // N_0 (symbolic) or first scanned index
    std::size_t horizon = 0;     // last index checked by a finite scan
    std::string note;

    json to_json() const {
        json j{{"verdict", verdict == Irrationality::irrational ? "irrational" : "inconclusive"},
               {"symbolic", symbolic},
               {"from_index", from_index}};
        if (!symbolic) j["horizon"] = horizon;
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

/// Tietze's criterion on the closed form: checked eventually for each sub-sequence.
inline TietzeResult tietze_irrationality(const InterlacedClosedForm& form) {
    form.validate();
    TietzeResult res;
    res.symbolic = true;
    mpz_class n0 = 1;
    const std::size_t beta = form.beta();
    for (std::size_t i = 0; i < beta; ++i) {
        const Poly& a = form.A[i];
        const Poly abs_b = form.B[i].lead() < 0 ? -form.B[i] : form.B[i];
        const Poly next_b = i + 1 < beta ? form.B[i + 1] : form.B[0].shifted(1);
        const mpz_class need = next_b.lead() < 0 ? 1 : 0;
        auto s1 = first_index_at_least(a, 1, 1);
        auto s2 = first_index_at_least(a - abs_b, need, 1);
        if (!s1 || !s2) {
            res.note = "sub-sequence " + std::to_string(i + 1) + " violates the criterion";
            return res;
        }
        n0 = std::max({n0, *s1, *s2});
    }
    res.verdict = Irrationality::irrational;
    res.from_index = form.head_terms() + (n0.get_ui() - 1) * beta + 1;
    return res;
}

/// Finite scan of a_j, b_j (index 0 holds j = 1) from j = n0; only certifies up to the horizon.
inline TietzeResult tietze_irrationality(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                         std::size_t n0 = 1) {
    if (a.size() != b.size()) throw std::invalid_argument("a and b lists differ in length");
    TietzeResult res;
    res.from_index = n0;
    if (a.size() < 2 || n0 < 1 || n0 >= a.size()) {
        res.note = "sequence too short for the requested start";
        return res;
    }
    for (std::size_t j = n0; j < a.size(); ++j) {  // j is 1-based; b_{j+1} = b[j]
        const mpz_class& aj = a[j - 1];
        mpz_class bj = abs(b[j - 1]);
        if (aj <= 0 || aj < bj || (b[j] < 0 && aj < bj + 1)) {
            res.note = "criterion fails at j = " + std::to_string(j);
            res.horizon = j;
            return res;
        }
    }
    res.verdict = Irrationality::irrational;
    res.horizon = a.size() - 1;
    res.note = "holds for j = " + std::to_string(n0) + ".." + std::to_string(res.horizon) + " only";
    return res;
}

// ---------------------------------------------------------------------------------------------
// Layer identities

struct Layer {
    Poly a, b;
    friend bool operator==(const Layer& x, const Layer& y) { return x.a == y.a && x.b == y.b; }
};

inline std::vector<Layer> layers_of(const InterlacedClosedForm& f) {
    std::vector<Layer> out;
    for (std::size_t i = 0; i < f.beta(); ++i) out.push_back({f.A[i], f.B[i]});
    return out;
}

inline PolyMatrix layer_product(const std::vector<Layer>& ls) {
    PolyMatrix m = PolyMatrix::identity();
    for (const auto& l : ls) m = m * PolyMatrix::layer(l.a, l.b);
    return m;
}

/// (a_{j-1}, b_{j-1}), (a_j, -1) -> (a_{j-1} - 1, b_{j-1}), (1, 1), (a_j - 1, 1); position = j.
inline std::vector<Layer> apply_identity1(const std::vector<Layer>& ls, std::size_t position) {
    if (position == 0 || position >= ls.size()) throw std::invalid_argument("identity 1: position needs a left neighbour");
    if (ls[position].b != Poly(-1)) throw std::invalid_argument("identity 1: pattern mismatch (partial numerator is not -1)");
    std::vector<Layer> out(ls.begin(), ls.begin() + static_cast<long>(position) - 1);
    out.push_back({ls[position - 1].a - Poly(1), ls[position - 1].b});
    out.push_back({Poly(1), Poly(1)});
    out.push_back({ls[position].a - Poly(1), Poly(1)});
    out.insert(out.end(), ls.begin() + static_cast<long>(position) + 1, ls.end());
    return out;
}

/// (a_{j-1}, b_{j-1}), (0, b_j), (a_{j+1}, b_{j+1}) -> (a_{j+1} + b_{j+1} b_j a_{j-1}, b_{j-1} b_j b_{j+1}).
inline std::vector<Layer> apply_identity2(const std::vector<Layer>& ls, std::size_t position) {
    if (position == 0 || position + 1 >= ls.size()) throw std::invalid_argument("identity 2: position needs two neighbours");
    const Layer &l = ls[position - 1], &z = ls[position], &r = ls[position + 1];
    if (!z.a.is_zero()) throw std::invalid_argument("identity 2: pattern mismatch (partial denominator is not 0)");
    if (z.b != Poly(1) && z.b != Poly(-1)) throw std::invalid_argument("identity 2: partial numerator must be +-1");
    std::vector<Layer> out(ls.begin(), ls.begin() + static_cast<long>(position) - 1);
    out.push_back({r.a + r.b * z.b * l.a, l.b * z.b * r.b});
    out.insert(out.end(), ls.begin() + static_cast<long>(position) + 2, ls.end());
    return out;
}

namespace detail {
inline InterlacedClosedForm with_layers(const InterlacedClosedForm& f, const std::vector<Layer>& ls) {
    InterlacedClosedForm g;
    g.head = f.head;
    for (const auto& l : ls) {
        g.A.push_back(l.a);
        g.B.push_back(l.b);
    }
    return g;
}
}  // namespace detail

/// Identity 1 applied inside every period; position is the 0-based period index of the -1 layer.
inline InterlacedClosedForm apply_identity1(const InterlacedClosedForm& f, std::size_t position) {
    f.validate();
    return detail::with_layers(f, apply_identity1(layers_of(f), position));
}

inline InterlacedClosedForm apply_identity2(const InterlacedClosedForm& f, std::size_t position) {
    f.validate();
    return detail::with_layers(f, apply_identity2(layers_of(f), position));
}

// ---------------------------------------------------------------------------------------------
// SICF -> simple interlaced CF

enum class SimplifyStatus { simple, divergent, rational, budget_exhausted };

inline std::string to_string(SimplifyStatus s) {
    switch (s) {
        case SimplifyStatus::simple: return "simple";
        case SimplifyStatus::divergent: return "divergent";
        case SimplifyStatus::rational: return "rational";
        default: return "not normalized within budget";
    }
}

struct RewriteStep {
    std::string op;
    std::size_t beta = 0;
    std::size_t negatives = 0;  // -1 numerators per period after the step
};

struct SimplifyResult {
    SimplifyStatus status = SimplifyStatus::simple;
    MobiusMap mobius;  // simple value = mobius(source value)
    InterlacedClosedForm form;
    std::vector<RewriteStep> trace;

    json to_json() const {
        json j{{"status", to_string(status)}, {"mobius", mobius.to_json()}, {"mobius_text", mobius.to_string()}};
        if (status == SimplifyStatus::simple || status == SimplifyStatus::budget_exhausted) j["form"] = form.to_json();
        j["trace"] = json::array();
        for (const auto& s : trace) j["trace"].push_back({{"op", s.op}, {"beta", s.beta}, {"negatives", s.negatives}});
        return j;
    }
};

namespace detail {

// Source value = P(value of the periodic product of `layers`, n >= 1).
struct RewriteState {
    MobiusMap P;
    std::vector<Layer> layers;
    std::vector<RewriteStep> trace;

    std::size_t beta() const { return layers.size(); }
    std::size_t negatives() const {
        return static_cast<std::size_t>(std::count_if(layers.begin(), layers.end(), [](const Layer& l) { return l.b == Poly(-1); }));
    }
    void log(std::string op) { trace.push_back({std::move(op), beta(), negatives()}); }

    void absorb(long s) {
        for (long n = 1; n <= s; ++n)
            for (const auto& l : layers) P *= MobiusMap::layer(l.a(n), l.b(n));
        for (auto& l : layers) {
            l.a = l.a.shifted(s);
            l.b = l.b.shifted(s);
        }
    }
    void rotate(std::size_t k) {
        k %= beta();
        if (k == 0) return;
        for (std::size_t i = 0; i < k; ++i) P *= MobiusMap::layer(layers[i].a(1L), layers[i].b(1L));
        std::vector<Layer> r(layers.begin() + static_cast<long>(k), layers.end());
        for (std::size_t i = 0; i < k; ++i) r.push_back({layers[i].a.shifted(1), layers[i].b.shifted(1)});
        layers = std::move(r);
    }
    // Inverse of rotate(1); needs the last layer to be defined at n = 0.
    void rotate_back() {
        Layer last = layers.back();
        mpz_class a0 = last.a(0L), b0 = last.b(0L);
        P *= MobiusMap{-a0, b0, 1, 0};  // layer(a0, b0)^{-1} up to the scalar -b0
        layers.pop_back();
        layers.insert(layers.begin(), {last.a.shifted(-1), last.b.shifted(-1)});
    }
    // Inserts J J = I, J = diag(1, -1), between period position k-1 and k in every period.
    void flip(std::size_t k) {
        const std::size_t beta_ = beta();
        k %= beta_;
        const std::size_t prev = (k + beta_ - 1) % beta_;
        layers[prev].a = -layers[prev].a;
        layers[prev].b = -layers[prev].b;
        layers[k].b = -layers[k].b;
        if (k == 0) P *= MobiusMap{1, 0, 0, -1};
    }
};

}  // namespace detail

/// Rewrites an SICF into a Mobius map and a simple interlaced CF (B = 1, A_i(n) >= 1 for n >= 1).
inline SimplifyResult sicf_to_simple(const InterlacedClosedForm& form, std::size_t budget = 64) {
    form.validate();
    if (!form.signed_constant_numerators()) throw std::invalid_argument("sicf_to_simple needs partial numerators +-1");
    SimplifyResult res;
    res.form = form;
    if (form.is_simple()) return res;

    detail::RewriteState st;
    st.P = head_prefix(form);
    st.layers = layers_of(form);
    auto finish = [&](SimplifyStatus s) {
        res.status = s;
        res.mobius = st.P.adjugate().normalized();
        res.trace = st.trace;
        InterlacedClosedForm g;
        for (const auto& l : st.layers) {
            g.A.push_back(l.a);
            g.B.push_back(l.b);
        }
        res.form = g;
        return res;
    };

    // Removes zero and negative partial denominators without adding -1 numerators.
    auto normalize = [&]() -> std::optional<SimplifyStatus> {
        for (std::size_t guard = 0; guard < 4 * budget; ++guard) {
            auto zero = std::find_if(st.layers.begin(), st.layers.end(), [](const Layer& l) { return l.a.is_zero(); });
            if (zero != st.layers.end()) {
                if (st.beta() == 1) return SimplifyStatus::divergent;
                if (st.beta() == 2) return SimplifyStatus::rational;
                const std::size_t k = static_cast<std::size_t>(zero - st.layers.begin());
                st.rotate((k + st.beta() - 1) % st.beta());
                st.layers = apply_identity2(st.layers, 1);
                st.log("identity2");
                continue;
            }
            auto neg = std::find_if(st.layers.begin(), st.layers.end(), [](const Layer& l) { return l.a.lead() < 0; });
            if (neg != st.layers.end()) {
                st.flip(static_cast<std::size_t>(neg - st.layers.begin()) + 1);
                st.log("identity3");
                continue;
            }
            long s = 0;
            for (const auto& l : st.layers) s = std::max(s, first_index_at_least(l.a, 1, 1)->get_si() - 1);
            if (s > 0) {
                st.absorb(s);
                st.log("absorb");
            }
            return std::nullopt;
        }
        return SimplifyStatus::budget_exhausted;
    };

    for (std::size_t iter = 0; iter < budget; ++iter) {
        if (auto s = normalize()) return finish(*s);
        if (st.negatives() == 0) break;
        if (st.beta() == 1) {
            const Poly& A = st.layers[0].a;
            if (A.is_constant()) {
                if (A.constant() == 1) return finish(SimplifyStatus::divergent);
                if (A.constant() == 2) return finish(SimplifyStatus::rational);
            }
            long s = first_index_at_least(A, 3, 1)->get_si() - 1;
            if (s > 0) st.absorb(s);
            // (0 -1; 1 A) = X (0 1; 1 A-1) with the involution X = (-1 0; 1 1).
            st.P *= MobiusMap{-1, 0, 1, 1};
            const Poly a = st.layers[0].a;
            st.layers = {{a - Poly(2), Poly(1)}, {Poly(1), Poly(1)}};
            st.log("base1");
            continue;
        }
        const std::size_t beta = st.beta();
        std::optional<std::size_t> pick;
        for (std::size_t k = 0; k < beta && !pick; ++k)
            if (st.layers[k].b == Poly(-1) && st.layers[(k + beta - 1) % beta].b == Poly(1)) pick = k;
        if (!pick) {
            // Every numerator is -1: prefer a layer whose denominator stays positive.
            for (std::size_t k = 0; k < beta && !pick; ++k)
                if (at_least_from(st.layers[k].a, 2)) pick = k;
            if (!pick)
                for (std::size_t k = 0; k < beta && !pick; ++k)
                    if (!st.layers[k].a.is_constant()) pick = k;
            if (!pick) pick = 0;
        }
        std::size_t k = *pick;
        if (k == 0) {
            st.rotate(beta - 1);
            k = 1;
        }
        st.layers = apply_identity1(st.layers, k);
        st.log("identity1");
    }
    if (st.negatives() != 0) return finish(SimplifyStatus::budget_exhausted);

    // Canonical representative: smallest Mobius entries over rotations of the period.
    detail::RewriteState best = st;
    auto weight = [](const MobiusMap& m) -> mpz_class {
        MobiusMap t = m.adjugate().normalized();
        return abs(t.a) + abs(t.b) + abs(t.c) + abs(t.d);
    };
    mpz_class best_w = weight(best.P);
    detail::RewriteState back = st;
    for (std::size_t r = 0; r < 2 * st.beta(); ++r) {
        if (!at_least_from(back.layers.back().a, 1, 0)) break;
        back.rotate_back();
        if (mpz_class w = weight(back.P); w < best_w) {
            best_w = w;
            best = back;
        }
    }
    detail::RewriteState fwd = st;
    for (std::size_t r = 1; r < st.beta(); ++r) {
        fwd.rotate(1);
        if (mpz_class w = weight(fwd.P); w < best_w) {
            best_w = w;
            best = fwd;
        }
    }
    best.trace = st.trace;
    st = best;
    finish(SimplifyStatus::simple);
    // Leading constant layers move into the head so the period opens with a varying sub-sequence.
    std::size_t lead = 0;
    while (lead < st.beta() && st.layers[lead].a.is_constant()) ++lead;
    if (lead > 0 && lead < st.beta()) {
        InterlacedClosedForm g;
        g.head.emplace_back(0, 0);
        for (std::size_t i = 0; i < lead; ++i) g.head.emplace_back(st.layers[i].a(1L), st.layers[i].b(1L));
        for (std::size_t i = lead; i < st.beta(); ++i) {
            g.A.push_back(st.layers[i].a);
            g.B.push_back(st.layers[i].b);
        }
        for (std::size_t i = 0; i < lead; ++i) {
            g.A.push_back(st.layers[i].a.shifted(1));
            g.B.push_back(st.layers[i].b.shifted(1));
        }
        res.form = g;
    }
    return res;
}

inline Convergence classify_convergence(const InterlacedClosedForm& form) {
    form.validate();
    const bool has_zero = std::any_of(form.A.begin(), form.A.end(), [](const Poly& a) { return a.is_zero(); });
    if (has_zero && form.beta() == 1) return Convergence::divergent;
    if (collapse(form).e.is_zero()) return Convergence::divergent;
    const bool positive = std::all_of(form.A.begin(), form.A.end(), [](const Poly& a) {
        return !a.is_zero() && a.lead() > 0 && first_index_at_least(a, 1, 1).has_value();
    });
    if (form.simple_numerators() && positive) {
        const bool varying = std::any_of(form.A.begin(), form.A.end(), [](const Poly& a) { return !a.is_constant(); });
        return varying ? Convergence::super_exponential : Convergence::exponential;
    }
    if (form.signed_constant_numerators()) {
        SimplifyResult s = sicf_to_simple(form, 64);
        if (s.status == SimplifyStatus::divergent) return Convergence::divergent;
        if (s.status == SimplifyStatus::simple && s.form.simple_numerators()) return classify_convergence(s.form);
    }
    return Convergence::unknown;
}

}  // namespace esma
