#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "esma/cf.hpp"
#include "esma/constants.hpp"
#include "esma/fixtures.hpp"
#include "esma/sicf.hpp"

using namespace esma;

namespace {

// Backward (tail-first) evaluation, independent of the forward recursion.
mpq_class backward_value(const mpz_class& a0, const std::vector<Term>& t) {
    mpq_class v = 0;
    for (std::size_t k = t.size(); k-- > 0;) {
        mpq_class den = mpq_class(t[k].a) + v;
        v = mpq_class(t[k].b) / den;
    }
    return mpq_class(a0) + v;
}

double log10_mpf(const mpf_class& x) {
    long e;
    double m = mpf_get_d_2exp(&e, x.get_mpf_t());
    return std::log10(std::fabs(m)) + static_cast<double>(e) * std::log10(2.0);
}

std::vector<Term> phi_terms(std::size_t n) { return std::vector<Term>(n, Term{1, 1}); }

}  // namespace

TEST(Convergents, HandIteratedExample) {
    auto cf = GeneralizedCF::from_lists(2, {6, 10, 14}, {1, 1, 1});
    auto cs = convergents(cf, 3);
    ASSERT_EQ(cs.size(), 4u);
    const char* want[] = {"2", "13/6", "132/61", "1861/860"};
    for (int i = 0; i < 4; ++i) EXPECT_EQ(cs[i].value().get_str(), want[i]);
    std::vector<Term> t{{6, 1}, {10, 1}, {14, 1}};
    EXPECT_EQ(cs[3].value(), backward_value(2, t));
}

TEST(Convergents, SingleLayerAndGoldenRatio) {
    auto one = GeneralizedCF::from_lists(0, {7}, {1});
    EXPECT_EQ(cf_value(one, 1), mpq_class(1, 7));
    auto phi = GeneralizedCF::from_terms(1, phi_terms(5));
    EXPECT_EQ(cf_value(phi, 5), mpq_class(13, 8));
    auto k = GeneralizedCF::from_terms(5, {});
    EXPECT_EQ(convergent_at(k, 0).value(), mpq_class(5));
}

TEST(Convergents, PoleIsReported) {
    auto cf = GeneralizedCF::from_lists(0, {0, 1}, {1, 1});
    auto cs = convergents(cf, 2);
    ASSERT_TRUE(first_pole(cs).has_value());
    EXPECT_EQ(*first_pole(cs), 1u);
    EXPECT_THROW(cf_value(cf, 1), PoleError);
}

TEST(Evaluate, EMinusTwo) {
    InterlacedClosedForm f;
    f.A = {Poly{1}, Poly{0, 2}, Poly{1}};
    f.B = {Poly{1}, Poly{1}, Poly{1}};
    EXPECT_EQ(evaluate_cf(to_general_cf(f), 30, 15).to_string(), "0.718281828459045");
}

TEST(Evaluate, EighteenPeriodicForGoldenRatio) {
    auto cf = GeneralizedCF();
    cf.a0 = 18;
    cf.generator = [](std::size_t) { return Term{18, -1}; };
    auto v = evaluate_cf(cf, 40, 20);
    auto phi = enclose_constant(parse_constant("phi"), 60);
    mpq_class target = (1 + 2 * phi.mid()) / (-3 + 2 * phi.mid());
    EXPECT_EQ(v.to_string(), truncated_decimal(target, 20));
}

TEST(Mobius, Basics) {
    mpq_class x(3, 7);
    EXPECT_EQ(MobiusMap::identity().apply(x), x);
    MobiusMap lay = MobiusMap::layer(5, 1);
    EXPECT_EQ(lay.apply(mpq_class(0)), mpq_class(1, 5));
    auto inf = lay.at_infinity();
    EXPECT_EQ(inf.value(), mpq_class(0));
}

TEST(Mobius, GoldenRatioChain) {
    // (0 -1; 1 1) applied to phi - 1 gives -1/phi.
    auto phi = enclose_constant(parse_constant("phi"), 80);
    MobiusMap m{0, -1, 1, 1};
    auto img = m.apply(phi - RationalInterval(mpq_class(1)));
    auto want = RationalInterval(mpq_class(-1)) / phi;
    EXPECT_LT(log10_abs(img.mid() - want.mid()), -75);
    // Composing with the phi - 1 layer on 0 equals the composite applied to 0.
    MobiusMap l{0, 1, 1, 1};
    EXPECT_EQ((m * l).apply(mpq_class(0)), m.apply(l.apply(mpq_class(0))));
}

TEST(Mobius, CompositionProperty) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> d(-9, 9);
    for (int trial = 0; trial < 300; ++trial) {
        MobiusMap a{d(rng), d(rng), d(rng), d(rng)}, b{d(rng), d(rng), d(rng), d(rng)};
        mpq_class x(d(rng), 1 + (trial % 5));
        try {
            mpq_class lhs = a.apply(b.apply(x));
            EXPECT_EQ((a * b).apply(x), lhs);
        } catch (const PoleError&) {
        }
    }
}

TEST(Equivalence, IdentityAndRandomSequences) {
    InterlacedClosedForm f;
    f.head = {{2, 0}};
    f.A = {Poly{1}, Poly{0, 2}, Poly{1}};
    f.B = {Poly{1}, Poly{-1}, Poly{1}};
    auto cf = to_general_cf(f);
    auto same = equivalence_transform(cf, [](std::size_t) { return mpz_class(1); });
    std::mt19937 rng(11);
    std::vector<long> g(41);
    for (auto& v : g) {
        do v = static_cast<long>(rng() % 13) - 6;
        while (v == 0);
    }
    auto scaled = equivalence_transform(cf, [g](std::size_t j) { return mpz_class(g[j]); });
    for (std::size_t j = 1; j <= 40; ++j) {
        EXPECT_EQ(cf_value(same, j), cf_value(cf, j));
        auto a = convergent_at(cf, j), b = convergent_at(scaled, j);
        if (!a.pole()) EXPECT_EQ(b.value(), a.value()) << j;
    }
    EXPECT_THROW(convergent_at(equivalence_transform(cf, [](std::size_t j) { return mpz_class(j == 3 ? 0 : 1); }), 4),
                 std::domain_error);
}

TEST(Equivalence, SignFlip) {
    auto cf = GeneralizedCF::from_lists(1, {3, 4, 5, 6}, {1, 1, 1, 1});
    auto flipped = equivalence_transform(cf, [](std::size_t j) { return mpz_class(j == 2 ? -1 : 1); });
    EXPECT_EQ(flipped.term(2).a, -4);
    EXPECT_EQ(flipped.term(2).b, -1);
    EXPECT_EQ(flipped.term(3).b, -1);
    EXPECT_EQ(cf_value(flipped, 4), cf_value(cf, 4));
}

TEST(Invariants, DeterminantIdentity) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<mpz_class> a, b;
        for (int j = 0; j < 30; ++j) {
            a.push_back(1 + rng() % 20);
            b.push_back(rng() % 2 ? 1 : -1);
        }
        auto cf = GeneralizedCF::from_lists(rng() % 5, a, b);
        auto cs = convergents(cf, 30);
        mpz_class prod = 1;
        for (std::size_t j = 1; j < cs.size(); ++j) {
            prod *= b[j - 1];
            mpz_class lhs = cs[j - 1].p * cs[j].q - cs[j].p * cs[j - 1].q;
            mpz_class rhs = (j % 2 ? -1 : 1) * prod;
            EXPECT_EQ(lhs, rhs);
        }
    }
}

TEST(Invariants, MatrixEvaluation) {
    auto cf = GeneralizedCF::from_lists(2, {1, 2, 1, 1, 4, 1, 1, 6}, {1, -1, 1, 1, -1, 1, 1, 1});
    for (std::size_t n = 1; n <= 8; ++n) {
        MobiusMap m = layer_product(cf, n);
        auto cn = convergent_at(cf, n), cp = convergent_at(cf, n - 1);
        if (!cn.pole()) EXPECT_EQ(m.apply(mpq_class(0)), cn.value());
        auto at_inf = m.at_infinity();
        if (!cp.pole() && !at_inf.infinite()) EXPECT_EQ(at_inf.value(), cp.value());
    }
}

TEST(Rate, GoldenRatioAgainstOracle) {
    auto cf = GeneralizedCF::from_terms(1, phi_terms(120));
    auto phi = evaluate_constant(parse_constant("phi"), 300);
    double rate = digits_per_term(cf, phi, 0, 100);
    // Oracle: error of F_{n+2}/F_{n+1} in mpf.
    mpf_class root(5, 2048);
    root = sqrt(root);
    mpf_class target = (1 + root) / 2;
    auto err = [&](std::size_t n) {
        mpz_class p = 1, q = 1, pp = 1, qp = 0;
        for (std::size_t j = 0; j < n; ++j) {
            mpz_class np = p + pp, nq = q + qp;
            pp = p;
            qp = q;
            p = np;
            q = nq;
        }
        mpf_class v(p, 2048);
        v /= mpf_class(q, 2048);
        return log10_mpf(v - target);
    };
    double oracle = (err(0) - err(100)) / 100.0;
    EXPECT_NEAR(rate, oracle, 1e-9);
    EXPECT_NEAR(rate, 0.41657, 1e-4);
}

TEST(Rate, ExponentialVsSuperExponential) {
    InterlacedClosedForm f;
    f.head = {{3, 0}};
    f.A = {Poly{3, 2}};
    f.B = {Poly{1}};
    auto e2 = enclose_constant(parse_constant("e^2"), 1000);
    RationalInterval t = (e2 - RationalInterval(mpq_class(1))) * RationalInterval(mpq_class(1, 2));
    double fast = digits_per_term(to_general_cf(f), ErrorTarget{t.mid(), log10_abs(t.width())}, 0, 100);
    EXPECT_GT(fast, 3.5);
    auto rows = convergence_profile(GeneralizedCF::from_terms(1, phi_terms(100)),
                                    ErrorTarget::from(evaluate_constant(parse_constant("phi"), 200)), 100);
    ASSERT_EQ(rows.size(), 100u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].second, rows[i - 1].second);
}

TEST(Rate, ExactMatchAndBadWindow) {
    auto cf = GeneralizedCF::from_lists(1, {2, 3}, {1, 1});
    ErrorTarget t = ErrorTarget::exact(cf_value(cf, 2));
    EXPECT_THROW(digits_per_term(cf, t, 0, 5), std::domain_error);
    EXPECT_THROW(digits_per_term(cf, t, 3, 1), std::invalid_argument);
    auto longcf = GeneralizedCF::from_terms(1, phi_terms(200));
    EXPECT_THROW(digits_per_term(longcf, evaluate_constant(parse_constant("phi"), 20), 0, 150), PrecisionError);
}

TEST(RateFixtures, FormulasMatchTheirTargets) {
    for (const auto& row : rate_fixtures()) {
        auto t = row.target(400);
        auto cf = row.cf(t, 400);
        mpq_class v = cf_value(cf, 300);
        EXPECT_LT(log10_abs(v - t.mid()), -50) << row.label;
        EXPECT_EQ(RateFixture{row}.to_json()["label"], row.label);
    }
    EXPECT_THROW(rate_fixture("nope"), std::invalid_argument);
}

TEST(RateFixtures, FasterFormulasAreFaster) {
    for (const auto& [fast, slow] : rate_orderings())
        EXPECT_GT(rate_fixture(fast).measured_rate(), rate_fixture(slow).measured_rate()) << fast << " vs " << slow;
}
