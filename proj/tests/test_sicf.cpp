#include <gtest/gtest.h>

#include "esma/constants.hpp"
#include "esma/rational_function.hpp"
#include "esma/sicf.hpp"

using namespace esma;

namespace {

const Poly n_ = Poly::var();

InterlacedClosedForm make(long a0, std::vector<Poly> A, std::vector<Poly> B) {
    InterlacedClosedForm f;
    if (a0 != 0) f.head = {{a0, 0}};
    f.A = std::move(A);
    f.B = std::move(B);
    return f;
}

InterlacedClosedForm eq4_form() {
    return make(2, {4 * n_ - 3, 64 * n_ - 40, 4 * n_ - 1, Poly(2), 16 * n_ - 3, Poly(2)},
                {Poly(-1), Poly(1), Poly(1), Poly(-1), Poly(1), Poly(1)});
}

InterlacedClosedForm eq16_form() {
    return make(0, {3 * n_ - 1, Poly(2), 3 * n_, 12 * n_ + 2}, {Poly(-1), Poly(-1), Poly(-1), Poly(-1)});
}

RationalInterval target(const char* constant, const char* rf, unsigned long digits) {
    return RationalFunction::parse(rf)(enclose_constant(parse_constant(constant), digits));
}

// Digits of agreement between a rational and the midpoint of an enclosure.
double agreement(const mpq_class& v, const RationalInterval& t) {
    mpq_class d = v - t.mid();
    if (d == 0) return 1e9;
    return -log10_abs(d);
}

}  // namespace

TEST(SignPattern, ParseAndPrimitive) {
    EXPECT_EQ(SignPattern::parse("+-").signs, (std::vector<int>{1, -1}));
    EXPECT_EQ(SignPattern::parse("[+1,-1,1]").signs, (std::vector<int>{1, -1, 1}));
    EXPECT_TRUE(SignPattern::parse("-1,1").primitive());
    EXPECT_FALSE(SignPattern::parse("+,+").primitive());
    EXPECT_FALSE(SignPattern::parse("+-+-").primitive());
    EXPECT_EQ(SignPattern::parse("+--").at(4), 1);
    EXPECT_EQ(SignPattern::parse("+--").at(6), -1);
    EXPECT_THROW(SignPattern::parse("+x"), ParseError);
    EXPECT_THROW(SignPattern(std::vector<int>{}), std::invalid_argument);
}

TEST(ClosedForm, TermIndexing) {
    // Period-2 form with index k = n - 1 in the sub-sequences 2+k and 40+16k.
    auto f = make(0, {n_ + 1, 16 * n_ + 24}, {Poly(-1), Poly(-1)});
    EXPECT_EQ(f.term_at(3).a, 3);
    EXPECT_EQ(f.term_at(3).b, -1);
    auto g = make(0, {Poly(7)}, {Poly(-1)});
    EXPECT_EQ(g.term_at(17).a, 7);
    EXPECT_EQ(g.term_at(17).b, -1);
    auto e4 = eq4_form();
    EXPECT_EQ(e4.term_at(1).a, 1);
    EXPECT_EQ(e4.term_at(1).b, -1);
    EXPECT_EQ(e4.term_at(2).a, 24);
    EXPECT_EQ(e4.term_at(2).b, 1);
    EXPECT_EQ(e4.term_at(7).a, 5);  // 1 + 4k at k = 1
    EXPECT_THROW(e4.term_at(0), std::out_of_range);
}

TEST(ClosedForm, HeadTerms) {
    InterlacedClosedForm f = make(1, {2 * n_ + 1}, {Poly(1)});
    f.head.push_back({5, -1});
    EXPECT_EQ(f.head_terms(), 1u);
    EXPECT_EQ(f.term_at(1).a, 5);
    EXPECT_EQ(f.term_at(1).b, -1);
    EXPECT_EQ(f.term_at(2).a, 3);
}

TEST(Collapse, ExamplesAndDeterminant) {
    auto e = make(2, {Poly(1), 2 * n_, Poly(1)}, {Poly(1), Poly(1), Poly(1)});
    PolyMatrix m = collapse(e);
    EXPECT_EQ(m.c, 2 * n_);
    EXPECT_EQ(m.d, 2 * n_ + 1);
    EXPECT_EQ(m.e, 2 * n_ + 1);
    EXPECT_EQ(m.f, 2 * n_ + 2);

    Poly a = n_ * n_ + 3, b = 2 * n_ - 5;
    PolyMatrix one = collapse(make(0, {a}, {b}));
    EXPECT_EQ(one.c, Poly());
    EXPECT_EQ(one.d, b);
    EXPECT_EQ(one.e, Poly(1));
    EXPECT_EQ(one.f, a);

    Poly a1 = 3 * n_ + 1, a2 = n_ + 4;
    PolyMatrix two = collapse(make(0, {a1, a2}, {Poly(1), Poly(1)}));
    EXPECT_EQ(two.c, Poly(1));
    EXPECT_EQ(two.d, a2);
    EXPECT_EQ(two.e, a1);
    EXPECT_EQ(two.f, a1 * a2 + 1);

    struct Case {
        std::vector<int> signs;
        long det;
    } cases[] = {{{-1, 1, 1}, 1}, {{1, 1}, 1}, {{-1}, 1}, {{1}, -1}, {{-1, -1, 1, 1}, 1}};
    for (const auto& c : cases) {
        std::vector<Poly> A(c.signs.size(), n_ + 2), B;
        for (int s : c.signs) B.emplace_back(s);
        auto f = make(0, A, B);
        EXPECT_EQ(collapsed_determinant(f), Poly(c.det));
        PolyMatrix m = collapse(f);
        EXPECT_EQ(m.c * m.f - m.d * m.e, collapsed_determinant(f));
    }
}

TEST(ShiftPeriod, RotationOfTanForm) {
    auto f = eq16_form();
    auto [m0, same] = shift_period(f, 0);
    EXPECT_EQ(m0, MobiusMap::identity());
    EXPECT_EQ(same, f);

    auto [m, g] = shift_period(f, 1);
    EXPECT_EQ(m, (MobiusMap{0, -1, 1, 2}));
    EXPECT_EQ(g.A, (std::vector<Poly>{Poly(2), 3 * n_, 12 * n_ + 2, 3 * n_ + 2}));
    auto t = target("tan(1)", "(2-2x)/x", 120);
    mpq_class rotated = cf_value(to_general_cf(g), 200);
    EXPECT_GT(agreement(m.apply(rotated), t), 50);
    EXPECT_THROW(shift_period(f, 4), std::invalid_argument);
}

TEST(ShiftPeriod, FullRotationEqualsCollapse) {
    auto f = make(0, {n_ + 1, 2 * n_ + 3}, {Poly(1), Poly(-1)});
    auto [m1, g1] = shift_period(f, 1);
    auto [m2, g2] = shift_period(g1, 1);
    PolyMatrix c = collapse(f);
    MobiusMap at1{c.c(1L), c.d(1L), c.e(1L), c.f(1L)};
    EXPECT_EQ(m1 * m2, at1);
    // After a full rotation the pattern is the original one advanced by n -> n + 1.
    EXPECT_EQ(g2.A[0], f.A[0].shifted(1));
    EXPECT_EQ(g2.A[1], f.A[1].shifted(1));
}

TEST(ToGeneralCf, KnownValues) {
    auto tan = make(1, {2 * n_ - 1, Poly(1)}, {Poly(1), Poly(1)});
    EXPECT_GT(agreement(cf_value(to_general_cf(tan), 40), target("tan(1)", "x", 80)), 30);

    EXPECT_GT(agreement(cf_value(to_general_cf(eq4_form()), 300), target("e", "(2x+2)/(3x-1)", 200)), 100);

    auto ones = make(0, {Poly(1)}, {Poly(1)});
    auto phi = enclose_constant(parse_constant("phi"), 60);
    EXPECT_GT(agreement(cf_value(to_general_cf(ones), 150), RationalInterval(mpq_class(1)) / phi), 30);
}

TEST(Unroll, SameTermStream) {
    auto f = eq4_form();
    for (std::size_t m : {1u, 2u, 3u}) {
        auto g = unroll(f, m);
        EXPECT_EQ(g.beta(), f.beta() * m);
        for (std::size_t j = 1; j <= 60; ++j) {
            EXPECT_EQ(g.term_at(j).a, f.term_at(j).a);
            EXPECT_EQ(g.term_at(j).b, f.term_at(j).b);
        }
    }
    EXPECT_THROW(unroll(f, 0), std::invalid_argument);
}

TEST(ClosedForm, JsonRoundTripAndValidation) {
    auto f = eq4_form();
    auto back = InterlacedClosedForm::from_json(f.to_json());
    EXPECT_EQ(back, f);
    auto simple = InterlacedClosedForm::from_json(json::parse(R"({"A":[[1],[0,2],[1]],"head":[[2,0]]})"));
    EXPECT_TRUE(simple.is_simple());
    EXPECT_EQ(simple.a0(), 2);
    EXPECT_THROW(InterlacedClosedForm::from_json(json::parse(R"({"A":[[1]],"B":[[0]]})")), std::invalid_argument);
    EXPECT_THROW(InterlacedClosedForm::from_json(json::parse(R"({"A":[[1]],"beta":2})")), ParseError);
    EXPECT_FALSE(eq16_form().is_simple());
    EXPECT_TRUE(eq16_form().is_sicf());
}
