#include <gtest/gtest.h>

#include <algorithm>
#include <array>

#include "esma/search.hpp"

using namespace esma;

namespace {

const char* kStamp = "2000-01-01T00:00:00Z";

Conjecture candidate(const char* constant, const char* rf, const char* pattern, unsigned long digits) {
    auto spec = parse_constant(constant);
    SearchSpace space;
    space.verify_digits = digits;
    auto c = evaluate_constant(spec, digits + 100).interval();
    std::string note;
    int outcome = -1;
    auto r = search_candidate(spec, c, RationalFunction::parse(rf), SignPattern::parse(pattern), space, note, outcome);
    if (!r) throw std::runtime_error(std::string("no conjecture for ") + rf + ": " + note);
    return *r;
}

// Brute-force count of distinct non-constant f/g with deg <= 1, coefficients in [-1, 1], using
// cross-multiplication as the equality test.
std::size_t degree_one_oracle_count() {
    std::vector<std::array<long, 4>> reps;
    for (long f0 = -1; f0 <= 1; ++f0)
        for (long f1 = -1; f1 <= 1; ++f1)
            for (long g0 = -1; g0 <= 1; ++g0)
                for (long g1 = -1; g1 <= 1; ++g1) {
                    if (g0 == 0 && g1 == 0) continue;
                    if (f0 * g1 - f1 * g0 == 0) continue;
                    bool dup = std::any_of(reps.begin(), reps.end(), [&](const std::array<long, 4>& r) {
                        // f g' == f' g as polynomials in x
                        return f0 * r[2] == r[0] * g0 && f0 * r[3] + f1 * r[2] == r[0] * g1 + r[1] * g0 &&
                               f1 * r[3] == r[1] * g1;
                    });
                    if (!dup) reps.push_back({f0, f1, g0, g1});
                }
    return reps.size();
}

}  // namespace

TEST(Enumeration, RationalFunctions) {
    EXPECT_TRUE(enumerate_rational_functions(0, 1).empty());
    auto rfs = enumerate_rational_functions(1, 3);
    auto want = RationalFunction::parse("(2x+2)/(3x-1)").canonical();
    EXPECT_NE(std::find(rfs.begin(), rfs.end(), want), rfs.end());
    EXPECT_TRUE(std::is_sorted(rfs.begin(), rfs.end()));
    for (const auto& r : rfs) EXPECT_FALSE(r.constant_valued());

    auto small = enumerate_rational_functions(1, 1);
    EXPECT_EQ(small.size(), degree_one_oracle_count());
    EXPECT_EQ(small.size(), 24u);
    EXPECT_THROW(enumerate_rational_functions(1, 0), std::invalid_argument);
}

TEST(Enumeration, LargerBoundIsSuperset) {
    auto a = enumerate_rational_functions(1, 2), b = enumerate_rational_functions(1, 3);
    for (const auto& r : a) EXPECT_TRUE(std::binary_search(b.begin(), b.end(), r)) << r.to_string();
}

TEST(Enumeration, SignPatterns) {
    auto one = enumerate_sign_patterns(1);
    ASSERT_EQ(one.size(), 2u);
    EXPECT_EQ(one[0], SignPattern::parse("+1"));
    EXPECT_EQ(one[1], SignPattern::parse("-1"));
    auto two = enumerate_sign_patterns(2);
    ASSERT_EQ(two.size(), 4u);
    EXPECT_EQ(two[2], SignPattern::parse("+1,-1"));
    EXPECT_EQ(two[3], SignPattern::parse("-1,+1"));
    EXPECT_EQ(enumerate_sign_patterns(5, true).size(), 62u);
    EXPECT_EQ(enumerate_sign_patterns(5).size(), 2u + 2u + 6u + 12u + 30u);
}

TEST(SearchSpace, ComplexityAndJson) {
    SearchSpace s;
    s.m = 1;
    s.L = 3;
    s.beta_b = 3;
    EXPECT_EQ(s.complexity_estimate(), mpz_class(2401 * 8 * 2500));
    EXPECT_EQ(SearchSpace::from_json(s.to_json()).to_json(), s.to_json());
    s.N = 1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Verify, SignedRecordOnE) {
    auto c = candidate("e", "(2x+2)/(3x-1)", "-1,1,1,-1,1,1", 1000);
    EXPECT_EQ(c.recurrence.L, 12u);
    auto v = verify_conjecture(c, 1000);
    EXPECT_TRUE(v.verified) << v.message;
    EXPECT_GE(v.achieved_digits, 1000u);

    Conjecture bad = c;
    bad.recurrence.initial[3] += 1;
    auto w = verify_conjecture(bad, 1000);
    EXPECT_FALSE(w.verified);
    ASSERT_TRUE(w.mismatch_digit.has_value());
    EXPECT_LT(*w.mismatch_digit, 20u);
}

TEST(Verify, BesselRatioRecord) {
    auto c = candidate("J1(1)/J3(1)", "x", "-1,1,1", 200);
    EXPECT_EQ(c.recurrence.to_string(), "a_j - 2a_{j-3} + a_{j-6} = 0");
    EXPECT_EQ(c.recurrence.initial, (std::vector<mpz_class>{23, 1, 1, 39, 2, 1}));
    EXPECT_TRUE(verify_conjecture(c, 200).verified);
    ASSERT_TRUE(c.closed_form.has_value());
    EXPECT_EQ(c.closed_form->a0(), 23);
}

TEST(Verify, RecordRoundTripsThroughJson) {
    auto c = candidate("e", "x-1", "+1", 300);
    c.created_at = kStamp;
    auto back = Conjecture::from_json(json::parse(c.to_json().dump()));
    EXPECT_EQ(back.to_json(), c.to_json());
    EXPECT_TRUE(verify_conjecture(back, 300).verified);
}

TEST(Search, TanOneSmallSpace) {
    SearchSpace s;
    s.m = 1;
    s.L = 2;
    s.beta_b = 2;
    s.verify_digits = 200;
    RunOptions o;
    o.created_at = kStamp;
    SearchStats stats;
    auto cs = run_search(parse_constant("tan(1)"), s, o, &stats);
    EXPECT_EQ(stats.candidates, enumerate_rational_functions(1, 2).size() * 4);
    EXPECT_EQ(stats.emitted, cs.size());
    auto it = std::find_if(cs.begin(), cs.end(), [](const Conjecture& c) {
        return c.rational_function == RationalFunction::parse("x") && c.sign_pattern == SignPattern::parse("+1");
    });
    ASSERT_NE(it, cs.end());
    EXPECT_EQ(it->terms(8), (std::vector<mpz_class>{1, 1, 1, 3, 1, 5, 1, 7}));
    for (const auto& c : cs) {
        EXPECT_TRUE(is_significant(c.recurrence.L, s.N + 1));
        EXPECT_EQ(c.created_at, kStamp);
    }
    EXPECT_TRUE(std::is_sorted(cs.begin(), cs.end(), conjecture_order));
}

TEST(Search, DeterministicAcrossJobCounts) {
    SearchSpace s;
    s.m = 1;
    s.L = 1;
    s.beta_b = 2;
    s.verify_digits = 150;
    RunOptions one, four;
    one.created_at = four.created_at = kStamp;
    four.jobs = 4;
    auto a = conjectures_to_json(run_search(parse_constant("e"), s, one)).dump();
    auto b = conjectures_to_json(run_search(parse_constant("e"), s, four)).dump();
    EXPECT_EQ(a, b);
    EXPECT_EQ(conjectures_to_json(conjectures_from_json(json::parse(a))).dump(), a);
}

TEST(Search, WiderSpaceKeepsTails) {
    SearchSpace s;
    s.m = 1;
    s.L = 1;
    s.beta_b = 2;
    s.verify_digits = 150;
    RunOptions o;
    o.created_at = kStamp;
    o.dedupe = false;
    auto small = run_search(parse_constant("tan(1)"), s, o);
    s.L = 2;
    auto big = run_search(parse_constant("tan(1)"), s, o);
    for (const auto& c : small) {
        bool kept = std::any_of(big.begin(), big.end(), [&](const Conjecture& d) {
            return d.rational_function == c.rational_function && d.sign_pattern == c.sign_pattern;
        });
        EXPECT_TRUE(kept) << c.rational_function.to_string() << " " << c.sign_pattern.to_string();
    }
}

TEST(Search, NoPatternForPi) {
    SearchSpace s;
    s.m = 1;
    s.L = 1;
    s.beta_b = 2;
    s.verify_digits = 150;
    RunOptions o;
    o.created_at = kStamp;
    EXPECT_TRUE(run_search(parse_constant("pi"), s, o).empty());
}
