#include <gtest/gtest.h>

#include <algorithm>

#include "esma/constants.hpp"

using namespace esma;

namespace {

// Truncated decimal of an mpf value, computed independently of the interval code.
std::string mpf_truncated(const mpf_class& x, unsigned long digits) {
    mpf_class s = x * mpf_class(pow10(digits), 4096);
    mpz_class n(s);
    std::string t = n.get_str();
    if (t.size() <= digits) t.insert(0, digits + 1 - t.size(), '0');
    return t.substr(0, t.size() - digits) + "." + t.substr(t.size() - digits);
}

mpf_class mpf_e() {
    mpf_class sum(0, 4096), term(1, 4096);
    for (unsigned k = 1; k < 700; ++k) {
        sum += term;
        term /= k;
    }
    return sum;
}

mpf_class mpf_bessel(unsigned order, unsigned terms = 200) {
    // J_v(1) = sum (-1)^k / (k! (k+v)! 4^k 2^v)
    mpf_class sum(0, 4096);
    mpz_class kf = 1;
    for (unsigned k = 0; k < terms; ++k) {
        if (k) kf *= k;
        mpz_class kvf = 1;
        for (unsigned i = 2; i <= k + order; ++i) kvf *= i;
        mpz_class den = kf * kvf;
        den <<= 2 * k + order;
        mpf_class t(1, 4096);
        t /= mpf_class(den, 4096);
        if (k % 2) sum -= t;
        else sum += t;
    }
    return sum;
}

}  // namespace

TEST(Constants, EFifteenDigits) {
    auto c = evaluate_constant(parse_constant("e"), 15);
    EXPECT_EQ(c.to_string(), "2.718281828459045");
    EXPECT_EQ(c.to_string(), mpf_truncated(mpf_e(), 15));
}

TEST(Constants, GoldenRatioFifteenDigits) {
    auto c = evaluate_constant(parse_constant("phi"), 15);
    EXPECT_EQ(c.to_string(), "1.618033988749894");
    mpz_class r;
    mpz_class five = 5 * pow10(30);
    mpz_sqrt(r.get_mpz_t(), five.get_mpz_t());
    mpz_class phi = (pow10(15) + r) / 2;
    EXPECT_EQ(phi.get_str(), "1618033988749894");
}

TEST(Constants, TanOneFifteenDigits) {
    EXPECT_EQ(evaluate_constant(parse_constant("tan(1)"), 15).to_string(), "1.557407724654902");
    EXPECT_EQ(evaluate_constant(parse_constant("tan1"), 15).to_string(), "1.557407724654902");
}

TEST(Constants, LongExpansionsMatchMpfOracle) {
    EXPECT_EQ(evaluate_constant(parse_constant("e"), 1000).to_string(), mpf_truncated(mpf_e(), 1000));
    auto ratio = mpf_bessel(5) / mpf_bessel(3);
    EXPECT_EQ(evaluate_constant(parse_constant("J5(1)/J3(1)"), 300).to_string(), mpf_truncated(ratio, 300));
}

TEST(Constants, BesselFirstKind) {
    EXPECT_EQ(eval_bessel_first_kind(0, 1, 10).to_string(), "0.7651976865");
    EXPECT_EQ(eval_bessel_first_kind(1, 1, 10).to_string(), "0.4400505857");
    EXPECT_EQ(eval_bessel_first_kind(0, 0, 10).to_string(), "1.0000000000");
    EXPECT_EQ(eval_bessel_first_kind(3, 0, 10).to_string(), "0.0000000000");
    EXPECT_EQ(eval_bessel_first_kind(2, 1, 40).to_string(), mpf_truncated(mpf_bessel(2), 40));
}

TEST(Constants, CatalogIsStable) {
    auto a = list_catalog(), b = list_catalog();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].label, b[i].label);
    auto has = [&](const std::string& l) {
        return std::any_of(a.begin(), a.end(), [&](const ConstantSpec& s) { return s.label == l; });
    };
    EXPECT_TRUE(has("e"));
    EXPECT_TRUE(has("pi"));
    EXPECT_TRUE(has("zeta(3)"));
}

TEST(Constants, EnclosureContainsTruncation) {
    for (const auto& spec : list_catalog()) {
        auto lo = evaluate_constant(spec, 120);
        auto hi = evaluate_constant(spec, 150);
        // The longer truncation must lie inside the shorter one's interval.
        EXPECT_TRUE(lo.interval().contains(hi.value())) << spec.label;
        EXPECT_EQ(hi.to_string().substr(0, lo.to_string().size()), lo.to_string()) << spec.label;
    }
}

TEST(Constants, UserDecimal) {
    auto spec = parse_constant("decimal:3.14159");
    EXPECT_EQ(spec.kind, ConstantSpec::Kind::user_decimal);
    EXPECT_EQ(evaluate_constant(spec, 3).to_string(), "3.141");
    EXPECT_THROW(evaluate_constant(spec, 10), PrecisionError);
    try {
        evaluate_constant(spec, 10);
    } catch (const PrecisionError& e) {
        EXPECT_EQ(e.achieved(), 5);
    }
    EXPECT_EQ(evaluate_constant(parse_constant("-0.25"), 2).to_string(), "-0.25");
}

TEST(Constants, JsonRoundTrip) {
    for (const char* s : {"e", "J1(1)/J3(1)", "decimal:1.25", "zeta3"}) {
        auto spec = parse_constant(s);
        auto back = ConstantSpec::from_json(spec.to_json());
        EXPECT_EQ(back, spec) << s;
    }
}

TEST(Constants, Errors) {
    EXPECT_THROW(parse_constant("not-a-constant"), ParseError);
    EXPECT_THROW(evaluate_constant(parse_constant("e"), 0), std::invalid_argument);
    EXPECT_THROW(evaluate_constant(parse_constant("e"), 20000), PrecisionError);
}
