#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cf.hpp"
#include "constants.hpp"
#include "extraction.hpp"
#include "rational_function.hpp"
#include "sicf.hpp"

namespace esma {

/// Reference formula with its published convergence rate (digits per term over terms 0..100).
/// Rows without a closed form use the simple CF of the target.
struct RateFixture {
    std::string label;
    std::string constant;
    std::string rational_function;
    std::optional<std::string> closed_form;  // canonical closed-form JSON
    double reference_rate = 0;

    RationalInterval target(unsigned long digits) const {
        return RationalFunction::parse(rational_function)(enclose_constant(parse_constant(constant), digits));
    }

    GeneralizedCF cf(const RationalInterval& t, std::size_t terms) const {
        if (closed_form) return to_general_cf(InterlacedClosedForm::from_json(json::parse(*closed_form)));
        return extract_signed_cf(t, SignPattern(), terms).to_cf();
    }

    double measured_rate(unsigned long digits = 1500) const {
        const RationalInterval t = target(digits);
        return digits_per_term(cf(t, 200), ErrorTarget{t.mid(), log10_abs(t.width())}, 0, 100);
    }

    json to_json() const {
        json j{{"label", label}, {"constant", constant}, {"rational_function", rational_function},
               {"reference_rate", reference_rate}};
        j["closed_form"] = closed_form ? json::parse(*closed_form) : json(nullptr);
        return j;
    }
};

inline const std::vector<RateFixture>& rate_fixtures() {
    static const std::vector<RateFixture> rows = {
        {"-1+e", "e", "x-1", R"({"head":[[1,0]],"A":[[1],[0,2],[1]]})", 1.2868},
        {"(1+e)/(-1+e)", "e", "(x+1)/(x-1)", R"({"head":[[2,0]],"A":[[2,4]]})", 4.8512},
        {"(2+2e)/(-1+3e)", "e", "(2x+2)/(3x-1)",
         R"({"head":[[2,0]],"A":[[-3,4],[-40,64],[-1,4],[2],[-3,16],[2]],"B":[[-1],[1],[1],[-1],[1],[1]]})", 3.4269},
        {"-1/2+e^2/2", "e^2", "(x-1)/2", R"({"head":[[3,0]],"A":[[3,2]]})", 4.2727},
        {"2/tanh(1/4)", "tanh(1/4)", "2/x", R"({"head":[[8,0]],"A":[[-2,8],[8,32]]})", 4.9003},
        {"tan(1)", "tan(1)", "x", R"({"head":[[1,0]],"A":[[-1,2],[1]]})", 1.8441},
        {"J0(1)/J1(1)", "J0(1)/J1(1)", "x", R"({"head":[[2,0]],"A":[[2,2]],"B":[[-1]]})", 4.2669},
        {"J1(1)/J2(1)", "J1(1)/J2(1)", "x", R"({"head":[[4,0]],"A":[[4,2]],"B":[[-1]]})", 4.2784},
        {"J1(1)/J3(1)", "J1(1)/J3(1)", "x", R"({"head":[[23,0]],"A":[[0,1],[1],[23,16]],"B":[[-1],[1],[1]]})", 2.6693},
        {"J1(1)/J3(1) simple", "J1(1)/J3(1)", "x", std::nullopt, 1.8643},
        {"2/(J5(1)/J3(1)+1)", "J5(1)/J3(1)", "2/(x+1)", R"({"head":[[2,0]],"A":[[24,16],[2,1]],"B":[[-1],[-1]]})", 4.3008},
        {"J5(1)/J3(1) simple", "J5(1)/J3(1)", "x", std::nullopt, 1.9046},
        {"phi", "phi", "x", R"({"head":[[1,0]],"A":[[1]]})", 0.4096},
        {"(1+2phi)/(-3+2phi)", "phi", "(1+2x)/(-3+2x)", R"({"head":[[18,0]],"A":[[18]],"B":[[-1]]})", 2.4576},
    };
    return rows;
}

inline const RateFixture& rate_fixture(const std::string& label) {
    for (const auto& r : rate_fixtures())
        if (r.label == label) return r;
    throw std::invalid_argument("unknown fixture: " + label);
}

/// (faster, slower) pairs that must hold strictly.
inline std::vector<std::pair<std::string, std::string>> rate_orderings() {
    return {{"(1+2phi)/(-3+2phi)", "phi"},
            {"J1(1)/J3(1)", "J1(1)/J3(1) simple"},
            {"2/(J5(1)/J3(1)+1)", "J5(1)/J3(1) simple"}};
}

}  // namespace esma
