#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "esma/esma.hpp"

using namespace esma;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

unsigned long env_digits(const char* name, unsigned long fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    try {
        return std::stoul(v);
    } catch (const std::exception&) {
        throw UsageError(std::string(name) + " is not a digit count");
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Inline JSON, or @path to a JSON file.
json read_json(const std::string& arg) {
    const std::string text = !arg.empty() && arg[0] == '@' ? read_text(arg.substr(1)) : arg;
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

InterlacedClosedForm read_form(const std::string& arg) {
    json j = read_json(arg);
    if (j.contains("closed_form")) j = j.at("closed_form");
    return InterlacedClosedForm::from_json(j);
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text << "\n";
}

std::string bracket(const std::vector<mpz_class>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
    return s + "]";
}

std::vector<mpz_class> parse_sequence(const std::string& text) {
    std::vector<mpz_class> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty()) continue;
        mpz_class v;
        if (v.set_str(item, 10) != 0) throw ParseError("not an integer: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<SignPattern> parse_patterns(const std::string& text) {
    std::vector<SignPattern> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ';'))
        if (!item.empty()) out.push_back(SignPattern::parse(item));
    return out;
}

// --- subcommands -----------------------------------------------------------------------------

struct ConstantsOpts {
    std::string spec;
    unsigned long digits = 0;
};

int cmd_constants_list() {
    json a = json::array();
    for (const auto& c : list_catalog()) a.push_back(c.label);
    std::cout << a.dump(2) << "\n";
    return 0;
}

int cmd_constants_eval(const ConstantsOpts& o) {
    const unsigned long digits = o.digits ? o.digits : env_digits("ESMA_DIGITS", 50);
    std::cout << evaluate_constant(parse_constant(o.spec), digits).to_string() << "\n";
    return 0;
}

struct ExtractOpts {
    std::string constant, pattern = "1", out;
    std::size_t depth = 50;
    unsigned long digits = 0;
};

int cmd_extract(const ExtractOpts& o) {
    const SignPattern pat = SignPattern::parse(o.pattern);
    SequenceSample s;
    static const std::regex rational(R"(^[+-]?\d+/\d+$)");
    if (std::regex_match(o.constant, rational)) {
        s = extract_signed_cf(detail::parse_rational(o.constant), pat, o.depth);
    } else {
        const unsigned long digits = o.digits ? o.digits : env_digits("ESMA_DIGITS", 200);
        auto spec = parse_constant(o.constant);
        if (spec.kind == ConstantSpec::Kind::user_decimal) {
            try {
                s = extract_signed_cf(evaluate_constant(spec, digits), pat, o.depth);
            } catch (const PrecisionError& e) {
                s = extract_signed_cf(evaluate_constant(spec, static_cast<unsigned long>(e.achieved())), pat, o.depth);
            }
        } else {
            s = extract_signed_cf(enclose_constant(spec, digits), pat, o.depth);
        }
    }
    std::cerr << "terms: " << bracket(s.terms) << " pattern " << pat.to_string();
    if (s.terminated) std::cerr << " (terminated)";
    if (s.precision_exhausted_at) std::cerr << " (precision exhausted after " << *s.precision_exhausted_at << " terms)";
    std::cerr << "\n";
    std::ostringstream lines;
    for (std::size_t i = 0; i < s.terms.size(); ++i) lines << (i ? "\n" : "") << s.terms[i].get_str();
    write_output(o.out, lines.str());
    return 0;
}

struct BmOpts {
    std::string sequence;
    std::uint64_t prime = kDefaultPrime;
    std::size_t extend = 0;
};

int cmd_bm(const BmOpts& o) {
    auto seq = parse_sequence(o.sequence);
    auto r = berlekamp_massey(seq, o.prime);
    const bool sig = is_significant(r.L, seq.size());
    std::cerr << r.to_string() << "  (L = " << r.L << ", n = " << seq.size() << (sig ? ", significant" : ", not significant")
              << ")\n";
    json j = r.to_json();
    j["text"] = r.to_string();
    j["significant"] = sig;
    if (o.extend) {
        json ext = json::array();
        for (const auto& v : extend_sequence(r, o.extend)) ext.push_back(v.get_str());
        j["extended"] = ext;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct SearchOpts {
    std::string constant, out, patterns, created_at;
    SearchSpace space;
    std::size_t jobs = 1;
    bool raw = false, no_dedupe = false, log = false;
};

int cmd_search(SearchOpts o) {
    if (o.space.verify_digits == 0) o.space.verify_digits = env_digits("ESMA_VERIFY_DIGITS", 1000);
    o.space.validate();
    RunOptions opt;
    opt.jobs = o.jobs;
    opt.raw_patterns = o.raw;
    opt.dedupe = !o.no_dedupe;
    if (!o.patterns.empty()) opt.patterns = parse_patterns(o.patterns);
    if (!o.created_at.empty()) opt.created_at = o.created_at;
    auto spec = parse_constant(o.constant);
    std::cerr << "search " << spec.label << ": m=" << o.space.m << " L=" << o.space.L << " beta_b=" << o.space.beta_b
              << " N=" << o.space.N << " verify=" << o.space.verify_digits
              << "; complexity estimate " << o.space.complexity_estimate().get_str() << "\n";
    SearchStats stats;
    auto cs = run_search(spec, o.space, opt, &stats);
    std::cerr << "candidates " << stats.candidates << ", significant " << stats.significant << ", verified "
              << stats.verified << ", rejected " << stats.rejected << ", skipped (pole " << stats.pole << ", precision "
              << stats.precision << "), emitted " << stats.emitted << "\n";
    for (const auto& c : cs)
        std::cerr << "  " << c.rational_function.to_string() << "  " << c.sign_pattern.to_string() << "  "
                  << c.recurrence.to_string() << "\n";
    if (o.log)
        for (const auto& l : stats.log) std::cerr << "  log: " << l << "\n";
    write_output(o.out, conjectures_to_json(cs).dump(2));
    return 0;
}

struct VerifyOpts {
    std::string in;
    unsigned long digits = 0;
};

int cmd_verify(const VerifyOpts& o) {
    json j = read_json(o.in[0] == '@' || o.in[0] == '[' || o.in[0] == '{' ? o.in : "@" + o.in);
    std::vector<Conjecture> cs = j.is_array() ? conjectures_from_json(j) : std::vector<Conjecture>{Conjecture::from_json(j)};
    json out = json::array();
    bool all = true;
    for (const auto& c : cs) {
        const unsigned long d = o.digits ? o.digits : (c.verified_digits ? c.verified_digits : env_digits("ESMA_VERIFY_DIGITS", 1000));
        auto v = verify_conjecture(c, d);
        all = all && v.verified;
        std::cerr << c.rational_function.to_string() << " of " << c.constant.label << " " << c.sign_pattern.to_string()
                  << ": " << (v.verified ? "verified" : "FAILED") << " (" << v.achieved_digits << " digits, depth "
                  << v.depth << ")\n";
        json r = v.to_json();
        r["rational_function"] = c.rational_function.to_string();
        r["sign_pattern"] = c.sign_pattern.to_json();
        out.push_back(r);
    }
    std::cout << out.dump(2) << "\n";
    return all ? 0 : 2;
}

struct FormOpts {
    std::string form;
    unsigned long digits = 0;
    std::size_t budget = 64;
};

int cmd_fold(const FormOpts& o) {
    auto f = read_form(o.form);
    FoldResult r = o.digits ? fold(f, o.digits) : fold(f);
    std::cerr << "b'(n) = " << r.b_poly.to_string() << ", a'(n) = " << r.a_poly.to_string() << " from n = " << r.start_index
              << "; source = " << r.mobius.to_string() << " of the folded value\n";
    json j = r.to_json();
    j["mobius_text"] = r.mobius.to_string();
    j["convergence"] = to_string(classify_convergence(r));
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_simplify(const FormOpts& o) {
    auto r = sicf_to_simple(read_form(o.form), o.budget);
    std::cerr << to_string(r.status) << "; simple value = " << r.mobius.to_string() << " of the source\n";
    if (r.status == SimplifyStatus::simple) std::cerr << r.form.to_string() << "\n";
    std::cout << r.to_json().dump(2) << "\n";
    return r.status == SimplifyStatus::budget_exhausted ? 2 : 0;
}

int cmd_predict(const FormOpts& o) {
    auto p = predict_degrees(read_form(o.form));
    std::cerr << "deg b' = " << p.deg_b << ", deg a' = " << p.deg_a << "\n";
    std::cout << p.to_json().dump(2) << "\n";
    return 0;
}

int cmd_classify(const FormOpts& o) {
    auto f = read_form(o.form);
    auto c = classify_convergence(f);
    json j{{"convergence", to_string(c)}};
    try {
        j["irrationality"] = tietze_irrationality(f).to_json();
    } catch (const std::exception&) {
    }
    std::cerr << to_string(c) << "\n";
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct RateOpts {
    std::string form, fixture, target, map = "x", csv;
    std::size_t from = 0, to = 100;
    unsigned long digits = 0;
};

int cmd_rate(const RateOpts& o) {
    const unsigned long digits = o.digits ? o.digits : env_digits("ESMA_DIGITS", 1500);
    GeneralizedCF cf;
    RationalInterval t;
    if (!o.fixture.empty()) {
        const RateFixture& row = rate_fixture(o.fixture);
        t = row.target(digits);
        cf = row.cf(t, o.to + 100);
    } else {
        if (o.form.empty() || o.target.empty()) throw UsageError("rate needs --form and --target, or --fixture");
        t = RationalFunction::parse(o.map)(enclose_constant(parse_constant(o.target), digits));
        cf = to_general_cf(read_form(o.form));
    }
    ErrorTarget et{t.mid(), log10_abs(t.width())};
    const double rate = digits_per_term(cf, et, o.from, o.to);
    std::cerr << "digits per term over (" << o.from << ", " << o.to << "): " << rate << "\n";
    if (!o.csv.empty()) {
        auto rows = convergence_profile(cf, et, o.to);
        std::ofstream out(o.csv);
        if (!out) throw std::runtime_error("cannot write " + o.csv);
        out << "depth,log10_error\n";
        out.precision(10);
        for (const auto& [d, e] : rows) out << d << "," << e << "\n";
        std::cerr << rows.size() << " rows written to " << o.csv << "\n";
    }
    std::cout << json{{"rate", rate}, {"window", {o.from, o.to}}}.dump() << "\n";
    return 0;
}

struct FixturesOpts {
    std::string out;
};

int cmd_fixtures(const FixturesOpts& o) {
    json a = json::array();
    for (const auto& row : rate_fixtures()) {
        json j = row.to_json();
        j["measured_rate"] = row.measured_rate();
        std::cerr << row.label << ": " << j["measured_rate"].get<double>() << " (reference " << row.reference_rate << ")\n";
        a.push_back(j);
    }
    write_output(o.out, a.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"esma: continued-fraction conjecture search and CF transforms"};
    app.require_subcommand(1);

    auto* constants = app.add_subcommand("constants", "catalog constants");
    constants->require_subcommand(1);
    auto* clist = constants->add_subcommand("list", "list catalog constants");
    ConstantsOpts co;
    auto* ceval = constants->add_subcommand("eval", "evaluate a constant to a number of digits");
    ceval->add_option("constant", co.spec, "constant spec")->required();
    ceval->add_option("--digits", co.digits, "fraction digits (default $ESMA_DIGITS or 50)");

    ExtractOpts eo;
    auto* extract = app.add_subcommand("extract", "signed CF extraction");
    extract->add_option("--constant", eo.constant, "constant spec or rational p/q")->required();
    extract->add_option("--pattern,--signs", eo.pattern, "comma-separated +-1 signs");
    extract->add_option("--depth", eo.depth, "number of terms after a_0");
    extract->add_option("--digits", eo.digits, "working precision (default $ESMA_DIGITS or 200)");
    extract->add_option("--out", eo.out, "output file (default stdout)");

    BmOpts bo;
    auto* bm = app.add_subcommand("bm", "Berlekamp-Massey on an integer sequence");
    bm->add_option("--sequence", bo.sequence, "comma-separated integers")->required();
    bm->add_option("--prime", bo.prime, "field prime");
    bm->add_option("--extend", bo.extend, "also print this many terms of the extension");

    SearchOpts so;
    so.space.verify_digits = 0;
    auto* search = app.add_subcommand("search", "run the conjecture search");
    search->add_option("--constant", so.constant, "constant spec")->required();
    search->add_option("--max-degree", so.space.m, "max degree m of f and g");
    search->add_option("--coeff-range", so.space.L, "coefficient bound L");
    search->add_option("--max-sign-period", so.space.beta_b, "max sign-pattern period");
    search->add_option("--depth", so.space.N, "extraction depth N");
    search->add_option("--verify-digits", so.space.verify_digits, "verification digits (default $ESMA_VERIFY_DIGITS or 1000)");
    search->add_option("--prime", so.space.prime, "Berlekamp-Massey field prime");
    search->add_option("--jobs", so.jobs, "worker threads");
    search->add_option("--patterns", so.patterns, "explicit patterns, ';'-separated");
    search->add_option("--created-at", so.created_at, "fixed timestamp for reproducible output");
    search->add_flag("--raw-patterns", so.raw, "enumerate non-primitive patterns too");
    search->add_flag("--no-dedupe", so.no_dedupe, "keep Mobius-equivalent records");
    search->add_flag("--log", so.log, "print per-candidate notes");
    search->add_option("--out", so.out, "results file (default stdout)");

    VerifyOpts vo;
    auto* verify = app.add_subcommand("verify", "re-verify stored conjectures");
    verify->add_option("--in", vo.in, "results JSON file, @file, or inline JSON")->required();
    verify->add_option("--digits", vo.digits, "digits (default: the stored count)");

    FormOpts fo;
    auto add_form = [&fo](CLI::App* c) { c->add_option("--form", fo.form, "closed form JSON or @file")->required(); };
    auto* foldc = app.add_subcommand("fold", "Folding transform");
    add_form(foldc);
    foldc->add_option("--digits", fo.digits, "confirm the Mobius identity to this many digits");
    auto* simplify = app.add_subcommand("simplify", "rewrite a signed interlaced CF into a simple one");
    add_form(simplify);
    simplify->add_option("--budget", fo.budget, "rewrite budget");
    auto* predict = app.add_subcommand("predict-degrees", "degrees of the folded CF");
    add_form(predict);
    auto* classify = app.add_subcommand("classify", "convergence and irrationality verdicts");
    add_form(classify);

    RateOpts ro;
    auto* rate = app.add_subcommand("rate", "digits-per-term convergence rate");
    rate->add_option("--form", ro.form, "closed form JSON or @file");
    rate->add_option("--target", ro.target, "constant spec");
    rate->add_option("--map", ro.map, "rational function applied to the constant");
    rate->add_option("--fixture", ro.fixture, "reference fixture label");
    rate->add_option("--from", ro.from, "window start");
    rate->add_option("--to", ro.to, "window end");
    rate->add_option("--digits", ro.digits, "target precision (default $ESMA_DIGITS or 1500)");
    rate->add_option("--emit-csv", ro.csv, "write depth,log10_error rows");

    FixturesOpts xo;
    auto* fixtures = app.add_subcommand("fixtures", "regenerate the reference rate table");
    fixtures->add_option("--out", xo.out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*clist) return cmd_constants_list();
        if (*ceval) return cmd_constants_eval(co);
        if (*extract) return cmd_extract(eo);
        if (*bm) return cmd_bm(bo);
        if (*search) return cmd_search(so);
        if (*verify) return cmd_verify(vo);
        if (*foldc) return cmd_fold(fo);
        if (*simplify) return cmd_simplify(fo);
        if (*predict) return cmd_predict(fo);
        if (*classify) return cmd_classify(fo);
        if (*rate) return cmd_rate(ro);
        if (*fixtures) return cmd_fixtures(xo);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
