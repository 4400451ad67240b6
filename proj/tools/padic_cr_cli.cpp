/* Batch front end over the padic_cr library.  Subcommands analyze induction
 * data, compute certified C^r norms, run the moment-growth and two-chart
 * inequality checkers with their equivalence harness, produce collapse
 * certificates, and run a deterministic self-test battery.  Reports are JSON
 * on standard output (or --out); diagnostics go to standard error.  Exit
 * codes: 0 success, 2 unreadable or malformed input, 3 precondition
 * violation, 4 insufficient table coverage.
 */

#include "padic/errors.hpp"
#include "padic/json_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace padic;
using nlohmann::ordered_json;

namespace {

struct CommandConfig {
    std::string datumPath, distPath, momentsPath, functionPath, outPath;
    std::string fieldSpec, rSpec = "1", budgetSpec, lambdaSpec = "1/3";
    std::string Jspec, dSpec, iSpec, side = "both";
    int prec = 0;
    int rangeN = 6, outer = 2, level = 1, enumLevel = -1, scaleInto = -1;
    long rangeDeg = 4, T = 6;
    int depthBudget = 8;
    std::uint64_t seed = 1;
    bool project = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot read input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_report(const CommandConfig& cfg, const std::string& text) {
    if (cfg.outPath.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(cfg.outPath, std::ios::binary);
    if (!out) throw parse_error("cannot write output file: " + cfg.outPath);
    out << text << "\n";
}

std::vector<long> parse_longs(const std::string& csv) {
    std::vector<long> out;
    if (csv.empty()) return out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
    return out;
}

std::vector<int> parse_ints(const std::string& csv) {
    std::vector<int> out;
    for (long v : parse_longs(csv)) out.push_back((int)v);
    return out;
}

Rational parse_rational(const std::string& text) {
    std::size_t slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text));
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw parse_error("not a rational: " + text);
    }
}

FieldPtr parse_field(const CommandConfig& cfg) {
    std::vector<long> pf = parse_longs(cfg.fieldSpec);
    if (pf.size() != 2) throw parse_error("--field expects p,f");
    return Field::make(pf[0], (int)pf[1], cfg.prec);
}

MultiIndex parse_multi(const std::string& csv, int dims) {
    MultiIndex m(dims);
    if (csv.empty()) return m;
    std::vector<long> e = parse_longs(csv);
    if ((int)e.size() != dims) throw parse_error("expected " + std::to_string(dims) + " exponents");
    m.e = e;
    return m;
}

CheckRange parse_range(const CommandConfig& cfg) {
    return CheckRange{cfg.rangeN, cfg.rangeDeg, cfg.outer, cfg.T};
}

ordered_json embed(const std::string& jsonText) { return ordered_json::parse(jsonText); }

// value q^{e} from the exponent e
LogNorm qpow(const Rational& e) { return LogNorm::from_exponent(-e); }

bool lnorm_leq(const LogNorm& a, const LogNorm& b) { return !(b < a); }

// ---------------------------------------------------------------------------
// subcommands

int run_analyze(const CommandConfig& cfg) {
    std::string text = read_file(cfg.datumPath);
    try {
        InductionDatum dat = datum_from_json(text);
        write_report(cfg, to_json(datum_analysis(dat)));
        return 0;
    } catch (const parse_error&) {
        // fall through to the weight-template shape
    }
    TemplateParams params = template_from_json(text);
    TemplateAnalysis ta = analyze_template(params);
    ordered_json out;
    out["template"] = embed(to_json(ta));
    out["analysis"] = embed(to_json(datum_analysis(ta.datum)));
    write_report(cfg, out.dump(2));
    return 0;
}

int run_crnorm(const CommandConfig& cfg) {
    FieldPtr K = parse_field(cfg);
    LocallyPolyFunction f = function_from_json(K, read_file(cfg.functionPath));
    Rational r = parse_rational(cfg.rSpec);
    int M = cfg.enumLevel >= 0 ? cfg.enumLevel : cr_norm_default_enum_level(f);

    ordered_json out;
    out["r"] = embed(to_json(r));
    out["enumLevel"] = M;
    out["enumLower"] = embed(to_json(cr_norm_enum(f, r, M)));
    out["gaussUpper"] = embed(to_json(cr_norm_upper(f, r)));
    out["supNormFh"] = embed(to_json(norm_Fh(f)));

    ordered_json profile = ordered_json::array();
    long cap = r.floor() > 0 ? (long)r.floor() : 0;
    for (const MultiIndex& i : multi_indices_upto(K->f(), cap)) {
        LogNorm sup = LogNorm::zero();
        for (const auto& [idx, piece] : f.pieces)
            sup = max(sup, poly_gauss_norm(poly_divided_derivative(piece, i), f.level));
        profile.push_back(ordered_json{{"i", i.e}, {"sup", embed(to_json(sup))}});
    }
    out["dividedDerivativeSups"] = std::move(profile);

    if (cfg.scaleInto >= 0) {
        LogNorm base = cr_norm_upper(f, r);
        LogNorm scaled = cr_norm_upper(scale_into_disk(f, cfg.scaleInto), r);
        LogNorm budget = qpow(Rational(cfg.scaleInto) * r) * base;
        out["scaleInto"] = ordered_json{{"n", cfg.scaleInto},
                                        {"scaledUpper", embed(to_json(scaled))},
                                        {"budget", embed(to_json(budget))},
                                        {"respected", lnorm_leq(scaled, budget)}};
    }
    write_report(cfg, out.dump(2));
    return 0;
}

int run_avv(const CommandConfig& cfg) {
    MomentTable mu = moment_table_from_json(read_file(cfg.momentsPath));
    Rational r = parse_rational(cfg.rSpec);
    std::vector<int> J = parse_ints(cfg.Jspec);
    MultiIndex d = parse_multi(cfg.dSpec, mu.K->f());
    AvvReport rep = cfg.budgetSpec.empty()
                        ? avv_norm(mu, r, J, d)
                        : velu_check(mu, r, J, d, qpow(parse_rational(cfg.budgetSpec)));
    write_report(cfg, to_json(rep));
    return 0;
}

int run_cond(const CommandConfig& cfg) {
    TwoChartDistribution mu = two_chart_from_json(read_file(cfg.distPath));
    InductionDatum dat = datum_from_json(read_file(cfg.datumPath));
    CheckRange range = parse_range(cfg);
    if (cfg.side == "A") {
        write_report(cfg, to_json(cond_A_check(mu, dat, range)));
    } else if (cfg.side == "B") {
        write_report(cfg, to_json(cond_B_check(mu, dat, range)));
    } else {
        ordered_json out;
        out["A"] = embed(to_json(cond_A_check(mu, dat, range)));
        out["B"] = embed(to_json(cond_B_check(mu, dat, range)));
        write_report(cfg, out.dump(2));
    }
    return 0;
}

int run_equiv(const CommandConfig& cfg) {
    TwoChartDistribution mu = two_chart_from_json(read_file(cfg.distPath));
    InductionDatum dat = datum_from_json(read_file(cfg.datumPath));
    CheckRange range = parse_range(cfg);
    if (cfg.project) mu = project_vanishing(mu, dat, range);
    ordered_json out;
    out["projected"] = cfg.project;
    out["record"] = embed(to_json(equivalence_harness(mu, dat, range)));
    write_report(cfg, out.dump(2));
    return 0;
}

int run_collapse(const CommandConfig& cfg) {
    InductionDatum dat = datum_from_json(read_file(cfg.datumPath));
    Rational lam = parse_rational(cfg.lambdaSpec);
    Elem lambda = dat.K->from_ratio(lam.num, lam.den);
    MultiIndex i = parse_multi(cfg.iSpec, dat.K->f());
    CollapseCertificate cert = nullity_collapse(dat, lambda, cfg.level, i, cfg.depthBudget);
    write_report(cfg, to_json(cert));
    return 0;
}

// ---------------------------------------------------------------------------
// selftest battery: deterministic miniatures of every checker family

ordered_json selftest_field_laws(std::uint64_t seed) {
    bool pass = true;
    int trials = 0;
    for (int f : {1, 2})
        for (int prec : {16, 32}) {
            FieldPtr K = Field::make(f == 1 ? 3 : 2, f, prec);
            pass = pass && K->from_int(K->p()).val_F() == Rational(K->f());
            std::mt19937_64 rng(seed + (std::uint64_t)(f * 100 + prec));
            for (int t = 0; t < 50; ++t) {
                Elem a = K->random_elem(rng, -2, 3, true);
                Elem b = K->random_elem(rng, -2, 3, true);
                Elem c = K->random_elem(rng, -2, 3, true);
                pass = pass && (a + b) * c == a * c + b * c;
                pass = pass && (a * b) * c == a * (b * c);
                pass = pass && K->frobenius(a * b, 1) == K->frobenius(a, 1) * K->frobenius(b, 1);
                if (!a.is_zero()) pass = pass && a * a.inv() == K->from_int(1);
                ++trials;
            }
        }
    return {{"trials", trials}, {"pass", pass}};
}

ordered_json selftest_crnorm() {
    FieldPtr K = Field::make(3, 1);
    bool pass = true;
    LocallyPolyFunction one = lp_constant(K, K->from_int(1));
    pass = pass && cr_norm_upper(one, Rational(1, 2)) == LogNorm::one();
    pass = pass && cr_norm_enum(one, Rational(1, 2), 2) == LogNorm::one();
    ordered_json cases = ordered_json::array();
    for (int n = 1; n <= 3; ++n)
        for (const Rational& r : {Rational(1, 2), Rational(1), Rational(3, 2)}) {
            LocallyPolyFunction f = lp_indicator(K, K->zero(), n);
            LogNorm expected = qpow(Rational(n - 1) * r);
            LogNorm up = cr_norm_upper(f, r);
            LogNorm lo = cr_norm_enum(f, r, cr_norm_default_enum_level(f));
            pass = pass && up == expected && lo == expected;
            cases.push_back(ordered_json{{"n", n},
                                         {"r", embed(to_json(r))},
                                         {"norm", embed(to_json(up))}});
        }
    return {{"diskClosedForms", std::move(cases)}, {"pass", pass}};
}

ordered_json selftest_scale_bound(std::uint64_t seed) {
    FieldPtr K = Field::make(3, 1);
    std::mt19937_64 rng(seed);
    bool pass = true;
    int trials = 0;
    for (int t = 0; t < 10; ++t) {
        LocallyPolyFunction f = lp_indicator_monomial(
            K, K->coset_rep(rng() % K->coset_count(2), 2), 2, MultiIndex{(long)(rng() % 3)});
        if (t % 2) f = lp_add(f, lp_constant(K, K->random_elem(rng, 0, 2, false)));
        for (int n = 0; n <= 2; ++n)
            for (const Rational& r : {Rational(1, 2), Rational(2)}) {
                LogNorm lhs = cr_norm_upper(scale_into_disk(f, n), r);
                LogNorm rhs = qpow(Rational(n) * r) * cr_norm_upper(f, r);
                pass = pass && lnorm_leq(lhs, rhs);
                ++trials;
            }
    }
    return {{"trials", trials}, {"pass", pass}};
}

ordered_json selftest_velu(std::uint64_t seed) {
    FieldPtr K = Field::make(3, 1);
    std::mt19937_64 rng(seed);
    bool pass = true;
    for (int t = 0; t < 5; ++t) {
        Elem a = K->random_elem(rng, 0, 3, true);
        AvvReport rep = velu_check(dirac(K, a, 4, 2), Rational(1), {}, MultiIndex{2},
                                   LogNorm::one());
        pass = pass && rep.satisfied;
    }
    return {{"diracs", 5}, {"pass", pass}};
}

ordered_json selftest_action(std::uint64_t seed) {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = make_datum(K, {}, MultiIndex(1),
                                    unramified_character(K, K->from_ratio(1, 3)),
                                    unramified_character(K, K->from_int(3)));
    bool pass = true;
    for (std::uint64_t s = 0; s < 3; ++s) {
        MomentTable mu = random_consistent(K, seed + s, 4, 2, 0);
        for (int n : {1, 2}) {
            Elem a = K->from_int((long long)(s + n));
            MomentTable nu = translate_scale_action(mu, n, a, dat);
            for (int k = 0; k <= nu.Nmax; ++k)
                for (const MultiIndex& m : nu.mlist) {
                    Elem b = K->coset_rep(k > 0 ? 1 : 0, k);
                    Elem lhs = nu.value(k, k > 0 ? 1 : 0, m);
                    Elem weight = chi_eval(dat.chi2, K->pi_pow(n)) *
                                  K->pi_pow(n * (dat.d.total() - m.total()));
                    Elem rhs = weight * moment_at(mu, a + K->pi_pow(n) * b, k + n, m);
                    pass = pass && lhs == rhs;
                }
        }
    }
    return {{"tables", 3}, {"pass", pass}};
}

ordered_json selftest_equivalence(std::uint64_t seed) {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = make_datum(K, {}, MultiIndex(1),
                                    unramified_character(K, K->from_ratio(1, 3)),
                                    unramified_character(K, K->from_int(3)));
    CheckRange range{4, 3, 2, 6};
    bool forward = true, backward = true, residualZero = true;
    for (std::uint64_t s = 0; s < 2; ++s) {
        TwoChartDistribution mu{random_consistent(K, seed + 11 * s, 5, 3, 0),
                                random_consistent(K, seed + 11 * s + 7, 5, 3, 0)};
        forward = forward && equivalence_harness(mu, dat, range).forwardHolds;
        TwoChartDistribution proj = project_vanishing(mu, dat, range);
        EquivalenceRecord rec = equivalence_harness(proj, dat, range);
        forward = forward && rec.forwardHolds;
        backward = backward && rec.backwardHolds;
        residualZero = residualZero && rec.residual.is_zero();
    }
    return {{"seeds", 2},
            {"forward", forward},
            {"backward", backward},
            {"residualZero", residualZero},
            {"pass", forward && backward && residualZero}};
}

ordered_json selftest_collapse() {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = make_datum(K, {}, MultiIndex(1),
                                    unramified_character(K, K->from_ratio(1, 3)),
                                    unramified_character(K, K->from_ratio(1, 3)));
    bool pass = true;
    ordered_json counts = ordered_json::array();
    for (int t = 1; t <= 2; ++t) {
        CollapseCertificate cert = nullity_collapse(dat, K->pi_pow(-t), 0, MultiIndex(1), 8);
        pass = pass && cert.verified && cert.coefficientsIntegral &&
               cert.terms.size() == (std::size_t)K->coset_count(t);
        counts.push_back((long long)cert.terms.size());
    }
    return {{"termCounts", std::move(counts)}, {"pass", pass}};
}

ordered_json selftest_template() {
    FieldPtr K = Field::make(3, 1);
    TemplateParams params{K, K->from_int(1), K->pi_pow(1), {2}, {}, {}};
    TemplateAnalysis ta = analyze_template(params);
    return {{"r", embed(to_json(ta.r))},
            {"integral", ta.integral},
            {"nullityOK", ta.nullityOK},
            {"pass", ta.integral && ta.nullityOK && ta.r == Rational(0)}};
}

int run_selftest(const CommandConfig& cfg) {
    ordered_json out;
    out["seed"] = cfg.seed;
    out["fieldLaws"] = selftest_field_laws(cfg.seed);
    out["crNorm"] = selftest_crnorm();
    out["scaleBound"] = selftest_scale_bound(cfg.seed);
    out["momentGrowth"] = selftest_velu(cfg.seed);
    out["action"] = selftest_action(cfg.seed);
    out["equivalence"] = selftest_equivalence(cfg.seed);
    out["collapse"] = selftest_collapse();
    out["template"] = selftest_template();
    bool pass = true;
    for (const auto& [key, val] : out.items())
        if (val.is_object() && val.contains("pass")) pass = pass && val["pass"].get<bool>();
    out["pass"] = pass;
    write_report(cfg, out.dump(2));
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CommandConfig cfg;
    CLI::App app{"exact-arithmetic checker for p-adic distribution growth and "
                 "two-chart inequality systems"};
    app.require_subcommand(1);

    CLI::App* analyze = app.add_subcommand("analyze", "invariants of an induction datum or weight template");
    analyze->add_option("--datum", cfg.datumPath, "datum or template JSON")->required();

    CLI::App* crnorm = app.add_subcommand("crnorm", "certified C^r norm interval of a function");
    crnorm->add_option("--function", cfg.functionPath, "function JSON")->required();
    crnorm->add_option("--field", cfg.fieldSpec, "p,f")->required();
    crnorm->add_option("--prec", cfg.prec, "pi-adic working precision (0 = default)");
    crnorm->add_option("--r", cfg.rSpec, "order r as num[/den]");
    crnorm->add_option("--enum-level", cfg.enumLevel, "enumeration level for the lower bound");
    crnorm->add_option("--scale-into", cfg.scaleInto, "also check the disk-scaling bound at this n");

    CLI::App* avv = app.add_subcommand("avv", "order-r moment growth of a table");
    avv->add_option("--moments", cfg.momentsPath, "moment table JSON")->required();
    avv->add_option("--r", cfg.rSpec, "order r as num[/den]");
    avv->add_option("--J", cfg.Jspec, "analytic directions, comma separated");
    avv->add_option("--d", cfg.dSpec, "exponent caps off J, comma separated");
    avv->add_option("--budget", cfg.budgetSpec, "verdict budget as a q-exponent num[/den]");

    CLI::App* cond = app.add_subcommand("cond", "disk/complement and per-chart growth constants");
    cond->add_option("--dist", cfg.distPath, "two-chart distribution JSON")->required();
    cond->add_option("--datum", cfg.datumPath, "datum JSON")->required();
    cond->add_option("--side", cfg.side, "A, B, or both")
        ->check(CLI::IsMember({"A", "B", "both"}));
    cond->add_option("--range-n", cfg.rangeN, "deepest disk level scanned");
    cond->add_option("--range-deg", cfg.rangeDeg, "total-degree cap on exponents");
    cond->add_option("--outer", cfg.outer, "shell-exhaustion depth");
    cond->add_option("--T", cfg.T, "germ truncation degree");

    CLI::App* equiv = app.add_subcommand("equiv", "compare both side constants against the budgets");
    equiv->add_option("--dist", cfg.distPath, "two-chart distribution JSON")->required();
    equiv->add_option("--datum", cfg.datumPath, "datum JSON")->required();
    equiv->add_flag("--project", cfg.project, "subtract point masses until the residuals vanish");
    equiv->add_option("--range-n", cfg.rangeN, "deepest disk level scanned");
    equiv->add_option("--range-deg", cfg.rangeDeg, "total-degree cap on exponents");
    equiv->add_option("--outer", cfg.outer, "shell-exhaustion depth");
    equiv->add_option("--T", cfg.T, "germ truncation degree");

    CLI::App* collapse = app.add_subcommand("collapse", "unit-lattice collapse certificate");
    collapse->add_option("--datum", cfg.datumPath, "datum JSON")->required();
    collapse->add_option("--lambda", cfg.lambdaSpec, "target scalar as num[/den]");
    collapse->add_option("--level", cfg.level, "target disk level n");
    collapse->add_option("--i", cfg.iSpec, "target exponent, comma separated");
    collapse->add_option("--budget", cfg.depthBudget, "depth cap for the certificate");

    CLI::App* selftest = app.add_subcommand("selftest", "deterministic battery over every checker");
    selftest->add_option("--seed", cfg.seed, "seed for the fuzzed parts");

    for (CLI::App* sub : {analyze, crnorm, avv, cond, equiv, collapse, selftest})
        sub->add_option("--out", cfg.outPath, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(analyze)) return run_analyze(cfg);
        if (app.got_subcommand(crnorm)) return run_crnorm(cfg);
        if (app.got_subcommand(avv)) return run_avv(cfg);
        if (app.got_subcommand(cond)) return run_cond(cfg);
        if (app.got_subcommand(equiv)) return run_equiv(cfg);
        if (app.got_subcommand(collapse)) return run_collapse(cfg);
        if (app.got_subcommand(selftest)) return run_selftest(cfg);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const coverage_error& e) {
        std::cerr << "coverage error: " << e.what() << "\n";
        return 4;
    } catch (const precondition_error& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 3;
    } catch (const precision_error& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
