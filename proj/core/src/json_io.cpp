#include "padic/json_io.hpp"

#include "padic/errors.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace padic {

namespace {

using nlohmann::ordered_json;

template <typename Fn> auto guarded(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("malformed JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// scalars

ordered_json jrational(const Rational& t) { return {{"num", t.num}, {"den", t.den}}; }

Rational prational(const ordered_json& j) {
    return Rational(j.at("num").get<long long>(), j.at("den").get<long long>());
}

ordered_json jlognorm(const LogNorm& v) {
    ordered_json out;
    out["qExponent"] = v.is_zero() ? ordered_json(nullptr) : jrational(-v.exponent());
    return out;
}

ordered_json jmulti(const MultiIndex& m) { return ordered_json(m.e); }

MultiIndex pmulti(const ordered_json& j, int dims) {
    MultiIndex m(dims);
    std::vector<long> e = j.get<std::vector<long>>();
    if ((int)e.size() != dims) throw parse_error("multi-index has the wrong dimension");
    m.e = std::move(e);
    return m;
}

// ---------------------------------------------------------------------------
// digits: residue digit index <-> f base-p coordinates

std::vector<long> digit_coords(const FieldPtr& K, long t) {
    std::vector<long> out((std::size_t)K->f());
    for (int i = 0; i < K->f(); ++i) {
        out[(std::size_t)i] = t % K->p();
        t /= K->p();
    }
    return out;
}

long digit_index(const FieldPtr& K, const std::vector<long>& coords) {
    if ((int)coords.size() != K->f()) throw parse_error("digit has the wrong number of coordinates");
    long t = 0;
    for (int i = K->f() - 1; i >= 0; --i) {
        long c = coords[(std::size_t)i];
        if (c < 0 || c >= K->p()) throw parse_error("digit coordinate out of range");
        t = t * K->p() + c;
    }
    return t;
}

ordered_json jcoset_digits(const FieldPtr& K, std::uint64_t idx, int level) {
    ordered_json out = ordered_json::array();
    for (int i = 0; i < level; ++i) {
        out.push_back(digit_coords(K, (long)(idx % (std::uint64_t)K->q())));
        idx /= (std::uint64_t)K->q();
    }
    return out;
}

std::uint64_t pcoset_digits(const FieldPtr& K, const ordered_json& j, int level) {
    if ((int)j.size() != level) throw parse_error("coset digit count disagrees with the level");
    std::uint64_t idx = 0;
    for (int i = level - 1; i >= 0; --i)
        idx = idx * (std::uint64_t)K->q() +
              (std::uint64_t)digit_index(K, j.at((std::size_t)i).get<std::vector<long>>());
    return idx;
}

// ---------------------------------------------------------------------------
// elements and fields

ordered_json jelem(const Elem& x) {
    ordered_json out;
    if (x.is_zero()) {
        out["w"] = "inf";
        out["digits"] = ordered_json::array();
    } else {
        out["w"] = x.w();
        ordered_json digits = ordered_json::array();
        for (long t : x.unit_digits()) digits.push_back(digit_coords(x.field(), t));
        out["digits"] = std::move(digits);
    }
    out["prec"] = x.abs_prec();
    return out;
}

Elem pelem(const FieldPtr& K, const ordered_json& j) {
    long long prec = j.at("prec").get<long long>();
    if (j.at("w").is_string()) {
        if (j.at("w").get<std::string>() != "inf") throw parse_error("valuation must be an integer or \"inf\"");
        return prec >= Field::kExactPrec ? K->zero() : K->zero_at(prec);
    }
    std::vector<long> digits;
    for (const auto& d : j.at("digits")) digits.push_back(digit_index(K, d.get<std::vector<long>>()));
    if (digits.empty()) throw parse_error("nonzero element needs at least one digit");
    Elem x = K->from_digits(digits) * K->pi_pow(j.at("w").get<long>());
    return prec >= Field::kExactPrec ? x : x.truncated(prec);
}

ordered_json jfield(const FieldPtr& K) {
    return {{"p", K->p()}, {"f", K->f()}, {"prec", K->prec()}};
}

FieldPtr pfield(const ordered_json& j) {
    return Field::make(j.at("p").get<long>(), j.at("f").get<int>(),
                       j.contains("prec") ? j.at("prec").get<int>() : 0);
}

// ---------------------------------------------------------------------------
// characters

ordered_json jcharacter(const Character& chi) {
    ordered_json smooth;
    smooth["conductor"] = chi.conductor;
    ordered_json table = ordered_json::object();
    for (const auto& [idx, val] : chi.smooth) table[std::to_string(idx)] = jelem(val);
    smooth["table"] = std::move(table);
    return {{"lambda", jelem(chi.lambda)},
            {"algExp", jmulti(chi.algExp)},
            {"smooth", std::move(smooth)},
            {"J", chi.J}};
}

Character pcharacter(const FieldPtr& K, const ordered_json& j) {
    std::map<std::uint64_t, Elem> table;
    const ordered_json& smooth = j.at("smooth");
    for (const auto& [key, val] : smooth.at("table").items())
        table.emplace((std::uint64_t)std::stoull(key), pelem(K, val));
    return make_character(K, pelem(K, j.at("lambda")), pmulti(j.at("algExp"), K->f()),
                          smooth.at("conductor").get<int>(), std::move(table),
                          j.at("J").get<std::vector<int>>());
}

// ---------------------------------------------------------------------------
// locally polynomial functions

std::string coset_key(const FieldPtr& K, std::uint64_t idx, int level) {
    std::string out;
    for (int i = 0; i < level; ++i) {
        if (i) out += '.';
        std::vector<long> co = digit_coords(K, (long)(idx % (std::uint64_t)K->q()));
        for (int c = 0; c < K->f(); ++c) {
            if (c) out += ',';
            out += std::to_string(co[(std::size_t)c]);
        }
        idx /= (std::uint64_t)K->q();
    }
    return out;
}

std::uint64_t pcoset_key(const FieldPtr& K, const std::string& key, int level) {
    std::vector<std::vector<long>> groups(1);
    if (!key.empty()) {
        std::string cur;
        for (char ch : key) {
            if (ch == '.') {
                groups.emplace_back();
            } else if (ch == ',') {
                groups.back().push_back(std::stol(cur));
                cur.clear();
                continue;
            } else {
                cur += ch;
                continue;
            }
            groups[groups.size() - 2].push_back(std::stol(cur));
            cur.clear();
        }
        groups.back().push_back(std::stol(cur));
    } else {
        groups.clear();
    }
    if ((int)groups.size() != level) throw parse_error("piece key disagrees with the level");
    std::uint64_t idx = 0;
    for (int i = level - 1; i >= 0; --i)
        idx = idx * (std::uint64_t)K->q() + (std::uint64_t)digit_index(K, groups[(std::size_t)i]);
    return idx;
}

std::string multi_key(const MultiIndex& m) {
    std::string out;
    for (int i = 0; i < m.dims(); ++i) {
        if (i) out += ',';
        out += std::to_string(m.e[(std::size_t)i]);
    }
    return out;
}

MultiIndex pmulti_key(const std::string& key, int dims) {
    MultiIndex m(dims);
    std::size_t pos = 0;
    for (int i = 0; i < dims; ++i) {
        std::size_t next = key.find(',', pos);
        m.e[(std::size_t)i] = std::stol(key.substr(pos, next - pos));
        if (next == std::string::npos) {
            if (i + 1 != dims) throw parse_error("exponent key has the wrong dimension");
            return m;
        }
        pos = next + 1;
    }
    throw parse_error("exponent key has the wrong dimension");
}

ordered_json jfunction(const LocallyPolyFunction& f) {
    const FieldPtr& K = f.K;
    MultiIndex degBound(K->f());
    for (const auto& [idx, piece] : f.pieces)
        for (const auto& [m, c] : piece.coeffs)
            for (int i = 0; i < K->f(); ++i)
                degBound.e[(std::size_t)i] = std::max(degBound.e[(std::size_t)i], m.e[(std::size_t)i]);
    ordered_json pieces = ordered_json::object();
    for (const auto& [idx, piece] : f.pieces) {
        ordered_json coeffs = ordered_json::object();
        for (const auto& [m, c] : piece.coeffs) coeffs[multi_key(m)] = jelem(c);
        pieces[coset_key(K, idx, f.level)] = std::move(coeffs);
    }
    return {{"level", f.level},
            {"J", ordered_json::array()},
            {"degBound", jmulti(degBound)},
            {"pieces", std::move(pieces)}};
}

LocallyPolyFunction pfunction(const FieldPtr& K, const ordered_json& j) {
    int level = j.at("level").get<int>();
    if (level < 0) throw parse_error("function level must be nonnegative");
    LocallyPolyFunction f = lp_zero(K, level);
    for (const auto& [key, coeffs] : j.at("pieces").items()) {
        std::uint64_t idx = pcoset_key(K, key, level);
        if (idx >= K->coset_count(level)) throw parse_error("piece key outside the coset range");
        LocalPolynomial piece;
        piece.center = K->coset_rep(idx, level);
        for (const auto& [mk, c] : coeffs.items()) {
            Elem cv = pelem(K, c);
            if (!cv.is_zero()) piece.coeffs.emplace(pmulti_key(mk, K->f()), cv);
        }
        if (!piece.coeffs.empty()) f.pieces.emplace(idx, std::move(piece));
    }
    return f;
}

// ---------------------------------------------------------------------------
// moment tables

ordered_json jmoment_table(const MomentTable& mu) {
    const FieldPtr& K = mu.K;
    ordered_json values = ordered_json::array();
    for (int n = 0; n <= mu.Nmax; ++n)
        for (std::uint64_t idx = 0; idx < K->coset_count(n); ++idx)
            for (const MultiIndex& m : mu.mlist) {
                const Elem& v = mu.value(n, idx, m);
                if (v.is_zero()) continue;
                values.push_back(ordered_json{{"a", jcoset_digits(K, idx, n)},
                                              {"n", n},
                                              {"m", jmulti(m)},
                                              {"v", jelem(v)}});
            }
    return {{"field", jfield(K)},
            {"Nmax", mu.Nmax},
            {"Mmax", mu.Mmax},
            {"values", std::move(values)}};
}

MomentTable pmoment_table(const ordered_json& j) {
    FieldPtr K = pfield(j.at("field"));
    MomentTable mu = make_moment_table(K, j.at("Nmax").get<int>(), j.at("Mmax").get<long>());
    for (const auto& entry : j.at("values")) {
        int n = entry.at("n").get<int>();
        if (n < 0 || n > mu.Nmax) throw parse_error("moment level outside the table range");
        MultiIndex m = pmulti(entry.at("m"), K->f());
        if (m.total() > mu.Mmax || !m.nonneg())
            throw parse_error("moment exponent outside the table range");
        mu.slot(n, pcoset_digits(K, entry.at("a"), n), m) = pelem(K, entry.at("v"));
    }
    return mu;
}

// ---------------------------------------------------------------------------
// induction data and distributions

ordered_json jdatum(const InductionDatum& dat) {
    return {{"field", jfield(dat.K)},
            {"J", dat.J},
            {"d", jmulti(dat.d)},
            {"chi1", jcharacter(dat.chi1)},
            {"chi2", jcharacter(dat.chi2)}};
}

InductionDatum pdatum(const ordered_json& j) {
    FieldPtr K = pfield(j.at("field"));
    return make_datum(K, j.at("J").get<std::vector<int>>(), pmulti(j.at("d"), K->f()),
                      pcharacter(K, j.at("chi1")), pcharacter(K, j.at("chi2")));
}

// ---------------------------------------------------------------------------
// report builders

ordered_json jwitness(const ConditionWitness& w) {
    return {{"center", jelem(w.center)}, {"n", w.n},
            {"nPart", jmulti(w.nPart)},  {"mPart", jmulti(w.mPart)},
            {"value", jlognorm(w.value)}, {"bound", jlognorm(w.bound)},
            {"ratio", jlognorm(w.ratio)}};
}

ordered_json jentry(const ConditionEntry& e) {
    ordered_json out;
    out["constant"] = jlognorm(e.constant);
    out["slack"] = jlognorm(e.slack);
    out["vacuous"] = e.vacuous;
    out["witness"] = e.vacuous ? ordered_json(nullptr) : jwitness(e.witness);
    return out;
}

ordered_json jrange(const CheckRange& range) {
    return {{"level", range.level},
            {"degree", range.degree},
            {"outerLevel", range.outerLevel},
            {"T", range.T}};
}

ordered_json jcondition(const ConditionReport& rep) {
    return {{"range", jrange(rep.range)},
            {"r", jrational(rep.r)},
            {"disk", jentry(rep.disk)},
            {"complement", jentry(rep.complement)},
            {"scaledDisk", jentry(rep.scaledDisk)},
            {"outerTail", jentry(rep.outerTail)},
            {"invertedDisk", jentry(rep.invertedDisk)},
            {"momentResidual", jentry(rep.momentResidual)},
            {"twistedResidual", jentry(rep.twistedResidual)}};
}

ordered_json jequivalence(const EquivalenceRecord& rec) {
    return {{"A", jcondition(rec.A)},
            {"B", jcondition(rec.B)},
            {"CA", jlognorm(rec.CA)},
            {"CB", jlognorm(rec.CB)},
            {"kappaAB", jlognorm(rec.kappaAB)},
            {"kappaBA", jlognorm(rec.kappaBA)},
            {"charSup", jlognorm(rec.charSup)},
            {"levelAtOne", rec.levelAtOne},
            {"familyNorm", jlognorm(rec.familyNorm)},
            {"familyVacuous", rec.familyVacuous},
            {"residual", jlognorm(rec.residual)},
            {"forwardHolds", rec.forwardHolds},
            {"backwardHolds", rec.backwardHolds}};
}

} // namespace

// ---------------------------------------------------------------------------
// public surface

std::string to_json(const FieldPtr& K) { return jfield(K).dump(2); }
std::string to_json(const Elem& x) { return jelem(x).dump(2); }
std::string to_json(const Character& chi) { return jcharacter(chi).dump(2); }
std::string to_json(const LocallyPolyFunction& f) { return jfunction(f).dump(2); }
std::string to_json(const MomentTable& mu) { return jmoment_table(mu).dump(2); }
std::string to_json(const InductionDatum& dat) { return jdatum(dat).dump(2); }
std::string to_json(const TwoChartDistribution& mu) {
    return ordered_json{{"mu1", jmoment_table(mu.mu1)}, {"mu2", jmoment_table(mu.mu2)}}.dump(2);
}

FieldPtr field_from_json(const std::string& text) {
    return guarded([&] { return pfield(ordered_json::parse(text)); });
}
Elem elem_from_json(const FieldPtr& K, const std::string& text) {
    return guarded([&] { return pelem(K, ordered_json::parse(text)); });
}
Character character_from_json(const FieldPtr& K, const std::string& text) {
    return guarded([&] { return pcharacter(K, ordered_json::parse(text)); });
}
LocallyPolyFunction function_from_json(const FieldPtr& K, const std::string& text) {
    return guarded([&] { return pfunction(K, ordered_json::parse(text)); });
}
MomentTable moment_table_from_json(const std::string& text) {
    return guarded([&] { return pmoment_table(ordered_json::parse(text)); });
}
InductionDatum datum_from_json(const std::string& text) {
    return guarded([&] { return pdatum(ordered_json::parse(text)); });
}
TwoChartDistribution two_chart_from_json(const std::string& text) {
    return guarded([&] {
        ordered_json j = ordered_json::parse(text);
        TwoChartDistribution mu{pmoment_table(j.at("mu1")), pmoment_table(j.at("mu2"))};
        if (mu.mu1.K->p() != mu.mu2.K->p() || mu.mu1.K->f() != mu.mu2.K->f())
            throw parse_error("the two charts live over different fields");
        return mu;
    });
}
TemplateParams template_from_json(const std::string& text) {
    return guarded([&] {
        ordered_json j = ordered_json::parse(text);
        FieldPtr K = pfield(j.at("field"));
        return TemplateParams{K, pelem(K, j.at("alpha")), pelem(K, j.at("alphaTilde")),
                              j.at("k").get<std::vector<long>>(),
                              j.at("J1").get<std::vector<int>>(),
                              j.at("J2").get<std::vector<int>>()};
    });
}

std::string to_json(const Rational& t) { return jrational(t).dump(2); }
std::string to_json(const LogNorm& v) { return jlognorm(v).dump(2); }

std::string to_json(const AvvReport& rep) {
    return ordered_json{{"r", jrational(rep.r)},
                        {"constant", jlognorm(rep.constant)},
                        {"budget", jlognorm(rep.budget)},
                        {"satisfied", rep.satisfied},
                        {"witnessLevel", rep.witnessLevel},
                        {"witnessCoset", rep.witnessCoset},
                        {"witnessM", jmulti(rep.witnessM)}}
        .dump(2);
}

std::string to_json(const ConditionReport& rep) { return jcondition(rep).dump(2); }
std::string to_json(const EquivalenceRecord& rec) { return jequivalence(rec).dump(2); }

std::string to_json(const DatumAnalysis& an) {
    return ordered_json{{"r", jrational(an.r)},
                        {"centralExponent", jrational(an.centralExponent)},
                        {"integral", an.integral},
                        {"nullityExponent", jrational(an.nullityExponent)},
                        {"extraInequality", an.extraInequality},
                        {"Jprime", an.Jprime},
                        {"chi2prime", jcharacter(an.chi2prime)},
                        {"reduced", jdatum(an.reduced)},
                        {"reducedSatisfiesCap", an.reducedSatisfiesCap}}
        .dump(2);
}

std::string to_json(const TemplateAnalysis& an) {
    return ordered_json{{"datum", jdatum(an.datum)},
                        {"r", jrational(an.r)},
                        {"integralityLHS", jrational(an.integralityLHS)},
                        {"nullityLHS", jrational(an.nullityLHS)},
                        {"integral", an.integral},
                        {"nullityOK", an.nullityOK}}
        .dump(2);
}

std::string to_json(const CollapseCertificate& cert) {
    ordered_json terms = ordered_json::array();
    for (const CollapseTerm& t : cert.terms)
        terms.push_back(ordered_json{{"coef", jelem(t.coef)},
                                     {"g", ordered_json{{"a", jelem(t.g.a)},
                                                        {"b", jelem(t.g.b)},
                                                        {"c", jelem(t.g.c)},
                                                        {"d", jelem(t.g.d)}}},
                                     {"gen", jmulti(t.gen)}});
    return ordered_json{{"lambda", jelem(cert.lambda)},
                        {"n", cert.n},
                        {"i", jmulti(cert.i)},
                        {"m", cert.m},
                        {"coefficientsIntegral", cert.coefficientsIntegral},
                        {"verified", cert.verified},
                        {"terms", std::move(terms)},
                        {"target", jfunction(cert.target)},
                        {"assembled", jfunction(cert.assembled)}}
        .dump(2);
}

} // namespace padic
