#include "padic/induction.hpp"

#include "padic/errors.hpp"

#include <algorithm>

namespace padic {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

} // namespace

bool InductionDatum::in_J(int sigma) const { return contains(J, sigma); }

InductionDatum make_datum(const FieldPtr& K, std::vector<int> J, MultiIndex d,
                          Character chi1, Character chi2) {
    if (!K) throw precondition_error("datum needs a field");
    if (chi1.K.get() != K.get() || chi2.K.get() != K.get())
        throw precondition_error("datum characters must live over the datum field");
    if (d.dims() != K->f()) throw precondition_error("degree cap arity mismatch");
    J = sorted_unique(std::move(J));
    for (int s : J)
        if (s < 0 || s >= K->f()) throw precondition_error("embedding index out of range");
    for (int s = 0; s < K->f(); ++s) {
        long ds = d.e[(size_t)s];
        if (ds < 0) throw precondition_error("degree caps must be nonnegative");
        if (contains(J, s) && ds != 0)
            throw precondition_error("degree caps must vanish on the analytic directions");
    }
    InductionDatum dat;
    dat.K = K;
    dat.J = std::move(J);
    dat.d = std::move(d);
    dat.chi1 = std::move(chi1);
    dat.chi2 = std::move(chi2);
    return dat;
}

DatumAnalysis datum_analysis(const InductionDatum& dat) {
    const Field& K = *dat.K;
    DatumAnalysis an;
    Rational v1 = chi_val_p(dat.chi1);
    Rational v2 = chi_val_p(dat.chi2);
    Rational absd{dat.d.total()};
    an.r = -v1;
    an.centralExponent = v1 + v2 + absd;
    an.integral = (an.centralExponent == Rational(0));
    an.nullityExponent = v2 + absd;
    an.extraInequality = !(an.nullityExponent < Rational(0));

    an.Jprime = dat.J;
    MultiIndex shift(K.f());
    MultiIndex dReduced = dat.d;
    for (int s = 0; s < K.f(); ++s) {
        if (dat.in_J(s)) continue;
        if (Rational(dat.d.e[(size_t)s] + 1) > an.r) {
            an.Jprime.push_back(s);
            shift.e[(size_t)s] = dat.d.e[(size_t)s];
            dReduced.e[(size_t)s] = 0;
        }
    }
    an.Jprime = sorted_unique(std::move(an.Jprime));
    Character twist = algebraic_character(dat.K, shift);
    an.chi2prime = char_mul(dat.chi2, twist);
    an.chi2prime.J = an.Jprime;
    Character chi1r = dat.chi1;
    chi1r.J = an.Jprime;
    an.reduced = make_datum(dat.K, an.Jprime, dReduced, std::move(chi1r), an.chi2prime);

    an.reducedSatisfiesCap = true;
    for (int s = 0; s < K.f(); ++s)
        if (!contains(an.Jprime, s) && Rational(dReduced.e[(size_t)s] + 1) > an.r)
            an.reducedSatisfiesCap = false;
    return an;
}

TemplateAnalysis analyze_template(const TemplateParams& params) {
    const FieldPtr& K = params.K;
    if (!K) throw precondition_error("template needs a field");
    if ((int)params.k.size() != K->f())
        throw precondition_error("one weight per embedding required");
    for (long kv : params.k)
        if (kv < 2) throw precondition_error("weights must be >= 2");
    if (params.alpha.is_zero() || params.alphaTilde.is_zero())
        throw precondition_error("alpha parameters must be nonzero");
    std::vector<int> J1 = sorted_unique(params.J1);
    std::vector<int> J2 = sorted_unique(params.J2);
    for (int s : J2)
        if (s < 0 || s >= K->f()) throw precondition_error("embedding index out of range");
    for (int s : J1)
        if (!contains(J2, s))
            throw precondition_error("J1 must be contained in J2");

    MultiIndex e1(K->f()), e2(K->f()), d(K->f());
    for (int s = 0; s < K->f(); ++s) {
        long ks = params.k[(size_t)s];
        if (contains(J1, s)) {
            e1.e[(size_t)s] = ks - 1;
            e2.e[(size_t)s] = -1;
        } else if (contains(J2, s)) {
            e2.e[(size_t)s] = ks - 2;
        } else {
            d.e[(size_t)s] = ks - 2;
        }
    }
    Character chi1 = char_mul(unramified_character(K, params.alpha.inv()),
                              algebraic_character(K, e1));
    chi1.J = J2;
    Character chi2 = char_mul(
        unramified_character(K, K->pi_pow(1) * params.alphaTilde.inv()),
        algebraic_character(K, e2));
    chi2.J = J2;

    TemplateAnalysis an;
    an.datum = make_datum(K, J2, d, std::move(chi1), std::move(chi2));
    DatumAnalysis da = datum_analysis(an.datum);
    an.r = da.r;
    an.integralityLHS = da.centralExponent;
    an.nullityLHS = da.nullityExponent;
    an.integral = da.integral;
    an.nullityOK = da.extraInequality;
    return an;
}

} // namespace padic
