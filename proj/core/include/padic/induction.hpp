#pragma once

/* Induction data (J, d, chi1, chi2) for the two-chart module on P^1(F), the
 * derived invariants r, J', chi2', and the weight-template construction that
 * produces such data from (alpha, alphaTilde, weights k, J1 <= J2).
 */

#include "padic/chars.hpp"
#include "padic/field.hpp"

#include <vector>

namespace padic {

struct InductionDatum {
    FieldPtr K;
    std::vector<int> J;  // analytic directions
    MultiIndex d;        // nonnegative caps, zero on J
    Character chi1, chi2;

    bool in_J(int sigma) const;
};

InductionDatum make_datum(const FieldPtr& K, std::vector<int> J, MultiIndex d,
                          Character chi1, Character chi2);

struct DatumAnalysis {
    Rational r;                // -val_p(chi1(p))
    Rational centralExponent;  // val_p(chi1(p)) + val_p(chi2(p)) + |d|
    bool integral = false;     // centralExponent == 0
    Rational nullityExponent;  // val_p(chi2(p)) + |d|
    bool extraInequality = false; // nullityExponent >= 0
    std::vector<int> Jprime;   // J with the sigma where d_sigma + 1 > r adjoined
    Character chi2prime;       // chi2 * prod_{Jprime minus J} sigma^{d_sigma}
    InductionDatum reduced;    // (Jprime, d zeroed on Jprime, chi1, chi2prime)
    bool reducedSatisfiesCap = false; // d_sigma + 1 <= r off Jprime
};

DatumAnalysis datum_analysis(const InductionDatum& dat);

/* Weight-template instance: from alpha, alphaTilde in F^x, weights
 * k_sigma >= 2 and nested subsets J1 <= J2 of the embeddings, build
 *   chi1 = unr(alpha^{-1}) * prod_{J1} sigma^{k_sigma - 1},
 *   chi2 = unr(p alphaTilde^{-1}) * prod_{J1} sigma^{-1}
 *                                 * prod_{J2\J1} sigma^{k_sigma - 2},
 *   J = J2,  d = (k_sigma - 2) off J2,
 * and report the two side conditions in exact arithmetic. */
struct TemplateParams {
    FieldPtr K;
    Elem alpha, alphaTilde;
    std::vector<long> k;     // one weight per embedding
    std::vector<int> J1, J2; // J1 contained in J2
};

struct TemplateAnalysis {
    InductionDatum datum;
    Rational r;
    Rational integralityLHS; // -val_F(alpha alphaTilde) + sum_S (k_sigma - 1)
    Rational nullityLHS;     // -val_F(alphaTilde) + sum_{S\J1} (k_sigma - 1)
    bool integral = false;
    bool nullityOK = false;
};

TemplateAnalysis analyze_template(const TemplateParams& params);

} // namespace padic
