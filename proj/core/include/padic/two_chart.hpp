#pragma once

/* Two-chart model of the induced module on P^1(F).  A function is a pair of
 * locally polynomial charts on O_F: chart 1 reads f through z -> pi z on
 * pi O_F, chart 2 reads it through z -> 1/z against the character weight
 * X(z) z^d (X = chi2/chi1) on the complement.  The group acts through Mobius
 * substitution; images are reassembled chart by chart with certified
 * truncation tails, exactly whenever every character germ is exact.
 */

#include "padic/dist.hpp"
#include "padic/expansion.hpp"
#include "padic/field.hpp"
#include "padic/funcspace.hpp"
#include "padic/induction.hpp"

#include <vector>

namespace padic {

struct Mat2 {
    Elem a, b, c, d;
};

Mat2 mat_mul(const Mat2& g, const Mat2& h);
Elem mat_det(const Mat2& g);
Mat2 mat_identity(const FieldPtr& K);
Mat2 mat_central(const FieldPtr& K, const Elem& lambda);
Mat2 mat_diag(const FieldPtr& K, const Elem& lambda);  // [[1,0],[0,lambda]]
Mat2 mat_unip(const FieldPtr& K, const Elem& lambda);  // [[1,lambda],[0,1]]
Mat2 mat_w(const FieldPtr& K);                         // [[0,pi],[1,0]]

// factor g into the generator alphabet above; the ordered product equals g
std::vector<Mat2> decompose_bruhat(const Mat2& g);

struct TwoChartFunction {
    LocallyPolyFunction f1, f2;
};

TwoChartFunction two_chart_zero(const FieldPtr& K);
// global evaluation: z in pi O  ->  f1(z/pi), otherwise X(z) z^d f2(1/z)
Elem two_chart_eval(const TwoChartFunction& f, const InductionDatum& dat, const Elem& z);
// certified upper bound: the larger of the two chart norms
LogNorm two_chart_norm(const TwoChartFunction& f, const Rational& r);
// pairing against a pair of moment tables, chart by chart
Elem pair_two_chart(const MomentTable& mu1, const MomentTable& mu2,
                    const TwoChartFunction& f);

// translation of an O_F-supported function: same level, recentred pieces
LocallyPolyFunction translate_function(const LocallyPolyFunction& f, const Elem& b);
/* image of an O_F-supported function under [[pi^n, b],[0,1]]: support moves
 * into D(b, n) and the character weight chi2(pi^n) pi^{n d} comes out, with
 * the monomial degrees absorbing pi^{-n} per the substitution */
LocallyPolyFunction p_weight_transport(const InductionDatum& dat, int n, const Elem& b,
                                       const LocallyPolyFunction& f);

struct ActOptions {
    long T = 6;        // germ truncation degree
    int levelCap = 9;  // deepest refinement tried before giving up
};

struct ActResult {
    TwoChartFunction f;
    LogNorm err1, err2; // certified sup error of each chart
    int level1 = 0, level2 = 0;
    bool exact = true;  // both charts assembled from exact germs
};

/* Action of g on f for the given (reduced) datum.  Central elements and
 * [[0,pi],[1,0]] take exact closed-form paths; everything else refines each
 * output chart until every coset decides its branch, lands in a single source
 * coset, and supports the needed character expansions. */
ActResult act(const Mat2& g, const TwoChartFunction& f, const InductionDatum& dat,
              const ActOptions& opt = {});

struct LatticeGenerator {
    TwoChartFunction f;
    LogNorm err;     // chart-2 truncation error (zero when exact)
    MultiIndex n, m; // exponent split: n off J (n <= d), m on J
    int family = 1;  // 1: supported on O_F; 2: supported off O_F
};

/* Unit-lattice generator family: family 1 is 1_O z^{n+m} (charts
 * (pi^{|n+m|} zeta^{n+m}, 1_units X(zeta) zeta^{d-n-m})), family 2 is its
 * complement twin with charts (0, 1_{pi O} zeta^{n+m}).  mCutoff bounds |m|;
 * level sets the chart-2 expansion depth, floored at the analyticity level. */
std::vector<LatticeGenerator> lattice_generators(const InductionDatum& dat, long mCutoff,
                                                 int level, long T);

struct CollapseTerm {
    Elem coef;
    Mat2 g;
    MultiIndex gen; // generator exponent: the O_F-supported monomial z^gen
};

struct CollapseCertificate {
    Elem lambda;
    int n = 0;
    MultiIndex i; // target lambda 1_{D(0,n)} z^i
    int m = 0;    // depth of the P-matrices used
    std::vector<CollapseTerm> terms;
    bool coefficientsIntegral = false;
    LocallyPolyFunction target, assembled; // both as functions on O_F
    bool verified = false;                 // assembled == target exactly
};

/* Witness that the unit lattice absorbs arbitrarily large vectors when
 * val(chi2(p)) + |d| < 0: an integral combination of P-translates of the
 * generators equal to lambda 1_{D(0,n)} z^i.  The depth m is the smallest
 * with val(chi2(pi^m) pi^{m d}) <= val(lambda) (at least n); budget caps m. */
CollapseCertificate nullity_collapse(const InductionDatum& dat, const Elem& lambda,
                                     int n, const MultiIndex& i, int budget);

struct TruncationFamily {
    std::vector<LocallyPolyFunction> f; // f[t] kills D(0, nMin + t)
    std::vector<LogNorm> truncationError;
    std::vector<LogNorm> stepUpper; // certified bound on ||f[t+1] - f[t]||_{C^r}
    std::vector<LogNorm> stepLower; // enumeration lower bound on the same
    int nMin = 0;
};

/* The functions 1_{O \ D(0,n)} X(z) z^{d-nExp} z^{-mExp} as locally
 * polynomial truncations.  Requires the strict decay margin
 * r - |nExp| - |mExp| > 0 with nExp supported off J (nExp <= d) and mExp
 * supported on J. */
TruncationFamily funzionicr_truncations(const InductionDatum& dat, int nMin, int nMax,
                                        const MultiIndex& nExp, const MultiIndex& mExp,
                                        int level, long T);

} // namespace padic
