#pragma once

/* Inequality systems for distributions on the projective line, given in two
 * charts as a pair of moment tables.  Two finite families of growth bounds are
 * measured over a declared range: side A looks at integrals over disks of F
 * and over complements of disks, assembled from the stored chart moments with
 * certified germ pairings; side B looks at per-chart moment growth together
 * with the residual decay of the strict-region global integrals.  The
 * equivalence harness compares the best constants of the two sides against
 * transfer budgets computed from character-expansion data and the norms of the
 * strict-region function family -- never from hardcoded numbers.
 */

#include "padic/dist.hpp"
#include "padic/expansion.hpp"
#include "padic/field.hpp"
#include "padic/induction.hpp"
#include "padic/two_chart.hpp"

namespace padic {

struct TwoChartDistribution {
    MomentTable mu1; // pairs with chart-1 pieces (support inside pi O_F)
    MomentTable mu2; // pairs with chart-2 pieces (support meeting F \ pi O_F)
};

struct CheckRange {
    int level = 6;      // deepest disk level scanned in either chart
    long degree = 4;    // total-degree cap on the exponent family
    int outerLevel = 2; // shell-exhaustion depth for big disks and residuals
    long T = 6;         // truncation degree for character germs
};

/* One extremal instance: the disk (center, n in F-coordinates, or the chart-2
 * address for the inverted families), the exponent split into its off-J part
 * (capped by d) and its J part, the attained |integral|, the constant-free
 * reference bound, and their quotient. */
struct ConditionWitness {
    Elem center;
    int n = 0;
    MultiIndex nPart, mPart;
    LogNorm value, bound, ratio;
};

struct ConditionEntry {
    LogNorm constant; // exact sup of |value| / bound over the family
    /* sup of certified dropped-tail bounds in the same units as the constant;
     * when slack < constant the reported sup is exact (ultrametrically the
     * dropped terms cannot disturb the attaining value), otherwise the true
     * sup lies in [constant, max(constant, slack)] */
    LogNorm slack;
    bool vacuous = true; // no instances fall inside the declared range
    ConditionWitness witness;
};

struct ConditionReport {
    CheckRange range;
    Rational r;
    // side A: growth of plain integrals over all disks of F, and of twisted
    // integrals over complements of disks
    ConditionEntry disk, complement;
    // side B: per-chart growth -- disks inside pi O_F via chart 1, complements
    // of central disks and inverted disks via chart 2
    ConditionEntry scaledDisk, outerTail, invertedDisk;
    // side B: residuals of the strict-region global integrals at the
    // outermost covered level (plain and twisted)
    ConditionEntry momentResidual, twistedResidual;
};

/* Side-A constants over the declared range.  Disk instances split into three
 * families: disks inside pi O_F (exact chart-1 moments), disks avoiding
 * pi O_F (chart-2 germ pairings through the inversion), and central big disks
 * down to -outerLevel (chart-1 core plus valuation shells).  Complement
 * instances run over centers {0} and pi times the nonzero level-1
 * representatives.  Throws coverage_error when the range needs moments or
 * germ levels beyond the stored tables. */
ConditionReport cond_A_check(const TwoChartDistribution& mu, const InductionDatum& dat,
                             const CheckRange& range);

/* Side-B constants over the same range: chart-1 moment growth, central and
 * noncentral chart-2 moment growth, and the two vanishing-condition residuals
 * measured at the outermost covered level (vacuous when the strict exponent
 * region is empty, e.g. r = 0). */
ConditionReport cond_B_check(const TwoChartDistribution& mu, const InductionDatum& dat,
                             const CheckRange& range);

// point mass at z0 as a two-chart pair: the chart holding z0 carries a Dirac
// table (weighted by the chart-2 character factor when z0 lies off pi O_F)
TwoChartDistribution two_chart_dirac(const InductionDatum& dat, const Elem& z0, int Nmax,
                                     long Mmax);

/* Subtract an exact combination of point masses so that every strict-region
 * partial integral measured by cond_B_check (plain and twisted, over the
 * declared center set) vanishes identically.  The linear system is solved in
 * exact field arithmetic against the checker's own assemblies. */
TwoChartDistribution project_vanishing(const TwoChartDistribution& mu,
                                       const InductionDatum& dat, const CheckRange& range);

struct EquivalenceRecord {
    ConditionReport A, B;
    LogNorm CA, CB;         // best side constants
    LogNorm kappaAB;        // budget for CB <= kappaAB * CA
    LogNorm kappaBA;        // budget for CA <= kappaBA * CB
    LogNorm charSup;        // Gauss sup of the twist character's expansion at 1
    int levelAtOne = 1;     // its analyticity level there
    LogNorm familyNorm;     // sup of C^r upper norms over the strict-region family
    bool familyVacuous = false;
    LogNorm residual;       // max of the two vanishing residual constants
    bool forwardHolds = false;
    bool backwardHolds = false;
};

/* Runs both checkers and compares the side constants against the computed
 * budgets.  Requires an integral datum already in reduced form (the exponent
 * caps satisfy d_sigma + 1 <= r off J); otherwise a precondition_error points
 * to the reduced datum.  The backward budget is a theorem only for
 * distributions whose vanishing residuals are zero (see project_vanishing);
 * the record reports the measured residual alongside both verdicts. */
EquivalenceRecord equivalence_harness(const TwoChartDistribution& mu,
                                      const InductionDatum& dat, const CheckRange& range);

} // namespace padic
