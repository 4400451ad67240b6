#pragma once

/* Distributions on O_F stored as finite moment tables: for every coset
 * D(a,n) with n <= Nmax and every exponent |m| <= Mmax the value
 * integral_{D(a,n)} (z-a)^m mu(z), centered at the canonical representative.
 * Tables are held dense and checked against the binomial refinement identity.
 * The order-r growth criterion and its dual norm are exact sups over the
 * stored range, reported with the attaining witness.
 */

#include "padic/field.hpp"
#include "padic/funcspace.hpp"
#include "padic/induction.hpp"

#include <cstdint>
#include <vector>

namespace padic {

struct MomentTable {
    FieldPtr K;
    int Nmax = 0;
    long Mmax = 0;
    std::vector<MultiIndex> mlist;                 // all |m| <= Mmax, graded-lex
    std::vector<std::vector<std::vector<Elem>>> v; // [n][cosetIdx][mIdx]

    std::size_t mindex(const MultiIndex& m) const;
    const Elem& value(int n, std::uint64_t idx, const MultiIndex& m) const;
    Elem& slot(int n, std::uint64_t idx, const MultiIndex& m);
};

MomentTable make_moment_table(const FieldPtr& K, int Nmax, long Mmax);
// point mass at a: value(b,n,m) = (a - b)^m when a lies in D(b,n), else 0
MomentTable dirac(const FieldPtr& K, const Elem& a, int Nmax, long Mmax);
// deepest level sampled with valuation >= valuationFloor, shallower levels
// rolled up through the refinement identity; deterministic per seed
MomentTable random_consistent(const FieldPtr& K, std::uint64_t seed, int Nmax, long Mmax,
                              long valuationFloor);
MomentTable table_add(const MomentTable& a, const MomentTable& b);
MomentTable table_scale(const MomentTable& a, const Elem& c);

struct ConsistencyViolation {
    int n = 0;
    std::uint64_t idx = 0;
    MultiIndex m;
    Elem stored, recomputed;
};
std::vector<ConsistencyViolation> consistency_check(const MomentTable& mu);

// integral of f against mu; requires f.level <= Nmax and degrees <= Mmax
Elem pair(const MomentTable& mu, const LocallyPolyFunction& f);
// moment on D(center, level) recentered away from the canonical representative
Elem moment_at(const MomentTable& mu, const Elem& center, int level, const MultiIndex& m);

struct AvvReport {
    LogNorm constant;      // sup |value| q^{-n(r - |m|)} over the admissible range
    int witnessLevel = -1; // -1 when the table is identically zero on the range
    std::uint64_t witnessCoset = 0;
    MultiIndex witnessM;
    bool satisfied = true;
    LogNorm budget;
    Rational r;
};

// exponents m restricted by m_sigma <= d_sigma outside J; ties prefer deeper
// levels so adversarial growth surfaces at the deepest witness
AvvReport avv_norm(const MomentTable& mu, const Rational& r, const std::vector<int>& J,
                   const MultiIndex& d);
// satisfied iff every stored admissible inequality holds within the budget;
// requires Mmax >= floor(r) so the hypothesis family is representable
AvvReport velu_check(const MomentTable& mu, const Rational& r, const std::vector<int>& J,
                     const MultiIndex& d, const LogNorm& budget);

/* Dual action of [[pi^n, a],[0,1]]: the new table's moment on D(b,k) equals
 * chi2(pi^n) pi^{n(d-m)} times mu's recentered moment on D(a + pi^n b, k+n).
 * The result covers levels up to Nmax - n. */
MomentTable translate_scale_action(const MomentTable& mu, int n, const Elem& a,
                                   const InductionDatum& datum);

} // namespace padic
