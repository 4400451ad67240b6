#include "doctest.h"

#include "padic/criteria.hpp"
#include "padic/errors.hpp"

#include <random>
#include <set>
#include <tuple>

using namespace padic;

namespace {

LogNorm qpow(const Rational& t) { return LogNorm::from_exponent(-t); } // value q^{+t}

bool lognorm_leq(const LogNorm& a, const LogNorm& b) { return !(b < a); }

// d = 0 and chi2/chi1 = unr(p^2): integral with r = 1
InductionDatum order_one_datum(const FieldPtr& K) {
    return make_datum(K, {}, MultiIndex(1), unramified_character(K, K->from_ratio(1, 3)),
                      unramified_character(K, K->from_int(3)));
}

// d = (1) and chi2/chi1 = unr(p^3): integral with r = 2, cap d + 1 <= r tight
InductionDatum rank_two_datum(const FieldPtr& K) {
    return make_datum(K, {}, MultiIndex{1}, unramified_character(K, K->from_ratio(1, 9)),
                      unramified_character(K, K->from_int(3)));
}

// everything analytic and both characters trivial: r = 0
InductionDatum flat_datum(const FieldPtr& K) {
    return make_datum(K, {0}, MultiIndex(1), unramified_character(K, K->from_int(1)),
                      unramified_character(K, K->from_int(1)));
}

// cap d = (2) with r = 2 fails d + 1 <= r, so the datum is not reduced
InductionDatum capped_datum(const FieldPtr& K) {
    return make_datum(K, {}, MultiIndex{2}, unramified_character(K, K->from_ratio(1, 9)),
                      unramified_character(K, K->from_int(1)));
}

// chi2/chi1 = unr(p^2) sigma^{-1}: every unit-region germ carries a tail
InductionDatum germy_datum(const FieldPtr& K) {
    Character chi1 = char_mul(unramified_character(K, K->from_ratio(1, 3)),
                              algebraic_character(K, MultiIndex{1}));
    return make_datum(K, {}, MultiIndex(1), chi1,
                      unramified_character(K, K->from_int(3)));
}

// non-integral central character: the harness must refuse it
InductionDatum skew_datum(const FieldPtr& K) {
    return make_datum(K, {}, MultiIndex(1), unramified_character(K, K->from_ratio(1, 3)),
                      unramified_character(K, K->from_ratio(1, 3)));
}

TwoChartDistribution zero_pair(const FieldPtr& K, int N, long M) {
    return {make_moment_table(K, N, M), make_moment_table(K, N, M)};
}

TwoChartDistribution point_difference(const InductionDatum& dat, const Elem& z0,
                                      const Elem& z1, int N, long M) {
    TwoChartDistribution a = two_chart_dirac(dat, z0, N, M);
    TwoChartDistribution b = two_chart_dirac(dat, z1, N, M);
    Elem minusOne = dat.K->from_int(-1);
    return {table_add(a.mu1, table_scale(b.mu1, minusOne)),
            table_add(a.mu2, table_scale(b.mu2, minusOne))};
}

TwoChartDistribution random_pair(const FieldPtr& K, std::uint64_t seed, int N, long M) {
    return {random_consistent(K, seed, N, M, 0), random_consistent(K, seed * 7 + 13, N, M, 0)};
}

LocallyPolyFunction random_function(const FieldPtr& K, std::mt19937_64& rng, int level,
                                    long maxDeg) {
    LocallyPolyFunction f = lp_zero(K, level);
    std::uniform_int_distribution<std::uint64_t> pick(0, K->coset_count(level) - 1);
    std::uniform_int_distribution<int> npieces(1, 3);
    auto mlist = multi_indices_upto(K->f(), maxDeg);
    std::uniform_int_distribution<std::size_t> mpick(0, mlist.size() - 1);
    int n = npieces(rng);
    for (int i = 0; i < n; ++i) {
        std::uint64_t idx = pick(rng);
        LocalPolynomial p;
        p.center = K->coset_rep(idx, level);
        int nterms = npieces(rng);
        for (int t = 0; t < nterms; ++t) {
            Elem c = K->random_elem(rng, -2, 3, true);
            if (c.is_zero()) continue;
            auto it = p.coeffs.find(mlist[mpick(rng)]);
            if (it == p.coeffs.end())
                p.coeffs.emplace(mlist[mpick(rng)], c);
            else
                it->second = it->second + c;
        }
        if (!p.coeffs.empty()) f.pieces[idx] = std::move(p);
    }
    return f;
}

} // namespace

TEST_CASE("zero distributions report zero constants and balanced budgets") {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = order_one_datum(K);
    CheckRange range{4, 3, 2, 6};
    TwoChartDistribution mu = zero_pair(K, 5, 3);

    ConditionReport A = cond_A_check(mu, dat, range);
    CHECK(A.r == Rational(1));
    CHECK(A.range.level == 4);
    CHECK_FALSE(A.disk.vacuous);
    CHECK(A.disk.constant.is_zero());
    CHECK(A.disk.slack.is_zero());
    CHECK_FALSE(A.complement.vacuous);
    CHECK(A.complement.constant.is_zero());

    ConditionReport B = cond_B_check(mu, dat, range);
    CHECK(B.scaledDisk.constant.is_zero());
    CHECK(B.outerTail.constant.is_zero());
    CHECK(B.invertedDisk.constant.is_zero());
    CHECK_FALSE(B.momentResidual.vacuous);
    CHECK(B.momentResidual.constant.is_zero());
    CHECK(B.twistedResidual.constant.is_zero());

    EquivalenceRecord rec = equivalence_harness(mu, dat, range);
    CHECK(rec.CA.is_zero());
    CHECK(rec.CB.is_zero());
    CHECK(rec.residual.is_zero());
    CHECK(rec.forwardHolds);
    CHECK(rec.backwardHolds);
}

TEST_CASE("a point mass at the origin attains constant one for a flat datum") {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = flat_datum(K);
    CheckRange range{4, 3, 2, 6};
    TwoChartDistribution mu = two_chart_dirac(dat, K->zero(), 5, 3);

    ConditionReport B = cond_B_check(mu, dat, range);
    CHECK(B.r == Rational(0));
    CHECK(B.scaledDisk.constant == LogNorm::one());
    CHECK(B.scaledDisk.witness.ratio == LogNorm::one());
    CHECK(B.outerTail.constant.is_zero());
    CHECK(B.invertedDisk.constant.is_zero());
    // r = 0: the strict exponent region is empty
    CHECK(B.momentResidual.vacuous);
    CHECK(B.twistedResidual.vacuous);

    ConditionReport A = cond_A_check(mu, dat, range);
    CHECK(A.disk.constant == LogNorm::one());
    CHECK(A.complement.constant == LogNorm::one());

    EquivalenceRecord rec = equivalence_harness(mu, dat, range);
    CHECK(rec.CA == LogNorm::one());
    CHECK(rec.CB == LogNorm::one());
    CHECK(rec.kappaAB == LogNorm::one());
    CHECK(rec.kappaBA == LogNorm::one());
    CHECK(rec.familyVacuous);
    CHECK(rec.residual.is_zero());
    CHECK(rec.forwardHolds);
    CHECK(rec.backwardHolds);

    // nothing to project away either
    TwoChartDistribution same = project_vanishing(mu, dat, range);
    CHECK(same.mu1.value(0, 0, MultiIndex(1)) == mu.mu1.value(0, 0, MultiIndex(1)));
}

TEST_CASE("point-mass pairs integrate functions to their value at the point") {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = order_one_datum(K);
    std::mt19937_64 rng(1905);
    std::vector<Elem> pts{K->zero(),
                          K->from_int(1),
                          K->from_int(2),
                          K->from_int(3),
                          K->from_int(4),
                          K->from_int(6),
                          K->pi_pow(2),
                          K->pi_pow(-1),
                          K->from_int(2) * K->pi_pow(-1),
                          K->from_int(5) * K->pi_pow(-2)};
    for (const Elem& z0 : pts) {
        TwoChartDistribution mu = two_chart_dirac(dat, z0, 4, 3);
        for (int trial = 0; trial < 3; ++trial) {
            TwoChartFunction f{random_function(K, rng, 3, 3), random_function(K, rng, 3, 3)};
            CHECK(pair_two_chart(mu.mu1, mu.mu2, f) == two_chart_eval(f, dat, z0));
        }
    }
}

TEST_CASE("mass-balanced unit pairs satisfy both inequality budgets") {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = order_one_datum(K);
    CheckRange range{4, 3, 2, 6};
    TwoChartDistribution mu = point_difference(dat, K->from_int(1), K->from_int(2), 5, 3);

    ConditionReport A = cond_A_check(mu, dat, range);
    CHECK(lognorm_leq(A.disk.constant, LogNorm::one()));
    CHECK(A.complement.constant.is_zero());

    ConditionReport B = cond_B_check(mu, dat, range);
    CHECK(B.momentResidual.constant.is_zero());
    CHECK(B.twistedResidual.constant.is_zero());

    EquivalenceRecord rec = equivalence_harness(mu, dat, range);
    CHECK(rec.residual.is_zero());
    CHECK(rec.forwardHolds);
    CHECK(rec.backwardHolds);
}

TEST_CASE("separated deep point masses attain the inverted-disk growth exactly") {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = order_one_datum(K);
    CheckRange range{4, 3, 2, 6};
    // both points sit at valuation -1 and are separated at radius 1
    TwoChartDistribution mu = point_difference(dat, K->pi_pow(-1),
                                               K->from_int(2) * K->pi_pow(-1), 5, 3);

    ConditionReport A = cond_A_check(mu, dat, range);
    CHECK(A.disk.constant == LogNorm::one());
    // unramified twist: disk pairings have no dropped germ terms at all
    CHECK(A.disk.slack.is_zero());

    ConditionReport B = cond_B_check(mu, dat, range);
    CHECK(B.invertedDisk.constant == LogNorm::one());
    CHECK(B.momentResidual.constant.is_zero());
    CHECK(B.twistedResidual.constant.is_zero());

    EquivalenceRecord rec = equivalence_harness(mu, dat, range);
    CHECK(rec.forwardHolds);
    CHECK(rec.backwardHolds);
}

TEST_CASE("unbalanced point masses leak into the complement at the exhaustion level") {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = order_one_datum(K);
    TwoChartDistribution mu = two_chart_dirac(dat, K->from_int(1), 6, 3);

    ConditionReport shallow = cond_A_check(mu, dat, CheckRange{3, 3, 2, 6});
    ConditionReport deep = cond_A_check(mu, dat, CheckRange{3, 3, 4, 6});
    CHECK(shallow.complement.constant == qpow(Rational(2)));
    CHECK(deep.complement.constant == qpow(Rational(4)));
    CHECK(deep.complement.witness.center.is_zero());
    CHECK(deep.complement.witness.n == 4);
    CHECK(deep.complement.constant / shallow.complement.constant == qpow(Rational(2)));

    ConditionReport B = cond_B_check(mu, dat, CheckRange{3, 3, 4, 6});
    CHECK(B.momentResidual.constant == qpow(Rational(4)));
    CHECK(B.twistedResidual.constant == qpow(Rational(4)));

    // nonzero residuals void the backward budget but never the forward one
    EquivalenceRecord rec = equivalence_harness(mu, dat, CheckRange{3, 3, 4, 6});
    CHECK(rec.residual == qpow(Rational(4)));
    CHECK(rec.forwardHolds);
    CHECK_FALSE(rec.backwardHolds);
}

TEST_CASE("random tables satisfy the forward budget and project to satisfy both") {
    FieldPtr K = Field::make(3, 1);
    CheckRange range{4, 3, 2, 6};
    for (const InductionDatum& dat : {order_one_datum(K), rank_two_datum(K)}) {
        for (std::uint64_t seed : {11u, 23u, 58u}) {
            TwoChartDistribution mu = random_pair(K, seed, 5, 3);

            EquivalenceRecord raw = equivalence_harness(mu, dat, range);
            CHECK(raw.forwardHolds);

            TwoChartDistribution proj = project_vanishing(mu, dat, range);
            ConditionReport B = cond_B_check(proj, dat, range);
            CHECK(B.momentResidual.constant.is_zero());
            CHECK(B.twistedResidual.constant.is_zero());

            EquivalenceRecord rec = equivalence_harness(proj, dat, range);
            CHECK(rec.residual.is_zero());
            CHECK(rec.forwardHolds);
            CHECK(rec.backwardHolds);
        }
    }
}

TEST_CASE("scaling a distribution scales every reported constant") {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = order_one_datum(K);
    CheckRange range{3, 2, 1, 6};
    TwoChartDistribution mu = random_pair(K, 5, 4, 2);
    TwoChartDistribution sc{table_scale(mu.mu1, K->from_int(3)),
                            table_scale(mu.mu2, K->from_int(3))};
    LogNorm drop = LogNorm::from_exponent(Rational(1)); // |p| = q^{-1}

    ConditionReport A = cond_A_check(mu, dat, range), As = cond_A_check(sc, dat, range);
    CHECK(As.disk.constant == A.disk.constant * drop);
    CHECK(As.complement.constant == A.complement.constant * drop);

    ConditionReport B = cond_B_check(mu, dat, range), Bs = cond_B_check(sc, dat, range);
    CHECK(Bs.scaledDisk.constant == B.scaledDisk.constant * drop);
    CHECK(Bs.outerTail.constant == B.outerTail.constant * drop);
    CHECK(Bs.invertedDisk.constant == B.invertedDisk.constant * drop);
    CHECK(Bs.momentResidual.constant == B.momentResidual.constant * drop);
    CHECK(Bs.twistedResidual.constant == B.twistedResidual.constant * drop);
}

TEST_CASE("inverted-disk addresses enumerate the disks avoiding the small chart") {
    FieldPtr K = Field::make(3, 1, 16);
    const int lev = 4;
    using Key = std::tuple<int, int, std::uint64_t>; // (radius level m, center valuation t, unit class)

    std::set<Key> fromAddresses;
    for (int L = 1; L <= lev; ++L)
        for (std::uint64_t idx = 1; idx < K->coset_count(L); ++idx) {
            Elem a = K->coset_rep(idx, L);
            if (a.is_zero()) continue;
            int t = (int)a.w();
            int m = L - 2 * t;
            CHECK(m + t >= 1); // the disk stays off the small chart
            bool fresh = fromAddresses
                             .insert({m, t, K->coset_index_of(a * K->pi_pow(-t), L - t)})
                             .second;
            CHECK(fresh);
        }

    std::set<Key> direct;
    for (int t = 0; t + 1 <= lev; ++t)
        for (int m = 1 - t; m <= lev - 2 * t; ++m)
            for (std::uint64_t j : K->unit_rep_indices(m + t)) direct.insert({m, t, j});

    CHECK(fromAddresses == direct);
}

TEST_CASE("germ tails are certified when the twist character is ramified") {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = germy_datum(K);
    CheckRange range{3, 3, 1, 6};
    TwoChartDistribution mu = random_pair(K, 17, 4, 3);

    ConditionReport A = cond_A_check(mu, dat, range);
    CHECK(A.r == Rational(0));
    CHECK_FALSE(A.disk.vacuous);
    CHECK_FALSE(A.disk.slack.is_zero());

    ConditionReport B = cond_B_check(mu, dat, range);
    CHECK(B.momentResidual.vacuous);

    TwoChartDistribution same = project_vanishing(mu, dat, range);
    CHECK(same.mu2.value(1, 1, MultiIndex(1)) == mu.mu2.value(1, 1, MultiIndex(1)));
}

TEST_CASE("coverage and precondition failures name their causes") {
    FieldPtr K = Field::make(3, 1);
    InductionDatum dat = order_one_datum(K);
    TwoChartDistribution mu = zero_pair(K, 4, 2);

    CHECK_THROWS_AS(cond_A_check(mu, dat, CheckRange{6, 2, 1, 6}), coverage_error);
    CHECK_THROWS_AS(cond_A_check(mu, dat, CheckRange{3, 3, 1, 6}), coverage_error);
    CHECK_THROWS_AS(cond_B_check(mu, dat, CheckRange{3, 2, 5, 6}), coverage_error);
    CHECK_THROWS_AS(cond_A_check(mu, dat, CheckRange{0, 2, 1, 6}), precondition_error);

    // not reduced: the cap d + 1 <= r fails off J
    CHECK_THROWS_AS(equivalence_harness(mu, capped_datum(K), CheckRange{3, 2, 1, 6}),
                    precondition_error);
    // non-integral central character
    CHECK_THROWS_AS(equivalence_harness(mu, skew_datum(K), CheckRange{3, 2, 1, 6}),
                    precondition_error);
}
