#include "doctest.h"

#include "padic/dist.hpp"
#include "padic/errors.hpp"

#include <random>

using namespace padic;

namespace {

LogNorm qpow(const Rational& t) { return LogNorm::from_exponent(-t); } // value q^{+t}

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

// order-s "spread" table with only the constant moment: each coset splits its
// mass p^{-s} / (1 - p^{-s}) between its first two children, so the sup of
// |value| on level n grows like q^{sn}
MomentTable spread_table(const FieldPtr& K, int Nmax, long s) {
    MomentTable t = make_moment_table(K, Nmax, 0);
    MultiIndex m0(K->f());
    t.slot(0, 0, m0) = K->from_int(1);
    Elem small = K->pi_pow(-s);
    Elem rest = K->from_int(1) - small;
    for (int n = 0; n < Nmax; ++n) {
        std::uint64_t stride = K->coset_count(n);
        for (std::uint64_t idx = 0; idx < stride; ++idx) {
            const Elem& x = t.value(n, idx, m0);
            t.slot(n + 1, idx, m0) = x * small;
            t.slot(n + 1, idx + stride, m0) = x * rest;
        }
    }
    return t;
}

} // namespace

TEST_CASE("point mass pairs to evaluation") {
    auto K = Field::make(5, 1);
    Elem a = K->from_int(13);
    auto mu = dirac(K, a, 3, 4);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto f = random_function(K, rng, 3, 4);
        CHECK(pair(mu, f) == evaluate(f, a));
    }
    CHECK_THROWS_AS((void)dirac(K, K->from_ratio(1, 5), 3, 4), precondition_error);
}

TEST_CASE("pairing is linear and refinement invariant") {
    auto K = Field::make(2, 2);
    auto mu = random_consistent(K, 101, 3, 3, -2);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = random_function(K, rng, 2, 3);
        auto g = random_function(K, rng, 2, 3);
        CHECK(pair(mu, lp_add(f, g)) == pair(mu, f) + pair(mu, g));
        CHECK(pair(mu, refine(f, 3)) == pair(mu, f));
    }
    auto deep = lp_indicator(K, K->zero(), 4);
    CHECK_THROWS_AS((void)pair(mu, deep), coverage_error);
    auto steep = lp_indicator_monomial(K, K->zero(), 1, MultiIndex{4, 0});
    CHECK_THROWS_AS((void)pair(mu, steep), coverage_error);
}

TEST_CASE("signed combination of point masses integrates constants") {
    auto K = Field::make(3, 1);
    auto mu = table_add(table_scale(dirac(K, K->from_int(0), 2, 2), K->from_int(2)),
                        table_scale(dirac(K, K->from_int(1), 2, 2), K->from_int(-1)));
    CHECK(pair(mu, lp_constant(K, K->from_int(1))) == K->from_int(1));
    // the two points sit in different level-1 cosets
    CHECK(pair(mu, lp_indicator(K, K->from_int(0), 1)) == K->from_int(2));
    CHECK(pair(mu, lp_indicator(K, K->from_int(1), 1)) == K->from_int(-1));
    CHECK(consistency_check(mu).empty());
}

TEST_CASE("recentred moments match the pairing against recentred indicators") {
    auto K = Field::make(3, 2);
    auto mu = random_consistent(K, 31, 2, 3, -1);
    std::mt19937_64 rng(37);
    auto mlist = multi_indices_upto(K->f(), 3);
    for (int trial = 0; trial < 30; ++trial) {
        Elem c = K->random_elem(rng, 0, 4, true);
        int k = (int)(rng() % 3);
        const MultiIndex& m = mlist[rng() % mlist.size()];
        CHECK(moment_at(mu, c, k, m) == pair(mu, lp_indicator_monomial(K, c, k, m)));
    }
    CHECK_THROWS_AS((void)moment_at(mu, K->zero(), 3, mlist[0]), coverage_error);
}

TEST_CASE("consistency check flags exactly the corrupted links") {
    auto K = Field::make(5, 1);
    auto mu = random_consistent(K, 7, 3, 2, 0);
    CHECK(consistency_check(mu).empty());
    CHECK(consistency_check(dirac(K, K->from_int(6), 3, 2)).empty());

    // corrupt the zero-centred child at level 1: its own link to level 2 breaks
    // and so does the level-0 parent, in the corrupted exponent only
    MultiIndex m1{1};
    mu.slot(1, 0, m1) = mu.value(1, 0, m1) + K->from_int(1);
    auto bad = consistency_check(mu);
    REQUIRE(bad.size() == 2);
    CHECK(bad[0].n == 0);
    CHECK(bad[0].idx == 0);
    CHECK(bad[0].m == m1);
    CHECK(bad[1].n == 1);
    CHECK(bad[1].idx == 0);
    CHECK(bad[1].m == m1);
    CHECK(bad[0].stored + K->from_int(1) == bad[0].recomputed);
}

TEST_CASE("point mass has unit dual norm with shallow witness") {
    auto K = Field::make(3, 1);
    auto mu = dirac(K, K->from_int(0), 4, 2);
    auto rep = avv_norm(mu, Rational(1), {}, MultiIndex{2});
    CHECK(rep.constant == LogNorm::one());
    CHECK(rep.witnessLevel == 0);
    CHECK(rep.witnessM == MultiIndex(1));
    // away from the support the first moment decays: at order 0 every level ties
    // and the deepest witness is preferred
    auto flat = avv_norm(mu, Rational(0), {}, MultiIndex{2});
    CHECK(flat.constant == LogNorm::one());
    CHECK(flat.witnessLevel == 4);
}

TEST_CASE("zero table reports zero norm and no witness") {
    auto K = Field::make(3, 1);
    auto mu = make_moment_table(K, 2, 1);
    auto rep = avv_norm(mu, Rational(1), {}, MultiIndex{1});
    CHECK(rep.constant == LogNorm::zero());
    CHECK(rep.constant.is_zero());
    CHECK(rep.witnessLevel == -1);
}

TEST_CASE("spread table exhibits exact order-s growth") {
    auto K = Field::make(3, 1);
    long s = 2;
    auto shallow = spread_table(K, 3, s);
    auto deep = spread_table(K, 5, s);
    CHECK(consistency_check(deep).empty());
    Rational r(1);
    auto repS = avv_norm(shallow, r, {}, MultiIndex{0});
    auto repD = avv_norm(deep, r, {}, MultiIndex{0});
    CHECK(repS.constant == qpow(Rational(3) * (Rational(s) - r)));
    CHECK(repD.constant == qpow(Rational(5) * (Rational(s) - r)));
    CHECK(repS.constant < repD.constant);
    CHECK(repD.witnessLevel == 5);
    // at order r = s the same table is bounded by 1
    auto repExact = avv_norm(deep, Rational(s), {}, MultiIndex{0});
    CHECK(repExact.constant == LogNorm::one());
}

TEST_CASE("budget check and degree-coverage precondition") {
    auto K = Field::make(3, 1);
    auto mu = dirac(K, K->from_int(2), 3, 2);
    auto ok = velu_check(mu, Rational(1), {}, MultiIndex{2}, LogNorm::one());
    CHECK(ok.satisfied);
    CHECK(ok.budget == LogNorm::one());
    auto tight = velu_check(spread_table(K, 4, 2), Rational(1, 2), {}, MultiIndex{0},
                            LogNorm::one());
    CHECK_FALSE(tight.satisfied);
    CHECK(tight.constant == qpow(Rational(4) * Rational(3, 2)));
    CHECK(tight.witnessLevel == 4);
    CHECK_THROWS_AS(
        (void)velu_check(mu, Rational(7, 2), {}, MultiIndex{2}, LogNorm::one()),
        precondition_error);
}

TEST_CASE("dual norm is monotone decreasing in the order") {
    auto K = Field::make(2, 2);
    for (std::uint64_t seed : {3u, 5u, 9u}) {
        auto mu = random_consistent(K, seed, 3, 2, -2);
        auto r0 = avv_norm(mu, Rational(1, 2), {}, MultiIndex{2, 2});
        auto r1 = avv_norm(mu, Rational(1), {}, MultiIndex{2, 2});
        auto r2 = avv_norm(mu, Rational(2), {}, MultiIndex{2, 2});
        CHECK(r1.constant <= r0.constant);
        CHECK(r2.constant <= r1.constant);
    }
}

TEST_CASE("dual norm is homogeneous and ultrametric") {
    auto K = Field::make(5, 1);
    Rational r(3, 2);
    MultiIndex d{3};
    auto a = random_consistent(K, 41, 3, 3, -1);
    auto b = random_consistent(K, 43, 3, 3, -1);
    Elem c = K->from_int(50); // |c| = q^{-2}
    auto scaled = avv_norm(table_scale(a, c), r, {}, d);
    auto base = avv_norm(a, r, {}, d);
    CHECK(scaled.constant == base.constant * LogNorm::from_exponent(Rational(2)));
    auto sum = avv_norm(table_add(a, b), r, {}, d);
    CHECK(sum.constant <= max(base.constant, avv_norm(b, r, {}, d).constant));
}

TEST_CASE("admissible exponents respect the cap outside J") {
    auto K = Field::make(3, 2);
    auto mu = dirac(K, K->from_int(1), 2, 2);
    // cap (0,0) off J = {1}: only m = (0, j) nodes are admissible
    auto rep = avv_norm(mu, Rational(1), {1}, MultiIndex(2));
    CHECK(rep.witnessM.e[0] == 0);
    // with no J and zero cap only the constant moment counts, value 1 at level 0
    auto repStrict = avv_norm(mu, Rational(1), {}, MultiIndex(2));
    CHECK(repStrict.constant == LogNorm::one());
    CHECK(repStrict.witnessM == MultiIndex(2));
}

TEST_CASE("table size guard rejects oversized requests") {
    auto K = Field::make(2, 1);
    CHECK_THROWS_AS((void)make_moment_table(K, 26, 0), precondition_error);
    CHECK_THROWS_AS((void)make_moment_table(K, -1, 0), precondition_error);
    CHECK_THROWS_AS((void)make_moment_table(K, 1, -1), precondition_error);
    auto mu = make_moment_table(K, 1, 1);
    CHECK_THROWS_AS((void)mu.mindex(MultiIndex{2}), precondition_error);
    CHECK_THROWS_AS((void)mu.value(2, 0, MultiIndex{0}), precondition_error);
}

TEST_CASE("translation action at the identity is the identity") {
    auto K = Field::make(3, 1);
    auto chi1 = unramified_character(K, K->pi_pow(-1));
    auto chi2 = unramified_character(K, K->pi_pow(1));
    auto dat = make_datum(K, {}, MultiIndex{0}, chi1, chi2);
    auto mu = random_consistent(K, 71, 3, 2, -1);
    auto out = translate_scale_action(mu, 0, K->zero(), dat);
    for (int n = 0; n <= mu.Nmax; ++n)
        for (std::uint64_t idx = 0; idx < mu.v[(size_t)n].size(); ++idx)
            for (std::size_t mi = 0; mi < mu.mlist.size(); ++mi)
                CHECK(out.v[(size_t)n][idx][mi] == mu.v[(size_t)n][idx][mi]);
}

TEST_CASE("translation action maps point masses to weighted point masses") {
    auto K = Field::make(3, 1);
    auto chi1 = unramified_character(K, K->pi_pow(-1));
    auto chi2 = unramified_character(K, K->pi_pow(1));
    auto dat = make_datum(K, {}, MultiIndex{1}, chi1, chi2);
    int n = 2;
    Elem a = K->from_int(4);
    Elem b = K->from_int(7);
    Elem c = a + K->pi_pow(n) * b; // the pulled-back support point
    auto out = translate_scale_action(dirac(K, c, 4, 2), n, a, dat);
    Elem weight = chi_eval(chi2, K->pi_pow(n)) * K->monomial(K->pi_pow(n), MultiIndex{1});
    auto expect = table_scale(dirac(K, b, 2, 2), weight);
    for (int k = 0; k <= out.Nmax; ++k)
        for (std::uint64_t idx = 0; idx < out.v[(size_t)k].size(); ++idx)
            for (std::size_t mi = 0; mi < out.mlist.size(); ++mi)
                CHECK(out.v[(size_t)k][idx][mi] == expect.v[(size_t)k][idx][mi]);
}

TEST_CASE("translation actions compose through the affine group law") {
    auto K = Field::make(3, 1);
    auto chi1 = unramified_character(K, K->pi_pow(-1));
    auto chi2 = char_mul(unramified_character(K, K->from_int(2)),
                         algebraic_character(K, MultiIndex{1}));
    auto dat = make_datum(K, {}, MultiIndex{2}, chi1, chi2);
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 6; ++trial) {
        auto mu = random_consistent(K, 900 + (std::uint64_t)trial, 4, 2, -1);
        int n1 = (int)(rng() % 2), n2 = (int)(rng() % 2);
        Elem a1 = K->random_elem(rng, 0, 3, true);
        Elem a2 = K->random_elem(rng, 0, 3, true);
        auto two = translate_scale_action(translate_scale_action(mu, n1, a1, dat), n2,
                                          a2, dat);
        auto one = translate_scale_action(mu, n1 + n2, a1 + K->pi_pow(n1) * a2, dat);
        REQUIRE(two.Nmax == one.Nmax);
        for (int k = 0; k <= two.Nmax; ++k)
            for (std::uint64_t idx = 0; idx < two.v[(size_t)k].size(); ++idx)
                for (std::size_t mi = 0; mi < two.mlist.size(); ++mi)
                    CHECK(two.v[(size_t)k][idx][mi] == one.v[(size_t)k][idx][mi]);
    }
}

TEST_CASE("translation action rejects uncovered windows") {
    auto K = Field::make(3, 1);
    auto dat = make_datum(K, {}, MultiIndex{0}, trivial_character(K),
                          trivial_character(K));
    auto mu = random_consistent(K, 5, 2, 1, 0);
    CHECK_THROWS_AS((void)translate_scale_action(mu, 3, K->zero(), dat), coverage_error);
    CHECK_THROWS_AS((void)translate_scale_action(mu, -1, K->zero(), dat),
                    precondition_error);
    CHECK_THROWS_AS((void)translate_scale_action(mu, 1, K->from_ratio(1, 3), dat),
                    coverage_error);
}
