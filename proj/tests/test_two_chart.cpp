#include "doctest.h"

#include "padic/errors.hpp"
#include "padic/two_chart.hpp"

#include <random>

using namespace padic;

namespace {

LogNorm qpow(const Rational& t) { return LogNorm::from_exponent(-t); } // value q^{+t}

bool lognorm_leq(const LogNorm& a, const LogNorm& b) { return !(b < a); }

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

/* Datum on Q_3 with cap d = (2): sources of degree <= 2 meet only character
 * germs with nonnegative algebraic exponent, so the action engine is exact. */
InductionDatum capped_datum(const FieldPtr& K) {
    return make_datum(K, {}, MultiIndex{2}, unramified_character(K, K->from_ratio(1, 9)),
                      unramified_character(K, K->from_int(1)));
}

// d = 0 and chi2/chi1 = unr(p^2): integral with r = 1
InductionDatum order_one_datum(const FieldPtr& K) {
    return make_datum(K, {}, MultiIndex(1), unramified_character(K, K->from_ratio(1, 3)),
                      unramified_character(K, K->from_int(3)));
}

// chi2/chi1 = unr(p^2) sigma^{-1}: every unit-region germ carries a tail
InductionDatum germy_datum(const FieldPtr& K) {
    Character chi1 = char_mul(unramified_character(K, K->from_ratio(1, 3)),
                              algebraic_character(K, MultiIndex{1}));
    return make_datum(K, {}, MultiIndex(1), chi1,
                      unramified_character(K, K->from_int(3)));
}

// val(chi2(p)) + |d| = -1, so the unit lattice collapses
InductionDatum collapse_datum(const FieldPtr& K) {
    return make_datum(K, {}, MultiIndex(1), unramified_character(K, K->from_ratio(1, 3)),
                      unramified_character(K, K->from_ratio(1, 3)));
}

TwoChartFunction random_two_chart(const FieldPtr& K, std::mt19937_64& rng, int level,
                                  long maxDeg) {
    return {random_function(K, rng, level, maxDeg),
            random_function(K, rng, level, maxDeg)};
}

Mat2 random_matrix(const FieldPtr& K, std::mt19937_64& rng) {
    while (true) {
        Mat2 g{K->random_elem(rng, -1, 2, true), K->random_elem(rng, -1, 2, true),
               K->random_elem(rng, -1, 2, true), K->random_elem(rng, -1, 2, true)};
        if (!mat_det(g).is_zero()) return g;
    }
}

bool mat_eq(const Mat2& a, const Mat2& b) {
    return a.a == b.a && a.b == b.b && a.c == b.c && a.d == b.d;
}

bool lp_equal(const LocallyPolyFunction& a, const LocallyPolyFunction& b) {
    if (a.level != b.level || a.pieces.size() != b.pieces.size()) return false;
    for (const auto& [idx, p] : a.pieces) {
        auto it = b.pieces.find(idx);
        if (it == b.pieces.end()) return false;
        if (!(p.center == it->second.center)) return false;
        if (p.coeffs.size() != it->second.coeffs.size()) return false;
        for (const auto& [m, c] : p.coeffs) {
            auto jt = it->second.coeffs.find(m);
            if (jt == it->second.coeffs.end() || !(c == jt->second)) return false;
        }
    }
    return true;
}

std::vector<Elem> sample_points(const FieldPtr& K, std::mt19937_64& rng, int extra) {
    std::vector<Elem> pts{K->zero(),      K->from_int(1),  K->from_int(K->p()),
                          K->pi_pow(-1),  K->from_int(2),  K->from_int(1 + K->p()),
                          K->pi_pow(2) * K->from_int(2)};
    for (int i = 0; i < extra; ++i) pts.push_back(K->random_elem(rng, -2, 3, false));
    return pts;
}

// chi1(det g) X(a - cz) (a - cz)^d f((dz - b)/(a - cz)); undefined at a = cz
Elem direct_image(const Mat2& g, const TwoChartFunction& f, const InductionDatum& dat,
                  const Elem& z) {
    const FieldPtr& K = dat.K;
    Character X = char_mul(dat.chi2, char_inv(dat.chi1));
    Elem A = g.a - g.c * z;
    Elem B = g.d * z - g.b;
    return chi_eval(dat.chi1, mat_det(g)) * chi_eval(X, A) * K->monomial(A, dat.d) *
           two_chart_eval(f, dat, B * A.inv());
}

} // namespace

TEST_CASE("matrix products, determinants, and Bruhat factors") {
    auto K = Field::make(3, 1);
    std::mt19937_64 rng(401);

    Mat2 w = mat_w(K);
    Mat2 w2 = mat_mul(w, w);
    CHECK(mat_eq(w2, mat_central(K, K->pi_pow(1))));

    for (int trial = 0; trial < 10; ++trial) {
        Mat2 g = random_matrix(K, rng);
        Mat2 h = random_matrix(K, rng);
        CHECK(mat_det(mat_mul(g, h)) == mat_det(g) * mat_det(h));

        auto factors = decompose_bruhat(g);
        Mat2 prod = mat_identity(K);
        for (const auto& fac : factors) prod = mat_mul(prod, fac);
        CHECK(mat_eq(prod, g));

        // upper-triangular case takes the short factorisation
        Mat2 u{g.a, g.b, K->zero(), g.d};
        if (!mat_det(u).is_zero()) {
            auto uf = decompose_bruhat(u);
            CHECK(uf.size() == 3);
            Mat2 uprod = mat_identity(K);
            for (const auto& fac : uf) uprod = mat_mul(uprod, fac);
            CHECK(mat_eq(uprod, u));
        }
    }

    Mat2 sing{K->from_int(2), K->from_int(4), K->from_int(1), K->from_int(2)};
    CHECK_THROWS_AS((void)decompose_bruhat(sing), precondition_error);
}

TEST_CASE("identity and central elements act exactly") {
    auto K = Field::make(3, 1);
    InductionDatum dat = capped_datum(K);
    std::mt19937_64 rng(402);

    for (int trial = 0; trial < 5; ++trial) {
        TwoChartFunction f = random_two_chart(K, rng, 2, 2);
        ActResult id = act(mat_identity(K), f, dat);
        CHECK(id.exact);
        CHECK(id.err1.is_zero());
        CHECK(id.err2.is_zero());
        CHECK(lp_equal(id.f.f1, f.f1));
        CHECK(lp_equal(id.f.f2, f.f2));

        Elem lam = K->random_elem(rng, -2, 2, false);
        ActResult ce = act(mat_central(K, lam), f, dat);
        CHECK(ce.exact);
        Elem sc = chi_eval(dat.chi1, lam) * chi_eval(dat.chi2, lam) *
                  K->monomial(lam, dat.d);
        for (const Elem& z : sample_points(K, rng, 4))
            CHECK(two_chart_eval(ce.f, dat, z) == sc * two_chart_eval(f, dat, z));
    }
}

TEST_CASE("the action agrees with direct Mobius substitution pointwise") {
    auto K = Field::make(3, 1);
    InductionDatum dat = capped_datum(K);
    std::mt19937_64 rng(403);

    int done = 0;
    for (int trial = 0; trial < 12; ++trial) {
        Mat2 g = random_matrix(K, rng);
        TwoChartFunction f = random_two_chart(K, rng, 2, 2);
        ActResult res;
        try {
            res = act(g, f, dat);
        } catch (const coverage_error&) {
            continue;
        }
        CHECK(res.exact);
        CHECK(res.err1.is_zero());
        CHECK(res.err2.is_zero());
        for (const Elem& z : sample_points(K, rng, 6)) {
            if ((g.a - g.c * z).is_zero()) continue;
            CHECK(two_chart_eval(res.f, dat, z) == direct_image(g, f, dat, z));
        }
        ++done;
    }
    CHECK(done >= 9);
}

TEST_CASE("composition follows the matrix product") {
    auto K = Field::make(3, 1);
    InductionDatum dat = capped_datum(K);
    std::mt19937_64 rng(404);

    int done = 0;
    for (int trial = 0; trial < 10; ++trial) {
        Mat2 g1 = random_matrix(K, rng);
        Mat2 g2 = random_matrix(K, rng);
        TwoChartFunction f = random_two_chart(K, rng, 1, 2);
        TwoChartFunction lhs, rhs;
        try {
            lhs = act(g2, act(g1, f, dat).f, dat).f;
            rhs = act(mat_mul(g2, g1), f, dat).f;
        } catch (const coverage_error&) {
            continue;
        }
        for (const Elem& z : sample_points(K, rng, 6))
            CHECK(two_chart_eval(lhs, dat, z) == two_chart_eval(rhs, dat, z));
        ++done;
    }
    CHECK(done >= 7);
}

TEST_CASE("stepwise Bruhat application matches the single pass") {
    auto K = Field::make(3, 1);
    InductionDatum dat = capped_datum(K);
    std::mt19937_64 rng(405);

    int done = 0;
    for (int trial = 0; trial < 8; ++trial) {
        Mat2 g = random_matrix(K, rng);
        if (g.c.is_zero()) g.c = K->from_int(1 + (int)(trial % 2));
        if (mat_det(g).is_zero()) continue;
        TwoChartFunction f = random_two_chart(K, rng, 1, 2);
        TwoChartFunction whole, steps;
        try {
            whole = act(g, f, dat).f;
            auto factors = decompose_bruhat(g);
            steps = f;
            for (auto it = factors.rbegin(); it != factors.rend(); ++it)
                steps = act(*it, steps, dat).f;
        } catch (const coverage_error&) {
            continue;
        }
        for (const Elem& z : sample_points(K, rng, 6))
            CHECK(two_chart_eval(whole, dat, z) == two_chart_eval(steps, dat, z));
        ++done;
    }
    CHECK(done >= 5);
}

TEST_CASE("the unit flip sends lattice monomials to twisted complements") {
    auto K = Field::make(3, 1);
    InductionDatum dat = capped_datum(K); // d = (2)
    std::mt19937_64 rng(406);
    Character X = char_mul(dat.chi2, char_inv(dat.chi1));
    Mat2 flip{K->zero(), K->from_int(1), K->from_int(1), K->zero()};

    auto gens = lattice_generators(dat, 0, 1, 8);
    REQUIRE(gens.size() == 6); // n in {0,1,2}, two families each
    for (const auto& gen : gens) {
        if (gen.family != 1) continue;
        ActResult res = act(flip, gen.f, dat);
        CHECK(res.exact);
        MultiIndex k = gen.n.plus(gen.m);
        Elem head = chi_eval(dat.chi2, K->from_int(-1)) *
                    K->monomial(K->from_int(-1), dat.d);
        for (const Elem& z : sample_points(K, rng, 5)) {
            Elem lhs = two_chart_eval(res.f, dat, z);
            if (!z.is_zero() && z.w() <= 0) {
                Elem rhs = head * chi_eval(X, z) * K->monomial(z, dat.d.minus(k));
                CHECK(lhs == rhs);
            } else {
                CHECK(lhs.is_zero());
            }
        }
    }
}

TEST_CASE("lattice generators carry the expected charts and counts") {
    auto K = Field::make(3, 1);
    InductionDatum dat = order_one_datum(K);
    Character X = char_mul(dat.chi2, char_inv(dat.chi1));

    auto gens = lattice_generators(dat, 0, 1, 8);
    REQUIRE(gens.size() == 2);
    CHECK(gens[0].family == 1);
    CHECK(gens[1].family == 2);
    CHECK(gens[0].err.is_zero());
    CHECK(gens[1].err.is_zero());

    // family one is the indicator of O_F
    for (long v : {0L, 1L, 2L, 3L, 4L, 12L})
        CHECK(two_chart_eval(gens[0].f, dat, K->from_int(v)) == K->from_int(1));
    Elem deep = K->pi_pow(-1) * K->from_int(2);
    CHECK(two_chart_eval(gens[0].f, dat, deep).is_zero());

    // family two matches X beyond O_F and vanishes on it
    CHECK(two_chart_eval(gens[1].f, dat, deep) == chi_eval(X, deep));
    CHECK(two_chart_eval(gens[1].f, dat, K->pi_pow(-2)) == chi_eval(X, K->pi_pow(-2)));
    CHECK(two_chart_eval(gens[1].f, dat, K->from_int(1)).is_zero());
    CHECK(two_chart_eval(gens[1].f, dat, K->from_int(3)).is_zero());

    // a ramified-direction cutoff on Q_9 with J = {0}
    auto K9 = Field::make(3, 2);
    InductionDatum dat9 =
        make_datum(K9, {0}, MultiIndex{0, 2}, unramified_character(K9, K9->from_ratio(1, 3)),
                   unramified_character(K9, K9->from_ratio(1, 3)));
    auto gens9 = lattice_generators(dat9, 2, 1, 6);
    CHECK(gens9.size() == 18); // three n-values, three m-values, two families
    for (const auto& gen : gens9) {
        CHECK(subspace_check(gen.f.f1, dat9.J, dat9.d));
        CHECK(subspace_check(gen.f.f2, dat9.J, dat9.d));
        if (gen.family == 2) CHECK(gen.err.is_zero());
        if (gen.family == 1 && gen.m.total() > 0)
            CHECK(!gen.err.is_zero()); // negative analytic exponents truncate
    }

    CHECK_THROWS_AS((void)lattice_generators(dat, -1, 1, 8), precondition_error);
}

TEST_CASE("transport through the mirabolic matrices matches the action") {
    auto K = Field::make(3, 1);
    std::mt19937_64 rng(407);

    for (const InductionDatum& dat : {order_one_datum(K), germy_datum(K)}) {
        for (int trial = 0; trial < 6; ++trial) {
            TwoChartFunction f{random_function(K, rng, 2, 2), lp_zero(K)};
            LocallyPolyFunction global = scale_into_disk(f.f1, 1); // f on O_F
            int n = trial % 3;
            Elem b = K->pi_pow(1) * K->random_elem(rng, 0, 2, true);
            Mat2 g{K->pi_pow(n), b, K->zero(), K->from_int(1)};
            ActResult res = act(g, f, dat);
            CHECK(res.exact);
            LocallyPolyFunction moved = p_weight_transport(dat, n, b, global);
            for (int i = 0; i < 8; ++i) {
                Elem z = K->random_elem(rng, 0, 4, true);
                CHECK(evaluate(moved, z) == two_chart_eval(res.f, dat, z));
            }
        }
    }

    // translation alone: shift of the support, recentred exactly
    LocallyPolyFunction h = random_function(K, rng, 2, 2);
    Elem b = K->from_int(5);
    LocallyPolyFunction hb = translate_function(h, b);
    for (int i = 0; i < 10; ++i) {
        Elem z = K->random_elem(rng, 0, 4, true);
        CHECK(evaluate(hb, z) == evaluate(h, z - b));
    }
    CHECK_THROWS_AS((void)translate_function(h, K->pi_pow(-1)), precondition_error);
}

TEST_CASE("certified error bounds cover pointwise deviations of inexact images") {
    auto K = Field::make(3, 1);
    InductionDatum dat = germy_datum(K);
    Character X = char_mul(dat.chi2, char_inv(dat.chi1));
    std::mt19937_64 rng(408);

    int inexact = 0;
    for (int trial = 0; trial < 8; ++trial) {
        Mat2 g = trial == 0 ? mat_unip(K, K->from_int(1))
                            : (trial == 1 ? mat_diag(K, K->from_int(2))
                                          : random_matrix(K, rng));
        TwoChartFunction f = random_two_chart(K, rng, 2, 0); // constant pieces
        ActResult res;
        try {
            res = act(g, f, dat);
        } catch (const coverage_error&) {
            continue;
        }
        if (!res.exact) ++inexact;
        for (const Elem& z : sample_points(K, rng, 6)) {
            if ((g.a - g.c * z).is_zero()) continue;
            Elem delta = two_chart_eval(res.f, dat, z) - direct_image(g, f, dat, z);
            LogNorm bound;
            if (z.is_zero() || z.w() >= 1) {
                bound = res.err1;
            } else {
                bound = (chi_eval(X, z) * K->monomial(z, dat.d)).norm() * res.err2;
            }
            CHECK(lognorm_leq(delta.norm(), bound));
        }
    }
    CHECK(inexact >= 3); // the twisted datum genuinely produces tails
}

TEST_CASE("collapse certificates tile the target with integral coefficients") {
    auto K = Field::make(3, 1);
    InductionDatum dat = collapse_datum(K);
    std::mt19937_64 rng(409);

    // unit target: a single identity term
    CollapseCertificate triv =
        nullity_collapse(dat, K->from_int(1), 0, MultiIndex(1), 8);
    CHECK(triv.m == 0);
    REQUIRE(triv.terms.size() == 1);
    CHECK(triv.terms[0].coef == K->from_int(1));
    CHECK(mat_eq(triv.terms[0].g, mat_identity(K)));
    CHECK(triv.verified);
    CHECK(triv.coefficientsIntegral);

    // growing targets p^{-t} 1_O need depth t and q^t tiles
    for (int t = 1; t <= 4; ++t) {
        CollapseCertificate cert =
            nullity_collapse(dat, K->pi_pow(-t), 0, MultiIndex(1), 8);
        CHECK(cert.m == t);
        CHECK(cert.terms.size() == (std::size_t)K->coset_count(t));
        CHECK(cert.verified);
        CHECK(cert.coefficientsIntegral);
        CHECK(norm_Fh(cert.target) == qpow(Rational(t)));
        for (int i = 0; i < 10; ++i) {
            Elem z = K->random_elem(rng, 0, 5, true);
            CHECK(evaluate(cert.assembled, z) == evaluate(cert.target, z));
        }
    }

    // a deeper disk dominates the depth when the valuation is mild
    CollapseCertificate deepDisk =
        nullity_collapse(dat, K->pi_pow(-1), 2, MultiIndex(1), 8);
    CHECK(deepDisk.m == 2);
    REQUIRE(deepDisk.terms.size() == 1);
    CHECK(deepDisk.terms[0].coef == K->from_int(3));
    CHECK(deepDisk.verified);

    // monomial target under a cap: k <= i tiles with binomial recentering
    InductionDatum datCap =
        make_datum(K, {}, MultiIndex{1}, unramified_character(K, K->from_ratio(1, 3)),
                   unramified_character(K, K->from_ratio(1, 9)));
    CollapseCertificate mono =
        nullity_collapse(datCap, K->pi_pow(-2), 0, MultiIndex{1}, 8);
    CHECK(mono.m == 2);
    CHECK(mono.terms.size() == (std::size_t)(K->coset_count(2) - 1) * 2 + 1);
    CHECK(mono.verified);
    CHECK(mono.coefficientsIntegral);

    CHECK_THROWS_AS(
        (void)nullity_collapse(order_one_datum(K), K->pi_pow(-1), 0, MultiIndex(1), 8),
        precondition_error);
    CHECK_THROWS_AS((void)nullity_collapse(dat, K->pi_pow(-5), 0, MultiIndex(1), 4),
                    precondition_error);
    CHECK_THROWS_AS((void)nullity_collapse(datCap, K->pi_pow(-1), 0, MultiIndex{2}, 8),
                    precondition_error);
    CHECK_THROWS_AS((void)nullity_collapse(dat, K->zero(), 0, MultiIndex(1), 8),
                    precondition_error);
}

TEST_CASE("truncation families certify the strict-margin decay") {
    auto K = Field::make(3, 1);
    InductionDatum dat = order_one_datum(K); // r = 1, X = unr(p^2)
    Character X = char_mul(dat.chi2, char_inv(dat.chi1));
    Rational r = datum_analysis(dat).r;

    TruncationFamily fam =
        funzionicr_truncations(dat, 1, 5, MultiIndex(1), MultiIndex(1), 5, 8);
    REQUIRE(fam.f.size() == 5);
    REQUIRE(fam.stepUpper.size() == 4);
    for (const LogNorm& e : fam.truncationError) CHECK(e.is_zero());

    for (size_t t = 0; t < fam.f.size(); ++t) {
        int n = fam.nMin + (int)t;
        CHECK(subspace_check(fam.f[t], dat.J, dat.d));
        CHECK(evaluate(fam.f[t], K->from_int(2)) == chi_eval(X, K->from_int(2)));
        if (n >= 2)
            CHECK(evaluate(fam.f[t], K->from_int(3)) == chi_eval(X, K->from_int(3)));
        CHECK(evaluate(fam.f[t], K->pi_pow(n)).is_zero());
        CHECK(evaluate(fam.f[t], K->zero()).is_zero());
    }

    for (size_t t = 0; t + 1 < fam.f.size(); ++t) {
        int n = fam.nMin + (int)t;
        // independent construction of the annulus step
        LocallyPolyFunction step = lp_scale(
            lp_add(lp_indicator(K, K->zero(), n),
                   lp_scale(lp_indicator(K, K->zero(), n + 1), K->from_int(-1))),
            K->pi_pow(2 * n));
        CHECK(fam.stepUpper[t] == cr_norm_upper(step, r));
        CHECK(lognorm_leq(fam.stepLower[t], fam.stepUpper[t]));
        if (t + 2 < fam.f.size())
            CHECK(fam.stepUpper[t] == fam.stepUpper[t + 1] * qpow(r)); // q^{-nr} decay
    }

    // analytic-direction exponent produces genuine truncation tails on Q_9
    auto K9 = Field::make(3, 2);
    InductionDatum dat9 =
        make_datum(K9, {0}, MultiIndex{0, 2}, unramified_character(K9, K9->from_ratio(1, 9)),
                   unramified_character(K9, K9->from_int(1)));
    TruncationFamily fam9 = funzionicr_truncations(dat9, 1, 2, MultiIndex(2),
                                                   MultiIndex{1, 0}, 2, 6);
    REQUIRE(fam9.f.size() == 2);
    for (const LogNorm& e : fam9.truncationError) CHECK(!e.is_zero());
    for (const auto& fn : fam9.f) CHECK(subspace_check(fn, dat9.J, dat9.d));
    for (const LogNorm& s : fam9.stepUpper) CHECK(!(s == LogNorm::zero()));

    // strict margin and direction constraints are enforced
    InductionDatum flat =
        make_datum(K, {}, MultiIndex(1), unramified_character(K, K->from_int(1)),
                   unramified_character(K, K->from_int(1)));
    CHECK_THROWS_AS((void)funzionicr_truncations(flat, 1, 3, MultiIndex(1), MultiIndex(1),
                                                 3, 6),
                    precondition_error);
    CHECK_THROWS_AS((void)funzionicr_truncations(dat9, 1, 3, MultiIndex{1, 0},
                                                 MultiIndex(2), 3, 6),
                    precondition_error);
}

TEST_CASE("coverage limits and degenerate matrices are reported") {
    auto K = Field::make(3, 1);
    InductionDatum dat = capped_datum(K);
    std::mt19937_64 rng(410);

    TwoChartFunction f = random_two_chart(K, rng, 3, 1);
    Mat2 g = mat_unip(K, K->from_int(1));
    ActOptions tight;
    tight.levelCap = 0;
    CHECK_THROWS_AS((void)act(g, f, dat, tight), coverage_error);

    Mat2 sing{K->from_int(1), K->from_int(2), K->from_int(2), K->from_int(4)};
    CHECK_THROWS_AS((void)act(sing, f, dat), precondition_error);
}
