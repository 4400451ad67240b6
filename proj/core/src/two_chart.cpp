#include "padic/two_chart.hpp"

#include "padic/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace padic {

namespace {

Elem mono_or_zero(const FieldPtr& K, const Elem& x, const MultiIndex& e) {
    if (x.is_zero()) return e.is_zero() ? K->from_int(1) : K->zero();
    return K->monomial(x, e);
}

// all k with 0 <= k <= bound componentwise, odometer order
std::vector<MultiIndex> below_cap(const MultiIndex& bound) {
    std::vector<MultiIndex> out;
    MultiIndex k((int)bound.e.size());
    while (true) {
        out.push_back(k);
        size_t s = 0;
        while (s < k.e.size() && k.e[s] == bound.e[s]) {
            k.e[s] = 0;
            ++s;
        }
        if (s == k.e.size()) break;
        ++k.e[s];
    }
    return out;
}

// (n0 + n1 t)^m expanded exactly about `center` in t = z - center
LocalPolynomial affine_power(const FieldPtr& K, const Elem& n0, const Elem& n1,
                             const Elem& center, const MultiIndex& m) {
    LocalPolynomial out;
    out.center = center;
    for (const auto& k : below_cap(m)) {
        Elem c = K->multi_binom_elem(m, k) * mono_or_zero(K, n0, m.minus(k)) *
                 mono_or_zero(K, n1, k);
        if (!c.is_zero()) out.coeffs.emplace(k, c);
    }
    return out;
}

/* Germ of z -> chi(u0 + u1 (z - c0)) on D(c0, L).  The constant pi-power of
 * the value at the center is peeled off first so the expansion runs at a unit
 * center, which also admits non-integral values. */
LocalGerm char_bearer_germ(const Character& chi, const Elem& u0, const Elem& u1,
                           const Elem& c0, int L, long T) {
    const FieldPtr& K = chi.K;
    if (u1.is_zero()) return germ_constant(chi_eval(chi, u0), c0, L);
    long wu = u0.w();
    Elem sc = K->pi_pow(-wu);
    Elem b0 = sc * (u0 - u1 * c0);
    Elem b1 = sc * u1;
    LocalGerm g = char_germ_affine(chi, b0, b1, c0, L, T);
    if (wu != 0) g = germ_scale(g, chi_eval(chi, K->pi_pow(wu)));
    return g;
}

struct ChartPlan {
    std::uint64_t outIdx = 0;
    bool branchI = true;
    Elem U0, U1; // character-bearing affine: value at the center, slope
    Elem N0, N1; // numerator of the recentred argument
    Elem D0, D1; // denominator (carries the extra pi on branch one)
    const LocalPolynomial* piece = nullptr;
    Elem cen; // canonical center of the source coset that is read
};

/* Decide, coset by coset at output level L, which chart of the source is read
 * and through which affine substitution.  Returns false as soon as some coset
 * cannot be certified at this level: mixed valuation of an affine, an
 * ambiguous branch, an image disk meeting two source cosets, or a character
 * expansion below its analyticity level. */
bool plan_chart(const FieldPtr& K, const Elem& A0a, const Elem& A1, const Elem& B0a,
                const Elem& B1, const LocallyPolyFunction& src1,
                const LocallyPolyFunction& src2, int analytNeed, int L,
                std::vector<ChartPlan>& plans) {
    plans.clear();
    Elem pi = K->pi_pow(1);
    std::uint64_t count = K->coset_count(L);
    plans.reserve(count);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        Elem c0 = K->coset_rep(idx, L);
        Elem A0 = A0a + A1 * c0;
        Elem B0 = B0a + B1 * c0;
        /* An affine is clean on the coset when its value at the center
         * dominates its variation; only the branch whose substitution carries
         * the character needs its affine clean.  The other affine may vanish
         * inside the coset (the quotient then crosses zero or a pole), which
         * is harmless because it enters the germ polynomially. */
        bool cleanA = !A0.is_zero() && (A1.is_zero() || A0.w() < A1.w() + L);
        bool cleanB = !B0.is_zero() && (B1.is_zero() || B0.w() < B1.w() + L);
        if (!cleanA && !cleanB) return false;

        bool branchI;
        if (!cleanA) {
            // |A| <= |A1| q^{-L} across the coset: the quotient B/A stays
            // uniformly outside the small disk iff |B0| q^L >= |A1|
            if (A1.is_zero() || !(B0.w() <= A1.w() + L)) return false;
            branchI = false;
        } else if (!cleanB) {
            // |B| <= |B1| q^{-L}: the quotient stays uniformly small
            if (B1.is_zero() || !(B1.w() + L >= A0.w() + 1)) return false;
            branchI = true;
        } else {
            branchI = B0.w() >= A0.w() + 1;
        }

        ChartPlan pl;
        pl.outIdx = idx;
        pl.branchI = branchI;
        if (branchI) {
            pl.U0 = A0;
            pl.U1 = A1;
            pl.N0 = B0;
            pl.N1 = B1;
            pl.D0 = pi * A0;
            pl.D1 = pi * A1;
        } else {
            pl.U0 = B0;
            pl.U1 = B1;
            pl.N0 = A0;
            pl.N1 = A1;
            pl.D0 = B0;
            pl.D1 = B1;
        }

        const LocallyPolyFunction& src = branchI ? src1 : src2;
        if (src.pieces.empty()) {
            plans.push_back(std::move(pl));
            continue;
        }

        Elem arg0 = pl.N0 * pl.D0.inv();
        if (!arg0.is_integral()) return false;
        if (arg0.abs_prec() < src.level) return false;
        std::uint64_t sidx = K->coset_index_of(arg0, src.level);
        auto it = src.pieces.find(sidx);
        pl.piece = it == src.pieces.end() ? nullptr : &it->second;
        pl.cen = K->coset_rep(sidx, src.level);

        Elem delta = pl.N1 * pl.D0 - pl.N0 * pl.D1;
        if (delta.is_zero()) return false;
        if (!(L + delta.w() - 2 * pl.D0.w() >= src.level)) return false;

        if (pl.piece != nullptr && !pl.U1.is_zero() &&
            !(L + pl.U1.w() - pl.U0.w() >= analytNeed))
            return false;
        plans.push_back(std::move(pl));
    }
    return true;
}

struct ChartResult {
    LocallyPolyFunction f;
    LogNorm err = LogNorm::zero();
    bool exact = true;
};

ChartResult assemble_chart(const FieldPtr& K, const InductionDatum& dat,
                           const Character& X, const Elem& s,
                           const std::vector<ChartPlan>& plans, int L, long T,
                           std::map<MultiIndex, Character>& charCache) {
    ChartResult res;
    res.f = lp_zero(K, L);
    for (const auto& pl : plans) {
        if (pl.piece == nullptr) continue;
        Elem c0 = K->coset_rep(pl.outIdx, L);
        // argument recentred at the source center: (N - cen D) / D
        Elem n0 = pl.N0 - pl.cen * pl.D0;
        Elem n1 = pl.N1 - pl.cen * pl.D1;
        LocalPolynomial acc;
        acc.center = c0;
        LogNorm tailAcc = LogNorm::zero();
        for (const auto& [m, cm] : pl.piece->coeffs) {
            auto itc = charCache.find(m);
            if (itc == charCache.end())
                itc = charCache
                          .emplace(m, char_mul(X, algebraic_character(K, dat.d.minus(m))))
                          .first;
            LocalGerm chg = char_bearer_germ(itc->second, pl.U0, pl.U1, c0, L, T);
            LocalGerm pog = germ_from_polynomial(affine_power(K, n0, n1, c0, m), L);
            LocalGerm term = germ_product(chg, pog, T + m.total());
            Elem scal = s * cm;
            if (pl.branchI) scal = scal * K->pi_pow(-m.total());
            term = germ_scale(term, scal);
            acc = poly_add(acc, term.poly);
            tailAcc = max(tailAcc, term.tail);
            if (!term.exact) res.exact = false;
        }
        if (!acc.coeffs.empty()) res.f.pieces.emplace(pl.outIdx, std::move(acc));
        res.err = max(res.err, tailAcc);
    }
    return res;
}

bool lp_vanishes(const LocallyPolyFunction& f) {
    for (const auto& [idx, p] : f.pieces)
        for (const auto& [m, c] : p.coeffs)
            if (!c.is_zero()) return false;
    return true;
}

long long ceil_rational(const Rational& x) { return -((-x).floor()); }

} // namespace

Mat2 mat_mul(const Mat2& g, const Mat2& h) {
    return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c,
            g.c * h.b + g.d * h.d};
}

Elem mat_det(const Mat2& g) { return g.a * g.d - g.b * g.c; }

Mat2 mat_identity(const FieldPtr& K) {
    return {K->from_int(1), K->zero(), K->zero(), K->from_int(1)};
}

Mat2 mat_central(const FieldPtr& K, const Elem& lambda) {
    return {lambda, K->zero(), K->zero(), lambda};
}

Mat2 mat_diag(const FieldPtr& K, const Elem& lambda) {
    return {K->from_int(1), K->zero(), K->zero(), lambda};
}

Mat2 mat_unip(const FieldPtr& K, const Elem& lambda) {
    return {K->from_int(1), lambda, K->zero(), K->from_int(1)};
}

Mat2 mat_w(const FieldPtr& K) {
    return {K->zero(), K->pi_pow(1), K->from_int(1), K->zero()};
}

std::vector<Mat2> decompose_bruhat(const Mat2& g) {
    const FieldPtr& K = g.a.field() ? g.a.field() : g.c.field();
    Elem det = mat_det(g);
    if (det.is_zero())
        throw precondition_error("matrix is not invertible at working precision");
    std::vector<Mat2> out;
    if (g.c.is_zero()) {
        out.push_back(mat_central(K, g.a));
        out.push_back(mat_diag(K, g.d * g.a.inv()));
        out.push_back(mat_unip(K, g.b * g.a.inv()));
    } else {
        Elem cinv = g.c.inv();
        out.push_back(mat_unip(K, g.a * cinv));
        out.push_back(mat_w(K));
        out.push_back(mat_central(K, g.c));
        out.push_back(mat_diag(K, -det * (K->pi_pow(1) * g.c * g.c).inv()));
        out.push_back(mat_unip(K, g.d * cinv));
    }
    return out;
}

TwoChartFunction two_chart_zero(const FieldPtr& K) { return {lp_zero(K), lp_zero(K)}; }

Elem two_chart_eval(const TwoChartFunction& f, const InductionDatum& dat, const Elem& z) {
    const FieldPtr& K = dat.K;
    if (z.is_zero() || z.w() >= 1) return evaluate(f.f1, z * K->pi_pow(-1));
    Character X = char_mul(dat.chi2, char_inv(dat.chi1));
    return chi_eval(X, z) * K->monomial(z, dat.d) * evaluate(f.f2, z.inv());
}

LogNorm two_chart_norm(const TwoChartFunction& f, const Rational& r) {
    return max(cr_norm_upper(f.f1, r), cr_norm_upper(f.f2, r));
}

Elem pair_two_chart(const MomentTable& mu1, const MomentTable& mu2,
                    const TwoChartFunction& f) {
    return pair(mu1, f.f1) + pair(mu2, f.f2);
}

LocallyPolyFunction translate_function(const LocallyPolyFunction& f, const Elem& b) {
    if (!b.is_integral())
        throw precondition_error("translation by a non-integral element leaves O_F");
    LocallyPolyFunction out = lp_zero(f.K, f.level);
    for (const auto& [idx, p] : f.pieces) {
        Elem moved = p.center + b;
        std::uint64_t j = f.K->coset_index_of(moved, f.level);
        LocalPolynomial q{moved, p.coeffs};
        out.pieces.emplace(j, poly_recenter(q, f.K->coset_rep(j, f.level)));
    }
    return out;
}

LocallyPolyFunction p_weight_transport(const InductionDatum& dat, int n, const Elem& b,
                                       const LocallyPolyFunction& f) {
    const FieldPtr& K = dat.K;
    Elem s = chi_eval(dat.chi2, K->pi_pow(n)) * K->monomial(K->pi_pow(n), dat.d);
    return lp_scale(translate_function(scale_into_disk(f, n), b), s);
}

ActResult act(const Mat2& g, const TwoChartFunction& f, const InductionDatum& dat,
              const ActOptions& opt) {
    const FieldPtr& K = dat.K;
    Elem det = mat_det(g);
    if (det.is_zero())
        throw precondition_error("matrix is not invertible at working precision");

    ActResult out;
    out.err1 = out.err2 = LogNorm::zero();

    if (f.f1.pieces.empty() && f.f2.pieces.empty()) {
        out.f = {lp_zero(K, f.f1.level), lp_zero(K, f.f2.level)};
        out.level1 = f.f1.level;
        out.level2 = f.f2.level;
        return out;
    }

    // central elements scale both charts by chi1 chi2 (lambda) lambda^d
    if (g.b.is_zero() && g.c.is_zero() && g.a == g.d) {
        Elem sc =
            chi_eval(dat.chi1, g.a) * chi_eval(dat.chi2, g.a) * K->monomial(g.a, dat.d);
        out.f = {lp_scale(f.f1, sc), lp_scale(f.f2, sc)};
        out.level1 = f.f1.level;
        out.level2 = f.f2.level;
        return out;
    }

    Elem pi = K->pi_pow(1);
    Character X = char_mul(dat.chi2, char_inv(dat.chi1));

    // [[0, pi],[1, 0]] swaps the charts with exact scalar weights
    if (g.a.is_zero() && g.d.is_zero() && g.b == pi && g.c == K->from_int(1)) {
        Elem mone = K->from_int(-1);
        Elem s1 = chi_eval(dat.chi2, -pi) * K->monomial(-pi, dat.d);
        Elem s2 = chi_eval(dat.chi1, -pi) * chi_eval(X, mone) * K->monomial(mone, dat.d);
        out.f = {lp_scale(f.f2, s1), lp_scale(f.f1, s2)};
        out.level1 = f.f2.level;
        out.level2 = f.f1.level;
        return out;
    }

    Elem s = chi_eval(dat.chi1, det);
    int analytNeed = analyticity_level(X);
    std::map<MultiIndex, Character> charCache;

    // output chart 1 reads the substitution at pi zeta, chart 2 homogenised at 1/zeta
    struct Setup {
        Elem A0a, A1, B0a, B1;
    };
    Setup setups[2] = {{g.a, -(g.c * pi), -g.b, g.d * pi}, {-g.c, g.a, g.d, -g.b}};

    for (int chart = 0; chart < 2; ++chart) {
        const Setup& su = setups[chart];
        bool done = false;
        for (int L = 0; L <= opt.levelCap && !done; ++L) {
            std::vector<ChartPlan> plans;
            if (!plan_chart(K, su.A0a, su.A1, su.B0a, su.B1, f.f1, f.f2, analytNeed, L,
                            plans))
                continue;
            ChartResult cr = assemble_chart(K, dat, X, s, plans, L, opt.T, charCache);
            if (chart == 0) {
                out.f.f1 = std::move(cr.f);
                out.err1 = cr.err;
                out.level1 = L;
            } else {
                out.f.f2 = std::move(cr.f);
                out.err2 = cr.err;
                out.level2 = L;
            }
            if (!cr.exact) out.exact = false;
            done = true;
        }
        if (!done)
            throw coverage_error("group action image needs refinement beyond the level cap");
    }
    return out;
}

std::vector<LatticeGenerator> lattice_generators(const InductionDatum& dat, long mCutoff,
                                                 int level, long T) {
    const FieldPtr& K = dat.K;
    if (mCutoff < 0) throw precondition_error("cutoff must be >= 0");
    Character X = char_mul(dat.chi2, char_inv(dat.chi1));
    int lev = std::max(level, analyticity_level(X));

    MultiIndex mBound((int)K->f());
    for (int sigma : dat.J) mBound.e[(size_t)sigma] = mCutoff;
    std::vector<MultiIndex> ms;
    for (const auto& m : below_cap(mBound))
        if (m.total() <= mCutoff) ms.push_back(m);

    std::vector<Elem> units;
    for (const Elem& u : K->coset_reps(lev))
        if (!u.is_zero() && u.w() == 0) units.push_back(u);

    std::vector<LatticeGenerator> out;
    for (const auto& n : below_cap(dat.d)) {
        for (const auto& m : ms) {
            MultiIndex k = n.plus(m);
            Character chik = char_mul(X, algebraic_character(K, dat.d.minus(k)));

            LatticeGenerator g1;
            g1.n = n;
            g1.m = m;
            g1.family = 1;
            g1.f.f1 = lp_scale(lp_monomial(K, k), K->pi_pow(k.total()));
            g1.f.f2 = lp_zero(K, lev);
            g1.err = LogNorm::zero();
            for (const Elem& u : units) {
                LocalGerm ge = char_germ(chik, u, lev, T);
                if (!ge.poly.coeffs.empty())
                    g1.f.f2.pieces.emplace(K->coset_index_of(u, lev), ge.poly);
                g1.err = max(g1.err, ge.tail);
            }
            out.push_back(std::move(g1));

            LatticeGenerator g2;
            g2.n = n;
            g2.m = m;
            g2.family = 2;
            g2.f.f1 = lp_zero(K, 0);
            g2.f.f2 = lp_indicator_monomial(K, K->zero(), 1, k);
            g2.err = LogNorm::zero();
            out.push_back(std::move(g2));
        }
    }
    return out;
}

CollapseCertificate nullity_collapse(const InductionDatum& dat, const Elem& lambda,
                                     int n, const MultiIndex& i, int budget) {
    const FieldPtr& K = dat.K;
    DatumAnalysis an = datum_analysis(dat);
    if (!(an.nullityExponent < Rational(0)))
        throw precondition_error("collapse needs val(chi2(p)) + |d| < 0");
    if (lambda.is_zero()) throw precondition_error("target scale must be nonzero");
    if (n < 0) throw precondition_error("disk level must be >= 0");
    if ((int)i.e.size() != K->f() || !i.nonneg())
        throw precondition_error("monomial exponent must be nonnegative with one entry per embedding");
    for (int sigma = 0; sigma < K->f(); ++sigma)
        if (!dat.in_J(sigma) && i.e[(size_t)sigma] > dat.d.e[(size_t)sigma])
            throw precondition_error("monomial exponent exceeds the degree cap off the analytic directions");

    Rational vl = lambda.val_p();
    long long m0 = vl < Rational(0) ? ceil_rational(vl / an.nullityExponent) : 0;
    long long depth = std::max<long long>(n, m0);
    if (depth > budget) throw precondition_error("collapse budget exhausted");
    int m = (int)depth;

    CollapseCertificate cert;
    cert.lambda = lambda;
    cert.n = n;
    cert.i = i;
    cert.m = m;
    cert.target = lp_scale(lp_indicator_monomial(K, K->zero(), n, i), lambda);

    Elem piM = K->pi_pow(m);
    LocallyPolyFunction assembled = lp_zero(K, m);
    bool integral = true;
    for (const Elem& rep : K->coset_reps(m - n)) {
        Elem b = K->pi_pow(n) * rep;
        for (const auto& k : below_cap(i)) {
            Elem Dk = chi_eval(dat.chi2, piM) * K->monomial(piM, dat.d.minus(k));
            Elem coef = lambda * K->multi_binom_elem(i, k) *
                        mono_or_zero(K, b, i.minus(k)) * Dk.inv();
            if (coef.is_zero()) continue;
            CollapseTerm term;
            term.coef = coef;
            term.g = {piM, b, K->zero(), K->from_int(1)};
            term.gen = k;
            cert.terms.push_back(term);
            if (!coef.is_integral()) integral = false;
            assembled = lp_add(
                assembled,
                lp_scale(p_weight_transport(dat, m, b, lp_monomial(K, k)), coef));
        }
    }
    cert.coefficientsIntegral = integral;
    cert.assembled = std::move(assembled);
    cert.verified =
        lp_vanishes(lp_add(cert.assembled, lp_scale(cert.target, K->from_int(-1))));
    return cert;
}

TruncationFamily funzionicr_truncations(const InductionDatum& dat, int nMin, int nMax,
                                        const MultiIndex& nExp, const MultiIndex& mExp,
                                        int level, long T) {
    const FieldPtr& K = dat.K;
    if (nMin < 0 || nMax < nMin) throw precondition_error("need 0 <= nMin <= nMax");
    if ((int)nExp.e.size() != K->f() || (int)mExp.e.size() != K->f() || !nExp.nonneg() ||
        !mExp.nonneg())
        throw precondition_error("exponents must be nonnegative with one entry per embedding");
    for (int sigma = 0; sigma < K->f(); ++sigma) {
        bool inJ = dat.in_J(sigma);
        if (inJ && nExp.e[(size_t)sigma] != 0)
            throw precondition_error("the capped exponent must vanish on the analytic directions");
        if (!inJ && nExp.e[(size_t)sigma] > dat.d.e[(size_t)sigma])
            throw precondition_error("the capped exponent exceeds the degree cap");
        if (!inJ && mExp.e[(size_t)sigma] != 0)
            throw precondition_error("the analytic exponent must vanish off the analytic directions");
    }
    DatumAnalysis an = datum_analysis(dat);
    Rational margin = an.r - Rational(nExp.total()) - Rational(mExp.total());
    if (!(Rational(0) < margin))
        throw precondition_error("truncations need a strict decay margin");

    Character chiFam =
        char_mul(char_mul(dat.chi2, char_inv(dat.chi1)),
                 algebraic_character(K, dat.d.minus(nExp).minus(mExp)));
    int L = std::max({level, nMax, nMax - 1 + analyticity_level(chiFam)});

    TruncationFamily fam;
    fam.nMin = nMin;
    std::vector<Elem> reps = K->coset_reps(L);
    for (int n = nMin; n <= nMax; ++n) {
        LocallyPolyFunction fn = lp_zero(K, L);
        LogNorm err = LogNorm::zero();
        for (std::uint64_t idx = 0; idx < reps.size(); ++idx) {
            const Elem& c = reps[(size_t)idx];
            if (c.is_zero() || c.w() >= n) continue; // keep only O \ D(0,n)
            LocalGerm ge = char_germ(chiFam, c, L, T);
            if (!ge.poly.coeffs.empty()) fn.pieces.emplace(idx, ge.poly);
            err = max(err, ge.tail);
        }
        fam.f.push_back(std::move(fn));
        fam.truncationError.push_back(err);
    }
    /* Each consecutive difference lives on the single shell w = n; rebuilding
     * it at the shell's own minimal level keeps the upper bound tight instead
     * of inheriting the amplification of the family-wide cover. */
    int aLev = analyticity_level(chiFam);
    for (int n = nMin; n < nMax; ++n) {
        int dl = n + aLev;
        LocallyPolyFunction diff = lp_zero(K, dl);
        for (std::uint64_t idx = 0; idx < K->coset_count(dl); ++idx) {
            Elem c = K->coset_rep(idx, dl);
            if (c.is_zero() || c.w() != n) continue;
            LocalGerm ge = char_germ(chiFam, c, dl, T);
            if (!ge.poly.coeffs.empty()) diff.pieces.emplace(idx, ge.poly);
        }
        fam.stepUpper.push_back(cr_norm_upper(diff, an.r));
        // the shell's own resolution already witnesses the crossing
        // differences that attain the step norm
        fam.stepLower.push_back(cr_norm_enum(diff, an.r, dl));
    }
    return fam;
}

} // namespace padic
