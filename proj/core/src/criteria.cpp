#include "padic/criteria.hpp"

#include "padic/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace padic {

namespace {

bool lnorm_leq(const LogNorm& a, const LogNorm& b) { return !(b < a); }

// q^{t} as a LogNorm
LogNorm qpow(const Rational& t) { return LogNorm::from_exponent(-t); }

struct EntryBuilder {
    ConditionEntry e;
    bool has = false;

    void add(const Elem& center, int n, const MultiIndex& nP, const MultiIndex& mP,
             const Elem& value, const LogNorm& bound, const LogNorm& slackAbs) {
        e.vacuous = false;
        LogNorm ratio = value.norm() / bound;
        e.slack = max(e.slack, slackAbs / bound);
        if (!has || e.constant < ratio) {
            e.witness = ConditionWitness{center, n, nP, mP, value.norm(), bound, ratio};
            has = true;
        }
        e.constant = max(e.constant, ratio);
    }
};

/* Shared assembly engine: admissible exponent family, cached twist characters
 * X sigma^{d-k}, dual-norm surrogates for germ slack, and the shell / disk /
 * complement integrals both checkers and the projector are built from. */
struct Assembler {
    const InductionDatum& dat;
    CheckRange range;
    FieldPtr K;
    Rational r;
    Character X;
    int aLev = 1;
    const MomentTable* m1;
    const MomentTable* m2;
    LogNorm V1, V2;
    std::vector<MultiIndex> ks;        // k_offJ <= d, |k| <= degree
    std::vector<std::size_t> strictKs; // indices with r - |k| > 0
    std::vector<Character> chiK;       // X * sigma^{d-k}
    std::vector<Elem> centers;         // 0 and pi * (nonzero level-1 reps)

    Assembler(const TwoChartDistribution& mu, const InductionDatum& d0, const CheckRange& rg)
        : dat(d0), range(rg), K(d0.K), m1(&mu.mu1), m2(&mu.mu2) {
        if (range.level < 1 || range.outerLevel < 0 || range.degree < 0 || range.T < 0)
            throw precondition_error("check range must have level >= 1 and nonnegative bounds");
        r = datum_analysis(dat).r;
        X = char_mul(dat.chi2, char_inv(dat.chi1));
        aLev = analyticity_level(X);

        if (m1->Mmax < range.degree || m2->Mmax < range.degree)
            throw coverage_error("missing moment (a=0, n=0, m=" + std::to_string(range.degree) +
                                 "): stored degrees reach only " +
                                 std::to_string(std::min(m1->Mmax, m2->Mmax)));
        int need1 = std::max(range.level - 1, range.outerLevel + aLev - 1);
        int need2 = std::max(range.level, range.outerLevel + aLev);
        if (m1->Nmax < need1)
            throw coverage_error("missing chart-1 moment (a=0, n=" + std::to_string(need1) +
                                 ", m=0): the table stops at n=" + std::to_string(m1->Nmax));
        if (m2->Nmax < need2)
            throw coverage_error("missing chart-2 moment (a=0, n=" + std::to_string(need2) +
                                 ", m=0): the table stops at n=" + std::to_string(m2->Nmax));

        V1 = avv_norm(*m1, r, dat.J, dat.d).constant;
        V2 = avv_norm(*m2, r, dat.J, dat.d).constant;

        for (const MultiIndex& k : multi_indices_upto(K->f(), range.degree)) {
            bool ok = true;
            for (int s = 0; s < K->f(); ++s)
                if (!dat.in_J(s) && k.e[(std::size_t)s] > dat.d.e[(std::size_t)s]) ok = false;
            if (!ok) continue;
            if (Rational(k.total()) < r) strictKs.push_back(ks.size());
            ks.push_back(k);
            chiK.push_back(char_mul(X, algebraic_character(K, dat.d.minus(k))));
        }

        centers.push_back(K->zero());
        Elem pi = K->pi_pow(1);
        for (std::uint64_t idx = 1; idx < K->coset_count(1); ++idx)
            centers.push_back(pi * K->coset_rep(idx, 1));
    }

    MultiIndex off_J(const MultiIndex& k) const {
        MultiIndex out(K->f());
        for (int s = 0; s < K->f(); ++s)
            if (!dat.in_J(s)) out.e[(std::size_t)s] = k.e[(std::size_t)s];
        return out;
    }
    MultiIndex on_J(const MultiIndex& k) const { return k.minus(off_J(k)); }

    LogNorm growth_bound(int n, const MultiIndex& k) const {
        return qpow(Rational(n) * (r - Rational(k.total())));
    }
    LogNorm decay_bound(int n, const MultiIndex& k) const {
        return qpow(Rational(n) * (Rational(k.total()) - r));
    }

    // integral of z^k over the shell w(z) = -s (s >= 0), read through chart 2
    Elem outer_shell(std::size_t ki, int s, LogNorm& slack) const {
        int L = s + aLev;
        Elem out = K->zero();
        for (std::uint64_t idx = 0; idx < K->coset_count(L); ++idx) {
            Elem a = K->coset_rep(idx, L);
            if (a.is_zero() || a.w() != s) continue;
            GermPairing gp = pair_germ(*m2, char_germ(chiK[ki], a, L, range.T), r, V2);
            out += gp.value;
            slack = max(slack, gp.slack);
        }
        return out;
    }

    // integral of X(z) z^{d-k} over the shell w(z) = s (s >= 1), through chart 1
    Elem inner_shell(std::size_t ki, int s, LogNorm& slack) const {
        int L = (s - 1) + aLev;
        Elem head = chi_eval(chiK[ki], K->pi_pow(1));
        Elem out = K->zero();
        for (std::uint64_t idx = 0; idx < K->coset_count(L); ++idx) {
            Elem a = K->coset_rep(idx, L);
            if (a.is_zero() || a.w() != s - 1) continue;
            GermPairing gp = pair_germ(*m1, char_germ(chiK[ki], a, L, range.T), r, V1);
            out += head * gp.value;
            slack = max(slack, head.norm() * gp.slack);
        }
        return out;
    }

    // integral over a disk avoiding pi O_F, indexed by its chart-2 address:
    // the image of D(a, L) under inversion, integrand (z - 1/a)^k
    Elem outside_disk(std::size_t ki, const Elem& a, int L, LogNorm& slack) const {
        LocalPolynomial mono;
        mono.center = a;
        mono.coeffs.emplace(ks[ki], K->from_int(1));
        LocalGerm g = germ_product(char_germ(chiK[ki], a, L, range.T),
                                   germ_from_polynomial(mono, L), range.T + ks[ki].total());
        GermPairing gp = pair_germ(*m2, g, r, V2);
        Elem scale = K->monomial(-a.inv(), ks[ki]);
        slack = max(slack, scale.norm() * gp.slack);
        return scale * gp.value;
    }

    // integral of X(z-a)(z-a)^{d-k} over F \ D(a, n+1) for a in `centers`
    Elem complement_value(std::size_t ci, std::size_t ki, int n, LogNorm& slack) const {
        const Character& chiE = chiK[ki];
        const MultiIndex& k = ks[ki];
        const Elem& a = centers[ci];
        if (ci == 0) {
            if (n <= 0) return moment_at(*m2, K->zero(), -n, k);
            Elem out = moment_at(*m2, K->zero(), 0, k);
            for (int s = 1; s <= n; ++s) out += inner_shell(ki, s, slack);
            return out;
        }

        LocalPolynomial mono0;
        mono0.center = K->zero();
        mono0.coeffs.emplace(k, K->from_int(1));

        Elem out = K->zero();
        if (n <= 0) {
            // everything of valuation <= n: one chart-2 zone D(0, -n)
            int L2 = std::max({-n, aLev - 1, 1});
            for (std::uint64_t idx = 0; idx < K->coset_count(L2); ++idx) {
                Elem b = K->coset_rep(idx, L2);
                if (!b.is_zero() && b.w() < -n) continue;
                LocalGerm cg = char_germ_affine(chiE, K->from_int(1), -a, b, L2, range.T);
                LocalGerm g = germ_product(cg, germ_from_polynomial(poly_recenter(mono0, b), L2),
                                           range.T + k.total());
                GermPairing gp = pair_germ(*m2, g, r, V2);
                out += gp.value;
                slack = max(slack, gp.slack);
            }
            return out;
        }

        // valuation <= 0 part: all of chart 2
        int L0 = std::max(aLev - 1, 1);
        for (std::uint64_t idx = 0; idx < K->coset_count(L0); ++idx) {
            Elem b = K->coset_rep(idx, L0);
            LocalGerm cg = char_germ_affine(chiE, K->from_int(1), -a, b, L0, range.T);
            LocalGerm g = germ_product(cg, germ_from_polynomial(poly_recenter(mono0, b), L0),
                                       range.T + k.total());
            GermPairing gp = pair_germ(*m2, g, r, V2);
            out += gp.value;
            slack = max(slack, gp.slack);
        }

        // pi O_F minus the excluded disk, through chart 1 around u = a / pi
        Elem u = a * K->pi_pow(-1);
        Elem head = chi_eval(chiE, K->pi_pow(1));
        int L1 = n + aLev - 1;
        for (std::uint64_t idx = 0; idx < K->coset_count(L1); ++idx) {
            Elem b = K->coset_rep(idx, L1);
            if ((b - u).is_zero() || (b - u).w() >= n) continue;
            LocalGerm cg = char_germ_affine(chiE, -u, K->from_int(1), b, L1, range.T);
            GermPairing gp = pair_germ(*m1, cg, r, V1);
            out += head * gp.value;
            slack = max(slack, head.norm() * gp.slack);
        }
        return out;
    }
};

void fill_side_A(const Assembler& A, ConditionReport& rep) {
    const FieldPtr& K = A.K;
    Elem pi = K->pi_pow(1);
    EntryBuilder disk, comp;

    for (std::size_t ki = 0; ki < A.ks.size(); ++ki) {
        const MultiIndex& k = A.ks[ki];
        MultiIndex nP = A.off_J(k), mP = A.on_J(k);
        Elem piK = K->pi_pow(k.total());

        // disks inside pi O_F: exact chart-1 moments
        for (int nu = 0; nu + 1 <= A.range.level; ++nu)
            for (std::uint64_t idx = 0; idx < K->coset_count(nu); ++idx) {
                Elem value = piK * A.m1->value(nu, idx, k);
                disk.add(pi * K->coset_rep(idx, nu), nu + 1, nP, mP, value,
                         A.growth_bound(nu + 1, k), LogNorm::zero());
            }

        // disks avoiding pi O_F, via the inversion bijection
        for (int L = 1; L <= A.range.level; ++L)
            for (std::uint64_t idx = 1; idx < K->coset_count(L); ++idx) {
                Elem a = K->coset_rep(idx, L);
                if (a.is_zero()) continue;
                int m = L - 2 * (int)a.w();
                LogNorm slack = LogNorm::zero();
                Elem value = A.outside_disk(ki, a, L, slack);
                disk.add(a.inv(), m, nP, mP, value, A.growth_bound(m, k), slack);
            }

        // central big disks D(0, n), n <= 0: chart-1 core plus valuation shells
        {
            LogNorm slack = LogNorm::zero();
            Elem value = piK * A.m1->value(0, 0, k);
            for (int s = 0; s <= A.range.outerLevel; ++s) {
                value += A.outer_shell(ki, s, slack);
                disk.add(K->zero(), -s, nP, mP, value, A.growth_bound(-s, k), slack);
            }
        }

        // complements of disks around the declared centers
        for (std::size_t ci = 0; ci < A.centers.size(); ++ci)
            for (int n = -A.range.level; n <= A.range.outerLevel; ++n) {
                LogNorm slack = LogNorm::zero();
                Elem value = A.complement_value(ci, ki, n, slack);
                comp.add(A.centers[ci], n, nP, mP, value, A.decay_bound(n, k), slack);
            }
    }

    rep.disk = disk.e;
    rep.complement = comp.e;
}

void fill_side_B(const Assembler& A, ConditionReport& rep) {
    const FieldPtr& K = A.K;
    Elem pi = K->pi_pow(1);
    EntryBuilder scaled, outer, inverted, resPlain, resTwisted;

    for (std::size_t ki = 0; ki < A.ks.size(); ++ki) {
        const MultiIndex& k = A.ks[ki];
        MultiIndex nP = A.off_J(k), mP = A.on_J(k);
        Elem piK = K->pi_pow(k.total());

        for (int nu = 0; nu + 1 <= A.range.level; ++nu)
            for (std::uint64_t idx = 0; idx < K->coset_count(nu); ++idx)
                scaled.add(pi * K->coset_rep(idx, nu), nu + 1, nP, mP,
                           piK * A.m1->value(nu, idx, k), A.growth_bound(nu + 1, k),
                           LogNorm::zero());

        for (int L = 0; L <= A.range.level; ++L)
            outer.add(K->zero(), -L, nP, mP, A.m2->value(L, 0, k), A.growth_bound(L, k),
                      LogNorm::zero());

        for (int L = 1; L <= A.range.level; ++L)
            for (std::uint64_t idx = 1; idx < K->coset_count(L); ++idx) {
                Elem a = K->coset_rep(idx, L);
                if (a.is_zero()) continue;
                inverted.add(a, L, nP, mP, A.m2->value(L, idx, k), A.growth_bound(L, k),
                             LogNorm::zero());
            }
    }

    for (std::size_t si : A.strictKs) {
        const MultiIndex& k = A.ks[si];
        MultiIndex nP = A.off_J(k), mP = A.on_J(k);

        LogNorm slack = LogNorm::zero();
        Elem value = K->pi_pow(k.total()) * A.m1->value(0, 0, k);
        for (int s = 0; s <= A.range.outerLevel; ++s) value += A.outer_shell(si, s, slack);
        resPlain.add(K->zero(), -A.range.outerLevel, nP, mP, value,
                     A.growth_bound(-A.range.outerLevel, k), slack);

        for (std::size_t ci = 0; ci < A.centers.size(); ++ci) {
            LogNorm tslack = LogNorm::zero();
            Elem tvalue = A.complement_value(ci, si, A.range.outerLevel, tslack);
            resTwisted.add(A.centers[ci], A.range.outerLevel, nP, mP, tvalue,
                           A.decay_bound(A.range.outerLevel, k), tslack);
        }
    }

    rep.scaledDisk = scaled.e;
    rep.outerTail = outer.e;
    rep.invertedDisk = inverted.e;
    rep.momentResidual = resPlain.e;
    rep.twistedResidual = resTwisted.e;
}

} // namespace

ConditionReport cond_A_check(const TwoChartDistribution& mu, const InductionDatum& dat,
                             const CheckRange& range) {
    Assembler A(mu, dat, range);
    ConditionReport rep;
    rep.range = range;
    rep.r = A.r;
    fill_side_A(A, rep);
    return rep;
}

ConditionReport cond_B_check(const TwoChartDistribution& mu, const InductionDatum& dat,
                             const CheckRange& range) {
    Assembler A(mu, dat, range);
    ConditionReport rep;
    rep.range = range;
    rep.r = A.r;
    fill_side_B(A, rep);
    return rep;
}

namespace {

TwoChartDistribution dirac_pair(const InductionDatum& dat, const Elem& z0, int N1, long M1,
                                int N2, long M2) {
    const FieldPtr& K = dat.K;
    TwoChartDistribution out;
    if (z0.is_zero() || z0.w() >= 1) {
        out.mu1 = dirac(K, z0 * K->pi_pow(-1), N1, M1);
        out.mu2 = make_moment_table(K, N2, M2);
    } else {
        Character X = char_mul(dat.chi2, char_inv(dat.chi1));
        Elem weight = chi_eval(X, z0) * K->monomial(z0, dat.d);
        out.mu1 = make_moment_table(K, N1, M1);
        out.mu2 = table_scale(dirac(K, z0.inv(), N2, M2), weight);
    }
    return out;
}

// the strict-region partial integrals as one vector of exact values
std::vector<Elem> residual_vector(const Assembler& A) {
    std::vector<Elem> out;
    for (std::size_t si : A.strictKs) {
        LogNorm slack = LogNorm::zero();
        Elem value = A.K->pi_pow(A.ks[si].total()) * A.m1->value(0, 0, A.ks[si]);
        for (int s = 0; s <= A.range.outerLevel; ++s) value += A.outer_shell(si, s, slack);
        out.push_back(value);
        for (std::size_t ci = 0; ci < A.centers.size(); ++ci)
            out.push_back(A.complement_value(ci, si, A.range.outerLevel, slack));
    }
    return out;
}

} // namespace

TwoChartDistribution two_chart_dirac(const InductionDatum& dat, const Elem& z0, int Nmax,
                                     long Mmax) {
    return dirac_pair(dat, z0, Nmax, Mmax, Nmax, Mmax);
}

TwoChartDistribution project_vanishing(const TwoChartDistribution& mu,
                                       const InductionDatum& dat, const CheckRange& range) {
    Assembler A(mu, dat, range);
    if (A.strictKs.empty()) return mu;
    const FieldPtr& K = dat.K;

    std::vector<Elem> rhs = residual_vector(A);
    std::size_t n = rhs.size();

    // candidate point masses: units and points one step off the unit sphere
    std::vector<TwoChartDistribution> deltas;
    std::vector<std::vector<Elem>> cols;
    long unit = 0;
    for (std::size_t j = 0; j < n + 4; ++j) {
        do { ++unit; } while (unit % K->p() == 0);
        long wshift = (long)(j % 3) - 1; // -1, 0, 1 cycling
        Elem z = K->from_int(unit) * K->pi_pow(wshift);
        deltas.push_back(dirac_pair(dat, z, mu.mu1.Nmax, mu.mu1.Mmax, mu.mu2.Nmax,
                                    mu.mu2.Mmax));
        Assembler AD(deltas.back(), dat, range);
        cols.push_back(residual_vector(AD));
    }

    // solve sum_j c_j * cols[j] = rhs by elimination with full pivoting
    std::size_t cn = cols.size();
    std::vector<std::vector<Elem>> M(n, std::vector<Elem>(cn, K->zero()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < cn; ++j) M[i][j] = cols[j][i];
    std::vector<Elem> b = rhs;
    std::vector<std::size_t> colOrder(cn);
    for (std::size_t j = 0; j < cn; ++j) colOrder[j] = j;

    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pr = step, pc = step;
        LogNorm best = LogNorm::zero();
        for (std::size_t i = step; i < n; ++i)
            for (std::size_t j = step; j < cn; ++j)
                if (best < M[i][j].norm()) {
                    best = M[i][j].norm();
                    pr = i;
                    pc = j;
                }
        if (best.is_zero())
            throw precondition_error("projection system is singular over the candidate points");
        std::swap(M[step], M[pr]);
        std::swap(b[step], b[pr]);
        for (std::size_t i = 0; i < n; ++i) std::swap(M[i][step], M[i][pc]);
        std::swap(colOrder[step], colOrder[pc]);
        Elem inv = M[step][step].inv();
        for (std::size_t i = step + 1; i < n; ++i) {
            if (M[i][step].is_zero()) continue;
            Elem f = M[i][step] * inv;
            for (std::size_t j = step; j < cn; ++j) M[i][j] -= f * M[step][j];
            b[i] -= f * b[step];
        }
    }
    std::vector<Elem> c(cn, K->zero());
    for (std::size_t step = n; step-- > 0;) {
        Elem s = b[step];
        for (std::size_t j = step + 1; j < n; ++j) s -= M[step][j] * c[colOrder[j]];
        c[colOrder[step]] = s * M[step][step].inv();
    }

    TwoChartDistribution out{mu.mu1, mu.mu2};
    for (std::size_t j = 0; j < cn; ++j) {
        if (c[j].is_zero()) continue;
        out.mu1 = table_add(out.mu1, table_scale(deltas[j].mu1, -c[j]));
        out.mu2 = table_add(out.mu2, table_scale(deltas[j].mu2, -c[j]));
    }
    return out;
}

EquivalenceRecord equivalence_harness(const TwoChartDistribution& mu,
                                      const InductionDatum& dat, const CheckRange& range) {
    DatumAnalysis an = datum_analysis(dat);
    if (!an.integral)
        throw precondition_error("equivalence budgets need an integral central character");
    std::vector<int> J = dat.J, Jp = an.Jprime;
    std::sort(J.begin(), J.end());
    std::sort(Jp.begin(), Jp.end());
    if (J != Jp)
        throw precondition_error(
            "datum is not reduced (some cap fails d+1 <= r); rerun with the reduced datum");

    const FieldPtr& K = dat.K;
    EquivalenceRecord rec;
    rec.A = cond_A_check(mu, dat, range);
    rec.B = cond_B_check(mu, dat, range);
    rec.CA = max(rec.A.disk.constant, rec.A.complement.constant);
    rec.CB = max(rec.B.scaledDisk.constant,
                 max(rec.B.outerTail.constant, rec.B.invertedDisk.constant));
    rec.residual = max(rec.B.momentResidual.constant, rec.B.twistedResidual.constant);

    Character X = char_mul(dat.chi2, char_inv(dat.chi1));
    rec.levelAtOne = analyticity_level_at_1(X);
    LocalExpansion le = chi_local_expansion(X, K->from_int(1), rec.levelAtOne, range.T);
    rec.charSup = max(le.coefBound, le.tail);
    LogNorm extension = qpow(Rational(rec.levelAtOne) * an.r);
    rec.kappaAB = max(LogNorm::one(), rec.charSup * extension);

    rec.familyNorm = LogNorm::one();
    rec.familyVacuous = true;
    Assembler A(mu, dat, range);
    int aLev = analyticity_level(X);
    for (std::size_t si : A.strictKs) {
        MultiIndex nP = A.off_J(A.ks[si]), mP = A.on_J(A.ks[si]);
        TruncationFamily fam = funzionicr_truncations(dat, 1, 2, nP, mP, aLev, range.T);
        for (const LocallyPolyFunction& f : fam.f) {
            LogNorm nm = cr_norm_upper(f, an.r);
            rec.familyNorm = rec.familyVacuous ? nm : max(rec.familyNorm, nm);
            rec.familyVacuous = false;
        }
    }
    rec.kappaBA = extension * max(LogNorm::one(), rec.charSup) *
                  max(LogNorm::one(), rec.familyNorm);

    rec.forwardHolds = lnorm_leq(rec.CB, rec.kappaAB * rec.CA);
    rec.backwardHolds = lnorm_leq(rec.CA, rec.kappaBA * rec.CB);
    return rec;
}

} // namespace padic
