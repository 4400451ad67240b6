#include "padic/dist.hpp"

#include "padic/chars.hpp"
#include "padic/errors.hpp"

#include <algorithm>
#include <random>

namespace padic {

namespace {

constexpr std::uint64_t kMaxTableCells = 1ull << 24;

bool admissible_exponent(const MultiIndex& m, const std::vector<int>& J,
                         const MultiIndex& d) {
    for (int s = 0; s < m.dims(); ++s) {
        if (std::find(J.begin(), J.end(), s) != J.end()) continue;
        if (m.e[(size_t)s] > d.e[(size_t)s]) return false;
    }
    return true;
}

} // namespace

std::size_t MomentTable::mindex(const MultiIndex& m) const {
    auto it = std::lower_bound(mlist.begin(), mlist.end(), m);
    if (it == mlist.end() || !(*it == m))
        throw precondition_error("moment exponent outside the stored range");
    return (std::size_t)(it - mlist.begin());
}

const Elem& MomentTable::value(int n, std::uint64_t idx, const MultiIndex& m) const {
    if (n < 0 || n > Nmax) throw precondition_error("moment level outside the stored range");
    if (idx >= v[(size_t)n].size()) throw precondition_error("coset index out of range");
    return v[(size_t)n][idx][mindex(m)];
}

Elem& MomentTable::slot(int n, std::uint64_t idx, const MultiIndex& m) {
    if (n < 0 || n > Nmax) throw precondition_error("moment level outside the stored range");
    if (idx >= v[(size_t)n].size()) throw precondition_error("coset index out of range");
    return v[(size_t)n][idx][mindex(m)];
}

MomentTable make_moment_table(const FieldPtr& K, int Nmax, long Mmax) {
    if (!K) throw precondition_error("moment table needs a field");
    if (Nmax < 0 || Mmax < 0) throw precondition_error("table bounds must be >= 0");
    MomentTable t;
    t.K = K;
    t.Nmax = Nmax;
    t.Mmax = Mmax;
    t.mlist = multi_indices_upto(K->f(), Mmax);
    std::uint64_t cells = 0;
    for (int n = 0; n <= Nmax; ++n) {
        std::uint64_t c = K->coset_count(n);
        cells += c * t.mlist.size();
        if (cells > kMaxTableCells) throw precondition_error("moment table too large");
    }
    t.v.resize((size_t)Nmax + 1);
    for (int n = 0; n <= Nmax; ++n)
        t.v[(size_t)n].assign(K->coset_count(n),
                              std::vector<Elem>(t.mlist.size(), K->zero()));
    return t;
}

MomentTable dirac(const FieldPtr& K, const Elem& a, int Nmax, long Mmax) {
    if (!a.is_integral()) throw precondition_error("dirac center must be integral");
    MomentTable t = make_moment_table(K, Nmax, Mmax);
    for (int n = 0; n <= Nmax; ++n) {
        std::uint64_t idx = K->coset_index_of(a, n);
        Elem delta = a - K->coset_rep(idx, n);
        for (std::size_t mi = 0; mi < t.mlist.size(); ++mi)
            t.v[(size_t)n][idx][mi] = K->monomial(delta, t.mlist[mi]);
    }
    return t;
}

namespace {

// parent value from the stored children through the binomial recentering
Elem rollup(const MomentTable& t, int n, std::uint64_t idx, const MultiIndex& m) {
    const Field& K = *t.K;
    Elem a = K.coset_rep(idx, n);
    std::uint64_t stride = K.coset_count(n);
    Elem acc = K.zero();
    for (long tt = 0; tt < K.q(); ++tt) {
        std::uint64_t child = idx + (std::uint64_t)tt * stride;
        Elem delta = K.coset_rep(child, n + 1) - a;
        for (const auto& k : t.mlist) {
            if (!k.leq(m)) continue;
            acc = acc + K.multi_binom_elem(m, k) * K.monomial(delta, m.minus(k)) *
                            t.v[(size_t)n + 1][child][t.mindex(k)];
        }
    }
    return acc;
}

} // namespace

MomentTable random_consistent(const FieldPtr& K, std::uint64_t seed, int Nmax, long Mmax,
                              long valuationFloor) {
    MomentTable t = make_moment_table(K, Nmax, Mmax);
    std::mt19937_64 rng(seed);
    for (auto& node : t.v[(size_t)Nmax])
        for (auto& cell : node)
            cell = K->random_elem(rng, valuationFloor, valuationFloor + 4, true);
    for (int n = Nmax - 1; n >= 0; --n)
        for (std::uint64_t idx = 0; idx < K->coset_count(n); ++idx)
            for (std::size_t mi = 0; mi < t.mlist.size(); ++mi)
                t.v[(size_t)n][idx][mi] = rollup(t, n, idx, t.mlist[mi]);
    return t;
}

MomentTable table_add(const MomentTable& a, const MomentTable& b) {
    if (a.K.get() != b.K.get() || a.Nmax != b.Nmax || a.Mmax != b.Mmax)
        throw precondition_error("table shapes differ");
    MomentTable t = a;
    for (std::size_t n = 0; n < t.v.size(); ++n)
        for (std::size_t i = 0; i < t.v[n].size(); ++i)
            for (std::size_t mi = 0; mi < t.mlist.size(); ++mi)
                t.v[n][i][mi] = t.v[n][i][mi] + b.v[n][i][mi];
    return t;
}

MomentTable table_scale(const MomentTable& a, const Elem& c) {
    MomentTable t = a;
    for (auto& lvl : t.v)
        for (auto& node : lvl)
            for (auto& cell : node) cell = cell * c;
    return t;
}

std::vector<ConsistencyViolation> consistency_check(const MomentTable& mu) {
    std::vector<ConsistencyViolation> out;
    for (int n = 0; n < mu.Nmax; ++n)
        for (std::uint64_t idx = 0; idx < mu.v[(size_t)n].size(); ++idx)
            for (std::size_t mi = 0; mi < mu.mlist.size(); ++mi) {
                Elem expect = rollup(mu, n, idx, mu.mlist[mi]);
                const Elem& stored = mu.v[(size_t)n][idx][mi];
                if (!(expect == stored))
                    out.push_back({n, idx, mu.mlist[mi], stored, expect});
            }
    return out;
}

Elem pair(const MomentTable& mu, const LocallyPolyFunction& f) {
    const Field& K = *mu.K;
    if (f.K.get() != mu.K.get()) throw precondition_error("field mismatch");
    if (f.level > mu.Nmax) throw coverage_error("function level exceeds table coverage");
    if (f.max_total_degree() > mu.Mmax)
        throw coverage_error("function degree exceeds table coverage");
    Elem acc = K.zero();
    for (const auto& [idx, p] : f.pieces)
        for (const auto& [m, c] : p.coeffs)
            acc = acc + c * mu.v[(size_t)f.level][idx][mu.mindex(m)];
    return acc;
}

Elem moment_at(const MomentTable& mu, const Elem& center, int level, const MultiIndex& m) {
    const Field& K = *mu.K;
    if (level > mu.Nmax) throw coverage_error("moment level exceeds table coverage");
    if (m.total() > mu.Mmax) throw coverage_error("moment degree exceeds table coverage");
    std::uint64_t idx = K.coset_index_of(center, level);
    Elem delta = K.coset_rep(idx, level) - center;
    Elem acc = K.zero();
    for (const auto& k : mu.mlist) {
        if (!k.leq(m)) continue;
        acc = acc + K.multi_binom_elem(m, k) * K.monomial(delta, m.minus(k)) *
                        mu.v[(size_t)level][idx][mu.mindex(k)];
    }
    return acc;
}

AvvReport avv_norm(const MomentTable& mu, const Rational& r, const std::vector<int>& J,
                   const MultiIndex& d) {
    const Field& K = *mu.K;
    if (r < Rational(0)) throw precondition_error("order r must be >= 0");
    if (d.dims() != K.f()) throw precondition_error("degree cap arity mismatch");
    AvvReport rep;
    rep.r = r;
    rep.constant = LogNorm::zero();
    for (int n = 0; n <= mu.Nmax; ++n)
        for (std::uint64_t idx = 0; idx < mu.v[(size_t)n].size(); ++idx)
            for (std::size_t mi = 0; mi < mu.mlist.size(); ++mi) {
                const MultiIndex& m = mu.mlist[mi];
                if (!admissible_exponent(m, J, d)) continue;
                const Elem& val = mu.v[(size_t)n][idx][mi];
                if (val.is_zero()) continue;
                LogNorm node{true, Rational(val.w()) +
                                       Rational(n) * (r - Rational(m.total()))};
                if (rep.witnessLevel < 0 || !(node < rep.constant)) {
                    rep.constant = node;
                    rep.witnessLevel = n;
                    rep.witnessCoset = idx;
                    rep.witnessM = m;
                }
            }
    return rep;
}

AvvReport velu_check(const MomentTable& mu, const Rational& r, const std::vector<int>& J,
                     const MultiIndex& d, const LogNorm& budget) {
    if (mu.Mmax < r.floor())
        throw precondition_error(
            "degree coverage below floor(r): growth hypothesis not representable");
    AvvReport rep = avv_norm(mu, r, J, d);
    rep.budget = budget;
    rep.satisfied = rep.constant <= budget;
    return rep;
}

MomentTable translate_scale_action(const MomentTable& mu, int n, const Elem& a,
                                   const InductionDatum& datum) {
    const Field& K = *mu.K;
    if (datum.K.get() != mu.K.get()) throw precondition_error("field mismatch");
    if (n < 0) throw precondition_error("scaling exponent must be >= 0");
    if (n > mu.Nmax) throw coverage_error("shifted disks exceed table coverage");
    if (!a.is_integral()) throw coverage_error("shifted disks exceed table coverage");

    MomentTable out = make_moment_table(mu.K, mu.Nmax - n, mu.Mmax);
    Elem chi2pin = chi_eval(datum.chi2, K.pi_pow(n));
    for (int k = 0; k <= out.Nmax; ++k)
        for (std::uint64_t idx = 0; idx < out.v[(size_t)k].size(); ++idx) {
            Elem c = a + K.pi_pow(n) * K.coset_rep(idx, k);
            for (std::size_t mi = 0; mi < out.mlist.size(); ++mi) {
                const MultiIndex& m = out.mlist[mi];
                Elem scale = chi2pin * K.monomial(K.pi_pow(n), datum.d.minus(m));
                out.v[(size_t)k][idx][mi] = scale * moment_at(mu, c, k + n, m);
            }
        }
    return out;
}

} // namespace padic
