#include "padic/funcspace.hpp"

#include "padic/errors.hpp"

#include <algorithm>
#include <utility>

namespace padic {

namespace {

void prune_zero_coeffs(LocalPolynomial& p) {
    for (auto it = p.coeffs.begin(); it != p.coeffs.end();) {
        if (it->second.is_zero())
            it = p.coeffs.erase(it);
        else
            ++it;
    }
}

const Field& field_of(const LocallyPolyFunction& f) {
    if (!f.K) throw precondition_error("function has no field attached");
    return *f.K;
}

void check_same_function_field(const LocallyPolyFunction& a, const LocallyPolyFunction& b) {
    if (a.K.get() != b.K.get())
        throw precondition_error("functions live over different fields");
}

} // namespace

// ---------------------------------------------------------------------------
// polynomial pieces

Elem poly_eval(const LocalPolynomial& p, const Elem& z) {
    const Field& K = *z.field();
    Elem acc = K.zero();
    Elem delta = z - p.center;
    for (const auto& [m, c] : p.coeffs) acc = acc + c * K.monomial(delta, m);
    return acc;
}

LocalPolynomial poly_recenter(const LocalPolynomial& p, const Elem& newCenter) {
    const Field& K = *newCenter.field();
    Elem delta = newCenter - p.center;
    LocalPolynomial out;
    out.center = newCenter;
    if (delta.is_zero()) {
        out.coeffs = p.coeffs;
        return out;
    }
    for (const auto& [m, c] : p.coeffs) {
        // (z - a)^m = sum_{k <= m} binom(m,k) (a' - a)^{m-k} (z - a')^k
        for (const auto& k : multi_indices_upto(K.f(), m.total())) {
            if (!k.leq(m)) continue;
            Elem term = c * K.multi_binom_elem(m, k) * K.monomial(delta, m.minus(k));
            auto it = out.coeffs.find(k);
            if (it == out.coeffs.end())
                out.coeffs.emplace(k, term);
            else
                it->second = it->second + term;
        }
    }
    prune_zero_coeffs(out);
    return out;
}

LocalPolynomial poly_add(const LocalPolynomial& a, const LocalPolynomial& b) {
    if (!(a.center - b.center).is_zero())
        throw precondition_error("poly_add requires matching centers");
    LocalPolynomial out = a;
    for (const auto& [m, c] : b.coeffs) {
        auto it = out.coeffs.find(m);
        if (it == out.coeffs.end())
            out.coeffs.emplace(m, c);
        else
            it->second = it->second + c;
    }
    prune_zero_coeffs(out);
    return out;
}

LocalPolynomial poly_scale(const LocalPolynomial& p, const Elem& c) {
    LocalPolynomial out;
    out.center = p.center;
    if (c.is_zero()) return out;
    for (const auto& [m, a] : p.coeffs) out.coeffs.emplace(m, a * c);
    prune_zero_coeffs(out);
    return out;
}

LocalPolynomial poly_mul(const LocalPolynomial& a, const LocalPolynomial& b) {
    if (!(a.center - b.center).is_zero())
        throw precondition_error("poly_mul requires matching centers");
    LocalPolynomial out;
    out.center = a.center;
    for (const auto& [ma, ca] : a.coeffs)
        for (const auto& [mb, cb] : b.coeffs) {
            MultiIndex m = ma.plus(mb);
            Elem term = ca * cb;
            auto it = out.coeffs.find(m);
            if (it == out.coeffs.end())
                out.coeffs.emplace(m, term);
            else
                it->second = it->second + term;
        }
    prune_zero_coeffs(out);
    return out;
}

LocalPolynomial poly_divided_derivative(const LocalPolynomial& p, const MultiIndex& i) {
    const FieldPtr& Kp = p.center.field();
    LocalPolynomial out;
    out.center = p.center;
    for (const auto& [m, c] : p.coeffs) {
        if (!i.leq(m)) continue;
        Elem term = c * Kp->multi_binom_elem(m, i);
        if (!term.is_zero()) out.coeffs.emplace(m.minus(i), term);
    }
    return out;
}

LocalPolynomial poly_derivative(const LocalPolynomial& p, const MultiIndex& i) {
    const FieldPtr& Kp = p.center.field();
    return poly_scale(poly_divided_derivative(p, i), Kp->factorial_elem(i));
}

LogNorm poly_gauss_norm(const LocalPolynomial& p, int level) {
    LogNorm best = LogNorm::zero();
    for (const auto& [m, c] : p.coeffs) {
        if (c.is_zero()) continue;
        LogNorm term{true, Rational(c.w() + static_cast<long long>(level) * m.total())};
        best = max(best, term);
    }
    return best;
}

long poly_max_total_degree(const LocalPolynomial& p) {
    long d = 0;
    for (const auto& [m, c] : p.coeffs) d = std::max(d, m.total());
    return d;
}

// ---------------------------------------------------------------------------
// piecewise functions

long LocallyPolyFunction::max_total_degree() const {
    long d = 0;
    for (const auto& [idx, p] : pieces) d = std::max(d, poly_max_total_degree(p));
    return d;
}

LocallyPolyFunction lp_zero(const FieldPtr& K, int level) {
    if (level < 0) throw precondition_error("piece level must be >= 0");
    LocallyPolyFunction f;
    f.K = K;
    f.level = level;
    return f;
}

LocallyPolyFunction lp_constant(const FieldPtr& K, const Elem& c) {
    LocallyPolyFunction f = lp_zero(K, 0);
    if (!c.is_zero()) {
        LocalPolynomial p;
        p.center = K->zero();
        p.coeffs.emplace(MultiIndex(K->f()), c);
        f.pieces.emplace(0, std::move(p));
    }
    return f;
}

LocallyPolyFunction lp_monomial(const FieldPtr& K, const MultiIndex& m) {
    if (m.dims() != K->f() || !m.nonneg())
        throw precondition_error("monomial exponent must be nonnegative of matching arity");
    LocallyPolyFunction f = lp_zero(K, 0);
    LocalPolynomial p;
    p.center = K->zero();
    p.coeffs.emplace(m, K->from_int(1));
    f.pieces.emplace(0, std::move(p));
    return f;
}

LocallyPolyFunction lp_indicator_monomial(const FieldPtr& K, const Elem& a, int n,
                                          const MultiIndex& m) {
    if (n < 0) throw precondition_error("disk level must be >= 0");
    if (!a.is_integral()) throw precondition_error("disk center must be integral");
    if (m.dims() != K->f() || !m.nonneg())
        throw precondition_error("monomial exponent must be nonnegative of matching arity");
    LocallyPolyFunction f = lp_zero(K, n);
    std::uint64_t idx = K->coset_index_of(a, n);
    LocalPolynomial p;
    p.center = a;
    p.coeffs.emplace(m, K->from_int(1));
    f.pieces.emplace(idx, poly_recenter(p, K->coset_rep(idx, n)));
    return f;
}

LocallyPolyFunction lp_indicator(const FieldPtr& K, const Elem& a, int n) {
    return lp_indicator_monomial(K, a, n, MultiIndex(K->f()));
}

Elem evaluate(const LocallyPolyFunction& f, const Elem& z) {
    const Field& K = field_of(f);
    std::uint64_t idx = K.coset_index_of(z, f.level);
    auto it = f.pieces.find(idx);
    if (it == f.pieces.end()) return K.zero();
    return poly_eval(it->second, z);
}

LocallyPolyFunction refine(const LocallyPolyFunction& f, int newLevel) {
    const Field& K = field_of(f);
    if (newLevel < f.level) throw precondition_error("refine cannot coarsen the level");
    if (newLevel == f.level) return f;
    LocallyPolyFunction out = lp_zero(f.K, newLevel);
    std::uint64_t stride = K.coset_count(f.level);
    std::uint64_t children = K.coset_count(newLevel) / stride;
    for (const auto& [idx, p] : f.pieces) {
        for (std::uint64_t s = 0; s < children; ++s) {
            std::uint64_t cidx = idx + s * stride;
            LocalPolynomial cp = poly_recenter(p, K.coset_rep(cidx, newLevel));
            if (!cp.coeffs.empty()) out.pieces.emplace(cidx, std::move(cp));
        }
    }
    return out;
}

LocallyPolyFunction lp_add(const LocallyPolyFunction& a, const LocallyPolyFunction& b) {
    check_same_function_field(a, b);
    int level = std::max(a.level, b.level);
    LocallyPolyFunction ra = refine(a, level);
    LocallyPolyFunction rb = refine(b, level);
    for (auto& [idx, p] : rb.pieces) {
        auto it = ra.pieces.find(idx);
        if (it == ra.pieces.end()) {
            ra.pieces.emplace(idx, std::move(p));
        } else {
            it->second = poly_add(it->second, p);
            if (it->second.coeffs.empty()) ra.pieces.erase(it);
        }
    }
    return ra;
}

LocallyPolyFunction lp_scale(const LocallyPolyFunction& f, const Elem& c) {
    LocallyPolyFunction out = lp_zero(f.K, f.level);
    if (c.is_zero()) return out;
    for (const auto& [idx, p] : f.pieces) {
        LocalPolynomial sp = poly_scale(p, c);
        if (!sp.coeffs.empty()) out.pieces.emplace(idx, std::move(sp));
    }
    return out;
}

LocallyPolyFunction derivative(const LocallyPolyFunction& f, const MultiIndex& i) {
    LocallyPolyFunction out = lp_zero(f.K, f.level);
    for (const auto& [idx, p] : f.pieces) {
        LocalPolynomial dp = poly_derivative(p, i);
        prune_zero_coeffs(dp);
        if (!dp.coeffs.empty()) out.pieces.emplace(idx, std::move(dp));
    }
    return out;
}

bool subspace_check(const LocallyPolyFunction& f, const std::vector<int>& J,
                    const MultiIndex& d) {
    const Field& K = field_of(f);
    if (d.dims() != K.f()) throw precondition_error("degree cap arity mismatch");
    std::vector<bool> inJ(static_cast<std::size_t>(K.f()), false);
    for (int s : J) {
        if (s < 0 || s >= K.f()) throw precondition_error("embedding index out of range");
        inJ[static_cast<std::size_t>(s)] = true;
    }
    for (const auto& [idx, p] : f.pieces)
        for (const auto& [m, c] : p.coeffs)
            for (int s = 0; s < K.f(); ++s)
                if (!inJ[static_cast<std::size_t>(s)] && m.e[(size_t)s] > d.e[(size_t)s]) return false;
    return true;
}

LogNorm norm_Fh(const LocallyPolyFunction& f) {
    LogNorm best = LogNorm::zero();
    for (const auto& [idx, p] : f.pieces)
        best = max(best, poly_gauss_norm(p, f.level));
    return best;
}

LogNorm cr_norm_upper(const LocallyPolyFunction& f, const Rational& r) {
    const Field& K = field_of(f);
    if (r < Rational(0)) throw precondition_error("order r must be >= 0");
    long R = r.floor();
    int h = f.level;
    LogNorm best = LogNorm::zero();
    long maxDeg = f.max_total_degree();

    // divided-derivative sups, plus the coset-crossing amplification when the
    // cover is finer than O_F itself (|y| >= q^{-(h-1)} across pieces)
    for (const auto& i : multi_indices_upto(K.f(), R)) {
        LogNorm Mi = LogNorm::zero();
        for (const auto& [idx, p] : f.pieces)
            Mi = max(Mi, poly_gauss_norm(poly_divided_derivative(p, i), h));
        best = max(best, Mi);
        if (h >= 1 && Mi.finite) {
            Rational amp = Rational(h - 1) * (r - Rational(i.total()));
            best = max(best, LogNorm{true, Mi.t - amp});
        }
    }

    // same-coset Taylor tails: degrees above [r] at radius q^{-h}
    for (const auto& [idx, p] : f.pieces) {
        for (const auto& k : multi_indices_upto(K.f(), maxDeg)) {
            if (k.total() <= R) continue;
            LogNorm g = poly_gauss_norm(poly_divided_derivative(p, k), h);
            if (!g.finite) continue;
            Rational drop = Rational(h) * (Rational(k.total()) - r);
            best = max(best, LogNorm{true, g.t + drop});
        }
    }
    return best;
}

namespace {

std::vector<Elem> enum_offsets(const Field& K, int M) {
    // nonzero representatives at level M, together with pi^M: every valuation
    // 0..M is reached and units at each depth are exhausted modulo pi^M
    std::vector<Elem> ys;
    std::uint64_t count = K.coset_count(M);
    ys.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t idx = 1; idx < count; ++idx) ys.push_back(K.coset_rep(idx, M));
    ys.push_back(K.pi_pow(M));
    return ys;
}

} // namespace

LogNorm cr_norm_enum(const LocallyPolyFunction& f, const Rational& r, int M) {
    const Field& K = field_of(f);
    if (r < Rational(0)) throw precondition_error("order r must be >= 0");
    if (M < f.level) throw precondition_error("enumeration level must refine the piece level");
    long R = r.floor();

    std::vector<MultiIndex> order = multi_indices_upto(K.f(), R);
    std::vector<LocallyPolyFunction> divided;
    divided.reserve(order.size());
    for (const auto& i : order) {
        LocallyPolyFunction fi = lp_zero(f.K, f.level);
        for (const auto& [idx, p] : f.pieces) {
            LocalPolynomial dp = poly_divided_derivative(p, i);
            prune_zero_coeffs(dp);
            if (!dp.coeffs.empty()) fi.pieces.emplace(idx, std::move(dp));
        }
        divided.push_back(std::move(fi));
    }

    std::vector<Elem> xs = K.coset_reps(M);
    std::vector<Elem> ys = enum_offsets(K, M);

    LogNorm best = LogNorm::zero();
    std::vector<Elem> dvals;
    dvals.reserve(order.size());
    for (const Elem& x : xs) {
        dvals.clear();
        for (std::size_t t = 0; t < order.size(); ++t) {
            Elem v = evaluate(divided[t], x);
            best = max(best, v.norm());
            dvals.push_back(std::move(v));
        }
        for (const Elem& y : ys) {
            Elem eps = evaluate(f, x + y);
            for (std::size_t t = 0; t < order.size(); ++t)
                eps = eps - dvals[t] * K.monomial(y, order[t]);
            if (eps.is_zero()) continue;
            best = max(best, LogNorm{true, Rational(eps.w()) - Rational(y.w()) * r});
        }
    }
    return best;
}

int cr_norm_default_enum_level(const LocallyPolyFunction& f) {
    const Field& K = field_of(f);
    int M = f.level + static_cast<int>(std::min<long>(f.max_total_degree(), 8)) + 2;
    // keep the x,y double loop near or below ~4M pairs
    while (M > f.level) {
        long double pairs = 1.0L;
        for (int i = 0; i < 2 * M; ++i) pairs *= static_cast<long double>(K.q());
        if (pairs <= 4.0e6L) break;
        --M;
    }
    return std::max(M, f.level);
}

LocallyPolyFunction scale_into_disk(const LocallyPolyFunction& f, int n) {
    const Field& K = field_of(f);
    if (n < 0) throw precondition_error("disk level must be >= 0");
    LocallyPolyFunction out = lp_zero(f.K, f.level + n);
    std::uint64_t stride = K.coset_count(n);
    for (const auto& [idx, p] : f.pieces) {
        LocalPolynomial sp;
        sp.center = K.pi_pow(n) * p.center;
        for (const auto& [m, c] : p.coeffs)
            sp.coeffs.emplace(m, c * K.pi_pow(-n * m.total()));
        out.pieces.emplace(idx * stride, std::move(sp));
    }
    return out;
}

RemainderProfile remainder_profile(const LocallyPolyFunction& f, const Rational& r,
                                   int hMin, int hMax, int M) {
    const Field& K = field_of(f);
    if (hMin < 0 || hMax < hMin) throw precondition_error("bad level window");
    if (M <= hMax) throw precondition_error("enumeration level must exceed the window");
    long R = r.floor();

    std::vector<MultiIndex> order = multi_indices_upto(K.f(), R);
    std::vector<LocallyPolyFunction> divided;
    divided.reserve(order.size());
    for (const auto& i : order) {
        LocallyPolyFunction fi = lp_zero(f.K, f.level);
        for (const auto& [idx, p] : f.pieces) {
            LocalPolynomial dp = poly_divided_derivative(p, i);
            prune_zero_coeffs(dp);
            if (!dp.coeffs.empty()) fi.pieces.emplace(idx, std::move(dp));
        }
        divided.push_back(std::move(fi));
    }
    std::vector<Elem> xs = K.coset_reps(M);

    RemainderProfile prof;
    for (int h = hMin; h <= hMax; ++h) {
        LogNorm worst = LogNorm::zero();
        std::vector<Elem> inner = K.coset_reps(M - h);
        for (const Elem& x : xs) {
            std::vector<Elem> dvals;
            dvals.reserve(order.size());
            for (const auto& fi : divided) dvals.push_back(evaluate(fi, x));
            for (const Elem& u : inner) {
                if (u.is_zero()) continue;
                Elem y = K.pi_pow(h) * u;
                Elem eps = evaluate(f, x + y);
                for (std::size_t t = 0; t < order.size(); ++t)
                    eps = eps - dvals[t] * K.monomial(y, order[t]);
                if (eps.is_zero()) continue;
                worst = max(worst, LogNorm{true, Rational(eps.w()) - r * Rational(h)});
            }
        }
        prof.entries.emplace(h, worst);
    }
    return prof;
}

} // namespace padic
