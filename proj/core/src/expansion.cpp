#include "padic/expansion.hpp"

#include "padic/errors.hpp"

namespace padic {

namespace {

// largest Gauss term of the coefficients with total degree above cutoff
LogNorm dropped_gauss(const LocalPolynomial& p, int level, long cutoff) {
    LogNorm out = LogNorm::zero();
    for (const auto& [m, c] : p.coeffs) {
        if (m.total() <= cutoff || c.is_zero()) continue;
        LogNorm term{true, Rational(c.w()) + Rational(level) * Rational(m.total())};
        out = max(out, term);
    }
    return out;
}

LocalPolynomial truncated(const LocalPolynomial& p, long cutoff) {
    LocalPolynomial out;
    out.center = p.center;
    for (const auto& [m, c] : p.coeffs)
        if (m.total() <= cutoff && !c.is_zero()) out.coeffs.emplace(m, c);
    return out;
}

} // namespace

LocalGerm germ_constant(const Elem& value, const Elem& center, int level) {
    LocalGerm g;
    g.poly.center = center;
    if (!value.is_zero()) g.poly.coeffs.emplace(MultiIndex(value.field()->f()), value);
    g.level = level;
    g.tail = LogNorm::zero();
    g.exact = true;
    return g;
}

LocalGerm germ_from_polynomial(const LocalPolynomial& p, int level) {
    LocalGerm g;
    g.poly = p;
    g.level = level;
    g.tail = LogNorm::zero();
    g.exact = true;
    return g;
}

LocalGerm char_germ(const Character& chi, const Elem& center, int level, long T) {
    const FieldPtr& K = chi.K;
    if (center.is_zero()) throw precondition_error("character germ needs a nonzero center");
    if (!center.is_integral())
        throw precondition_error("character germ centers must be integral");
    long t = center.w();
    if (level <= t) throw precondition_error("germ disk must avoid 0");
    Elem u = center * K->pi_pow(-t);
    LocalExpansion le = chi_local_expansion(chi, u, level - (int)t, T);
    Elem head = chi_eval(chi, K->pi_pow(t));

    LocalGerm g;
    g.poly.center = center;
    for (const auto& [m, c] : le.poly.coeffs) {
        Elem scaled = head * c * K->pi_pow(-t * m.total());
        if (!scaled.is_zero()) g.poly.coeffs.emplace(m, scaled);
    }
    g.level = level;
    g.tail = le.exact ? LogNorm::zero() : head.norm() * le.tail;
    g.exact = le.exact;
    return g;
}

LocalGerm char_germ_affine(const Character& chi, const Elem& b0, const Elem& b1,
                           const Elem& center, int level, long T) {
    const FieldPtr& K = chi.K;
    if (b1.is_zero()) return germ_constant(chi_eval(chi, b0), center, level);
    Elem argCenter = b0 + b1 * center;
    LocalGerm base = char_germ(chi, argCenter, level + (int)b1.w(), T);
    LocalGerm g;
    g.poly.center = center;
    for (const auto& [m, c] : base.poly.coeffs) {
        Elem scaled = c * K->monomial(b1, m);
        if (!scaled.is_zero()) g.poly.coeffs.emplace(m, scaled);
    }
    g.level = level;
    g.tail = base.tail;
    g.exact = base.exact;
    return g;
}

LocalGerm germ_scale(const LocalGerm& g, const Elem& c) {
    LocalGerm out = g;
    out.poly = poly_scale(g.poly, c);
    out.tail = c.norm() * g.tail;
    return out;
}

LocalGerm germ_product(const LocalGerm& a, const LocalGerm& b, long T) {
    if (!(a.poly.center == b.poly.center) || a.level != b.level)
        throw precondition_error("germ product needs a common disk");
    LocalPolynomial prod = poly_mul(a.poly, b.poly);
    LogNorm ga = poly_gauss_norm(a.poly, a.level);
    LogNorm gb = poly_gauss_norm(b.poly, b.level);
    LogNorm tail = max(max(ga * b.tail, gb * a.tail), a.tail * b.tail);
    tail = max(tail, dropped_gauss(prod, a.level, T));

    LocalGerm out;
    out.poly = truncated(prod, T);
    out.level = a.level;
    out.tail = tail;
    out.exact = a.exact && b.exact && tail.is_zero() &&
                poly_max_total_degree(prod) <= T;
    return out;
}

LogNorm germ_gauss_bound(const LocalGerm& g) {
    return max(poly_gauss_norm(g.poly, g.level), g.tail);
}

GermPairing pair_germ(const MomentTable& mu, const LocalGerm& g, const Rational& r,
                      const LogNorm& C) {
    const Field& K = *mu.K;
    if (g.level > mu.Nmax) throw coverage_error("germ disk below table coverage");
    GermPairing out;
    out.value = K.zero();
    LogNorm uncovered = g.tail;
    for (const auto& [m, c] : g.poly.coeffs) {
        if (m.total() <= mu.Mmax) {
            out.value = out.value + c * moment_at(mu, g.poly.center, g.level, m);
        } else {
            LogNorm term{true, Rational(c.w()) + Rational(g.level) * Rational(m.total())};
            uncovered = max(uncovered, term);
        }
    }
    out.slack = C * LogNorm::from_exponent(-Rational(g.level) * r) * uncovered;
    return out;
}

} // namespace padic
