#include "padic/chars.hpp"

#include "padic/errors.hpp"

#include <algorithm>

namespace padic {

namespace {

std::vector<int> normalize_J(const Field& K, std::vector<int> J) {
    std::sort(J.begin(), J.end());
    J.erase(std::unique(J.begin(), J.end()), J.end());
    for (int s : J)
        if (s < 0 || s >= K.f()) throw precondition_error("embedding index out of range");
    return J;
}

void validate_smooth(const Field& K, int conductor,
                     const std::map<std::uint64_t, Elem>& table) {
    if (conductor < 0) throw precondition_error("conductor must be >= 0");
    if (conductor == 0) {
        if (!table.empty())
            throw precondition_error("trivial smooth part must have an empty table");
        return;
    }
    std::vector<std::uint64_t> units = K.unit_rep_indices(conductor);
    if (table.size() != units.size())
        throw precondition_error("smooth table must cover exactly the units at its level");
    for (std::uint64_t u : units) {
        auto it = table.find(u);
        if (it == table.end())
            throw precondition_error("smooth table is missing a unit representative");
        if (it->second.is_zero() || it->second.w() != 0)
            throw precondition_error("smooth values must be units");
    }
    // full multiplicativity on the finite group
    for (std::uint64_t u : units)
        for (std::uint64_t v : units) {
            Elem prod = K.coset_rep(u, conductor) * K.coset_rep(v, conductor);
            std::uint64_t uv = K.coset_index_of(prod, conductor);
            if (!(table.at(uv) == table.at(u) * table.at(v)))
                throw precondition_error("smooth table is not multiplicative");
        }
}

} // namespace

Character make_character(const FieldPtr& K, const Elem& lambda, const MultiIndex& algExp,
                         int conductor, std::map<std::uint64_t, Elem> smooth,
                         std::vector<int> J) {
    if (!K) throw precondition_error("character needs a field");
    if (lambda.is_zero()) throw precondition_error("unramified part must be nonzero");
    if (algExp.dims() != K->f())
        throw precondition_error("algebraic exponent arity must match the embedding count");
    validate_smooth(*K, conductor, smooth);
    Character chi;
    chi.K = K;
    chi.lambda = lambda;
    chi.algExp = algExp;
    chi.conductor = conductor;
    chi.smooth = std::move(smooth);
    chi.J = normalize_J(*K, std::move(J));
    return chi;
}

Character trivial_character(const FieldPtr& K) {
    return make_character(K, K->from_int(1), MultiIndex(K->f()), 0, {});
}

Character unramified_character(const FieldPtr& K, const Elem& lambda) {
    return make_character(K, lambda, MultiIndex(K->f()), 0, {});
}

Character algebraic_character(const FieldPtr& K, const MultiIndex& algExp) {
    return make_character(K, K->from_int(1), algExp, 0, {});
}

Character char_mul(const Character& a, const Character& b) {
    if (a.K.get() != b.K.get())
        throw precondition_error("characters live over different fields");
    const Field& K = *a.K;
    int c = std::max(a.conductor, b.conductor);
    std::map<std::uint64_t, Elem> table;
    if (c > 0) {
        std::uint64_t qa = K.coset_count(a.conductor);
        std::uint64_t qb = K.coset_count(b.conductor);
        for (std::uint64_t u : K.unit_rep_indices(c)) {
            Elem v = K.from_int(1);
            if (a.conductor > 0) v = v * a.smooth.at(u % qa);
            if (b.conductor > 0) v = v * b.smooth.at(u % qb);
            table.emplace(u, v);
        }
    }
    std::vector<int> J = a.J;
    J.insert(J.end(), b.J.begin(), b.J.end());
    return make_character(a.K, a.lambda * b.lambda, a.algExp.plus(b.algExp), c,
                          std::move(table), std::move(J));
}

Character char_inv(const Character& a) {
    std::map<std::uint64_t, Elem> table;
    for (const auto& [u, v] : a.smooth) table.emplace(u, v.inv());
    return make_character(a.K, a.lambda.inv(), MultiIndex(a.algExp.dims()).minus(a.algExp),
                          a.conductor, std::move(table), a.J);
}

Elem chi_eval(const Character& chi, const Elem& x) {
    if (x.is_zero()) throw precondition_error("chi_eval: argument must be nonzero");
    const Field& K = *chi.K;
    long w = x.w();
    Elem out = chi.lambda.pow(static_cast<long long>(K.f()) * w);
    out = out * K.monomial(x, chi.algExp);
    if (chi.conductor > 0) {
        Elem u = x * K.pi_pow(-w);
        out = out * chi.smooth.at(K.coset_index_of(u, chi.conductor));
    }
    return out;
}

Rational chi_val_p(const Character& chi) {
    Elem v = chi_eval(chi, chi.K->pi_pow(1));
    return v.val_F() / Rational(chi.K->e() * chi.K->f());
}

int analyticity_level(const Character& chi) { return std::max(chi.conductor, 1); }

int analyticity_level_at_1(const Character& chi) { return std::max(chi.conductor, 1); }

LocalExpansion chi_local_expansion(const Character& chi, const Elem& a, int level,
                                   long truncation) {
    const Field& K = *chi.K;
    if (a.is_zero() || a.w() != 0)
        throw precondition_error("expansion center must be a unit");
    if (level < analyticity_level(chi))
        throw precondition_error("disk level is below the analyticity level");
    if (truncation < 0) throw precondition_error("truncation must be >= 0");

    Elem chiA = chi_eval(chi, a);
    LocalExpansion ex;
    ex.poly.center = a;
    ex.coefBound = LogNorm::zero();
    for (const auto& m : multi_indices_upto(K.f(), truncation)) {
        long long bc = multi_binom(chi.algExp, m);
        if (bc == 0) continue;
        Elem b = chiA * K.from_int(bc) * K.monomial(a, MultiIndex(K.f()).minus(m));
        if (b.is_zero()) continue;
        ex.coefBound = max(ex.coefBound, b.norm());
        ex.poly.coeffs.emplace(m, std::move(b));
    }
    ex.exact = chi.algExp.nonneg() && chi.algExp.total() <= truncation;
    if (ex.exact) {
        ex.tail = LogNorm::zero();
    } else {
        // |b_m (z-a)^m| <= |chi(a)| q^{-level |m|}, dropped degrees start at
        // truncation + 1
        ex.tail = LogNorm{true, Rational(chiA.w() +
                                         static_cast<long long>(level) * (truncation + 1))};
    }
    return ex;
}

} // namespace padic
