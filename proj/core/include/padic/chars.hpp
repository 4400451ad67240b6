#pragma once

/* Multiplicative characters F^x -> F^x of the shape
 *     chi(x) = lambda^{val_F(x)} * prod_sigma sigma(x)^{a_sigma} * smooth(u mod pi^c)
 * (x = pi^w u, u a unit): an unramified part, a signed algebraic monomial over
 * the embeddings, and a finite smooth part given by a table on the units
 * modulo pi^c.  Characters of this shape are exactly computable and admit
 * truncated local power-series expansions on disks with certified tails.
 */

#include "padic/field.hpp"
#include "padic/funcspace.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace padic {

struct Character {
    FieldPtr K;
    Elem lambda;                          // nonzero
    MultiIndex algExp;                    // signed exponent per embedding
    int conductor = 0;                    // 0 means trivial smooth part
    std::map<std::uint64_t, Elem> smooth; // unit rep index at the conductor level -> value
    std::vector<int> J;                   // declared analyticity directions
};

// validated constructors
Character make_character(const FieldPtr& K, const Elem& lambda, const MultiIndex& algExp,
                         int conductor, std::map<std::uint64_t, Elem> smooth,
                         std::vector<int> J = {});
Character trivial_character(const FieldPtr& K);
Character unramified_character(const FieldPtr& K, const Elem& lambda);
Character algebraic_character(const FieldPtr& K, const MultiIndex& algExp);

Character char_mul(const Character& a, const Character& b);
Character char_inv(const Character& a);

Elem chi_eval(const Character& chi, const Elem& x);
// val_p of chi(p), exact
Rational chi_val_p(const Character& chi);

// smallest disk level on which the smooth part is constant (>= 1), globally
// and around 1
int analyticity_level(const Character& chi);
int analyticity_level_at_1(const Character& chi);

/* Truncated expansion of chi on D(a, level) around a unit center a:
 *   chi(z) = sum_m b_m (z-a)^m,  b_m = chi(a) binom(algExp, m) a^{-m},
 * kept to total degree <= truncation.  tail bounds the sup of the dropped part
 * on the disk; it is exactly zero when the series terminates within the
 * truncation.  coefBound = max |b_m| (the expansion's C_1 constant). */
struct LocalExpansion {
    LocalPolynomial poly;
    LogNorm tail;
    LogNorm coefBound;
    bool exact = false;
};
LocalExpansion chi_local_expansion(const Character& chi, const Elem& a, int level,
                                   long truncation = 8);

} // namespace padic
