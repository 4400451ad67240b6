#pragma once

/* Certified local power-series germs.  A germ is a truncated expansion about a
 * disk center together with a sup bound for everything that was dropped, so a
 * pairing against a moment table splits into an exactly computed value plus a
 * rigorous slack term.  Character germs at centers away from 0 are produced by
 * factoring out the valuation and expanding the unit part.
 */

#include "padic/chars.hpp"
#include "padic/dist.hpp"
#include "padic/field.hpp"
#include "padic/funcspace.hpp"

namespace padic {

struct LocalGerm {
    LocalPolynomial poly; // truncated expansion about poly.center
    int level = 0;        // valid on D(center, level)
    LogNorm tail;         // sup bound on the dropped remainder over the disk
    bool exact = false;   // true when the remainder vanishes identically
};

LocalGerm germ_constant(const Elem& value, const Elem& center, int level);
LocalGerm germ_from_polynomial(const LocalPolynomial& p, int level);

/* Expansion of chi on D(center, level); requires the disk to avoid 0
 * (level > w(center)) and to sit inside the analyticity radius of chi around
 * the unit part of its center.  Terms of total degree > T go into the tail. */
LocalGerm char_germ(const Character& chi, const Elem& center, int level, long T);
// expansion of z |-> chi(b0 + b1 z) on D(center, level)
LocalGerm char_germ_affine(const Character& chi, const Elem& b0, const Elem& b1,
                           const Elem& center, int level, long T);

LocalGerm germ_scale(const LocalGerm& g, const Elem& c);
// product on a common disk, truncated past total degree T
LocalGerm germ_product(const LocalGerm& a, const LocalGerm& b, long T);

// sup bound for the full germ (kept terms and tail) over its disk
LogNorm germ_gauss_bound(const LocalGerm& g);

struct GermPairing {
    Elem value;    // pairing of the kept terms within table coverage
    LogNorm slack; // bound on the contribution of everything else
};

/* Pair a germ against mu using the stored moments on the germ's disk.  C must
 * bound the order-r dual norm of mu; kept terms beyond the table's degree
 * coverage are bounded into the slack like the tail. */
GermPairing pair_germ(const MomentTable& mu, const LocalGerm& g, const Rational& r,
                      const LogNorm& C);

} // namespace padic
