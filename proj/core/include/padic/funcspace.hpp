#pragma once

/* Locally polynomial functions on O_F with multi-index exponents indexed by
 * the embeddings of F.  A function is stored as one polynomial piece per coset
 * of O_F/pi^h, each centered at the canonical coset representative; a missing
 * piece means the function vanishes there.  The C^r size of such a function is
 * reported as a certified interval: an enumerated lower bound and a rigorous
 * upper bound, both exact powers of q.
 */

#include "padic/field.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace padic {

// ---------------------------------------------------------------------------
// polynomial pieces

struct LocalPolynomial {
    Elem center;
    std::map<MultiIndex, Elem> coeffs; // finite support; zero entries pruned
};

Elem poly_eval(const LocalPolynomial& p, const Elem& z);
// exact Taylor shift; evaluation is unchanged at every point
LocalPolynomial poly_recenter(const LocalPolynomial& p, const Elem& newCenter);
LocalPolynomial poly_add(const LocalPolynomial& a, const LocalPolynomial& b); // same center
LocalPolynomial poly_scale(const LocalPolynomial& p, const Elem& c);
LocalPolynomial poly_mul(const LocalPolynomial& a, const LocalPolynomial& b); // same center
// formal partial derivative D_i (falling factorials) and its divided variant
// D_i/i!, whose coefficients are binomial(m,i) c_m
LocalPolynomial poly_derivative(const LocalPolynomial& p, const MultiIndex& i);
LocalPolynomial poly_divided_derivative(const LocalPolynomial& p, const MultiIndex& i);
// sup_m |c_m| q^{-level |m|}: the sup norm bound on D(center, level)
LogNorm poly_gauss_norm(const LocalPolynomial& p, int level);
long poly_max_total_degree(const LocalPolynomial& p);

// ---------------------------------------------------------------------------
// piecewise functions

struct LocallyPolyFunction {
    FieldPtr K;
    int level = 0; // h
    std::map<std::uint64_t, LocalPolynomial> pieces; // coset index at the level

    long max_total_degree() const;
};

LocallyPolyFunction lp_zero(const FieldPtr& K, int level = 0);
LocallyPolyFunction lp_constant(const FieldPtr& K, const Elem& c);
// z^m as a single level-0 piece
LocallyPolyFunction lp_monomial(const FieldPtr& K, const MultiIndex& m);
// 1_{D(a,n)} (z-a)^m
LocallyPolyFunction lp_indicator_monomial(const FieldPtr& K, const Elem& a, int n,
                                          const MultiIndex& m);
LocallyPolyFunction lp_indicator(const FieldPtr& K, const Elem& a, int n);

Elem evaluate(const LocallyPolyFunction& f, const Elem& z);
// the same function represented at a deeper level
LocallyPolyFunction refine(const LocallyPolyFunction& f, int newLevel);
LocallyPolyFunction lp_add(const LocallyPolyFunction& a, const LocallyPolyFunction& b);
LocallyPolyFunction lp_scale(const LocallyPolyFunction& f, const Elem& c);
LocallyPolyFunction derivative(const LocallyPolyFunction& f, const MultiIndex& i);
// degree <= d_sigma in every direction sigma outside J, on every piece
bool subspace_check(const LocallyPolyFunction& f, const std::vector<int>& J,
                    const MultiIndex& d);

// sup over pieces and exponents of |c_m| q^{-h|m|}
LogNorm norm_Fh(const LocallyPolyFunction& f);

/* Certified upper bound for the C^r norm
 *   sup( sup_{|i| <= [r]} |D_i f / i!|_sup , sup_{x,y} |eps_{f,[r]}(x,y)| / |y|^r )
 * obtained from Gauss norms: the divided-derivative sups exactly, the Taylor
 * remainder split into same-coset tails (degrees > [r], radius q^{-h}) and
 * coset-crossing pairs (|y| >= q^{-(h-1)}). */
LogNorm cr_norm_upper(const LocallyPolyFunction& f, const Rational& r);

/* Brute-force lower bound: both norm terms restricted to x over coset_reps(M)
 * and y over the nonzero representatives at level M together with pi^M.
 * Nondecreasing in M and always <= cr_norm_upper. */
LogNorm cr_norm_enum(const LocallyPolyFunction& f, const Rational& r, int M);
// default enumeration level used by the closed-form catalogue
int cr_norm_default_enum_level(const LocallyPolyFunction& f);

// g(z) = 1_{D(0,n)}(z) f(z / pi^n)
LocallyPolyFunction scale_into_disk(const LocallyPolyFunction& f, int n);

struct RemainderProfile {
    std::map<int, LogNorm> entries; // h -> sup |eps(x,y)| q^{rh}, y in pi^h reps
};
RemainderProfile remainder_profile(const LocallyPolyFunction& f, const Rational& r,
                                   int hMin, int hMax, int M);

} // namespace padic
