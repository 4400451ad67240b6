#pragma once

/* Exact arithmetic in an unramified extension F of Q_p.
 *
 * Conventions used throughout the library:
 *   - only e = 1 is supported, so pi = p and q = p^f;
 *   - w denotes the pi-adic valuation, |x| = q^{-w}, val_F(x) = f*w
 *     (normalized so that val_F(p) = [F:Q_p]);
 *   - elements are stored as p^w * (unit part), the unit part carried as f
 *     coordinates in Z/p^N with respect to the basis 1, omega, ..., omega^{f-1},
 *     where omega is a root of the lexicographically smallest monic irreducible
 *     polynomial of degree f over F_p (plain polynomial lifts, digits in 0..p-1);
 *   - precision is absolute: an element "known mod pi^N" never reports more
 *     digits than its inputs justify (min under addition, shifted sum under
 *     multiplication).
 * Embeddings of F into itself are realized as powers of the Frobenius
 * automorphism, computed by Hensel-lifting a root of the modulus.
 */

#include "padic/errors.hpp"
#include "padic/rational.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

namespace padic {

// ---------------------------------------------------------------------------
// multi-indices over the set of embeddings

struct MultiIndex {
    std::vector<long> e;

    MultiIndex() = default;
    explicit MultiIndex(int dims) : e((size_t)dims, 0) {}
    MultiIndex(std::initializer_list<long> v) : e(v) {}

    int dims() const { return (int)e.size(); }
    long total() const {
        long s = 0;
        for (long x : e) s += x;
        return s;
    }
    bool nonneg() const {
        for (long x : e)
            if (x < 0) return false;
        return true;
    }
    bool is_zero() const { return total() == 0 && nonneg(); }
    bool leq(const MultiIndex& o) const { // componentwise
        for (int i = 0; i < dims(); ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }
    MultiIndex plus(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (int i = 0; i < dims(); ++i) r.e[i] += o.e[i];
        return r;
    }
    MultiIndex minus(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (int i = 0; i < dims(); ++i) r.e[i] -= o.e[i];
        return r;
    }
    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.e == b.e; }
    // graded lexicographic: deterministic enumeration and map order
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
        if (a.total() != b.total()) return a.total() < b.total();
        return a.e < b.e;
    }
    std::string str() const;
};

// product of componentwise binomials; entries of m may be negative
long long multi_binom(const MultiIndex& m, const MultiIndex& k);
long long binom_ll(long long a, long long k);
// all m >= 0 with |m| <= maxTotal, in graded-lex order
std::vector<MultiIndex> multi_indices_upto(int dims, long maxTotal);

// ---------------------------------------------------------------------------

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class Elem {
  public:
    Elem() = default;

    const FieldPtr& field() const { return F_; }
    bool is_zero() const { return co_.empty(); }       // zero at its precision
    bool is_exact_zero() const;
    long w() const;                                    // pi-adic valuation
    Rational val_F() const;                            // f * w
    Rational val_p() const;                            // = w for e = 1
    long long abs_prec() const { return prec_; }       // known mod pi^prec
    int rel_prec() const { return co_.empty() ? 0 : rel_; }
    LogNorm norm() const;                              // q^{-w}, 0 for zero

    Elem operator-() const;
    friend Elem operator+(const Elem& a, const Elem& b);
    friend Elem operator-(const Elem& a, const Elem& b);
    friend Elem operator*(const Elem& a, const Elem& b);
    Elem inv() const;
    Elem pow(long long k) const;
    Elem& operator+=(const Elem& o) { return *this = *this + o; }
    Elem& operator-=(const Elem& o) { return *this = *this - o; }
    Elem& operator*=(const Elem& o) { return *this = *this * o; }
    // equality at the common precision
    friend bool operator==(const Elem& a, const Elem& b) { return (a - b).is_zero(); }
    friend bool operator!=(const Elem& a, const Elem& b) { return !(a == b); }

    Elem truncated(long long absPrec) const;
    bool is_unit() const { return !is_zero() && w() == 0; }
    bool is_integral() const { return is_zero() || w() >= 0; }

    // residue digits of the unit part, least significant first (indices in [0,q))
    std::vector<long> unit_digits() const;
    // unit-part coordinates mod p^rel
    const std::vector<std::uint64_t>& coords() const { return co_; }

    std::string str() const;

  private:
    friend class Field;
    FieldPtr F_;
    long w_ = 0;
    int rel_ = 0;
    long long prec_ = 0;             // absolute precision
    std::vector<std::uint64_t> co_;  // empty <=> zero at prec_
};

class Field : public std::enable_shared_from_this<Field> {
  public:
    // prec = 0 selects the default precision: min(32, largest N with p^N < 2^62)
    static FieldPtr make(long p, int f, int prec = 0);

    long p() const { return p_; }
    int f() const { return f_; }
    long q() const { return q_; }
    int e() const { return 1; }
    int prec() const { return prec_; }
    const std::vector<long>& modulus() const { return mod_; }
    std::uint64_t p_pow(int k) const { return pk_[(size_t)k]; }

    static const long long kExactPrec = (1LL << 40);

    // --- element construction
    Elem zero() const;                       // exact zero
    Elem zero_at(long long absPrec) const;
    Elem from_int(long long v) const;
    Elem from_ratio(long long a, long long b) const;
    Elem from_unit_coords(std::vector<std::uint64_t> co, long w, int rel) const;
    // value with given residue digits (indices in [0,q)), as an exact integer
    Elem from_digits(const std::vector<long>& digits) const;
    Elem pi_pow(long k) const;               // p^k

    // --- cosets of O_F / pi^k, enumerated in the canonical digit order:
    // index idx = sum t_i q^i  <->  representative sum lift(t_i) p^i.
    // Representatives at level k+1 refine those at level k (idx mod q^k).
    std::uint64_t coset_count(int k) const;
    Elem coset_rep(std::uint64_t idx, int k) const;
    std::vector<Elem> coset_reps(int k) const;
    std::vector<std::uint64_t> unit_rep_indices(int k) const; // leading digit nonzero
    // coset of an integral element; requires abs precision >= k
    std::uint64_t coset_index_of(const Elem& x, int k) const;

    // --- Galois / residue structure
    Elem frobenius(const Elem& x, int i) const;  // phi^i, phi the Frobenius lift
    Elem teichmuller(long digitIndex) const;     // root of x^q = x lifting the digit
    // prod_sigma phi^sigma(z)^{m_sigma}; negative entries invert
    Elem monomial(const Elem& z, const MultiIndex& m) const;
    Elem multi_binom_elem(const MultiIndex& m, const MultiIndex& k) const;
    Elem factorial_elem(const MultiIndex& m) const;

    // uniform sample with valuation in [wmin, wmax] (or zero when allowZero)
    Elem random_elem(std::mt19937_64& rng, long wmin, long wmax, bool allowZero = false) const;

    // residue-digit helpers (digit index <-> polynomial coefficients)
    std::vector<long> digit_coeffs(long digitIndex) const;
    long digit_index(const std::vector<long>& coeffs) const;

  private:
    Field(long p, int f, int prec);
    void build_modulus();
    void build_frobenius();

    // unit-part coordinate ring helpers, mod p^R
    using Coords = std::vector<std::uint64_t>;
    Coords rmul(const Coords& a, const Coords& b, int R) const;
    Coords radd(const Coords& a, const Coords& b, int R) const;
    Coords rneg(const Coords& a, int R) const;
    Coords rscale(const Coords& a, std::uint64_t s, int R) const;
    Coords rpow(Coords a, unsigned long long k, int R) const;
    Coords runit_inv(const Coords& a, int R) const;
    Coords apply_matrix(const std::vector<Coords>& m, const Coords& a, int R) const;
    friend class Elem;
    friend Elem operator*(const Elem& a, const Elem& b);

    long p_;
    int f_;
    int prec_;
    long q_;
    std::vector<long> mod_;                // monic, length f+1, coeffs in 0..p-1
    std::vector<std::uint64_t> pk_;        // p^0 .. p^prec
    std::vector<std::vector<Coords>> frob_; // frob_[i] = matrix of phi^i, columns = images of omega^j
};

} // namespace padic
