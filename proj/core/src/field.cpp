#include "padic/field.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace padic {

// ---------------------------------------------------------------------------
// multi-indices

std::string MultiIndex::str() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dims(); ++i) {
        if (i) os << ',';
        os << e[(size_t)i];
    }
    os << ')';
    return os.str();
}

long long binom_ll(long long a, long long k) {
    if (k < 0) return 0;
    __int128 r = 1;
    for (long long i = 0; i < k; ++i) {
        r *= (a - i);
        r /= (i + 1); // exact: product of i+1 consecutive integers
        __int128 m = r < 0 ? -r : r;
        if (m > (__int128)1 << 100) throw precondition_error("binomial overflow");
    }
    if (r > INT64_MAX || r < INT64_MIN) throw precondition_error("binomial overflow");
    return (long long)r;
}

long long multi_binom(const MultiIndex& m, const MultiIndex& k) {
    if (m.dims() != k.dims()) throw precondition_error("multi_binom: dimension mismatch");
    __int128 r = 1;
    for (int i = 0; i < m.dims(); ++i) {
        r *= binom_ll(m.e[(size_t)i], k.e[(size_t)i]);
        __int128 a = r < 0 ? -r : r;
        if (a > (__int128)1 << 100) throw precondition_error("binomial overflow");
    }
    if (r > INT64_MAX || r < INT64_MIN) throw precondition_error("binomial overflow");
    return (long long)r;
}

static void gen_compositions(int dims, int pos, long remaining, MultiIndex& cur,
                             std::vector<MultiIndex>& out) {
    if (pos == dims - 1) {
        cur.e[(size_t)pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (long v = 0; v <= remaining; ++v) {
        cur.e[(size_t)pos] = v;
        gen_compositions(dims, pos + 1, remaining - v, cur, out);
    }
}

std::vector<MultiIndex> multi_indices_upto(int dims, long maxTotal) {
    if (dims < 1) throw precondition_error("multi_indices_upto: dims < 1");
    std::vector<MultiIndex> out;
    MultiIndex cur(dims);
    for (long t = 0; t <= maxTotal; ++t) gen_compositions(dims, 0, t, cur, out);
    return out;
}

// ---------------------------------------------------------------------------
// residue-level polynomial helpers (coefficients mod p, ascending degree)

namespace {

using FpPoly = std::vector<long>;

FpPoly fp_trim(FpPoly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, long p) {
    FpPoly t(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            t[i + j] = (t[i + j] + a[i] * b[j]) % p;
    // reduce by monic m
    size_t dm = m.size() - 1;
    for (size_t k = t.size(); k-- > dm;) {
        long c = t[k] % p;
        if (c == 0) continue;
        t[k] = 0;
        for (size_t i = 0; i < dm; ++i)
            t[k - dm + i] = ((t[k - dm + i] - c * m[i]) % p + p) % p;
    }
    t.resize(dm);
    return t;
}

FpPoly fp_powmod(FpPoly base, unsigned long long e, const FpPoly& m, long p) {
    FpPoly r{1};
    while (e) {
        if (e & 1) r = fp_mulmod(r, base, m, p);
        base = fp_mulmod(base, base, m, p);
        e >>= 1;
    }
    return r;
}

long fp_inv_scalar(long a, long p) {
    long t = 0, newt = 1, r = p, newr = a % p;
    while (newr) {
        long q = r / newr;
        std::swap(t -= q * newt, newt);
        std::swap(r -= q * newr, newr);
    }
    return ((t % p) + p) % p;
}

FpPoly fp_gcd(FpPoly a, FpPoly b, long p) {
    a = fp_trim(a);
    b = fp_trim(b);
    while (!b.empty()) {
        // a mod b
        long lead = fp_inv_scalar(b.back(), p);
        while (a.size() >= b.size()) {
            long c = (a.back() * lead) % p;
            size_t shift = a.size() - b.size();
            for (size_t i = 0; i < b.size(); ++i)
                a[shift + i] = ((a[shift + i] - c * b[i]) % p + p) % p;
            a = fp_trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
        b = fp_trim(b);
    }
    return a;
}

bool fp_irreducible(const FpPoly& m, long p, int f) {
    if (f == 1) return true;
    FpPoly x{0, 1};
    // x^{p^f} == x mod m
    FpPoly xp = x;
    for (int i = 0; i < f; ++i) xp = fp_powmod(xp, (unsigned long long)p, m, p);
    FpPoly diff = xp;
    diff.resize(std::max<size_t>(diff.size(), 2), 0);
    diff[1] = ((diff[1] - 1) % p + p) % p;
    if (!fp_trim(diff).empty()) return false;
    // gcd(x^{p^{f/t}} - x, m) == 1 for each prime t | f
    int n = f;
    for (int t = 2; t <= n; ++t) {
        if (n % t) continue;
        while (n % t == 0) n /= t;
        FpPoly y = x;
        for (int i = 0; i < f / t; ++i) y = fp_powmod(y, (unsigned long long)p, m, p);
        FpPoly d = y;
        d.resize(std::max<size_t>(d.size(), 2), 0);
        d[1] = ((d[1] - 1) % p + p) % p;
        FpPoly g = fp_gcd(d, m, p);
        if (!(g.size() == 1)) return false;
    }
    return true;
}

bool is_prime(long p) {
    if (p < 2) return false;
    for (long i = 2; i * i <= p; ++i)
        if (p % i == 0) return false;
    return true;
}

int default_prec_cap(long p) {
    int n = 0;
    unsigned long long v = 1;
    while (v < (1ULL << 62) / (unsigned long long)p) {
        v *= (unsigned long long)p;
        ++n;
    }
    return n;
}

} // namespace

// ---------------------------------------------------------------------------
// Field

FieldPtr Field::make(long p, int f, int prec) {
    if (!is_prime(p)) throw precondition_error("Field: p must be prime");
    if (f < 1 || f > 8) throw precondition_error("Field: need 1 <= f <= 8");
    int cap = default_prec_cap(p);
    if (prec == 0) prec = std::min(32, cap);
    if (prec < 1) throw precondition_error("Field: precision must be positive");
    if (prec > cap)
        throw precondition_error("Field: requested precision exceeds exact 64-bit range for this p");
    // Many operations identify fields by instance, so equal parameters must
    // yield the same instance; objects parsed from separate inputs then
    // combine freely.
    static std::mutex cacheMutex;
    static std::map<std::tuple<long, int, int>, std::weak_ptr<const Field>> cache;
    std::lock_guard<std::mutex> lock(cacheMutex);
    auto key = std::make_tuple(p, f, prec);
    if (FieldPtr hit = cache[key].lock()) return hit;
    FieldPtr made(new Field(p, f, prec));
    cache[key] = made;
    return made;
}

Field::Field(long p, int f, int prec) : p_(p), f_(f), prec_(prec) {
    q_ = 1;
    for (int i = 0; i < f_; ++i) {
        if (q_ > (1L << 40) / p_) throw precondition_error("Field: residue field too large");
        q_ *= p_;
    }
    pk_.resize((size_t)prec_ + 1);
    pk_[0] = 1;
    for (int i = 1; i <= prec_; ++i) pk_[(size_t)i] = pk_[(size_t)i - 1] * (std::uint64_t)p_;
    build_modulus();
    build_frobenius();
}

void Field::build_modulus() {
    mod_.assign((size_t)f_ + 1, 0);
    mod_[(size_t)f_] = 1;
    if (f_ == 1) return; // omega plays no role; modulus x
    long total = 1;
    for (int i = 0; i < f_; ++i) total *= p_;
    for (long n = 0; n < total; ++n) {
        FpPoly m((size_t)f_ + 1, 0);
        m[(size_t)f_] = 1;
        long v = n;
        for (int i = 0; i < f_; ++i) {
            m[(size_t)i] = v % p_;
            v /= p_;
        }
        if (fp_irreducible(m, p_, f_)) {
            mod_.assign(m.begin(), m.end());
            return;
        }
    }
    throw precondition_error("Field: no irreducible modulus found"); // unreachable
}

// ---------------------------------------------------------------------------
// coordinate ring mod p^R

Field::Coords Field::radd(const Coords& a, const Coords& b, int R) const {
    std::uint64_t m = pk_[(size_t)R];
    Coords r((size_t)f_);
    for (int i = 0; i < f_; ++i) r[(size_t)i] = (a[(size_t)i] % m + b[(size_t)i] % m) % m;
    return r;
}

Field::Coords Field::rneg(const Coords& a, int R) const {
    std::uint64_t m = pk_[(size_t)R];
    Coords r((size_t)f_);
    for (int i = 0; i < f_; ++i) r[(size_t)i] = (m - a[(size_t)i] % m) % m;
    return r;
}

Field::Coords Field::rscale(const Coords& a, std::uint64_t s, int R) const {
    std::uint64_t m = pk_[(size_t)R];
    Coords r((size_t)f_);
    for (int i = 0; i < f_; ++i)
        r[(size_t)i] = (std::uint64_t)((unsigned __int128)(a[(size_t)i] % m) * (s % m) % m);
    return r;
}

Field::Coords Field::rmul(const Coords& a, const Coords& b, int R) const {
    std::uint64_t m = pk_[(size_t)R];
    std::vector<unsigned __int128> t((size_t)(2 * f_ - 1), 0);
    for (int i = 0; i < f_; ++i) {
        if (a[(size_t)i] == 0) continue;
        unsigned __int128 ai = a[(size_t)i] % m;
        for (int j = 0; j < f_; ++j)
            t[(size_t)(i + j)] += ai * (b[(size_t)j] % m) % m;
    }
    // fold degrees >= f using omega^f = -(mod_{f-1} omega^{f-1} + ... + mod_0)
    for (int k = 2 * f_ - 2; k >= f_; --k) {
        std::uint64_t c = (std::uint64_t)(t[(size_t)k] % m);
        t[(size_t)k] = 0;
        if (c == 0) continue;
        for (int i = 0; i < f_; ++i) {
            unsigned __int128 sub = (unsigned __int128)c * (std::uint64_t)mod_[(size_t)i] % m;
            t[(size_t)(k - f_ + i)] += (unsigned __int128)(m - (std::uint64_t)sub);
        }
    }
    Coords r((size_t)f_);
    for (int i = 0; i < f_; ++i) r[(size_t)i] = (std::uint64_t)(t[(size_t)i] % m);
    return r;
}

Field::Coords Field::rpow(Coords a, unsigned long long k, int R) const {
    Coords r((size_t)f_, 0);
    r[0] = 1;
    while (k) {
        if (k & 1) r = rmul(r, a, R);
        a = rmul(a, a, R);
        k >>= 1;
    }
    return r;
}

Field::Coords Field::runit_inv(const Coords& a, int R) const {
    // residue inverse by Fermat, then Newton doubling
    Coords v((size_t)f_);
    for (int i = 0; i < f_; ++i) v[(size_t)i] = a[(size_t)i] % (std::uint64_t)p_;
    v = rpow(v, (unsigned long long)(q_ - 2), 1);
    int have = 1;
    Coords two((size_t)f_, 0);
    two[0] = 2 % pk_[(size_t)R];
    while (have < R) {
        have = std::min(2 * have, R);
        Coords av = rmul(a, v, have);
        Coords corr = radd(two, rneg(av, have), have);
        v = rmul(v, corr, have);
    }
    return v;
}

Field::Coords Field::apply_matrix(const std::vector<Coords>& mat, const Coords& a, int R) const {
    Coords r((size_t)f_, 0);
    for (int j = 0; j < f_; ++j) {
        if (a[(size_t)j] == 0) continue;
        r = radd(r, rscale(mat[(size_t)j], a[(size_t)j], R), R);
    }
    return r;
}

void Field::build_frobenius() {
    frob_.assign((size_t)f_, std::vector<Coords>((size_t)f_, Coords((size_t)f_, 0)));
    // identity
    for (int j = 0; j < f_; ++j) frob_[0][(size_t)j][(size_t)j] = 1;
    if (f_ == 1) return;

    Coords omega((size_t)f_, 0);
    omega[1] = 1;
    // start: omega^p, correct mod p; Newton-lift a root of the modulus
    Coords tau = rpow(omega, (unsigned long long)p_, prec_);
    auto eval_mod = [&](const Coords& x, bool deriv) {
        Coords acc((size_t)f_, 0);
        int top = f_;
        for (int k = top; k >= (deriv ? 1 : 0); --k) {
            acc = rmul(acc, x, prec_);
            std::uint64_t c = (std::uint64_t)mod_[(size_t)k];
            if (deriv) c = (std::uint64_t)((unsigned __int128)c * (std::uint64_t)k % pk_[(size_t)prec_]);
            Coords cc((size_t)f_, 0);
            cc[0] = c % pk_[(size_t)prec_];
            acc = radd(acc, cc, prec_);
        }
        return acc;
    };
    for (int it = 0; it < 10; ++it) {
        Coords val = eval_mod(tau, false);
        Coords der = eval_mod(tau, true);
        Coords step = rmul(val, runit_inv(der, prec_), prec_);
        tau = radd(tau, rneg(step, prec_), prec_);
    }
    { // sanity: tau is an exact root mod p^prec
        Coords val = eval_mod(tau, false);
        for (int i = 0; i < f_; ++i)
            if (val[(size_t)i] % pk_[(size_t)prec_] != 0)
                throw precondition_error("Field: Frobenius lift failed");
    }
    Coords tin = tau;
    for (int i = 1; i < f_; ++i) {
        // columns of phi^i: powers of tau_i
        Coords pw((size_t)f_, 0);
        pw[0] = 1;
        for (int j = 0; j < f_; ++j) {
            frob_[(size_t)i][(size_t)j] = pw;
            pw = rmul(pw, tin, prec_);
        }
        tin = apply_matrix(frob_[1], tin, prec_); // tau_{i+1} = phi(tau_i)
    }
    // phi^f = identity
    for (int i = 0; i < f_; ++i)
        if (tin[(size_t)i] != omega[(size_t)i])
            throw precondition_error("Field: Frobenius order check failed");
}

// ---------------------------------------------------------------------------
// element construction

Elem Field::zero() const {
    Elem z;
    z.F_ = shared_from_this();
    z.prec_ = kExactPrec;
    return z;
}

Elem Field::zero_at(long long absPrec) const {
    Elem z;
    z.F_ = shared_from_this();
    z.prec_ = std::min(absPrec, kExactPrec);
    return z;
}

Elem Field::from_unit_coords(std::vector<std::uint64_t> co, long w, int rel) const {
    if ((int)co.size() != f_) throw precondition_error("from_unit_coords: wrong size");
    if (rel > prec_) rel = prec_;
    if (rel <= 0) return zero_at(w);
    std::uint64_t m = pk_[(size_t)rel];
    int t = rel;
    for (auto& c : co) {
        c %= m;
        if (c == 0) continue;
        int v = 0;
        std::uint64_t x = c;
        while (x % (std::uint64_t)p_ == 0) {
            x /= (std::uint64_t)p_;
            ++v;
        }
        t = std::min(t, v);
    }
    if (t >= rel) return zero_at(w + rel);
    if (t > 0) {
        for (auto& c : co) c /= pk_[(size_t)t];
        w += t;
        rel -= t;
        m = pk_[(size_t)rel];
        for (auto& c : co) c %= m;
    }
    Elem x;
    x.F_ = shared_from_this();
    x.w_ = w;
    x.rel_ = rel;
    x.prec_ = (long long)w + rel;
    x.co_ = std::move(co);
    return x;
}

Elem Field::from_int(long long v) const {
    if (v == 0) return zero();
    bool neg = v < 0;
    unsigned long long a = neg ? (unsigned long long)(-v) : (unsigned long long)v;
    long w = 0;
    while (a % (unsigned long long)p_ == 0) {
        a /= (unsigned long long)p_;
        ++w;
    }
    std::uint64_t m = pk_[(size_t)prec_];
    std::uint64_t u = (std::uint64_t)(a % m);
    if (neg) u = (m - u) % m;
    std::vector<std::uint64_t> co((size_t)f_, 0);
    co[0] = u;
    return from_unit_coords(std::move(co), w, prec_);
}

Elem Field::from_ratio(long long a, long long b) const {
    if (b == 0) throw precondition_error("from_ratio: zero denominator");
    return from_int(a) * from_int(b).inv();
}

Elem Field::pi_pow(long k) const {
    std::vector<std::uint64_t> co((size_t)f_, 0);
    co[0] = 1;
    return from_unit_coords(std::move(co), k, prec_);
}

Elem Field::from_digits(const std::vector<long>& digits) const {
    std::vector<std::uint64_t> co((size_t)f_, 0);
    if ((int)digits.size() > prec_) throw precondition_error("from_digits: too many digits");
    for (size_t i = 0; i < digits.size(); ++i) {
        std::vector<long> cf = digit_coeffs(digits[i]);
        for (int j = 0; j < f_; ++j) co[(size_t)j] += (std::uint64_t)cf[(size_t)j] * pk_[i];
    }
    bool all0 = true;
    for (auto c : co) all0 = all0 && c == 0;
    if (all0) return zero();
    return from_unit_coords(std::move(co), 0, prec_);
}

std::vector<long> Field::digit_coeffs(long digitIndex) const {
    if (digitIndex < 0 || digitIndex >= q_) throw precondition_error("digit index out of range");
    std::vector<long> cf((size_t)f_, 0);
    for (int j = 0; j < f_; ++j) {
        cf[(size_t)j] = digitIndex % p_;
        digitIndex /= p_;
    }
    return cf;
}

long Field::digit_index(const std::vector<long>& coeffs) const {
    long idx = 0;
    for (int j = f_ - 1; j >= 0; --j) idx = idx * p_ + coeffs[(size_t)j];
    return idx;
}

// ---------------------------------------------------------------------------
// cosets

std::uint64_t Field::coset_count(int k) const {
    if (k < 0) throw precondition_error("coset_count: negative level");
    std::uint64_t n = 1;
    for (int i = 0; i < k; ++i) {
        if (n > (1ULL << 40)) throw precondition_error("coset_count: level too deep");
        n *= (std::uint64_t)q_;
    }
    return n;
}

Elem Field::coset_rep(std::uint64_t idx, int k) const {
    std::vector<long> digits((size_t)k);
    for (int i = 0; i < k; ++i) {
        digits[(size_t)i] = (long)(idx % (std::uint64_t)q_);
        idx /= (std::uint64_t)q_;
    }
    if (idx != 0) throw precondition_error("coset_rep: index out of range");
    return from_digits(digits);
}

std::vector<Elem> Field::coset_reps(int k) const {
    std::uint64_t n = coset_count(k);
    std::vector<Elem> out;
    out.reserve((size_t)n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(coset_rep(i, k));
    return out;
}

std::vector<std::uint64_t> Field::unit_rep_indices(int k) const {
    if (k < 1) throw precondition_error("unit_rep_indices: need level >= 1");
    std::uint64_t n = coset_count(k);
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0; i < n; ++i)
        if (i % (std::uint64_t)q_ != 0) out.push_back(i);
    return out;
}

std::uint64_t Field::coset_index_of(const Elem& x, int k) const {
    if (k == 0) return 0;
    if (!x.is_integral()) throw precondition_error("coset_index_of: element not integral");
    if (x.abs_prec() < k) throw precision_error("coset_index_of: insufficient precision");
    if (x.is_zero()) return 0;
    std::vector<long> ud = x.unit_digits();
    std::uint64_t idx = 0;
    for (int i = k - 1; i >= 0; --i) {
        long d = 0;
        long pos = i - x.w();
        if (pos >= 0 && pos < (long)ud.size()) d = ud[(size_t)pos];
        idx = idx * (std::uint64_t)q_ + (std::uint64_t)d;
    }
    return idx;
}

// ---------------------------------------------------------------------------
// Galois structure

Elem Field::frobenius(const Elem& x, int i) const {
    i = ((i % f_) + f_) % f_;
    if (i == 0 || x.is_zero()) return x;
    Elem y;
    y.F_ = x.F_;
    y.w_ = x.w_;
    y.rel_ = x.rel_;
    y.prec_ = x.prec_;
    y.co_ = apply_matrix(frob_[(size_t)i], x.co_, x.rel_);
    return y;
}

Elem Field::teichmuller(long digitIndex) const {
    if (digitIndex == 0) return zero();
    std::vector<long> cf = digit_coeffs(digitIndex);
    Coords x((size_t)f_, 0);
    for (int j = 0; j < f_; ++j) x[(size_t)j] = (std::uint64_t)cf[(size_t)j];
    for (int it = 0; it < prec_; ++it) x = rpow(x, (unsigned long long)q_, prec_);
    return from_unit_coords(std::move(x), 0, prec_);
}

Elem Field::monomial(const Elem& z, const MultiIndex& m) const {
    if (m.dims() != f_) throw precondition_error("monomial: index dimension != f");
    Elem r = from_int(1);
    for (int s = 0; s < f_; ++s) {
        long ms = m.e[(size_t)s];
        if (ms == 0) continue;
        r *= frobenius(z, s).pow(ms);
    }
    return r;
}

Elem Field::multi_binom_elem(const MultiIndex& m, const MultiIndex& k) const {
    return from_int(multi_binom(m, k));
}

Elem Field::factorial_elem(const MultiIndex& m) const {
    __int128 r = 1;
    for (int i = 0; i < m.dims(); ++i) {
        long v = m.e[(size_t)i];
        if (v < 0) throw precondition_error("factorial of negative index");
        for (long j = 2; j <= v; ++j) {
            r *= j;
            if (r > INT64_MAX) throw precondition_error("factorial overflow");
        }
    }
    return from_int((long long)r);
}

Elem Field::random_elem(std::mt19937_64& rng, long wmin, long wmax, bool allowZero) const {
    if (wmax < wmin) throw precondition_error("random_elem: empty valuation range");
    if (allowZero && rng() % 8 == 0) return zero();
    long w = wmin + (long)(rng() % (std::uint64_t)(wmax - wmin + 1));
    std::vector<std::uint64_t> co((size_t)f_);
    std::uint64_t m = pk_[(size_t)prec_];
    for (int j = 0; j < f_; ++j) co[(size_t)j] = rng() % m;
    int j0 = (int)(rng() % (std::uint64_t)f_);
    std::uint64_t lead = 1 + rng() % (std::uint64_t)(p_ - 1);
    co[(size_t)j0] = co[(size_t)j0] - co[(size_t)j0] % (std::uint64_t)p_ + lead;
    return from_unit_coords(std::move(co), w, prec_);
}

// ---------------------------------------------------------------------------
// Elem

bool Elem::is_exact_zero() const { return co_.empty() && prec_ >= Field::kExactPrec; }

long Elem::w() const {
    if (is_zero()) throw precision_error("valuation of (near-)zero element");
    return w_;
}

Rational Elem::val_F() const { return Rational(F_->f() * w()); }
Rational Elem::val_p() const { return Rational(w()); }

LogNorm Elem::norm() const {
    if (is_zero()) return LogNorm::zero();
    return LogNorm::from_exponent(Rational(w_));
}

std::vector<long> Elem::unit_digits() const {
    if (is_zero()) return {};
    std::vector<long> out((size_t)rel_);
    for (int i = 0; i < rel_; ++i) {
        std::vector<long> cf((size_t)F_->f());
        for (int j = 0; j < F_->f(); ++j)
            cf[(size_t)j] = (long)(co_[(size_t)j] / F_->p_pow(i) % (std::uint64_t)F_->p());
        out[(size_t)i] = F_->digit_index(cf);
    }
    return out;
}

static void check_same_field(const Elem& a, const Elem& b) {
    if (!a.field() || !b.field()) throw precondition_error("element without field");
    if (a.field()->p() != b.field()->p() || a.field()->f() != b.field()->f())
        throw precondition_error("elements from different fields");
}

Elem Elem::operator-() const {
    if (is_zero()) return *this;
    Elem r = *this;
    std::uint64_t m = F_->p_pow(rel_);
    for (auto& c : r.co_) c = (m - c % m) % m;
    return r;
}

Elem operator+(const Elem& a, const Elem& b) {
    check_same_field(a, b);
    const Field& K = *a.field();
    if (a.is_zero() && b.is_zero()) return K.zero_at(std::min(a.prec_, b.prec_));
    if (a.is_zero() || b.is_zero()) {
        const Elem& z = a.is_zero() ? a : b;
        const Elem& x = a.is_zero() ? b : a;
        return x.truncated(z.prec_);
    }
    long w0 = std::min(a.w_, b.w_);
    long long P = std::min(a.prec_, b.prec_);
    long long Rll = P - w0;
    if (Rll <= 0) return K.zero_at(P);
    int R = (int)std::min<long long>(Rll, K.prec());
    std::uint64_t m = K.p_pow(R);
    std::vector<std::uint64_t> co((size_t)K.f(), 0);
    std::uint64_t sa = K.p_pow((int)std::min<long long>(a.w_ - w0, R));
    std::uint64_t sb = K.p_pow((int)std::min<long long>(b.w_ - w0, R));
    for (int j = 0; j < K.f(); ++j) {
        unsigned __int128 va = (unsigned __int128)(a.co_[(size_t)j] % m) * sa % m;
        unsigned __int128 vb = (unsigned __int128)(b.co_[(size_t)j] % m) * sb % m;
        co[(size_t)j] = (std::uint64_t)((va + vb) % m);
    }
    return K.from_unit_coords(std::move(co), w0, R);
}

Elem operator-(const Elem& a, const Elem& b) { return a + (-b); }

Elem operator*(const Elem& a, const Elem& b) {
    check_same_field(a, b);
    const Field& K = *a.field();
    if (a.is_exact_zero() || b.is_exact_zero()) return K.zero();
    if (a.is_zero() || b.is_zero()) {
        long long pa = a.is_zero() ? a.prec_ : (long long)a.w_;
        long long pb = b.is_zero() ? b.prec_ : (long long)b.w_;
        return K.zero_at(pa + pb);
    }
    int R = std::min(a.rel_, b.rel_);
    Elem r;
    r.F_ = a.F_;
    r.w_ = a.w_ + b.w_;
    r.rel_ = R;
    r.prec_ = (long long)r.w_ + R;
    r.co_ = K.rmul(a.co_, b.co_, R);
    return r;
}

Elem Elem::inv() const {
    if (is_zero()) throw precision_error("inversion of (near-)zero element");
    Elem r;
    r.F_ = F_;
    r.w_ = -w_;
    r.rel_ = rel_;
    r.prec_ = (long long)r.w_ + rel_;
    r.co_ = F_->runit_inv(co_, rel_);
    return r;
}

Elem Elem::pow(long long k) const {
    const Field& K = *F_;
    if (k == 0) return K.from_int(1);
    if (k < 0) return inv().pow(-k);
    if (is_exact_zero()) return *this;
    if (is_zero()) {
        __int128 P = (__int128)prec_ * k;
        return K.zero_at(P >= Field::kExactPrec ? Field::kExactPrec : (long long)P);
    }
    Elem base = *this, r = K.from_int(1);
    unsigned long long e = (unsigned long long)k;
    while (e) {
        if (e & 1) r *= base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

Elem Elem::truncated(long long absPrec) const {
    const Field& K = *F_;
    if (absPrec >= prec_) return *this;
    if (is_zero()) return K.zero_at(absPrec);
    long long Rll = absPrec - w_;
    if (Rll <= 0) return K.zero_at(absPrec);
    int R = (int)std::min<long long>(Rll, K.prec());
    std::vector<std::uint64_t> co = co_;
    return K.from_unit_coords(std::move(co), w_, R);
}

std::string Elem::str() const {
    std::ostringstream os;
    if (is_zero()) {
        os << "O(pi^" << (prec_ >= Field::kExactPrec ? std::string("inf") : std::to_string(prec_)) << ")";
        return os.str();
    }
    os << "pi^" << w_ << "*[";
    std::vector<long> d = unit_digits();
    for (size_t i = 0; i < d.size(); ++i) {
        if (i) os << ' ';
        os << d[i];
    }
    os << "]";
    return os.str();
}

} // namespace padic
