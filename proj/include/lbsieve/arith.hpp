#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "lbsieve/errors.hpp"

namespace lbsieve::arith {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// ---------------------------------------------------------------------------
// Prime sieving

class PrimeTable {
public:
    explicit PrimeTable(u64 limit) : limit_(limit), composite_((limit + 1), 0) {
        if (limit < 2) throw parameter_error("PrimeTable: limit must be >= 2");
        composite_[0] = composite_[1] = 1;
        for (u64 p = 2; p * p <= limit; ++p)
            if (!composite_[p])
                for (u64 m = p * p; m <= limit; m += p) composite_[m] = 1;
        for (u64 n = 2; n <= limit; ++n)
            if (!composite_[n]) primes_.push_back(n);
    }

    u64 limit() const { return limit_; }
    bool is_prime(u64 n) const {
        if (n > limit_) throw parameter_error("PrimeTable: query beyond limit");
        return !composite_[n];
    }
    const std::vector<u64>& primes() const { return primes_; }
    u64 pi() const { return primes_.size(); }

private:
    u64 limit_;
    std::vector<std::uint8_t> composite_;
    std::vector<u64> primes_;
};

// Primality for one window [lo, hi] of a much larger range.
class SieveSegment {
public:
    SieveSegment(u64 lo, u64 hi) : lo_(lo), hi_(hi) {
        validate(lo, hi);
        composite_.assign(hi - lo + 1, 0);
        for (u64 p = 2; p * p <= hi; ++p) {
            if (p > 2 && p % 2 == 0) continue;
            bool p_prime = true;
            for (u64 q = 3; q * q <= p; q += 2)
                if (p % q == 0) { p_prime = false; break; }
            if (p > 2 && p % 2 == 0) p_prime = false;
            if (!p_prime) continue;
            u64 start = std::max(p * p, (lo + p - 1) / p * p);
            for (u64 m = start; m <= hi; m += p) composite_[m - lo] = 1;
        }
    }

    // Faster path when a base table covering sqrt(hi) is available.
    SieveSegment(u64 lo, u64 hi, const PrimeTable& base) : lo_(lo), hi_(hi) {
        validate(lo, hi);
        composite_.assign(hi - lo + 1, 0);
        if (base.limit() * base.limit() < hi)
            throw parameter_error("segmented_sieve: base table too small");
        for (u64 p : base.primes()) {
            if (p * p > hi) break;
            u64 start = std::max(p * p, (lo + p - 1) / p * p);
            for (u64 m = start; m <= hi; m += p) composite_[m - lo] = 1;
        }
    }

    u64 lo() const { return lo_; }
    u64 hi() const { return hi_; }
    bool is_prime(u64 n) const {
        if (n < lo_ || n > hi_) throw parameter_error("SieveSegment: out of window");
        return !composite_[n - lo_];
    }
    std::vector<u64> primes() const {
        std::vector<u64> out;
        for (u64 n = lo_; n <= hi_; ++n)
            if (!composite_[n - lo_]) out.push_back(n);
        return out;
    }
    u64 count() const {
        u64 c = 0;
        for (auto b : composite_) c += !b;
        return c;
    }

private:
    static void validate(u64 lo, u64 hi) {
        if (lo < 2 || lo >= hi || hi > 1'000'000'000'000ULL)
            throw parameter_error("segmented_sieve: need 2 <= lo < hi <= 1e12");
        if (hi - lo > 100'000'000ULL)
            throw resource_error("segmented_sieve: segment longer than 1e8");
    }

    u64 lo_, hi_;
    std::vector<std::uint8_t> composite_;
};

inline SieveSegment segmented_sieve(u64 lo, u64 hi) { return SieveSegment(lo, hi); }
inline SieveSegment segmented_sieve(u64 lo, u64 hi, const PrimeTable& base) {
    return SieveSegment(lo, hi, base);
}

// ---------------------------------------------------------------------------
// Factorization

struct Factorization {
    u64 n = 1;
    std::vector<std::pair<u64, int>> factors;  // (prime, exponent), increasing

    u64 reconstruct() const {
        u64 v = 1;
        for (auto [p, e] : factors)
            for (int i = 0; i < e; ++i) v *= p;
        return v;
    }
    int distinct() const { return static_cast<int>(factors.size()); }
    bool is_prime() const { return factors.size() == 1 && factors[0].second == 1; }
    u64 min_prime() const { return factors.empty() ? 0 : factors.front().first; }
};

// Trial division; complete for n up to the square of the largest prime tried.
inline Factorization factorize(u64 n) {
    Factorization f;
    f.n = n;
    u64 m = n;
    for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p) continue;
        int e = 0;
        while (m % p == 0) { m /= p; ++e; }
        f.factors.push_back({p, e});
    }
    if (m > 1) f.factors.push_back({m, 1});
    return f;
}

inline Factorization factorize(u64 n, const PrimeTable& base) {
    Factorization f;
    f.n = n;
    u64 m = n;
    for (u64 p : base.primes()) {
        if (p * p > m) break;
        if (m % p) continue;
        int e = 0;
        while (m % p == 0) { m /= p; ++e; }
        f.factors.push_back({p, e});
    }
    if (m > 1) f.factors.push_back({m, 1});
    return f;
}

// psi(n, z): 1 iff n has no prime factor below z (n = 1 vacuously passes).
inline int psi(const Factorization& fac, double z) {
    for (auto [p, e] : fac.factors)
        if (static_cast<double>(p) < z) return 0;
    return 1;
}
inline int psi(u64 n, u64 z, const Factorization& fac) {
    if (fac.n != n) throw parameter_error("psi: factorization is for a different n");
    return psi(fac, static_cast<double>(z));
}

inline u64 euler_phi(const Factorization& fac) {
    u64 phi = 1;
    for (auto [p, e] : fac.factors) {
        phi *= p - 1;
        for (int i = 1; i < e; ++i) phi *= p;
    }
    return phi;
}

inline u64 divisor_count(const Factorization& fac) {
    u64 d = 1;
    for (auto [p, e] : fac.factors) d *= static_cast<u64>(e) + 1;
    return d;
}

// ---------------------------------------------------------------------------
// Exact rationals for the multiplicative functions of the final-section
// lemmas; 128-bit is ample for every n below the factoring limit.

struct Rational {
    __int128 num = 0;
    __int128 den = 1;

    Rational() = default;
    Rational(i64 n, i64 d = 1) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den < 0) { num = -num; den = -den; }
        __int128 a = num < 0 ? -num : num, b = den;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { num /= a; den /= a; }
    }
    Rational operator*(const Rational& o) const {
        Rational r;
        r.num = num * o.num;
        r.den = den * o.den;
        r.reduce();
        return r;
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// omega(p^e) = p^2 / (p^2 - p + 1), independent of e.
inline Rational mult_omega(u64 d) {
    Rational r(1);
    for (auto [p, e] : factorize(d).factors) {
        (void)e;
        i64 pp = static_cast<i64>(p);
        r = r * Rational(pp * pp, pp * pp - pp + 1);
    }
    return r;
}

// f(p^e) = (p - 1)^2 / (p^2 - p + 1), independent of e.
inline Rational mult_f(u64 n) {
    Rational r(1);
    for (auto [p, e] : factorize(n).factors) {
        (void)e;
        i64 pp = static_cast<i64>(p);
        r = r * Rational((pp - 1) * (pp - 1), pp * pp - pp + 1);
    }
    return r;
}

struct EulerProductValue {
    double value = 0.0;
    double tail_bound = 0.0;  // |log C - log value| is below this
};

// C = prod_p (1 + 1/(p(p-1))) truncated at prime_limit. The tail satisfies
// sum_{p > P} log(1 + 1/(p(p-1))) < sum_{n > P} 1/(n(n-1)) = 1/P.
inline EulerProductValue constant_C(u64 prime_limit) {
    if (prime_limit < 1000)
        throw parameter_error("constant_C: prime_limit must be >= 1e3");
    PrimeTable table(prime_limit);
    double prod = 1.0;
    for (u64 p : table.primes()) {
        double pd = static_cast<double>(p);
        prod *= 1.0 + 1.0 / (pd * (pd - 1.0));
    }
    return {prod, 1.0 / static_cast<double>(prime_limit)};
}

} // namespace lbsieve::arith
