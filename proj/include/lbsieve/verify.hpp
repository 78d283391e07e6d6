#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "lbsieve/arith.hpp"
#include "lbsieve/errors.hpp"
#include "lbsieve/parallel.hpp"

namespace lbsieve::verify {

using arith::u64;

// One representation n = p + a*b with p prime and the factor pair balanced
// against p^{1/2 - delta}.
struct RepresentationRecord {
    u64 n = 0;
    u64 p = 0;
    u64 a = 1, b = 1;
    double theta = 0.0;    // log(ab) / log(n)
    double balance = 0.0;  // max(log a, log b) / log p

    bool consistent() const { return p + a * b == n && a >= 1 && b >= 1; }
};

struct MinThetaResult {
    std::optional<RepresentationRecord> record;
    u64 searched_to = 0;  // exhaustive below this product value
};

namespace detail {

// Largest divisor of m not exceeding sqrt(m); the cofactor is then the
// smallest achievable max(a, b).
inline u64 balanced_divisor(u64 m) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(m)));
    while (r * r > m) --r;
    while ((r + 1) * (r + 1) <= m) ++r;
    for (u64 a = r; a >= 1; --a)
        if (m % a == 0) return a;
    return 1;
}

inline bool pair_balanced(u64 a, u64 b, u64 p, double delta) {
    double cap = (0.5 - delta) * std::log(static_cast<double>(p));
    double top = std::log(static_cast<double>(std::max(a, b)));
    return top <= cap;
}

} // namespace detail

// Smallest product ab with n = p + ab, p prime and max(a,b) <= p^{1/2-delta}.
// Searches ab upward; an exhausted search (up to n^0.9) reports itself rather
// than claiming nonexistence.
inline MinThetaResult min_theta(u64 n, double delta,
                                const arith::SieveSegment* window = nullptr) {
    if (n < 100) throw parameter_error("min_theta: n must be >= 100");
    if (!(delta > 0.0 && delta < 0.1))
        throw parameter_error("min_theta: delta must lie in (0, 0.1)");

    const double log_n = std::log(static_cast<double>(n));
    const u64 m_cap = static_cast<u64>(std::pow(static_cast<double>(n), 0.9));
    std::optional<arith::PrimeTable> local;
    if (!window) {
        u64 root = static_cast<u64>(std::sqrt(static_cast<double>(n))) + 2;
        local.emplace(std::max<u64>(root, 3));
    }
    auto prime = [&](u64 p) {
        if (window) return window->is_prime(p);
        for (u64 q : local->primes()) {
            if (q * q > p) break;
            if (p % q == 0) return false;
        }
        return p >= 2;
    };

    MinThetaResult out;
    for (u64 m = 1; m <= m_cap && m + 2 <= n; ++m) {
        u64 p = n - m;
        if (!prime(p)) continue;
        u64 a = detail::balanced_divisor(m);
        u64 b = m / a;
        if (!detail::pair_balanced(a, b, p, delta)) continue;
        RepresentationRecord rec;
        rec.n = n;
        rec.p = p;
        rec.a = a;
        rec.b = b;
        rec.theta = m == 1 ? 0.0 : std::log(static_cast<double>(m)) / log_n;
        rec.balance = std::log(static_cast<double>(std::max(a, b))) /
                      std::log(static_cast<double>(p));
        out.record = rec;
        out.searched_to = m;
        return out;
    }
    out.searched_to = m_cap;
    return out;
}

struct ScanSummary {
    u64 lo = 0, hi = 0;
    double delta = 0.0, theta_budget = 0.0;
    std::vector<RepresentationRecord> records;  // one per n with a representation
    std::vector<u64> failures;                  // n with none inside the budget
    u64 worst_n = 0;
    double worst_theta = -1.0;
    std::vector<u64> histogram;  // 50 bins over theta in [0, 1]

    u64 range_size() const { return hi - lo + 1; }
};

// Per-n pass/fail against theta(n) <= theta_budget over [lo, hi].
inline ScanSummary scan_range(u64 lo, u64 hi, double delta, double theta_budget) {
    if (lo < 100 || lo > hi || hi > 1'000'000'000ULL)
        throw parameter_error("scan_range: need 100 <= lo <= hi <= 1e9");
    if (!(theta_budget > 0.0 && theta_budget < 1.0))
        throw parameter_error("scan_range: theta budget must lie in (0, 1)");

    const u64 m_max =
        static_cast<u64>(std::pow(static_cast<double>(hi), theta_budget)) + 1;
    u64 base_limit = static_cast<u64>(std::sqrt(static_cast<double>(hi))) + 2;
    arith::PrimeTable base(std::max<u64>(base_limit, 3));
    arith::SieveSegment seg(std::max<u64>(2, lo - std::min(lo - 2, m_max)), hi, base);

    const u64 n_count = hi - lo + 1;
    const u64 block = 2048;
    const u64 n_blocks = (n_count + block - 1) / block;
    std::vector<std::vector<RepresentationRecord>> recs(n_blocks);
    std::vector<std::vector<u64>> fails(n_blocks);

    parallel_blocks(n_blocks, [&](std::size_t bi) {
        u64 start = lo + bi * block;
        u64 stop = std::min(hi, start + block - 1);
        for (u64 n = start; n <= stop; ++n) {
            const double cap = theta_budget * std::log(static_cast<double>(n));
            bool found = false;
            for (u64 m = 1; m + 2 <= n; ++m) {
                if (m > 1 && std::log(static_cast<double>(m)) > cap) break;
                u64 p = n - m;
                if (!seg.is_prime(p)) continue;
                u64 a = detail::balanced_divisor(m);
                u64 b = m / a;
                if (!detail::pair_balanced(a, b, p, delta)) continue;
                RepresentationRecord rec;
                rec.n = n;
                rec.p = p;
                rec.a = a;
                rec.b = b;
                rec.theta =
                    m == 1 ? 0.0
                           : std::log(static_cast<double>(m)) /
                                 std::log(static_cast<double>(n));
                rec.balance = std::log(static_cast<double>(std::max(a, b))) /
                              std::log(static_cast<double>(p));
                recs[bi].push_back(rec);
                found = true;
                break;
            }
            if (!found) fails[bi].push_back(n);
        }
    });

    ScanSummary out;
    out.lo = lo;
    out.hi = hi;
    out.delta = delta;
    out.theta_budget = theta_budget;
    out.histogram.assign(50, 0);
    for (u64 bi = 0; bi < n_blocks; ++bi) {
        for (const auto& r : recs[bi]) {
            out.records.push_back(r);
            if (r.theta > out.worst_theta) {
                out.worst_theta = r.theta;
                out.worst_n = r.n;
            }
            std::size_t bin = std::min<std::size_t>(
                49, static_cast<std::size_t>(r.theta * 50.0));
            out.histogram[bin]++;
        }
        for (u64 n : fails[bi]) out.failures.push_back(n);
    }
    return out;
}

// Count of primes p in (n-2y, n-y] with v | n-p, normalized by the
// upper-bound shape y / (phi(v) log(y/v)).
inline double lemma71_ratio(u64 n, u64 y, u64 v) {
    if (v < 1 || y < 3 * v || n < 2 * y)
        throw parameter_error("lemma71_ratio: need y >= 3v and n >= 2y");
    u64 base_limit = static_cast<u64>(std::sqrt(static_cast<double>(n))) + 2;
    arith::PrimeTable base(std::max<u64>(base_limit, 3));
    arith::SieveSegment seg(n - 2 * y + 1, n - y, base);
    u64 count = 0;
    u64 target = n % v;
    for (u64 p = n - 2 * y + 1; p <= n - y; ++p)
        if (seg.is_prime(p) && p % v == target) ++count;
    u64 phi_v = arith::euler_phi(arith::factorize(v));
    double bound = static_cast<double>(y) /
                   (static_cast<double>(phi_v) *
                    std::log(static_cast<double>(y) / static_cast<double>(v)));
    return static_cast<double>(count) / bound;
}

struct Lemma72Check {
    double lhs = 0.0;          // exact sum of u/phi(u) over the filtered range
    double main = 0.0;         // C E omega(d) f(n) / d
    double error_bound = 0.0;  // (E d)^{1/2} d(n) / phi(d)
};

// sum_{u <= E, d | u, (u, n) = 1} u / phi(u) against its main term. The sum
// is evaluated exactly (u/phi(u) = prod_{p|u} p/(p-1), built by a segmented
// smallest-factor sweep).
inline Lemma72Check lemma72_check(u64 E, u64 d, u64 n) {
    if (d < 1 || n < 1) throw parameter_error("lemma72_check: d, n must be >= 1");
    if (std::gcd(d, n) != 1)
        throw parameter_error("lemma72_check: d and n must be coprime");
    if (E > 100'000'000ULL)
        throw resource_error("lemma72_check: E capped at 1e8");

    Lemma72Check out;
    static const double C = [] {
        return arith::constant_C(1'000'000).value;
    }();
    out.main = C * static_cast<double>(E) * arith::mult_omega(d).to_double() /
               static_cast<double>(d) * arith::mult_f(n).to_double();
    u64 dn = arith::divisor_count(arith::factorize(n));
    u64 phi_d = arith::euler_phi(arith::factorize(d));
    out.error_bound = std::sqrt(static_cast<double>(E) * static_cast<double>(d)) *
                      static_cast<double>(dn) / static_cast<double>(phi_d);
    if (E == 0) return out;

    u64 root = static_cast<u64>(std::sqrt(static_cast<double>(E))) + 2;
    arith::PrimeTable base(std::max<u64>(root, 3));
    const u64 seg_len = 1 << 20;
    std::vector<double> ratio;
    std::vector<u64> rem;
    double sum = 0.0;
    for (u64 seg_lo = 1; seg_lo <= E; seg_lo += seg_len) {
        u64 seg_hi = std::min(E, seg_lo + seg_len - 1);
        u64 len = seg_hi - seg_lo + 1;
        ratio.assign(len, 1.0);
        rem.resize(len);
        for (u64 i = 0; i < len; ++i) rem[i] = seg_lo + i;
        for (u64 p : base.primes()) {
            if (p * p > seg_hi) break;
            double factor = static_cast<double>(p) / static_cast<double>(p - 1);
            u64 first = (seg_lo + p - 1) / p * p;
            for (u64 m = first; m <= seg_hi; m += p) {
                u64 i = m - seg_lo;
                ratio[i] *= factor;
                while (rem[i] % p == 0) rem[i] /= p;
            }
        }
        for (u64 i = 0; i < len; ++i) {
            u64 u = seg_lo + i;
            if (u % d != 0) continue;
            if (n > 1 && std::gcd(u, n) != 1) continue;
            double r = ratio[i];
            if (rem[i] > 1)
                r *= static_cast<double>(rem[i]) / static_cast<double>(rem[i] - 1);
            sum += r;
        }
    }
    out.lhs = sum;
    return out;
}

// Diagnostic-only quantities from the closing argument: the sieve window
// (q1, q2) and G = sum g(p) over q1 <= p < n^{1/6} with
// g(p) = 1/(p - omega(p)).
struct SelbergDiagnostic {
    double y = 0.0, Q = 0.0, q1 = 0.0, q2 = 0.0;
    double G = 0.0;
    u64 primes_used = 0;
};

inline SelbergDiagnostic selberg_diagnostic(u64 n, double delta, double theta,
                                            double log_power) {
    SelbergDiagnostic out;
    double nd = static_cast<double>(n);
    out.y = 0.5 * std::pow(nd, theta);
    out.Q = out.y * std::pow(nd, -0.5) * std::pow(std::log(nd), -2.0 * log_power);
    out.q1 = 2.0 * out.y * std::pow(nd, delta - 0.5) / out.Q;
    out.q2 = 0.5 * std::pow(nd, 0.5 - delta) / out.Q;
    double p_hi = std::pow(nd, 1.0 / 6.0);
    if (out.q1 < p_hi) {
        arith::PrimeTable t(static_cast<u64>(p_hi) + 1);
        for (u64 p : t.primes()) {
            if (static_cast<double>(p) < out.q1) continue;
            if (static_cast<double>(p) >= p_hi) break;
            if (n % p == 0) continue;
            double pd = static_cast<double>(p);
            // p - omega(p) = p (p-1)^2 / (p^2 - p + 1)
            out.G += (pd * pd - pd + 1.0) / (pd * (pd - 1.0) * (pd - 1.0));
            out.primes_used++;
        }
    }
    return out;
}

} // namespace lbsieve::verify
