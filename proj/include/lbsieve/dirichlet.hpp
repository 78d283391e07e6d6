#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <vector>

#include "lbsieve/arith.hpp"
#include "lbsieve/errors.hpp"
#include "lbsieve/rng.hpp"

namespace lbsieve::dirichlet {

using arith::u64;
using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Character group mod q, built through the CRT: a primitive root for each odd
// prime-power component, the (-1, 5) generator pair for powers of two.

namespace detail {

inline u64 pow_mod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = (r * b) % m;
        b = (b * b) % m;
        e >>= 1;
    }
    return r;
}

inline u64 primitive_root_odd_pp(u64 p, u64 pe) {
    // generator mod p, promoted to p^e by the g^(p-1) != 1 (mod p^2) test
    u64 phi_p = p - 1;
    std::vector<u64> qs;
    u64 m = phi_p;
    for (u64 d = 2; d * d <= m; ++d)
        if (m % d == 0) {
            qs.push_back(d);
            while (m % d == 0) m /= d;
        }
    if (m > 1) qs.push_back(m);
    u64 g = 0;
    for (u64 cand = 2; cand < p; ++cand) {
        bool ok = true;
        for (u64 qd : qs)
            if (pow_mod(cand, phi_p / qd, p) == 1) { ok = false; break; }
        if (ok) { g = cand; break; }
    }
    if (pe > p && pow_mod(g, p - 1, p * p) == 1) g += p;
    return g;
}

struct Component {
    u64 pe = 1;       // p^e
    u64 p = 0;
    int e = 0;
    bool is_two = false;
    u64 m1 = 1, m2 = 1;  // cycle orders; odd: (phi(p^e), 1); 2^a (a>=3): (2, 2^{a-2})
    // discrete logs per residue mod pe (only defined on units)
    std::vector<std::uint32_t> d1, d2;
    // roots of unity e(k/m1), e(k/m2)
    std::vector<cplx> roots1, roots2;
};

struct GroupData {
    u64 q = 1;
    u64 phi = 1;
    std::vector<Component> comps;
};

inline std::shared_ptr<const GroupData> build_group(u64 q) {
    auto gd = std::make_shared<GroupData>();
    gd->q = q;
    auto fac = arith::factorize(q);
    for (auto [p, e] : fac.factors) {
        Component c;
        c.p = p;
        c.e = e;
        c.pe = 1;
        for (int i = 0; i < e; ++i) c.pe *= p;
        if (p == 2) {
            c.is_two = true;
            if (e == 1) {
                c.m1 = c.m2 = 1;
            } else if (e == 2) {
                c.m1 = 2;  // generated by -1
                c.m2 = 1;
            } else {
                c.m1 = 2;
                c.m2 = c.pe / 4;  // order of 5
            }
            c.d1.assign(c.pe, UINT32_MAX);
            c.d2.assign(c.pe, UINT32_MAX);
            // enumerate (-1)^s 5^t
            u64 five = 5 % c.pe;
            u64 val = 1;
            for (u64 t = 0; t < c.m2; ++t) {
                u64 v1 = val % c.pe;
                u64 v2 = (c.pe - v1) % c.pe;  // times -1
                c.d1[v1] = 0;
                c.d2[v1] = static_cast<std::uint32_t>(t);
                if (c.m1 == 2) {
                    c.d1[v2] = 1;
                    c.d2[v2] = static_cast<std::uint32_t>(t);
                }
                val = (val * five) % c.pe;
            }
            if (c.pe == 2) c.d1[1] = 0, c.d2[1] = 0;
        } else {
            c.m1 = c.pe / p * (p - 1);
            c.m2 = 1;
            u64 g = primitive_root_odd_pp(p, c.pe);
            c.d1.assign(c.pe, UINT32_MAX);
            c.d2.assign(c.pe, UINT32_MAX);
            u64 val = 1;
            for (u64 k = 0; k < c.m1; ++k) {
                c.d1[val] = static_cast<std::uint32_t>(k);
                c.d2[val] = 0;
                val = (val * g) % c.pe;
            }
        }
        const double two_pi = 6.283185307179586476925286766559;
        c.roots1.resize(c.m1);
        for (u64 k = 0; k < c.m1; ++k)
            c.roots1[k] = std::polar(1.0, two_pi * static_cast<double>(k) /
                                              static_cast<double>(c.m1));
        c.roots2.resize(c.m2);
        for (u64 k = 0; k < c.m2; ++k)
            c.roots2[k] = std::polar(1.0, two_pi * static_cast<double>(k) /
                                              static_cast<double>(c.m2));
        gd->phi *= c.m1 * c.m2;
        gd->comps.push_back(std::move(c));
    }
    return gd;
}

} // namespace detail

class Character {
public:
    Character(std::shared_ptr<const detail::GroupData> g, std::vector<u64> exps)
        : group_(std::move(g)), exps_(std::move(exps)) {}

    u64 modulus() const { return group_->q; }
    u64 group_order() const { return group_->phi; }

    bool is_principal() const {
        for (u64 e : exps_)
            if (e) return false;
        return true;
    }

    // chi(n): product of component root-of-unity values; zero off the units.
    cplx value(u64 n) const {
        n %= group_->q;
        cplx v(1.0, 0.0);
        std::size_t idx = 0;
        for (const auto& c : group_->comps) {
            u64 r = n % c.pe;
            std::uint32_t l1 = c.d1[r];
            if (l1 == UINT32_MAX) return {0.0, 0.0};
            u64 e1 = exps_[idx++];
            v *= c.roots1[(static_cast<u64>(l1) * e1) % c.m1];
            u64 e2 = exps_[idx++];
            if (c.m2 > 1) v *= c.roots2[(static_cast<u64>(c.d2[r]) * e2) % c.m2];
        }
        return v;
    }

    u64 conductor() const {
        u64 cond = 1;
        std::size_t idx = 0;
        for (const auto& c : group_->comps) {
            u64 e1 = exps_[idx++];
            u64 e2 = exps_[idx++];
            if (!c.is_two) {
                if (e1 != 0) {
                    u64 d = c.m1 / std::gcd(e1, c.m1);
                    int s = 0;
                    while (d % c.p == 0) { d /= c.p; ++s; }
                    u64 pf = c.p;
                    for (int i = 0; i < s; ++i) pf *= c.p;
                    cond *= pf;
                }
            } else {
                u64 dt = c.m2 > 1 ? c.m2 / std::gcd(e2, c.m2) : 1;
                if (dt > 1)
                    cond *= 4 * dt;
                else if (c.m1 == 2 && e1 == 1)
                    cond *= 4;
            }
        }
        return cond;
    }

    bool is_primitive() const { return conductor() == modulus(); }

    const std::vector<u64>& exponents() const { return exps_; }
    std::shared_ptr<const detail::GroupData> group() const { return group_; }

private:
    std::shared_ptr<const detail::GroupData> group_;
    std::vector<u64> exps_;  // two entries per component (cycle1, cycle2)
};

// All phi(q) characters mod q, principal first.
inline std::vector<Character> characters_mod(u64 q) {
    if (q < 2 || q > 100'000)
        throw parameter_error("characters_mod: need 2 <= q <= 1e5");
    auto gd = detail::build_group(q);
    std::vector<std::pair<u64, u64>> cycles;
    for (const auto& c : gd->comps) cycles.push_back({c.m1, c.m2});

    std::vector<Character> out;
    out.reserve(gd->phi);
    std::vector<u64> exps(2 * cycles.size(), 0);
    for (;;) {
        out.emplace_back(gd, exps);
        // odometer over the exponent tuple
        std::size_t i = 0;
        for (; i < exps.size(); ++i) {
            u64 lim = i % 2 == 0 ? cycles[i / 2].first : cycles[i / 2].second;
            if (++exps[i] < lim) break;
            exps[i] = 0;
        }
        if (i == exps.size()) break;
    }
    return out;
}

// The primitive character mod conductor(chi) inducing chi.
inline Character primitive_core(const Character& chi) {
    u64 cond = chi.conductor();
    auto gd = detail::build_group(cond);
    auto cfac = arith::factorize(cond);
    std::vector<u64> exps;
    std::size_t idx = 0;
    for (const auto& c : chi.group()->comps) {
        u64 e1 = chi.exponents()[idx++];
        u64 e2 = chi.exponents()[idx++];
        int f = 0;
        for (auto [p, e] : cfac.factors)
            if (p == c.p) f = e;
        if (f == 0) continue;  // component vanishes from the conductor
        u64 pf = 1;
        for (int i = 0; i < f; ++i) pf *= c.p;
        if (!c.is_two) {
            u64 shrink = c.pe / pf;  // p^{e-f} divides e1
            exps.push_back(e1 / shrink);
            exps.push_back(0);
        } else {
            if (pf == 2) {
                exps.push_back(0);
                exps.push_back(0);
            } else if (pf == 4) {
                exps.push_back(e1);
                exps.push_back(0);
            } else {
                exps.push_back(e1);
                exps.push_back(e2 / (c.pe / pf));
            }
        }
    }
    // align exponent layout with the new group's component order
    std::vector<u64> aligned(2 * gd->comps.size(), 0);
    std::size_t src = 0;
    for (std::size_t ci = 0; ci < gd->comps.size(); ++ci) {
        aligned[2 * ci] = exps[src++];
        aligned[2 * ci + 1] = exps[src++];
    }
    return Character(gd, aligned);
}

// ---------------------------------------------------------------------------
// Discrepancy statistics

using Sequence = std::function<double(u64)>;

// E_f(y, h; chi) = sum_{y-h < k <= y} f(k) chi(k)
//                  - [chi principal] (h/h0) sum_{y-h0 < k <= y} f(k)
inline cplx E_chi(const Sequence& f, u64 y, u64 h, u64 h0, const Character& chi) {
    cplx s(0.0, 0.0);
    for (u64 k = y - h + 1; k <= y; ++k) s += f(k) * chi.value(k);
    if (chi.is_principal()) {
        double tail = 0.0;
        for (u64 k = y - h0 + 1; k <= y; ++k) tail += f(k);
        s -= static_cast<double>(h) / static_cast<double>(h0) * tail;
    }
    return s;
}

// E_f(y, h; q, a) = sum_{y-h < n <= y, n = a (q)} f(n)
//                   - h/(phi(q) h0) sum_{y-h0 < n <= y} f(n)
inline double E_progression(const Sequence& f, u64 y, u64 h, u64 h0, u64 q, u64 a) {
    if (std::gcd(q, a) != 1)
        throw parameter_error("E_progression: residue not coprime to modulus");
    double s = 0.0;
    for (u64 n = y - h + 1; n <= y; ++n)
        if (n % q == a % q) s += f(n);
    double tail = 0.0;
    for (u64 n = y - h0 + 1; n <= y; ++n) tail += f(n);
    u64 phi = arith::euler_phi(arith::factorize(q));
    s -= static_cast<double>(h) /
         (static_cast<double>(phi) * static_cast<double>(h0)) * tail;
    return s;
}

// Per-modulus discrepancy summary for one window pair.
struct DiscrepancyReport {
    u64 q = 0, y = 0, h = 0, h0 = 0;
    double max_abs_progression = 0.0;   // max over coprime residues of |E_f(y,h;q,a)|
    double max_abs_chi = 0.0;           // max over characters of |E_f(y,h;chi)|
    double sum_primitive_abs_chi = 0.0; // sum over primitive characters
};

inline DiscrepancyReport discrepancy_report(const Sequence& f, u64 y, u64 h, u64 h0,
                                            u64 q) {
    DiscrepancyReport rep;
    rep.q = q;
    rep.y = y;
    rep.h = h;
    rep.h0 = h0;
    for (u64 a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        rep.max_abs_progression =
            std::max(rep.max_abs_progression, std::fabs(E_progression(f, y, h, h0, q, a)));
    }
    for (const auto& chi : characters_mod(q)) {
        double v = std::abs(E_chi(f, y, h, h0, chi));
        rep.max_abs_chi = std::max(rep.max_abs_chi, v);
        if (chi.is_primitive()) rep.sum_primitive_abs_chi += v;
    }
    return rep;
}

// eta(Q) = x^{-theta} Q^{-1} L^A with theta = 0.55, the scale that turns the
// dyadic primitive-character sums into an O(1) statistic.
inline double eta_normalization(double x, double Q, double log_power) {
    return std::pow(x, -0.55) / Q * std::pow(std::log(x), log_power);
}

// ---------------------------------------------------------------------------
// Mean-value probe for the large-sieve shape
//   ||N||_2^2 <= const (N + Q^2 T) sum |b_n|^2 / n
// with the t-integral replaced by a midpoint Riemann sum (T = T_count).

inline double large_sieve_ratio_for(u64 Q, int T_count, u64 N,
                                    const std::vector<double>& coeffs) {
    if (Q < 2 || Q > 50 || N < 4 || N > 10'000)
        throw parameter_error("large_sieve_ratio: need 2 <= Q <= 50, 4 <= N <= 1e4");
    const u64 n_lo = N / 2 + 1;  // n ~ N
    if (coeffs.size() != N - n_lo + 1)
        throw parameter_error("large_sieve_ratio: coefficient count mismatch");

    const double T = static_cast<double>(std::max(T_count, 2));
    const double t_lo = (T - 1.0) / 2.0;
    const double dt = (T - t_lo) / static_cast<double>(T_count);

    double denom_sum = 0.0;
    std::vector<double> logn(coeffs.size()), scaled(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        u64 n = n_lo + i;
        logn[i] = std::log(static_cast<double>(n));
        scaled[i] = coeffs[i] / std::sqrt(static_cast<double>(n));
        denom_sum += coeffs[i] * coeffs[i] / static_cast<double>(n);
    }

    double norm = 0.0;
    for (u64 q = Q / 2 + 1; q <= Q; ++q) {
        auto chars = characters_mod(q);
        std::vector<const Character*> prim;
        for (const auto& chi : chars)
            if (chi.is_primitive()) prim.push_back(&chi);
        if (prim.empty()) continue;
        std::vector<std::vector<cplx>> chi_vals(prim.size(),
                                                std::vector<cplx>(coeffs.size()));
        for (std::size_t c = 0; c < prim.size(); ++c)
            for (std::size_t i = 0; i < coeffs.size(); ++i)
                chi_vals[c][i] = prim[c]->value(n_lo + i) * scaled[i];
        for (int ti = 0; ti < T_count; ++ti) {
            double t = t_lo + (ti + 0.5) * dt;
            // e^{-i t log n}, shared across the characters mod q
            std::vector<cplx> osc(coeffs.size());
            for (std::size_t i = 0; i < coeffs.size(); ++i)
                osc[i] = std::polar(1.0, -t * logn[i]);
            for (std::size_t c = 0; c < prim.size(); ++c) {
                cplx s(0.0, 0.0);
                for (std::size_t i = 0; i < coeffs.size(); ++i)
                    s += chi_vals[c][i] * osc[i];
                norm += std::norm(s) * dt;
            }
        }
    }
    double denom = (static_cast<double>(N) +
                    static_cast<double>(Q) * static_cast<double>(Q) * T) *
                   denom_sum;
    return denom > 0.0 ? norm / denom : 0.0;
}

// Max ratio over `draws` random +-1 coefficient vectors.
inline double large_sieve_ratio(u64 Q, int T_count, u64 N, std::uint64_t seed,
                                int draws = 16) {
    double worst = 0.0;
    for (int d = 0; d < draws; ++d) {
        Rng rng(seed, static_cast<std::uint64_t>(d));
        std::vector<double> b(N - N / 2);
        for (auto& v : b) v = rng.next_u64() & 1 ? 1.0 : -1.0;
        worst = std::max(worst, large_sieve_ratio_for(Q, T_count, N, b));
    }
    return worst;
}

} // namespace lbsieve::dirichlet
