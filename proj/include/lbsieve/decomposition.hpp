#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lbsieve/arith.hpp"
#include "lbsieve/buchstab.hpp"
#include "lbsieve/deficit.hpp"
#include "lbsieve/errors.hpp"
#include "lbsieve/parallel.hpp"
#include "lbsieve/regions.hpp"
#include "lbsieve/rng.hpp"

namespace lbsieve::decomp {

using arith::Factorization;
using arith::u64;
using regions::LiftedRegion;
using regions::LiftKind;
using regions::Region;
using regions::RegionSet;

// ---------------------------------------------------------------------------
// Piecewise-linear exponent functions (sieving limits z(a1) = x^{zeta(a1)})

struct PiecewiseLinear {
    // (x, y) knots sorted by x; constant extension outside the knot range.
    std::vector<std::pair<double, double>> pts;

    static PiecewiseLinear constant(double c) { return {{{0.0, c}, {1.0, c}}}; }

    double eval(double x) const {
        if (pts.empty()) throw parameter_error("PiecewiseLinear: no knots");
        if (x <= pts.front().first) return pts.front().second;
        if (x >= pts.back().first) return pts.back().second;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (x <= pts[i].first) {
                auto [x0, y0] = pts[i - 1];
                auto [x1, y1] = pts[i];
                double t = (x - x0) / (x1 - x0);
                return y0 + t * (y1 - y0);
            }
        return pts.back().second;
    }

    bool is_constant() const {
        for (const auto& p : pts)
            if (p.second != pts.front().second) return false;
        return true;
    }
};

// Pointwise minimum, with crossing points added as knots.
inline PiecewiseLinear pw_min(const PiecewiseLinear& a, const PiecewiseLinear& b) {
    std::vector<double> xs;
    for (const auto& p : a.pts) xs.push_back(p.first);
    for (const auto& p : b.pts) xs.push_back(p.first);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> knots;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        knots.push_back(xs[i]);
        if (i + 1 == xs.size()) break;
        double x0 = xs[i], x1 = xs[i + 1];
        double d0 = a.eval(x0) - b.eval(x0);
        double d1 = a.eval(x1) - b.eval(x1);
        if (d0 * d1 < 0.0) {
            double t = d0 / (d0 - d1);
            knots.push_back(x0 + t * (x1 - x0));
        }
    }
    PiecewiseLinear out;
    for (double x : knots) out.pts.push_back({x, std::min(a.eval(x), b.eval(x))});
    return out;
}

// ---------------------------------------------------------------------------
// Terms

enum class CutoffKind {
    Constant,   // psi(l, x^value)
    PrevAlpha,  // psi(l, p_j), the innermost listed prime
    Z1,         // psi(l, x^{z1(a1)})
};

struct CutoffFn {
    CutoffKind kind = CutoffKind::Constant;
    double value = 0.0;

    static CutoffFn constant(double c) { return {CutoffKind::Constant, c}; }
    static CutoffFn prev_alpha() { return {CutoffKind::PrevAlpha, 0.0}; }
    static CutoffFn z1() { return {CutoffKind::Z1, 0.0}; }
};

enum class Classification { Regular, Discard, Decompose, Final };

// One sum over j explicit prime coordinates with a psi weight on the
// cofactor. Discard terms are excluded from lambda; all discarded sums are
// nonnegative, which is what keeps lambda below rho.
struct Term {
    int depth = 0;
    RegionSet region;  // over (a_1 ... a_depth); unused when depth = 0
    CutoffFn cutoff;
    int sign = 1;
    Classification cls = Classification::Regular;
};

// ---------------------------------------------------------------------------
// Decompositions

struct StageSplit {
    RegionSet regular;    // kept as-is (Type II information)
    RegionSet discard;    // dropped; enters the deficit integral
    RegionSet decompose;  // split twice more (depth-2 stage only)
};

class Decomposition {
public:
    double z0_exponent = 0.1;
    PiecewiseLinear z1 = PiecewiseLinear::constant(0.1);
    double zeta = 0.1;  // the floor xi = x^zeta of every sieving limit
    int K = 4;
    LiftedRegion typeI{regions::catalog::make_R2(), LiftKind::TypeI};
    LiftedRegion typeII{regions::catalog::make_S1(), LiftKind::TypeII};

    StageSplit stage2{RegionSet(2), RegionSet(2), RegionSet(2)};
    StageSplit stage4{RegionSet(4), RegionSet(4), RegionSet(4)};

    bool uses_role_reversals = false;
    bool is_stub = false;           // carries only an imported deficit
    double imported_deficit = 0.0;  // cited constant for stub components
    // Declared guard for stub internals: role-reversals only occur where
    // a1 + a2 is at least this value (NaN = no declaration).
    double rr_min_pair_sum = std::numeric_limits<double>::quiet_NaN();

    const std::vector<Term>& terms() const { return terms_; }

    // Direct term injection (deserialized decompositions carry no stage
    // structure).
    void set_terms(std::vector<Term> t) { terms_ = std::move(t); }

    // Builds the evaluable term list from the stage structure:
    //   lambda = psi(k, z0) - f1 + [kept at depth 2] + [z-cutoff over the
    //   continuation region] - f3 + [kept at depth 4]
    // with the discard sums tracked as Discard terms.
    void finalize() {
        if (K % 2 != 0) throw parameter_error("Decomposition: K must be even");
        terms_.clear();
        if (is_stub) return;

        terms_.push_back({0, RegionSet(0), CutoffFn::constant(z0_exponent), +1,
                          Classification::Regular});
        {
            Region e1(1, {});
            e1.add({1}, -z0_exponent, false);
            e1.add({-1}, 0.5, true);
            terms_.push_back({1, RegionSet(std::move(e1), "E1_BASE"), CutoffFn::z1(), -1,
                              Classification::Regular});
        }
        terms_.push_back({2, stage2.regular, CutoffFn::prev_alpha(), +1,
                          Classification::Final});
        if (!stage2.discard.empty())
            terms_.push_back({2, stage2.discard, CutoffFn::prev_alpha(), +1,
                              Classification::Discard});
        if (!stage2.decompose.empty()) {
            terms_.push_back({2, stage2.decompose, CutoffFn::constant(zeta), +1,
                              Classification::Regular});
            RegionSet ext3 = extend_with_next_prime(stage2.decompose, zeta);
            ext3.set_name(stage2.decompose.name() + "+a3");
            terms_.push_back({3, std::move(ext3), CutoffFn::constant(zeta), -1,
                              Classification::Regular});
            if (!stage4.regular.empty())
                terms_.push_back({4, stage4.regular, CutoffFn::prev_alpha(), +1,
                                  Classification::Final});
            if (!stage4.discard.empty())
                terms_.push_back({4, stage4.discard, CutoffFn::prev_alpha(), +1,
                                  Classification::Discard});
        }
    }

    // Adds coordinate a_{j+1} in [lo, a_j) to every part.
    static RegionSet extend_with_next_prime(const RegionSet& rs, double lo) {
        RegionSet out(rs.dim() + 1);
        for (const auto& part : rs.parts()) {
            Region r = part.lifted_to(rs.dim() + 1);
            std::vector<double> floor_c(rs.dim() + 1, 0.0), ord(rs.dim() + 1, 0.0);
            floor_c[rs.dim()] = 1.0;
            r.add(floor_c, -lo, false);
            ord[rs.dim() - 1] = 1.0;
            ord[rs.dim()] = -1.0;
            r.add(ord, 0.0, true);
            out.add_part(std::move(r));
        }
        return out;
    }

private:
    std::vector<Term> terms_;
};

// The main decomposition: discard F2 at depth 2 and G at depth 4, keep
// everything else.
inline Decomposition principal_decomposition() {
    Decomposition d;
    d.stage2.regular = regions::catalog::make_F1_ext();
    d.stage2.discard = regions::catalog::make_F2();
    d.stage2.decompose = regions::catalog::make_F3();
    d.stage4.regular = regions::catalog::make_R4_kept();
    d.stage4.discard = regions::catalog::make_G();
    d.finalize();
    return d;
}

// The imported companion, carried as a stub: its published deficit constant,
// its declared regular strip, and the guard that its role-reversals stay
// inside a1 + a2 >= 0.4.
inline Decomposition companion_stub() {
    Decomposition d;
    d.is_stub = true;
    d.K = 2;
    d.imported_deficit = deficit::imported_companion_deficit;
    d.stage2.regular = regions::catalog::make_D2_regular();
    d.rr_min_pair_sum = 0.4;
    d.finalize();
    return d;
}

// ---------------------------------------------------------------------------
// Buchstab's identity on a term:
//   psi(l, z_hi) = psi(l, z_lo) - sum_{z_lo <= p < z_hi} psi(l/p, p)

inline std::pair<Term, Term> buchstab_split(const Term& t, const CutoffFn& z_lo,
                                            const CutoffFn& z_hi) {
    if (z_lo.kind == CutoffKind::Constant && z_hi.kind == CutoffKind::Constant &&
        z_lo.value > z_hi.value)
        throw parameter_error("buchstab_split: z_lo must not exceed z_hi");
    if (z_lo.kind != CutoffKind::Constant)
        throw parameter_error("buchstab_split: z_lo must be a constant exponent");

    Term low = t;
    low.cutoff = z_lo;

    Term sum;
    sum.depth = t.depth + 1;
    sum.sign = -t.sign;
    sum.cutoff = CutoffFn::prev_alpha();
    sum.cls = t.cls;
    const int nd = t.depth + 1;
    RegionSet ext(nd);
    auto extend_part = [&](const Region& base) {
        Region r = base.lifted_to(nd);
        std::vector<double> floor_c(nd, 0.0);
        floor_c[nd - 1] = 1.0;
        r.add(floor_c, -z_lo.value, false);  // a_{j+1} >= z_lo
        switch (z_hi.kind) {
            case CutoffKind::Constant: {
                std::vector<double> cap(nd, 0.0);
                cap[nd - 1] = -1.0;
                r.add(cap, z_hi.value, true);  // a_{j+1} < z_hi
                break;
            }
            case CutoffKind::PrevAlpha: {
                if (t.depth == 0)
                    throw parameter_error("buchstab_split: no previous prime at depth 0");
                std::vector<double> ord(nd, 0.0);
                ord[nd - 2] = 1.0;
                ord[nd - 1] = -1.0;
                r.add(ord, 0.0, true);  // a_{j+1} < a_j
                break;
            }
            case CutoffKind::Z1:
                throw parameter_error("buchstab_split: z_hi = z1 not supported");
        }
        // and a_{j+1} < a_j in every case once a previous prime exists
        if (t.depth >= 1 && z_hi.kind != CutoffKind::PrevAlpha) {
            std::vector<double> ord(nd, 0.0);
            ord[nd - 2] = 1.0;
            ord[nd - 1] = -1.0;
            r.add(ord, 0.0, true);
        }
        return r;
    };
    if (t.depth == 0) {
        Region whole(0, {});
        ext.add_part(extend_part(whole.lifted_to(0)));
    } else {
        for (const auto& part : t.region.parts()) ext.add_part(extend_part(part));
    }
    sum.region = std::move(ext);
    return {std::move(low), std::move(sum)};
}

// ---------------------------------------------------------------------------
// Term classification by sampling

struct ClassifyParams {
    std::int64_t samples = 100'000;
    std::uint64_t seed = 2024;
    double zeta = 0.1;
    double undetermined_rate = 1e-3;  // failure rates in (0, this) are refused
};

namespace detail {

// Draws `n` points from the region (rejection from its box); returns false
// if the region looks empty.
inline bool sample_region(const RegionSet& rs, std::int64_t n, Rng& rng,
                          std::vector<std::vector<double>>& out) {
    regions::Box box = rs.bounding_box();
    if (rs.empty() || box.empty() || box.volume() <= 0.0) return false;
    const int dim = rs.dim();
    std::vector<double> a(dim);
    std::int64_t kept = 0, tried = 0;
    const std::int64_t max_tries = 400 * n;
    out.clear();
    out.reserve(n);
    while (kept < n && tried < max_tries) {
        ++tried;
        for (int i = 0; i < dim; ++i)
            a[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * rng.next_double();
        if (!rs.contains(a)) continue;
        out.push_back(a);
        ++kept;
    }
    return kept == n;
}

} // namespace detail

// Regular if the region sits inside the Type II lift (or, for terms whose
// cutoff does not depend on the innermost prime, inside the Type I lift);
// Decompose if the region and its one-more-prime extensions stay Type I;
// otherwise Discard. Containment is sampled; a tiny nonzero failure rate is
// reported as undetermined rather than guessed.
inline Classification classify(const Term& t, const LiftedRegion& typeI,
                               const LiftedRegion& typeII,
                               const ClassifyParams& cp = {}) {
    Rng rng(cp.seed);
    std::vector<std::vector<double>> pts;
    if (!detail::sample_region(t.region, cp.samples, rng, pts))
        return Classification::Regular;  // empty region: vacuously regular

    auto containment = [&](auto&& pred) {
        std::int64_t fail = 0;
        for (const auto& a : pts) fail += !pred(a);
        if (fail == 0) return 1;  // contained
        double rate = static_cast<double>(fail) / static_cast<double>(pts.size());
        if (rate < cp.undetermined_rate)
            throw undetermined_classification(
                "classify: containment failure rate " + std::to_string(rate) +
                " is too small to call (boundary-heavy region)");
        return 0;
    };

    if (containment([&](const std::vector<double>& a) {
            return regions::lifted_contains(typeII, a);
        }))
        return Classification::Regular;

    if (t.cutoff.kind != CutoffKind::PrevAlpha &&
        containment([&](const std::vector<double>& a) {
            return regions::lifted_contains(typeI, a);
        }))
        return Classification::Regular;

    // two more applications permissible: the point and each admissible
    // next-prime extension lie in the Type I lift
    Rng ext_rng(cp.seed ^ 0x5bf03115ULL);
    bool decompose_ok = false;
    try {
        decompose_ok = containment([&](const std::vector<double>& a) {
                           if (!regions::lifted_contains(typeI, a)) return false;
                           double lo = cp.zeta, hi = a.back();
                           if (!(lo < hi)) return true;  // no admissible extension
                           std::vector<double> ext = a;
                           ext.push_back(0.0);
                           for (int probe = 0; probe < 4; ++probe) {
                               ext.back() = lo + (hi - lo) * ext_rng.next_double();
                               if (!regions::lifted_contains(typeI, ext)) return false;
                           }
                           return true;
                       }) != 0;
    } catch (const undetermined_classification&) {
        throw;
    }
    if (decompose_ok) return Classification::Decompose;
    return Classification::Discard;
}

// ---------------------------------------------------------------------------
// Intersection of two permissible decompositions

namespace detail {

inline RegionSet lift2to4(const RegionSet& rs) { return rs.lifted_to(4); }

} // namespace detail

// Combines two no-role-reversal decompositions into one that is permissible
// for the union of their functional families. Discards add up, so the
// combined deficit is at most the sum of the two.
inline Decomposition intersect(const Decomposition& a, const Decomposition& b) {
    if (a.uses_role_reversals || b.uses_role_reversals)
        throw unsupported_structure(
            "intersect: role-reversal terms break the combination argument");

    auto check_stub_guard = [](const Decomposition& stub) {
        if (std::isnan(stub.rr_min_pair_sum) || stub.rr_min_pair_sum < 0.4)
            throw unsupported_structure(
                "intersect: stub component lacks the a1+a2 >= 0.4 role-reversal guard");
    };

    if (a.is_stub && b.is_stub)
        throw unsupported_structure("intersect: both components are stubs");
    if (a.is_stub || b.is_stub) {
        const Decomposition& stub = a.is_stub ? a : b;
        const Decomposition& full = a.is_stub ? b : a;
        check_stub_guard(stub);
        Decomposition out = full;
        out.z0_exponent = std::min(full.z0_exponent, stub.z0_exponent);
        out.z1 = pw_min(full.z1, stub.z1);
        out.K = std::max(full.K, stub.K);
        out.imported_deficit = full.imported_deficit + stub.imported_deficit;
        out.finalize();
        return out;
    }

    Decomposition out;
    out.z0_exponent = std::min(a.z0_exponent, b.z0_exponent);
    out.z1 = pw_min(a.z1, b.z1);
    out.zeta = std::min(a.zeta, b.zeta);
    out.K = std::max(a.K, b.K);
    out.imported_deficit = a.imported_deficit + b.imported_deficit;

    // depth 2: discard the union, keep the mutual keep, continue the mutual
    // continuation; mixed keep/continue regions follow the continuing side
    RegionSet f3_both = regions::set_intersection(a.stage2.decompose, b.stage2.decompose);
    RegionSet cross_ab = regions::set_intersection(a.stage2.regular, b.stage2.decompose);
    RegionSet cross_ba = regions::set_intersection(b.stage2.regular, a.stage2.decompose);
    out.stage2.discard = regions::set_union(a.stage2.discard, b.stage2.discard, "F2(1u2)");
    out.stage2.regular = regions::set_intersection(a.stage2.regular, b.stage2.regular, "F1(1n2)");
    out.stage2.decompose =
        regions::set_union(regions::set_union(f3_both, cross_ab), cross_ba, "F3(3)");

    // depth 4 splits restricted to whichever side owns the continuation
    RegionSet d4 =
        regions::set_intersection(regions::set_union(a.stage4.discard, b.stage4.discard),
                                  detail::lift2to4(f3_both));
    d4 = regions::set_union(
        d4, regions::set_intersection(a.stage4.discard, detail::lift2to4(cross_ba)));
    d4 = regions::set_union(
        d4, regions::set_intersection(b.stage4.discard, detail::lift2to4(cross_ab)),
        "D4(3)");
    RegionSet r4 =
        regions::set_intersection(regions::set_intersection(a.stage4.regular, b.stage4.regular),
                                  detail::lift2to4(f3_both));
    r4 = regions::set_union(
        r4, regions::set_intersection(a.stage4.regular, detail::lift2to4(cross_ba)));
    r4 = regions::set_union(
        r4, regions::set_intersection(b.stage4.regular, detail::lift2to4(cross_ab)),
        "R4(3)");
    out.stage4.discard = std::move(d4);
    out.stage4.regular = std::move(r4);

    // the combined Type domains
    std::vector<regions::Constraint> tI = a.typeI.base.constraints();
    for (const auto& c : b.typeI.base.constraints()) tI.push_back(c);
    out.typeI = LiftedRegion{Region(a.typeI.base.dim(), std::move(tI)), LiftKind::TypeI};
    std::vector<regions::Constraint> tII = a.typeII.base.constraints();
    for (const auto& c : b.typeII.base.constraints()) tII.push_back(c);
    out.typeII = LiftedRegion{Region(a.typeII.base.dim(), std::move(tII)), LiftKind::TypeII};

    out.finalize();
    return out;
}

// Sum of the deficit integrals over every discarded region, plus any
// imported constants.
inline deficit::DeficitResult deficit_of(const Decomposition& d,
                                         const buchstab::Evaluator& ev,
                                         const deficit::McParams& p) {
    deficit::DeficitResult total;
    total.region_name = "deficit";
    total.value = d.imported_deficit;
    double var = 0.0;
    for (const auto& t : d.terms()) {
        if (t.cls != Classification::Discard) continue;
        auto r = deficit::integrate_deficit(t.region, t.depth, ev, p);
        total.value += r.value;
        total.samples += r.samples;
        var += r.std_error * r.std_error;
    }
    total.std_error = std::sqrt(var);
    return total;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation

namespace detail {

// Prefix pruning: a part cannot accept a tuple whose first r coordinates
// already violate one of its constraints supported on those coordinates.
inline bool prefix_feasible(const Region& part, std::span<const double> a, int r) {
    for (const auto& c : part.constraints()) {
        int support = 0;
        for (int i = static_cast<int>(c.coeffs.size()); i-- > 0;)
            if (c.coeffs[i] != 0.0) { support = i + 1; break; }
        if (support > r) continue;
        double v = c.constant;
        for (int i = 0; i < support; ++i) v += c.coeffs[i] * a[i];
        if (!(c.strict ? v > 0.0 : v >= 0.0)) return false;
    }
    return true;
}

struct TermEvalCtx {
    const Decomposition* d;
    const Factorization* fac;
    std::vector<double> alphas;  // exponent of each distinct prime of k
    double log_x;
};

inline double cutoff_exponent(const TermEvalCtx& ctx, const CutoffFn& c,
                              std::span<const double> a, int depth) {
    switch (c.kind) {
        case CutoffKind::Constant: return c.value;
        case CutoffKind::PrevAlpha: return a[depth - 1];
        case CutoffKind::Z1: return ctx.d->z1.eval(a[0]);
    }
    return 0.0;
}

// psi(l, x^thr) where l = k with one copy of each prime in `used` removed.
inline int cofactor_psi(const TermEvalCtx& ctx, unsigned used, double thr) {
    const auto& factors = ctx.fac->factors;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        int e = factors[i].second - ((used >> i) & 1u);
        if (e > 0 && ctx.alphas[i] < thr) return 0;
    }
    return 1;
}

inline long count_tuples(const TermEvalCtx& ctx, const Term& t, unsigned used,
                         std::vector<double>& a, int r) {
    const int m = static_cast<int>(ctx.alphas.size());
    if (r == t.depth) {
        long hit = 0;
        for (const auto& part : t.region.parts())
            if (part.contains(a)) { hit = 1; break; }
        if (!hit) return 0;
        double thr = cutoff_exponent(ctx, t.cutoff, a, t.depth);
        return cofactor_psi(ctx, used, thr);
    }
    long total = 0;
    for (int i = 0; i < m; ++i) {
        if (used & (1u << i)) continue;
        a[r] = ctx.alphas[i];
        bool feasible = false;
        for (const auto& part : t.region.parts())
            if (prefix_feasible(part, a, r + 1)) { feasible = true; break; }
        if (!feasible) continue;
        total += count_tuples(ctx, t, used | (1u << i), a, r + 1);
    }
    return total;
}

} // namespace detail

// Number of ways k's distinct primes fill the term's pattern with the
// cofactor passing its psi cutoff (sign not applied).
inline long term_count(const Decomposition& d, const Term& t, u64 k,
                       const Factorization& fac, double x) {
    if (fac.n != k || fac.reconstruct() != k)
        throw parameter_error("term_count: factorization incomplete or mismatched");
    detail::TermEvalCtx ctx;
    ctx.d = &d;
    ctx.fac = &fac;
    ctx.log_x = std::log(x);
    for (auto [p, e] : fac.factors)
        ctx.alphas.push_back(std::log(static_cast<double>(p)) / ctx.log_x);
    if (t.depth == 0)
        return detail::cofactor_psi(ctx, 0u, d.z0_exponent);
    if (fac.distinct() < t.depth) return 0;
    if (fac.distinct() > 24)
        throw resource_error("term_count: too many distinct primes");
    std::vector<double> a(t.depth, 0.0);
    return detail::count_tuples(ctx, t, 0u, a, 0);
}

// lambda(k): the signed sum over all retained terms. Zero whenever k has a
// prime factor below x^zeta.
inline double evaluate_lambda(const Decomposition& d, u64 k, const Factorization& fac,
                              double x) {
    if (!(2.0 * static_cast<double>(k) > x && static_cast<double>(k) <= x))
        throw parameter_error("evaluate_lambda: k must lie in (x/2, x]");
    if (fac.n != k || fac.reconstruct() != k)
        throw parameter_error("evaluate_lambda: factorization incomplete");
    const double log_x = std::log(x);
    for (auto [p, e] : fac.factors)
        if (std::log(static_cast<double>(p)) / log_x < d.zeta) return 0.0;
    double sum = 0.0;
    for (const auto& t : d.terms()) {
        if (t.cls == Classification::Discard) continue;
        sum += t.sign * static_cast<double>(term_count(d, t, k, fac, x));
    }
    return sum;
}

// The discarded mass at k (everything lambda dropped relative to rho).
inline double evaluate_discard(const Decomposition& d, u64 k, const Factorization& fac,
                               double x) {
    const double log_x = std::log(x);
    for (auto [p, e] : fac.factors)
        if (std::log(static_cast<double>(p)) / log_x < d.zeta) return 0.0;
    double sum = 0.0;
    for (const auto& t : d.terms()) {
        if (t.cls != Classification::Discard) continue;
        sum += static_cast<double>(term_count(d, t, k, fac, x));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Window profiles

struct LambdaProfile {
    u64 x = 0;
    u64 window_lo = 0, window_hi = 0;  // (lo, hi]
    double sum_lambda = 0.0;
    double sum_rho = 0.0;
    double empirical_deficit = 0.0;
};

namespace detail {

// Factorizations of every integer in (lo, hi], by sieving the window.
inline std::vector<Factorization> factorize_window(u64 lo, u64 hi,
                                                   const arith::PrimeTable& base) {
    const u64 n = hi - lo;
    std::vector<Factorization> out(n);
    std::vector<u64> rem(n);
    for (u64 i = 0; i < n; ++i) {
        out[i].n = lo + 1 + i;
        rem[i] = lo + 1 + i;
    }
    for (u64 p : base.primes()) {
        if (p * p > hi) break;
        u64 first = (lo / p + 1) * p;
        for (u64 m = first; m <= hi; m += p) {
            u64 i = m - lo - 1;
            int e = 0;
            while (rem[i] % p == 0) { rem[i] /= p; ++e; }
            if (e > 0) out[i].factors.push_back({p, e});
        }
    }
    for (u64 i = 0; i < n; ++i)
        if (rem[i] > 1) out[i].factors.push_back({rem[i], 1});
    return out;
}

} // namespace detail

// Sums lambda and rho over the window (y-h, y]. h = 0 selects the desk-scale
// default x / log^2 x.
inline LambdaProfile lambda_profile(const Decomposition& d, u64 x, u64 y, u64 h = 0) {
    if (h == 0) {
        double lx = std::log(static_cast<double>(x));
        h = static_cast<u64>(static_cast<double>(x) / (lx * lx));
    }
    if (!(y <= x && y > h && 2 * (y - h) >= x))
        throw parameter_error("lambda_profile: window must sit inside (x/2, x]");
    const u64 lo = y - h;

    arith::PrimeTable base(static_cast<u64>(std::sqrt(static_cast<double>(y))) + 2);
    auto facs = detail::factorize_window(lo, y, base);

    const u64 block = 4096;
    const u64 n_blocks = (facs.size() + block - 1) / block;
    std::vector<double> lam(n_blocks, 0.0), rho(n_blocks, 0.0);
    parallel_blocks(n_blocks, [&](std::size_t b) {
        double l = 0.0, r = 0.0;
        u64 start = b * block, stop = std::min<u64>(facs.size(), start + block);
        for (u64 i = start; i < stop; ++i) {
            l += evaluate_lambda(d, facs[i].n, facs[i], static_cast<double>(x));
            r += facs[i].is_prime() ? 1.0 : 0.0;
        }
        lam[b] = l;
        rho[b] = r;
    });

    LambdaProfile out;
    out.x = x;
    out.window_lo = lo;
    out.window_hi = y;
    for (u64 b = 0; b < n_blocks; ++b) {
        out.sum_lambda += lam[b];
        out.sum_rho += rho[b];
    }
    out.empirical_deficit =
        out.sum_rho > 0.0 ? 1.0 - out.sum_lambda / out.sum_rho : 0.0;
    return out;
}

// Profile over an explicit list of integers (synthetic windows in tests).
inline LambdaProfile lambda_profile_over(const Decomposition& d, u64 x,
                                         const std::vector<u64>& ks) {
    LambdaProfile out;
    out.x = x;
    for (u64 k : ks) {
        auto fac = arith::factorize(k);
        out.sum_lambda += evaluate_lambda(d, k, fac, static_cast<double>(x));
        out.sum_rho += fac.is_prime() ? 1.0 : 0.0;
    }
    out.empirical_deficit =
        out.sum_rho > 0.0 ? 1.0 - out.sum_lambda / out.sum_rho : 0.0;
    return out;
}

} // namespace lbsieve::decomp
