#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lbsieve/buchstab.hpp"
#include "lbsieve/errors.hpp"
#include "lbsieve/parallel.hpp"
#include "lbsieve/regions.hpp"
#include "lbsieve/rng.hpp"

namespace lbsieve::deficit {

// Deficit carried by the companion decomposition, imported from its published
// bound rather than computed here.
inline constexpr double imported_companion_deficit = 0.01;

struct McParams {
    std::int64_t samples = 2'000'000;
    std::uint64_t seed = 42;
    int strata_per_dim = 8;
};

struct DeficitResult {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::string region_name;
};

namespace detail {

// Equal-allocation stratified MC over a box, rejecting into `inside`.
// Integrand: omega((1 - sum a)/a_j) / (a_1 ... a_{j-1} a_j^2).
// Every stratum draws from its own substream and partial sums are reduced in
// stratum order, so the result is bit-identical for any thread count.
inline DeficitResult stratified_mc(
    const std::function<bool(std::span<const double>)>& inside,
    const regions::Box& box, int j, const buchstab::Evaluator& ev,
    const McParams& p, std::string region_name) {
    DeficitResult out;
    out.region_name = std::move(region_name);
    out.samples = std::max<std::int64_t>(p.samples, 10'000);
    if (box.empty() || box.volume() <= 0.0) return out;

    const int S = std::max(1, p.strata_per_dim);
    std::int64_t M = 1;
    for (int d = 0; d < j; ++d) M *= S;
    const double stratum_vol = box.volume() / static_cast<double>(M);
    const std::int64_t base_n = out.samples / M;
    const std::int64_t extra = out.samples % M;

    struct Acc {
        double sum = 0.0, sumsq = 0.0;
        std::int64_t n = 0;
    };
    std::vector<Acc> acc(M);

    std::vector<double> width(j), origin(j);
    for (int d = 0; d < j; ++d) {
        width[d] = (box.hi[d] - box.lo[d]) / S;
        origin[d] = box.lo[d];
    }

    parallel_blocks(static_cast<std::size_t>(M), [&](std::size_t s) {
        Rng rng(p.seed, s);
        std::vector<double> lo(j);
        std::size_t idx = s;
        for (int d = 0; d < j; ++d) {
            lo[d] = origin[d] + width[d] * static_cast<double>(idx % S);
            idx /= S;
        }
        const std::int64_t n = base_n + (static_cast<std::int64_t>(s) < extra ? 1 : 0);
        std::vector<double> a(j);
        Acc local;
        local.n = n;
        for (std::int64_t i = 0; i < n; ++i) {
            for (int d = 0; d < j; ++d) a[d] = lo[d] + width[d] * rng.next_double();
            if (!inside(a)) continue;
            double sum = 0.0, denom = 1.0;
            for (int d = 0; d < j; ++d) sum += a[d];
            for (int d = 0; d + 1 < j; ++d) denom *= a[d];
            denom *= a[j - 1] * a[j - 1];
            const double u = (1.0 - sum) / a[j - 1];
            if (u < 1.0) {
                std::ostringstream msg;
                msg << "integrate_deficit: omega argument " << u << " < 1 at sample (";
                for (int d = 0; d < j; ++d) msg << (d ? ", " : "") << a[d];
                msg << "); the region must enforce the omega domain";
                throw domain_error(msg.str());
            }
            const double f = ev.omega(u) / denom;
            local.sum += f;
            local.sumsq += f * f;
        }
        acc[s] = local;
    });

    double value = 0.0, var = 0.0;
    for (std::int64_t s = 0; s < M; ++s) {
        const Acc& c = acc[s];
        if (c.n == 0) continue;
        const double mean = c.sum / static_cast<double>(c.n);
        value += stratum_vol * mean;
        if (c.n > 1) {
            const double sv =
                (c.sumsq - c.sum * c.sum / static_cast<double>(c.n)) /
                static_cast<double>(c.n - 1);
            var += stratum_vol * stratum_vol * sv / static_cast<double>(c.n);
        }
    }
    out.value = value;
    out.std_error = std::sqrt(var);
    return out;
}

} // namespace detail

// MC estimate of the deficit integral over a region set of dimension j.
inline DeficitResult integrate_deficit(const regions::RegionSet& rs, int j,
                                       const buchstab::Evaluator& ev,
                                       const McParams& p) {
    if (rs.dim() != j)
        throw parameter_error("integrate_deficit: region dim != j");
    std::string name = rs.name().empty() ? "region" : rs.name();
    if (rs.empty())
        return DeficitResult{0.0, 0.0, std::max<std::int64_t>(p.samples, 10'000), name};
    return detail::stratified_mc(
        [&rs](std::span<const double> a) { return rs.contains(a); },
        rs.bounding_box(), j, ev, p, name);
}

// First deficit integral: the two-dimensional discarded region,
//   0.275 <= a1 <= 0.45,  0.55 - a1 <= a2 <= min(a1, (1 - a1)/3),
// with integrand omega((1-a1-a2)/a2) / (a2^2 a1). The implicit upper limit
// min(a1, (1-a1-a2)/2) is resolved algebraically to a2 <= (1-a1)/3.
inline DeficitResult first_integral(const buchstab::Evaluator& ev, const McParams& p) {
    regions::RegionSet f2 = regions::catalog::make_F2();
    DeficitResult r = integrate_deficit(f2, 2, ev, p);
    r.region_name = "first_integral";
    return r;
}

// Pointwise integrand of the first integral (exposed for spot checks).
inline double first_integrand(double a1, double a2, const buchstab::Evaluator& ev) {
    return ev.omega((1.0 - a1 - a2) / a2) / (a2 * a2 * a1);
}

// True when some sum of three or all four coordinates lies in [0.45, 0.55].
inline bool has_type2_subset_sum(std::span<const double> a) {
    double q = a[0] + a[1] + a[2] + a[3];
    if (q >= 0.45 && q <= 0.55) return true;
    for (int skip = 0; skip < 4; ++skip) {
        double t = q - a[skip];
        if (t >= 0.45 && t <= 0.55) return true;
    }
    return false;
}

// Second deficit integral: the four-dimensional region G with (a1,a2) in the
// continuation triangle, full ordering/square constraints, a4 >= 0.1; the
// Type II removal drops points with a 3- or 4-subset sum in [0.45, 0.55].
inline DeficitResult second_integral(const buchstab::Evaluator& ev, const McParams& p,
                                     bool apply_typeII_removal = true) {
    static const regions::RegionSet g_base = regions::catalog::make_G_base();
    DeficitResult r = detail::stratified_mc(
        [apply_typeII_removal](std::span<const double> a) {
            if (!g_base.contains(a)) return false;
            return !(apply_typeII_removal && has_type2_subset_sum(a));
        },
        g_base.bounding_box(), 4, ev, p,
        apply_typeII_removal ? "second_integral" : "second_integral_no_removal");
    return r;
}

struct TotalDeficit {
    DeficitResult first;
    DeficitResult second;
    double imported = imported_companion_deficit;
    double value = 0.0;
};

inline TotalDeficit total_deficit_detail(const buchstab::Evaluator& ev, const McParams& p) {
    TotalDeficit t;
    t.first = first_integral(ev, p);
    t.second = second_integral(ev, p, true);
    t.value = t.first.value + t.second.value + t.imported;
    if (!(t.value < 0.75)) {
        std::ostringstream msg;
        msg << "total deficit " << t.value << " >= 0.75 (first=" << t.first.value
            << ", second=" << t.second.value << ", imported=" << t.imported << ")";
        throw reproduction_failure(msg.str(), t.first.value, t.second.value, t.imported);
    }
    return t;
}

// I1 + I2 (with removals) + the imported constant; asserts the 3/4 bound.
inline double total_deficit(const buchstab::Evaluator& ev, const McParams& p) {
    return total_deficit_detail(ev, p).value;
}

} // namespace lbsieve::deficit
