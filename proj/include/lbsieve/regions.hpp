#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lbsieve/errors.hpp"

namespace lbsieve::regions {

// Exponent vector (a_1,...,a_j): prime sizes written as p_i = x^{a_i}.
using ExponentVector = std::vector<double>;

// Affine inequality  constant + sum_i coeffs[i]*a_i  >= 0  (or > 0 if strict).
struct Constraint {
    std::vector<double> coeffs;
    double constant = 0.0;
    bool strict = false;

    double eval(std::span<const double> a) const {
        double v = constant;
        for (std::size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * a[i];
        return v;
    }
    bool holds(std::span<const double> a) const {
        double v = eval(a);
        return strict ? v > 0.0 : v >= 0.0;
    }
    // The complement inequality (ties flip sides).
    Constraint negated() const {
        Constraint c;
        c.coeffs.reserve(coeffs.size());
        for (double x : coeffs) c.coeffs.push_back(-x);
        c.constant = -constant;
        c.strict = !strict;
        return c;
    }
};

struct Box {
    std::vector<double> lo, hi;
    bool empty() const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] <= hi[i])) return true;
        return lo.empty();
    }
    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
        return v;
    }
};

// Conjunction of affine constraints: a convex polytope in exponent space.
class Region {
public:
    Region() = default;
    Region(int dim, std::vector<Constraint> cs) : dim_(dim), constraints_(std::move(cs)) {
        for (auto& c : constraints_) c.coeffs.resize(dim_, 0.0);
    }

    int dim() const { return dim_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }

    bool contains(std::span<const double> a) const {
        if (static_cast<int>(a.size()) != dim_)
            throw parameter_error("Region::contains: dimension mismatch");
        for (const auto& c : constraints_)
            if (!c.holds(a)) return false;
        return true;
    }

    Region& add(std::vector<double> coeffs, double constant, bool strict) {
        coeffs.resize(dim_, 0.0);
        constraints_.push_back({std::move(coeffs), constant, strict});
        return *this;
    }

    // Interval constraint propagation from [0,1]^dim (or the explicit box).
    Box bounding_box() const {
        if (!box_override_.lo.empty()) return box_override_;
        Box b;
        b.lo.assign(dim_, 0.0);
        b.hi.assign(dim_, 1.0);
        for (int pass = 0; pass < 8; ++pass) {
            for (const auto& c : constraints_) {
                for (int i = 0; i < dim_; ++i) {
                    double ci = c.coeffs[i];
                    if (ci == 0.0) continue;
                    double rest = -c.constant;
                    for (int j = 0; j < dim_; ++j) {
                        if (j == i) continue;
                        double cj = c.coeffs[j];
                        rest -= cj > 0 ? cj * b.hi[j] : cj * b.lo[j];
                    }
                    if (ci > 0)
                        b.lo[i] = std::max(b.lo[i], rest / ci);
                    else
                        b.hi[i] = std::min(b.hi[i], rest / ci);
                }
            }
        }
        return b;
    }

    void set_box(std::vector<double> lo, std::vector<double> hi) {
        box_override_ = Box{std::move(lo), std::move(hi)};
    }

    // Same polytope in a higher-dimensional space (new coords unconstrained).
    Region lifted_to(int new_dim) const {
        Region r(new_dim, constraints_);
        r.box_override_ = box_override_;
        if (!r.box_override_.lo.empty()) {
            r.box_override_.lo.resize(new_dim, 0.0);
            r.box_override_.hi.resize(new_dim, 1.0);
        }
        return r;
    }

private:
    int dim_ = 0;
    std::vector<Constraint> constraints_;
    Box box_override_;
};

// Finite union of Regions sharing one dimension.
class RegionSet {
public:
    RegionSet() = default;
    explicit RegionSet(int dim, std::string name = {}) : dim_(dim), name_(std::move(name)) {}
    RegionSet(Region r, std::string name = {}) : dim_(r.dim()), name_(std::move(name)) {
        parts_.push_back(std::move(r));
    }

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    const std::vector<Region>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }

    RegionSet& add_part(Region r) {
        if (r.dim() != dim_) throw parameter_error("RegionSet::add_part: dimension mismatch");
        parts_.push_back(std::move(r));
        return *this;
    }

    bool contains(std::span<const double> a) const {
        if (static_cast<int>(a.size()) != dim_)
            throw parameter_error("RegionSet::contains: dimension mismatch");
        for (const auto& p : parts_)
            if (p.contains(a)) return true;
        return false;
    }

    Box bounding_box() const {
        Box hull;
        bool first = true;
        for (const auto& p : parts_) {
            Box b = p.bounding_box();
            if (b.empty()) continue;
            if (first) {
                hull = b;
                first = false;
            } else {
                for (int i = 0; i < dim_; ++i) {
                    hull.lo[i] = std::min(hull.lo[i], b.lo[i]);
                    hull.hi[i] = std::max(hull.hi[i], b.hi[i]);
                }
            }
        }
        if (first) {  // no nonempty part
            hull.lo.assign(dim_, 0.0);
            hull.hi.assign(dim_, 0.0);
        }
        return hull;
    }

    RegionSet lifted_to(int new_dim, std::string name = {}) const {
        RegionSet out(new_dim, std::move(name));
        for (const auto& p : parts_) out.add_part(p.lifted_to(new_dim));
        return out;
    }

private:
    int dim_ = 0;
    std::string name_;
    std::vector<Region> parts_;
};

inline RegionSet set_union(const RegionSet& a, const RegionSet& b, std::string name = {}) {
    if (a.dim() != b.dim()) throw parameter_error("set_union: dimension mismatch");
    RegionSet out(a.dim(), std::move(name));
    for (const auto& p : a.parts()) out.add_part(p);
    for (const auto& p : b.parts()) out.add_part(p);
    return out;
}

inline RegionSet set_intersection(const RegionSet& a, const RegionSet& b, std::string name = {}) {
    if (a.dim() != b.dim()) throw parameter_error("set_intersection: dimension mismatch");
    RegionSet out(a.dim(), std::move(name));
    for (const auto& pa : a.parts())
        for (const auto& pb : b.parts()) {
            std::vector<Constraint> cs = pa.constraints();
            cs.insert(cs.end(), pb.constraints().begin(), pb.constraints().end());
            Region r(a.dim(), std::move(cs));
            Box bb = r.bounding_box();
            if (!bb.empty()) out.add_part(std::move(r));
        }
    return out;
}

// a \ b as an explicit union: a * product over b's parts of (one negated
// constraint each). Part counts multiply, so keep b small.
inline RegionSet set_difference(const RegionSet& a, const RegionSet& b, std::string name = {}) {
    if (a.dim() != b.dim()) throw parameter_error("set_difference: dimension mismatch");
    RegionSet out = a;
    out.set_name(name);
    for (const auto& pb : b.parts()) {
        RegionSet next(a.dim(), name);
        for (const auto& cur : out.parts())
            for (const auto& c : pb.constraints()) {
                std::vector<Constraint> cs = cur.constraints();
                cs.push_back(c.negated());
                Region r(a.dim(), std::move(cs));
                Box bb = r.bounding_box();
                if (!bb.empty()) next.add_part(std::move(r));
            }
        out = std::move(next);
    }
    out.set_name(std::move(name));
    return out;
}

// ---------------------------------------------------------------------------
// Named membership predicates

// E_j: every coordinate >= zeta and the coordinate sum <= 1.
inline bool in_E(std::span<const double> a, double zeta) {
    if (!(zeta > 0.0)) throw parameter_error("in_E: zeta must be positive");
    double sum = 0.0;
    for (double x : a) {
        if (x < zeta) return false;
        sum += x;
    }
    return sum <= 1.0;
}

// H_j: a_j < ... < a_1 and 2 a_r + (a_1 + ... + a_{r-1}) < 1 for 2 <= r <= j.
inline bool in_H(std::span<const double> a) {
    if (a.empty()) throw parameter_error("in_H: dim must be >= 1");
    double prefix = a[0];
    for (std::size_t r = 1; r < a.size(); ++r) {
        if (!(a[r] < a[r - 1])) return false;
        if (!(2.0 * a[r] + prefix < 1.0)) return false;
        prefix += a[r];
    }
    return true;
}

// ---------------------------------------------------------------------------
// Lifted regions

enum class LiftKind { TypeI, TypeII };

// R_j^* / S_j^*: all higher-dimensional vectors whose coordinates can be
// partitioned so the block sums land in the base region. Type I partitions
// into exactly j nonempty blocks; Type II into j+1 blocks (at most one
// empty), with j of the nonempty blocks forming the vector.
struct LiftedRegion {
    Region base;
    LiftKind kind = LiftKind::TypeI;
};

namespace detail {

inline bool assign_blocks(const Region& base, std::span<const double> a,
                          int n_blocks, bool allow_rest) {
    const int t = static_cast<int>(a.size());
    std::vector<double> sums(n_blocks, 0.0);
    std::vector<int> counts(n_blocks, 0);
    // label of coordinate i: 0..n_blocks-1 (block), or n_blocks = "rest"
    const int n_labels = n_blocks + (allow_rest ? 1 : 0);
    std::vector<int> label(t, 0);
    int i = 0;
    for (;;) {
        if (i == t) {
            bool ok = true;
            for (int bnum = 0; bnum < n_blocks; ++bnum)
                if (counts[bnum] == 0) { ok = false; break; }
            if (ok && base.contains(sums)) return true;
            // backtrack
            --i;
            while (i >= 0) {
                int l = label[i];
                if (l < n_blocks) { sums[l] -= a[i]; counts[l]--; }
                if (label[i] + 1 < n_labels) {
                    label[i]++;
                    break;
                }
                label[i] = 0;
                --i;
            }
            if (i < 0) return false;
        }
        int l = label[i];
        if (l < n_blocks) { sums[l] += a[i]; counts[l]++; }
        ++i;
    }
}

} // namespace detail

// Membership in a lifted region. Enumerates all block assignments, which
// covers every block-to-coordinate order. Guarded against partition blowup.
inline bool lifted_contains(const LiftedRegion& l, std::span<const double> a) {
    const int t = static_cast<int>(a.size());
    const int j = l.base.dim();
    if (t < j) return false;
    if (t > 12)
        throw resource_error("lifted_contains: more than 12 coordinates (partition explosion)");

    if (l.kind == LiftKind::TypeII && j == 1) {
        // one block + rest: some nonempty subset of coordinates sums into base
        for (unsigned mask = 1; mask < (1u << t); ++mask) {
            double s = 0.0;
            for (int i = 0; i < t; ++i)
                if (mask & (1u << i)) s += a[i];
            std::array<double, 1> v{s};
            if (l.base.contains(v)) return true;
        }
        return false;
    }
    return detail::assign_blocks(l.base, a, j, l.kind == LiftKind::TypeII);
}

// ---------------------------------------------------------------------------
// Built-in catalog
//
// Named exponent regions used by the deficit integrals and the lower-bound
// sieve construction, all with zeta = 1/10:
//   R2       Type I information: a1 <= 0.55, a2 <= 0.275, a1+a2 <= 0.775
//   S1       Type II information: [0.45, 0.55]
//   F        base two-prime domain 0.1 <= a2 < a1 < 1/2, a1 + 2 a2 < 1
//   F1       F restricted to a subset sum in S1
//   F2       the discarded two-dimensional region (first deficit integral)
//   F3       the triangle a1 + a2 < 0.45 where two more splits are allowed
//   F1_EXT   F \ (F2 u F3): everything kept at depth 2
//   F3_EXT3  F3 with one more prime coordinate a3 in [0.1, a2)
//   S4_BASE  F3 with two more prime coordinates
//   G_BASE   S4_BASE inside H4 (square-free ordering constraints)
//   G        G_BASE minus points with a 3- or 4-subset sum in [0.45, 0.55]
//   R4_KEPT  S4_BASE points with such a subset sum (kept at depth 4)
//   E1_BASE  one-prime range [0.1, 1/2)
//   D2_REG   declared regular strip 0.4 <= a1+a2 <= 0.46 of the imported
//            companion decomposition

namespace catalog {

inline Region make_R2() {
    Region r(2, {});
    r.add({-1, 0}, 0.55, false);
    r.add({0, -1}, 0.275, false);
    r.add({-1, -1}, 0.775, false);
    return r;
}

inline Region make_S1() {
    Region r(1, {});
    r.add({1}, -0.45, false);
    r.add({-1}, 0.55, false);
    return r;
}

inline Region make_F_base() {
    Region r(2, {});
    r.add({0, 1}, -0.1, false);   // a2 >= 0.1
    r.add({1, -1}, 0.0, true);    // a2 < a1
    r.add({-1, 0}, 0.5, true);    // a1 < 1/2
    r.add({-1, -2}, 1.0, true);   // a1 + 2 a2 < 1
    return r;
}

inline RegionSet make_F() { return RegionSet(make_F_base(), "F"); }

inline RegionSet make_F2() {
    Region r(2, {});
    r.add({0, 1}, -0.1, false);    // a2 >= 0.1
    r.add({1, 0}, -0.275, false);  // a1 >= 0.275
    r.add({-1, 0}, 0.45, false);   // a1 <= 0.45
    r.add({1, 1}, -0.55, false);   // a1 + a2 >= 0.55
    r.add({1, -1}, 0.0, false);    // a2 <= a1
    r.add({-1, -3}, 1.0, false);   // a2 <= (1 - a1)/3
    r.set_box({0.275, 0.1}, {0.45, (1.0 - 0.275) / 3.0});
    return RegionSet(std::move(r), "F2");
}

inline RegionSet make_F3() {
    Region r(2, {});
    r.add({0, 1}, -0.1, false);   // a2 >= 0.1
    r.add({1, -1}, 0.0, true);    // a2 < a1
    r.add({-1, -1}, 0.45, true);  // a1 + a2 < 0.45
    r.set_box({0.1, 0.1}, {0.35, 0.225});
    return RegionSet(std::move(r), "F3");
}

inline RegionSet make_F1() {
    RegionSet out(2, "F1");
    {
        Region r = make_F_base();
        r.add({1, 1}, -0.45, false);
        r.add({-1, -1}, 0.55, false);
        out.add_part(std::move(r));
    }
    {
        Region r = make_F_base();
        r.add({1, 0}, -0.45, false);
        r.add({-1, 0}, 0.55, false);
        out.add_part(std::move(r));
    }
    {
        Region r = make_F_base();
        r.add({0, 1}, -0.45, false);
        r.add({0, -1}, 0.55, false);
        out.add_part(std::move(r));
    }
    return out;
}

// F \ (F2 u F3), written as three explicit parts.
inline RegionSet make_F1_ext() {
    RegionSet out(2, "F1_EXT");
    {
        Region r = make_F_base();              // right of the a1 = 0.45 wall
        r.add({1, 0}, -0.45, true);            // a1 > 0.45
        r.add({1, 1}, -0.45, false);           // a1 + a2 >= 0.45
        out.add_part(std::move(r));
    }
    {
        Region r = make_F_base();              // the S1 sum strip
        r.add({1, 1}, -0.45, false);
        r.add({-1, -1}, 0.55, true);           // a1 + a2 < 0.55
        out.add_part(std::move(r));
    }
    {
        Region r = make_F_base();              // above the omega-argument cut
        r.add({1, 1}, -0.45, false);
        r.add({1, 3}, -1.0, true);             // a1 + 3 a2 > 1
        out.add_part(std::move(r));
    }
    return out;
}

inline Region extend_ordered(Region base, int new_dim) {
    // adds coordinate new_dim-1 with range [0.1, a_{new_dim-2})
    Region r = base.lifted_to(new_dim);
    std::vector<double> lo(new_dim, 0.0), ord(new_dim, 0.0);
    lo[new_dim - 1] = 1.0;
    r.add(lo, -0.1, false);
    ord[new_dim - 2] = 1.0;
    ord[new_dim - 1] = -1.0;
    r.add(ord, 0.0, true);
    return r;
}

inline RegionSet make_F3_ext3() {
    RegionSet f3 = make_F3();
    Region r = extend_ordered(f3.parts()[0], 3);
    r.set_box({0.1, 0.1, 0.1}, {0.35, 0.225, 0.225});
    return RegionSet(std::move(r), "F3_EXT3");
}

inline RegionSet make_sigma4_base() {
    RegionSet e3 = make_F3_ext3();
    Region r = extend_ordered(e3.parts()[0], 4);
    r.set_box({0.1, 0.1, 0.1, 0.1}, {0.35, 0.225, 0.225, 0.225});
    return RegionSet(std::move(r), "S4_BASE");
}

inline RegionSet make_G_base() {
    RegionSet s4 = make_sigma4_base();
    Region r = s4.parts()[0];
    r.add({-1, -2, 0, 0}, 1.0, true);
    r.add({-1, -1, -2, 0}, 1.0, true);
    r.add({-1, -1, -1, -2}, 1.0, true);
    r.set_box({0.1, 0.1, 0.1, 0.1}, {0.35, 0.225, 0.225, 0.225});
    return RegionSet(std::move(r), "G_BASE");
}

// Subset sums subject to the Type II removal: the full sum and each
// sum of three (full minus one coordinate).
inline std::vector<std::vector<double>> removal_sum_coeffs() {
    std::vector<std::vector<double>> out;
    out.push_back({1, 1, 1, 1});
    for (int skip = 0; skip < 4; ++skip) {
        std::vector<double> c(4, 1.0);
        c[skip] = 0.0;
        out.push_back(std::move(c));
    }
    return out;
}

inline RegionSet make_G() {
    const Region base = make_G_base().parts()[0];
    const auto sums = removal_sum_coeffs();
    RegionSet out(4, "G");
    auto lo_constraint = [](const std::vector<double>& c) {
        Constraint k;  // sum < 0.45
        k.coeffs.reserve(4);
        for (double x : c) k.coeffs.push_back(-x);
        k.constant = 0.45;
        k.strict = true;
        return k;
    };
    auto hi_constraint = [](const std::vector<double>& c) {
        Constraint k;  // sum > 0.55
        k.coeffs = c;
        k.constant = -0.55;
        k.strict = true;
        return k;
    };
    // full sum below the window: every 3-sum is below it too
    {
        Region r = base;
        r.add({-1, -1, -1, -1}, 0.45, true);
        out.add_part(std::move(r));
    }
    // full sum above the window: each 3-sum independently below or above
    for (unsigned mask = 0; mask < 16; ++mask) {
        Region r = base;
        std::vector<Constraint> cs = r.constraints();
        cs.push_back(hi_constraint(sums[0]));
        for (int i = 0; i < 4; ++i)
            cs.push_back(mask & (1u << i) ? hi_constraint(sums[i + 1])
                                          : lo_constraint(sums[i + 1]));
        Region part(4, std::move(cs));
        part.set_box({0.1, 0.1, 0.1, 0.1}, {0.35, 0.225, 0.225, 0.225});
        out.add_part(std::move(part));
    }
    return out;
}

inline RegionSet make_R4_kept() {
    const Region base = make_sigma4_base().parts()[0];
    RegionSet out(4, "R4_KEPT");
    for (const auto& c : removal_sum_coeffs()) {
        Region r = base;
        Constraint lo;  // sum >= 0.45
        lo.coeffs = c;
        lo.constant = -0.45;
        lo.strict = false;
        Constraint hi;  // sum <= 0.55
        hi.coeffs.reserve(4);
        for (double x : c) hi.coeffs.push_back(-x);
        hi.constant = 0.55;
        hi.strict = false;
        std::vector<Constraint> cs = r.constraints();
        cs.push_back(std::move(lo));
        cs.push_back(std::move(hi));
        Region part(4, std::move(cs));
        part.set_box({0.1, 0.1, 0.1, 0.1}, {0.35, 0.225, 0.225, 0.225});
        out.add_part(std::move(part));
    }
    return out;
}

inline RegionSet make_E1_base() {
    Region r(1, {});
    r.add({1}, -0.1, false);
    r.add({-1}, 0.5, true);
    return RegionSet(std::move(r), "E1_BASE");
}

inline RegionSet make_D2_regular() {
    Region r(2, {});
    r.add({1, 1}, -0.4, false);
    r.add({-1, -1}, 0.46, false);
    return RegionSet(std::move(r), "D2_REG");
}

struct Entry {
    std::string name;
    RegionSet set;
};

inline std::vector<Entry> all() {
    std::vector<Entry> out;
    out.push_back({"R2", RegionSet(make_R2(), "R2")});
    out.push_back({"S1", RegionSet(make_S1(), "S1")});
    out.push_back({"F", make_F()});
    out.push_back({"F1", make_F1()});
    out.push_back({"F2", make_F2()});
    out.push_back({"F3", make_F3()});
    out.push_back({"F1_EXT", make_F1_ext()});
    out.push_back({"F3_EXT3", make_F3_ext3()});
    out.push_back({"S4_BASE", make_sigma4_base()});
    out.push_back({"G_BASE", make_G_base()});
    out.push_back({"G", make_G()});
    out.push_back({"R4_KEPT", make_R4_kept()});
    out.push_back({"E1_BASE", make_E1_base()});
    out.push_back({"D2_REG", make_D2_regular()});
    return out;
}

inline const RegionSet& find(const std::vector<Entry>& entries, const std::string& name) {
    for (const auto& e : entries)
        if (e.name == name) return e.set;
    throw parameter_error("region catalog: unknown name '" + name + "'");
}

} // namespace catalog

} // namespace lbsieve::regions
