#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lbsieve/errors.hpp"

namespace lbsieve::buchstab {

// Buchstab's function omega(u):
//
//   omega(u) = 1/u                      on [1, 2]     (closed form)
//   (u omega(u))' = omega(u - 1)        for u > 2
//
// The delay equation is integrated one unit interval at a time with classic
// fixed-step RK4; the delayed value always lies on an interval that is already
// tabulated (or on the closed-form segment), so no implicit solve is needed.
// Dense output is cubic Lagrange interpolation on the stored nodes, with the
// stencil clamped inside each unit interval so the derivative kinks at
// integer arguments never degrade the order.
class Evaluator {
public:
    double u_max() const { return u_max_; }
    double grid_step() const { return step_; }
    std::size_t piece_count() const { return pieces_.size(); }

    // omega(u) for u in [1, u_max]. Out of range is a hard error.
    double omega(double u) const {
        if (!(u >= 1.0) || u > u_max_)
            throw domain_error("omega: u=" + std::to_string(u) +
                               " outside [1, " + std::to_string(u_max_) + "]");
        if (u <= 2.0) return 1.0 / u;
        return interp(u);
    }

    friend Evaluator build_evaluator(double u_max, double grid_step);

private:
    double u_max_ = 0;
    double step_ = 0;
    int n_per_unit_ = 0;
    // pieces_[m] holds omega at nodes 2+m, 2+m+h, ..., 3+m.
    std::vector<std::vector<double>> pieces_;

    double interp(double u) const {
        int m = static_cast<int>(u - 2.0);
        if (m < 0) m = 0;
        if (m >= static_cast<int>(pieces_.size())) m = static_cast<int>(pieces_.size()) - 1;
        const std::vector<double>& y = pieces_[m];
        double t = (u - (2.0 + m)) / step_;
        int n = n_per_unit_;
        int i0 = static_cast<int>(t) - 1;
        if (i0 < 0) i0 = 0;
        if (i0 > n - 3) i0 = n - 3;
        double s = t - i0;
        // cubic Lagrange on nodes i0..i0+3
        double s1 = s - 1.0, s2 = s - 2.0, s3 = s - 3.0;
        return y[i0] * (s1 * s2 * s3) / -6.0
             + y[i0 + 1] * (s * s2 * s3) / 2.0
             + y[i0 + 2] * (s * s1 * s3) / -2.0
             + y[i0 + 3] * (s * s1 * s2) / 6.0;
    }

    // History lookup during construction; v <= 2+m_built is available. The
    // rounding slack guards stage arguments that drift a few ulp past a join.
    double hist(double v) const {
        if (v <= 2.0 || pieces_.empty()) return 1.0 / v;
        return interp(v);
    }
};

// Tabulates omega on [1, u_max]. The actual step is 1/round(1/grid_step) so
// unit intervals hold a whole number of steps and delayed arguments land on
// the previous interval's grid.
inline Evaluator build_evaluator(double u_max, double grid_step) {
    if (!(u_max >= 3.0))
        throw parameter_error("build_evaluator: u_max must be >= 3");
    if (!(grid_step > 0.0) || grid_step > 0.01)
        throw parameter_error("build_evaluator: grid_step must be in (0, 0.01]");

    Evaluator ev;
    ev.u_max_ = u_max;
    ev.n_per_unit_ = static_cast<int>(std::lround(1.0 / grid_step));
    ev.step_ = 1.0 / ev.n_per_unit_;
    const double h = ev.step_;
    const int n = ev.n_per_unit_;
    const int n_pieces = static_cast<int>(std::ceil(u_max)) - 2;

    ev.pieces_.reserve(n_pieces);
    double y = 0.5; // omega(2)
    for (int m = 0; m < n_pieces; ++m) {
        std::vector<double> nodes(n + 1);
        nodes[0] = y;
        const double u0 = 2.0 + m;
        for (int i = 0; i < n; ++i) {
            const double u = u0 + i * h;
            const double d0 = ev.hist(u - 1.0);
            const double dm = ev.hist(u - 1.0 + 0.5 * h);
            const double d1 = ev.hist(u - 1.0 + h);
            const double k1 = (d0 - y) / u;
            const double k2 = (dm - (y + 0.5 * h * k1)) / (u + 0.5 * h);
            const double k3 = (dm - (y + 0.5 * h * k2)) / (u + 0.5 * h);
            const double k4 = (d1 - (y + h * k3)) / (u + h);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            nodes[i + 1] = y;
        }
        ev.pieces_.push_back(std::move(nodes));
    }
    return ev;
}

// e^{-gamma}, the limit of omega(u) as u -> infinity.
inline constexpr double omega_limit = 0.5614594835668851;

} // namespace lbsieve::buchstab
