// Acceptance suite: every numeric reproduction target of the toolkit, run at
// its stated tolerance, one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lbsieve/arith.hpp"
#include "lbsieve/buchstab.hpp"
#include "lbsieve/cli.hpp"
#include "lbsieve/decomposition.hpp"
#include "lbsieve/deficit.hpp"
#include "lbsieve/dirichlet.hpp"
#include "lbsieve/verify.hpp"
#include "test_support.hpp"

using namespace lbsieve;
using arith::u64;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double secs) {
    std::printf("[%s] criterion %2d: %-34s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id,
                name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double euler_gamma() {
    const int N = 10000;
    double H = 0.0;
    for (int n = N; n >= 1; --n) H += 1.0 / n;
    double x = N;
    return H - std::log(x) - 1.0 / (2 * x) + 1.0 / (12 * x * x) -
           1.0 / (120 * x * x * x * x);
}

double zeta_route_C() {
    const double pi = 3.14159265358979323846;
    const int N = 20000;
    double z3 = 0.0;
    for (int n = N; n >= 1; --n) z3 += 1.0 / (static_cast<double>(n) * n * n);
    double x = N;
    z3 += 1.0 / (2 * x * x) - 1.0 / (2 * x * x * x) + 1.0 / (4 * x * x * x * x);
    double z2 = pi * pi / 6.0;
    double z6 = std::pow(pi, 6) / 945.0;
    return z2 * z3 / z6;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main() {
    auto ev = buchstab::build_evaluator(10.0, 0.001);

    // ---- 1: first deficit integral -------------------------------------
    deficit::DeficitResult i1;
    {
        auto t0 = Clock::now();
        deficit::McParams p;
        p.samples = 2'000'000;
        p.seed = 42;
        p.strata_per_dim = 8;
        i1 = deficit::first_integral(ev, p);
        double secs = seconds_since(t0);
        bool pass = i1.value > 0.0 && i1.value < 0.71 && i1.std_error <= 0.002 &&
                    i1.samples >= 2'000'000 && secs <= 60.0;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "value %.5f +- %.5f < 0.71", i1.value,
                      i1.std_error);
        report(1, "first deficit integral", pass, buf, secs);
    }

    // ---- 2: second deficit integral, both modes ------------------------
    deficit::DeficitResult i2;
    {
        auto t0 = Clock::now();
        deficit::McParams p;
        p.samples = 4'000'000;
        p.seed = 42;
        p.strata_per_dim = 6;
        i2 = deficit::second_integral(ev, p, true);
        auto i2_raw = deficit::second_integral(ev, p, false);
        double secs = seconds_since(t0);
        bool pass = i2.value > 0.0 && i2.value < 0.02 && i2.std_error <= 0.0005 &&
                    i2_raw.value < 0.16 && secs <= 120.0;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "removed %.5f +- %.5f < 0.02; raw %.5f < 0.16", i2.value,
                      i2.std_error, i2_raw.value);
        report(2, "second deficit integral", pass, buf, secs);
    }

    // ---- 3: total deficit below 3/4 ------------------------------------
    {
        auto t0 = Clock::now();
        double total = i1.value + i2.value + deficit::imported_companion_deficit;
        bool pass = total < 0.75;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.5f + %.5f + 0.01 = %.5f < 0.75", i1.value,
                      i2.value, total);
        report(3, "total deficit", pass, buf, seconds_since(t0));
    }

    // ---- 4: Buchstab evaluator -----------------------------------------
    {
        auto t0 = Clock::now();
        double worst_12 = 0.0;
        for (double u = 1.0; u <= 2.0; u += 1.0 / 1024.0)
            worst_12 = std::max(worst_12, std::fabs(ev.omega(u) - 1.0 / u));
        double worst_res = 0.0;
        const double h = 1e-4;
        for (double u = 2.0; u <= 10.0 - h; u += 0.01) {
            double lhs = (ev.omega(u + h) - ev.omega(u)) / h;
            double m = u + 0.5 * h;
            double rhs = (ev.omega(m - 1.0) - ev.omega(m)) / m;
            worst_res = std::max(worst_res, std::fabs(lhs - rhs));
        }
        double limit_gap = std::fabs(ev.omega(10.0) - std::exp(-euler_gamma()));
        auto fine = buchstab::build_evaluator(10.0, 0.0005);
        double worst_half = 0.0;
        for (double u = 1.0; u <= 10.0; u += 0.003)
            worst_half = std::max(worst_half, std::fabs(fine.omega(u) - ev.omega(u)));
        bool pass = worst_12 <= 1e-12 && worst_res <= 1e-6 && limit_gap <= 1e-6 &&
                    worst_half <= 1e-9;
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "1/u gap %.1e; residual %.1e; limit gap %.1e; refine %.1e",
                      worst_12, worst_res, limit_gap, worst_half);
        report(4, "Buchstab evaluator", pass, buf, seconds_since(t0));
    }

    // ---- 5: weighted divisor-sum lemma ---------------------------------
    {
        auto t0 = Clock::now();
        bool pass = true;
        double worst_ratio = 0.0;
        for (u64 E : {10'000ULL, 100'000ULL, 1'000'000ULL})
            for (u64 d : {1ULL, 2ULL, 6ULL})
                for (u64 n : {1ULL, 5ULL, 77ULL}) {
                    if (std::gcd(d, n) != 1) continue;
                    auto c = verify::lemma72_check(E, d, n);
                    double ratio = std::fabs(c.lhs - c.main) / c.error_bound;
                    worst_ratio = std::max(worst_ratio, ratio);
                    if (!(std::fabs(c.lhs - c.main) <= 5.0 * c.error_bound))
                        pass = false;
                }
        auto c11 = verify::lemma72_check(1'000'000, 1, 1);
        double cgap = std::fabs(c11.lhs / 1e6 - zeta_route_C());
        if (!(cgap <= 1e-3)) pass = false;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "worst |lhs-main|/bound %.3f <= 5; C gap %.2e <= 1e-3",
                      worst_ratio, cgap);
        report(5, "divisor-sum main term", pass, buf, seconds_since(t0));
    }

    // ---- 6: lambda soundness at desk scale ------------------------------
    decomp::Decomposition d1 = decomp::principal_decomposition();
    {
        auto t0 = Clock::now();
        const u64 x = 10'000'000;
        deficit::McParams p;
        p.samples = 1'000'000;
        double integral = decomp::deficit_of(d1, ev, p).value;
        arith::PrimeTable base(3'200);
        bool pass = true;
        double worst_gap = 0.0;
        const double lx = std::log(static_cast<double>(x));
        for (u64 y : {6'000'000ULL, 8'000'000ULL, 10'000'000ULL}) {
            auto facs = decomp::detail::factorize_window(y - 100'000, y, base);
            double sl = 0.0, sr = 0.0;
            for (const auto& fac : facs) {
                double lam = decomp::evaluate_lambda(d1, fac.n, fac,
                                                     static_cast<double>(x));
                double rho = fac.is_prime() ? 1.0 : 0.0;
                if (lam > rho) pass = false;                    // zero violations
                bool small = false;
                for (auto [q, e] : fac.factors)
                    if (std::log(static_cast<double>(q)) / lx < 0.1) small = true;
                if (small && lam != 0.0) pass = false;
                sl += lam;
                sr += rho;
            }
            if (!(sl > 0.0)) pass = false;
            double gap = std::fabs(1.0 - sl / sr - integral);
            worst_gap = std::max(worst_gap, gap);
            if (gap > 0.1) pass = false;
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "no violations; worst |empirical - %.4f| = %.4f <= 0.1",
                      integral, worst_gap);
        report(6, "lambda soundness windows", pass, buf, seconds_since(t0));
    }

    // ---- 7: intersection combinator ------------------------------------
    {
        auto t0 = Clock::now();
        deficit::McParams p;
        p.samples = 200'000;
        std::mt19937_64 gen(20'240'814);
        bool pass = true;
        double worst_excess = -1e9;
        for (int pair = 0; pair < 20; ++pair) {
            auto a = test_support::random_decomposition(gen);
            auto b = test_support::random_decomposition(gen);
            auto da = decomp::deficit_of(a, ev, p);
            auto db = decomp::deficit_of(b, ev, p);
            auto dab = decomp::deficit_of(decomp::intersect(a, b), ev, p);
            double sigma = std::sqrt(da.std_error * da.std_error +
                                     db.std_error * db.std_error +
                                     dab.std_error * dab.std_error);
            double excess = dab.value - (da.value + db.value);
            worst_excess = std::max(worst_excess, excess - 3.0 * sigma);
            if (excess > 3.0 * sigma) pass = false;
        }
        auto d = test_support::random_decomposition(gen);
        auto dd = decomp::deficit_of(decomp::intersect(d, d), ev, p);
        auto d0 = decomp::deficit_of(d, ev, p);
        double sig = 3.0 * std::hypot(dd.std_error, d0.std_error);
        if (std::fabs(dd.value - d0.value) > sig) pass = false;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "20 pairs subadditive (worst margin %.2e); idempotent gap %.2e",
                      worst_excess, std::fabs(dd.value - d0.value));
        report(7, "intersection combinator", pass, buf, seconds_since(t0));
    }

    // ---- 8: representation scan ----------------------------------------
    {
        auto t0 = Clock::now();
        auto s = verify::scan_range(100'000, 110'000, 0.01, 0.56);
        double secs = seconds_since(t0);
        bool pass = s.failures.empty() && s.records.size() == s.range_size() &&
                    secs <= 300.0;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%zu failures; worst theta %.4f at n=%llu",
                      s.failures.size(), s.worst_theta,
                      static_cast<unsigned long long>(s.worst_n));
        report(8, "representation scan", pass, buf, secs);
    }

    // ---- 9: character infrastructure -----------------------------------
    {
        auto t0 = Clock::now();
        bool pass = true;
        double worst_orth = 0.0;
        for (u64 q = 2; q <= 100; ++q) {
            auto chars = dirichlet::characters_mod(q);
            u64 phi = arith::euler_phi(arith::factorize(q));
            if (chars.size() != phi) pass = false;
            for (u64 a = 1; a < q; ++a) {
                if (std::gcd(a, q) != 1) continue;
                for (u64 b = 1; b < q; ++b) {
                    if (std::gcd(b, q) != 1) continue;
                    std::complex<double> s(0.0, 0.0);
                    for (const auto& chi : chars)
                        s += chi.value(a) * std::conj(chi.value(b));
                    double expect = a == b ? static_cast<double>(phi) : 0.0;
                    double err = std::abs(s - std::complex<double>(expect, 0.0));
                    worst_orth = std::max(worst_orth, err);
                    if (err > 1e-9 * (1.0 + expect)) pass = false;
                }
            }
        }
        // expansion identity at x = 1e6
        const u64 x = 1'000'000;
        const u64 y = x, h = 1'995, h0 = 5'239;
        u64 root = static_cast<u64>(std::sqrt(static_cast<double>(x))) + 2;
        arith::PrimeTable base(root);
        arith::SieveSegment seg(y - h0, y, base);
        dirichlet::Sequence rho = [&](u64 k) { return seg.is_prime(k) ? 1.0 : 0.0; };
        double worst_exp = 0.0;
        for (u64 q = 2; q <= 50; ++q) {
            auto chars = dirichlet::characters_mod(q);
            u64 phi = arith::euler_phi(arith::factorize(q));
            std::vector<std::complex<double>> echi;
            for (const auto& chi : chars)
                echi.push_back(dirichlet::E_chi(rho, y, h, h0, chi));
            for (u64 a = 1; a < q; ++a) {
                if (std::gcd(a, q) != 1) continue;
                double direct = dirichlet::E_progression(rho, y, h, h0, q, a);
                std::complex<double> via(0.0, 0.0);
                for (std::size_t c = 0; c < chars.size(); ++c)
                    via += std::conj(chars[c].value(a)) * echi[c];
                via /= static_cast<double>(phi);
                double err = std::abs(via - std::complex<double>(direct, 0.0));
                worst_exp = std::max(worst_exp, err);
                if (err > 1e-9) pass = false;
            }
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "orthogonality err %.1e; expansion err %.1e (x=1e6)",
                      worst_orth, worst_exp);
        report(9, "character infrastructure", pass, buf, seconds_since(t0));
    }

    // ---- 10: determinism ------------------------------------------------
    {
        auto t0 = Clock::now();
        bool pass = true;
        deficit::McParams p;
        p.samples = 300'000;
        p.seed = 2024;
        auto r1 = deficit::first_integral(ev, p);
        auto r2 = deficit::first_integral(ev, p);
        if (r1.value != r2.value || r1.std_error != r2.std_error) pass = false;
        int saved = thread_cap();
        thread_cap() = 1;
        auto s1 = deficit::second_integral(ev, p, true);
        thread_cap() = 2;
        auto s2 = deficit::second_integral(ev, p, true);
        thread_cap() = saved;
        if (s1.value != s2.value || s1.std_error != s2.std_error) pass = false;

        std::string fa = "acc_det_a.json", fb = "acc_det_b.json";
        if (cli::run({"deficit", "run", "--integral", "first", "--samples", "200000",
                      "--seed", "31", "--out", fa}) != 0)
            pass = false;
        if (cli::run({"--threads", "1", "deficit", "run", "--integral", "first",
                      "--samples", "200000", "--seed", "31", "--out", fb}) != 0)
            pass = false;
        if (slurp(fa) != slurp(fb) || slurp(fa).empty()) pass = false;
        report(10, "bit-exact reproducibility", pass,
               pass ? "library and CLI artifacts identical across runs/threads"
                    : "mismatch detected",
               seconds_since(t0));
    }

    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
